import math
import pickle
import random

import pytest

from fo_corpus import all_graphs, random_graph, relabel_randomly, sentence_corpus
from maxdeg.counting import lambda_p
from maxdeg.graph import Graph, complete_graph, cycle_graph, empty_graph, path_graph
from maxdeg.logic import (
    And,
    Deg,
    Edge,
    Eq,
    EvalBudgetError,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    ParseError,
    Sentence,
    Winner,
    brute_force_evaluate,
    desugar,
    desugar_degree,
    ef_game,
    evaluate,
    free_vars,
    is_sentence,
    limit_profile_property,
    parse,
    parse_formula,
    qrank,
    to_text,
    wilson_interval,
)
from maxdeg.logic.evaluate import miniscope


# ------------------------------------------------------------------ syntax


def test_parse_basic():
    phi = parse("exists x. exists y. E(x, y) & !x = y")
    assert phi == Exists("x", Exists("y", And(Edge("x", "y"), Not(Eq("x", "y")))))
    assert parse_formula("deg(x) >= 2") == Deg("x", ">=", 2)


def test_implication_is_right_associative():
    phi = parse_formula("x = x -> y = y -> z = z")
    assert phi == Implies(Eq("x", "x"), Implies(Eq("y", "y"), Eq("z", "z")))


def test_precedence():
    phi = parse_formula("x = y | E(x, y) & !E(y, x)")
    assert phi == Or(Eq("x", "y"), And(Edge("x", "y"), Not(Edge("y", "x"))))


def test_quantifier_scope_is_maximal():
    phi = parse("exists x. E(x, x) | forall y. x = y & E(y, x)")
    assert phi == Exists("x", Or(Edge("x", "x"), Forall("y", And(Eq("x", "y"), Edge("y", "x")))))


def test_deg_is_a_variable_name_without_parenthesis():
    assert parse("exists deg. deg = deg") == Exists("deg", Eq("deg", "deg"))


@pytest.mark.parametrize(
    "text,pos",
    [
        ("exists x E(x, x)", 9),
        ("E(x, y", 6),
        ("exists x. deg(x) > 2", 17),
        ("forall X. X = X", 7),
        ("exists x. x = x )", 16),
        ("", 0),
    ],
)
def test_parse_error_positions(text, pos):
    with pytest.raises(ParseError) as info:
        parse_formula(text) if "exists" not in text and "forall" not in text else parse(text)
    assert info.value.pos == pos
    assert str(info.value).endswith(f"at position {pos}")


def test_free_variables_rejected_in_sentences():
    with pytest.raises(ParseError, match="free variables in sentence: x, y"):
        parse("E(x, y)")
    assert free_vars(parse_formula("exists x. E(x, y)")) == {"y"}
    assert is_sentence(parse("forall x. x = x"))


def test_round_trip_corpus():
    for phi in sentence_corpus(300, 4, seed=1):
        text = to_text(phi)
        assert parse(text) == phi, text


def test_printer_output():
    phi = And(Exists("x", Eq("x", "x")), Eq("y", "y"))
    assert to_text(phi) == "(exists x. x = x) & y = y"
    assert to_text(Implies(Implies(Eq("x", "x"), Eq("y", "y")), Eq("z", "z"))) == "(x = x -> y = y) -> z = z"


def test_quantifier_rank():
    assert qrank(Edge("x", "y")) == 0
    assert qrank(parse("exists x. exists y. E(x, y)")) == 2
    inner = parse_formula("E(x, x)")
    assert qrank(Not(And(Exists("x", inner), Exists("y", Exists("z", inner))))) == 2
    assert qrank(parse("exists x. deg(x) = 1")) == 3
    assert qrank(parse("exists x. deg(x) >= 2")) == 3
    assert qrank(parse("exists x. deg(x) <= 0")) == 2


# ------------------------------------------------------------------ desugaring


def test_desugar_shapes():
    assert desugar_degree(Deg("x", ">=", 0)) == Eq("x", "x")
    assert desugar_degree(Deg("x", ">=", 1)) == Exists("y1", Edge("x", "y1"))
    two = desugar_degree(Deg("x", ">=", 2))
    assert two == Exists("y1", And(Edge("x", "y1"), Exists("y2", And(Edge("x", "y2"), Not(Eq("y2", "y1"))))))
    assert desugar_degree(Deg("x", "<=", 0)) == Not(Exists("y1", Edge("x", "y1")))
    assert "y1" not in str(desugar_degree(Deg("y1", ">=", 1)).var)


@pytest.mark.parametrize("op", ["=", ">=", "<="])
def test_desugar_rank_matches_degree_rank(op):
    for c in range(4):
        atom = Deg("x", op, c)
        assert qrank(desugar_degree(atom)) == qrank(atom)


def test_desugar_agrees_with_degree_counting():
    graphs = [G for n in range(1, 5) for G in all_graphs(n)]
    rng = random.Random(3)
    graphs += [random_graph(rng, 6, 0.5) for _ in range(100)]
    atoms = [Deg("x", op, c) for op in ("=", ">=", "<=") for c in range(4)]
    for G in graphs:
        for atom in atoms:
            plain = desugar_degree(atom)
            for v in G.vertices():
                assert brute_force_evaluate(G, plain, {"x": v}) == brute_force_evaluate(G, atom, {"x": v})


def test_desugar_avoids_capture():
    phi = parse("exists y1. deg(y1) >= 1 & forall x. deg(x) <= 2")
    plain = desugar(phi)
    assert "Deg" not in repr(plain)
    for G in [path_graph(3), complete_graph(4), empty_graph(2), cycle_graph(4)]:
        assert brute_force_evaluate(G, plain) == brute_force_evaluate(G, phi)


# ------------------------------------------------------------------ evaluation


def test_evaluate_examples():
    tri = parse("exists x. exists y. exists z. E(x, y) & E(y, z) & E(z, x)")
    assert evaluate(complete_graph(3), tri)
    assert not evaluate(cycle_graph(4), tri)
    assert evaluate(cycle_graph(4), parse_formula("E(x, y)"), {"x": 1, "y": 2})
    with pytest.raises(ValueError):
        evaluate(cycle_graph(4), parse_formula("E(x, y)"), {"x": 1})
    with pytest.raises(ValueError):
        evaluate(cycle_graph(4), parse_formula("E(x, x)"), {"x": 9})


def test_evaluate_matches_reference_exhaustively():
    corpus = sentence_corpus(60, 3, seed=7)
    for n in range(1, 5):
        for G in all_graphs(n):
            for phi in corpus:
                assert evaluate(G, phi) == brute_force_evaluate(G, phi), to_text(phi)


def test_miniscope_preserves_truth():
    rng = random.Random(13)
    corpus = sentence_corpus(80, 3, seed=13)
    for _ in range(40):
        G = random_graph(rng, 6, 0.4, R=3)
        for phi in corpus:
            assert brute_force_evaluate(G, miniscope(phi)) == brute_force_evaluate(G, phi)


def test_isomorphism_invariance():
    rng = random.Random(21)
    corpus = sentence_corpus(40, 3, seed=21)
    for _ in range(30):
        G = random_graph(rng, 7, 0.35, R=3)
        H = relabel_randomly(rng, G)
        for phi in corpus:
            assert evaluate(G, phi) == evaluate(H, phi)


def test_sentence_object():
    s = Sentence(parse("exists x. deg(x) = 0"))
    assert s(empty_graph(3)) and not s(cycle_graph(3))
    assert pickle.loads(pickle.dumps(s))(empty_graph(2))
    with pytest.raises(ValueError):
        Sentence(parse_formula("E(x, y)"))


def test_evaluation_budget():
    phi = parse("forall x. forall y. forall z. x = y | y = z | E(x, z)")
    with pytest.raises(EvalBudgetError):
        evaluate(cycle_graph(400), phi, budget=1000)
    with pytest.raises(EvalBudgetError):
        Sentence(phi, budget=1000)(cycle_graph(400))
    # guarded quantifiers are cheap even on large graphs
    guarded = parse("forall x. exists y. E(x, y) & exists z. E(y, z) & !z = x")
    assert evaluate(cycle_graph(5000), guarded, budget=10**6)


# ------------------------------------------------------------------ games


def test_ef_small_examples():
    K2 = complete_graph(2)
    twoK1 = empty_graph(2)
    assert ef_game(K2, twoK1, 1) is Winner.DUPLICATOR
    assert ef_game(K2, twoK1, 2) is Winner.SPOILER
    assert ef_game(cycle_graph(6), cycle_graph(6), 5) is Winner.DUPLICATOR
    assert str(Winner.SPOILER) == "Spoiler"
    # a long and a slightly longer cycle agree on short games
    assert ef_game(cycle_graph(7), cycle_graph(8), 2) is Winner.DUPLICATOR
    assert ef_game(path_graph(3), complete_graph(3), 3) is Winner.SPOILER
    with pytest.raises(ValueError):
        ef_game(K2, K2, -1)


def test_ef_monotone_in_rounds():
    rng = random.Random(31)
    for _ in range(40):
        G = random_graph(rng, 5, 0.5)
        H = random_graph(rng, 5, 0.5)
        results = [ef_game(G, H, k) for k in range(4)]
        first_loss = next((k for k, w in enumerate(results) if w is Winner.SPOILER), 4)
        assert all(w is Winner.DUPLICATOR for w in results[:first_loss])
        assert all(w is Winner.SPOILER for w in results[first_loss:])


def test_ef_isomorphic_copies():
    rng = random.Random(37)
    for _ in range(10):
        G = random_graph(rng, 5, 0.5)
        assert ef_game(G, relabel_randomly(rng, G), 3) is Winner.DUPLICATOR


# ------------------------------------------------------------------ limits


def test_profile_property_examples():
    for R in (2, 3, 4):
        assert limit_profile_property(lambda c: c["q"] == 0, 2, R, ["q"]) == pytest.approx(math.exp(-(R - 1)))
        assert limit_profile_property(lambda c: True, 1, R, ["q", "r3"]) == pytest.approx(1.0)
    p = limit_profile_property(lambda c: c["r3"] == 0, 1, 3, ["r3"])
    assert p == pytest.approx(math.exp(-float(lambda_p(3, 3))))


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - lo == pytest.approx(0.19, abs=0.01)
    assert wilson_interval(0, 20)[0] == 0.0
