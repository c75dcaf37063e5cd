"""First-order logic of graphs: syntax, model checking, games and limit laws."""
from .ef import GameBudgetError, Winner, ef_game
from .evaluate import EvalBudgetError, Sentence, brute_force_evaluate, evaluate
from .formula import (
    And,
    Deg,
    Edge,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    desugar,
    desugar_degree,
    free_vars,
    is_sentence,
    qrank,
    to_text,
)
from .limits import LimitEstimate, NEstimate, limit_mc, limit_profile_property, wilson_interval
from .parser import ParseError, parse, parse_formula

__all__ = [
    "And",
    "Deg",
    "Edge",
    "Eq",
    "EvalBudgetError",
    "Exists",
    "Forall",
    "Formula",
    "GameBudgetError",
    "Implies",
    "LimitEstimate",
    "NEstimate",
    "Not",
    "Or",
    "ParseError",
    "Sentence",
    "Winner",
    "brute_force_evaluate",
    "desugar",
    "desugar_degree",
    "ef_game",
    "evaluate",
    "free_vars",
    "is_sentence",
    "limit_mc",
    "limit_profile_property",
    "parse",
    "parse_formula",
    "qrank",
    "to_text",
    "wilson_interval",
]
