"""Model checking of first-order formulas on finite graphs.

Formulas are compiled once into nested closures.  A quantifier whose body
forces adjacency to an already bound vertex (``exists y. E(x,y) & ...`` or
``forall y. E(x,y) -> ...``) only ranges over that vertex's neighbours, which
is what keeps degree-bounded sentences cheap on large graphs.
"""
from __future__ import annotations

from typing import Callable, Mapping

from ..graph import Graph
from .formula import And, Deg, Edge, Eq, Exists, Forall, Formula, Implies, Not, Or, free_vars

DEFAULT_EVAL_BUDGET = 50_000_000

Check = Callable[[list], bool]


class EvalBudgetError(RuntimeError):
    pass


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _conjuncts(f.a) + _conjuncts(f.b)
    return [f]


def _join(parts: list[Formula]) -> Formula:
    out = parts[0]
    for f in parts[1:]:
        out = And(out, f)
    return out


def miniscope(phi: Formula) -> Formula:
    """Push quantifiers inward past the parts of their body that ignore them.

    ``exists v. A & B`` becomes ``A & exists v. B`` when ``v`` is not free in
    ``A``, and ``forall v. A -> B`` becomes ``A -> forall v. B``.  The result
    is logically equivalent and exposes adjacency guards to the evaluator.
    """
    if isinstance(phi, (Edge, Eq, Deg)):
        return phi
    if isinstance(phi, Not):
        return Not(miniscope(phi.f))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(miniscope(phi.a), miniscope(phi.b))
    body = miniscope(phi.body)
    v = phi.var
    if isinstance(phi, Exists):
        parts = _conjuncts(body)
        outer = [f for f in parts if v not in free_vars(f)]
        inner = [f for f in parts if v in free_vars(f)]
        if outer and inner:
            return _join(outer + [Exists(v, _join(inner))])
        return Exists(v, body)
    if isinstance(body, Implies) and v not in free_vars(body.a):
        return Implies(body.a, miniscope(Forall(v, body.b)))
    return Forall(v, body)


def _guard(var: str, body: Formula, bound: Mapping[str, int], universal: bool) -> str | None:
    """Name of a bound variable the quantified one must be adjacent to, if any."""
    if universal:
        if not isinstance(body, Implies):
            return None
        body = body.a
    for c in _conjuncts(body):
        if isinstance(c, Edge):
            if c.x == var and c.y != var and c.y in bound:
                return c.y
            if c.y == var and c.x != var and c.x in bound:
                return c.x
    return None


def estimate_cost(phi: Formula, n: int, R: int, bound: frozenset[str] = frozenset()) -> int:
    """Worst-case number of atom evaluations of the compiled checker."""
    if isinstance(phi, (Edge, Eq, Deg)):
        return 1
    if isinstance(phi, Not):
        return estimate_cost(phi.f, n, R, bound)
    if isinstance(phi, (And, Or, Implies)):
        return estimate_cost(phi.a, n, R, bound) + estimate_cost(phi.b, n, R, bound)
    inner = bound | {phi.var}
    guarded = _guard(phi.var, phi.body, dict.fromkeys(bound, 0), isinstance(phi, Forall))
    width = R if guarded is not None else n
    return max(width, 1) * estimate_cost(phi.body, n, R, inner)


def _mentions_edges(phi: Formula) -> bool:
    if isinstance(phi, Edge):
        return True
    if isinstance(phi, (Eq, Deg)):
        return False
    if isinstance(phi, Not):
        return _mentions_edges(phi.f)
    if isinstance(phi, (And, Or, Implies)):
        return _mentions_edges(phi.a) or _mentions_edges(phi.b)
    return _mentions_edges(phi.body)


def compile_formula(phi: Formula, G: Graph, free: tuple[str, ...] = ()) -> Check:
    """Checker taking an environment list whose first slots hold ``free``."""
    adj = G.adjacency if _mentions_edges(phi) else ()
    deg = G.degrees.tolist()
    vertices = range(1, G.n + 1)

    def go(f: Formula, slots: dict[str, int], depth: int) -> Check:
        if isinstance(f, Edge):
            i, j = slots[f.x], slots[f.y]
            return lambda env: env[j] in adj[env[i]]
        if isinstance(f, Eq):
            i, j = slots[f.x], slots[f.y]
            return lambda env: env[i] == env[j]
        if isinstance(f, Deg):
            i, c = slots[f.x], f.c
            if f.op == ">=":
                return lambda env: deg[env[i]] >= c
            if f.op == "<=":
                return lambda env: deg[env[i]] <= c
            return lambda env: deg[env[i]] == c
        if isinstance(f, Not):
            inner = go(f.f, slots, depth)
            return lambda env: not inner(env)
        if isinstance(f, And):
            a, b = go(f.a, slots, depth), go(f.b, slots, depth)
            return lambda env: a(env) and b(env)
        if isinstance(f, Or):
            a, b = go(f.a, slots, depth), go(f.b, slots, depth)
            return lambda env: a(env) or b(env)
        if isinstance(f, Implies):
            a, b = go(f.a, slots, depth), go(f.b, slots, depth)
            return lambda env: (not a(env)) or b(env)
        universal = isinstance(f, Forall)
        guard = _guard(f.var, f.body, slots, universal)
        inner_slots = dict(slots)
        inner_slots[f.var] = depth
        body = go(f.body, inner_slots, depth + 1)
        k = depth
        if guard is not None:
            g = slots[guard]

            def domain(env):
                return adj[env[g]]

        else:

            def domain(env):
                return vertices

        if universal:

            def check(env):
                for v in domain(env):
                    env[k] = v
                    if not body(env):
                        return False
                return True

        else:

            def check(env):
                for v in domain(env):
                    env[k] = v
                    if body(env):
                        return True
                return False

        return check

    slots = {name: i for i, name in enumerate(free)}
    return go(phi, slots, len(free))


def _max_depth(phi: Formula) -> int:
    if isinstance(phi, (Edge, Eq, Deg)):
        return 0
    if isinstance(phi, Not):
        return _max_depth(phi.f)
    if isinstance(phi, (And, Or, Implies)):
        return max(_max_depth(phi.a), _max_depth(phi.b))
    return 1 + _max_depth(phi.body)


def evaluate(
    G: Graph,
    phi: Formula,
    assignment: Mapping[str, int] | None = None,
    budget: int = DEFAULT_EVAL_BUDGET,
) -> bool:
    """Truth of ``phi`` in ``G``; free variables are read from ``assignment``."""
    assignment = dict(assignment or {})
    missing = free_vars(phi) - assignment.keys()
    if missing:
        raise ValueError(f"unassigned free variables: {', '.join(sorted(missing))}")
    for name, v in assignment.items():
        if not 1 <= v <= G.n:
            raise ValueError(f"{name} = {v} is not a vertex")
    free = tuple(sorted(assignment))
    phi = miniscope(phi)
    cost = estimate_cost(phi, G.n, G.R, frozenset(free))
    if cost > budget:
        raise EvalBudgetError(f"estimated cost {cost} exceeds budget {budget}")
    check = compile_formula(phi, G, free)
    env = [assignment[name] for name in free] + [0] * _max_depth(phi)
    return check(env)


class Sentence:
    """A sentence compiled lazily per graph, for repeated evaluation."""

    def __init__(self, phi: Formula, budget: int = DEFAULT_EVAL_BUDGET):
        if free_vars(phi):
            raise ValueError("not a sentence")
        self.phi = phi
        self.compiled = miniscope(phi)
        self.budget = budget
        self._depth = _max_depth(phi)

    def __call__(self, G: Graph) -> bool:
        cost = estimate_cost(self.compiled, G.n, G.R)
        if cost > self.budget:
            raise EvalBudgetError(f"estimated cost {cost} exceeds budget {self.budget}")
        return compile_formula(self.compiled, G)([0] * self._depth)


def brute_force_evaluate(G: Graph, phi: Formula, assignment: Mapping[str, int] | None = None) -> bool:
    """Direct recursive evaluation with no guards or compilation (reference checker)."""
    env = dict(assignment or {})

    def go(f: Formula) -> bool:
        if isinstance(f, Edge):
            return G.has_edge(env[f.x], env[f.y])
        if isinstance(f, Eq):
            return env[f.x] == env[f.y]
        if isinstance(f, Deg):
            d = G.degree(env[f.x])
            return {">=": d >= f.c, "<=": d <= f.c, "=": d == f.c}[f.op]
        if isinstance(f, Not):
            return not go(f.f)
        if isinstance(f, And):
            return go(f.a) and go(f.b)
        if isinstance(f, Or):
            return go(f.a) or go(f.b)
        if isinstance(f, Implies):
            return (not go(f.a)) or go(f.b)
        saved = env.get(f.var)
        results = []
        for v in range(1, G.n + 1):
            env[f.var] = v
            results.append(go(f.body))
        if saved is None:
            env.pop(f.var, None)
        else:
            env[f.var] = saved
        return any(results) if isinstance(f, Exists) else all(results)

    return go(phi)
