"""First-order formulas over the language of graphs ``{E, =}``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Edge:
    x: str
    y: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Deg:
    """Degree constraint ``deg(x) op c``; sugar for a first-order formula."""

    x: str
    op: str  # one of "=", ">=", "<="
    c: int

    def __post_init__(self):
        if self.op not in ("=", ">=", "<="):
            raise ValueError(f"bad degree comparison {self.op!r}")
        if self.c < 0:
            raise ValueError("degree bound must be non-negative")


@dataclass(frozen=True)
class Not:
    f: "Formula"


@dataclass(frozen=True)
class And:
    a: "Formula"
    b: "Formula"


@dataclass(frozen=True)
class Or:
    a: "Formula"
    b: "Formula"


@dataclass(frozen=True)
class Implies:
    a: "Formula"
    b: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Edge, Eq, Deg, Not, And, Or, Implies, Exists, Forall]
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall)


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, (Edge, Eq)):
        return frozenset((phi.x, phi.y))
    if isinstance(phi, Deg):
        return frozenset((phi.x,))
    if isinstance(phi, Not):
        return free_vars(phi.f)
    if isinstance(phi, BINARY):
        return free_vars(phi.a) | free_vars(phi.b)
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def deg_rank(atom: Deg) -> int:
    """Quantifier rank of the expansion of a degree atom."""
    if atom.op == ">=":
        return atom.c
    return atom.c + 1


def qrank(phi: Formula) -> int:
    """Maximal quantifier nesting depth; degree atoms count their expansion."""
    if isinstance(phi, (Edge, Eq)):
        return 0
    if isinstance(phi, Deg):
        return deg_rank(phi)
    if isinstance(phi, Not):
        return qrank(phi.f)
    if isinstance(phi, BINARY):
        return max(qrank(phi.a), qrank(phi.b))
    if isinstance(phi, QUANTIFIERS):
        return 1 + qrank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def _fresh(base: str, taken: set[str]) -> str:
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    name = f"{base}{i}"
    taken.add(name)
    return name


def _at_least(x: str, c: int, taken: set[str]) -> Formula:
    # exists y1 (E(x,y1) & exists y2 (E(x,y2) & !y2=y1 & ... ))
    if c == 0:
        return Eq(x, x)
    names = [_fresh("y", taken) for _ in range(c)]
    body: Formula | None = None
    for i in reversed(range(c)):
        y = names[i]
        conj: Formula = Edge(x, y)
        for prev in names[:i]:
            conj = And(conj, Not(Eq(y, prev)))
        if body is not None:
            conj = And(conj, body)
        body = Exists(y, conj)
    return body


def desugar_degree(atom: Deg, avoid: frozenset[str] | set[str] = frozenset()) -> Formula:
    """Plain first-order expansion of ``deg(x) op c``.

    ``deg(x) >= c`` asks for ``c`` pairwise distinct neighbours (rank ``c``);
    ``=`` and ``<=`` add the negation of ``deg(x) >= c+1`` (rank ``c+1``).
    Bound variables avoid the names in ``avoid``.
    """
    taken = set(avoid) | {atom.x}
    if atom.op == ">=":
        return _at_least(atom.x, atom.c, taken)
    upper = Not(_at_least(atom.x, atom.c + 1, set(taken)))
    if atom.op == "<=" or atom.c == 0:
        return upper
    return And(_at_least(atom.x, atom.c, set(taken)), upper)


def desugar(phi: Formula) -> Formula:
    """Replace every degree atom by its first-order expansion."""

    def go(f: Formula, scope: frozenset[str]) -> Formula:
        if isinstance(f, Deg):
            return desugar_degree(f, scope)
        if isinstance(f, (Edge, Eq)):
            return f
        if isinstance(f, Not):
            return Not(go(f.f, scope))
        if isinstance(f, BINARY):
            return type(f)(go(f.a, scope), go(f.b, scope))
        if isinstance(f, QUANTIFIERS):
            return type(f)(f.var, go(f.body, scope | {f.var}))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi, frozenset(all_vars(phi)))


def all_vars(phi: Formula) -> set[str]:
    if isinstance(phi, (Edge, Eq)):
        return {phi.x, phi.y}
    if isinstance(phi, Deg):
        return {phi.x}
    if isinstance(phi, Not):
        return all_vars(phi.f)
    if isinstance(phi, BINARY):
        return all_vars(phi.a) | all_vars(phi.b)
    return {phi.var} | all_vars(phi.body)


# ------------------------------------------------------------------ printing

_PREC = {Implies: 1, Or: 2, And: 3}
_SYM = {Implies: "->", Or: "|", And: "&"}


def to_text(phi: Formula) -> str:
    """Concrete syntax accepted by :func:`maxdeg.logic.parse`."""
    return _show(phi, 0)


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Edge):
        return f"E({f.x},{f.y})"
    if isinstance(f, Eq):
        return f"{f.x} = {f.y}"
    if isinstance(f, Deg):
        return f"deg({f.x}) {f.op} {f.c}"
    if isinstance(f, Not):
        return "!" + _show(f.f, 4)
    if isinstance(f, QUANTIFIERS):
        kw = "exists" if isinstance(f, Exists) else "forall"
        text = f"{kw} {f.var}. {_show(f.body, 0)}"
        return f"({text})" if ctx > 0 else text
    prec = _PREC[type(f)]
    right_assoc = isinstance(f, Implies)
    left = _show(f.a, prec + 1 if right_assoc else prec)
    right = _show(f.b, prec if right_assoc else prec + 1)
    text = f"{left} {_SYM[type(f)]} {right}"
    return f"({text})" if prec < ctx else text
