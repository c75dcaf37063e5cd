"""Exact and asymptotic evaluation of the closed-form counting quantities.

Everything exact is computed with Python integers and :class:`fractions.Fraction`;
the asymptotic approximants drop their ``o(1)`` terms and exist so they can be
compared against the exact values, never to replace them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from scipy.special import gammaln
from scipy.stats import poisson

# Above this many points the exact rational weight is skipped and only the
# log-space shadow is kept.
EXACT_POINT_LIMIT = 200_000


# ------------------------------------------------------------------ matchings


def matchings(two_m: int) -> int:
    """Number of perfect matchings on ``two_m`` points, ``(2m)! / (m! 2^m)``."""
    if two_m < 0 or two_m % 2:
        raise ValueError("matchings needs a non-negative even number of points")
    m = two_m // 2
    return math.factorial(two_m) // (math.factorial(m) * 2**m)


def log_matchings(two_m: int) -> float:
    if two_m < 0 or two_m % 2:
        raise ValueError("matchings needs a non-negative even number of points")
    m = two_m // 2
    return float(gammaln(two_m + 1) - gammaln(m + 1) - m * math.log(2))


def matchings_stirling(two_m: int) -> float:
    """Stirling approximant ``sqrt(2) * (2m/e)^m`` (the ``o(1)`` term dropped)."""
    if two_m < 2 or two_m % 2:
        raise ValueError("matchings_stirling needs an even number of points >= 2")
    m = two_m // 2
    return math.sqrt(2) * (two_m / math.e) ** m


def stirling_ratio(two_m: int) -> float:
    """``matchings_stirling(2m) / matchings(2m)``, evaluated without overflow."""
    m = two_m // 2
    log_approx = 0.5 * math.log(2) + m * (math.log(two_m) - 1)
    return math.exp(log_approx - math.log(matchings(two_m)))


def matching_ratio(m: int, p: int) -> float:
    """Exact ``M(2m) / M(2m - 2p) = (2m-1)(2m-3)...(2m-2p+1)`` as a float."""
    if not 0 <= p <= m:
        raise ValueError("matching_ratio needs 0 <= p <= m")
    out = 1
    for j in range(p):
        out *= 2 * m - 1 - 2 * j
    return float(out)


def matching_ratio_relerr(m: int, p: int) -> float:
    """Relative error of ``(2m)^p`` as an estimate of :func:`matching_ratio`."""
    exact = 1
    for j in range(p):
        exact *= 2 * m - 1 - 2 * j
    return float(Fraction((2 * m) ** p - exact, exact))


# ------------------------------------------------------------------ factorials


def falling_factorial(n: int, k: int) -> int:
    """``(n)_k = n (n-1) ... (n-k+1)``."""
    if not 0 <= k <= n:
        raise ValueError("falling_factorial needs 0 <= k <= n")
    return math.perm(n, k)


def log_falling_factorial_approx(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError("falling_factorial_approx needs 0 <= k <= n")
    return k * math.log(n) - k * k / (2 * n) if n else 0.0


def falling_factorial_approx(n: int, k: int) -> float:
    """``n^k exp(-k^2 / 2n)``; raises ``OverflowError`` past double range."""
    return math.exp(log_falling_factorial_approx(n, k))


def falling_factorial_ratio(n: int, k: int) -> float:
    """``falling_factorial_approx(n, k) / falling_factorial(n, k)`` in log space."""
    return math.exp(log_falling_factorial_approx(n, k) - math.log(falling_factorial(n, k)))


# ------------------------------------------------------------------ degree classes


@dataclass(frozen=True)
class DegreeClass:
    """Vertex counts ``(d_0, ..., d_R)`` per degree."""

    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if not self.d or any(x < 0 for x in self.d):
            raise ValueError("degree class entries must be non-negative")

    @property
    def R(self) -> int:
        return len(self.d) - 1

    @property
    def n(self) -> int:
        return sum(self.d)

    @property
    def two_m(self) -> int:
        return sum(i * x for i, x in enumerate(self.d))

    def __str__(self) -> str:
        return ";".join(map(str, self.d))


@dataclass(frozen=True)
class ExactWeight:
    """An exact rational together with its natural logarithm."""

    value: Fraction | None
    log: float

    def __float__(self) -> float:
        if self.value is not None:
            return float(self.value)
        return math.exp(self.log)


def _multinomial(parts: Sequence[int]) -> int:
    out, total = 1, 0
    for x in parts:
        total += x
        out *= math.comb(total, x)
    return out


def log_degree_class_weight(d: Sequence[int]) -> float:
    n = sum(d)
    two_m = sum(i * x for i, x in enumerate(d))
    if two_m % 2:
        raise ValueError("degree class has odd degree sum")
    out = gammaln(n + 1) - sum(gammaln(x + 1) for x in d)
    out += log_matchings(two_m)
    out -= sum(x * gammaln(i + 1) for i, x in enumerate(d))
    return float(out)


def degree_class_weight(d: DegreeClass | Sequence[int], exact: bool | None = None) -> ExactWeight:
    """Configuration mass of a degree class divided by ``prod (i!)^{d_i}``.

    ``multinomial(n; d_0..d_R) * M(2m) / prod_i (i!)^{d_i}``.  The rational is
    computed when ``exact`` is true, or by default when the class has at most
    :data:`EXACT_POINT_LIMIT` points.
    """
    dc = d if isinstance(d, DegreeClass) else DegreeClass(tuple(d))
    if dc.two_m % 2:
        raise ValueError("degree class has odd degree sum")
    if exact is None:
        exact = dc.two_m <= EXACT_POINT_LIMIT
    log_w = log_degree_class_weight(dc.d)
    if not exact:
        return ExactWeight(None, log_w)
    denom = 1
    for i, x in enumerate(dc.d):
        denom *= math.factorial(i) ** x
    value = Fraction(_multinomial(dc.d) * matchings(dc.two_m), denom)
    return ExactWeight(value, log_w)


def asymptotic_class_logweight(n: int, R: int, d_low: int, d_mid: int) -> float:
    """Log of the class weight relative to the ``n``-only constant.

    ``d_low`` counts degree ``R-2`` vertices and ``d_mid`` degree ``R-1``
    vertices; everything else has degree ``R``.  Includes the exponential
    correction ``-(d_mid + d_low)^2 / 2n + (d_mid + 2 d_low)^2 / 4Rn``.
    """
    out = 0.0
    if d_low:
        out += d_low * math.log(R - 1) - math.lgamma(d_low + 1)
    if d_mid:
        out += d_mid * 0.5 * math.log(R * n) - math.lgamma(d_mid + 1)
    out -= (d_mid + d_low) ** 2 / (2 * n)
    out += (d_mid + 2 * d_low) ** 2 / (4 * R * n)
    return out


def class_from_low_counts(n: int, R: int, d_low: int, d_mid: int) -> DegreeClass:
    """Class with ``d_low`` vertices of degree ``R-2``, ``d_mid`` of ``R-1``, rest ``R``."""
    d = [0] * (R + 1)
    d[R - 2] += d_low
    d[R - 1] += d_mid
    d[R] += n - d_low - d_mid
    return DegreeClass(tuple(d))


# ------------------------------------------------------------------ Poisson limits


def lambda_p(R: int, p: int) -> Fraction:
    """Limiting mean number of ``p``-cycles, ``(R-1)^p / 2p``."""
    if R < 2 or p < 1:
        raise ValueError("lambda_p needs R >= 2 and p >= 1")
    return Fraction((R - 1) ** p, 2 * p)


def mu_p(R: int, p: int) -> Fraction:
    """Limiting mean number of ``p``-paths between degree ``R-1`` vertices, ``(R-1)^(p+1) / 2``."""
    if R < 2 or p < 1:
        raise ValueError("mu_p needs R >= 2 and p >= 1")
    return Fraction((R - 1) ** (p + 1), 2)


def degree_poisson_mean(R: int) -> int:
    """Limiting mean number of vertices of degree ``R-2``."""
    if R < 2:
        raise ValueError("degree_poisson_mean needs R >= 2")
    return R - 1


def poisson_pmf(x: int, mu: float) -> float:
    return float(poisson.pmf(x, float(mu)))


def simplicity_constant(R: int) -> float:
    """Limiting probability that a random configuration has a simple image."""
    if R < 2:
        raise ValueError("simplicity_constant needs R >= 2")
    return math.exp(-(R - 1) / 2 - (R - 1) ** 2 / 4)


def truncated_poisson(k: int, x: int, mu: float) -> float:
    """Poisson pmf below the cap ``k``; the whole upper tail ``P(X >= k)`` at ``x = k``."""
    if not 0 <= x <= k:
        raise ValueError("truncated_poisson needs 0 <= x <= k")
    mu = float(mu)
    if mu <= 0:
        raise ValueError("truncated_poisson needs mu > 0")
    if x < k:
        return float(poisson.pmf(x, mu))
    return float(poisson.sf(k - 1, mu))


def profile_factors(k: int, R: int) -> dict[str, float]:
    """Poisson mean attached to each profile coordinate name."""
    m = 5 ** (k + 1)
    means = {"q": float(degree_poisson_mean(R))}
    means.update({f"r{p}": float(lambda_p(R, p)) for p in range(3, m + 1)})
    means.update({f"s{p}": float(mu_p(R, p)) for p in range(1, m + 1)})
    return means


def coordinate_mean(name: str, R: int) -> float:
    if name == "q":
        return float(degree_poisson_mean(R))
    p = int(name[1:])
    return float(lambda_p(R, p) if name[0] == "r" else mu_p(R, p))


def profile_limit_probability(profile, R: int) -> float:
    """Limiting probability of the structure class indexed by ``profile``.

    Product of truncated Poisson masses over ``q``, ``r_3..r_m`` and ``s_1..s_m``,
    accumulated in log space.
    """
    if not profile.complete:
        raise ValueError("profile has unknown entries")
    k = profile.k
    log_p = 0.0
    for name, x in profile.coords().items():
        mass = truncated_poisson(k, x, coordinate_mean(name, R))
        if mass == 0.0:
            return 0.0
        log_p += math.log(mass)
    return math.exp(log_p)


def marginal_profile_probability(
    pred: Callable[[dict[str, int]], bool],
    coords: Iterable[str],
    k: int,
    R: int,
    budget: int = 1_000_000,
) -> float:
    """Limit probability of the profiles satisfying ``pred``.

    ``pred`` may only read the named ``coords``; every other coordinate sums
    to a factor of one and is marginalised out exactly.
    """
    from itertools import product

    from .census import parse_coordinate

    names = list(dict.fromkeys(coords))
    for name in names:
        parse_coordinate(name, k)
    size = (k + 1) ** len(names)
    if size > budget:
        raise ValueError(f"marginal lattice has {size} points, budget is {budget}")
    tables = [[truncated_poisson(k, x, coordinate_mean(name, R)) for x in range(k + 1)] for name in names]
    total = 0.0
    for values in product(range(k + 1), repeat=len(names)):
        if pred(dict(zip(names, values))):
            prob = 1.0
            for table, x in zip(tables, values):
                prob *= table[x]
            total += prob
    return total
