"""Limiting probabilities of graph properties under the uniform ensemble."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from scipy.stats import binomtest

from ..counting import marginal_profile_probability
from ..sampler import SamplerSpec, batch_map
from .evaluate import DEFAULT_EVAL_BUDGET, Sentence
from .formula import Formula


@dataclass(frozen=True)
class NEstimate:
    n: int
    samples: int
    successes: int
    ci_low: float
    ci_high: float

    @property
    def frequency(self) -> float:
        return self.successes / self.samples


@dataclass(frozen=True)
class LimitEstimate:
    """Monte Carlo limit estimate: the frequency at the largest ``n`` with its Wilson interval."""

    estimate: float
    ci_low: float
    ci_high: float
    confidence: float
    per_n: tuple[NEstimate, ...]

    @property
    def samples(self) -> int:
        return sum(e.samples for e in self.per_n)

    @property
    def trend(self) -> str:
        """Direction of the per-n frequencies: increasing, decreasing, constant or mixed."""
        freqs = [e.frequency for e in self.per_n]
        steps = [b - a for a, b in zip(freqs, freqs[1:])]
        if not steps or all(s == 0 for s in steps):
            return "constant"
        if all(s >= 0 for s in steps):
            return "increasing"
        if all(s <= 0 for s in steps):
            return "decreasing"
        return "mixed"

    @property
    def settled(self) -> bool:
        """Whether the last two per-n intervals overlap."""
        if len(self.per_n) < 2:
            return True
        a, b = self.per_n[-2], self.per_n[-1]
        return a.ci_low <= b.ci_high and b.ci_low <= a.ci_high

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def rows(self) -> list[tuple]:
        return [(e.n, e.samples, e.successes, e.frequency, e.ci_low, e.ci_high) for e in self.per_n]


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return max(0.0, float(ci.low)), min(1.0, float(ci.high))


def limit_mc(
    phi: Formula,
    R: int,
    n_schedule: Sequence[int],
    samples_per_n: int,
    seed: int,
    *,
    confidence: float = 0.95,
    workers: int = 1,
    spec_options: Mapping | None = None,
    eval_budget: int = DEFAULT_EVAL_BUDGET,
) -> LimitEstimate:
    """Satisfaction frequency of ``phi`` along ``n_schedule``.

    Draw ``i`` at size ``n`` uses the stream ``(seed + n, i)``, so adding a
    size to the schedule never changes the draws at the others.
    """
    if not n_schedule:
        raise ValueError("empty n schedule")
    if samples_per_n < 1:
        raise ValueError("samples_per_n must be positive")
    check = Sentence(phi, eval_budget)
    per_n = []
    for n in sorted(set(int(x) for x in n_schedule)):
        spec = SamplerSpec.auto(n, R, **dict(spec_options or {}))
        hits = sum(batch_map(spec, samples_per_n, seed + n, check, workers=workers))
        low, high = wilson_interval(hits, samples_per_n, confidence)
        per_n.append(NEstimate(n, samples_per_n, hits, low, high))
    last = per_n[-1]
    return LimitEstimate(last.frequency, last.ci_low, last.ci_high, confidence, tuple(per_n))


def limit_profile_property(
    pred: Callable[[dict[str, int]], bool],
    k: int,
    R: int,
    coords: Iterable[str],
    budget: int = 1_000_000,
) -> float:
    """Limit probability of a property of the capped census profile.

    ``pred`` receives the values of ``coords`` (names such as ``"q"``,
    ``"r3"``, ``"s1"``) each capped at ``k``; coordinates it does not read are
    summed out exactly.
    """
    return marginal_profile_probability(pred, coords, k, R, budget)
