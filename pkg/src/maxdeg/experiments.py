"""Batch Monte Carlo experiments comparing samples with the limiting predictions.

Each experiment returns rows ``(n, stat, predicted, observed, detail)``;
``predicted`` is empty where there is no closed-form prediction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.stats import chisquare, poisson

from .automorphism import is_rigid
from .census import count_cycles, count_paths_endpoints_degree
from .connectivity import vertex_connectivity
from .counting import degree_poisson_mean, lambda_p, mu_p, simplicity_constant
from .graph import Graph, component_sizes
from .logic import limit_mc, parse, wilson_interval
from .sampler import SamplerError, SamplerSpec, batch_map, batch_sample

EXPERIMENTS = (
    "degree-dist",
    "poisson-census",
    "simplicity",
    "fo-limit",
    "connectivity-rigidity",
    "small-components",
)

CHI_SQUARE_TOP_BIN = 8


class ScheduleError(ValueError):
    """The requested n schedule cannot be sampled."""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    R: int
    n_schedule: tuple[int, ...]
    samples: int
    seed: int
    workers: int = 1
    mode: str | None = None
    cap_low: int | None = None
    cap_mid: int | None = None
    sentence: str | None = None
    max_cycle: int = 4
    small_size: int = 10

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}")
        if self.R < 2:
            raise ValueError("experiments need R >= 2")
        if not self.n_schedule or any(n < 1 for n in self.n_schedule):
            raise ValueError("n schedule must be non-empty and positive")
        if self.samples < 1 or self.workers < 1:
            raise ValueError("samples and workers must be positive")

    def spec(self, n: int) -> SamplerSpec:
        caps = {k: v for k, v in (("cap_low", self.cap_low), ("cap_mid", self.cap_mid)) if v is not None}
        try:
            if self.mode is None:
                return SamplerSpec.auto(n, self.R, **caps)
            return SamplerSpec(n, self.R, self.mode, **caps)
        except (SamplerError, ValueError) as exc:
            raise ScheduleError(f"cannot sample n={n}, R={self.R}: {exc}") from exc


Row = tuple[int, str, object, object, str]


# ------------------------------------------------------------------ per-graph statistics (picklable)


def degree_counts(G: Graph, R: int) -> tuple[int, int]:
    hist = G.degree_histogram()
    return int(hist[R - 2]), int(hist[R - 1])


def census_vector(G: Graph, R: int, max_cycle: int) -> tuple[int, ...]:
    q = int(G.degree_histogram()[R - 2])
    cycles = tuple(count_cycles(G, p) for p in range(3, max_cycle + 1))
    return (q, *cycles, count_paths_endpoints_degree(G, 1, R - 1))


def connectivity_and_rigidity(G: Graph) -> tuple[int, bool]:
    return vertex_connectivity(G), is_rigid(G)


def smallest_component(G: Graph) -> int:
    return component_sizes(G)[0]


# ------------------------------------------------------------------ helpers


def poisson_fit(values, mu: float, top: int = CHI_SQUARE_TOP_BIN) -> tuple[float, float]:
    """Chi-square p-value and total-variation distance against Poisson(mu).

    Bins are ``0..top-1`` plus an upper tail bin ``>= top``.
    """
    values = np.asarray(values)
    observed = np.array([np.count_nonzero(values == x) for x in range(top)] + [np.count_nonzero(values >= top)])
    probs = np.append(poisson.pmf(np.arange(top), mu), poisson.sf(top - 1, mu))
    expected = probs * len(values)
    p_value = float(chisquare(observed, expected).pvalue)
    tv = 0.5 * float(np.abs(observed / len(values) - probs).sum())
    return p_value, tv


def _correlations(columns: dict[str, np.ndarray]) -> list[tuple[str, float]]:
    names = list(columns)
    out = []
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            x, y = columns[a], columns[b]
            if x.std() == 0 or y.std() == 0:
                rho = float("nan")
            else:
                rho = float(np.corrcoef(x, y)[0, 1])
            out.append((f"corr_{a}_{b}", rho))
    return out


def _seed(cfg: ExperimentConfig, n: int) -> int:
    return cfg.seed + n


# ------------------------------------------------------------------ experiments


def degree_dist(cfg: ExperimentConfig) -> list[Row]:
    rows: list[Row] = []
    R = cfg.R
    mu = degree_poisson_mean(R)
    for n in cfg.n_schedule:
        vals = np.array(batch_map(cfg.spec(n), cfg.samples, _seed(cfg, n), partial(degree_counts, R=R), cfg.workers))
        low, mid = vals[:, 0], vals[:, 1]
        p_value, tv = poisson_fit(low, mu)
        rows += [
            (n, "mean_low_degree", mu, float(low.mean()), f"degree {R - 2} count"),
            (n, "p_no_low_degree", math.exp(-mu), float(np.mean(low == 0)), ""),
            (n, "chisq_p_low_degree", "", p_value, f"bins 0..{CHI_SQUARE_TOP_BIN - 1} and tail"),
            (n, "tv_low_degree", "", tv, ""),
            (n, "mean_mid_degree_over_sqrt_n", math.sqrt(R), float(mid.mean() / math.sqrt(n)), f"degree {R - 1} count"),
        ]
    return rows


def poisson_census(cfg: ExperimentConfig) -> list[Row]:
    rows: list[Row] = []
    R = cfg.R
    fn = partial(census_vector, R=R, max_cycle=cfg.max_cycle)
    for n in cfg.n_schedule:
        vals = np.array(batch_map(cfg.spec(n), cfg.samples, _seed(cfg, n), fn, cfg.workers), dtype=float)
        cols = {"q": vals[:, 0]}
        rows.append((n, "mean_q", degree_poisson_mean(R), float(vals[:, 0].mean()), ""))
        for j, p in enumerate(range(3, cfg.max_cycle + 1), start=1):
            cols[f"r{p}"] = vals[:, j]
            rows.append((n, f"mean_r{p}", float(lambda_p(R, p)), float(vals[:, j].mean()), f"{p}-cycles"))
        cols["s1"] = vals[:, -1]
        rows.append((n, "mean_s1", float(mu_p(R, 1)), float(vals[:, -1].mean()), f"edges between degree-{R - 1} vertices"))
        rows += [(n, name, 0.0, rho, "") for name, rho in _correlations(cols)]
    return rows


def simplicity(cfg: ExperimentConfig) -> list[Row]:
    rows: list[Row] = []
    for n in cfg.n_schedule:
        draws = batch_sample(cfg.spec(n), cfg.samples, _seed(cfg, n), cfg.workers)
        attempts = sum(trace.attempts for _, trace in draws)
        low, high = wilson_interval(cfg.samples, attempts)
        rows.append((n, "acceptance_rate", simplicity_constant(cfg.R), cfg.samples / attempts, f"attempts={attempts} ci=[{low:.4f},{high:.4f}]"))
    return rows


def fo_limit(cfg: ExperimentConfig) -> list[Row]:
    text = cfg.sentence or f"exists x. deg(x) = {cfg.R - 2}"
    est = limit_mc(parse(text), cfg.R, cfg.n_schedule, cfg.samples, cfg.seed, workers=cfg.workers,
                   spec_options=_spec_options(cfg))
    rows: list[Row] = []
    for e in est.per_n:
        rows.append((e.n, "frequency", "", e.frequency, f"ci=[{e.ci_low:.4f},{e.ci_high:.4f}]"))
    last = est.per_n[-1].n
    rows.append((last, "limit_estimate", "", est.estimate, f"trend={est.trend} settled={est.settled}"))
    return rows


def _spec_options(cfg: ExperimentConfig) -> dict:
    return {k: v for k, v in (("cap_low", cfg.cap_low), ("cap_mid", cfg.cap_mid)) if v is not None}


def connectivity_rigidity(cfg: ExperimentConfig) -> list[Row]:
    rows: list[Row] = []
    R = cfg.R
    for n in cfg.n_schedule:
        vals = batch_map(cfg.spec(n), cfg.samples, _seed(cfg, n), connectivity_and_rigidity, cfg.workers)
        kappa = np.array([k for k, _ in vals])
        rigid = np.array([r for _, r in vals])
        rows += [
            (n, "frac_connectivity_R-2_or_R-1", 1.0, float(np.isin(kappa, (R - 2, R - 1)).mean()), ""),
            (n, "frac_rigid", 1.0, float(rigid.mean()), ""),
            (n, "mean_connectivity", "", float(kappa.mean()), ""),
        ]
    return rows


def small_components(cfg: ExperimentConfig) -> list[Row]:
    rows: list[Row] = []
    for n in cfg.n_schedule:
        smallest = np.array(batch_map(cfg.spec(n), cfg.samples, _seed(cfg, n), smallest_component, cfg.workers))
        rows.append((n, f"frac_component_below_{cfg.small_size}", 0.0, float(np.mean(smallest < cfg.small_size)), ""))
    return rows


RUNNERS = {
    "degree-dist": degree_dist,
    "poisson-census": poisson_census,
    "simplicity": simplicity,
    "fo-limit": fo_limit,
    "connectivity-rigidity": connectivity_rigidity,
    "small-components": small_components,
}


def run_experiment(cfg: ExperimentConfig) -> list[Row]:
    for n in cfg.n_schedule:
        cfg.spec(n)
    return RUNNERS[cfg.name](cfg)
