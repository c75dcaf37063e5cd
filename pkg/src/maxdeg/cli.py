"""Command-line front end: ``maxdeg <command> ...``.

Exit codes: 0 ok, 2 usage, 3 sampler, 4 schedule, 5 parse, 6 oracle mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .counting import (
    DegreeClass,
    degree_class_weight,
    lambda_p,
    matchings,
    mu_p,
    simplicity_constant,
    truncated_poisson,
)
from .graph import GraphError, format_graph, read_graph

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SAMPLER = 3
EXIT_SCHEDULE = 4
EXIT_PARSE = 5
EXIT_ORACLE = 6


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _trailer(seed) -> str:
    return f"# seed={seed if seed is not None else 'none'} version={__version__}\n"


def _csv(header, rows, seed) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue() + _trailer(seed)


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fmt_number(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(x) if isinstance(x, float) else str(x)


# ------------------------------------------------------------------ count


def cmd_count(args) -> int:
    out = []
    if args.matchings is not None:
        out.append(matchings(args.matchings))
    if args.degree_class is not None:
        d = args.degree_class
        if args.R is not None and len(d) != args.R + 1:
            raise UsageError(f"--class needs R+1 = {args.R + 1} entries, got {len(d)}")
        w = degree_class_weight(DegreeClass(tuple(d)), exact=True)
        out.append(w.value)
    if args.lam or args.mu or args.simplicity:
        if args.R is None:
            raise UsageError("--lambda, --mu and --simplicity need --R")
    if args.lam or args.mu:
        if args.p is None:
            raise UsageError("--lambda and --mu need --p")
        if args.lam:
            out.append(lambda_p(args.R, args.p))
        if args.mu:
            out.append(mu_p(args.R, args.p))
    if args.simplicity:
        out.append(simplicity_constant(args.R))
    if args.pk is not None:
        k, x = args.pk
        if args.mean is None:
            raise UsageError("--pk needs --mean")
        out.append(truncated_poisson(k, x, args.mean))
    if not out:
        raise UsageError("nothing to count; see --help")
    for value in out:
        print(_fmt_number(value))
    return EXIT_OK


# ------------------------------------------------------------------ sample


def _sampler_spec(args, n: int, R: int):
    from .sampler import SamplerSpec

    caps = {}
    if args.cap_low is not None:
        caps["cap_low"] = args.cap_low
    if args.cap_mid is not None:
        caps["cap_mid"] = args.cap_mid
    if args.max_restarts is not None:
        caps["max_restarts"] = args.max_restarts
    if args.mode == "auto":
        return SamplerSpec.auto(n, R, **caps)
    return SamplerSpec(n, R, args.mode, **caps)


def cmd_sample(args) -> int:
    from .sampler import batch_sample

    try:
        spec = _sampler_spec(args, args.n, args.R)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    draws = batch_sample(spec, args.count, args.seed, workers=args.workers)
    _emit("\n".join(format_graph(G) for G, _ in draws), args.out)
    if args.trace:
        rows = [row for _, trace in draws for row in trace.rows()]
        Path(args.trace).write_text(_csv(["class", "restarts", "accepted"], rows, args.seed))
    return EXIT_OK


# ------------------------------------------------------------------ census


def cmd_census(args) -> int:
    from .census import census

    G = read_graph(args.graph)
    _, report = census(G, args.k, args.max_length, connectivity=args.connectivity, rigidity=args.rigidity)
    _emit(report.to_csv() + _trailer(None), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ experiment


def cmd_experiment(args) -> int:
    from .experiments import ExperimentConfig, run_experiment

    try:
        cfg = ExperimentConfig(
            name=args.name,
            R=args.R,
            n_schedule=tuple(args.n),
            samples=args.samples,
            seed=args.seed,
            workers=args.workers,
            mode=None if args.mode == "auto" else args.mode,
            cap_low=args.cap_low,
            cap_mid=args.cap_mid,
            sentence=args.sentence,
            max_cycle=args.max_cycle,
            small_size=args.small_size,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = run_experiment(cfg)
    _emit(_csv(["n", "stat", "predicted", "observed", "detail"], rows, args.seed), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ fo


def cmd_fo_eval(args) -> int:
    from .logic import evaluate, parse

    phi = parse(args.sentence)
    G = read_graph(args.graph)
    print("true" if evaluate(G, phi) else "false")
    return EXIT_OK


def cmd_fo_limit(args) -> int:
    from .logic import limit_mc, parse

    phi = parse(args.sentence)
    est = limit_mc(phi, args.R, args.n, args.samples, args.seed, workers=args.workers)
    rows = [(n, s, k, f"{freq:.6f}", f"{lo:.6f}", f"{hi:.6f}") for n, s, k, freq, lo, hi in est.rows()]
    _emit(_csv(["n", "samples", "successes", "frequency", "ci_low", "ci_high"], rows, args.seed), args.out)
    print(
        f"estimate {est.estimate:.6f} ci [{est.ci_low:.6f}, {est.ci_high:.6f}] trend {est.trend}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_fo_ef(args) -> int:
    from .logic import ef_game

    print(ef_game(read_graph(args.g), read_graph(args.h), args.k))
    return EXIT_OK


def cmd_fo_rank(args) -> int:
    from .logic import parse, qrank

    print(qrank(parse(args.sentence)))
    return EXIT_OK


# ------------------------------------------------------------------ oracle


def cmd_oracle_compare(args) -> int:
    from .oracle import compare_sampler

    res = compare_sampler(args.n, args.R, args.samples, args.seed, workers=args.workers)
    ok = res.passed(args.alpha, args.max_tv)
    rows = [
        ("graphs", res.graphs),
        ("samples", res.samples),
        ("chisq_p", f"{res.p_value:.6g}"),
        ("tv", f"{res.tv:.6g}"),
        ("unknown", res.unknown),
        ("pass", int(ok)),
    ]
    _emit(_csv(["stat", "value"], rows, args.seed), args.out)
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_oracle_counts(args) -> int:
    from .oracle import count_graphs_bruteforce, count_unlabelled, enumerate_graphs

    table = enumerate_graphs(args.n, args.R, cap=args.cap)
    labelled = len(table)
    recount = count_graphs_bruteforce(args.n, args.R)
    unlabelled = count_unlabelled(args.n, args.R, table) if args.n <= 7 else ""
    _emit(_csv(["n", "R", "labelled", "unlabelled"], [(args.n, args.R, labelled, unlabelled)], None), args.out)
    if args.dump:
        Path(args.dump).write_text(table.dump())
    return EXIT_OK if recount == labelled else EXIT_ORACLE


def cmd_oracle_configs(args) -> int:
    from .oracle import enumerate_configurations

    table = enumerate_configurations(args.cells)
    expected_total = matchings(sum(args.cells))
    per_graph = math.prod(math.factorial(c) for c in args.cells)
    bad = [M for M, c in table.simple_images.items() if c != per_graph]
    rows = [(table.total, table.simple_total, len(table.by_image), len(table.simple_images))]
    _emit(_csv(["total", "simple", "images", "simple_images"], rows, None), args.out)
    return EXIT_OK if table.total == expected_total and not bad else EXIT_ORACLE


def _statistic(name: str):
    from .census import count_cycles

    kind, _, value = name.partition("=")
    try:
        x = int(value)
    except ValueError:
        raise UsageError(f"statistic must look like degree=<d> or cycles=<p>, got {name!r}") from None
    if kind == "degree":
        return lambda G: int((G.degrees[1:] == x).sum())
    if kind == "cycles":
        return lambda G: count_cycles(G, x)
    raise UsageError(f"unknown statistic {kind!r}")


def cmd_oracle_pmf(args) -> int:
    from .oracle import exact_statistic_distribution, format_pmf_csv

    pmf = exact_statistic_distribution(args.n, args.R, _statistic(args.statistic), cap=args.cap)
    _emit(format_pmf_csv(pmf) + _trailer(None), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_sampler_flags(p):
    p.add_argument("--mode", choices=("auto", "exact", "truncated"), default="auto")
    p.add_argument("--cap-low", type=int)
    p.add_argument("--cap-mid", type=int)
    p.add_argument("--max-restarts", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxdeg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact counting quantities")
    p.add_argument("--matchings", type=int, metavar="2M", help="perfect matchings on 2M points")
    p.add_argument("--class", dest="degree_class", type=_int_list, metavar="D0,..,DR", help="degree class weight")
    p.add_argument("--lambda", dest="lam", action="store_true", help="limiting mean of p-cycles")
    p.add_argument("--mu", action="store_true", help="limiting mean of p-paths between degree R-1 vertices")
    p.add_argument("--simplicity", action="store_true", help="limiting simplicity probability")
    p.add_argument("--pk", type=int, nargs=2, metavar=("K", "X"), help="truncated Poisson mass")
    p.add_argument("--mean", type=float, help="Poisson mean for --pk")
    p.add_argument("--R", type=int)
    p.add_argument("--p", type=int)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="uniform random graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--trace", help="write the attempt trace CSV here")
    _add_sampler_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("census", help="structural census of one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--max-length", type=int)
    p.add_argument("--connectivity", action="store_true")
    p.add_argument("--rigidity", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    from .experiments import EXPERIMENTS

    p = sub.add_parser("experiment", help="Monte Carlo experiment suites")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated n schedule")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sentence")
    p.add_argument("--max-cycle", type=int, default=4)
    p.add_argument("--small-size", type=int, default=10)
    p.add_argument("--out")
    _add_sampler_flags(p)
    p.set_defaults(func=cmd_experiment)

    fo = sub.add_parser("fo", help="first-order logic").add_subparsers(dest="fo_command", required=True)
    p = fo.add_parser("eval")
    p.add_argument("--graph", required=True)
    p.add_argument("--sentence", required=True)
    p.set_defaults(func=cmd_fo_eval)
    p = fo.add_parser("limit")
    p.add_argument("--sentence", required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--n", type=_int_list, default=[500, 1000, 2000])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fo_limit)
    p = fo.add_parser("ef")
    p.add_argument("--g", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_fo_ef)
    p = fo.add_parser("rank")
    p.add_argument("--sentence", required=True)
    p.set_defaults(func=cmd_fo_rank)

    oracle = sub.add_parser("oracle", help="brute-force ground truth").add_subparsers(dest="oracle_command", required=True)
    p = oracle.add_parser("compare-sampler")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--max-tv", type=float, default=0.02)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_compare)
    p = oracle.add_parser("counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--cap", type=int, default=7)
    p.add_argument("--dump", help="write every graph here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_counts)
    p = oracle.add_parser("configs")
    p.add_argument("--cells", type=_int_list, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_configs)
    p = oracle.add_parser("pmf")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--statistic", required=True, help="degree=<d> or cycles=<p>")
    p.add_argument("--cap", type=int, default=7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_pmf)
    return parser


def main(argv: list[str] | None = None) -> int:
    from .experiments import ScheduleError
    from .logic import ParseError
    from .oracle import OracleCapError
    from .sampler import SamplerError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScheduleError as exc:
        print(f"infeasible schedule: {exc}", file=sys.stderr)
        return EXIT_SCHEDULE
    except SamplerError as exc:
        print(f"sampler error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except (UsageError, OracleCapError, GraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
