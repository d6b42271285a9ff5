"""Command-line workbench.

Subcommands: gen (write instances), run (one online run), oracle
(exact offline answers), lattice (self-checks of the lattice layer),
experiment (seeded trial batches with CSV reports).

Exit status: 0 on success, 1 on usage errors (bad flags, malformed
files, unsupported combinations), 2 when a requested validation or
check fails (including oracle refusals).
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .adversaries import (
    level_graph_gen,
    random_balls_gen,
    random_rects_gen,
    star_adversary,
)
from .algorithms import Classify, HRClassify, LatticeFilter
from .geometry import Point, UsageError, distance
from .harness import ExperimentConfig, render_csv, run_experiment
from .instances import load_instance, save_instance, save_transcript
from .lattice import (
    LatticeParams,
    SampleBox,
    closest_lattice_point,
    is_covered,
    lattice_point,
    min_pairwise_distance,
    mc_volume_fraction,
    unit_ball_volume,
)
from .online import FirstFit, run_online
from .oracle import OracleRefusal, exact_mis, independent_kissing_number, verify_ratio


class _CliUsage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _CliUsage(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="geomis",
        description="Online maximum-independent-set workbench for geometric intersection graphs.",
        epilog="exit status: 0 success, 1 usage error, 2 failed validation/check",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--kind", required=True,
                     choices=["star", "levels", "random_balls", "random_rects"])
    gen.add_argument("--zeta", type=int, default=3)
    gen.add_argument("--n", type=int, default=20)
    gen.add_argument("--dim", type=int, default=3)
    gen.add_argument("--M", dest="m", type=float, default=8.0)
    gen.add_argument("--box-side", type=float, default=10.0)
    gen.add_argument("--radius-range", type=float, nargs=2, default=[1.0, 1.0],
                     metavar=("LO", "HI"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    run = sub.add_parser("run", help="run one online algorithm over an instance file")
    run.add_argument("--alg", required=True,
                     choices=["firstfit", "filter", "classify", "hr_classify"])
    run.add_argument("--in", dest="infile", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--delta", type=float, default=0.01)
    run.add_argument("--M", dest="m", type=float, default=8.0)
    run.set_defaults(func=_cmd_run)

    oracle = sub.add_parser("oracle", help="exact offline answers for an instance file")
    oracle.add_argument("--what", required=True, choices=["mis", "ikn", "ratio"])
    oracle.add_argument("--in", dest="infile", required=True)
    oracle.add_argument("--alg", default="firstfit",
                        choices=["firstfit", "filter", "classify", "hr_classify"])
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--delta", type=float, default=0.01)
    oracle.add_argument("--M", dest="m", type=float, default=8.0)
    oracle.add_argument("--node-limit", type=int, default=40)
    oracle.set_defaults(func=_cmd_oracle)

    lattice = sub.add_parser("lattice", help="self-checks of the lattice layer")
    lattice.add_argument("--check", required=True,
                         choices=["mindist", "closest", "volume"])
    lattice.add_argument("--dim", type=int, default=3)
    lattice.add_argument("--delta", type=float, default=0.01)
    lattice.add_argument("--window", type=int, default=3)
    lattice.add_argument("--samples", type=int, default=10000)
    lattice.add_argument("--seed", type=int, default=0)
    lattice.set_defaults(func=_cmd_lattice)

    exp = sub.add_parser(
        "experiment",
        help="run a seeded trial batch from a JSON config (GEOMIS_THREADS caps workers)",
    )
    exp.add_argument("--config", required=True)
    exp.add_argument("--out", default=None, help="override the config's CSV path")
    exp.add_argument("--trials", type=int, default=None, help="override the trial count")
    exp.add_argument("--timing", action="store_true",
                     help="write measured wall time into the CSV (breaks reproducibility)")
    exp.set_defaults(func=_cmd_experiment)

    return parser


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "star":
        outcome = star_adversary(args.zeta, FirstFit())
        save_transcript(outcome.stream, outcome.result, args.out)
        print(
            f"star zeta={args.zeta} vs firstfit: accepted {outcome.result.size} "
            f"of {len(outcome.stream)}, opt {outcome.opt_size}"
        )
        print(f"wrote {args.out}")
        return 0
    if args.kind == "levels":
        stream = level_graph_gen(args.zeta, seed=args.seed)
    elif args.kind == "random_balls":
        stream = random_balls_gen(
            args.n, args.dim, args.box_side, seed=args.seed,
            radius_range=tuple(args.radius_range),
        )
    else:
        stream = random_rects_gen(
            args.n, args.dim, args.m, args.box_side, seed=args.seed
        )
    save_instance(stream, args.out)
    print(f"wrote {args.out} ({len(stream)} arrivals)")
    return 0


def _make_algorithm(name: str, stream, args: argparse.Namespace):
    if name == "firstfit":
        return FirstFit()
    if name == "filter":
        if stream.dim is None:
            raise UsageError("filter needs a geometric instance")
        return LatticeFilter(LatticeParams(dim=stream.dim, delta=args.delta), seed=args.seed)
    if name == "classify":
        return Classify(args.m, seed=args.seed)
    if stream.dim is None:
        raise UsageError("hr_classify needs a geometric instance")
    return HRClassify(args.m, stream.dim, seed=args.seed)


def _cmd_run(args: argparse.Namespace) -> int:
    stream = load_instance(args.infile)
    algorithm = _make_algorithm(args.alg, stream, args)
    result = run_online(algorithm, stream)
    ids = " ".join(str(i) for i in result.accepted)
    print(f"algorithm {args.alg}")
    print(f"arrivals {len(stream)}")
    print(f"accepted {result.size}" + (f": {ids}" if ids else ""))
    print(f"valid_independent {str(result.valid_independent).lower()}")
    print(f"valid_irrevocable {str(result.valid_irrevocable).lower()}")
    return 0 if (result.valid_independent and result.valid_irrevocable) else 2


def _cmd_oracle(args: argparse.Namespace) -> int:
    stream = load_instance(args.infile)
    graph = stream.adjacency()
    if args.what == "mis":
        print(exact_mis(graph, args.node_limit).size)
        return 0
    if args.what == "ikn":
        print(independent_kissing_number(graph, args.node_limit).zeta)
        return 0
    algorithm = _make_algorithm(args.alg, stream, args)
    result = run_online(algorithm, stream)
    report = verify_ratio(stream, result, args.node_limit)
    print(f"opt {report.opt_size}")
    print(f"alg {report.alg_size}")
    print(f"ratio {report.ratio}")
    print(f"zeta {report.zeta}")
    print(f"bound_satisfied {str(report.bound_satisfied).lower()}")
    return 0 if report.bound_satisfied else 2


def _window_reference(params: LatticeParams, c: Point, window: int) -> float:
    """Exhaustive nearest-lattice-point distance over a coefficient window."""
    from itertools import product

    best = math.inf
    for coeffs in product(range(-window, window + 1), repeat=params.dim):
        best = min(best, distance(lattice_point(params, coeffs), c))
    return best


def _cmd_lattice(args: argparse.Namespace) -> int:
    params = LatticeParams(dim=args.dim, delta=args.delta)
    if args.check == "mindist":
        value = min_pairwise_distance(params, window=args.window)
        print(f"min_pairwise_distance {value!r}")
        print(f"required > 4: {'pass' if value > 4.0 else 'FAIL'}")
        return 0 if value > 4.0 else 2
    if args.check == "closest":
        rng = random.Random(args.seed)
        extents = (params.axis1_period,) + (params.cross_period,) * (params.dim - 1)
        worst = 0.0
        cover_mismatches = 0
        for _ in range(args.samples):
            c = Point(tuple(rng.uniform(0.0, e) for e in extents))
            p, _ = closest_lattice_point(params, c)
            ref = _window_reference(params, c, args.window)
            worst = max(worst, abs(distance(p, c) - ref))
            if is_covered(params, c) != (ref <= 1.0):
                cover_mismatches += 1
        ok = worst <= 1e-9 and cover_mismatches == 0
        print(f"queries {args.samples}")
        print(f"max_distance_deviation {worst!r}")
        print(f"coverage_mismatches {cover_mismatches}")
        print("pass" if ok else "FAIL")
        return 0 if ok else 2
    rng = random.Random(args.seed)
    origin = Point(tuple(rng.uniform(-10.0, 10.0) for _ in range(params.dim)))
    box = SampleBox.aligned(params, origin)
    fraction, stderr = mc_volume_fraction(params, box, args.samples, seed=args.seed)
    expected = unit_ball_volume(params.dim) / box.volume
    ok = abs(fraction - expected) <= 3.0 * stderr
    print(f"box_origin {tuple(origin.coords)}")
    print(f"covered_fraction {fraction!r} (stderr {stderr:.3e})")
    print(f"expected_fraction {expected!r}")
    print(f"volume_estimate {fraction * box.volume!r}")
    print(f"expected_volume {unit_ball_volume(params.dim)!r}")
    print("pass" if ok else "FAIL")
    return 0 if ok else 2


def _cmd_experiment(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json(Path(args.config).read_text())
    if args.out is not None:
        config = replace(config, out=args.out)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.timing:
        config = replace(config, timing=True)
    records, summary = run_experiment(config)
    csv_to_stdout = config.out is None
    report = sys.stderr if csv_to_stdout else sys.stdout
    if csv_to_stdout:
        sys.stdout.write(render_csv(records, timing=config.timing))
    else:
        print(f"wrote {config.out}", file=report)
    print(f"trials {summary.trials}", file=report)
    print(f"mean_alg_size {summary.mean_alg_size!r}", file=report)
    print(f"stderr_alg_size {summary.stderr_alg_size!r}", file=report)
    print(f"ci3 [{summary.ci3_low!r}, {summary.ci3_high!r}]", file=report)
    print(f"mean_ratio {summary.mean_ratio}", file=report)
    print(f"oracle_refusals {summary.oracle_refusals}", file=report)
    return 0


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliUsage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OracleRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
