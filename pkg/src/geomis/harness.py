"""Seeded experiment runner with CSV reporting.

An experiment is a JSON-describable config: an algorithm, an instance
source (file or generator), a trial count, and a base seed.  Per-trial
seeds come from a fixed 64-bit mix of (base_seed, trial_index), so runs
are reproducible to the byte across platforms and across any degree of
parallelism.  Trials are independent; the GEOMIS_THREADS environment
variable caps how many worker processes run them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Optional, Sequence, Union

from .adversaries import AdversaryConfig, generate_instance, star_adversary
from .algorithms import Classify, HRClassify, LatticeFilter, class_count
from .geometry import UsageError
from .instances import load_instance
from .lattice import LatticeParams
from .online import ArrivalSequence, FirstFit, RunResult, empirical_ratio, run_online
from .oracle import DEFAULT_NODE_LIMIT, OracleRefusal, exact_mis

_MASK64 = (1 << 64) - 1

CSV_COLUMNS = ("trial", "seed", "alg", "n", "alg_size", "opt_size", "ratio", "time_ms")

ALGORITHMS = ("firstfit", "filter", "classify", "hr_classify")


def derive_seed(base_seed: int, trial_index: int) -> int:
    """Deterministic 64-bit per-trial seed.

    SplitMix64: advance the stream by (trial_index + 1) golden-ratio
    steps from base_seed, then apply the finalizing mix.  Pure integer
    arithmetic, identical on every platform.  Distinct trial indices
    under one base seed always produce distinct values.
    """
    if trial_index < 0:
        raise UsageError(f"trial_index must be >= 0, got {trial_index}")
    x = (int(base_seed) + (trial_index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outcome; opt_size and ratio are absent when the
    oracle was skipped or refused."""

    trial: int
    seed: int
    algorithm: str
    n: int
    alg_size: int
    opt_size: Optional[int]
    ratio: Optional[float]
    wall_time_ms: float

    def __post_init__(self) -> None:
        if (self.opt_size is None) != (self.ratio is None):
            raise UsageError("opt_size and ratio must be absent together")
        if self.ratio is not None:
            if self.alg_size == 0:
                expected = 1.0 if self.opt_size == 0 else float("inf")
            else:
                expected = self.opt_size / self.alg_size
            if expected != self.ratio and not math.isclose(
                expected, self.ratio, rel_tol=1e-12
            ):
                raise UsageError(
                    f"ratio {self.ratio} inconsistent with opt {self.opt_size} / alg {self.alg_size}"
                )


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce an experiment, JSON-serializable.

    Exactly one of instance_path / generator supplies the instance.  A
    generator builds the instance once from its own seed; set
    instance_per_trial to rebuild per trial from the trial seed.  mode
    "enumerate" replaces sampled class draws with one trial per class
    (classify / hr_classify only), each class weighted equally.  timing
    controls whether measured wall time is written to the CSV; it is
    off by default so repeated runs produce byte-identical output.
    """

    algorithm: str
    trials: int
    base_seed: int
    instance_path: Optional[str] = None
    generator: Optional[AdversaryConfig] = None
    delta: float = 0.01
    m: float = 0.0
    mode: str = "sample"
    oracle: bool = True
    node_limit: int = DEFAULT_NODE_LIMIT
    instance_per_trial: bool = False
    timing: bool = False
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise UsageError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        if (self.instance_path is None) == (self.generator is None):
            raise UsageError("exactly one of instance_path or generator is required")
        if self.mode not in ("sample", "enumerate"):
            raise UsageError(f"mode must be 'sample' or 'enumerate', got {self.mode!r}")
        if self.mode == "enumerate" and self.algorithm not in ("classify", "hr_classify"):
            raise UsageError("enumerate mode applies to classify / hr_classify only")
        if self.mode == "sample" and self.trials < 1:
            raise UsageError(f"trials must be >= 1, got {self.trials}")
        if self.instance_per_trial and self.generator is None:
            raise UsageError("instance_per_trial requires a generator source")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad config JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config JSON must be an object")
        known = {
            "algorithm", "trials", "base_seed", "instance_path", "generator",
            "delta", "M", "mode", "oracle", "node_limit", "instance_per_trial",
            "timing", "out",
        }
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        gen = None
        if data.get("generator") is not None:
            gen_cfg = dict(data["generator"])
            if "M" in gen_cfg:
                gen_cfg["m"] = gen_cfg.pop("M")
            if "radius_range" in gen_cfg:
                gen_cfg["radius_range"] = tuple(gen_cfg["radius_range"])
            try:
                gen = AdversaryConfig(**gen_cfg)
            except TypeError as exc:
                raise UsageError(f"bad generator config: {exc}") from None
        kwargs = {k: v for k, v in data.items() if k not in ("generator", "M")}
        if "M" in data:
            kwargs["m"] = data["M"]
        try:
            return cls(generator=gen, **kwargs)
        except TypeError as exc:
            raise UsageError(f"bad config: {exc}") from None

    def to_json(self) -> str:
        data: dict = {
            "algorithm": self.algorithm,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "delta": self.delta,
            "M": self.m,
            "mode": self.mode,
            "oracle": self.oracle,
            "node_limit": self.node_limit,
            "instance_per_trial": self.instance_per_trial,
            "timing": self.timing,
        }
        if self.instance_path is not None:
            data["instance_path"] = self.instance_path
        if self.generator is not None:
            g = self.generator
            data["generator"] = {
                "kind": g.kind, "zeta": g.zeta, "n": g.n, "dim": g.dim,
                "M": g.m, "box_side": g.box_side, "seed": g.seed,
                "radius_range": list(g.radius_range),
            }
        if self.out is not None:
            data["out"] = self.out
        return json.dumps(data, indent=2, sort_keys=True)


@dataclass(frozen=True)
class ExperimentSummary:
    trials: int
    mean_alg_size: float
    stderr_alg_size: float
    ci3_low: float
    ci3_high: float
    mean_ratio: Optional[float]
    oracle_refusals: int


def summarize(records: Sequence[TrialRecord]) -> ExperimentSummary:
    """Mean accepted size with a 3-sigma interval, plus the mean ratio
    over trials where the oracle answered."""
    if not records:
        raise UsageError("cannot summarize zero trials")
    sizes = [r.alg_size for r in records]
    n = len(sizes)
    mean = sum(sizes) / n
    if n > 1:
        var = sum((s - mean) ** 2 for s in sizes) / (n - 1)
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    ratios = [r.ratio for r in records if r.ratio is not None]
    mean_ratio = sum(ratios) / len(ratios) if ratios else None
    refusals = sum(1 for r in records if r.opt_size is None)
    return ExperimentSummary(
        trials=n,
        mean_alg_size=mean,
        stderr_alg_size=stderr,
        ci3_low=mean - 3.0 * stderr,
        ci3_high=mean + 3.0 * stderr,
        mean_ratio=mean_ratio,
        oracle_refusals=refusals,
    )


def _worker_count(trials: int) -> int:
    env = os.environ.get("GEOMIS_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError(f"GEOMIS_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise UsageError(f"GEOMIS_THREADS must be >= 1, got {cap}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, trials))


def _build_algorithm(
    config: ExperimentConfig,
    stream: ArrivalSequence,
    seed: int,
    forced: Optional[tuple[int, ...]],
):
    if config.algorithm == "firstfit":
        return FirstFit()
    if config.algorithm == "filter":
        if stream.dim is None:
            raise UsageError("filter needs a geometric instance")
        return LatticeFilter(LatticeParams(dim=stream.dim, delta=config.delta), seed=seed)
    if config.algorithm == "classify":
        if forced is not None:
            return Classify(config.m, forced_class=forced[0])
        return Classify(config.m, seed=seed)
    if stream.dim is None:
        raise UsageError("hr_classify needs a geometric instance")
    if forced is not None:
        return HRClassify(config.m, stream.dim, forced_classes=forced)
    return HRClassify(config.m, stream.dim, seed=seed)


def _oracle_fields(
    config: ExperimentConfig, stream: ArrivalSequence, run: RunResult
) -> tuple[Optional[int], Optional[float]]:
    if not config.oracle:
        return None, None
    try:
        opt = exact_mis(stream.adjacency(), config.node_limit).size
    except OracleRefusal:
        return None, None
    return opt, empirical_ratio(opt, run)


def _run_trial(args: tuple) -> TrialRecord:
    config, stream, trial_index, forced = args
    seed = derive_seed(config.base_seed, trial_index)
    start = time.perf_counter()
    if config.generator is not None and config.generator.kind == "star":
        algorithm = _build_algorithm(config, ArrivalSequence(events=()), seed, forced)
        outcome = star_adversary(config.generator.zeta, algorithm)
        stream, run = outcome.stream, outcome.result
    else:
        if stream is None:
            gen = replace(config.generator, seed=seed)
            stream = generate_instance(gen)
        algorithm = _build_algorithm(config, stream, seed, forced)
        run = run_online(algorithm, stream)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    opt, ratio = _oracle_fields(config, stream, run)
    return TrialRecord(
        trial=trial_index,
        seed=seed,
        algorithm=config.algorithm,
        n=len(stream),
        alg_size=run.size,
        opt_size=opt,
        ratio=ratio,
        wall_time_ms=elapsed_ms,
    )


def _enumerated_classes(config: ExperimentConfig, stream: ArrivalSequence) -> list[tuple[int, ...]]:
    k = class_count(config.m)
    if config.algorithm == "classify":
        return [(j,) for j in range(k)]
    if stream.dim is None:
        raise UsageError("hr_classify needs a geometric instance")
    return [tuple(c) for c in product(range(k), repeat=stream.dim)]


def run_experiment(
    config: ExperimentConfig,
) -> tuple[list[TrialRecord], ExperimentSummary]:
    """Run all trials (in parallel when allowed) and summarize.

    Results are assembled in trial order, so the output never depends
    on scheduling.
    """
    stream: Optional[ArrivalSequence] = None
    adaptive = config.generator is not None and config.generator.kind == "star"
    if config.instance_path is not None:
        stream = load_instance(config.instance_path)
    elif not adaptive and not config.instance_per_trial:
        stream = generate_instance(config.generator)

    if config.mode == "enumerate":
        if stream is None:
            raise UsageError("enumerate mode needs a fixed instance")
        jobs = [
            (config, stream, i, forced)
            for i, forced in enumerate(_enumerated_classes(config, stream))
        ]
    else:
        jobs = [(config, stream, i, None) for i in range(config.trials)]

    workers = _worker_count(len(jobs))
    if workers > 1 and len(jobs) > 1:
        chunk = max(1, len(jobs) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial, jobs, chunksize=chunk))
    else:
        records = [_run_trial(job) for job in jobs]
    summary = summarize(records)
    if config.out is not None:
        write_csv(records, config.out, timing=config.timing)
    return records, summary


def _format_ratio(ratio: Optional[float]) -> str:
    if ratio is None:
        return ""
    if math.isinf(ratio):
        return "inf"
    return repr(ratio)


def render_csv(records: Sequence[TrialRecord], timing: bool = False) -> str:
    """Fixed-column CSV text; timing=False blanks time_ms so identical
    configs render byte-identical output."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.trial,
                r.seed,
                r.algorithm,
                r.n,
                r.alg_size,
                "" if r.opt_size is None else r.opt_size,
                _format_ratio(r.ratio),
                f"{r.wall_time_ms:.3f}" if timing else "",
            ]
        )
    return buf.getvalue()


def write_csv(
    records: Sequence[TrialRecord], path: Union[str, Path], timing: bool = False
) -> None:
    Path(path).write_text(render_csv(records, timing=timing))
