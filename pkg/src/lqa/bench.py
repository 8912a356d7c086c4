"""Trial-batch execution and statistics for benchmark protocols.

A bench spec names a set of instances (files or generator parameters),
a trial count, and solver settings; the harness runs every
(instance, trial) pair with an independently seeded init, optionally
in parallel, and reports per-trial results plus per-instance summary
statistics as CSV.
"""

from __future__ import annotations

import concurrent.futures
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from .generators import gen_random_pm1, gen_wishart
from .ising import IsingProblem, cut_value, graph_total_weight, load_instance
from .solver import SolverConfig, SolverError, TrialTrace, init_weights, solve

SPEC_VERSION = 1


@dataclass(frozen=True)
class InstanceSpec:
    """One problem source: either a file path or generator parameters."""

    id: str
    file: str | None = None
    generator: str | None = None
    n: int | None = None
    alpha: float | None = None
    gen_seed: int = 0
    step_size: float | None = None  # per-instance override
    maxcut: bool = False


@dataclass(frozen=True)
class BenchSpec:
    instances: tuple[InstanceSpec, ...]
    trials: int = 1
    seed: int = 0
    steps: int = 500
    gamma: float = 0.1
    step_size: float = 1.0
    momentum: float = 0.9
    optimizer: str = "adam"
    init_scale: float = 0.1
    trace_stride: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.instances:
            raise ValueError("spec names no instances")


@dataclass
class TrialReport:
    instance: str
    trial: int
    steps: int
    final_energy: float | None
    relative_error: float | None
    cut: float | None
    wall_ms: float
    failed: bool
    trace: TrialTrace | None = None


def load_bench_spec(path) -> BenchSpec:
    """Read a JSON bench spec; see README for the schema."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    version = data.get("version")
    if version != SPEC_VERSION:
        raise ValueError(f"unsupported spec version {version!r} (expect {SPEC_VERSION})")
    insts = []
    for entry in data.get("instances", []):
        insts.append(
            InstanceSpec(
                id=str(entry["id"]),
                file=entry.get("file"),
                generator=entry.get("generator"),
                n=entry.get("n"),
                alpha=entry.get("alpha"),
                gen_seed=entry.get("gen_seed", 0),
                step_size=entry.get("step_size"),
                maxcut=bool(entry.get("maxcut", False)),
            )
        )
    kwargs = {
        k: data[k]
        for k in (
            "trials",
            "seed",
            "steps",
            "gamma",
            "step_size",
            "momentum",
            "optimizer",
            "init_scale",
            "trace_stride",
            "workers",
        )
        if k in data
    }
    return BenchSpec(instances=tuple(insts), **kwargs)


def materialize(inst: InstanceSpec) -> IsingProblem:
    """Load or generate the problem for one instance spec."""
    if inst.file is not None:
        return load_instance(inst.file)
    if inst.generator == "pm1":
        return gen_random_pm1(inst.n, inst.gen_seed)
    if inst.generator == "wishart":
        return gen_wishart(inst.n, inst.alpha, inst.gen_seed).problem
    raise ValueError(f"instance {inst.id!r}: no file and unknown generator {inst.generator!r}")


def trial_seed(base_seed: int, instance_index: int, trial_index: int) -> np.random.SeedSequence:
    """Deterministic per-trial seed mix.

    Built from the ordered entropy tuple (base, instance, trial) so
    adding trials or instances never perturbs existing seeds.
    """
    return np.random.SeedSequence([base_seed, instance_index, trial_index])


def _solver_config(spec: BenchSpec, inst: InstanceSpec) -> SolverConfig:
    eta = inst.step_size if inst.step_size is not None else spec.step_size
    return SolverConfig(
        steps=spec.steps,
        gamma=spec.gamma,
        step_size=eta,
        momentum=spec.momentum,
        optimizer=spec.optimizer,
        init_scale=spec.init_scale,
        trace_stride=spec.trace_stride,
    )


def _run_trial(args) -> TrialReport:
    spec, inst_idx, inst, problem, trial = args
    cfg = _solver_config(spec, inst)
    w0 = init_weights(
        problem.n if not problem.has_bias else problem.n + 1,
        cfg.init_scale,
        trial_seed(spec.seed, inst_idx, trial),
    )
    start = time.perf_counter()
    try:
        result = solve(problem, cfg, w0)
    except SolverError:
        wall = (time.perf_counter() - start) * 1e3
        return TrialReport(inst.id, trial, spec.steps, None, None, None, wall, True)
    wall = (time.perf_counter() - start) * 1e3
    cut = None
    if inst.maxcut:
        cut = cut_value(problem, result.spins, graph_total_weight(problem))
    return TrialReport(
        instance=inst.id,
        trial=trial,
        steps=spec.steps,
        final_energy=result.energy,
        relative_error=result.relative_error,
        cut=cut,
        wall_ms=wall,
        failed=False,
        trace=result.trace,
    )


def run_batch(spec: BenchSpec, problems: dict[str, IsingProblem] | None = None) -> list[TrialReport]:
    """Run every (instance, trial) pair and return reports in
    deterministic (instance, trial) order regardless of worker count.

    All instances are materialized up front so a bad reference fails
    before any trial runs. Failed trials (non-finite values) are
    recorded with failed=True and the batch continues.
    """
    if problems is None:
        problems = {inst.id: materialize(inst) for inst in spec.instances}
    jobs = [
        (spec, inst_idx, inst, problems[inst.id], trial)
        for inst_idx, inst in enumerate(spec.instances)
        for trial in range(spec.trials)
    ]
    if spec.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.workers) as pool:
            reports = list(pool.map(_run_trial, jobs, chunksize=1))
    else:
        reports = [_run_trial(job) for job in jobs]
    return reports  # job list is already in (instance, trial) order


@dataclass
class InstanceSummary:
    instance: str
    trials: int
    failures: int
    metric: str  # relative_error | cut | final_energy
    mean: float
    std: float
    min: float
    max: float


def summarize(reports: list[TrialReport]) -> list[InstanceSummary]:
    """Per-instance mean / std / min / max of the reported metric.

    Relative error is summarized when the optimum is known, else the
    cut value for Max-Cut instances, else the final energy. Failed
    trials are excluded from the statistics but counted.
    """
    if not reports:
        raise ValueError("no reports to summarize")
    order: list[str] = []
    grouped: dict[str, list[TrialReport]] = {}
    for r in reports:
        if r.instance not in grouped:
            grouped[r.instance] = []
            order.append(r.instance)
        grouped[r.instance].append(r)
    out = []
    for inst_id in order:
        group = grouped[inst_id]
        ok = [r for r in group if not r.failed]
        if not ok:
            raise ValueError(f"instance {inst_id!r}: every trial failed")
        if ok[0].relative_error is not None:
            metric, values = "relative_error", [r.relative_error for r in ok]
        elif ok[0].cut is not None:
            metric, values = "cut", [r.cut for r in ok]
        else:
            metric, values = "final_energy", [r.final_energy for r in ok]
        arr = np.asarray(values, dtype=np.float64)
        out.append(
            InstanceSummary(
                instance=inst_id,
                trials=len(group),
                failures=len(group) - len(ok),
                metric=metric,
                mean=float(arr.mean()),
                std=float(arr.std()),
                min=float(arr.min()),
                max=float(arr.max()),
            )
        )
    return out


def aggregate_traces(traces: list[TrialTrace]) -> list[tuple[int, float, float, float]]:
    """Best-so-far energy envelope across trials.

    Each trial's energy sequence is turned into its running minimum,
    then rows (step, mean, min, max) are taken across trials. All
    traces must share the same step grid.
    """
    if not traces:
        return []
    steps = traces[0].steps
    for tr in traces:
        if tr.steps != steps:
            raise ValueError("traces have mismatched step grids")
    best = np.array([np.minimum.accumulate(tr.energies) for tr in traces])
    return [
        (step, float(col.mean()), float(col.min()), float(col.max()))
        for step, col in zip(steps, best.T)
    ]


def _atomic_write(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(v) -> str:
    return "" if v is None else repr(v)


def write_reports_csv(reports: list[TrialReport], path) -> None:
    """Per-trial CSV: instance,trial,steps,final_energy,relative_error,cut,wall_ms,failed."""
    lines = ["instance,trial,steps,final_energy,relative_error,cut,wall_ms,failed"]
    for r in reports:
        lines.append(
            f"{r.instance},{r.trial},{r.steps},{_fmt(r.final_energy)},"
            f"{_fmt(r.relative_error)},{_fmt(r.cut)},{r.wall_ms:.3f},{int(r.failed)}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_summary_csv(summaries: list[InstanceSummary], path) -> None:
    lines = ["instance,trials,failures,metric,mean,std,min,max"]
    for s in summaries:
        lines.append(
            f"{s.instance},{s.trials},{s.failures},{s.metric},"
            f"{s.mean!r},{s.std!r},{s.min!r},{s.max!r}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_trace_csv(rows: list[tuple[int, float, float, float]], path) -> None:
    lines = ["step,best_energy_mean,best_energy_min,best_energy_max"]
    for step, mean, lo, hi in rows:
        lines.append(f"{step},{mean!r},{lo!r},{hi!r}")
    _atomic_write(path, "\n".join(lines) + "\n")
