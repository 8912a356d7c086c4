"""Command-line entry point: solve, generate, bench, oracle.

Exit codes: 0 success, 1 usage or input parse error, 2 runtime
failure. All randomness flows from --seed; when omitted a seed is
drawn and printed so the run stays reproducible after the fact.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys

import numpy as np

from . import bench as bench_mod
from .generators import gen_random_pm1, gen_wishart
from .ising import ProblemFormatError, load_instance, save_instance
from .oracle import MAX_BRUTE_FORCE_SPINS, brute_force_ground, estimate_brute_force_seconds
from .solver import OPTIMIZERS, SolverConfig, SolverError, init_weights, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lqa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance file", parents=[])
    p_solve.add_argument("instance", help="path to a text-format instance file")
    p_solve.add_argument("--steps", type=int, default=1000, help="anneal steps N (default 1000)")
    p_solve.add_argument("--gamma", type=float, default=0.1, help="coupling-term strength (default 0.1)")
    p_solve.add_argument("--eta", type=float, default=1.0, help="step size (default 1)")
    p_solve.add_argument(
        "--optimizer", choices=OPTIMIZERS, default="adam", help="update rule (default adam)"
    )
    p_solve.add_argument(
        "--momentum", type=float, default=0.99, help="momentum coefficient (default 0.99)"
    )
    p_solve.add_argument(
        "--init-scale", type=float, default=0.1, help="initial weight scale (default 0.1)"
    )
    p_solve.add_argument("--seed", type=int, default=None, help="RNG seed (random if omitted)")
    p_solve.add_argument("--trace", metavar="PATH", help="write per-step trace CSV here")
    p_solve.add_argument(
        "--trace-stride", type=int, default=1, help="record every k-th step (default 1)"
    )
    p_solve.add_argument("--output", metavar="PATH", help="also write the result lines to a file")

    p_gen = sub.add_parser("generate", help="generate an instance file")
    p_gen.add_argument("family", choices=("pm1", "wishart"), help="instance family")
    p_gen.add_argument("--n", type=int, required=True, help="number of spins")
    p_gen.add_argument("--alpha", type=float, default=1.0, help="Wishart aspect ratio m/n")
    p_gen.add_argument("--seed", type=int, default=None, help="RNG seed (random if omitted)")
    p_gen.add_argument("--out", required=True, help="output instance path")

    p_bench = sub.add_parser("bench", help="run a benchmark spec")
    p_bench.add_argument("spec", help="path to a JSON bench spec")
    p_bench.add_argument(
        "--output-prefix", default="bench", help="prefix for the emitted CSVs (default 'bench')"
    )
    p_bench.add_argument(
        "--workers", type=int, default=None, help="trial parallelism (overrides spec and env)"
    )

    p_oracle = sub.add_parser("oracle", help="brute-force ground state of a small instance")
    p_oracle.add_argument("instance", help="path to a text-format instance file")
    p_oracle.add_argument(
        "--force", action="store_true",
        help=f"allow more than {MAX_BRUTE_FORCE_SPINS} spins (prints a runtime estimate)",
    )
    return parser


def _pick_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(32)
        print(f"seed: {seed}")
    return seed


def _spin_string(s: np.ndarray) -> str:
    return "".join("+" if v > 0 else "-" for v in s)


def _cmd_solve(args) -> int:
    problem = load_instance(args.instance)
    seed = _pick_seed(args.seed)
    cfg = SolverConfig(
        steps=args.steps,
        gamma=args.gamma,
        step_size=args.eta,
        momentum=args.momentum,
        optimizer=args.optimizer,
        init_scale=args.init_scale,
        seed=seed,
        trace_stride=args.trace_stride if args.trace else 0,
    )
    result = solve(problem, cfg)
    lines = [f"energy: {result.energy!r}"]
    if result.relative_error is not None:
        lines.append(f"relative_error: {result.relative_error!r}")
    lines.append(f"spins: {_spin_string(result.spins)}")
    text = "\n".join(lines)
    print(text)
    if args.output:
        with open(args.output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text + "\n")
    if args.trace and result.trace is not None:
        result.trace.write_csv(args.trace)
    return EXIT_OK


def _cmd_generate(args) -> int:
    if args.n < 2:
        raise ProblemFormatError("--n must be >= 2")
    seed = _pick_seed(args.seed)
    if args.family == "pm1":
        problem = gen_random_pm1(args.n, seed)
        meta = [f"generator: pm1 n={args.n} seed={seed}"]
    else:
        inst = gen_wishart(args.n, args.alpha, seed)
        problem = inst.problem
        meta = [f"generator: wishart n={args.n} alpha={args.alpha!r} seed={seed}"]
    save_instance(problem, args.out, header_comments=meta)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    spec = bench_mod.load_bench_spec(args.spec)
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("LQA_WORKERS", spec.workers))
    spec = bench_mod.BenchSpec(
        **{**{f.name: getattr(spec, f.name) for f in spec.__dataclass_fields__.values()},
           "workers": workers},
    )
    problems = {inst.id: bench_mod.materialize(inst) for inst in spec.instances}
    reports = bench_mod.run_batch(spec, problems)
    bench_mod.write_reports_csv(reports, f"{args.output_prefix}_trials.csv")
    bench_mod.write_summary_csv(bench_mod.summarize(reports), f"{args.output_prefix}_summary.csv")
    if spec.trace_stride > 0:
        for inst in spec.instances:
            traces = [r.trace for r in reports if r.instance == inst.id and r.trace]
            if traces:
                rows = bench_mod.aggregate_traces(traces)
                bench_mod.write_trace_csv(rows, f"{args.output_prefix}_{inst.id}_trace.csv")
    failures = sum(r.failed for r in reports)
    print(f"ran {len(reports)} trials ({failures} failed); wrote {args.output_prefix}_*.csv")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    problem = load_instance(args.instance)
    from .ising import absorb_bias

    if problem.has_bias:
        problem = absorb_bias(problem)
    if problem.n > MAX_BRUTE_FORCE_SPINS:
        if not args.force:
            raise ProblemFormatError(
                f"{problem.n} spins exceeds the cap of {MAX_BRUTE_FORCE_SPINS}; "
                "pass --force to run anyway"
            )
        est = estimate_brute_force_seconds(problem.n)
        print(f"estimated runtime: {est:.0f} s")
    e, minimisers = brute_force_ground(problem, max_spins=problem.n)
    print(f"ground_energy: {e!r}")
    print(f"minimisers: {len(minimisers)}")
    for s in minimisers:
        print(_spin_string(s))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "generate": _cmd_generate,
        "bench": _cmd_bench,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (ProblemFormatError, FileNotFoundError, ValueError) as exc:
        print(f"lqa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"lqa: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
