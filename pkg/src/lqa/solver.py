"""Annealed cost function, analytic gradient, optimizers, and the anneal loop.

Each spin i carries a real parameter w_i mapped to an angle
theta_i = (pi/2) tanh(w_i). The annealed cost at interpolation time
t in [0, 1] is

    C(t, w) = t * gamma * z^T J z - (1 - t) * sum(x)

with z_i = sin(theta_i) and x_i = cos(theta_i). At t = 0 the minimum
is w = 0 (all angles zero); at t = 1 the cost approaches
gamma * s^T J s with s = sign(w) as |w| grows. The anneal loop makes
one gradient update per time step and reads out sign(w) at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ising import IsingProblem

HALF_PI = math.pi / 2.0

OPTIMIZERS = ("vanilla", "momentum", "adam")


class SolverError(RuntimeError):
    """Raised when the optimisation produces non-finite values."""


@dataclass
class SolverConfig:
    """Hyperparameters for one annealing run.

    ``schedule`` maps (step index i, total steps N) to t in [0, 1] and
    must be non-decreasing; the default is the linear ramp t = i / N.
    ``trace_stride`` > 0 records (step, t, cost, energy) every that
    many steps; 0 disables tracing.
    """

    steps: int = 1000
    gamma: float = 0.1
    step_size: float = 1.0
    momentum: float = 0.9
    optimizer: str = "adam"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    init_scale: float = 0.1
    seed: int = 0
    schedule: Callable[[int, int], float] | None = None
    trace_stride: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.step_size <= 0:
            raise ValueError("step_size must be > 0")
        if not 0.0 <= self.momentum <= 1.0:
            raise ValueError("momentum must be in [0, 1]")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
        if self.trace_stride < 0:
            raise ValueError("trace_stride must be >= 0")

    def time_at(self, i: int) -> float:
        if self.schedule is None:
            return i / self.steps
        return self.schedule(i, self.steps)


@dataclass
class SolverState:
    """Mutable per-trial state: parameters plus optimizer buffers."""

    w: np.ndarray
    velocity: np.ndarray = field(default=None)  # type: ignore[assignment]
    m1: np.ndarray = field(default=None)  # type: ignore[assignment]
    m2: np.ndarray = field(default=None)  # type: ignore[assignment]
    step_index: int = 0

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64).copy()
        n = self.w.shape[0]
        if self.velocity is None:
            self.velocity = np.zeros(n)
        if self.m1 is None:
            self.m1 = np.zeros(n)
        if self.m2 is None:
            self.m2 = np.zeros(n)

    def caches(self) -> tuple[np.ndarray, np.ndarray]:
        """Recompute z = sin(theta), x = cos(theta) from w."""
        theta = HALF_PI * np.tanh(self.w)
        return np.sin(theta), np.cos(theta)


def spin_readout(w: np.ndarray) -> np.ndarray:
    """sign(w) with the tie-break sign(0) = +1."""
    return np.where(np.asarray(w) >= 0.0, 1.0, -1.0)


def cost(p: IsingProblem, w: np.ndarray, t: float, gamma: float) -> float:
    """Annealed cost t*gamma*z^T J z - (1-t)*sum(x)."""
    if p.has_bias:
        raise ValueError("problem has a nonzero bias; call absorb_bias first")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (p.n,):
        raise ValueError(f"w has shape {w.shape}, expected ({p.n},)")
    theta = HALF_PI * np.tanh(w)
    z = np.sin(theta)
    x = np.cos(theta)
    return float(t * gamma * (z @ (p.J @ z)) - (1.0 - t) * x.sum())


def gradient(p: IsingProblem, w: np.ndarray, t: float, gamma: float) -> np.ndarray:
    """Analytic gradient of the annealed cost with respect to w.

    grad = (pi/2) * [t*gamma*(2 J z) . x + (1-t) z] . (1 - tanh(w)^2)
    where . is elementwise multiplication. The J z product dominates
    the runtime.
    """
    if p.has_bias:
        raise ValueError("problem has a nonzero bias; call absorb_bias first")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (p.n,):
        raise ValueError(f"w has shape {w.shape}, expected ({p.n},)")
    th = np.tanh(w)
    theta = HALF_PI * th
    z = np.sin(theta)
    x = np.cos(theta)
    return HALF_PI * (t * gamma * 2.0 * (p.J @ z) * x + (1.0 - t) * z) * (1.0 - th * th)


def update_vanilla(state: SolverState, grad: np.ndarray, eta: float) -> None:
    """Plain gradient step w -= eta * grad."""
    state.w -= eta * grad


def update_momentum(state: SolverState, grad: np.ndarray, eta: float, mu: float) -> None:
    """Momentum step: v <- mu*v - eta*grad; w <- w + v."""
    state.velocity *= mu
    state.velocity -= eta * grad
    state.w += state.velocity


def update_adam(
    state: SolverState,
    grad: np.ndarray,
    eta: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """Adam step with bias correction; uses state.step_index as the
    step counter k, which must be >= 1 at the time of the call."""
    k = state.step_index
    if k < 1:
        raise ValueError("Adam requires step_index >= 1")
    state.m1 = beta1 * state.m1 + (1.0 - beta1) * grad
    state.m2 = beta2 * state.m2 + (1.0 - beta2) * grad * grad
    m1_hat = state.m1 / (1.0 - beta1**k)
    m2_hat = state.m2 / (1.0 - beta2**k)
    state.w -= eta * m1_hat / (np.sqrt(m2_hat) + eps)


@dataclass
class TrialTrace:
    """Per-step records captured during an anneal, at a fixed stride."""

    steps: list[int] = field(default_factory=list)
    ts: list[float] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)

    def append(self, step: int, t: float, c: float, e: float) -> None:
        self.steps.append(step)
        self.ts.append(t)
        self.costs.append(c)
        self.energies.append(e)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("step,t,cost,energy\n")
            for row in zip(self.steps, self.ts, self.costs, self.energies):
                fh.write("%d,%r,%r,%r\n" % row)


def init_weights(n: int, init_scale: float, seed) -> np.ndarray:
    """Seeded initial parameters init_scale * uniform[-1, 1]^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return init_scale * rng.uniform(-1.0, 1.0, size=n)


def anneal(
    p: IsingProblem, cfg: SolverConfig, w0: np.ndarray
) -> tuple[np.ndarray, TrialTrace | None]:
    """Run the anneal loop and return (sign(w), trace or None).

    For i = 1..N: t = schedule(i), one gradient evaluation, one
    optimizer update. Deterministic given (p, cfg, w0); no randomness
    is consumed inside the loop.
    """
    w0 = np.asarray(w0, dtype=np.float64)
    if w0.shape != (p.n,):
        raise ValueError(f"w0 has shape {w0.shape}, expected ({p.n},)")
    if not np.all(np.isfinite(w0)):
        raise ValueError("w0 must be finite")
    state = SolverState(w=w0)
    trace = TrialTrace() if cfg.trace_stride > 0 else None
    eta = cfg.step_size
    for i in range(1, cfg.steps + 1):
        t = cfg.time_at(i)
        g = gradient(p, state.w, t, cfg.gamma)
        if not np.all(np.isfinite(g)):
            raise SolverError(f"non-finite gradient at step {i}")
        state.step_index = i
        if cfg.optimizer == "vanilla":
            update_vanilla(state, g, eta)
        elif cfg.optimizer == "momentum":
            update_momentum(state, g, eta, cfg.momentum)
        else:
            update_adam(state, g, eta, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        if not np.all(np.isfinite(state.w)):
            raise SolverError(f"non-finite parameters at step {i}")
        if trace is not None and (i % cfg.trace_stride == 0 or i == cfg.steps):
            c = cost(p, state.w, t, cfg.gamma)
            s = spin_readout(state.w)
            e = float(s @ (p.J @ s))
            if not math.isfinite(c):
                raise SolverError(f"non-finite cost at step {i}")
            trace.append(i, t, c, e)
    return spin_readout(state.w), trace


@dataclass
class SolveResult:
    """Outcome of a full solve: spins for the original problem plus
    the objective value and relative error when the optimum is known."""

    spins: np.ndarray
    energy: float
    relative_error: float | None
    trace: TrialTrace | None


def solve(p: IsingProblem, cfg: SolverConfig, w0: np.ndarray | None = None) -> SolveResult:
    """Solve p end to end: absorb any bias, anneal, normalise the
    ancilla on readout, and report the objective of the original
    problem."""
    from .ising import absorb_bias, normalize_ancilla, objective

    work = absorb_bias(p) if p.has_bias else p
    if w0 is None:
        w0 = init_weights(work.n, cfg.init_scale, cfg.seed)
    s, trace = anneal(work, cfg, w0)
    if p.has_bias:
        s = normalize_ancilla(s)
    e = objective(p, s)
    rel = None
    if p.ground_energy is not None and p.ground_energy != 0.0:
        rel = abs((e - p.ground_energy) / p.ground_energy)
    return SolveResult(spins=s, energy=e, relative_error=rel, trace=trace)
