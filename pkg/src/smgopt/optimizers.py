"""Epoch-structured optimizers over finite-sum problems.

All runs share the same shape: T epochs of n inner steps, per-step rate
eta_t/n, objective and squared full-gradient norm recorded at each epoch
start, and the output iterate sampled from the epoch-start points with
probability proportional to eta_t.

Methods:

  smg_run    momentum anchored per epoch: the anchor m0 stays fixed through
             an epoch and is refreshed at the epoch boundary with the
             running average v of that epoch's component gradients,
                 m <- beta * m0 + (1 - beta) * g
                 v <- v + g / n
                 w <- w - (eta_t / n) * m
  ssmg_run   classical recursive momentum m <- beta m + (1 - beta) g under
             one permutation fixed for all epochs
  shuffling_sgd_run / sgdm_run / adam_run
             baselines consuming the same permutation streams

With beta = 0, smg_run and ssmg_run reduce exactly (bitwise) to plain
shuffling SGD.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .problems import Problem
from .schedules import Schedule
from .shuffling import (
    ShufflingStrategy,
    init_point,
    permutation_for_epoch,
    select_output_index,
    selection_rng,
)

# keep full epoch-start snapshots only while T*d stays within this budget
SNAPSHOT_BUDGET = 1_000_000


class RunAborted(RuntimeError):
    """A non-finite iterate or objective value was produced."""

    def __init__(self, epoch: int, detail: str):
        self.epoch = epoch
        super().__init__(f"run aborted at epoch {epoch}: {detail}")


@dataclass
class EpochTrace:
    """Inner-loop instrumentation for identity checks on small instances."""

    permutation: np.ndarray
    gradients: np.ndarray                 # (n, d), g_0 .. g_{n-1}
    start_w: np.ndarray                   # w_tilde_{t-1}
    end_w: np.ndarray                     # w_tilde_t
    inner_iterates: np.ndarray            # (n + 1, d), w_0 .. w_n
    anchor: Optional[np.ndarray] = None   # SMG momentum anchor m0^{(t)}
    momenta: Optional[np.ndarray] = None  # SSMG m_1 .. m_n, shape (n, d)


@dataclass
class RunRecord:
    """Per-epoch trace of one optimizer run plus the sampled output iterate."""

    algo: str
    etas: np.ndarray
    losses: np.ndarray          # F(w_tilde_{t-1}) for t = 1..T
    grad_norms_sq: np.ndarray   # ||grad F(w_tilde_{t-1})||^2
    selected_index: int
    selected_w: np.ndarray
    final_w: np.ndarray
    seed: int
    beta: float
    strategy_kind: Optional[str] = None
    snapshots: Optional[list] = None      # w_tilde_0 .. w_tilde_{T-1} if small
    config_hash: Optional[str] = None
    epochs: Optional[list] = field(default=None, repr=False)

    @property
    def T(self) -> int:
        return int(self.etas.size)

    def weighted_grad_avg(self) -> float:
        """sum_t eta_t ||grad F(w_tilde_{t-1})||^2 / sum_t eta_t."""
        total = float(self.etas.sum())
        return float(np.dot(self.etas, self.grad_norms_sq)) / total


class _Recorder:
    """Epoch-boundary bookkeeping shared by every optimizer loop."""

    def __init__(self, problem: Problem, etas: np.ndarray, seed: int,
                 trace: bool):
        self.problem = problem
        self.etas = etas
        self.seed = seed
        T = etas.size
        self.losses = np.empty(T)
        self.grad_sq = np.empty(T)
        self.keep_snapshots = T * problem.d <= SNAPSHOT_BUDGET
        self.snapshots = [] if self.keep_snapshots else None
        self.selected_index = select_output_index(etas, selection_rng(seed))
        self.selected_w = None
        self.trace = [] if trace else None

    def start_epoch(self, t: int, w: np.ndarray):
        if not np.all(np.isfinite(w)):
            raise RunAborted(t, "non-finite iterate")
        loss = self.problem.full_value(w)
        grad = self.problem.full_grad(w)
        if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
            raise RunAborted(t, "non-finite objective or gradient")
        self.losses[t - 1] = loss
        self.grad_sq[t - 1] = float(grad @ grad)
        if self.keep_snapshots:
            self.snapshots.append(w.copy())
        if t - 1 == self.selected_index:
            self.selected_w = w.copy()

    def finish(self, algo: str, beta: float, w: np.ndarray,
               strategy_kind: Optional[str]) -> RunRecord:
        return RunRecord(
            algo=algo,
            etas=self.etas,
            losses=self.losses,
            grad_norms_sq=self.grad_sq,
            selected_index=self.selected_index,
            selected_w=self.selected_w,
            final_w=w.copy(),
            seed=self.seed,
            beta=beta,
            strategy_kind=strategy_kind,
            snapshots=self.snapshots,
            epochs=self.trace,
        )


def _prepare(problem: Problem, schedule: Schedule, w0: Optional[np.ndarray],
             seed: int) -> tuple[np.ndarray, np.ndarray]:
    etas = schedule.etas()
    if w0 is None:
        w = init_point(problem.d, seed)
    else:
        w = np.asarray(w0, dtype=float).copy()
        if w.shape != (problem.d,):
            raise ValueError(
                f"initial point has shape {w.shape}, problem dimension is {problem.d}"
            )
    return etas, w


def _check_beta(beta: float):
    if not 0 <= beta < 1:
        raise ValueError(f"momentum weight must lie in [0, 1), got {beta}")


def smg_run(problem: Problem, schedule: Schedule, strategy: ShufflingStrategy,
            beta: float, w0: Optional[np.ndarray] = None,
            inner_trace: bool = False) -> RunRecord:
    """Shuffling gradient method with an epoch-fixed momentum anchor."""
    _check_beta(beta)
    etas, w = _prepare(problem, schedule, w0, strategy.seed)
    n, d = problem.n, problem.d
    rec = _Recorder(problem, etas, strategy.seed, inner_trace)
    m0 = np.zeros(d)
    v = np.zeros(d)
    m = np.empty(d)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, schedule.horizon + 1):
            rec.start_epoch(t, w)
            perm = permutation_for_epoch(strategy, n, t)
            step = etas[t - 1] / n
            v[:] = 0.0
            if inner_trace:
                grads = np.empty((n, d))
                inner = np.empty((n + 1, d))
                inner[0] = w
                anchor = m0.copy()
            for i in range(n):
                g = problem.component_grad(w, int(perm[i]))
                np.multiply(m0, beta, out=m)
                m += (1.0 - beta) * g
                v += g / n
                w -= step * m
                if inner_trace:
                    grads[i] = g
                    inner[i + 1] = w
            if not np.all(np.isfinite(w)):
                raise RunAborted(t, "non-finite iterate after inner loop")
            if inner_trace:
                rec.trace.append(EpochTrace(
                    permutation=perm, gradients=grads,
                    start_w=inner[0].copy(), end_w=w.copy(),
                    inner_iterates=inner, anchor=anchor,
                ))
            m0, v = v, m0  # refresh the anchor with this epoch's average
    return rec.finish("smg", beta, w, strategy.kind)


def ssmg_run(problem: Problem, schedule: Schedule, strategy: ShufflingStrategy,
             beta: float, w0: Optional[np.ndarray] = None,
             inner_trace: bool = False) -> RunRecord:
    """Recursive-momentum method under a single fixed permutation.

    The permutation is the strategy's epoch-1 permutation, reused for every
    epoch; the momentum buffer carries across epoch boundaries.
    """
    _check_beta(beta)
    etas, w = _prepare(problem, schedule, w0, strategy.seed)
    n, d = problem.n, problem.d
    perm = permutation_for_epoch(strategy, n, 1)
    rec = _Recorder(problem, etas, strategy.seed, inner_trace)
    m = np.zeros(d)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, schedule.horizon + 1):
            rec.start_epoch(t, w)
            step = etas[t - 1] / n
            if inner_trace:
                grads = np.empty((n, d))
                momenta = np.empty((n, d))
                inner = np.empty((n + 1, d))
                inner[0] = w
            for i in range(n):
                g = problem.component_grad(w, int(perm[i]))
                m *= beta
                m += (1.0 - beta) * g
                w -= step * m
                if inner_trace:
                    grads[i] = g
                    momenta[i] = m
                    inner[i + 1] = w
            if not np.all(np.isfinite(w)):
                raise RunAborted(t, "non-finite iterate after inner loop")
            if inner_trace:
                rec.trace.append(EpochTrace(
                    permutation=perm, gradients=grads,
                    start_w=inner[0].copy(), end_w=w.copy(),
                    inner_iterates=inner, momenta=momenta,
                ))
    return rec.finish("ssmg", beta, w, strategy.kind)


def shuffling_sgd_run(problem: Problem, schedule: Schedule,
                      strategy: ShufflingStrategy,
                      w0: Optional[np.ndarray] = None,
                      inner_trace: bool = False) -> RunRecord:
    """Plain shuffling SGD: w <- w - (eta_t/n) g along the permuted order."""
    etas, w = _prepare(problem, schedule, w0, strategy.seed)
    n = problem.n
    rec = _Recorder(problem, etas, strategy.seed, inner_trace)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, schedule.horizon + 1):
            rec.start_epoch(t, w)
            perm = permutation_for_epoch(strategy, n, t)
            step = etas[t - 1] / n
            if inner_trace:
                grads = np.empty((n, problem.d))
                inner = np.empty((n + 1, problem.d))
                inner[0] = w
            for i in range(n):
                g = problem.component_grad(w, int(perm[i]))
                w -= step * g
                if inner_trace:
                    grads[i] = g
                    inner[i + 1] = w
            if not np.all(np.isfinite(w)):
                raise RunAborted(t, "non-finite iterate after inner loop")
            if inner_trace:
                rec.trace.append(EpochTrace(
                    permutation=perm, gradients=grads,
                    start_w=inner[0].copy(), end_w=w.copy(),
                    inner_iterates=inner,
                ))
    return rec.finish("sgd", 0.0, w, strategy.kind)


def sgdm_run(problem: Problem, schedule: Schedule, strategy: ShufflingStrategy,
             beta: float = 0.9, w0: Optional[np.ndarray] = None) -> RunRecord:
    """Heavy-ball baseline m <- beta m + g, w <- w - (eta_t/n) m.

    The momentum buffer persists across epochs, matching the common
    deep-learning-framework implementation.
    """
    _check_beta(beta)
    etas, w = _prepare(problem, schedule, w0, strategy.seed)
    n = problem.n
    rec = _Recorder(problem, etas, strategy.seed, trace=False)
    m = np.zeros(problem.d)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, schedule.horizon + 1):
            rec.start_epoch(t, w)
            perm = permutation_for_epoch(strategy, n, t)
            step = etas[t - 1] / n
            for i in range(n):
                g = problem.component_grad(w, int(perm[i]))
                m *= beta
                m += g
                w -= step * m
            if not np.all(np.isfinite(w)):
                raise RunAborted(t, "non-finite iterate after inner loop")
    return rec.finish("sgdm", beta, w, strategy.kind)


def adam_run(problem: Problem, lr: float, T: int, strategy: ShufflingStrategy,
             w0: Optional[np.ndarray] = None, beta1: float = 0.9,
             beta2: float = 0.999, eps: float = 1e-8) -> RunRecord:
    """Adam baseline with bias correction, constant per-step rate lr.

    The recorded eta column holds lr for every epoch, so the output iterate
    is drawn uniformly over epoch starts.
    """
    if not lr > 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if T < 1:
        raise ValueError(f"need at least one epoch, got T={T}")
    etas = np.full(T, float(lr))
    if w0 is None:
        w = init_point(problem.d, strategy.seed)
    else:
        w = np.asarray(w0, dtype=float).copy()
        if w.shape != (problem.d,):
            raise ValueError(
                f"initial point has shape {w.shape}, problem dimension is {problem.d}"
            )
    n, d = problem.n, problem.d
    rec = _Recorder(problem, etas, strategy.seed, trace=False)
    m = np.zeros(d)
    v = np.zeros(d)
    k = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, T + 1):
            rec.start_epoch(t, w)
            perm = permutation_for_epoch(strategy, n, t)
            for i in range(n):
                g = problem.component_grad(w, int(perm[i]))
                k += 1
                m *= beta1
                m += (1.0 - beta1) * g
                v *= beta2
                v += (1.0 - beta2) * g * g
                m_hat = m / (1.0 - beta1 ** k)
                v_hat = v / (1.0 - beta2 ** k)
                w -= lr * m_hat / (np.sqrt(v_hat) + eps)
            if not np.all(np.isfinite(w)):
                raise RunAborted(t, "non-finite iterate after inner loop")
    return rec.finish("adam", beta1, w, strategy.kind)
