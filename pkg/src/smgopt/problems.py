"""Finite-sum minimization problems with certified constants.

A problem bundles the mean objective F(w) = (1/n) sum_i f(w; i), per-component
gradient oracles, and constants certifying smoothness, gradient boundedness,
and the variance inequality

    (1/n) sum_i ||grad f(w;i) - grad F(w)||^2 <= theta ||grad F(w)||^2 + sigma_sq.

Two families are provided: binary logistic regression with a bounded nonconvex
regularizer, and a quadratic mean-of-components fixture whose constants are
exact, for bound audits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# max of |w|/(1+w^2)^2 over the reals, attained at |w| = 1/sqrt(3)
REG_GRAD_PEAK = 3.0 * math.sqrt(3.0) / 16.0


class DimensionMismatch(ValueError):
    """A sample feature index falls outside the iterate's dimension."""

    def __init__(self, index: int, dimension: int):
        self.index = index
        self.dimension = dimension
        super().__init__(
            f"feature index {index} exceeds problem dimension {dimension}"
        )


@dataclass(frozen=True)
class ProblemConstants:
    """Certified constants for a finite-sum problem.

    L is a smoothness constant valid for every component, G bounds every
    component gradient norm (math.inf when no finite bound is certified),
    (theta, sigma_sq) certify the variance inequality, and f_lower is a
    lower bound on the objective (not necessarily tight).
    """

    L: float
    G: float
    theta: float
    sigma_sq: float
    f_lower: float

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.theta < 0:
            raise ValueError(f"theta must be nonnegative, got {self.theta}")
        if self.sigma_sq < 0:
            raise ValueError(f"sigma_sq must be nonnegative, got {self.sigma_sq}")
        if not self.G > 0:
            raise ValueError(f"G must be positive or inf, got {self.G}")

    @property
    def has_finite_G(self) -> bool:
        return math.isfinite(self.G)


@dataclass(frozen=True)
class SparseSample:
    """One labeled sparse example: label in {-1, +1}, features as sorted
    (1-based index, value) pairs with strictly increasing indices."""

    label: int
    features: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.label}")
        prev = 0
        for idx, _ in self.features:
            if idx <= prev:
                raise ValueError(
                    f"feature indices must be strictly increasing and >= 1, "
                    f"got {idx} after {prev}"
                )
            prev = idx

    @property
    def max_index(self) -> int:
        return self.features[-1][0] if self.features else 0

    def dot(self, w: np.ndarray) -> float:
        """Sparse-dense inner product x^T w."""
        d = w.shape[0]
        acc = 0.0
        for idx, val in self.features:
            if idx > d:
                raise DimensionMismatch(idx, d)
            acc += val * w[idx - 1]
        return acc

    def norm(self) -> float:
        return math.sqrt(sum(v * v for _, v in self.features))


@dataclass(frozen=True)
class Problem:
    """Finite-sum objective with component oracles and certified constants.

    Immutable after construction; the callables are pure and safe to invoke
    concurrently.
    """

    n: int
    d: int
    component_value: Callable[[np.ndarray, int], float]
    component_grad: Callable[[np.ndarray, int], np.ndarray]
    full_value: Callable[[np.ndarray], float]
    full_grad: Callable[[np.ndarray], np.ndarray]
    constants: ProblemConstants

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")


# ---------------------------------------------------------------------------
# Nonconvex-regularized logistic regression
#
#   f(w; i) = log(1 + exp(-y_i x_i^T w)) + lam * r(w),
#   r(w) = (1/2) sum_j w_j^2 / (1 + w_j^2).
# ---------------------------------------------------------------------------

def regularizer_value(w: np.ndarray) -> float:
    wsq = w * w
    return 0.5 * float(np.sum(wsq / (1.0 + wsq)))


def regularizer_grad(w: np.ndarray) -> np.ndarray:
    return w / (1.0 + w * w) ** 2


def logistic_component_value(w: np.ndarray, sample: SparseSample, lam: float) -> float:
    z = sample.label * sample.dot(w)
    return float(np.logaddexp(0.0, -z)) + lam * regularizer_value(w)


def logistic_component_grad(w: np.ndarray, sample: SparseSample, lam: float) -> np.ndarray:
    """Gradient -y * s * x + lam * r'(w) with s = 1/(1 + exp(y x^T w))."""
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    z = sample.label * sample.dot(w)
    # sigmoid(-z) computed as exp(-logaddexp(0, z)) to avoid overflow
    s = math.exp(-np.logaddexp(0.0, z))
    g = lam * regularizer_grad(w)
    coef = -sample.label * s
    for idx, val in sample.features:
        g[idx - 1] += coef * val
    return g


def logistic_constants(dataset: Sequence[SparseSample], lam: float,
                       d: int | None = None) -> ProblemConstants:
    """Conservative certificates for the regularized logistic objective.

    The logistic curvature is at most 1/4 and |r''| <= 1, so
    L = 0.25 max_i ||x_i||^2 + lam.  |r'| peaks at 3 sqrt(3)/16 per
    coordinate, so G = max_i ||x_i|| + lam * (3 sqrt(3)/16) * sqrt(d).
    The variance pair is theta = 0, sigma_sq = 4 G^2 (triangle inequality),
    and f_lower = 0 since both terms of f are nonnegative.
    """
    if not dataset:
        raise ValueError("cannot certify constants for an empty dataset")
    if d is None:
        d = max(s.max_index for s in dataset)
    max_norm = max(s.norm() for s in dataset)
    L = 0.25 * max_norm ** 2 + lam
    G = max_norm + lam * REG_GRAD_PEAK * math.sqrt(d)
    return ProblemConstants(L=L, G=G, theta=0.0, sigma_sq=4.0 * G * G, f_lower=0.0)


def logistic_problem(dataset: Sequence[SparseSample], lam: float = 0.01,
                     d: int | None = None) -> Problem:
    """Build the regularized logistic-regression problem over a dataset."""
    if not dataset:
        raise ValueError("cannot build a problem from an empty dataset")
    samples = list(dataset)
    n = len(samples)
    if d is None:
        d = max(s.max_index for s in samples)
    if d < 1:
        raise ValueError("dataset has no features; dimension would be zero")
    for s in samples:
        if s.max_index > d:
            raise DimensionMismatch(s.max_index, d)

    def component_value(w, i):
        return logistic_component_value(w, samples[i], lam)

    def component_grad(w, i):
        return logistic_component_grad(w, samples[i], lam)

    def full_value(w):
        loss = 0.0
        for s in samples:
            z = s.label * s.dot(w)
            loss += float(np.logaddexp(0.0, -z))
        return loss / n + lam * regularizer_value(w)

    def full_grad(w):
        g = np.zeros(d)
        for s in samples:
            z = s.label * s.dot(w)
            coef = -s.label * math.exp(-np.logaddexp(0.0, z))
            for idx, val in s.features:
                g[idx - 1] += coef * val
        g /= n
        g += lam * regularizer_grad(w)
        return g

    return Problem(
        n=n, d=d,
        component_value=component_value,
        component_grad=component_grad,
        full_value=full_value,
        full_grad=full_grad,
        constants=logistic_constants(samples, lam, d),
    )


# ---------------------------------------------------------------------------
# Quadratic mean-of-components fixture
#
#   f(w; i) = (1/2) (w - c_i)^T A (w - c_i)
#
# Component-gradient deviations A(cbar - c_i) are constant in w, so
# theta = 0 and sigma_sq is exact; the minimizer is cbar and F* = F(cbar).
# ---------------------------------------------------------------------------

def quadratic_mean_problem(centers: Sequence[np.ndarray] | np.ndarray,
                           curvature: np.ndarray) -> Problem:
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    A = np.asarray(curvature, dtype=float)
    n, d = centers.shape
    if A.shape != (d, d):
        raise ValueError(f"curvature must be {d}x{d}, got {A.shape}")
    if not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("curvature matrix must be symmetric")
    eigs = np.linalg.eigvalsh(A)
    if eigs[0] <= 0:
        raise ValueError(f"curvature matrix must be positive definite, "
                         f"smallest eigenvalue {eigs[0]}")

    cbar = centers.mean(axis=0)
    deviations = (cbar - centers) @ A.T          # rows A(cbar - c_i)
    sigma_sq = float(np.mean(np.sum(deviations ** 2, axis=1)))
    # F(cbar) = (1/2n) sum_i (c_i - cbar)^T A (c_i - cbar), the exact minimum
    spread = centers - cbar
    f_star = 0.5 * float(np.mean(np.sum((spread @ A.T) * spread, axis=1)))

    def component_value(w, i):
        r = w - centers[i]
        return 0.5 * float(r @ (A @ r))

    def component_grad(w, i):
        return A @ (w - centers[i])

    def full_value(w):
        r = w - cbar
        return 0.5 * float(r @ (A @ r)) + f_star

    def full_grad(w):
        return A @ (w - cbar)

    constants = ProblemConstants(
        L=float(eigs[-1]), G=math.inf, theta=0.0,
        sigma_sq=sigma_sq, f_lower=f_star,
    )
    return Problem(
        n=n, d=d,
        component_value=component_value,
        component_grad=component_grad,
        full_value=full_value,
        full_grad=full_grad,
        constants=constants,
    )
