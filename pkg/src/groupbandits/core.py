"""Vector-order math: domination, gap operators, efficiency vectors and Pareto sets.

All group/arm/dimension indices are 0-based inside the library. The CLI and
service layers convert to 1-based numbering for anything user-facing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, NonUniqueOptimumError


class Dominance(str, Enum):
    NONE = "none"
    WEAK = "weak"
    STRICT_PARTIAL = "strict-partial"
    STRICT = "strict"


def _pair(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatchError(
            f"expected two vectors of equal length, got shapes {u.shape} and {v.shape}"
        )
    return u, v


def dominance(u, v) -> Dominance:
    """Strongest relation of v over u: weak (u <= v), strict-partial, strict, or none."""
    u, v = _pair(u, v)
    if not np.all(u <= v):
        return Dominance.NONE
    if np.all(u < v):
        return Dominance.STRICT
    if np.any(u < v):
        return Dominance.STRICT_PARTIAL
    return Dominance.WEAK


def m_gap(v, u) -> float:
    """[min_d (u^d - v^d)]^+ : smallest uniform addition to v escaping strict domination by u."""
    v, u = _pair(v, u)
    return max(float(np.min(u - v)), 0.0)


def big_m_gap(v, u, alpha: float = 0.0) -> float:
    """[max_d (v^d - u^d + alpha)]^+ : smallest uniform addition to u weakly dominating v+alpha."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    v, u = _pair(v, u)
    return max(float(np.max(v - u)) + alpha, 0.0)


@dataclass(frozen=True)
class ArmMeansTensor:
    """N x K x D tensor of arm mean reward vectors, entries in [0, 1]."""

    means: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.means, dtype=float)
        if arr.ndim != 3:
            raise ValueError(f"means must be a 3-d tensor, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ValueError(f"all tensor dimensions must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("tensor entries must be finite and lie in [0, 1]")
        object.__setattr__(self, "means", arr)

    @property
    def n_groups(self) -> int:
        return self.means.shape[0]

    @property
    def n_arms(self) -> int:
        return self.means.shape[1]

    @property
    def n_dims(self) -> int:
        return self.means.shape[2]


def efficiency(tensor: ArmMeansTensor) -> np.ndarray:
    """N x D matrix of per-dimension maxima over each group's arms."""
    return tensor.means.max(axis=1)


def pareto_set(R, epsilon: float = 0.0) -> set:
    """Groups whose efficiency vector, raised by epsilon, is strictly dominated by no other."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    R = np.asarray(R, dtype=float)
    n = R.shape[0]
    # strict[i, j] is True when R_i + eps is strictly dominated by R_j
    strict = np.all(R[None, :, :] > R[:, None, :] + epsilon, axis=2)
    np.fill_diagonal(strict, False)
    return {i for i in range(n) if not strict[i].any()}


@dataclass(frozen=True)
class GpsiGapReport:
    group_gaps: np.ndarray        # (N,) Delta_i; +inf where a minimization set is empty
    plus_gaps: dict               # optimal group -> Delta_i^+
    minus_gaps: dict              # optimal group -> Delta_i^-
    arm_gaps: np.ndarray          # (N, K) in-group gaps m(mu_ij, R_i)
    effective_gaps: np.ndarray    # (N, K) max(arm_gap, group_gap, epsilon)
    pareto: set                   # Pareto-optimal group indices (epsilon = 0)


def gpsi_gaps(tensor: ArmMeansTensor, epsilon: float) -> GpsiGapReport:
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    R = efficiency(tensor)
    n, k = tensor.n_groups, tensor.n_arms
    optimal = pareto_set(R, 0.0)

    group_gaps = np.empty(n)
    plus_gaps, minus_gaps = {}, {}
    suboptimal = [i for i in range(n) if i not in optimal]

    # non-optimal groups first: their gaps feed Delta_i^- of the optimal ones
    for i in suboptimal:
        group_gaps[i] = max(m_gap(R[i], R[j]) for j in optimal)
    for i in optimal:
        plus = min(
            (min(big_m_gap(R[i], R[j]), big_m_gap(R[j], R[i])) for j in optimal if j != i),
            default=math.inf,
        )
        minus = min(
            (big_m_gap(R[j], R[i]) + 2.0 * group_gaps[j] for j in suboptimal),
            default=math.inf,
        )
        plus_gaps[i], minus_gaps[i] = plus, minus
        group_gaps[i] = min(plus, minus)

    arm_gaps = np.maximum((R[:, None, :] - tensor.means).min(axis=2), 0.0)
    effective = np.maximum(arm_gaps, np.maximum(group_gaps[:, None], epsilon))
    return GpsiGapReport(group_gaps, plus_gaps, minus_gaps, arm_gaps, effective, optimal)


@dataclass(frozen=True)
class LbgiGapReport:
    weights: np.ndarray           # (D,)
    best_group: int
    group_gaps: np.ndarray        # (N,)
    arm_alphas: np.ndarray        # (N, K)
    arm_gaps: np.ndarray          # (N, K) max(alpha_ij, Delta_i)
    refined_arm_gaps: np.ndarray  # (N, K) single-dimension gap quantity


def _check_weights(w, n_dims: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.shape[0] != n_dims:
        raise DimensionMismatchError(f"expected {n_dims} weights, got shape {w.shape}")
    if not np.all(w > 0):
        raise ValueError("all weights must be strictly positive")
    return w


def overtake_alpha(group_eff, arm_mean, w, target: float) -> float:
    """Smallest alpha > 0 such that raising the arm's mean vector by alpha lifts the
    group's weighted efficiency sum above target. Exact piecewise-linear solve: the
    efficiency in dimension d becomes max(R^d, mu^d + alpha)."""
    group_eff = np.asarray(group_eff, dtype=float)
    arm_mean = np.asarray(arm_mean, dtype=float)
    w = np.asarray(w, dtype=float)
    crossings = group_eff - arm_mean  # alpha at which the arm overtakes R^d; >= 0
    order = np.argsort(crossings, kind="stable")
    value = float(w @ group_eff)
    if value > target:
        return 0.0
    slope = 0.0
    prev = 0.0
    for d in order:
        c = float(crossings[d])
        if slope > 0 and value + slope * (c - prev) >= target:
            return prev + (target - value) / slope
        value += slope * (c - prev)
        prev = c
        slope += float(w[d])
    return prev + (target - value) / slope


def lbgi_gaps(tensor: ArmMeansTensor, w) -> LbgiGapReport:
    w = _check_weights(w, tensor.n_dims)
    R = efficiency(tensor)
    scores = R @ w
    best = int(np.argmax(scores))
    if np.count_nonzero(scores == scores[best]) > 1:
        raise NonUniqueOptimumError(
            "weighted efficiency sums are tied; the best group is not unique"
        )
    n, k, d = tensor.n_groups, tensor.n_arms, tensor.n_dims
    w_l1 = float(np.sum(w))

    group_gaps = (scores[best] - scores) / w_l1
    if n > 1:
        group_gaps[best] = np.min(np.delete(group_gaps, best))
    else:
        group_gaps[best] = math.inf

    alphas = np.empty((n, k))
    for i in range(n):
        for j in range(k):
            if i == best:
                alphas[i, j] = m_gap(tensor.means[i, j], R[i])
            else:
                alphas[i, j] = overtake_alpha(R[i], tensor.means[i, j], w, float(scores[best]))
    arm_gaps = np.maximum(alphas, group_gaps[:, None])

    # smallest single-dimension addition achieving the same overtake
    refined = (group_gaps[:, None, None] * w_l1 / (d * w[None, None, :])
               + (R[:, None, :] - tensor.means)).min(axis=2)
    return LbgiGapReport(w, best, group_gaps, alphas, arm_gaps, refined)


def beta(r: int, delta: float, n_groups: int, n_arms: int, n_dims: int,
         scale: float = 1.0) -> float:
    """Anytime confidence radius after r samples (Hoeffding + union over rounds/arms/dims)."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    nkd = n_groups * n_arms * n_dims
    return scale * math.sqrt(2.0 * math.log(4.0 * nkd * r * r / delta) / r)


def beta_array(rs, delta: float, n_groups: int, n_arms: int, n_dims: int,
               scale: float = 1.0) -> np.ndarray:
    """Vectorized beta over an array of round counts."""
    rs = np.asarray(rs, dtype=float)
    nkd = n_groups * n_arms * n_dims
    return scale * np.sqrt(2.0 * np.log(4.0 * nkd * rs * rs / delta) / rs)
