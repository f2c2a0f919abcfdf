"""Closed-form sample-complexity expressions and independent brute-force oracles.

The lower-bound evaluators report the explicit summand with all asymptotic
constants dropped: they are expression values for comparison, not certified
bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ArmMeansTensor, _check_weights, efficiency, gpsi_gaps, lbgi_gaps
from .errors import NoThresholdError


@dataclass(frozen=True)
class BoundReport:
    per_arm_terms: np.ndarray     # (N, K)
    total: float
    constant_used: float
    log_confidence: float         # log(1/(2.4 delta)) for the lower bounds, else nan
    group_terms: dict = field(default_factory=dict)  # group -> undivided group term

    def as_dict(self) -> dict:
        return {
            "per_arm_terms": self.per_arm_terms.tolist(),
            "total": self.total,
            "constant_used": self.constant_used,
            "log_confidence": self.log_confidence,
            "group_terms": {str(k): v for k, v in self.group_terms.items()},
        }


def te_upper_bound(tensor: ArmMeansTensor, epsilon: float, delta: float,
                   constant: float = 1.0) -> BoundReport:
    """Sum over arms of C / gap^2 * log(NKD / (delta * gap)) with the effective
    Pareto gap max(arm gap, group gap, epsilon)."""
    if constant <= 0:
        raise ValueError(f"constant must be > 0, got {constant}")
    gaps = gpsi_gaps(tensor, epsilon).effective_gaps
    nkd = tensor.n_groups * tensor.n_arms * tensor.n_dims
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = constant / gaps ** 2 * np.log(nkd / (delta * gaps))
    terms = np.where(np.isinf(gaps), 0.0, terms)  # infinite gap: no samples needed
    return BoundReport(terms, float(terms.sum()), constant, math.nan)


def gpsi_lower_bound(tensor: ArmMeansTensor, epsilon: float,
                     delta: float) -> BoundReport:
    gaps = gpsi_gaps(tensor, epsilon).effective_gaps
    log_conf = math.log(1.0 / (2.4 * delta))
    terms = np.where(np.isinf(gaps), 0.0, (1.0 / gaps ** 2) * log_conf)
    return BoundReport(terms, float(terms.sum()), 1.0, log_conf)


def eecb_upper_bound(tensor: ArmMeansTensor, w, delta: float,
                     constant: float = 1.0, refined: bool = False) -> BoundReport:
    """Sum over arms of C' / g^2 * log(NKD / (delta * arm_gap)) where g is
    arm_gap / D, or the larger single-dimension gap when `refined` is set."""
    if constant <= 0:
        raise ValueError(f"constant must be > 0, got {constant}")
    report = lbgi_gaps(tensor, w)
    d = tensor.n_dims
    g = report.refined_arm_gaps if refined else report.arm_gaps / d
    nkd = tensor.n_groups * tensor.n_arms * d
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = constant / g ** 2 * np.log(nkd / (delta * report.arm_gaps))
    terms = np.where(np.isinf(g), 0.0, terms)
    return BoundReport(terms, float(terms.sum()), constant, math.nan)


def lbgi_lower_bound(tensor: ArmMeansTensor, w, delta: float) -> BoundReport:
    """Per-arm terms for arms outside the best group; one undivided group-level
    term for the best group itself."""
    report = lbgi_gaps(tensor, w)
    best = report.best_group
    log_conf = math.log(1.0 / (2.4 * delta))
    terms = (1.0 / report.arm_gaps ** 2) * log_conf
    terms[best, :] = 0.0
    best_gap = report.group_gaps[best]
    group_term = 0.0 if math.isinf(best_gap) else (1.0 / best_gap ** 2) * log_conf
    total = float(terms.sum()) + group_term
    return BoundReport(terms, total, 1.0, log_conf, {best: group_term})


def brute_pareto(R, epsilon: float = 0.0) -> set:
    """Literal pairwise scan for the epsilon-Pareto set; a deliberately separate
    code path from the vectorized implementation."""
    rows = [list(map(float, row)) for row in np.asarray(R, dtype=float)]
    n = len(rows)
    result = set()
    for i in range(n):
        dominated = False
        for j in range(n):
            if i == j:
                continue
            if all(rows[i][d] + epsilon < rows[j][d] for d in range(len(rows[i]))):
                dominated = True
                break
        if not dominated:
            result.add(i)
    return result


def gap_bisection_oracle(subject, query: str, target, tolerance: float = 1e-12,
                         hi: float = 2.0) -> float:
    """Bisection over a uniform addition alpha until the defining predicate
    flips.

    query="group-pareto-gap": subject is an efficiency matrix, target a group
    index; the predicate is Pareto membership of the group after adding alpha
    to its row.
    query="arm-alpha": subject is (tensor, weights), target an arm (i, j); the
    predicate is the group's weighted efficiency sum exceeding the best
    group's after adding alpha to the arm's mean vector.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")

    if query == "group-pareto-gap":
        R = np.asarray(subject, dtype=float)
        i = int(target)

        def predicate(alpha):
            mod = R.copy()
            mod[i] += alpha
            return i in brute_pareto(mod, 0.0)
    elif query == "arm-alpha":
        tensor, w = subject
        w = _check_weights(w, tensor.n_dims)
        i, j = target
        R = efficiency(tensor)
        best_score = float(np.max(R @ w))

        def predicate(alpha):
            group = tensor.means[i].copy()
            group[j] += alpha
            return float(group.max(axis=0) @ w) > best_score
    else:
        raise ValueError(f"unknown query kind: {query!r}")

    if predicate(0.0):
        return 0.0
    if not predicate(hi):
        raise NoThresholdError(f"predicate never flipped on [0, {hi}]")
    lo_a, hi_a = 0.0, hi
    while hi_a - lo_a > tolerance:
        mid = 0.5 * (lo_a + hi_a)
        if predicate(mid):
            hi_a = mid
        else:
            lo_a = mid
    return 0.5 * (lo_a + hi_a)
