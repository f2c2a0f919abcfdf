"""Comparison algorithms: arm-group elimination, group elimination, uniform
sampling (Pareto problem) and triple elimination with a weighted post-step
(linear problem)."""

from __future__ import annotations

import math

import numpy as np

from .core import _check_weights, m_gap, pareto_set
from .environment import (FULLY_DEPENDENT, Instance, RngStream, _as_generator)
from .gpsi import DEFAULT_MAX_ROUNDS, GpsiResult, run_te
from .lbgi import LbgiResult

TEL_EPSILON = 0.01


def run_age(instance: Instance, delta: float, epsilon: float,
            beta_scale: float = 1.0, rng=None,
            max_rounds: int = DEFAULT_MAX_ROUNDS, trace: bool = False) -> GpsiResult:
    """Triple elimination without the dimension-elimination phase."""
    return run_te(instance, delta, epsilon, beta_scale, rng, max_rounds,
                  trace=trace, dim_elimination=False, arm_elimination=True)


def run_ge(instance: Instance, delta: float, epsilon: float,
           beta_scale: float = 1.0, rng=None,
           max_rounds: int = DEFAULT_MAX_ROUNDS, trace: bool = False) -> GpsiResult:
    """Group-level elimination only: every arm of every active group is pulled
    each round."""
    return run_te(instance, delta, epsilon, beta_scale, rng, max_rounds,
                  trace=trace, dim_elimination=False, arm_elimination=False)


def unis_pull_count(n_groups: int, n_arms: int, n_dims: int,
                    epsilon: float, delta: float) -> int:
    """Per-arm pull budget of the uniform-sampling baseline."""
    nkd = n_groups * n_arms * n_dims
    return math.ceil((8.0 / (epsilon * epsilon)) * math.log(2.0 * nkd / delta))


def run_unis(instance: Instance, delta: float, epsilon: float,
             rng=None) -> GpsiResult:
    """Pull every arm the same fixed number of times, then report the estimated
    Pareto set plus any group whose estimated gap is below epsilon.

    The empirical mean of r0 unit-variance draws is sampled directly as a
    Gaussian with standard deviation scale/sqrt(r0); for both noise models this
    has exactly the distribution of averaging r0 per-pull samples.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    t = instance.tensor
    n, k, d = t.n_groups, t.n_arms, t.n_dims
    r0 = unis_pull_count(n, k, d, epsilon, delta)
    gen = _as_generator(rng if rng is not None else RngStream(0))

    scale = instance.noise.noise_scale
    if scale == 0.0:
        mu_hat = t.means.copy()
    elif instance.noise.kind == FULLY_DEPENDENT:
        z = gen.standard_normal((n, k, 1))
        mu_hat = t.means + z * (scale / math.sqrt(r0))
    else:
        z = gen.standard_normal((n, k, d))
        mu_hat = t.means + z * (scale / math.sqrt(r0))

    r_hat = mu_hat.max(axis=1)
    optimal = pareto_set(r_hat, 0.0)
    recommended = set(optimal)
    for i in range(n):
        if i in optimal:
            continue
        gap_hat = max(m_gap(r_hat[i], r_hat[j]) for j in optimal)
        if gap_hat < epsilon:
            recommended.add(i)

    per_arm = np.full((n, k), r0, dtype=np.int64)
    return GpsiResult(recommended=recommended, total_pulls=n * k * r0,
                      per_arm_pulls=per_arm, rounds=r0,
                      efficiency_estimates=r_hat)


def run_tel(instance: Instance, w, delta: float, beta_scale: float = 1.0,
            rng=None, max_rounds: int = DEFAULT_MAX_ROUNDS,
            trace: bool = False, te_result: GpsiResult | None = None) -> LbgiResult:
    """Run triple elimination ignoring the weights, then pick the recommended
    group maximizing the weighted end-of-run efficiency estimate (frozen values
    where dimensions were resolved; ties to the smallest index).

    `te_result` lets a caller reuse an identical-seed triple-elimination run,
    whose sampling trace does not depend on the weights.
    """
    w = _check_weights(w, instance.tensor.n_dims)
    if te_result is None:
        te_result = run_te(instance, delta, TEL_EPSILON, beta_scale, rng,
                           max_rounds, trace=trace)
    candidates = sorted(te_result.recommended)
    scores = [float(te_result.efficiency_estimates[i] @ w) for i in candidates]
    winner = candidates[int(np.argmax(scores))]
    return LbgiResult(recommended=winner,
                      total_pulls=te_result.total_pulls,
                      per_arm_pulls=te_result.per_arm_pulls,
                      rounds=te_result.rounds,
                      trace=te_result.trace,
                      efficiency_estimates=te_result.efficiency_estimates)
