"""Stochastic environments, instance generators, and instance (de)serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ArmMeansTensor, efficiency, gpsi_gaps, lbgi_gaps, pareto_set
from .errors import GenerationBudgetError, NonUniqueOptimumError

INDEPENDENT_GAUSSIAN = "independent_gaussian"
FULLY_DEPENDENT = "fully_dependent"

# numpy's PCG64 via default_rng; recorded so reproducibility claims are scoped
GENERATOR_VERSION = "numpy-default_rng-pcg64-v1"

DEFAULT_REJECTION_BUDGET = 100_000


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    noise_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in (INDEPENDENT_GAUSSIAN, FULLY_DEPENDENT):
            raise ValueError(f"unknown noise kind: {self.kind!r}")
        if self.noise_scale < 0:
            raise ValueError(f"noise_scale must be >= 0, got {self.noise_scale}")


@dataclass(frozen=True)
class Instance:
    tensor: ArmMeansTensor
    noise: NoiseModel
    label: str = "instance"


@dataclass(frozen=True)
class RngStream:
    """Deterministic, independently-seeded stream: (master_seed, stream_index)."""

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master_seed,
                                    spawn_key=(self.stream_index,))
        return np.random.default_rng(ss)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)}")


def sample(instance: Instance, group: int, arm: int, rng) -> np.ndarray:
    """One noisy D-dimensional reward draw for arm (group, arm)."""
    tensor = instance.tensor
    if not (0 <= group < tensor.n_groups and 0 <= arm < tensor.n_arms):
        raise IndexError(f"arm index ({group}, {arm}) out of range")
    return sample_block(instance, [(group, arm)], 1, rng)[0, 0]


def sample_block(instance: Instance, arms, count: int, rng) -> np.ndarray:
    """Noise draws for several arms over `count` rounds: shape (count, len(arms), D).

    Round-major draw order for independent streams; the fully-dependent model draws
    one deviate per (round, arm) and offsets every dimension by it.
    """
    gen = _as_generator(rng)
    tensor = instance.tensor
    d = tensor.n_dims
    mu = np.stack([tensor.means[i, j] for (i, j) in arms])  # (A, D)
    scale = instance.noise.noise_scale
    if scale == 0.0:
        return np.broadcast_to(mu, (count, len(arms), d)).copy()
    if instance.noise.kind == INDEPENDENT_GAUSSIAN:
        noise = gen.standard_normal((count, len(arms), d)) * scale
    else:
        noise = gen.standard_normal((count, len(arms), 1)) * scale
        noise = np.broadcast_to(noise, (count, len(arms), d))
    return mu[None, :, :] + noise


class NoiseSource:
    """Buffered reward stream for one instance.

    Values are consumed scalar-by-scalar from the underlying generator, so the
    reward sequence depends only on how many values have been used, never on
    how they were batched. `rewind_pulls` returns the most recently drawn
    pulls to the buffer, letting a speculative block of rounds be partially
    undone without perturbing the stream.
    """

    def __init__(self, instance: Instance, rng):
        self.instance = instance
        self.gen = _as_generator(rng)
        self._buf = np.empty(0)
        self._pos = 0
        noise = instance.noise
        d = instance.tensor.n_dims
        if noise.noise_scale == 0.0:
            self.scalars_per_pull = 0
        elif noise.kind == INDEPENDENT_GAUSSIAN:
            self.scalars_per_pull = d
        else:
            self.scalars_per_pull = 1

    def _take(self, n: int) -> np.ndarray:
        remaining = self._buf.size - self._pos
        if remaining < n:
            fresh = self.gen.standard_normal(n - remaining)
            self._buf = np.concatenate([self._buf[self._pos:], fresh])
            self._pos = 0
        out = self._buf[self._pos:self._pos + n]
        self._pos += n
        return out

    def _noise(self, n_pulls: int) -> np.ndarray | None:
        """Noise for `n_pulls` consecutive pulls, shape (n_pulls, D) or None."""
        d = self.instance.tensor.n_dims
        per = self.scalars_per_pull
        if per == 0:
            return None
        vals = self._take(n_pulls * per).reshape(n_pulls, per)
        if per == 1:
            vals = np.broadcast_to(vals, (n_pulls, d))
        return vals * self.instance.noise.noise_scale

    def block(self, arms, count: int) -> np.ndarray:
        """Rewards for `arms` over `count` rounds, round-major: (count, A, D)."""
        tensor = self.instance.tensor
        a, d = len(arms), tensor.n_dims
        mu = np.stack([tensor.means[i, j] for (i, j) in arms]) if a else \
            np.empty((0, d))
        noise = self._noise(count * a)
        if noise is None:
            return np.broadcast_to(mu, (count, a, d)).copy()
        return mu[None, :, :] + noise.reshape(count, a, d)

    def pulls(self, groups, arms_idx) -> np.ndarray:
        """Rewards for an explicit pull sequence, shape (len(groups), D)."""
        mu = self.instance.tensor.means[groups, arms_idx]
        noise = self._noise(len(groups))
        return mu.copy() if noise is None else mu + noise

    def rewind_pulls(self, n_pulls: int) -> None:
        self._pos -= n_pulls * self.scalars_per_pull
        assert self._pos >= 0, "cannot rewind past the last refill"


def gen_random_gpsi(n_groups: int, n_arms: int, n_dims: int, pareto_count: int,
                    epsilon: float, rng, noise: NoiseModel | None = None,
                    budget: int = DEFAULT_REJECTION_BUDGET,
                    label: str = "random-gpsi") -> Instance:
    """Uniform tensors rejected until the Pareto set has the requested size and
    every group gap (optimal and non-optimal) exceeds 3 * epsilon.

    Attempts are scanned in batches — a cheap vectorized filter on Pareto count
    and the non-optimal gaps, then the exact gap oracle on the survivors — but
    accepted in draw order, so results are reproducible for a fixed stream
    regardless of the batch size. The joint constraint is a rare event for
    larger N (about 4e-7 per draw at N=5, K=6, epsilon=0.05), so callers at
    that scale must raise the budget well past the default.
    """
    if not 1 <= pareto_count <= n_groups:
        raise ValueError(f"pareto_count must be in [1, {n_groups}], got {pareto_count}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    gen = _as_generator(rng)
    noise = noise or NoiseModel(INDEPENDENT_GAUSSIAN, 1.0)
    floor = 3.0 * epsilon
    batch = 8192
    attempted = 0
    while attempted < budget:
        b = min(batch, budget - attempted)
        means = gen.uniform(0.0, 1.0, size=(b, n_groups, n_arms, n_dims))
        attempted += b
        R = means.max(axis=2)                                   # (b, N, D)
        strict = (R[:, None, :, :] > R[:, :, None, :]).all(axis=3)  # j dominates i
        optimal = ~strict.any(axis=2)                           # (b, N)
        ok = optimal.sum(axis=1) == pareto_count
        if not ok.any():
            continue
        # non-optimal group gap: max over optimal j of min_d (R_j - R_i)
        m = (R[:, None, :, :] - R[:, :, None, :]).min(axis=3)   # (b, i, j)
        m = np.where(optimal[:, None, :], m, -np.inf)
        gap = m.max(axis=2)                                     # (b, N)
        ok &= np.where(optimal, np.inf, gap).min(axis=1) > floor
        for hit in np.flatnonzero(ok):
            tensor = ArmMeansTensor(means[hit])
            report = gpsi_gaps(tensor, epsilon)
            if len(report.pareto) == pareto_count \
                    and float(np.min(report.group_gaps)) > floor:
                return Instance(tensor, noise, label)
    raise GenerationBudgetError(
        f"no tensor met pareto_count={pareto_count}, gap floor {floor} "
        f"in {budget} attempts",
        attempts=budget,
        diagnostics={"n_groups": n_groups, "n_arms": n_arms, "n_dims": n_dims,
                     "pareto_count": pareto_count, "epsilon": epsilon},
    )


def gen_random_lbgi(n_groups: int, n_arms: int, n_dims: int, w, delta_min: float,
                    rng, noise: NoiseModel | None = None,
                    budget: int = DEFAULT_REJECTION_BUDGET,
                    label: str = "random-lbgi") -> Instance:
    """Uniform tensors rejected until the weighted-best group is unique with gap
    at least delta_min."""
    if delta_min <= 0:
        raise ValueError(f"delta_min must be > 0, got {delta_min}")
    gen = _as_generator(rng)
    noise = noise or NoiseModel(INDEPENDENT_GAUSSIAN, 1.0)
    for attempt in range(budget):
        means = gen.uniform(0.0, 1.0, size=(n_groups, n_arms, n_dims))
        tensor = ArmMeansTensor(means)
        try:
            gaps = lbgi_gaps(tensor, w)
        except NonUniqueOptimumError:
            continue
        if n_groups == 1 or gaps.group_gaps[gaps.best_group] >= delta_min:
            return Instance(tensor, noise, label)
    raise GenerationBudgetError(
        f"no tensor had a unique best group with gap >= {delta_min} "
        f"in {budget} attempts",
        attempts=budget,
        diagnostics={"n_groups": n_groups, "n_arms": n_arms, "n_dims": n_dims,
                     "delta_min": delta_min},
    )


HARD_DEFAULT_A = (0.9, 0.7, 0.7, 0.3, 0.1)


def gen_hard_gpsi(n_groups: int, n_arms: int, n_dims: int, epsilon: float,
                  a_params=HARD_DEFAULT_A, rng=None,
                  label: str = "hard-gpsi") -> Instance:
    """Hard-instance family: two symmetric optimal groups and identical laggards,
    fully-dependent noise. The a-parameters pin the efficiency vectors."""
    a1, a2, a3, a4, a5 = (float(a) for a in a_params)
    checks = [
        (n_groups >= 3, "n_groups >= 3"),
        (n_dims >= 3, "n_dims >= 3"),
        (epsilon > 0, "epsilon > 0"),
        (all(0 < a < 1 for a in (a1, a2, a3, a4, a5)), "all a-parameters in (0, 1)"),
        (a1 > a2, "a1 > a2"),
        (a3 > epsilon, "a3 > epsilon"),
        (a3 - a5 > a2 - a4, "a3 - a5 > a2 - a4"),
        (a2 - a4 > epsilon, "a2 - a4 > epsilon"),
        (a1 - a2 < 2 * (a2 - a4), "a1 - a2 < 2*(a2 - a4)"),
        (a2 > 2 * a4, "a2 > 2*a4"),
        (a1 < 2 * a2, "a1 < 2*a2"),
    ]
    failed = [name for ok, name in checks if not ok]
    if failed:
        raise ValueError(f"hard-instance constraints violated: {', '.join(failed)}")

    gen = _as_generator(rng) if rng is not None else np.random.default_rng(0)
    eff = np.empty((n_groups, n_dims))
    eff[0] = a3
    eff[0, 0], eff[0, 1] = a1, a2
    eff[1] = a3
    eff[1, 0], eff[1, 1] = a2, a1
    eff[2:] = a5
    eff[2:, 0] = eff[2:, 1] = a4

    floor = 2 * a2 - a1  # required lower bound on dims 1, 2 of arms in groups 0, 1
    means = np.empty((n_groups, n_arms, n_dims))
    for i in range(n_groups):
        for d in range(n_dims):
            lo = floor if (i < 2 and d < 2) else 0.0
            means[i, :, d] = gen.uniform(lo, eff[i, d], size=n_arms)
            means[i, d % n_arms, d] = eff[i, d]  # pin one arm to the target maximum
    return Instance(ArmMeansTensor(means), NoiseModel(FULLY_DEPENDENT, 1.0), label)


def kl_fully_dependent(alpha: float) -> float:
    """KL divergence between fully-dependent unit-Gaussian vectors whose means
    differ by alpha in every dimension."""
    return alpha * alpha / 2.0


# ---------------------------------------------------------------------------
# instance JSON round-trip

def instance_to_dict(instance: Instance) -> dict:
    t = instance.tensor
    return {
        "n_groups": t.n_groups,
        "n_arms_per_group": t.n_arms,
        "n_dims": t.n_dims,
        "means": t.means.tolist(),
        "noise": {"kind": instance.noise.kind, "scale": instance.noise.noise_scale},
        "label": instance.label,
        "generator_version": GENERATOR_VERSION,
    }


def instance_from_dict(data: dict) -> Instance:
    means = np.asarray(data["means"], dtype=float)
    expected = (data["n_groups"], data["n_arms_per_group"], data["n_dims"])
    if means.shape != expected:
        raise ValueError(f"means shape {means.shape} does not match header {expected}")
    noise = NoiseModel(data["noise"]["kind"], float(data["noise"]["scale"]))
    return Instance(ArmMeansTensor(means), noise, data.get("label", "instance"))


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
