"""Reproducible experiment sweeps: instance generation per grid point, seeded
replications, CSV/JSON persistence.

Replications are independent tasks with their own RNG streams; records are
sorted before writing so the output does not depend on the worker-pool size.
The wall-clock column is kept out of the CSV to preserve byte-identical
reruns.
"""

from __future__ import annotations

import json
import math
import threading
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .baselines import TEL_EPSILON, run_age, run_ge, run_tel, run_unis
from .core import ArmMeansTensor, efficiency, gpsi_gaps, lbgi_gaps, pareto_set
from .environment import (Instance, NoiseModel, RngStream, gen_random_gpsi,
                          load_instance, save_instance)
from .errors import GenerationBudgetError, NonUniqueOptimumError, RoundBudgetError
from .gpsi import DEFAULT_MAX_ROUNDS, run_te
from .lbgi import run_eecb

GPSI_ALGORITHMS = ("te", "age", "ge", "unis")
LBGI_ALGORITHMS = ("eecb", "tel")

PAPER_WEIGHT_VECTORS = (
    (0.1, 0.1, 1.0),
    (1.0, 1.0, 0.1),
    (0.1, 1.0, 1.0),
    (1.0, 1.0, 1.0),
    (1.0, 2.0, 3.0),
)

CSV_COLUMNS = ("grid_point", "algorithm", "preset", "instance_label", "seed",
               "N", "K", "D", "epsilon", "delta", "beta_scale",
               "stopping_time", "rounds", "correct")


@dataclass
class ExperimentConfig:
    preset: str
    algorithms: list
    grid: list
    delta: float = 0.1
    epsilon: float = 0.05
    beta_scale: float = 1.0
    replications: int = 20
    master_seed: int = 0
    output_dir: str | None = None
    workers: int = 1
    n_groups: int = 5
    n_arms: int = 6
    n_dims: int = 3
    pareto_count: int | None = None
    delta_min: float = 0.05
    weights: list | None = None   # weight vector for linear algorithms on custom grids
    max_rounds: int = DEFAULT_MAX_ROUNDS
    regenerate_per_replication: bool = False

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.grid:
            raise ValueError("grid must be non-empty")
        if self.preset not in ("vary_n", "vary_k", "weight_sweep", "custom"):
            raise ValueError(f"unknown preset: {self.preset!r}")
        problem = _preset_problem(self.preset, self.algorithms)
        valid = GPSI_ALGORITHMS if problem == "gpsi" else LBGI_ALGORITHMS
        bad = [a for a in self.algorithms if a not in valid]
        if bad:
            raise ValueError(f"algorithms {bad} not valid for a {problem} preset")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def _preset_problem(preset: str, algorithms) -> str:
    if preset in ("vary_n", "vary_k"):
        return "gpsi"
    if preset == "weight_sweep":
        return "lbgi"
    # custom: inferred from the algorithm list, which must be single-problem
    if all(a in GPSI_ALGORITHMS for a in algorithms):
        return "gpsi"
    if all(a in LBGI_ALGORITHMS for a in algorithms):
        return "lbgi"
    raise ValueError("custom sweeps cannot mix Pareto and linear algorithms")


@dataclass
class ExperimentRecord:
    grid_point: str
    algorithm: str
    preset: str
    instance_label: str
    seed: int
    N: int
    K: int
    D: int
    epsilon: float
    delta: float
    beta_scale: float
    stopping_time: int
    rounds: int
    correct: bool
    wall_clock_ms: float


def stream_index(replication: int) -> int:
    """Stable stream id for a replication, shared by every algorithm at the
    same replication (common random numbers): paired algorithms see identical
    reward noise, so mean comparisons are pathwise-coupled rather than
    independently noisy, and weight-independent algorithms produce identical
    traces on matched seeds."""
    return zlib.crc32(f"rep:{replication}".encode()) & 0x7FFFFFFF


def _ceil_30pct(n: int) -> int:
    return math.ceil(0.3 * n)


def _grid_label(config: ExperimentConfig, idx: int, value) -> str:
    if config.preset == "vary_n":
        return f"N={value}"
    if config.preset == "vary_k":
        return f"K={value}"
    if config.preset == "weight_sweep":
        return f"w{idx + 1}"
    return str(value)


# Pareto-gap floor for weight-sweep tensors: low enough that the weight-
# agnostic baseline pays a visibly larger bill than the weighted algorithm
# (its cost scales with 1/gap^2), high enough that it still terminates in
# desk-scale time.
WEIGHT_SWEEP_PARETO_FLOOR = 0.02


def _generate_weight_sweep_instance(config: ExperimentConfig) -> Instance:
    """One tensor valid for every weight vector of the sweep: unique best group
    with gap >= delta_min under each, and Pareto group gaps at least
    WEIGHT_SWEEP_PARETO_FLOOR so the weight-agnostic baseline terminates in
    reasonable time without being artificially cheap."""
    gen = RngStream(config.master_seed, 0).generator()
    n, k, d = config.n_groups, config.n_arms, config.n_dims
    for _ in range(100_000):
        means = gen.uniform(0.0, 1.0, size=(n, k, d))
        tensor = ArmMeansTensor(means)
        try:
            ok = all(
                lbgi_gaps(tensor, np.asarray(w, dtype=float)).group_gaps[
                    lbgi_gaps(tensor, np.asarray(w, dtype=float)).best_group]
                >= config.delta_min
                for w in config.grid
            )
        except NonUniqueOptimumError:
            continue
        if not ok:
            continue
        if float(np.min(gpsi_gaps(tensor, TEL_EPSILON).group_gaps)) \
                < WEIGHT_SWEEP_PARETO_FLOOR:
            continue
        return Instance(tensor, NoiseModel("independent_gaussian", 1.0),
                        f"weight-sweep-N{n}K{k}D{d}-seed{config.master_seed}")
    raise GenerationBudgetError("no weight-sweep tensor found", attempts=100_000)


def _make_instance(config: ExperimentConfig, idx: int, value,
                   shared: Instance | None, gen_stream: int = 0,
                   label_suffix: str = "") -> Instance:
    rng = RngStream(config.master_seed, gen_stream)
    # the joint gap floor is a rare event at N=5, K=6: give the rejection
    # sampler far more than the stand-alone default budget
    budget = 40_000_000
    if config.preset == "vary_n":
        n = int(value)
        pc = config.pareto_count or _ceil_30pct(n)
        return gen_random_gpsi(
            n, config.n_arms, config.n_dims, pc, config.epsilon, rng,
            budget=budget,
            label=f"vary_n-N{n}-seed{config.master_seed}{label_suffix}")
    if config.preset == "vary_k":
        k = int(value)
        pc = config.pareto_count or 2
        return gen_random_gpsi(
            config.n_groups, k, config.n_dims, pc, config.epsilon, rng,
            budget=budget,
            label=f"vary_k-K{k}-seed{config.master_seed}{label_suffix}")
    if config.preset == "weight_sweep":
        return shared
    return load_instance(value)


def _judge_gpsi(instance: Instance, recommended: set, epsilon: float) -> bool:
    R = efficiency(instance.tensor)
    return pareto_set(R, 0.0) <= recommended <= pareto_set(R, epsilon)


class _TelCache:
    """Memoized triple-elimination runs for the weighted baseline; its sampling
    trace is weight-independent, so matched seeds share one run."""

    def __init__(self):
        self._lock = threading.Lock()
        self._runs = {}

    def get(self, instance, delta, beta_scale, max_rounds, stream):
        key = (id(instance), delta, beta_scale, max_rounds,
               stream.master_seed, stream.stream_index)
        with self._lock:
            if key not in self._runs:
                self._runs[key] = run_te(instance, delta, TEL_EPSILON, beta_scale,
                                         stream, max_rounds)
            return self._runs[key]


def _run_one(config: ExperimentConfig, grid_label: str, value, instance: Instance,
             algorithm: str, replication: int, tel_cache: _TelCache):
    stream = RngStream(config.master_seed, stream_index(replication))
    start = time.perf_counter()
    t = instance.tensor
    eps_used = config.epsilon
    # weight_sweep grids enumerate weight vectors; custom grids enumerate
    # instances and share one weight vector from the config
    wvec = value if config.preset == "weight_sweep" else config.weights
    try:
        if algorithm == "te":
            res = run_te(instance, config.delta, config.epsilon, config.beta_scale,
                         stream, config.max_rounds)
        elif algorithm == "age":
            res = run_age(instance, config.delta, config.epsilon, config.beta_scale,
                          stream, config.max_rounds)
        elif algorithm == "ge":
            res = run_ge(instance, config.delta, config.epsilon, config.beta_scale,
                         stream, config.max_rounds)
        elif algorithm == "unis":
            res = run_unis(instance, config.delta, config.epsilon, stream)
        elif algorithm == "eecb":
            eps_used = 0.0
            res = run_eecb(instance, np.asarray(wvec, dtype=float), config.delta,
                           config.beta_scale, stream, config.max_rounds)
        elif algorithm == "tel":
            eps_used = TEL_EPSILON
            te_res = tel_cache.get(instance, config.delta, config.beta_scale,
                                   config.max_rounds, stream)
            res = run_tel(instance, np.asarray(wvec, dtype=float), config.delta,
                          config.beta_scale, te_result=te_res)
        else:
            raise ValueError(f"unknown algorithm: {algorithm!r}")
        if algorithm in GPSI_ALGORITHMS:
            correct = _judge_gpsi(instance, res.recommended, config.epsilon)
        else:
            correct = res.recommended == lbgi_gaps(
                t, np.asarray(wvec, dtype=float)).best_group
        stopping, rounds = res.total_pulls, res.rounds
    except RoundBudgetError as exc:
        correct = False
        rounds = config.max_rounds
        stopping = int(exc.partial.pull_counts.sum()) if exc.partial is not None else 0
    wall = (time.perf_counter() - start) * 1000.0
    return ExperimentRecord(
        grid_point=grid_label, algorithm=algorithm, preset=config.preset,
        instance_label=instance.label, seed=stream.stream_index,
        N=t.n_groups, K=t.n_arms, D=t.n_dims,
        epsilon=eps_used, delta=config.delta, beta_scale=config.beta_scale,
        stopping_time=stopping, rounds=rounds, correct=correct,
        wall_clock_ms=wall)


def run_sweep(config: ExperimentConfig):
    """Returns (records, summary). Deterministic for a fixed config regardless
    of worker count."""
    shared = None
    if config.preset == "weight_sweep":
        shared = _generate_weight_sweep_instance(config)
    regen = config.regenerate_per_replication \
        and config.preset in ("vary_n", "vary_k")

    grid_points = []
    for idx, value in enumerate(config.grid):
        label = _grid_label(config, idx, value)
        instance = None if regen else _make_instance(config, idx, value, shared)
        grid_points.append((idx, label, value, instance))

    tel_cache = _TelCache()
    tasks = [(gi, label, value, instance, algorithm, rep)
             for gi, label, value, instance in grid_points
             for algorithm in config.algorithms
             for rep in range(config.replications)]

    regen_cache = {}
    regen_lock = threading.Lock()

    def rep_instance(gi, value, rep) -> Instance:
        # fresh draw per replication, shared by all algorithms of that rep
        with regen_lock:
            if (gi, rep) not in regen_cache:
                gen_stream = zlib.crc32(f"gen:{rep}".encode()) & 0x7FFFFFFF
                regen_cache[(gi, rep)] = _make_instance(
                    config, gi, value, None, gen_stream, f"-rep{rep}")
            return regen_cache[(gi, rep)]

    def work(task):
        gi, label, value, instance, algorithm, rep = task
        if regen:
            instance = rep_instance(gi, value, rep)
        record = _run_one(config, label, value, instance, algorithm, rep, tel_cache)
        return (gi, config.algorithms.index(algorithm), rep), record

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            keyed = list(pool.map(work, tasks))
    else:
        keyed = [work(t) for t in tasks]
    keyed.sort(key=lambda kr: kr[0])
    records = [r for _, r in keyed]

    summary = []
    for gi, label, value, instance in grid_points:
        for algorithm in config.algorithms:
            times = [r.stopping_time for r in records
                     if r.grid_point == label and r.algorithm == algorithm]
            mean = float(np.mean(times))
            std = float(np.std(times, ddof=1)) if len(times) > 1 else 0.0
            summary.append({"grid_point": label, "algorithm": algorithm,
                            "mean": mean, "std": std, "n": len(times)})

    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "instances").mkdir(exist_ok=True)
        all_instances = [inst for _, _, _, inst in grid_points if inst is not None]
        all_instances += list(regen_cache.values())
        seen = set()
        for instance in sorted(all_instances, key=lambda i: i.label):
            if instance.label not in seen:
                seen.add(instance.label)
                save_instance(instance, out / "instances" / f"{instance.label}.json")
        write_records_csv(records, out / "results.csv")
        with open(out / "summary.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return records, summary


def records_to_csv(records) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        row = [getattr(r, c) for c in CSV_COLUMNS]
        lines.append(",".join(
            str(v).lower() if isinstance(v, bool) else repr(v) if isinstance(v, float)
            else str(v) for v in row))
    return "\n".join(lines) + "\n"


def write_records_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(records_to_csv(records))
