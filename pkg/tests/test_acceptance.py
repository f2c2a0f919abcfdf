"""End-to-end acceptance suite.

Each test exercises one headline guarantee at desk scale, prints a single
PASS/FAIL line with its measured numbers, and enforces the stated runtime
budget. Group indices in printed sets are 0-based.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from groupbandits import (ExperimentConfig, Instance, NoiseModel, RngStream,
                          ArmMeansTensor, beta, brute_pareto, efficiency,
                          gap_bisection_oracle, gen_hard_gpsi, gen_random_gpsi,
                          gen_random_lbgi, gpsi_gaps, kl_fully_dependent,
                          lbgi_gaps, pareto_set, records_to_csv, run_eecb,
                          run_sweep, run_te)
from groupbandits.harness import PAPER_WEIGHT_VECTORS


ACCEPTANCE_LINES: list = []


def _report(name: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, f"{name}: {detail}"


class TestAcceptance:
    def test_oracle_equivalence(self):
        start = time.perf_counter()
        rng = np.random.default_rng(0)
        mismatches = 0
        for _ in range(10_000):
            n = int(rng.integers(1, 21))
            d = int(rng.integers(1, 7))
            R = rng.uniform(0, 1, (n, d))
            eps = float(rng.uniform(0, 0.2))
            if pareto_set(R, eps) != brute_pareto(R, eps):
                mismatches += 1
        elapsed = time.perf_counter() - start
        _report("oracle-equivalence",
                mismatches == 0 and elapsed < 10.0,
                f"10000 matrices, {mismatches} mismatches, {elapsed:.1f}s "
                "(budget 10s)")

    def test_gap_semantics(self):
        start = time.perf_counter()
        rng = np.random.default_rng(1)
        w = np.array([1.0, 2.0])
        checked, worst = 0, 0.0
        for _ in range(1000):
            t = ArmMeansTensor(rng.uniform(0, 1, (3, 2, 2)))
            R = efficiency(t)
            gpsi = gpsi_gaps(t, 0.05)
            for i in range(3):
                if i in gpsi.pareto:
                    continue
                oracle = gap_bisection_oracle(R, "group-pareto-gap", i)
                worst = max(worst, abs(oracle - gpsi.group_gaps[i]))
                checked += 1
            lbgi = lbgi_gaps(t, w)
            for i in range(3):
                if i == lbgi.best_group:
                    continue
                for j in range(2):
                    oracle = gap_bisection_oracle((t, w), "arm-alpha", (i, j))
                    worst = max(worst, abs(oracle - lbgi.arm_alphas[i, j]))
                    checked += 1
        elapsed = time.perf_counter() - start
        _report("gap-semantics",
                worst < 1e-9,
                f"1000 instances, {checked} gaps vs bisection oracle, "
                f"max |closed-form - oracle| = {worst:.2e} (tolerance 1e-9), "
                f"{elapsed:.1f}s")

    def test_refined_gap_dominance(self):
        rng = np.random.default_rng(2)
        w = np.array([1.0, 2.0, 0.5])
        strict, total, violations = 0, 0, 0
        for _ in range(1000):
            t = ArmMeansTensor(rng.uniform(0, 1, (4, 3, 3)))
            rep = lbgi_gaps(t, w)
            base = rep.arm_gaps / 3.0
            finite = np.isfinite(rep.arm_gaps)
            total += int(finite.sum())
            violations += int((rep.refined_arm_gaps[finite]
                               < base[finite] - 1e-12).sum())
            strict += int((rep.refined_arm_gaps[finite]
                           > base[finite] + 1e-12).sum())
        _report("refined-gap-dominance",
                violations == 0,
                f"1000 instances, {total} arms, refined >= gap/D everywhere "
                f"({violations} violations), strictly larger for {strict} arms")

    def test_te_delta_correctness(self):
        start = time.perf_counter()

        def one(rep):
            inst = gen_random_gpsi(3, 2, 2, 1, 0.05, RngStream(10_000 + rep, 0))
            res = run_te(inst, 0.1, 0.05, rng=RngStream(10_000 + rep, 1))
            R = efficiency(inst.tensor)
            return pareto_set(R, 0.0) <= res.recommended <= pareto_set(R, 0.05)

        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(one, range(200)))
        failures = results.count(False)
        elapsed = time.perf_counter() - start
        _report("te-delta-correctness",
                failures == 0 and elapsed < 300.0,
                f"200 runs at delta=0.1, {failures} failures "
                f"(PAC budget 20), {elapsed:.0f}s (budget 300s)")

    def test_eecb_delta_correctness(self):
        start = time.perf_counter()
        w = np.array([1.0, 2.0])

        def one(rep):
            inst = gen_random_lbgi(3, 3, 2, w, 0.05, RngStream(20_000 + rep, 0))
            res = run_eecb(inst, w, 0.1, rng=RngStream(20_000 + rep, 1))
            return res.recommended == lbgi_gaps(inst.tensor, w).best_group

        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(one, range(200)))
        failures = results.count(False)
        elapsed = time.perf_counter() - start
        _report("eecb-delta-correctness",
                failures == 0 and elapsed < 300.0,
                f"200 runs at delta=0.1, {failures} failures "
                f"(PAC budget 20), {elapsed:.0f}s (budget 300s)")

    def test_deterministic_traces(self):
        base = gen_hard_gpsi(4, 2, 3, 0.05)
        inst = Instance(base.tensor, NoiseModel("fully_dependent", 0.0),
                        base.label)
        te = run_te(inst, 0.1, 0.05)
        R = efficiency(inst.tensor)
        te_ok = te.recommended == {0, 1} == pareto_set(R, 0.0)
        # weights making the first group uniquely best
        w = np.array([3.0, 2.0, 1.0])
        eecb = run_eecb(inst, w, 0.1)
        eecb_ok = eecb.recommended == 0 == lbgi_gaps(inst.tensor, w).best_group
        _report("deterministic-traces",
                te_ok and eecb_ok,
                f"zero-noise hard instance: pareto run -> {sorted(te.recommended)} "
                f"(want [0, 1]), weighted run -> {eecb.recommended} (want 0); "
                "both equal the closed-form oracles")

    def test_figure1_ordering(self):
        start = time.perf_counter()
        cfg = ExperimentConfig(preset="vary_n",
                               algorithms=["te", "age", "ge", "unis"],
                               grid=[3, 4, 5], delta=0.1, epsilon=0.05,
                               replications=10, master_seed=1, workers=4)
        records, summary = run_sweep(cfg)
        means = {(s["grid_point"], s["algorithm"]): s["mean"] for s in summary}
        lines, ok = [], True
        for n in (3, 4, 5):
            te, age, ge, unis = (means[(f"N={n}", a)]
                                 for a in ("te", "age", "ge", "unis"))
            ok &= te <= age <= ge <= unis
            lines.append(f"N={n}: {te:.0f} <= {age:.0f} <= {ge:.0f} <= {unis:.0f}")
        correct = all(r.correct for r in records)
        elapsed = time.perf_counter() - start
        _report("figure1-ordering",
                ok and correct and elapsed < 900.0,
                "; ".join(lines) + f"; all correct={correct}, "
                f"{elapsed:.0f}s (budget 900s)")

    def test_table1_properties(self):
        start = time.perf_counter()
        cfg = ExperimentConfig(preset="weight_sweep",
                               algorithms=["eecb", "tel"],
                               grid=[list(w) for w in PAPER_WEIGHT_VECTORS],
                               delta=0.1, replications=5, master_seed=0,
                               n_groups=5, n_arms=5, n_dims=3, workers=4)
        records, summary = run_sweep(cfg)
        means = {(s["grid_point"], s["algorithm"]): s["mean"] for s in summary}
        tel = [means[(f"w{i + 1}", "tel")] for i in range(5)]
        eecb = [means[(f"w{i + 1}", "eecb")] for i in range(5)]
        constant = len(set(tel)) == 1
        dominated = all(e < t for e, t in zip(eecb, tel))
        correct = all(r.correct for r in records)
        elapsed = time.perf_counter() - start
        _report("table1-properties",
                constant and dominated and correct and elapsed < 1200.0,
                f"weighted-baseline means {['%.0f' % t for t in tel]} "
                f"(constant={constant}); per-weight means "
                f"{['%.0f' % e for e in eecb]} all < baseline={dominated}; "
                f"all correct={correct}, {elapsed:.0f}s (budget 1200s)")

    def test_confidence_schedule(self):
        grid = [(2, 2, 2, 0.1), (5, 6, 3, 0.1), (10, 4, 2, 0.05),
                (3, 3, 3, 0.01)]
        ok = True
        for delta_gap in (0.05, 0.1, 0.3, 1.0):
            for n, k, d, delta in grid:
                r = math.ceil(30.0 * math.log(n * k * d / (delta * delta_gap))
                              / delta_gap ** 2)
                ok &= beta(r, delta, n, k, d) < delta_gap
        from groupbandits import beta_array
        vals = beta_array(np.arange(1, 1_000_001), 0.1, 5, 6, 3)
        monotone = bool(np.all(np.diff(vals) < 0))
        _report("confidence-schedule",
                ok and monotone,
                f"16 (gap, shape) pairs satisfy the round bound; radius "
                f"strictly decreasing over r in [1, 1e6]: {monotone}")

    def test_kl_lemma(self):
        exact = all(kl_fully_dependent(a) == a * a / 2.0
                    for a in (0.0, 0.1, 0.2, 1.0))
        alpha, n = 0.2, 10 ** 6
        gen = RngStream(0, 0).generator()
        x = alpha + gen.standard_normal(n)
        llr = alpha * x - alpha * alpha / 2.0
        err = abs(float(llr.mean()) - kl_fully_dependent(alpha))
        se = alpha / math.sqrt(n)
        _report("kl-lemma",
                exact and err <= 3.0 * se,
                f"closed form exact at 4 points; MC estimate off by {err:.2e} "
                f"<= 3 SE = {3 * se:.2e}")

    def test_csv_determinism(self, tmp_path):
        inst = gen_random_gpsi(2, 2, 2, 1, 0.05, RngStream(0, 0))
        from groupbandits import save_instance
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        outputs = []
        for workers in (1, 3, 1):
            cfg = ExperimentConfig(preset="custom",
                                   algorithms=["te", "age", "ge", "unis"],
                                   grid=[str(path)], replications=3,
                                   master_seed=0, workers=workers)
            records, _ = run_sweep(cfg)
            outputs.append(records_to_csv(records).encode())
        identical = outputs[0] == outputs[1] == outputs[2]
        _report("csv-determinism",
                identical,
                f"3 runs (worker pools 1/3/1) produced byte-identical CSV "
                f"({len(outputs[0])} bytes): {identical}")
