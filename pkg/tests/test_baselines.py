import math

import numpy as np
import pytest

from groupbandits import (ArmMeansTensor, Instance, NoiseModel, RngStream,
                          TEL_EPSILON, efficiency, gen_hard_gpsi, lbgi_gaps,
                          pareto_set, run_age, run_eecb, run_ge, run_te,
                          run_tel, run_unis, unis_pull_count)


def hard_noiseless():
    inst = gen_hard_gpsi(4, 2, 3, 0.05)
    return Instance(inst.tensor, NoiseModel("fully_dependent", 0.0), inst.label)


class TestSimplifiedEliminators:
    def test_age_never_resolves_dims(self):
        res = run_age(hard_noiseless(), 0.1, 0.05, rng=RngStream(0, 1), trace=True)
        assert not [e for e in res.trace if e["event"] == "resolve_dim"]
        assert res.recommended == {0, 1}

    def test_ge_only_rejects_and_accepts(self):
        res = run_ge(hard_noiseless(), 0.1, 0.05, rng=RngStream(0, 1), trace=True)
        kinds = {e["event"] for e in res.trace}
        assert kinds <= {"reject_group", "accept_group"}
        assert res.recommended == {0, 1}

    def test_ge_pulls_every_arm_every_round(self):
        res = run_ge(hard_noiseless(), 0.1, 0.05, rng=RngStream(0, 1))
        # a group's arms all share that group's exit round as their count
        for i in range(4):
            assert len(set(res.per_arm_pulls[i].tolist())) == 1

    def test_matched_noise_orders_pulls(self):
        # identical streams: TE and AGE coincide until a dimension resolves,
        # AGE and GE until an arm is eliminated
        inst = gen_hard_gpsi(4, 2, 3, 0.05)
        te = run_te(inst, 0.1, 0.05, rng=RngStream(11, 3))
        age = run_age(inst, 0.1, 0.05, rng=RngStream(11, 3))
        ge = run_ge(inst, 0.1, 0.05, rng=RngStream(11, 3))
        assert te.total_pulls <= age.total_pulls <= ge.total_pulls


class TestUnis:
    def test_pull_count_formula(self):
        r0 = unis_pull_count(5, 6, 3, 0.01, 0.01)
        assert r0 == math.ceil((8 / 0.01 ** 2) * math.log(2 * 90 / 0.01))
        assert r0 == 783_851

    def test_uniform_budget(self):
        inst = hard_noiseless()
        res = run_unis(inst, 0.1, 0.05, rng=RngStream(0, 1))
        r0 = unis_pull_count(4, 2, 3, 0.05, 0.1)
        assert np.all(res.per_arm_pulls == r0)
        assert res.total_pulls == 8 * r0
        assert res.rounds == r0

    def test_noiseless_recommendation(self):
        inst = hard_noiseless()
        res = run_unis(inst, 0.1, 0.05)
        R = efficiency(inst.tensor)
        # laggard groups have estimated gap 0.4 > epsilon: excluded exactly
        assert res.recommended == pareto_set(R, 0.0) == {0, 1}

    def test_validation(self):
        with pytest.raises(ValueError):
            run_unis(hard_noiseless(), 0.1, 0.0)
        with pytest.raises(ValueError):
            run_unis(hard_noiseless(), 1.0, 0.05)


class TestTel:
    def tensor(self):
        rng = np.random.default_rng(8)
        return ArmMeansTensor(rng.uniform(0, 1, (3, 2, 2)))

    def instance(self):
        return Instance(self.tensor(), NoiseModel("independent_gaussian", 1.0), "x")

    def test_trace_is_weight_independent(self):
        inst = self.instance()
        a = run_tel(inst, np.array([1.0, 1.0]), 0.1, rng=RngStream(1, 2))
        b = run_tel(inst, np.array([9.0, 0.1]), 0.1, rng=RngStream(1, 2))
        assert a.total_pulls == b.total_pulls
        assert np.array_equal(a.per_arm_pulls, b.per_arm_pulls)

    def test_winner_maximizes_weighted_estimate(self):
        inst = self.instance()
        w = np.array([1.0, 3.0])
        res = run_tel(inst, w, 0.1, rng=RngStream(1, 2))
        scores = res.efficiency_estimates @ w
        finite = np.flatnonzero(np.isfinite(scores))
        assert res.recommended in finite
        assert scores[res.recommended] == max(scores[i] for i in finite)

    def test_te_result_reuse_is_identical(self):
        inst = self.instance()
        w = np.array([2.0, 1.0])
        te_res = run_te(inst, 0.1, TEL_EPSILON, rng=RngStream(4, 0))
        direct = run_tel(inst, w, 0.1, rng=RngStream(4, 0))
        reused = run_tel(inst, w, 0.1, te_result=te_res)
        assert direct.recommended == reused.recommended
        assert direct.total_pulls == reused.total_pulls

    def test_noiseless_matches_oracle(self):
        t = self.tensor()
        inst = Instance(t, NoiseModel("independent_gaussian", 0.0), "x")
        w = np.array([1.0, 2.0])
        assert run_tel(inst, w, 0.1).recommended == lbgi_gaps(t, w).best_group

    def test_eecb_beats_tel(self):
        inst = self.instance()
        w = np.array([1.0, 2.0])
        eecb = run_eecb(inst, w, 0.1, rng=RngStream(6, 0))
        tel = run_tel(inst, w, 0.1, rng=RngStream(6, 0))
        assert eecb.total_pulls < tel.total_pulls
