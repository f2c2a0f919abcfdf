import numpy as np
import pytest

from groupbandits import (ArmMeansTensor, Instance, NoiseModel, RngStream,
                          RoundBudgetError, eecb_schedule_property, lbgi_gaps,
                          gen_random_lbgi, run_eecb)


def noiseless(means):
    return Instance(ArmMeansTensor(np.asarray(means, dtype=float)),
                    NoiseModel("independent_gaussian", 0.0), "noiseless")


def clear_instance():
    # group 0 clearly best under w = (1, 2)
    return noiseless([[[0.9, 0.9], [0.2, 0.1]],
                      [[0.5, 0.4], [0.3, 0.3]],
                      [[0.2, 0.2], [0.1, 0.1]]])


W = np.array([1.0, 2.0])


class TestTermination:
    def test_noiseless_recovers_best(self):
        res = run_eecb(clear_instance(), W, 0.1)
        assert res.recommended == lbgi_gaps(clear_instance().tensor, W).best_group

    def test_random_noiseless_recovers_best(self):
        for seed in range(5):
            base = gen_random_lbgi(3, 2, 2, W, 0.05, RngStream(seed, 0))
            inst = Instance(base.tensor,
                            NoiseModel("independent_gaussian", 0.0), "x")
            res = run_eecb(inst, W, 0.1)
            assert res.recommended == lbgi_gaps(base.tensor, W).best_group

    def test_accounting(self):
        res = run_eecb(clear_instance(), W, 0.1, rng=RngStream(0, 1))
        assert res.total_pulls == int(res.per_arm_pulls.sum())
        assert res.per_arm_pulls.min() >= 1  # initialization pulls everyone once

    def test_round_budget_error(self):
        inst = gen_random_lbgi(3, 3, 2, W, 0.05, RngStream(0, 0))
        with pytest.raises(RoundBudgetError) as exc:
            run_eecb(inst, W, 0.1, rng=RngStream(0, 1), max_rounds=5)
        assert exc.value.partial is not None
        assert len(exc.value.partial.active_groups) > 1


class TestDeterminism:
    def test_seed_determinism(self):
        inst = gen_random_lbgi(3, 3, 2, W, 0.05, RngStream(2, 0))
        a = run_eecb(inst, W, 0.1, rng=RngStream(7, 1))
        b = run_eecb(inst, W, 0.1, rng=RngStream(7, 1))
        assert a.recommended == b.recommended
        assert a.total_pulls == b.total_pulls
        assert np.array_equal(a.per_arm_pulls, b.per_arm_pulls)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_blocked_equals_sequential(self, seed):
        inst = gen_random_lbgi(3, 2, 2, W, 0.1, RngStream(seed, 0))
        fast = run_eecb(inst, W, 0.1, rng=RngStream(seed, 5), trace=True)
        slow = run_eecb(inst, W, 0.1, rng=RngStream(seed, 5), trace=True,
                        collect_states=True)  # forces single-round blocks
        assert fast.recommended == slow.recommended
        assert fast.rounds == slow.rounds
        assert np.array_equal(fast.per_arm_pulls, slow.per_arm_pulls)
        assert fast.trace == slow.trace


class TestSchedule:
    def test_focus_schedule_property(self):
        inst = gen_random_lbgi(3, 2, 2, W, 0.1, RngStream(3, 0))
        res = run_eecb(inst, W, 0.1, rng=RngStream(3, 5), trace=True)
        report = eecb_schedule_property(res.trace, W, 0.1, 3, 2, 2)
        assert report["ok"] and report["focus_events"] > 0

    def test_no_anomalies_on_good_event(self):
        res = run_eecb(clear_instance(), W, 0.1, trace=True)
        assert not [e for e in res.trace if e["event"] == "anomaly"]


class TestStates:
    def test_monotone_groups_and_counts(self):
        inst = gen_random_lbgi(3, 2, 2, W, 0.1, RngStream(5, 0))
        res = run_eecb(inst, W, 0.1, rng=RngStream(5, 5), collect_states=True)
        prev_groups = set(range(3))
        prev_counts = np.ones((3, 2), dtype=np.int64)
        for state in res.states:
            assert state.active_groups <= prev_groups
            assert np.all(state.pull_counts >= prev_counts)
            prev_groups, prev_counts = state.active_groups, state.pull_counts


class TestValidation:
    def test_bad_delta(self):
        with pytest.raises(ValueError):
            run_eecb(clear_instance(), W, 0.0)

    def test_bad_beta_scale(self):
        with pytest.raises(ValueError):
            run_eecb(clear_instance(), W, 0.1, beta_scale=0.0)

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            run_eecb(clear_instance(), np.array([1.0, -2.0]), 0.1)
        with pytest.raises(ValueError):
            run_eecb(clear_instance(), np.array([1.0]), 0.1)
