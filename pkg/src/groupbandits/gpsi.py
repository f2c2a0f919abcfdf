"""Triple-elimination family for group Pareto set identification.

The per-round semantics follow the pseudo-code strictly (pull, group rejection,
dimension elimination, arm elimination, acceptance). For speed the engine scans
blocks of rounds vectorized: inside a block the active sets cannot change until
the first round where some elimination/acceptance condition fires, so the scan
locates that round and replays it alone with exact sequential phase order;
noise drawn past that round is returned to a buffered source, so blocked and
round-by-round execution consume the identical reward stream.
Elimination conditions within a phase are evaluated simultaneously against the
round's estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import beta_array
from .environment import Instance, NoiseSource, RngStream
from .errors import RoundBudgetError

DEFAULT_MAX_ROUNDS = 10_000_000


@dataclass
class TeState:
    """Snapshot of the elimination state after a round has been processed."""

    active_groups: set
    active_dims: dict            # group -> set of dims
    active_arms: dict            # (group, dim) -> set of arms
    frozen_dim_values: dict      # (group, dim) -> adhered efficiency estimate
    empirical_tensor: np.ndarray
    pull_counts: np.ndarray
    accepted: set
    round: int


@dataclass
class GpsiResult:
    recommended: set
    total_pulls: int
    per_arm_pulls: np.ndarray
    rounds: int
    trace: list | None = None
    efficiency_estimates: np.ndarray | None = None  # (N, D) estimates at group exit
    states: list | None = None


class _TeEngine:
    def __init__(self, instance: Instance, delta: float, epsilon: float,
                 beta_scale: float, rng, max_rounds: int,
                 dim_elimination: bool, arm_elimination: bool,
                 trace: bool, collect_states: bool):
        if not 0 < delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        if epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {epsilon}")
        if beta_scale <= 0:
            raise ValueError(f"beta_scale must be > 0, got {beta_scale}")
        t = instance.tensor
        self.instance = instance
        self.N, self.K, self.D = t.n_groups, t.n_arms, t.n_dims
        self.delta, self.epsilon, self.beta_scale = delta, epsilon, beta_scale
        self.src = NoiseSource(instance, rng if rng is not None else RngStream(0))
        self.max_rounds = max_rounds
        self.dim_elimination = dim_elimination
        self.arm_elimination = arm_elimination
        self.events = [] if trace else None
        self.states = [] if collect_states else None

        self.sums = np.zeros((self.N, self.K, self.D))
        self.counts = np.zeros((self.N, self.K), dtype=np.int64)
        self.mu = np.zeros((self.N, self.K, self.D))
        self.in_g = np.ones(self.N, dtype=bool)
        self.accepted = np.zeros(self.N, dtype=bool)
        self.dim_act = np.ones((self.N, self.D), dtype=bool)
        self.arm_act = np.ones((self.N, self.D, self.K), dtype=bool)
        self.frozen = np.full((self.N, self.D), np.nan)
        self.frozen_mask = np.zeros((self.N, self.D), dtype=bool)
        self.exit_eff = np.full((self.N, self.D), np.nan)
        self.r = 1
        if collect_states:
            self.block_cap = 1
        else:
            self.block_cap = int(np.clip(2 ** 21 // max(self.N * self.K * self.D, 1),
                                         64, 8192))

    # -- helpers ------------------------------------------------------------

    def _emit(self, round_no, event, payload):
        if self.events is not None:
            self.events.append({"round": round_no, "event": event, "payload": payload})

    def _pullable(self):
        return self.in_g[:, None] & (self.dim_act[:, :, None] & self.arm_act).any(axis=1)

    def _current_rhat(self):
        rhat = self.mu.max(axis=1)
        rhat[self.frozen_mask] = self.frozen[self.frozen_mask]
        return rhat

    def _snapshot(self):
        active_groups = set(np.flatnonzero(self.in_g).tolist())
        active_dims = {i: set(np.flatnonzero(self.dim_act[i]).tolist())
                       for i in active_groups}
        active_arms = {(i, d): set(np.flatnonzero(self.arm_act[i, d]).tolist())
                       for i in active_groups for d in active_dims[i]}
        frozen_vals = {(i, d): float(self.frozen[i, d])
                       for i in active_groups
                       for d in np.flatnonzero(self.frozen_mask[i]).tolist()}
        return TeState(active_groups, active_dims, active_arms, frozen_vals,
                       self.mu.copy(), self.counts.copy(),
                       set(np.flatnonzero(self.accepted).tolist()), self.r)

    # -- block scan ---------------------------------------------------------

    def run(self) -> GpsiResult:
        eps, scale = self.epsilon, self.beta_scale
        while self.in_g.any():
            if self.r > self.max_rounds:
                raise RoundBudgetError(
                    f"max_rounds={self.max_rounds} exceeded", partial=self._snapshot())
            pull_mask = self._pullable()
            arms = [(int(i), int(j)) for i, j in zip(*np.nonzero(pull_mask))]
            n_pull = len(arms)
            B = min(self.block_cap, self.max_rounds - self.r + 1)

            if n_pull:
                base_counts = self.counts[pull_mask]
                # every pullable arm has been pulled in every round so far
                assert np.all(base_counts == self.r - 1)
                draws = self.src.block(arms, B)
                # fold the entry sums into the cumulative sum so the float
                # accumulation order matches one-round-at-a-time execution
                sum_path = np.cumsum(
                    np.concatenate([self.sums[pull_mask][None], draws], axis=0),
                    axis=0)[1:]
                denom = (self.r - 1 + np.arange(1, B + 1, dtype=float))
                mu_path = sum_path / denom[:, None, None]
                mu_all = np.broadcast_to(self.mu, (B,) + self.mu.shape).copy()
                ii = np.array([a[0] for a in arms])
                jj = np.array([a[1] for a in arms])
                mu_all[:, ii, jj, :] = mu_path
            else:
                mu_all = np.broadcast_to(self.mu, (B,) + self.mu.shape)

            r_path = mu_all.max(axis=2)  # (B, N, D)
            if self.frozen_mask.any():
                r_path = r_path.copy() if n_pull == 0 else r_path
                r_path[:, self.frozen_mask] = self.frozen[self.frozen_mask]
            betas = beta_array(np.arange(self.r, self.r + B), self.delta,
                               self.N, self.K, self.D, scale)
            two_b = 2.0 * betas

            ag = np.flatnonzero(self.in_g)
            g = len(ag)
            rg = r_path[:, ag]                                   # (B, g, D)
            diffs = rg[:, None, :, :] - rg[:, :, None, :]        # [b,i,j,d] = R_j - R_i
            m_mat = diffs.min(axis=3)                            # min_d (R_j - R_i)

            fire = (m_mat >= two_b[:, None, None]).any(axis=(1, 2))

            if self.dim_elimination and g > 0:
                absd = np.abs(diffs)
                absd[:, np.arange(g), np.arange(g), :] = np.inf
                res_min = absd.min(axis=2)                       # (B, g, D)
                res_new = (res_min >= (4.0 * betas[:, None, None] + eps)) \
                    & self.dim_act[ag][None]
                fire |= res_new.any(axis=(1, 2))

            if self.arm_elimination and g > 0:
                mu_g = mu_all[:, ag]                             # (B, g, K, D)
                elim_cond = mu_g <= rg[:, :, None, :] - two_b[:, None, None, None]
                live = self.dim_act[ag][:, None, :] & self.arm_act[ag].transpose(0, 2, 1)
                fire |= (elim_cond & live[None]).any(axis=(1, 2, 3))

            # acceptance: M_eps(R_i, R_j) = eps - min_d (R_j - R_i), clipped at 0
            m_eps = eps - m_mat
            m_eps[:, np.arange(g), np.arange(g)] = np.inf
            p1 = (m_eps >= two_b[:, None, None]).all(axis=2)     # (B, g)
            ok_j = p1[:, :, None] | (m_eps >= two_b[:, None, None])  # [b, j, i]
            p2 = p1 & ok_j.all(axis=1)
            fire |= p2.any(axis=1)

            hits = np.flatnonzero(fire)
            if hits.size == 0:
                if n_pull:
                    self.sums[pull_mask] = sum_path[-1]
                    self.counts[pull_mask] += B
                    self.mu[ii, jj, :] = mu_path[-1]
                self.r += B
                if self.states is not None:
                    self.states.append(self._snapshot())
                continue

            b = int(hits[0])
            if n_pull:
                self.sums[pull_mask] = sum_path[b]
                self.counts[pull_mask] += b + 1
                self.mu[ii, jj, :] = mu_path[b]
                self.src.rewind_pulls((B - (b + 1)) * n_pull)
            round_no = self.r + b
            self._process_round(round_no, r_path[b], float(betas[b]))
            self.r = round_no + 1
            if self.states is not None:
                self.states.append(self._snapshot())

        per_arm = self.counts.copy()
        return GpsiResult(
            recommended=set(np.flatnonzero(self.accepted).tolist()),
            total_pulls=int(per_arm.sum()),
            per_arm_pulls=per_arm,
            rounds=self.r - 1,
            trace=self.events,
            efficiency_estimates=self.exit_eff,
            states=self.states,
        )

    # -- exact single-round replay ------------------------------------------

    def _process_round(self, round_no: int, rhat: np.ndarray, beta_r: float):
        eps = self.epsilon
        ag = np.flatnonzero(self.in_g)
        rg = rhat[ag]
        diffs = rg[None, :, :] - rg[:, None, :]
        m_mat = diffs.min(axis=2)

        # group rejection, simultaneous over i in G
        reject = (m_mat >= 2.0 * beta_r).any(axis=1)
        for local in np.flatnonzero(reject):
            i = int(ag[local])
            self.in_g[i] = False
            self.exit_eff[i] = rhat[i]
            self._emit(round_no, "reject_group", {"group": i})

        ag = np.flatnonzero(self.in_g)
        g = len(ag)
        if g == 0:
            return
        rg = rhat[ag]
        diffs = rg[None, :, :] - rg[:, None, :]

        # dimension elimination against the post-rejection active set
        if self.dim_elimination:
            absd = np.abs(diffs)
            absd[np.arange(g), np.arange(g), :] = np.inf
            resolved = absd.min(axis=1) >= (4.0 * beta_r + eps)   # (g, D)
            new = resolved & self.dim_act[ag]
            for local, d in zip(*np.nonzero(new)):
                i = int(ag[local])
                self.dim_act[i, d] = False
                self.frozen[i, d] = rhat[i, d]
                self.frozen_mask[i, d] = True
                self._emit(round_no, "resolve_dim",
                           {"group": i, "dim": int(d), "value": float(rhat[i, d])})

        # arm elimination in the remaining active dimensions
        if self.arm_elimination:
            for local in range(g):
                i = int(ag[local])
                for d in np.flatnonzero(self.dim_act[i]):
                    cond = (self.mu[i, :, d] <= rhat[i, d] - 2.0 * beta_r) \
                        & self.arm_act[i, d]
                    for j in np.flatnonzero(cond):
                        self.arm_act[i, d, j] = False
                        self._emit(round_no, "eliminate_arm",
                                   {"group": i, "dim": int(d), "arm": int(j)})

        # acceptance
        m_mat = diffs.min(axis=2)
        m_eps = eps - m_mat
        np.fill_diagonal(m_eps, np.inf)
        p1 = (m_eps >= 2.0 * beta_r).all(axis=1)
        ok_j = p1[:, None] | (m_eps >= 2.0 * beta_r)              # [j, i]
        p2 = p1 & ok_j.all(axis=0)
        for local in np.flatnonzero(p2):
            i = int(ag[local])
            self.accepted[i] = True
            self.in_g[i] = False
            self.exit_eff[i] = rhat[i]
            self._emit(round_no, "accept_group", {"group": i})


def run_te(instance: Instance, delta: float, epsilon: float,
           beta_scale: float = 1.0, rng=None,
           max_rounds: int = DEFAULT_MAX_ROUNDS, trace: bool = False,
           collect_states: bool = False, dim_elimination: bool = True,
           arm_elimination: bool = True) -> GpsiResult:
    """Full triple elimination. `dim_elimination`/`arm_elimination` switch off
    the corresponding phases (used by the simplified comparison algorithms)."""
    engine = _TeEngine(instance, delta, epsilon, beta_scale, rng, max_rounds,
                       dim_elimination, arm_elimination, trace, collect_states)
    return engine.run()


def te_round_invariant_check(state: TeState, instance: Instance | None = None) -> dict:
    """Assert the structural invariants of a TE state snapshot.

    With a deterministic instance (noise_scale 0) also checks that for every
    active group and dimension the arm achieving the group's true maximum in
    that dimension (smallest index on ties) is still active.
    """
    failures = []
    if state.accepted & state.active_groups:
        failures.append("accepted_groups_still_active")
    for (i, d), arms in state.active_arms.items():
        if i not in state.active_groups:
            failures.append(f"arms_of_inactive_group:{i}")
        elif d not in state.active_dims.get(i, set()):
            failures.append(f"arms_of_inactive_dim:{i},{d}")
        if not arms and i in state.active_groups:
            # an active dimension with no active arms cannot drive sampling
            failures.append(f"empty_active_arm_set:{i},{d}")
    for i in state.active_groups:
        resolved = {d for (g, d) in state.frozen_dim_values if g == i}
        expected = set(range(state.empirical_tensor.shape[2])) - state.active_dims[i]
        if resolved != expected:
            failures.append(f"frozen_keys_mismatch:{i}")
    if instance is not None and instance.noise.noise_scale == 0.0:
        means = instance.tensor.means
        for i in state.active_groups:
            for d in state.active_dims[i]:
                best = int(np.argmax(means[i, :, d]))
                if best not in state.active_arms[(i, d)]:
                    failures.append(f"best_arm_inactive:{i},{d}")
    if failures:
        raise AssertionError("TE state invariants violated: " + ", ".join(failures))
    return {"round": state.round, "ok": True}
