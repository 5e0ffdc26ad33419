import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdimer import gutzwiller as gw
from qdimer import observables, quantum
from qdimer.errors import ValidationError
from qdimer.params import SimParams

from conftest import circ_dist

angles = st.floats(-math.pi, math.pi, exclude_min=True)
strengths = st.floats(0.0, 3.0)


class TestWrapAngle:
    @pytest.mark.parametrize("raw,expected", [
        (math.pi, math.pi),
        (-math.pi, math.pi),
        (math.pi + 0.1, -math.pi + 0.1),
        (-math.pi - 0.1, math.pi - 0.1),
        (0.0, 0.0),
        (7.0, 7.0 - 2 * math.pi),
    ])
    def test_reference_values(self, raw, expected):
        assert gw.wrap_angle(raw) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-50.0, 50.0))
    def test_canonical_range(self, raw):
        w = gw.wrap_angle(raw)
        assert -math.pi < w <= math.pi
        assert circ_dist(w, raw) <= 1e-9


class TestDrift:
    def test_equator_is_pure_rotation(self):
        assert gw.drift(0.0, 0.0, 1.7, 0.9) == pytest.approx((2.0, 2.0))

    def test_one_site_stall(self):
        wl, _ = gw.drift(-math.pi / 2, 1.234, 1.0, 0.0)
        assert wl == pytest.approx(0.0, abs=1e-12)

    def test_two_site_tangency(self):
        lam2 = 8.0 / (3.0 * math.sqrt(3.0))
        wl, wr = gw.drift(-2 * math.pi / 3, -2 * math.pi / 3, 0.0, lam2)
        assert wl == pytest.approx(0.0, abs=1e-12)
        assert wr == pytest.approx(0.0, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(angles, angles, strengths, strengths)
    def test_exchange_symmetry(self, tl, tr, lam1, lam2):
        wl, wr = gw.drift(tl, tr, lam1, lam2)
        wl_swap, wr_swap = gw.drift(tr, tl, lam1, lam2)
        assert wr == pytest.approx(wl_swap, abs=1e-12)
        assert wl == pytest.approx(wr_swap, abs=1e-12)

    def test_rate_form_matches_lambda_form(self):
        omega, g1, g2 = 1.3, 2.0, 0.8
        got = gw.drift_rates(0.7, -2.1, omega, g1, g2)
        want = gw.drift(0.7, -2.1, g1 / (4 * omega), g2 / (4 * omega), omega)
        assert got == pytest.approx(want, abs=1e-12)


class TestReadoutProbs:
    def test_pointer_angles(self):
        p = gw.gw_readout_probs(math.pi, math.pi, 1.0, 2.0, 1e-3)
        assert p == pytest.approx([1 - 4e-3, 1e-3, 1e-3, 2e-3], abs=1e-15)

    def test_ground_angles(self):
        p = gw.gw_readout_probs(0.0, 0.0, 5.0, 5.0, 1e-3)
        assert p == pytest.approx([1, 0, 0, 0], abs=1e-15)

    def test_negative_noclick_rejected(self):
        with pytest.raises(ValidationError):
            gw.gw_readout_probs(math.pi, math.pi, 600.0, 0.0, 1e-3)

    def test_matches_born_probabilities(self):
        # the angle-pair formulas agree with the Born rule on product states
        rng = np.random.default_rng(8)
        for _ in range(100):
            tl, tr = rng.uniform(-math.pi, math.pi, 2)
            g1, g2 = rng.uniform(0, 4, 2)
            dt = 1e-3
            ks = quantum.build_kraus(g1, g2, dt)
            born = quantum.born_probabilities(quantum.product_state(tl, tr), ks)
            mine = gw.gw_readout_probs(tl, tr, g1, g2, dt)
            assert np.abs(born - mine).max() <= 1e-12


class TestGwStep:
    def _params(self, **kw):
        return SimParams.from_lambdas(kw.pop("lam1", 0.25), kw.pop("lam2", 0.25),
                                      **kw)

    def test_pointer_fixed_by_two_site_click(self):
        params = self._params()
        p = gw.gw_readout_probs(math.pi, math.pi, params.gamma1, params.gamma2,
                                params.dt)
        rand = p[0] + p[1] + p[2] + 0.5 * p[3]
        assert gw.gw_step(math.pi, math.pi, params, rand) == (math.pi, math.pi, 3)

    def test_pure_drift(self):
        params = SimParams(gamma1=0.0, gamma2=0.0, dt=1e-3)
        tl, tr, r = gw.gw_step(0.0, 0.0, params, 0.99)
        assert r == 0
        assert tl == pytest.approx(-2e-3, abs=1e-15)
        assert tr == pytest.approx(-2e-3, abs=1e-15)

    def test_wrap_across_branch_point(self):
        params = SimParams(gamma1=0.0, gamma2=0.0, dt=1e-3)
        tl, tr, r = gw.gw_step(-math.pi + 1e-4, 0.0, params, 0.0)
        assert r == 0
        assert tl > math.pi - 3e-3  # re-entered near +pi

    def test_one_site_click_leaves_partner_unchanged(self):
        params = self._params()
        p = gw.gw_readout_probs(2.0, -1.0, params.gamma1, params.gamma2, params.dt)
        tl, tr, r = gw.gw_step(2.0, -1.0, params, p[0] + 0.5 * p[1])
        assert (tl, tr, r) == (math.pi, -1.0, 1)

    def test_swap_covariance_of_probabilities(self):
        p = gw.gw_readout_probs(0.9, -2.2, 1.3, 0.7, 1e-3)
        q = gw.gw_readout_probs(-2.2, 0.9, 1.3, 0.7, 1e-3)
        assert p[0] == pytest.approx(q[0], abs=1e-15)
        assert p[1] == pytest.approx(q[2], abs=1e-15)
        assert p[2] == pytest.approx(q[1], abs=1e-15)
        assert p[3] == pytest.approx(q[3], abs=1e-15)


class TestRunGwTrajectory:
    def test_pure_rotation_period(self):
        t_final = math.pi
        params = SimParams(gamma1=0.0, gamma2=0.0, dt=t_final / 2000,
                           t_final=t_final)
        s = gw.run_gw_trajectory(params, 0)
        assert circ_dist(s.theta_l, math.pi) <= 1e-6
        assert circ_dist(s.theta_r, math.pi) <= 1e-6
        assert s.entropy == 0.0 and s.fidelity == 1.0

    def test_determinism(self):
        params = SimParams.from_lambdas(0.8, 1.2, n_traj=4, t_final=3.0,
                                        master_seed=31)
        assert gw.run_gw_trajectory(params, 2) == gw.run_gw_trajectory(params, 2)
        tl, tr, counts = gw.run_gw_ensemble(params)
        assert tl[2] == gw.run_gw_trajectory(params, 2).theta_l

    def test_depleted_marginal_interval_is_empty_ensemble_wide(self):
        # standard-Zeno point: the stationary marginal leaves whole bins
        # untouched, and (by construction) no final angle lands there
        params = SimParams.from_lambdas(1.25, 0.25, dt=2e-3, t_final=20.0,
                                        n_traj=20_000, master_seed=3)
        tl, tr, _ = gw.run_gw_ensemble(params)
        h = observables.bin_angles(tl, tr, 72)
        ml = h.counts.sum(axis=1)
        assert (ml == 0).sum() >= 5
        empty_edges = [(h.edges[i], h.edges[i + 1])
                       for i in np.nonzero(ml == 0)[0]]
        for lo, hi in empty_edges:
            assert not np.any((tl >= lo) & (tl < hi))

    def test_lambda2_zero_joint_histogram_factorizes(self):
        params = SimParams.from_lambdas(0.6, 0.0, dt=2e-3, t_final=10.0,
                                        n_traj=100_000, master_seed=12)
        tl, tr, _ = gw.run_gw_ensemble(params)
        h = observables.bin_angles(tl, tr, 36)
        prod = observables.product_of_marginals(h)
        tv = observables.tv_distance(h, prod)
        floor = observables.splitting_floor(tl, tr, 36)
        assert tv <= 2 * floor


class TestMeanfieldOde:
    def test_drift_only_rotation(self):
        params = SimParams(gamma1=0.0, gamma2=0.0, dt=1e-3)
        out = gw.meanfield_ode_check((1.0, -2.0), params, 0.7)
        assert out[0] == pytest.approx(gw.wrap_angle(1.0 - 1.4), abs=1e-9)
        assert out[1] == pytest.approx(gw.wrap_angle(-2.0 - 1.4), abs=1e-9)

    def test_stationary_point(self):
        params = SimParams.from_lambdas(1.0, 0.0, dt=1e-3)
        out = gw.meanfield_ode_check((-math.pi / 2, -math.pi / 2), params, 5.0)
        assert out[0] == pytest.approx(-math.pi / 2, abs=1e-9)
        assert out[1] == pytest.approx(-math.pi / 2, abs=1e-9)

    def test_euler_chain_converges_at_first_order(self):
        lam1, lam2, t = 0.4, 0.9, 1.0
        theta0 = (2.5, -0.5)
        ref_params = SimParams.from_lambdas(lam1, lam2, dt=1e-4)
        ref = gw.meanfield_ode_check(theta0, ref_params, t)

        def euler_error(dt):
            params = SimParams.from_lambdas(lam1, lam2, dt=dt)
            tl, tr = theta0
            for _ in range(int(round(t / dt))):
                tl, tr, r = gw.gw_step(tl, tr, params, 0.0)  # forced no-click
                assert r == 0
            return max(circ_dist(tl, ref[0]), circ_dist(tr, ref[1]))

        ratio = euler_error(4e-3) / euler_error(2e-3)
        assert ratio == pytest.approx(2.0, rel=0.25)
