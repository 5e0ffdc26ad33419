import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qdimer import observables as obs
from qdimer.errors import EmptyHistogramError, ShapeMismatchError
from qdimer.fokker_planck import PdfGrid

PI = math.pi


class TestBinAngles:
    def test_single_pointer_sample(self):
        h = obs.bin_angles([PI], [PI], 72)
        assert h.counts[71, 71] == 1 and h.total == 1

    def test_total_matches_sample_count(self, rng_np):
        tl = rng_np.uniform(-PI, PI, 1000)
        tr = rng_np.uniform(-PI, PI, 1000)
        h = obs.bin_angles(tl, tr, 72)
        assert h.counts.sum() == h.total == 1000

    def test_uniform_samples_pass_chi_square(self, rng_np):
        n = 200_000
        h = obs.bin_angles(rng_np.uniform(-PI, PI, n), rng_np.uniform(-PI, PI, n), 12)
        expected = n / 144
        chi2 = ((h.counts - expected) ** 2 / expected).sum()
        assert chi2 <= stats.chi2.ppf(0.99, 143)

    def test_density_normalization(self, rng_np):
        h = obs.bin_angles(rng_np.uniform(-PI, PI, 500), rng_np.uniform(-PI, PI, 500), 24)
        assert h.density_matrix().sum() * h.dtheta**2 == pytest.approx(1.0, abs=1e-12)

    def test_nan_samples_dropped_and_counted(self):
        h = obs.bin_angles([0.0, float("nan"), 1.0], [0.0, 0.5, float("nan")], 8)
        assert h.total == 1
        assert h.meta["n_dropped"] == 2

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-PI, PI, exclude_min=True), st.integers(1, 97))
    def test_binning_is_exhaustive_and_exclusive(self, theta, n):
        # every canonical angle lands in exactly one bin; membership in the
        # half-open cell holds up to one rounding ulp of theta + pi
        idx = obs.bin_index(theta, n)
        assert 0 <= idx < n
        edges = np.linspace(-PI, PI, n + 1)
        assert edges[idx] - 1e-12 <= theta
        assert theta < edges[idx + 1] + 1e-12 or (idx == n - 1 and theta <= PI)


class TestMarginal:
    def test_uniform_product(self):
        counts = np.ones((8, 8), dtype=np.int64)
        h = obs.Histogram2D(n=8, counts=counts, total=64)
        m = obs.marginal(h, "L")
        assert np.allclose(m.density, 1 / (2 * PI))
        assert m.masses().sum() == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_histogram_has_equal_marginals(self, rng_np):
        c = rng_np.integers(0, 30, (16, 16))
        c = c + c.T
        h = obs.Histogram2D(n=16, counts=c, total=int(c.sum()))
        assert np.allclose(obs.marginal(h, "L").density,
                           obs.marginal(h, "R").density)

    def test_empty_rejected(self):
        h = obs.Histogram2D(n=4, counts=np.zeros((4, 4), dtype=np.int64), total=0)
        with pytest.raises(EmptyHistogramError):
            obs.marginal(h, "L")


class TestConditionalCuts:
    def test_delta_histogram_cuts_are_deltas(self):
        h = obs.bin_angles([PI, PI], [PI, PI], 12)
        cuts = obs.conditional_cuts(h)
        for cut in (cuts.at_theta_r_pi, cuts.at_theta_l_pi, cuts.diagonal):
            assert cut.density[-1] > 0
            assert cut.density[:-1].sum() == 0
            assert cut.masses().sum() == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_histogram_edge_cuts_coincide(self, rng_np):
        c = rng_np.integers(1, 30, (16, 16))
        c = c + c.T
        h = obs.Histogram2D(n=16, counts=c, total=int(c.sum()))
        cuts = obs.conditional_cuts(h)
        assert np.allclose(cuts.at_theta_r_pi.density, cuts.at_theta_l_pi.density)

    def test_empty_slice_signaled_by_name(self):
        c = np.ones((8, 8), dtype=np.int64)
        c[:, 7] = 0  # theta_r = pi column empty
        h = obs.Histogram2D(n=8, counts=c, total=int(c.sum()))
        with pytest.raises(EmptyHistogramError, match="at_theta_r_pi"):
            obs.conditional_cuts(h)


class TestTvDistance:
    def test_identical_is_zero(self, rng_np):
        c = rng_np.integers(0, 50, (12, 12))
        h = obs.Histogram2D(n=12, counts=c, total=int(c.sum()))
        assert obs.tv_distance(h, h) == 0.0

    def test_disjoint_supports_is_one(self):
        a = np.zeros((4, 4)); a[0, 0] = 3
        b = np.zeros((4, 4)); b[3, 3] = 7
        assert obs.tv_distance(a, b) == 1.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeMismatchError):
            obs.tv_distance(np.ones((4, 4)), np.ones((8, 8)))

    def test_histogram_vs_grid_comparison(self):
        bulk = np.full((8, 8), 1 / (2 * PI) ** 2)
        g = PdfGrid(n=8, bulk=bulk)
        h = obs.Histogram2D(n=8, counts=np.ones((8, 8), dtype=np.int64), total=64)
        assert obs.tv_distance(h, g) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_metric_properties_on_random_triples(self, seed):
        r = np.random.default_rng(seed)
        a, b, c = (r.uniform(0, 1, (6, 6)) for _ in range(3))
        dab = obs.tv_distance(a, b)
        dba = obs.tv_distance(b, a)
        assert dab == pytest.approx(dba, abs=1e-14)
        assert 0.0 <= dab <= 1.0
        assert dab <= obs.tv_distance(a, c) + obs.tv_distance(c, b) + 1e-14


class TestOccupiedFraction:
    def test_full_histogram(self):
        h = obs.Histogram2D(n=4, counts=np.ones((4, 4), dtype=np.int64), total=16)
        assert obs.occupied_fraction(h) == 1.0

    def test_delta_on_default_grid(self):
        h = obs.bin_angles([PI], [PI], 72)
        assert obs.occupied_fraction(h) == pytest.approx(1 / 5184)

    def test_masked_region(self):
        h = obs.Histogram2D(n=4, counts=np.eye(4, dtype=np.int64), total=4)
        mask = np.zeros((4, 4), dtype=bool)
        mask[0, :] = True
        assert obs.occupied_fraction(h, mask) == pytest.approx(0.25)


class TestSplittingFloor:
    def test_floor_scales_with_ensemble_size(self, rng_np):
        tl = rng_np.uniform(-PI, PI, 40_000)
        tr = rng_np.uniform(-PI, PI, 40_000)
        f_small = obs.splitting_floor(tl[:4000], tr[:4000], 12)
        f_large = obs.splitting_floor(tl, tr, 12)
        assert f_large < f_small
        assert f_large == pytest.approx(f_small / math.sqrt(10), rel=0.5)
