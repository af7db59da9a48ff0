import math

import numpy as np
import pytest
from scipy import stats

from spatialvote.rvs import polya_gamma, trunc_std_normal_lower


def pg_mean(c):
    # E[omega] = tanh(c/2) / (2c), continuous limit 1/4 at c = 0
    return 0.25 if c == 0 else math.tanh(c / 2.0) / (2.0 * c)


def pg_var(c):
    # Var[omega] = (sinh(c) - c) / (4 c^3 cosh^2(c/2)), limit 1/24 at c = 0
    if c == 0:
        return 1.0 / 24.0
    return (math.sinh(c) - c) / (4.0 * c**3 * math.cosh(c / 2.0) ** 2)


class TestTruncatedNormal:
    def test_mean_at_zero_bound(self):
        rng = np.random.default_rng(0)
        x = trunc_std_normal_lower(np.zeros(200_000), rng)
        # E[X | X > 0] = sqrt(2/pi)
        assert abs(x.mean() - math.sqrt(2.0 / math.pi)) < 0.01

    def test_respects_bound(self):
        rng = np.random.default_rng(1)
        lo = np.linspace(-4, 8, 5000)
        x = trunc_std_normal_lower(lo, rng)
        assert (x >= lo).all()

    @pytest.mark.parametrize("a", [-1.5, 0.5, 1.0, 2.5])
    def test_ks_against_scipy_body(self, a):
        rng = np.random.default_rng(2)
        x = trunc_std_normal_lower(np.full(40_000, a), rng)
        stat = stats.kstest(x, stats.truncnorm(a=a, b=np.inf).cdf).statistic
        assert stat < 0.01

    @pytest.mark.parametrize("a", [7.0, 10.0, 30.0])
    def test_deep_tail_moments(self, a):
        # inverse-CDF breaks down out here; the rejection branch must not
        rng = np.random.default_rng(3)
        x = trunc_std_normal_lower(np.full(100_000, a), rng)
        assert (x >= a).all() and np.isfinite(x).all()
        ref = stats.truncnorm(a=a, b=np.inf)
        assert x.mean() == pytest.approx(ref.mean(), abs=4 * ref.std() / math.sqrt(100_000) + 1e-9)

    def test_tail_ks(self):
        rng = np.random.default_rng(4)
        a = 8.0
        x = trunc_std_normal_lower(np.full(40_000, a), rng)
        stat = stats.kstest(x, stats.truncnorm(a=a, b=np.inf).cdf).statistic
        assert stat < 0.01

    def test_mixed_bounds_vectorized(self):
        rng = np.random.default_rng(5)
        lo = np.array([-2.0, 0.0, 3.0, 9.0])
        x = trunc_std_normal_lower(np.tile(lo, 1000), rng)
        assert x.shape == (4000,)
        assert (x >= np.tile(lo, 1000)).all()

    def test_empty_input(self):
        rng = np.random.default_rng(6)
        x = trunc_std_normal_lower(np.empty(0), rng)
        assert x.shape == (0,)


class TestPolyaGamma:
    @pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 2.0, 4.0, 10.0])
    def test_mean_and_variance(self, c):
        rng = np.random.default_rng(11)
        n = 200_000
        w = polya_gamma(np.full(n, c), rng)
        se_mean = math.sqrt(pg_var(c) / n)
        assert abs(w.mean() - pg_mean(c)) < 4 * se_mean
        # fourth-moment bound is loose; 10% relative slack is ample at this n
        assert abs(w.var() - pg_var(c)) < 0.1 * pg_var(c)

    def test_positivity(self):
        rng = np.random.default_rng(12)
        w = polya_gamma(np.linspace(-12, 12, 20_000), rng)
        assert (w > 0).all()
        assert np.isfinite(w).all()

    def test_tilt_symmetry(self):
        # the density depends on the tilt only through |c|
        n = 150_000
        wp = polya_gamma(np.full(n, 3.0), np.random.default_rng(13))
        wm = polya_gamma(np.full(n, -3.0), np.random.default_rng(14))
        assert abs(wp.mean() - wm.mean()) < 5 * math.sqrt(2 * pg_var(3.0) / n)
        assert stats.ks_2samp(wp, wm).pvalue > 1e-4

    def test_scalar_and_shape(self):
        rng = np.random.default_rng(15)
        w = polya_gamma(np.array([1.0, 2.0]), rng)
        assert w.shape == (2,)
        w0 = polya_gamma(np.empty(0), rng)
        assert w0.shape == (0,)

    def test_large_tilt_concentrates(self):
        # as |c| grows the distribution piles up near 1/(2 c) * tanh -> 1/(2c)
        rng = np.random.default_rng(16)
        c = 25.0
        w = polya_gamma(np.full(50_000, c), rng)
        assert abs(w.mean() - pg_mean(c)) < 0.02 * pg_mean(c)

    def test_deterministic_given_rng(self):
        a = polya_gamma(np.full(100, 1.5), np.random.default_rng(77))
        b = polya_gamma(np.full(100, 1.5), np.random.default_rng(77))
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("c,t", [(0.0, 0.5), (0.0, 2.0), (1.0, 1.0), (3.0, 0.7)])
    def test_laplace_transform(self, c, t):
        # E[exp(-t w)] = cosh(c/2) / cosh(sqrt(t/2 + c^2/4)) pins down the
        # whole distribution, not just the first two moments
        rng = np.random.default_rng(17)
        n = 200_000
        w = polya_gamma(np.full(n, c), rng)
        vals = np.exp(-t * w)
        expected = math.cosh(c / 2.0) / math.cosh(math.sqrt(t / 2.0 + c * c / 4.0))
        se = vals.std() / math.sqrt(n)
        assert abs(vals.mean() - expected) < 5 * se + 1e-12
