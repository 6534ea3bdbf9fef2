import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from simfdr.numeric import (RngStream, chi_square_cdf, sample_bivariate_normal, sample_bivariate_t,
                            std_normal_cdf, std_normal_quantile, student_t_cdf)

mp.mp.dps = 40


def mp_ncdf(x):
    return float(mp.ncdf(mp.mpf(x)))


def mp_nquant(p):
    return float(mp.sqrt(2) * mp.erfinv(2 * mp.mpf(p) - 1))


# values frozen from 40-digit mpmath evaluations
CDF_196 = 0.97500210485177956586
CDF_M15013155 = 0.066636988911873602729
Q_0975 = 1.9599639845400542355
Q_01 = -1.281551565544600467
T_1_3 = 0.80449889052211467904
CHI2_19_19 = 0.54316387440803761656


class TestNormalCdf:
    def test_symmetry_point(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_frozen_values(self):
        assert abs(std_normal_cdf(1.96) - CDF_196) < 1e-12
        assert abs(std_normal_cdf(-1.5013155) - CDF_M15013155) < 1e-12

    def test_against_mpmath_on_grid(self):
        xs = np.linspace(-8, 8, 161)
        got = std_normal_cdf(xs)
        want = np.array([mp_ncdf(x) for x in xs])
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_monotone(self):
        v = std_normal_cdf(np.linspace(-10, 10, 5001))
        assert np.all(np.diff(v) >= 0)
        assert v.min() >= 0 and v.max() <= 1

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite(self, bad):
        with pytest.raises(ValueError):
            std_normal_cdf(bad)


class TestNormalQuantile:
    def test_frozen_values(self):
        assert std_normal_quantile(0.5) == 0.0
        assert abs(std_normal_quantile(0.975) - Q_0975) < 1e-12
        assert abs(std_normal_quantile(0.1) - Q_01) < 1e-12

    def test_bisection_oracle(self):
        # independent route: invert the CDF by bisection
        for p in (0.975, 0.1, 1e-6, 0.999):
            lo, hi = -20.0, 20.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mp_ncdf(mid) < p:
                    lo = mid
                else:
                    hi = mid
            assert abs(std_normal_quantile(p) - 0.5 * (lo + hi)) < 1e-9

    def test_against_mpmath_including_tails(self):
        ps = np.concatenate((np.logspace(-12, -1, 60), np.linspace(0.05, 0.95, 61),
                             1 - np.logspace(-12, -1, 60)))
        got = std_normal_quantile(ps)
        want = np.array([mp_nquant(p) for p in ps])
        assert np.max(np.abs(got - want)) <= 1e-9

    def test_round_trip_grid(self):
        ps = np.linspace(1e-9, 1 - 1e-9, 1000)
        assert np.max(np.abs(std_normal_cdf(std_normal_quantile(ps)) - ps)) <= 1e-9

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, np.nan])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            std_normal_quantile(bad)

    @given(st.floats(min_value=1e-12, max_value=1 - 1e-12))
    def test_round_trip_property(self, p):
        assert abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9

    def test_scalar_and_array_shapes(self):
        assert isinstance(std_normal_quantile(0.3), float)
        assert std_normal_quantile(np.array([[0.2, 0.8]])).shape == (1, 2)


class TestStudentT:
    def test_trivial(self):
        for v in (1, 2, 3, 30):
            assert student_t_cdf(0.0, v) == pytest.approx(0.5, abs=1e-15)
        assert abs(student_t_cdf(1.0, 1) - 0.75) < 1e-12

    def test_integration_oracle(self):
        assert abs(student_t_cdf(1.0, 3) - T_1_3) <= 1e-10

    def test_monotone(self):
        v = student_t_cdf(np.linspace(-50, 50, 2001), 3)
        assert np.all(np.diff(v) >= 0)

    def test_domain(self):
        with pytest.raises(ValueError):
            student_t_cdf(1.0, 0)


class TestChiSquare:
    def test_trivial(self):
        assert chi_square_cdf(0.0, 5) == 0.0
        assert abs(chi_square_cdf(2.0, 2) - (1 - math.exp(-1))) < 1e-12

    def test_incomplete_gamma_oracle(self):
        assert abs(chi_square_cdf(19.0, 19) - CHI2_19_19) <= 1e-10

    def test_monotone(self):
        v = chi_square_cdf(np.linspace(0, 80, 801), 19)
        assert np.all(np.diff(v) >= 0)

    def test_domain(self):
        with pytest.raises(ValueError):
            chi_square_cdf(-1.0, 3)
        with pytest.raises(ValueError):
            chi_square_cdf(1.0, 0)


class TestSampling:
    def test_stream_reproducible(self):
        a = sample_bivariate_normal(RngStream(5, 3), (0, 0), np.eye(2), size=50)
        b = sample_bivariate_normal(RngStream(5, 3), (0, 0), np.eye(2), size=50)
        c = sample_bivariate_normal(RngStream(5, 4), (0, 0), np.eye(2), size=50)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_streams_uncorrelated(self):
        a = RngStream(11, 0).generator.standard_normal(20000)
        b = RngStream(11, 1).generator.standard_normal(20000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.03

    def test_normal_moments(self):
        x = sample_bivariate_normal(RngStream(1), (1.0, -2.0), np.eye(2), size=100_000)
        assert np.allclose(x.mean(axis=0), (1.0, -2.0), atol=0.01)
        assert abs(np.corrcoef(x.T)[0, 1]) < 0.01
        y = sample_bivariate_normal(RngStream(2), (0, 0), [[1, 0.5], [0.5, 1]], size=100_000)
        assert abs(np.corrcoef(y.T)[0, 1] - 0.5) < 0.01

    def test_single_draw_shape(self):
        assert sample_bivariate_normal(RngStream(1), (0, 0), np.eye(2)).shape == (2,)
        assert sample_bivariate_t(RngStream(1), (0, 0), np.eye(2), 3).shape == (2,)

    def test_not_psd(self):
        with pytest.raises(ValueError):
            sample_bivariate_normal(RngStream(1), (0, 0), [[1, 2], [2, 1]])
        with pytest.raises(ValueError):
            sample_bivariate_normal(RngStream(1), (0, 0), [[1, 0.2], [0.3, 1]])

    def test_t_large_df_is_normal(self):
        x = sample_bivariate_t(RngStream(3), (0, 0), np.eye(2), 10**6, size=10_000)
        assert stats.kstest(x[:, 0], "norm").statistic < 0.02

    def test_t_median(self):
        x = sample_bivariate_t(RngStream(4), (0, 0), [[1, 0.2], [0.2, 1]], 3, size=100_000)
        assert np.all(np.abs(np.median(x, axis=0)) < 0.02)

    def test_t3_marginal_ks(self):
        x = sample_bivariate_t(RngStream(5), (0, 0), [[1, 0.4], [0.4, 1]], 3, size=10_000)
        for col in x.T:
            srt = np.sort(col)
            cdf = student_t_cdf(srt, 3)
            n = srt.size
            d = max(np.max(np.arange(1, n + 1) / n - cdf), np.max(cdf - np.arange(n) / n))
            assert d < 1.36 / math.sqrt(n)

    def test_t_shared_divisor(self):
        # with a shared chi-square divisor the components are dependent even at rho = 0
        x = sample_bivariate_t(RngStream(6), (0, 0), np.eye(2), 3, size=50_000)
        assert np.corrcoef(np.abs(x.T))[0, 1] > 0.1
