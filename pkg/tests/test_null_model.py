import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special, stats

from simfdr.errors import EstimationError
from simfdr.null_model import (NonparametricNullCdf, NullModelParams, ParametricNullCdf, UniformNullCdf,
                               closed_form_sigma0, estimate_sigma0, fit_null_cdf, nonparametric_null_cdf,
                               null_density_oracle, parametric_null_cdf)
from simfdr.projection import PValueTable, ProjectedSample, project_all, theta_grid

PAR_01 = 0.12102238097609852814  # Phi(Phi^{-1}(0.1) / 1.0954451), 40 digits


class TestSigma0:
    def test_hand_trace(self):
        # Z* = {-1, -2, 1, 2}
        assert estimate_sigma0([-2.0, 1.0, 2.0]) == pytest.approx(math.sqrt(2.5), abs=1e-15)

    def test_zero_kept_once(self):
        assert estimate_sigma0([0.0, 2.0]) == pytest.approx(math.sqrt((0 + 4 + 4) / 3), abs=1e-15)

    def test_with_positive_c(self):
        z = np.array([-3.0, -0.5, 0.2, 0.5, 2.0])
        zs = np.concatenate((-z[z >= 0.5], z[(z > -0.5) & (z <= 0.5)], z[z > 0.5]))
        assert estimate_sigma0(z, 0.5) == pytest.approx(math.sqrt(np.mean(zs**2)), abs=1e-15)

    @pytest.mark.parametrize("sigma", [1.0, 1.2])
    def test_monte_carlo(self, sigma):
        z = np.random.default_rng(int(sigma * 10)).normal(0, sigma, 100_000)
        assert abs(estimate_sigma0(z) - sigma) < 0.01

    def test_errors(self):
        with pytest.raises(EstimationError):
            estimate_sigma0([])
        with pytest.raises(EstimationError):
            estimate_sigma0([-3.0, -2.0], c=1.0)
        with pytest.raises(ValueError):
            estimate_sigma0([1.0], c=-1)

    @given(st.lists(st.floats(-50, 50).filter(lambda x: x == 0 or abs(x) > 1e-100), min_size=1, max_size=40),
           st.floats(0.01, 100))
    def test_scale_equivariant(self, z, k):
        z = np.asarray(z)
        if not np.any(z > 1e-6):
            return
        assert estimate_sigma0(k * z) == pytest.approx(k * estimate_sigma0(z), rel=1e-9)


class TestParametric:
    def test_values(self):
        assert parametric_null_cdf(0.5, 1.7) == pytest.approx(0.5, abs=1e-15)
        assert parametric_null_cdf(0.123, 1.0) == 0.123
        assert abs(parametric_null_cdf(0.1, 1.0954451) - PAR_01) < 1e-12

    def test_boundaries_and_errors(self):
        assert parametric_null_cdf(0.0, 1.3) == 0.0
        assert parametric_null_cdf(1.0, 1.3) == 1.0
        with pytest.raises(ValueError):
            parametric_null_cdf(0.1, 0.0)
        with pytest.raises(ValueError):
            ParametricNullCdf(-1.0)

    @given(st.floats(0, 1), st.floats(0.2, 5))
    def test_symmetric(self, t, s):
        t = 1 - (1 - t)  # make 1 - t exact
        assert abs(parametric_null_cdf(1 - t, s) - (1 - parametric_null_cdf(t, s))) < 1e-12


def _sample(values):
    v = np.asarray(values, dtype=float)
    return ProjectedSample(0.0, v, special.ndtri(v))


class TestNonparametric:
    def test_hand_example(self):
        assert nonparametric_null_cdf(0.5, _sample([0.2, 0.5, 0.8])) == pytest.approx(2 / 3, abs=1e-15)

    def test_boundaries(self):
        f = NonparametricNullCdf([1e-12, 0.3, 0.6, 0.9, 1 - 1e-12])
        assert f(0.0) == 0.0
        assert f(1.0) == 1.0

    def test_degenerate(self):
        with pytest.raises(EstimationError):
            NonparametricNullCdf([0.1, 0.2, 0.49])

    def test_brute_force_definition(self):
        gen = np.random.default_rng(3)
        v = np.round(gen.random(40), 2)
        f = NonparametricNullCdf(v)
        d = 2 * np.sum(v > 0.5) + np.sum(v == 0.5)
        for t in np.linspace(0, 1, 201):
            want = np.sum(v >= 1 - t) / d if t <= 0.5 else 1 - np.sum(v >= t) / d
            assert f(t) == pytest.approx(want, abs=1e-15)

    @given(st.lists(st.floats(1e-12, 1 - 1e-12), min_size=1, max_size=60))
    def test_monotone_bounded_symmetric(self, vals):
        v = np.asarray(vals)
        if not np.any(v >= 0.5):
            return
        f = NonparametricNullCdf(v)
        ts = np.linspace(0, 1, 401)
        y = f(ts)
        assert np.all(np.diff(y) >= -1e-15)
        assert y.min() >= 0 and y.max() <= 1 + 1e-15
        # F(t) + F((1 - t)-) = 1 away from jump points
        for t in ts[1:-1]:
            if np.any(np.abs(v - t) < 1e-9) or np.any(np.abs(v - (1 - t)) < 1e-9):
                continue
            left = f(max(1 - t - 1e-12, 0.0))
            assert f(t) + left == pytest.approx(1.0, abs=1e-9)

    def test_glivenko_cantelli(self):
        gen = np.random.default_rng(99)
        rho = 0.2
        x = gen.multivariate_normal([0, 0], [[1, rho], [rho, 1]], size=10_000)
        table = PValueTable(special.ndtr(-x[:, 0]), special.ndtr(-x[:, 1]))
        null = NullModelParams((0, 0), 1, 1, rho)
        ts = np.linspace(1e-4, 1 - 1e-4, 2001)
        for th in theta_grid(11):
            f = NonparametricNullCdf(project_all(table, float(th)).values)
            truth = parametric_null_cdf(ts, closed_form_sigma0(null, float(th)))
            assert np.max(np.abs(f(ts) - truth)) < 0.02


def test_fit_null_cdf_dispatch():
    s = _sample([0.1, 0.4, 0.6, 0.9])
    assert isinstance(fit_null_cdf(s, "parametric"), ParametricNullCdf)
    assert isinstance(fit_null_cdf(s, "nonparametric"), NonparametricNullCdf)
    assert isinstance(fit_null_cdf(s, "uniform"), UniformNullCdf)
    with pytest.raises(ValueError):
        fit_null_cdf(s, "other")


class TestClosedForm:
    def test_values(self):
        p = NullModelParams((0, 0), 1, 1, 0.0)
        assert all(closed_form_sigma0(p, th) == pytest.approx(1.0, abs=1e-15) for th in theta_grid(7))
        assert closed_form_sigma0(NullModelParams(rho=0.2), math.pi / 4) == pytest.approx(1.0954451150103321, abs=1e-12)
        assert closed_form_sigma0(NullModelParams(rho=-0.5), math.pi / 4) == pytest.approx(0.7071067811865476, abs=1e-12)

    def test_matches_sampled_projection(self):
        p = NullModelParams((0, 0), 1.3, 0.8, -0.3)
        x = np.random.default_rng(1).multivariate_normal([0, 0], p.cov, size=200_000)
        th = 0.6
        proj = math.cos(th) * x[:, 0] + math.sin(th) * x[:, 1]
        assert np.std(proj) == pytest.approx(closed_form_sigma0(p, th), abs=0.01)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            NullModelParams(rho=1.0)
        with pytest.raises(ValueError):
            NullModelParams(sigma1=0.0)


class TestDensityOracle:
    def test_independent_is_uniform(self):
        g = np.random.default_rng(0).random((50, 2))
        assert np.allclose(null_density_oracle(g[:, 0], g[:, 1], 0.0), 1.0, atol=1e-12)

    def test_normal_matches_copula_density(self):
        g = np.random.default_rng(1).uniform(0.01, 0.99, (50, 2))
        x, y = stats.norm.ppf(g[:, 0]), stats.norm.ppf(g[:, 1])
        mvn = stats.multivariate_normal([0, 0], [[1, 0.5], [0.5, 1]])
        want = mvn.pdf(np.c_[x, y]) / (stats.norm.pdf(x) * stats.norm.pdf(y))
        assert np.allclose(null_density_oracle(g[:, 0], g[:, 1], 0.5), want, rtol=1e-9)

    def test_t_matches_copula_density(self):
        g = np.random.default_rng(2).uniform(0.01, 0.99, (50, 2))
        x, y = stats.t.ppf(g[:, 0], 3), stats.t.ppf(g[:, 1], 3)
        mvt = stats.multivariate_t([0, 0], [[1, 0.4], [0.4, 1]], df=3)
        want = mvt.pdf(np.c_[x, y]) / (stats.t.pdf(x, 3) * stats.t.pdf(y, 3))
        assert np.allclose(null_density_oracle(g[:, 0], g[:, 1], 0.4, "t", 3), want, rtol=1e-9)

    @given(st.floats(1e-6, 1 - 1e-6), st.floats(1e-6, 1 - 1e-6), st.floats(-0.9, 0.9))
    def test_central_symmetry(self, a, b, r):
        assert null_density_oracle(a, b, r) == pytest.approx(null_density_oracle(1 - a, 1 - b, r), rel=1e-9)

    def test_integrates_to_one(self):
        # substitute p = Phi(x) so the integrand is smooth on R^2
        def integrand(y, x):
            return null_density_oracle(special.ndtr(x), special.ndtr(y), 0.5) * stats.norm.pdf(x) * stats.norm.pdf(y)

        val, _ = integrate.dblquad(integrand, -8, 8, -8, 8, epsabs=1e-9)
        assert abs(val - 1.0) < 1e-4

    def test_errors(self):
        with pytest.raises(ValueError):
            null_density_oracle(0.3, 0.3, 1.0)
        with pytest.raises(ValueError):
            null_density_oracle(0.3, 0.3, 0.1, "t")
        with pytest.raises(ValueError):
            null_density_oracle(0.3, 0.3, 0.1, "laplace")
