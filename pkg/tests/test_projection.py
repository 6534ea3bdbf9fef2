import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from simfdr.numeric import std_normal_quantile
from simfdr.projection import EPS, PValueTable, project, project_all, theta_grid

HALF_PI = math.pi / 2
PROJ_01_02 = 0.066637714865884023811  # 40-digit evaluation at theta = pi/4

probs = st.floats(min_value=1e-9, max_value=1 - 1e-9)
angles = st.floats(min_value=0.0, max_value=HALF_PI)


def test_center_maps_to_center():
    for th in (0.0, 0.3, math.pi / 4, HALF_PI):
        assert project(0.5, 0.5, th) == pytest.approx(0.5, abs=1e-15)


def test_endpoints_return_columns():
    assert project(0.13, 0.77, 0.0) == 0.13
    assert project(0.13, 0.77, HALF_PI) == 0.77


def test_frozen_diagonal_value():
    assert abs(project(0.1, 0.2, math.pi / 4) - PROJ_01_02) < 1e-12


def test_theta_domain():
    with pytest.raises(ValueError):
        project(0.1, 0.2, -0.01)
    with pytest.raises(ValueError):
        project(0.1, 0.2, HALF_PI + 1e-9)


def test_project_all_rows():
    t = PValueTable.from_pairs([(0.1, 0.2), (0.5, 0.5), (0.9, 0.8)])
    s = project_all(t, math.pi / 4)
    assert s.values[0] == pytest.approx(PROJ_01_02, abs=1e-12)
    assert s.values[1] == pytest.approx(0.5, abs=1e-15)
    assert s.values[2] == pytest.approx(1 - PROJ_01_02, abs=1e-12)
    one = project_all(PValueTable([0.5], [0.5]), 0.3)
    assert one.values.tolist() == [0.5]


def test_project_all_endpoint_is_p2():
    t = PValueTable([0.2, 0.4, 0.6], [0.3, 0.01, 0.99])
    assert np.array_equal(project_all(t, HALF_PI).values, t.p2)
    assert np.array_equal(project_all(t, 0.0).values, t.p1)


def test_scores_cached_once():
    t = PValueTable([0.2, 0.4], [0.3, 0.9])
    z = t.z
    project_all(t, 0.4)
    assert t.z is z


def test_table_clamps_and_validates():
    t = PValueTable([0.0, 1.0], [1.0, 0.0])
    assert t.p1.tolist() == [EPS, 1 - EPS]
    with pytest.raises(ValueError):
        PValueTable([0.1, 1.2], [0.1, 0.2])
    with pytest.raises(ValueError):
        PValueTable([], [])
    with pytest.raises(ValueError):
        PValueTable([0.1], [0.1, 0.2])
    with pytest.raises(ValueError):
        PValueTable([np.nan], [0.2])


def test_theta_grid():
    assert theta_grid(2).tolist() == [0.0, HALF_PI]
    assert np.allclose(theta_grid(3), [0, math.pi / 4, HALF_PI], atol=0, rtol=1e-15)
    g = theta_grid(11)
    assert np.allclose(g, [(l - 1) / 10 * HALF_PI for l in range(1, 12)], atol=1e-15)
    assert g[-1] == HALF_PI
    with pytest.raises(ValueError):
        theta_grid(1)


@given(probs, probs, angles)
def test_central_symmetry(p1, p2, th):
    assert abs(project(1 - p1, 1 - p2, th) - (1 - project(p1, p2, th))) <= 1e-9


@given(probs, probs, probs, angles)
def test_monotone_in_each_argument(a, b, p2, th):
    lo, hi = min(a, b), max(a, b)
    assert project(lo, p2, th) <= project(hi, p2, th)
    assert project(p2, lo, th) <= project(p2, hi, th)


@given(probs, probs, angles)
def test_matches_formula(p1, p2, th):
    z = math.cos(th) * std_normal_quantile(p1) + math.sin(th) * std_normal_quantile(p2)
    want = min(max(stats.norm.cdf(z), EPS), 1 - EPS)
    assert abs(project(p1, p2, th) - want) <= 1e-12


def test_uniform_null_projection():
    gen = np.random.default_rng(7)
    t = PValueTable(gen.random(10_000), gen.random(10_000))
    for th in theta_grid(11):
        d = stats.kstest(project_all(t, float(th)).values, "uniform").statistic
        assert d < 1.36 / math.sqrt(10_000)
