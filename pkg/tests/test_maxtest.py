import numpy as np
import pytest

from comptest import TwoSampleClr
from comptest.distributions import gumbel_upper_quantile
from comptest.maxtest import max_critical_value, max_p_value, max_statistic, max_test, pooled_variances
from comptest.twosample import P_FLOOR, DegenerateColumnError

from oracles import naive_max_statistic, naive_pooled_variances


def test_pooled_variances_hand_example():
    x = np.array([[1.0, 2.0], [3.0, 6.0]])
    y = np.array([[0.0, 1.0], [2.0, 1.0]])
    # col 0: (2 + 2) / 4, col 1: (8 + 0) / 4
    np.testing.assert_allclose(pooled_variances(TwoSampleClr(x, y)), [1.0, 2.0])


def test_pooled_variances_quadratic_scaling(small_pair):
    g = pooled_variances(small_pair)
    g2 = pooled_variances(TwoSampleClr(2 * small_pair.x, 2 * small_pair.y))
    np.testing.assert_allclose(g2, 4 * g, rtol=1e-13)


def test_degenerate_column_is_named():
    x = np.array([[1.0, 5.0], [2.0, 5.0], [0.0, 5.0]])
    y = np.array([[1.0, 5.0], [3.0, 5.0]])
    with pytest.raises(DegenerateColumnError) as info:
        pooled_variances(TwoSampleClr(x, y))
    assert info.value.columns == [1]


def test_constant_groups_are_degenerate():
    x = np.ones((3, 2))
    with pytest.raises(DegenerateColumnError):
        max_test(TwoSampleClr(x, x.copy()))


def test_equal_means_give_zero():
    x = np.array([[1.0, 2.0, 0.0], [3.0, 0.0, 1.0]])
    y = x[::-1].copy()
    stat, _ = max_statistic(TwoSampleClr(x, y))
    assert stat == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_matches_naive_oracle_tiny(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
    stat, j = max_statistic(TwoSampleClr(x, y))
    ref, jref = naive_max_statistic(x, y)
    assert stat == pytest.approx(ref, rel=1e-12)
    assert j == jref
    np.testing.assert_allclose(pooled_variances(TwoSampleClr(x, y)), naive_pooled_variances(x, y),
                               rtol=1e-12)


def test_column_permutation(small_pair):
    perm = np.array([3, 0, 4, 1, 2])
    stat, j = max_statistic(small_pair)
    stat_p, j_p = max_statistic(TwoSampleClr(small_pair.x[:, perm], small_pair.y[:, perm]))
    assert stat_p == pytest.approx(stat, rel=1e-14)
    assert perm[j_p] == j


def test_location_and_scale_invariance(small_pair, rng):
    shift = rng.normal(size=small_pair.p) * 10
    stat, _ = max_statistic(small_pair)
    shifted, _ = max_statistic(TwoSampleClr(small_pair.x + shift, small_pair.y + shift))
    scaled, _ = max_statistic(TwoSampleClr(3.7 * small_pair.x, 3.7 * small_pair.y))
    assert shifted == pytest.approx(stat, rel=1e-10)
    assert scaled == pytest.approx(stat, rel=1e-12)


# -- p-value ------------------------------------------------------------------

def test_p_value_at_centering_point():
    p = 200
    m = 2 * np.log(p) - np.log(np.log(p))
    assert max_p_value(m, p) == pytest.approx(0.4311790581359797565, abs=1e-12)


def test_p_value_floor():
    assert max_p_value(1e6, 500) == P_FLOOR


def test_p_value_monotone():
    grid = np.linspace(0, 40, 400)
    pv = np.array([max_p_value(m, 300) for m in grid])
    assert np.all(np.diff(pv) <= 0)
    # strictly decreasing once away from the upper clamp
    inner = pv[(pv < 1 - 1e-9) & (pv > 1e-14)]
    assert inner.size > 100 and np.all(np.diff(inner) < 0)


@pytest.mark.parametrize("p", [1, 2])
def test_p_value_needs_p_above_e(p):
    with pytest.raises(ValueError):
        max_p_value(3.0, p)


@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1])
def test_statistic_and_p_value_paths_agree(alpha, rng):
    for _ in range(200):
        x = rng.normal(size=(12, 30))
        y = rng.normal(size=(10, 30)) + rng.normal(scale=0.4, size=30)
        res = max_test(TwoSampleClr(x, y), alpha)
        assert res.reject == (res.p_value <= alpha)


def test_critical_value():
    p = 500
    assert max_critical_value(0.05, p) == pytest.approx(
        gumbel_upper_quantile(0.05) + 2 * np.log(p) - np.log(np.log(p)))


def test_identical_groups_not_rejected(rng):
    x = rng.normal(size=(20, 40))
    res = max_test(TwoSampleClr(x, x.copy()))
    assert res.statistic == 0 and not res.reject
    assert res.info["argmax"] in range(40)
