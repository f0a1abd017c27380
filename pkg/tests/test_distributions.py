import numpy as np
import pytest

from comptest.distributions import (RngStream, cauchy_sf, cauchy_upper_quantile, chi2_sf,
                                    chi2_upper_quantile, gumbel_null_cdf, gumbel_null_sf,
                                    gumbel_upper_quantile, sample_std_gamma_matrix,
                                    sample_std_normal_matrix, stable_hash, std_normal_cdf)

# reference values below were computed with mpmath at 40 digits
# (quadrature for the normal CDF, root finding on the closed-form chi2(4) tail)
PHI_AT_Z95 = 0.9499999999999999468991872367
GUMBEL_AT_0 = 0.5688209418640202434956078639
CHI2_4_Q05 = 9.487729036781156751700547572
TAN_045PI = 6.313751514675043098979464245
TAN_049PI = 31.82051595377395803933954943


def test_normal_cdf_at_zero():
    assert std_normal_cdf(0.0) == 0.5


def test_normal_cdf_reference_quantile():
    assert abs(std_normal_cdf(1.6448536269514722) - PHI_AT_Z95) < 1e-12


@pytest.mark.parametrize("x", [0.1, 1.0, 2.5, 5.0, 8.0])
def test_normal_cdf_reflection(x):
    assert abs(std_normal_cdf(-x) - (1 - std_normal_cdf(x))) < 1e-12


def test_gumbel_limits_and_value():
    assert gumbel_null_cdf(200.0) == pytest.approx(1.0, abs=1e-15)
    assert gumbel_null_cdf(0.0) == pytest.approx(GUMBEL_AT_0, abs=1e-15)
    assert gumbel_null_cdf(-50.0) < 1e-100


def test_gumbel_monotone_and_bounded():
    grid = np.linspace(-20, 60, 1000)
    f = gumbel_null_cdf(grid)
    assert np.all(np.diff(f) >= 0)
    assert np.all((f >= 0) & (f <= 1))


def test_gumbel_sf_matches_cdf_and_quantile():
    y = np.linspace(-5, 30, 50)
    np.testing.assert_allclose(gumbel_null_sf(y), 1 - gumbel_null_cdf(y), atol=1e-15)
    for a in (0.01, 0.05, 0.5):
        assert gumbel_null_sf(gumbel_upper_quantile(a)) == pytest.approx(a, rel=1e-12)


def test_chi2_quantile_reference():
    assert abs(chi2_upper_quantile(0.05, 4) - CHI2_4_Q05) < 1e-8


def test_chi2_quantile_exponential_median():
    assert chi2_upper_quantile(0.5, 2) == pytest.approx(2 * np.log(2), abs=1e-12)


@pytest.mark.parametrize("alpha", [1e-6, 0.01, 0.05, 0.3, 0.9])
@pytest.mark.parametrize("df", [1, 4, 10])
def test_chi2_roundtrip(alpha, df):
    assert abs(chi2_sf(chi2_upper_quantile(alpha, df), df) - alpha) < 1e-8


@pytest.mark.parametrize("alpha", [0, 1, -0.1, 1.5])
def test_quantiles_reject_bad_alpha(alpha):
    with pytest.raises(ValueError):
        chi2_upper_quantile(alpha, 4)
    with pytest.raises(ValueError):
        cauchy_upper_quantile(alpha)


def test_cauchy_quantiles():
    assert cauchy_upper_quantile(0.5) == pytest.approx(0.0, abs=1e-15)
    assert abs(cauchy_upper_quantile(0.05) - TAN_045PI) < 1e-5
    assert abs(cauchy_upper_quantile(0.01) - TAN_049PI) < 1e-4


@pytest.mark.parametrize("alpha", [0.001, 0.05, 0.5, 0.8])
def test_cauchy_roundtrip(alpha):
    assert cauchy_sf(cauchy_upper_quantile(alpha)) == pytest.approx(alpha, rel=1e-12)


def test_cauchy_sf_monotone_bounded():
    c = np.linspace(-1e3, 1e3, 1001)
    s = cauchy_sf(c)
    assert np.all(np.diff(s) < 0)
    assert np.all((s > 0) & (s < 1))


# -- random streams -----------------------------------------------------------

def test_stream_determinism():
    a = sample_std_normal_matrix(RngStream(7, 3), 4, 5)
    b = sample_std_normal_matrix(RngStream(7, 3), 4, 5)
    np.testing.assert_array_equal(a, b)


def test_distinct_streams_differ():
    a = sample_std_normal_matrix(RngStream(7, 3), 50, 5)
    b = sample_std_normal_matrix(RngStream(7, 4), 50, 5)
    c = sample_std_normal_matrix(RngStream(8, 3), 50, 5)
    assert not np.allclose(a, b) and not np.allclose(a, c)
    # no detectable correlation between sibling streams
    assert abs(np.corrcoef(a.ravel(), b.ravel())[0, 1]) < 0.2


def test_derive_is_stable():
    s = RngStream(1).derive("replication", ("ar1", 0.5), 3)
    assert s == RngStream(1).derive("replication", ("ar1", 0.5), 3)
    assert s != RngStream(1).derive("replication", ("ar1", 0.5), 4)
    assert stable_hash("a", 1) == stable_hash("a", 1)


def test_normal_moments():
    z = sample_std_normal_matrix(RngStream(11), 1000, 1000)
    assert abs(z.mean()) < 4e-3
    assert abs(z.var() - 1) < 0.01


def test_gamma_moments_and_support():
    u = sample_std_gamma_matrix(RngStream(12), 1000, 1000, 10.0)
    assert abs(u.mean() - 10) < 4 * np.sqrt(10) / 1e3
    assert abs(u.var() / 10 - 1) < 0.02
    assert np.all(u > 0)


def test_gamma_determinism():
    a = sample_std_gamma_matrix(RngStream(5, 1), 3, 4, 10.0)
    np.testing.assert_array_equal(a, sample_std_gamma_matrix(RngStream(5, 1), 3, 4, 10.0))


@pytest.mark.parametrize("shape", [0, -1])
def test_gamma_bad_shape(shape):
    with pytest.raises(ValueError):
        sample_std_gamma_matrix(RngStream(1), 2, 2, shape)
