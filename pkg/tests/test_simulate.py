import numpy as np
import pytest

from comptest.composition import clr_transform, to_relative_abundance
from comptest.distributions import RngStream
from comptest.simulate import (CovarianceSpec, Scenario, ScenarioConfig, block_size, build_ar1,
                               build_block_sparse, build_signal, covariance_factor,
                               sample_log_basis, signal_support_size, to_clr_samples)


def test_ar1_small_examples():
    np.testing.assert_allclose(build_ar1(3, 0.5), [[1, .5, .25], [.5, 1, .5], [.25, .5, 1]])
    np.testing.assert_array_equal(build_ar1(4, 0.0), np.eye(4))


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_ar1_bad_rho(rho):
    with pytest.raises(ValueError):
        build_ar1(5, rho)


@pytest.mark.parametrize("p,q", [(9, 9), (100, 30), (200, 42), (500, 67), (1000, 94)])
def test_block_size(p, q):
    assert block_size(p) == q


@pytest.mark.parametrize("seed", range(5))
def test_block_sparse_structure(seed):
    p = 200
    omega = build_block_sparse(p, RngStream(seed))
    q = block_size(p)
    assert np.linalg.eigvalsh(omega)[0] >= 0.05 - 1e-10
    np.testing.assert_array_equal(omega, omega.T)
    np.testing.assert_array_equal(omega[q:, q:], np.eye(p - q))
    assert not omega[:q, q:].any()
    diag = np.diag(omega)[:q]
    assert np.allclose(diag, diag[0])
    off = omega[:q, :q][np.tril_indices(q, -1)]
    nz = off[off != 0]
    assert np.all((np.abs(nz) >= 0.5) & (np.abs(nz) <= 1.0))
    # about half of the lower entries are nonzero
    assert abs(nz.size / off.size - 0.5) < 0.06


def test_block_sparse_deterministic():
    np.testing.assert_array_equal(build_block_sparse(100, RngStream(3)),
                                  build_block_sparse(100, RngStream(3)))


@pytest.mark.parametrize("p,frac,s", [(100, 0.01, 1), (200, 0.01, 2), (200, 0.05, 10),
                                      (500, 0.01, 5), (50, 0.01, 1), (150, 0.01, 2)])
def test_support_size_rounds_half_up(p, frac, s):
    assert signal_support_size(p, frac) == s


@pytest.mark.parametrize("frac", [0.01, 0.2, 0.5])
def test_signal_calibration(frac):
    cov = build_ar1(200, 0.5)
    nu1, nu2 = build_signal(200, frac, cov, RngStream(1))
    assert not nu1.any()
    assert (nu2 @ nu2) / np.sqrt(np.sum(cov * cov)) == pytest.approx(0.1, rel=1e-12)
    values = nu2[nu2 != 0]
    assert values.size == signal_support_size(200, frac)
    assert np.allclose(values, values[0])


def test_zero_signal():
    _, nu2 = build_signal(100, 0.0, np.eye(100), RngStream(0))
    assert not nu2.any()


def test_signal_too_sparse_for_p():
    with pytest.raises(ValueError):
        build_signal(20, 0.01, np.eye(20), RngStream(0))


@pytest.mark.parametrize("framework", ["gaussian", "gamma"])
def test_factor_reproduces_covariance(framework):
    cov = build_block_sparse(100, RngStream(2))
    f = covariance_factor(cov, framework)
    np.testing.assert_allclose(f @ f.T, cov, atol=1e-10)


@pytest.mark.parametrize("framework", ["gaussian", "gamma"])
def test_sample_covariance(framework):
    p = 6
    cov = build_ar1(p, 0.5)
    f = covariance_factor(cov, framework)
    x = sample_log_basis(framework, np.zeros(p), f, 50_000, RngStream(9).generator())
    emp = np.cov(x, rowvar=False)
    assert np.max(np.abs(emp - cov)) < 0.05
    assert np.max(np.abs(x.mean(axis=0))) < 0.03


def test_gamma_innovations_are_skewed():
    x = sample_log_basis("gamma", np.zeros(3), np.eye(3), 50_000, RngStream(4).generator())
    centred = x - x.mean(axis=0)
    skew = (centred ** 3).mean(axis=0) / centred.std(axis=0) ** 3
    # standardized Gamma(10) has skewness 2 / sqrt(10)
    np.testing.assert_allclose(skew, 2 / np.sqrt(10), atol=0.1)


def test_row_centering_equals_full_clr_path():
    rng = np.random.default_rng(0)
    delta = rng.normal(size=(20, 30))
    via_counts = clr_transform(to_relative_abundance(np.exp(delta)))
    np.testing.assert_allclose(to_clr_samples(delta), via_counts, atol=1e-10)


@pytest.mark.parametrize("kwargs,field", [
    (dict(framework="poisson"), "framework"),
    (dict(cov={"family": "banded"}), "cov.family"),
    (dict(cov={"rho": 1.2}), "cov.rho"),
    (dict(n1=3), "n1"),
    (dict(p=2), "p"),
    (dict(alpha=0.0), "alpha"),
    (dict(replications=0), "replications"),
    (dict(signal={"sparsity_fraction": 1.5}), "signal.sparsity_fraction"),
])
def test_config_validation_names_field(kwargs, field):
    base = dict(n1=10, n2=10, p=20)
    base.update(kwargs)
    with pytest.raises(ValueError, match=field):
        ScenarioConfig(**base)


def test_config_dict_roundtrip():
    cfg = ScenarioConfig(10, 12, 30, cov=CovarianceSpec("block_sparse"),
                         signal={"sparsity_fraction": 0.1}, framework="gamma")
    assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg


def test_scenario_replications_are_reproducible_and_distinct():
    cfg = ScenarioConfig(8, 9, 20, signal={"sparsity_fraction": 0.1})
    a, b = Scenario(cfg), Scenario(cfg)
    np.testing.assert_array_equal(a.sample(3).x, b.sample(3).x)
    assert not np.allclose(a.sample(3).x, a.sample(4).x)
    s = a.sample(0)
    assert s.x.shape == (8, 20) and s.y.shape == (9, 20)
    np.testing.assert_allclose(s.x.sum(axis=1), 0.0, atol=1e-12)


def test_replication_stream_ignores_alpha_and_count():
    a = Scenario(ScenarioConfig(8, 9, 20, alpha=0.05, replications=10))
    b = Scenario(ScenarioConfig(8, 9, 20, alpha=0.1, replications=99))
    np.testing.assert_array_equal(a.sample(5).y, b.sample(5).y)
