"""
Simulation designs for size and power studies.

Log-basis vectors are drawn either from a multivariate normal or from a
linear transform of standardized Gamma(10) variables, with AR(1) or random
block-sparse covariance. Group 1 has mean zero; group 2 has an equal-valued
signal on a random support whose squared norm is a fixed multiple of
``sqrt(tr(Omega^2))``. CLR data are obtained by centering each log-basis
row, which is what the CLR transform does to ``exp(delta)`` after closure.
"""

from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .distributions import (RngStream, as_generator, sample_std_gamma_matrix,
                            sample_std_normal_matrix)
from .twosample import TwoSampleClr

COV_FAMILIES = ("ar1", "block_sparse")
FRAMEWORKS = ("gaussian", "gamma")
GAMMA_SHAPE = 10.0


def build_ar1(p, rho=0.5):
    """AR(1) covariance with entries ``rho ** |i - j|``."""
    if not abs(rho) < 1:
        raise ValueError(f"|rho| must be < 1, got {rho!r}")
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    idx = np.arange(p)
    return rho ** np.abs(idx[:, np.newaxis] - idx[np.newaxis, :]).astype(float)


def block_size(p):
    """Side of the random block, ``floor(3 sqrt(p))``."""
    return int(np.floor(3.0 * np.sqrt(p)))


def build_block_sparse(p, rng):
    """Random sparse block covariance.

    The leading q x q block is ``B + eps I`` where B is symmetric with zero
    diagonal and each strictly-lower entry is zero with probability 1/2 and
    otherwise uniform on [-1, -0.5] U [0.5, 1]; ``eps`` lifts the smallest
    eigenvalue to 0.05. The trailing block is the identity.
    """
    if p < 9:
        raise ValueError(f"block-sparse covariance needs p >= 9, got {p}")
    gen = as_generator(rng)
    q = block_size(p)
    rows, cols = np.tril_indices(q, k=-1)
    m = rows.size
    nonzero = gen.random(m) < 0.5
    magnitude = gen.uniform(0.5, 1.0, m)
    sign = np.where(gen.random(m) < 0.5, -1.0, 1.0)
    b = np.zeros((q, q))
    b[rows, cols] = np.where(nonzero, sign * magnitude, 0.0)
    b = b + b.T
    eps = max(-np.linalg.eigvalsh(b)[0], 0.0) + 0.05
    omega = np.eye(p)
    omega[:q, :q] = b + eps * np.eye(q)
    return omega


def signal_support_size(p, sparsity_fraction):
    # round half up; Python's round() is banker's rounding
    return int(np.floor(sparsity_fraction * p + 0.5))


def build_signal(p, sparsity_fraction, cov, rng, target_ratio=0.1):
    """Mean vectors for the two groups.

    Returns
    -------
    nu1, nu2 : numpy.ndarray
        ``nu1`` is zero. ``nu2`` has ``round(sparsity_fraction * p)`` equal
        entries on a uniformly random support, sized so that
        ``||nu2||^2 / sqrt(tr(cov^2)) == target_ratio``.
    """
    if not 0.0 <= sparsity_fraction <= 1.0:
        raise ValueError(f"sparsity_fraction must lie in [0, 1], got {sparsity_fraction!r}")
    if not target_ratio > 0:
        raise ValueError(f"target_ratio must be positive, got {target_ratio!r}")
    nu1 = np.zeros(p)
    nu2 = np.zeros(p)
    if sparsity_fraction == 0:
        return nu1, nu2
    s = signal_support_size(p, sparsity_fraction)
    if s == 0:
        raise ValueError(
            f"sparsity_fraction={sparsity_fraction} gives no nonzero coordinate at p={p}")
    support = as_generator(rng).choice(p, size=s, replace=False)
    nu2[support] = np.sqrt(target_ratio * np.sqrt(np.sum(cov * cov)) / s)
    return nu1, nu2


def covariance_factor(cov, framework="gaussian"):
    """A matrix F with ``F F^T = cov``.

    Gaussian draws use the Cholesky factor. The Gamma framework uses the
    symmetric-eigendecomposition factor ``Q S^{1/2}`` (for a symmetric
    positive definite matrix this coincides with the SVD).
    """
    if framework == "gaussian":
        return np.linalg.cholesky(cov)
    if framework == "gamma":
        s, q = np.linalg.eigh(cov)
        return q * np.sqrt(np.clip(s, 0.0, None))
    raise ValueError(f"unknown framework {framework!r}; expected one of {FRAMEWORKS}")


def sample_log_basis(framework, nu, cov_factor, n, rng):
    """n log-basis vectors with mean `nu` and covariance ``F F^T``.

    Gamma innovations are centered, ``(u - 10) / sqrt(10)``, so the mean is
    exactly `nu`.
    """
    p = len(nu)
    if framework == "gaussian":
        z = sample_std_normal_matrix(rng, n, p)
    elif framework == "gamma":
        z = (sample_std_gamma_matrix(rng, n, p, GAMMA_SHAPE) - GAMMA_SHAPE) / np.sqrt(GAMMA_SHAPE)
    else:
        raise ValueError(f"unknown framework {framework!r}; expected one of {FRAMEWORKS}")
    return nu + z @ cov_factor.T


def to_clr_samples(log_basis):
    """Center every row; equal to applying the centering projection."""
    log_basis = np.asarray(log_basis, dtype=float)
    return log_basis - log_basis.mean(axis=-1, keepdims=True)


@dataclass(frozen=True)
class CovarianceSpec:
    family: str = "ar1"
    rho: float = 0.5

    def __post_init__(self):
        if self.family not in COV_FAMILIES:
            raise ValueError(f"cov.family: unknown covariance family {self.family!r}; "
                             f"expected one of {COV_FAMILIES}")
        if self.family == "ar1" and not abs(self.rho) < 1:
            raise ValueError(f"cov.rho: |rho| must be < 1, got {self.rho!r}")

    def build(self, p, rng=None):
        if self.family == "ar1":
            return build_ar1(p, self.rho)
        return build_block_sparse(p, rng)


@dataclass(frozen=True)
class SignalSpec:
    sparsity_fraction: float = 0.0
    target_ratio: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.sparsity_fraction <= 1.0:
            raise ValueError(f"signal.sparsity_fraction must lie in [0, 1], "
                             f"got {self.sparsity_fraction!r}")
        if not self.target_ratio > 0:
            raise ValueError(f"signal.target_ratio must be positive, got {self.target_ratio!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of a size/power table."""

    n1: int
    n2: int
    p: int
    cov: CovarianceSpec = field(default_factory=CovarianceSpec)
    signal: SignalSpec = field(default_factory=SignalSpec)
    framework: str = "gaussian"
    alpha: float = 0.05
    replications: int = 500
    master_seed: int = 0

    def __post_init__(self):
        if isinstance(self.cov, dict):
            object.__setattr__(self, "cov", CovarianceSpec(**self.cov))
        if isinstance(self.signal, dict):
            object.__setattr__(self, "signal", SignalSpec(**self.signal))
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"framework: unknown framework {self.framework!r}; "
                             f"expected one of {FRAMEWORKS}")
        if self.n1 < 4 or self.n2 < 4:
            raise ValueError(f"n1, n2: each group needs >= 4 samples, got ({self.n1}, {self.n2})")
        if self.p < 3 or (self.cov.family == "block_sparse" and self.p < 9):
            raise ValueError(f"p: dimension {self.p} too small for {self.cov.family}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha: must lie in (0, 1), got {self.alpha!r}")
        if self.replications < 1:
            raise ValueError(f"replications: must be >= 1, got {self.replications!r}")

    def key(self):
        """Identity of the data-generating process.

        Excludes alpha and the replication count, so the same seed produces
        the same data sets at every level and extending a run only appends.
        """
        return (self.cov.family, float(self.cov.rho), self.framework, int(self.n1),
                int(self.n2), int(self.p), float(self.signal.sparsity_fraction),
                float(self.signal.target_ratio))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class Scenario:
    """Materialized scenario: covariance, factor and means built once.

    Random ingredients come from streams derived from the master seed: the
    covariance from ``(family, p, rho)``, the signal support from
    ``(p, sparsity)`` and each replication from the scenario key and its
    index, so results do not depend on execution order.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        self.root = RngStream(cfg.master_seed)

    @cached_property
    def cov(self):
        c = self.cfg
        return c.cov.build(c.p, self.root.derive("covariance", c.cov.family, c.p, float(c.cov.rho)))

    @cached_property
    def factor(self):
        return covariance_factor(self.cov, self.cfg.framework)

    @cached_property
    def means(self):
        c = self.cfg
        stream = self.root.derive("signal", c.p, float(c.signal.sparsity_fraction))
        return build_signal(c.p, c.signal.sparsity_fraction, self.cov, stream,
                            c.signal.target_ratio)

    def stream(self, rep):
        return self.root.derive("replication", self.cfg.key(), int(rep))

    def sample(self, rep):
        """CLR data for replication `rep`."""
        c = self.cfg
        nu1, nu2 = self.means
        gen = self.stream(rep).generator()
        x = sample_log_basis(c.framework, nu1, self.factor, c.n1, gen)
        y = sample_log_basis(c.framework, nu2, self.factor, c.n2, gen)
        return TwoSampleClr(to_clr_samples(x), to_clr_samples(y))
