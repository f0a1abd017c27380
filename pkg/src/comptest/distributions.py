"""
Reference distributions and reproducible random streams.

The null laws used for calibration are the standard normal (quadratic
statistic), a Gumbel-type extreme-value law (maximum statistic), chi-square
with four degrees of freedom (Fisher combination) and the standard Cauchy
(Cauchy combination).
"""

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

_SQRT_PI = np.sqrt(np.pi)
_MASK64 = (1 << 64) - 1


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def std_normal_cdf(x):
    """Standard normal CDF, accurate to double precision in both tails."""
    return special.ndtr(x)


def std_normal_upper_quantile(alpha):
    """z such that P(Z > z) = alpha."""
    _check_alpha(alpha)
    return float(-special.ndtri(alpha))


def gumbel_null_cdf(y):
    r"""Limiting null CDF of the centred maximum statistic.

    :math:`F(y) = \exp(-\pi^{-1/2} e^{-y/2})`.
    """
    return np.exp(-np.exp(-0.5 * np.asarray(y, dtype=float)) / _SQRT_PI)


def gumbel_null_sf(y):
    """``1 - gumbel_null_cdf(y)`` without cancellation for large `y`."""
    return -np.expm1(-np.exp(-0.5 * np.asarray(y, dtype=float)) / _SQRT_PI)


def gumbel_upper_quantile(alpha):
    """y with ``1 - gumbel_null_cdf(y) = alpha``."""
    _check_alpha(alpha)
    return float(-2.0 * np.log(-_SQRT_PI * np.log1p(-alpha)))


def chi2_upper_quantile(alpha, df):
    """Upper `alpha` quantile of the chi-square distribution with `df` dof."""
    _check_alpha(alpha)
    if df <= 0:
        raise ValueError(f"df must be positive, got {df!r}")
    return float(stats.chi2.isf(alpha, df))


def chi2_sf(x, df):
    """Upper tail probability of the chi-square distribution."""
    return stats.chi2.sf(x, df)


def cauchy_upper_quantile(alpha):
    """Upper `alpha` quantile of the standard Cauchy, ``tan((0.5 - alpha) pi)``."""
    _check_alpha(alpha)
    return float(np.tan((0.5 - alpha) * np.pi))


def cauchy_sf(c):
    """Upper tail of the standard Cauchy, ``0.5 - arctan(c) / pi``.

    Evaluated as ``arctan2(1, c) / pi`` which is the same function but keeps
    relative precision when `c` is huge.
    """
    return np.arctan2(1.0, np.asarray(c, dtype=float)) / np.pi


def stable_hash(*parts):
    """Deterministic unsigned 64-bit hash of a tuple of simple values.

    Python's builtin ``hash`` is salted per process, so it cannot be used to
    derive seeds that must agree across runs.
    """
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class RngStream:
    """Named, reproducible random stream.

    Two streams with equal ``(seed, stream_id)`` yield identical draws; any
    other pair gives statistically independent sequences (numpy
    ``SeedSequence`` spawn keys).
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def generator(self):
        """A fresh ``numpy.random.Generator`` positioned at the stream start."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))

    def derive(self, *keys):
        """Child stream keyed by this stream and `keys`."""
        return RngStream(self.seed, stable_hash(self.stream_id, *keys))


def as_generator(rng):
    """Accept an RngStream, a Generator, an int seed or None."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def sample_std_normal_matrix(rng, n, p):
    """n x p matrix of iid N(0, 1) draws."""
    if n < 1 or p < 1:
        raise ValueError(f"need n, p >= 1, got ({n}, {p})")
    return as_generator(rng).standard_normal((n, p))


def sample_std_gamma_matrix(rng, n, p, shape):
    """n x p matrix of iid Gamma(shape, scale=1) draws."""
    if not shape > 0:
        raise ValueError(f"shape must be positive, got {shape!r}")
    if n < 1 or p < 1:
        raise ValueError(f"need n, p >= 1, got ({n}, {p})")
    return as_generator(rng).standard_gamma(shape, size=(n, p))
