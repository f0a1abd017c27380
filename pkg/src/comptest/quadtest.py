"""
Quadratic-type two-sample test on CLR coordinates.

``T`` is the U-statistic estimate of the squared L2 distance between the two
mean vectors; it is standardized by a ratio-consistent estimate of its
standard deviation built from leave-out trace estimators of tr(S1^2),
tr(S2^2) and tr(S1 S2). All sums over sample pairs are reductions over Gram
matrices, so the cost is O(n^2 p) rather than O(n^3 p).
"""

from dataclasses import dataclass

import numpy as np

from .distributions import _check_alpha, std_normal_cdf, std_normal_upper_quantile
from .twosample import DegenerateVarianceError, TestResult, clamp_p_value


@dataclass(frozen=True)
class QuadIntermediates:
    t_stat: float
    tr_s1_sq_hat: float
    tr_s2_sq_hat: float
    tr_s1s2_hat: float
    sigma_hat_sq: float


def _offdiag_mean(gram_sum, sq_norms, n):
    # sum_{i != j} X_i^T X_j / (n (n - 1)) from ||sum_i X_i||^2 and sum_i ||X_i||^2
    return (gram_sum - sq_norms) / (n * (n - 1))


def t_statistic(data):
    """U-statistic estimate of ``||mu1 - mu2||^2``."""
    x, y = data.x, data.y
    n1, n2 = data.n1, data.n2
    sx, sy = x.sum(axis=0), y.sum(axis=0)
    within_x = _offdiag_mean(sx @ sx, np.einsum("ij,ij->", x, x), n1)
    within_y = _offdiag_mean(sy @ sy, np.einsum("ij,ij->", y, y), n2)
    between = 2.0 * (sx @ sy) / (n1 * n2)
    return float(within_x + within_y - between)


def _trace_sq_within(gram):
    """tr(S^2) estimate for one group from its Gram matrix X X^T."""
    n = gram.shape[0]
    rows = gram.sum(axis=0)
    diag = np.diag(gram)
    # a[j, k] = (X_j - mean without j, k)^T X_k
    a = gram - (rows[np.newaxis, :] - gram - diag[np.newaxis, :]) / (n - 2)
    total = np.einsum("jk,kj->", a, a) - np.einsum("jj,jj->", a, a)
    return float(total / (n * (n - 1)))


def _trace_between(cross, n1, n2):
    """tr(S1 S2) estimate from the cross Gram matrix X Y^T."""
    # u[l, k] = (X_l - mean of X without l)^T Y_k
    u = cross - (cross.sum(axis=0, keepdims=True) - cross) / (n1 - 1)
    # v[l, k] = (Y_k - mean of Y without k)^T X_l
    v = cross - (cross.sum(axis=1, keepdims=True) - cross) / (n2 - 1)
    return float(np.einsum("lk,lk->", u, v) / (n1 * n2))


def trace_estimators(data):
    """Leave-out estimates of tr(S1^2), tr(S2^2) and tr(S1 S2).

    Parameters
    ----------
    data : TwoSampleClr
        Both groups need at least four samples.

    Returns
    -------
    tuple of float
        ``(tr_s1_sq_hat, tr_s2_sq_hat, tr_s1s2_hat)``.
    """
    if data.n1 < 4 or data.n2 < 4:
        raise ValueError(
            f"trace estimators need n1, n2 >= 4, got ({data.n1}, {data.n2})")
    x, y = data.x, data.y
    return (_trace_sq_within(x @ x.T),
            _trace_sq_within(y @ y.T),
            _trace_between(x @ y.T, data.n1, data.n2))


def sigma_hat_sq(tr1, tr2, tr12, n1, n2):
    return (2.0 * tr1 / (n1 * (n1 - 1)) + 2.0 * tr2 / (n2 * (n2 - 1))
            + 4.0 * tr12 / (n1 * n2))


def quad_statistic(data):
    """Standardized quadratic statistic ``Q = T / sigma_hat``.

    Returns
    -------
    q_stat : float
    inter : QuadIntermediates

    Raises
    ------
    DegenerateVarianceError
        If the variance estimate is not positive. The trace estimators are
        unbiased but not guaranteed nonnegative, so this can happen for very
        small samples.
    """
    t = t_statistic(data)
    tr1, tr2, tr12 = trace_estimators(data)
    s2 = sigma_hat_sq(tr1, tr2, tr12, data.n1, data.n2)
    if not s2 > 0:
        raise DegenerateVarianceError(f"estimated variance of T is {s2!r} <= 0")
    inter = QuadIntermediates(t, tr1, tr2, tr12, float(s2))
    return t / np.sqrt(s2), inter


def quad_p_value(q_stat):
    return clamp_p_value(std_normal_cdf(-q_stat))


def quad_test(data, alpha=0.05):
    """One-sided level-`alpha` quadratic-type test (rejects for large Q)."""
    _check_alpha(alpha)
    q, inter = quad_statistic(data)
    reject = q >= std_normal_upper_quantile(alpha)
    return TestResult("quad", float(q), quad_p_value(q), bool(reject), alpha,
                      {"intermediates": inter})
