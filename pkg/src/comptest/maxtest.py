"""
Maximum-type two-sample test on CLR coordinates.

The statistic is the largest squared standardized coordinate-wise mean
difference, scaled by n1 n2 / (n1 + n2). Under the null, after centering by
``2 log p - log log p``, it follows a Gumbel-type law.
"""

import numpy as np

from .distributions import _check_alpha, gumbel_null_sf, gumbel_upper_quantile
from .twosample import DegenerateColumnError, TestResult, clamp_p_value


def pooled_variances(data):
    """Pooled per-coordinate variance with divisor n1 + n2.

    Parameters
    ----------
    data : TwoSampleClr

    Returns
    -------
    numpy.ndarray
        Length-p vector of pooled within-group variances.

    Raises
    ------
    DegenerateColumnError
        If any coordinate has zero pooled variance.
    """
    x, y = data.x, data.y
    ss = ((x - x.mean(axis=0)) ** 2).sum(axis=0) + ((y - y.mean(axis=0)) ** 2).sum(axis=0)
    gamma = ss / (data.n1 + data.n2)
    zero = np.flatnonzero(gamma <= 0)
    if zero.size:
        raise DegenerateColumnError(zero)
    return gamma


def standardized_differences(data):
    """Per-coordinate values whose maximum is the statistic."""
    diff = data.x.mean(axis=0) - data.y.mean(axis=0)
    scale = data.n1 * data.n2 / (data.n1 + data.n2)
    return scale * diff ** 2 / pooled_variances(data)


def max_statistic(data):
    """Maximum-type statistic and the coordinate attaining it.

    Returns
    -------
    stat : float
    argmax : int
        Column index of the coordinate driving the statistic.
    """
    values = standardized_differences(data)
    j = int(np.argmax(values))
    return float(values[j]), j


def _centering(p):
    if p <= np.e:
        raise ValueError(f"the Gumbel centering needs p >= 3, got p={p}")
    logp = np.log(p)
    return 2.0 * logp - np.log(logp)


def max_p_value(m_stat, p):
    """Asymptotic p-value of the maximum statistic in dimension `p`."""
    y = m_stat - _centering(p)
    return clamp_p_value(gumbel_null_sf(y))


def max_critical_value(alpha, p):
    """Rejection threshold on the raw statistic scale."""
    return gumbel_upper_quantile(alpha) + _centering(p)


def max_test(data, alpha=0.05):
    """Level-`alpha` maximum-type test.

    Returns
    -------
    TestResult
        ``info`` carries the arg-max column under key ``"argmax"``.
    """
    _check_alpha(alpha)
    stat, j = max_statistic(data)
    reject = stat >= max_critical_value(alpha, data.p)
    return TestResult("max", stat, max_p_value(stat, data.p), bool(reject), alpha,
                      {"argmax": j})
