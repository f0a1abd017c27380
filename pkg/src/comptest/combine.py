"""
Power-enhanced tests combining the maximum- and quadratic-type p-values.

Fisher's method uses ``-2 (log p_M + log p_Q)`` against chi-square(4); the
Cauchy combination uses a weighted sum of ``tan((0.5 - p) pi)`` against the
standard Cauchy. Both rely on the two component statistics being
asymptotically independent under the null.
"""

from dataclasses import dataclass

import numpy as np

from .distributions import _check_alpha, cauchy_sf, cauchy_upper_quantile, chi2_upper_quantile
from .maxtest import max_test
from .quadtest import quad_test
from .twosample import METHODS, TestResult, clamp_p_value


@dataclass(frozen=True)
class CombinationWeights:
    """Nonnegative Cauchy-combination weights summing to one."""

    w_max: float = 0.5
    w_quad: float = 0.5

    def __post_init__(self):
        if self.w_max < 0 or self.w_quad < 0:
            raise ValueError(f"weights must be nonnegative, got {self}")
        if abs(self.w_max + self.w_quad - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {self.w_max} + {self.w_quad}")

    @classmethod
    def parse(cls, text):
        """Parse ``"wM:wQ"``, e.g. ``"0.5:0.5"``."""
        try:
            wm, wq = (float(v) for v in text.split(":"))
        except ValueError:
            raise ValueError(f"weights must look like 'wM:wQ', got {text!r}") from None
        return cls(wm, wq)


def fisher_statistic(p_m, p_q):
    """``-2 (log p_m + log p_q)`` on clamped p-values."""
    return float(-2.0 * (np.log(clamp_p_value(p_m)) + np.log(clamp_p_value(p_q))))


def fisher_p_value(f_stat):
    # chi-square(4) survival function in closed form
    h = 0.5 * f_stat
    return clamp_p_value(np.exp(-h) * (1.0 + h))


def fisher_test(p_m, p_q, alpha=0.05):
    _check_alpha(alpha)
    f = fisher_statistic(p_m, p_q)
    reject = f >= chi2_upper_quantile(alpha, 4)
    return TestResult("fisher", f, fisher_p_value(f), bool(reject), alpha)


def cauchy_statistic(p_m, p_q, weights=None):
    """Weighted sum of Cauchy-transformed p-values."""
    w = weights or CombinationWeights()
    p_m, p_q = clamp_p_value(p_m), clamp_p_value(p_q)
    return float(w.w_max * np.tan((0.5 - p_m) * np.pi) + w.w_quad * np.tan((0.5 - p_q) * np.pi))


def cauchy_test(p_m, p_q, weights=None, alpha=0.05):
    _check_alpha(alpha)
    c = cauchy_statistic(p_m, p_q, weights)
    reject = c >= cauchy_upper_quantile(alpha)
    return TestResult("cauchy", c, clamp_p_value(cauchy_sf(c)), bool(reject), alpha)


def run_all_tests(data, alpha=0.05, weights=None, methods=METHODS):
    """Run the maximum, quadratic, Fisher and Cauchy tests on one data set.

    The component statistics are computed once and shared by the two
    combination tests.

    Parameters
    ----------
    data : TwoSampleClr
    alpha : float
    weights : CombinationWeights, optional
        Cauchy weights, default equal.
    methods : sequence of str
        Subset of ``("max", "quad", "fisher", "cauchy")`` to report.

    Returns
    -------
    dict
        Method name -> TestResult, in the canonical method order.
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown test method(s): {sorted(unknown)}")
    _check_alpha(alpha)
    methods = set(methods)
    combined = bool(methods & {"fisher", "cauchy"})
    out = {}
    if combined or "max" in methods:
        out["max"] = max_test(data, alpha)
    if combined or "quad" in methods:
        out["quad"] = quad_test(data, alpha)
    if combined:
        p_m, p_q = out["max"].p_value, out["quad"].p_value
        out["fisher"] = fisher_test(p_m, p_q, alpha)
        out["cauchy"] = cauchy_test(p_m, p_q, weights, alpha)
    return {m: out[m] for m in METHODS if m in methods}
