"""Shared containers for two-sample tests on CLR coordinates."""

from dataclasses import dataclass, field

import numpy as np

#: p-values are kept inside [P_FLOOR, 1 - P_FLOOR] so log/tan stay finite
P_FLOOR = 1e-15

METHODS = ("max", "quad", "fisher", "cauchy")


class DegenerateColumnError(ValueError):
    """A coordinate has zero pooled variance."""

    def __init__(self, columns):
        self.columns = [int(c) for c in columns]
        super().__init__(
            f"zero pooled variance in column(s) {self.columns[:10]}"
            + (" ..." if len(self.columns) > 10 else ""))


class DegenerateVarianceError(ValueError):
    """The estimated variance of the quadratic statistic is not positive."""


def clamp_p_value(p):
    return float(np.clip(p, P_FLOOR, 1.0 - P_FLOOR))


@dataclass(frozen=True)
class TwoSampleClr:
    """Two groups of CLR-transformed samples, rows are samples.

    Parameters
    ----------
    x : array_like
        n1 x p matrix for the first group.
    y : array_like
        n2 x p matrix for the second group.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        if x.ndim != 2 or y.ndim != 2:
            raise ValueError("both groups must be 2-D (samples x coordinates)")
        if x.shape[1] != y.shape[1]:
            raise ValueError(
                f"groups have different dimensions: {x.shape[1]} vs {y.shape[1]}")
        if x.shape[0] < 2 or y.shape[0] < 2:
            raise ValueError(
                f"each group needs at least 2 samples, got {x.shape[0]} and {y.shape[0]}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("non-finite values in CLR data")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n1(self):
        return self.x.shape[0]

    @property
    def n2(self):
        return self.y.shape[0]

    @property
    def p(self):
        return self.x.shape[1]

    def swapped(self):
        return TwoSampleClr(self.y, self.x)

    def pooled(self):
        """All samples stacked, group 1 first."""
        return np.vstack([self.x, self.y])


@dataclass(frozen=True)
class TestResult:
    """Outcome of one level-alpha test.

    ``reject`` is decided on the statistic scale (statistic >= critical
    value); ``p_value <= alpha`` gives the same answer.
    """

    __test__ = False  # not a pytest class

    method: str
    statistic: float
    p_value: float
    reject: bool
    alpha: float
    info: dict = field(default_factory=dict, compare=False)

    def as_dict(self):
        return {
            "method": self.method,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject": self.reject,
        }
