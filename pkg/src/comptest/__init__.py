"""
Power-enhanced two-sample mean tests for high-dimensional compositional data.

Count tables are closed and CLR-transformed, then compared with a
maximum-type test (sparse signals), a quadratic-type test (dense signals)
and their Fisher and Cauchy p-value combinations.

>>> import numpy as np
>>> from comptest import TwoSampleClr, run_all_tests, counts_to_clr
>>> rng = np.random.default_rng(0)
>>> x = counts_to_clr(rng.poisson(20, size=(30, 50)))
>>> y = counts_to_clr(rng.poisson(20, size=(30, 50)))
>>> results = run_all_tests(TwoSampleClr(x, y), alpha=0.05)
>>> sorted(results)
['cauchy', 'fisher', 'max', 'quad']
"""

__version__ = "0.1.0"

from .combine import (CombinationWeights, cauchy_statistic, cauchy_test, fisher_statistic,
                      fisher_test, run_all_tests)
from .composition import (alr_inverse, alr_transform, centering_projection, clr_transform,
                          counts_to_clr, filter_low_counts, impute_pseudo_count,
                          to_relative_abundance)
from .harness import (PermutationStudy, RejectionTable, independence_diagnostic,
                      permutation_size_study, power_region_check, run_grid, run_scenario)
from .maxtest import max_p_value, max_statistic, max_test, pooled_variances
from .quadtest import QuadIntermediates, quad_statistic, quad_test, t_statistic, trace_estimators
from .simulate import CovarianceSpec, Scenario, ScenarioConfig, SignalSpec
from .twosample import (DegenerateColumnError, DegenerateVarianceError, TestResult,
                        TwoSampleClr)

__all__ = [
    "CombinationWeights", "CovarianceSpec", "DegenerateColumnError", "DegenerateVarianceError",
    "PermutationStudy", "QuadIntermediates", "RejectionTable", "Scenario", "ScenarioConfig",
    "SignalSpec", "TestResult", "TwoSampleClr", "alr_inverse", "alr_transform",
    "cauchy_statistic", "cauchy_test", "centering_projection", "clr_transform", "counts_to_clr",
    "filter_low_counts", "fisher_statistic", "fisher_test", "impute_pseudo_count",
    "independence_diagnostic", "max_p_value", "max_statistic", "max_test", "permutation_size_study",
    "pooled_variances", "power_region_check", "quad_statistic", "quad_test", "run_all_tests",
    "run_grid", "run_scenario", "t_statistic", "to_relative_abundance", "trace_estimators",
]
