"""Checks of the distance inequalities, limits and proof algebra on sampled data."""

from .algebra import (GArgs, branch_values, c0_solve, g_difference_residual, g_difference_rhs,
                      g_identity_residual, g_value)
from .sampling import Region, SamplingError, sample_pairs, sample_points, sample_triples
from .suites import (PROBE_LABEL, SUITES, SuiteConfig, SuiteReport, SuiteSpec, TrendReport,
                     UnsoundSuiteError, check_inequality, check_limit, run_suite)
