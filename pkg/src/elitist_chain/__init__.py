"""Exact convergence metrics of (1+1) strictly elitist EAs.

The transition submatrix of a strictly elitist (1+1) EA over fitness-sorted
non-optimal states is upper triangular.  With pairwise distinct diagonal
entries its powers, and hence the expected fitness ``F_t``, the relative
approximation error ``E_t`` and the average convergence rate ``R_t``, have
closed forms.  This package computes them, checks them against brute-force
matrix powers, and simulates the EA to compare with experiment.
"""
from ._accel import USE_NUMBA
from .analytics import (
    SpectralErrorModel,
    TrajectoryMetrics,
    UndefinedRateError,
    avg_rate_at,
    bound_violations,
    closed_form_report,
    coefficients,
    error_at,
    exact_error_via_matrix,
    fitness_at,
    series,
)
from .levels import (
    FitnessFamily,
    LevelProblem,
    bitwise_level_chain,
    bound_kernel,
    from_explicit,
    onebit_level_chain,
)
from .simulate import ComparisonReport, EmpiricalSeries, compare, compare_empirical, run_bitstring, run_chain
from .triangular import (
    InvalidKernelError,
    PowerFactors,
    TriangularKernel,
    ValidationReport,
    brute_force_power,
    compute_power_factors,
    kernel_power,
    power_entry,
    validate_kernel,
)

__version__ = "0.1.0"
