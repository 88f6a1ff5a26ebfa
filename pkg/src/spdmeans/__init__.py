"""Means of symmetric positive definite matrices under the optimal-transport
(Bures-Wasserstein) geometry: two-matrix geodesics, n-matrix barycenters via
their fixed-point equation, the Riemannian trace-metric mean for comparison,
and a seeded verification suite for every bound and limit statement the
package implements."""

from .barycenter import (
    BoundCheck,
    BoundsReport,
    DetInequalityReport,
    MeanProblem,
    OrderingReport,
    SolverConfig,
    SolverError,
    SolverResult,
    WeightVector,
    arithmetic_mean,
    bound_ordering_checks,
    bounds_report,
    check_bounds,
    det_inequality_check,
    equivalent_equation_residual,
    harmonic_mean,
    karcher_mean,
    residual,
    wasserstein_mean,
)
from .lie_trotter import (
    CurveSpec,
    DerivativeCheckReport,
    LieTrotterTrace,
    convergence_trace,
    derivative_at_identity_check,
    dyadic_schedule,
    evaluate_curve,
    lie_trotter_target,
    lie_trotter_value,
)
from .means_geometry import (
    DistanceBoundReport,
    geodesic_perturbation_bound,
    geometric_mean,
    riemannian_distance,
    wasserstein_distance,
    wasserstein_distance_oracle_2x2,
    wasserstein_geodesic,
)
from .problem_io import (
    ProblemFileError,
    parse_problem,
    random_spd,
    serialize_problem,
)
from .spd_core import (
    EigenDecomposition,
    EighConvergenceError,
    LinearAlgebraError,
    LoewnerComparison,
    NotPositiveDefiniteError,
    NumericalBreakdownError,
    SpdMatrix,
    SpectralDomainError,
    SymMatrix,
    apply_spectral,
    congruence,
    determinant,
    eigh,
    frobenius_norm,
    identity,
    loewner_geq,
    operator_norm,
    trace,
)
from .suite import CheckRecord, EnsembleSpec, SuiteReport, run_instance, run_suite

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "BoundsReport",
    "CheckRecord",
    "CurveSpec",
    "DerivativeCheckReport",
    "DetInequalityReport",
    "DistanceBoundReport",
    "EigenDecomposition",
    "EighConvergenceError",
    "EnsembleSpec",
    "LieTrotterTrace",
    "LinearAlgebraError",
    "LoewnerComparison",
    "MeanProblem",
    "NotPositiveDefiniteError",
    "NumericalBreakdownError",
    "OrderingReport",
    "ProblemFileError",
    "SolverConfig",
    "SolverError",
    "SolverResult",
    "SpdMatrix",
    "SpectralDomainError",
    "SuiteReport",
    "SymMatrix",
    "WeightVector",
    "apply_spectral",
    "arithmetic_mean",
    "bound_ordering_checks",
    "bounds_report",
    "check_bounds",
    "congruence",
    "convergence_trace",
    "derivative_at_identity_check",
    "det_inequality_check",
    "determinant",
    "dyadic_schedule",
    "eigh",
    "equivalent_equation_residual",
    "evaluate_curve",
    "frobenius_norm",
    "geodesic_perturbation_bound",
    "geometric_mean",
    "harmonic_mean",
    "identity",
    "karcher_mean",
    "lie_trotter_target",
    "lie_trotter_value",
    "loewner_geq",
    "operator_norm",
    "parse_problem",
    "random_spd",
    "residual",
    "riemannian_distance",
    "run_instance",
    "run_suite",
    "serialize_problem",
    "trace",
    "wasserstein_distance",
    "wasserstein_distance_oracle_2x2",
    "wasserstein_geodesic",
    "wasserstein_mean",
]
