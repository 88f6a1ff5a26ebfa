"""n-matrix means on the SPD cone and the inequality reports around them.

The transport barycenter is computed by fixed-point iteration on the
nonlinear matrix equation X = sum_j w_j (X^{1/2} A_j X^{1/2})^{1/2}; the
Riemannian (Karcher) mean by the unit-step gradient fixed point.  Convergence
is always certified by the residual of the defining equation, never by step
size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .means_geometry import geometric_mean
from .spd_core import (
    NotPositiveDefiniteError,
    SpdMatrix,
    SymMatrix,
    apply_spectral,
    congruence,
    frobenius_norm,
    loewner_geq,
    operator_norm,
)


class SolverError(Exception):
    """Iteration produced a non-SPD intermediate or was asked not to tolerate
    non-convergence."""


@dataclass(frozen=True)
class WeightVector:
    """Positive probability vector.

    Construction normalizes the sum to one; input that already sums to one
    within 1e-12 is kept bit for bit, so normalization is idempotent and
    serialized weights round-trip exactly.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.values, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if not np.isfinite(w).all() or np.any(w <= 0.0):
            raise ValueError("weights must be finite and strictly positive")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-12:
            w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "values", w)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MeanProblem:
    """A tuple of SPD matrices of equal dimension with matching weights."""

    matrices: tuple[SpdMatrix, ...]
    weights: WeightVector

    def __post_init__(self) -> None:
        if len(self.matrices) < 1:
            raise ValueError("n >= 1 required: at least one matrix")
        if len(self.weights) != len(self.matrices):
            raise ValueError(
                f"{len(self.weights)} weights for {len(self.matrices)} matrices"
            )
        dims = {a.dim for a in self.matrices}
        if len(dims) != 1:
            raise ValueError(f"matrices must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, "matrices", tuple(self.matrices))

    @property
    def dim(self) -> int:
        return self.matrices[0].dim

    @property
    def n(self) -> int:
        return len(self.matrices)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the fixed-point solvers.

    ``initial`` is "arithmetic_mean", "identity", or an explicit SpdMatrix.
    """

    rel_tol: float = 1e-12
    max_iter: int = 500
    initial: str | SpdMatrix = "arithmetic_mean"

    def __post_init__(self) -> None:
        if self.rel_tol <= 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if isinstance(self.initial, str) and self.initial not in ("arithmetic_mean", "identity"):
            raise ValueError(f"unknown initial point {self.initial!r}")


@dataclass(frozen=True)
class SolverResult:
    """Converged (or truncated) mean with its full residual history.

    ``iterations`` counts applied fixed-point updates; ``converged`` requires
    the final residual to satisfy the tolerance strictly.
    """

    mean: SpdMatrix
    iterations: int
    residual: float
    converged: bool
    residual_history: tuple[float, ...] = field(repr=False)


def arithmetic_mean(p: MeanProblem) -> SpdMatrix:
    acc = np.zeros((p.dim, p.dim))
    for w, a in zip(p.weights.values, p.matrices):
        acc += w * a.entries
    return SpdMatrix(acc)


def harmonic_mean(p: MeanProblem) -> SpdMatrix:
    acc = np.zeros((p.dim, p.dim))
    for w, a in zip(p.weights.values, p.matrices):
        acc += w * apply_spectral(a, "inverse").entries
    return apply_spectral(SpdMatrix(acc), "inverse")


def _mixture_sqrt(x: SpdMatrix, p: MeanProblem) -> np.ndarray:
    """sum_j w_j (X^{1/2} A_j X^{1/2})^{1/2} as a raw array."""
    sqrt_x = apply_spectral(x, "sqrt").entries
    acc = np.zeros((p.dim, p.dim))
    for w, a in zip(p.weights.values, p.matrices):
        mixed = SpdMatrix(congruence(sqrt_x, a).entries)
        acc += w * apply_spectral(mixed, "sqrt").entries
    return (acc + acc.T) / 2.0


def residual(x: SpdMatrix, p: MeanProblem) -> float:
    """Relative Frobenius residual of X = sum_j w_j (X^{1/2} A_j X^{1/2})^{1/2} at x."""
    if x.dim != p.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {p.dim}")
    return frobenius_norm(x.entries - _mixture_sqrt(x, p)) / frobenius_norm(x.entries)


def equivalent_equation_residual(x: SpdMatrix, p: MeanProblem) -> float:
    """Frobenius residual of the equivalent form I = sum_j w_j (A_j # x^{-1})."""
    if x.dim != p.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {p.dim}")
    inv_x = apply_spectral(x, "inverse")
    acc = np.zeros((p.dim, p.dim))
    for w, a in zip(p.weights.values, p.matrices):
        acc += w * geometric_mean(a, inv_x).entries
    return frobenius_norm(np.eye(p.dim) - acc)


def _initial_point(p: MeanProblem, cfg: SolverConfig) -> SpdMatrix:
    if isinstance(cfg.initial, SpdMatrix):
        if cfg.initial.dim != p.dim:
            raise ValueError("initial point has wrong dimension")
        return cfg.initial
    if cfg.initial == "identity":
        eye = np.eye(p.dim)
        return SpdMatrix(eye)
    return arithmetic_mean(p)


def wasserstein_mean(p: MeanProblem, cfg: SolverConfig | None = None) -> SolverResult:
    """Solve X = sum_j w_j (X^{1/2} A_j X^{1/2})^{1/2} by fixed-point iteration.

    The update X <- X^{-1/2} (sum_j w_j (X^{1/2} A_j X^{1/2})^{1/2})^2 X^{-1/2}
    preserves positive definiteness and has the equation's solutions as its
    fixed points; convergence is measured by the equation's own relative
    residual, so a converged result is a certificate independent of the
    update rule.
    """
    cfg = cfg or SolverConfig()
    x = _initial_point(p, cfg)
    history: list[float] = []
    for k in range(cfg.max_iter + 1):
        s = _mixture_sqrt(x, p)
        r = frobenius_norm(x.entries - s) / frobenius_norm(x.entries)
        history.append(r)
        if r <= cfg.rel_tol:
            return SolverResult(x, k, r, True, tuple(history))
        if k == cfg.max_iter:
            break
        inv_sqrt_x = apply_spectral(x, "inv_sqrt").entries
        try:
            x = SpdMatrix(inv_sqrt_x @ s @ s @ inv_sqrt_x)
        except NotPositiveDefiniteError as exc:
            raise SolverError(f"non-SPD intermediate at iteration {k}: {exc}") from exc
    return SolverResult(x, cfg.max_iter, history[-1], False, tuple(history))


def karcher_mean(p: MeanProblem, cfg: SolverConfig | None = None) -> SolverResult:
    """Riemannian (trace-metric) mean by the unit-step gradient fixed point
    X <- X^{1/2} exp(sum_j w_j log(X^{-1/2} A_j X^{-1/2})) X^{1/2}.

    Converged when the gradient term's Frobenius norm falls below rel_tol;
    the residual history records that norm, which is scale free.
    """
    cfg = cfg or SolverConfig()
    x = _initial_point(p, cfg)
    history: list[float] = []
    for k in range(cfg.max_iter + 1):
        inv_sqrt_x = apply_spectral(x, "inv_sqrt").entries
        grad = np.zeros((p.dim, p.dim))
        for w, a in zip(p.weights.values, p.matrices):
            inner = SpdMatrix(congruence(inv_sqrt_x, a).entries)
            grad += w * apply_spectral(inner, "log").entries
        r = frobenius_norm(grad)
        history.append(r)
        if r <= cfg.rel_tol:
            return SolverResult(x, k, r, True, tuple(history))
        if k == cfg.max_iter:
            break
        sqrt_x = apply_spectral(x, "sqrt").entries
        step = apply_spectral(SymMatrix(grad), "exp_of_sym").entries
        try:
            x = SpdMatrix(sqrt_x @ step @ sqrt_x)
        except NotPositiveDefiniteError as exc:
            raise SolverError(f"non-SPD intermediate at iteration {k}: {exc}") from exc
    return SolverResult(x, cfg.max_iter, history[-1], False, tuple(history))


@dataclass(frozen=True)
class BoundsReport:
    """The computable bounds around the transport barycenter.

    ``lower_lie_trotter`` is 2I - sum_j w_j A_j^{-1} (symmetric, possibly
    indefinite).  ``upper_inverse`` is [2I - sum_j w_j A_j]^{-1}, present only
    when sum_j w_j A_j < 2I strictly.  ``opnorm_bound`` is
    (sum_j w_j ||A_j||^{1/2})^2 for the operator norm.
    """

    lower_lie_trotter: SymMatrix
    upper_arithmetic: SpdMatrix
    upper_inverse: SpdMatrix | None
    opnorm_bound: float


def bounds_report(p: MeanProblem) -> BoundsReport:
    eye = np.eye(p.dim)
    arith = arithmetic_mean(p)
    inv_mix = np.zeros((p.dim, p.dim))
    opnorm_root = 0.0
    for w, a in zip(p.weights.values, p.matrices):
        inv_mix += w * apply_spectral(a, "inverse").entries
        opnorm_root += w * math.sqrt(operator_norm(a))
    lower = SymMatrix(2.0 * eye - inv_mix)
    gap = SymMatrix(2.0 * eye - arith.entries)
    upper_inverse: SpdMatrix | None = None
    if loewner_geq(gap, SymMatrix(np.zeros((p.dim, p.dim)))).witness > 0.0:
        try:
            upper_inverse = apply_spectral(SpdMatrix(gap.entries), "inverse")
        except NotPositiveDefiniteError:
            # strictly positive but below the admission threshold; the bound
            # is not invertible at working precision, so report it as absent
            upper_inverse = None
    return BoundsReport(
        lower_lie_trotter=lower,
        upper_arithmetic=arith,
        upper_inverse=upper_inverse,
        opnorm_bound=opnorm_root**2,
    )


@dataclass(frozen=True)
class BoundCheck:
    """One verified inequality with its scalar witness (the margin that makes
    it true; negative means violated beyond tolerance)."""

    check_id: str
    holds: bool
    witness: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "holds", bool(self.holds))
        object.__setattr__(self, "witness", float(self.witness))


def check_bounds(
    report: BoundsReport, mean: SpdMatrix, rel_tol: float = 1e-8
) -> tuple[BoundCheck, ...]:
    """Loewner verdicts of every bound in ``report`` against a computed mean."""
    checks = []
    cmp_upper = loewner_geq(report.upper_arithmetic, mean, rel_tol)
    checks.append(BoundCheck("arithmetic_upper", cmp_upper.holds, cmp_upper.witness))
    cmp_lower = loewner_geq(mean, report.lower_lie_trotter, rel_tol)
    checks.append(BoundCheck("lie_trotter_lower", cmp_lower.holds, cmp_lower.witness))
    slack = report.opnorm_bound + 1e-9 - operator_norm(mean)
    checks.append(BoundCheck("operator_norm", slack >= 0.0, slack))
    if report.upper_inverse is not None:
        cmp_inv = loewner_geq(report.upper_inverse, mean, rel_tol)
        checks.append(BoundCheck("inverse_upper", cmp_inv.holds, cmp_inv.witness))
    return tuple(checks)


@dataclass(frozen=True)
class DetInequalityReport:
    """Determinant of a computed mean against the weighted geometric product
    of the input determinants."""

    det_mean: float
    det_geo_product: float
    holds: bool


def det_inequality_check(p: MeanProblem, mean: SpdMatrix) -> DetInequalityReport:
    """det(mean) >= prod_j det(A_j)^{w_j}, up to 1e-9 of the product's scale.

    Determinants come from eigenvalue products; the geometric product is
    accumulated in log space for stability.
    """
    det_mean = float(np.prod(mean.eigen.lam))
    log_geo = 0.0
    for w, a in zip(p.weights.values, p.matrices):
        log_geo += w * float(np.sum(np.log(a.eigen.lam)))
    det_geo = math.exp(log_geo)
    holds = det_mean >= det_geo - 1e-9 * max(1.0, det_geo)
    return DetInequalityReport(det_mean=det_mean, det_geo_product=det_geo, holds=holds)


@dataclass(frozen=True)
class OrderingReport:
    """Verdicts for the ordering chains among the bounds themselves."""

    checks: tuple[BoundCheck, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)


def bound_ordering_checks(p: MeanProblem, rel_tol: float = 1e-8) -> OrderingReport:
    """Check the chains relating the bounds to each other.

    Always: 2I - sum w_j A_j^{-1} <= [sum w_j A_j^{-1}]^{-1} (the harmonic
    mean), and the scalar sharpness (sum w_j ||A_j||^{1/2})^2 <= sum w_j ||A_j||.
    When sum w_j A_j < 2I: [2I - sum w_j A_j]^{-1} >= sum w_j A_j.
    """
    report = bounds_report(p)
    harm = harmonic_mean(p)
    checks = []
    cmp_harm = loewner_geq(harm, report.lower_lie_trotter, rel_tol)
    checks.append(BoundCheck("harmonic_above_lower", cmp_harm.holds, cmp_harm.witness))
    opnorm_mix = sum(
        w * operator_norm(a) for w, a in zip(p.weights.values, p.matrices)
    )
    slack = opnorm_mix - report.opnorm_bound
    tol = rel_tol * max(1.0, opnorm_mix)
    checks.append(BoundCheck("opnorm_bound_sharper", slack >= -tol, slack))
    if report.upper_inverse is not None:
        cmp_inv = loewner_geq(report.upper_inverse, report.upper_arithmetic, rel_tol)
        checks.append(
            BoundCheck("inverse_above_arithmetic", cmp_inv.holds, cmp_inv.witness)
        )
    return OrderingReport(checks=tuple(checks))
