"""Small-parameter limit experiments for the transport barycenter.

For differentiable SPD-valued curves through the identity, the barycenter of
the curve points raised to the power 1/s converges, as s -> 0, to
exp(sum_j w_j gamma_j'(0)).  This module evaluates that limit numerically
over dyadic schedules and checks the first-order derivative of the barycenter
map at the identity tuple by finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barycenter import MeanProblem, SolverConfig, SolverError, WeightVector, wasserstein_mean
from .spd_core import (
    SpdMatrix,
    SymMatrix,
    apply_spectral,
    frobenius_norm,
    identity,
    operator_norm,
)

CURVE_KINDS = ("power", "affine", "exp_line")

# Fixed-point error must stay well below the discretization error of the
# limit, so the trace runner tightens the solver tolerance by default.
TRACE_SOLVER_CONFIG = SolverConfig(rel_tol=1e-13, max_iter=500)


@dataclass(frozen=True)
class CurveSpec:
    """A differentiable SPD-valued curve with gamma(0) = I.

    Kinds: ``power`` is s -> base^s, ``affine`` is s -> I + s * direction
    (admissible only while |s| * ||direction|| < 1), ``exp_line`` is
    s -> exp(s * direction).  ``derivative_at_zero`` is stored at
    construction (log of the base, respectively the direction).
    """

    kind: str
    base: SpdMatrix | None
    direction: SymMatrix | None
    derivative_at_zero: SymMatrix

    @classmethod
    def power(cls, base: SpdMatrix) -> "CurveSpec":
        return cls(
            kind="power",
            base=base,
            direction=None,
            derivative_at_zero=apply_spectral(base, "log"),
        )

    @classmethod
    def affine(cls, direction: SymMatrix) -> "CurveSpec":
        return cls(kind="affine", base=None, direction=direction, derivative_at_zero=direction)

    @classmethod
    def exp_line(cls, direction: SymMatrix) -> "CurveSpec":
        return cls(kind="exp_line", base=None, direction=direction, derivative_at_zero=direction)

    def __post_init__(self) -> None:
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.derivative_at_zero.dim

    def admissible(self, s: float) -> bool:
        if self.kind == "affine":
            return abs(s) * operator_norm(self.direction) < 1.0
        return True


def evaluate_curve(c: CurveSpec, s: float) -> SpdMatrix:
    """gamma(s); exact identity at s = 0 for every kind."""
    s = float(s)
    if s == 0.0:
        return identity(c.dim)
    if c.kind == "power":
        return apply_spectral(c.base, "power", s)
    if c.kind == "affine":
        if not c.admissible(s):
            raise ValueError(
                f"s={s!r} outside the admissible interval of the affine curve"
            )
        return SpdMatrix(np.eye(c.dim) + s * c.direction.entries)
    return apply_spectral(SymMatrix(s * c.direction.entries), "exp_of_sym")


def _check_curves(w: WeightVector, curves: tuple[CurveSpec, ...] | list[CurveSpec]) -> tuple[CurveSpec, ...]:
    curves = tuple(curves)
    if len(curves) != len(w):
        raise ValueError(f"{len(w)} weights for {len(curves)} curves")
    dims = {c.dim for c in curves}
    if len(dims) != 1:
        raise ValueError(f"curves must share one dimension, got {sorted(dims)}")
    return curves


def lie_trotter_value(
    w: WeightVector,
    curves: tuple[CurveSpec, ...] | list[CurveSpec],
    s: float,
    cfg: SolverConfig | None = None,
) -> SpdMatrix:
    """Barycenter of the curve points at parameter s, raised to the power 1/s."""
    curves = _check_curves(w, curves)
    s = float(s)
    if s == 0.0:
        raise ValueError("s must be nonzero")
    cfg = cfg or TRACE_SOLVER_CONFIG
    points = tuple(evaluate_curve(c, s) for c in curves)
    result = wasserstein_mean(MeanProblem(points, w), cfg)
    if not result.converged:
        raise SolverError(
            f"barycenter did not converge at s={s!r} (residual {result.residual:.3e})"
        )
    return apply_spectral(result.mean, "power", 1.0 / s)


def lie_trotter_target(
    w: WeightVector, curves: tuple[CurveSpec, ...] | list[CurveSpec]
) -> SpdMatrix:
    """exp(sum_j w_j gamma_j'(0)), from the derivatives stored on the curves."""
    curves = _check_curves(w, curves)
    acc = np.zeros((curves[0].dim, curves[0].dim))
    for wj, c in zip(w.values, curves):
        acc = acc + wj * c.derivative_at_zero.entries
    return apply_spectral(SymMatrix(acc), "exp_of_sym")


def dyadic_schedule(depth: int) -> tuple[float, ...]:
    """s = 2^-1, ..., 2^-depth (descending)."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return tuple(2.0**-k for k in range(1, depth + 1))


@dataclass(frozen=True)
class LieTrotterTrace:
    """Error of the powered barycenter against the limit target along a
    descending schedule of positive parameters.

    ``negated`` records that the curve points were evaluated at -s.  Points
    where the solver failed are listed in ``failed_s`` and omitted from the
    (matching-length) ``s_values``/``errors`` lists.
    """

    s_values: tuple[float, ...]
    errors: tuple[float, ...]
    target: SpdMatrix
    negated: bool = False
    failed_s: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.s_values) != len(self.errors):
            raise ValueError("s_values and errors length mismatch")
        if any(not np.isfinite(e) for e in self.errors):
            raise ValueError("trace errors must be finite")


def convergence_trace(
    w: WeightVector,
    curves: tuple[CurveSpec, ...] | list[CurveSpec],
    s_schedule: tuple[float, ...] | list[float] | None = None,
    cfg: SolverConfig | None = None,
    negate: bool = False,
) -> LieTrotterTrace:
    """Evaluate the limit error along a schedule; set ``negate`` for the
    mirrored one-sided limit s -> 0^-."""
    curves = _check_curves(w, curves)
    schedule = tuple(float(s) for s in (s_schedule or dyadic_schedule(10)))
    if any(s <= 0.0 for s in schedule) or any(
        schedule[i] <= schedule[i + 1] for i in range(len(schedule) - 1)
    ):
        raise ValueError("schedule must be positive and strictly descending")
    target = lie_trotter_target(w, curves)
    s_ok: list[float] = []
    errors: list[float] = []
    failed: list[float] = []
    for s in schedule:
        try:
            value = lie_trotter_value(w, curves, -s if negate else s, cfg)
        except SolverError:
            failed.append(s)
            continue
        s_ok.append(s)
        errors.append(frobenius_norm(value.entries - target.entries))
    return LieTrotterTrace(
        s_values=tuple(s_ok),
        errors=tuple(errors),
        target=target,
        negated=negate,
        failed_s=tuple(failed),
    )


@dataclass(frozen=True)
class DerivativeCheckReport:
    """Finite-difference errors of the barycenter's derivative at the
    identity tuple against the weighted direction sum, for both signs of the
    step."""

    t_values: tuple[float, ...]
    errors_pos: tuple[float, ...]
    errors_neg: tuple[float, ...]
    direction_sum: SymMatrix


def derivative_at_identity_check(
    w: WeightVector,
    directions: tuple[SymMatrix, ...] | list[SymMatrix],
    t_schedule: tuple[float, ...] | list[float] | None = None,
    cfg: SolverConfig | None = None,
) -> DerivativeCheckReport:
    """Compare (barycenter(I + t X_1, ..., I + t X_n) - I) / t with
    sum_j w_j X_j over a schedule of steps t, both signs."""
    directions = tuple(directions)
    if len(directions) != len(w):
        raise ValueError(f"{len(w)} weights for {len(directions)} directions")
    dims = {d.dim for d in directions}
    if len(dims) != 1:
        raise ValueError(f"directions must share one dimension, got {sorted(dims)}")
    dim = directions[0].dim
    schedule = tuple(float(t) for t in (t_schedule or dyadic_schedule(10)))
    radius = max(operator_norm(d) for d in directions)
    if radius > 0.0 and max(schedule) * radius >= 1.0:
        raise ValueError("largest step leaves the SPD cone for these directions")
    cfg = cfg or TRACE_SOLVER_CONFIG
    target = np.zeros((dim, dim))
    for wj, d in zip(w.values, directions):
        target = target + wj * d.entries
    eye = np.eye(dim)
    errors_pos: list[float] = []
    errors_neg: list[float] = []
    for t in schedule:
        for sign, sink in ((1.0, errors_pos), (-1.0, errors_neg)):
            points = tuple(SpdMatrix(eye + sign * t * d.entries) for d in directions)
            result = wasserstein_mean(MeanProblem(points, w), cfg)
            if not result.converged:
                raise SolverError(f"barycenter did not converge at t={sign * t!r}")
            quotient = (result.mean.entries - eye) / (sign * t)
            sink.append(frobenius_norm(quotient - target))
    return DerivativeCheckReport(
        t_values=schedule,
        errors_pos=tuple(errors_pos),
        errors_neg=tuple(errors_neg),
        direction_sum=SymMatrix(target),
    )
