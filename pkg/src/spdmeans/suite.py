"""Seeded verification suite.

Every inequality, identity, and limit statement handled by this package is
re-checked here over deterministic random ensembles.  Checks are grouped in
families selectable from the CLI; each instance derives its own 64-bit seed
from (suite seed, stream name, index) so that any failing record can be
reproduced in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import barycenter as bc
from . import lie_trotter as lt
from . import means_geometry as mg
from .problem_io import derive_seed, dumps_canonical, random_orthogonal, spd_from_rng
from .spd_core import (
    SpdMatrix,
    SymMatrix,
    apply_spectral,
    congruence,
    determinant,
    frobenius_norm,
    loewner_geq,
    operator_norm,
)

FAMILIES = ("metric", "geomean", "bounds", "det", "invariance", "lie-trotter")

LOEWNER_TOL = 1e-8
REL_TOL = 1e-9


@dataclass(frozen=True)
class EnsembleSpec:
    """Deterministic ensemble description; identical spec, identical ensemble."""

    seed: int = 42
    count: int = 200
    n_range: tuple[int, int] = (2, 5)
    dim_range: tuple[int, int] = (2, 8)
    condition_max: float = 100.0

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.n_range[0] < 1 or self.n_range[0] > self.n_range[1]:
            raise ValueError(f"bad n_range {self.n_range}")
        if self.dim_range[0] < 1 or self.dim_range[0] > self.dim_range[1]:
            raise ValueError(f"bad dim_range {self.dim_range}")
        if self.condition_max < 1.0:
            raise ValueError("condition_max must be at least 1")


@dataclass(frozen=True)
class CheckRecord:
    """One verified statement on one instance.

    ``stream`` plus ``instance_seed`` is enough to re-run the instance;
    ``witness`` holds the scalars that decided the verdict.
    """

    check_id: str
    stream: str
    index: int
    instance_seed: int
    passed: bool
    witness: dict[str, float]


@dataclass(frozen=True)
class SuiteReport:
    spec: EnsembleSpec
    families: tuple[str, ...]
    records: tuple[CheckRecord, ...] = field(repr=False)

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def passes(self) -> int:
        return sum(1 for r in self.records if r.passed)

    @property
    def failures(self) -> int:
        return self.total - self.passes

    @property
    def all_passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "ensemble": {
                "seed": self.spec.seed,
                "count": self.spec.count,
                "n_range": list(self.spec.n_range),
                "dim_range": list(self.spec.dim_range),
                "condition_max": self.spec.condition_max,
            },
            "families": list(self.families),
            "checks": [
                {
                    "check_id": r.check_id,
                    "stream": r.stream,
                    "index": r.index,
                    "instance_seed": r.instance_seed,
                    "passed": r.passed,
                    "witness": r.witness,
                }
                for r in self.records
            ],
            "summary": {
                "total": self.total,
                "passes": self.passes,
                "failures": self.failures,
            },
        }
        return dumps_canonical(doc) + "\n"

    def summary_line(self) -> str:
        verdict = "PASS" if self.all_passed else "FAIL"
        return (
            f"{verdict}: {self.passes}/{self.total} checks passed "
            f"(families: {', '.join(self.families)}; seed={self.spec.seed}, "
            f"count={self.spec.count})"
        )


def _rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    return frobenius_norm(a - b) / max(frobenius_norm(b), 1e-300)


def _draw_problem(rng: np.random.Generator, spec: EnsembleSpec) -> bc.MeanProblem:
    n = int(rng.integers(spec.n_range[0], spec.n_range[1] + 1))
    dim = int(rng.integers(spec.dim_range[0], spec.dim_range[1] + 1))
    mats = tuple(spd_from_rng(rng, dim, spec.condition_max) for _ in range(n))
    weights = bc.WeightVector(rng.uniform(0.2, 1.0, size=n))
    return bc.MeanProblem(mats, weights)


def _check(name: str, passed, witness: dict[str, float]) -> tuple[str, bool, dict[str, float]]:
    return name, bool(passed), {k: float(v) for k, v in witness.items()}


# ---------------------------------------------------------------------------
# metric family


def _run_metric_axioms(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    dim = int(rng.integers(spec.dim_range[0], spec.dim_range[1] + 1))
    a = spd_from_rng(rng, dim, spec.condition_max)
    b = spd_from_rng(rng, dim, spec.condition_max)
    c = spd_from_rng(rng, dim, spec.condition_max)
    d_ab = mg.wasserstein_distance(a, b)
    d_ba = mg.wasserstein_distance(b, a)
    d_bc = mg.wasserstein_distance(b, c)
    d_ac = mg.wasserstein_distance(a, c)
    checks = [
        _check("metric.symmetry", abs(d_ab - d_ba) <= 1e-10, {"diff": abs(d_ab - d_ba)})
    ]
    # self distance through an independently rebuilt copy (fresh eigensolve)
    d_self = mg.wasserstein_distance(a, SpdMatrix(np.array(a.entries)))
    indiscernible = True
    if d_ab <= 1e-12:
        indiscernible = frobenius_norm(a.entries - b.entries) <= 1e-8 * frobenius_norm(a.entries)
    checks.append(
        _check(
            "metric.identity",
            d_self <= 1e-10 and indiscernible,
            {"self_distance": d_self, "cross_distance": d_ab},
        )
    )
    slack = d_ab + d_bc - d_ac
    checks.append(_check("metric.triangle", slack >= -1e-9, {"slack": slack}))
    return checks


def _run_metric_oracle(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    a = spd_from_rng(rng, 2, spec.condition_max)
    b = spd_from_rng(rng, 2, spec.condition_max)
    formula = mg.wasserstein_distance(a, b)
    oracle = mg.wasserstein_distance_oracle_2x2(a, b, grid_size=720)
    diff = abs(formula - oracle)
    return [_check("metric.oracle_2x2", diff <= 1e-6, {"diff": diff, "formula": formula})]


def _run_metric_perturbation(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    dim = int(rng.integers(spec.dim_range[0], min(spec.dim_range[1], 6) + 1))
    a = spd_from_rng(rng, dim, spec.condition_max)
    b = spd_from_rng(rng, dim, spec.condition_max)
    c = spd_from_rng(rng, dim, spec.condition_max)
    t = float(rng.uniform(0.0, 1.0))
    rep = mg.geodesic_perturbation_bound(a, b, c, t)
    return [
        _check(
            "metric.geodesic_perturbation",
            rep.lhs <= rep.rhs + 1e-9,
            {"lhs": rep.lhs, "rhs": rep.rhs, "lambda1": rep.lambda1, "t": t},
        )
    ]


# ---------------------------------------------------------------------------
# geomean family


def _run_geomean_pair(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    dim = int(rng.integers(spec.dim_range[0], spec.dim_range[1] + 1))
    a = spd_from_rng(rng, dim, spec.condition_max)
    b = spd_from_rng(rng, dim, spec.condition_max)
    t = float(rng.uniform(0.05, 0.95))
    checks = []

    mid = mg.geometric_mean(a, b)
    inv_a = apply_spectral(a, "inverse").entries
    riccati = _rel_diff(mid.entries @ inv_a @ mid.entries, b.entries)
    checks.append(_check("geomean.riccati", riccati <= 1e-10, {"residual": riccati}))

    gm_t = mg.geometric_mean(a, b, t)
    rev = _rel_diff(gm_t.entries, mg.geometric_mean(b, a, 1.0 - t).entries)
    checks.append(_check("geomean.reversal", rev <= REL_TOL, {"diff": rev}))

    # congruence invariance under a random nonsingular transform
    x = random_orthogonal(rng, dim) * np.exp(rng.uniform(-1.0, 1.0, size=dim))
    xa = SpdMatrix(congruence(x, a).entries)
    xb = SpdMatrix(congruence(x, b).entries)
    cong = _rel_diff(
        congruence(x, gm_t).entries, mg.geometric_mean(xa, xb, t).entries
    )
    checks.append(_check("geomean.congruence", cong <= REL_TOL, {"diff": cong}))

    inv_mean = apply_spectral(gm_t, "inverse").entries
    inv_pair = mg.geometric_mean(
        apply_spectral(a, "inverse"), apply_spectral(b, "inverse"), t
    ).entries
    inv = _rel_diff(inv_mean, inv_pair)
    checks.append(_check("geomean.inverse", inv <= REL_TOL, {"diff": inv}))

    det_lhs = determinant(gm_t)
    det_rhs = determinant(a) ** (1.0 - t) * determinant(b) ** t
    det_err = abs(det_lhs - det_rhs) / max(1.0, abs(det_rhs))
    checks.append(_check("geomean.determinant", det_err <= REL_TOL, {"diff": det_err}))

    arith = SpdMatrix((1.0 - t) * a.entries + t * b.entries)
    harm = apply_spectral(
        SpdMatrix((1.0 - t) * inv_a + t * apply_spectral(b, "inverse").entries),
        "inverse",
    )
    upper = loewner_geq(arith, gm_t, REL_TOL)
    lower = loewner_geq(gm_t, harm, REL_TOL)
    checks.append(
        _check(
            "geomean.agh_sandwich",
            upper.holds and lower.holds,
            {"upper_witness": upper.witness, "lower_witness": lower.witness},
        )
    )

    s, u = float(rng.uniform(0.0, 1.0)), float(rng.uniform(0.0, 1.0))
    left = mg.wasserstein_geodesic(
        mg.wasserstein_geodesic(a, b, s), mg.wasserstein_geodesic(a, b, t), u
    )
    right = mg.wasserstein_geodesic(a, b, (1.0 - u) * s + u * t)
    affine = _rel_diff(left.entries, right.entries)
    checks.append(_check("geomean.geodesic_affine", affine <= REL_TOL, {"diff": affine, "s": s, "u": u}))

    # two-point closed form: the barycenter solver must land on the geodesic
    problem = bc.MeanProblem((a, b), bc.WeightVector(np.array([1.0 - t, t])))
    solved = bc.wasserstein_mean(problem)
    geo = mg.wasserstein_geodesic(a, b, t)
    two_point = _rel_diff(solved.mean.entries, geo.entries)
    checks.append(
        _check(
            "geomean.two_point_solver",
            solved.converged and two_point <= 1e-8,
            {"diff": two_point, "iterations": solved.iterations, "t": t},
        )
    )
    return checks


# ---------------------------------------------------------------------------
# bounds family


def _run_bounds_golden(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    """Fixed worked 2x2 pair with known means and determinants, reproduced
    regardless of the ensemble parameters."""
    a = SpdMatrix([[1.0, 2.0], [2.0, 5.0]])
    b = SpdMatrix([[4.0, 4.0], [4.0, 5.0]])
    problem = bc.MeanProblem((a, b), bc.WeightVector.uniform(2))
    result = bc.wasserstein_mean(problem)
    golden = np.array([[9.0, 12.0], [12.0, 20.0]]) / 4.0
    mean_err = float(np.max(np.abs(result.mean.entries - golden)))
    det_mean = float(np.prod(result.mean.eigen.lam))
    checks = [
        _check(
            "bounds.golden_mean",
            result.converged and mean_err <= 1e-8,
            {"max_abs_err": mean_err},
        ),
        _check("bounds.golden_det", abs(det_mean - 2.25) <= 1e-8, {"det": det_mean}),
    ]
    karcher = bc.karcher_mean(problem)
    karcher_err = float(
        np.max(np.abs(karcher.mean.entries - np.array([[1.6641, 2.2188], [2.2188, 4.1603]])))
    )
    det_karcher = float(np.prod(karcher.mean.eigen.lam))
    checks.append(
        _check(
            "bounds.golden_karcher",
            karcher.converged and karcher_err <= 5e-4 and abs(det_karcher - 2.0) <= 1e-3,
            {"max_abs_err": karcher_err, "det": det_karcher},
        )
    )
    return checks


def _run_bounds_problem(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    problem = _draw_problem(rng, spec)
    result = bc.wasserstein_mean(problem)
    checks = [
        _check(
            "bounds.fixed_point_residual",
            result.converged and result.residual <= 1e-12,
            {"residual": result.residual, "iterations": result.iterations},
        )
    ]
    eq_res = bc.equivalent_equation_residual(result.mean, problem)
    checks.append(
        _check("bounds.equivalent_residual", eq_res <= 1e-10, {"residual": eq_res})
    )
    report = bc.bounds_report(problem)
    for item in bc.check_bounds(report, result.mean, LOEWNER_TOL):
        checks.append(_check(f"bounds.{item.check_id}", item.holds, {"witness": item.witness}))
    for item in bc.bound_ordering_checks(problem, LOEWNER_TOL).checks:
        checks.append(_check(f"bounds.{item.check_id}", item.holds, {"witness": item.witness}))
    return checks


# ---------------------------------------------------------------------------
# det family


def _run_det_problem(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    problem = _draw_problem(rng, spec)
    result = bc.wasserstein_mean(problem)
    rep = bc.det_inequality_check(problem, result.mean)
    checks = [
        _check(
            "det.mean_inequality",
            result.converged and rep.holds,
            {"det_mean": rep.det_mean, "det_geo_product": rep.det_geo_product},
        )
    ]
    arith = bc.arithmetic_mean(problem)
    log_det_arith = float(np.sum(np.log(arith.eigen.lam)))
    log_det_mix = sum(
        float(w) * float(np.sum(np.log(a.eigen.lam)))
        for w, a in zip(problem.weights.values, problem.matrices)
    )
    margin = log_det_arith - log_det_mix
    checks.append(_check("det.logdet_concavity", margin >= -1e-9, {"margin": margin}))

    # equality case: all matrices equal forces equality of the determinants
    first = problem.matrices[0]
    equal_problem = bc.MeanProblem((first,) * problem.n, problem.weights)
    equal_result = bc.wasserstein_mean(equal_problem)
    equal_rep = bc.det_inequality_check(equal_problem, equal_result.mean)
    gap = abs(equal_rep.det_mean - equal_rep.det_geo_product)
    tol = 1e-10 * max(1.0, abs(equal_rep.det_geo_product))
    checks.append(_check("det.equal_case", gap <= tol, {"gap": gap}))
    return checks


# ---------------------------------------------------------------------------
# invariance family


def _run_invariance_problem(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    problem = _draw_problem(rng, spec)
    base = bc.wasserstein_mean(problem)
    checks = []

    worst_hom = 0.0
    for alpha in (0.1, 3.0):
        scaled = bc.MeanProblem(
            tuple(SpdMatrix(alpha * a.entries) for a in problem.matrices), problem.weights
        )
        scaled_mean = bc.wasserstein_mean(scaled).mean.entries
        worst_hom = max(worst_hom, _rel_diff(scaled_mean, alpha * base.mean.entries))
    checks.append(_check("invariance.homogeneity", worst_hom <= REL_TOL, {"diff": worst_hom}))

    perm = rng.permutation(problem.n)
    permuted = bc.MeanProblem(
        tuple(problem.matrices[i] for i in perm),
        bc.WeightVector(problem.weights.values[perm]),
    )
    perm_diff = _rel_diff(bc.wasserstein_mean(permuted).mean.entries, base.mean.entries)
    checks.append(_check("invariance.permutation", perm_diff <= REL_TOL, {"diff": perm_diff}))

    repeated = bc.MeanProblem(
        problem.matrices * 2,
        bc.WeightVector(np.concatenate([problem.weights.values] * 2) / 2.0),
    )
    rep_diff = _rel_diff(bc.wasserstein_mean(repeated).mean.entries, base.mean.entries)
    checks.append(_check("invariance.repetition", rep_diff <= REL_TOL, {"diff": rep_diff}))

    q = random_orthogonal(rng, problem.dim)
    rotated = bc.MeanProblem(
        tuple(SpdMatrix(congruence(q, a).entries) for a in problem.matrices),
        problem.weights,
    )
    rot_diff = _rel_diff(
        bc.wasserstein_mean(rotated).mean.entries, congruence(q, base.mean).entries
    )
    checks.append(_check("invariance.congruence", rot_diff <= REL_TOL, {"diff": rot_diff}))

    from_identity = bc.wasserstein_mean(problem, bc.SolverConfig(initial="identity"))
    init_diff = _rel_diff(from_identity.mean.entries, base.mean.entries)
    checks.append(_check("invariance.init_agreement", init_diff <= 1e-8, {"diff": init_diff}))
    return checks


# ---------------------------------------------------------------------------
# lie-trotter family


def _random_direction(rng: np.random.Generator, dim: int) -> SymMatrix:
    g = rng.normal(size=(dim, dim))
    sym = SymMatrix((g + g.T) / 2.0)
    radius = operator_norm(sym)
    scale = float(rng.uniform(0.25, 0.6)) / max(radius, 1e-12)
    return SymMatrix(sym.entries * scale)


def _draw_curves(
    rng: np.random.Generator, n: int, dim: int
) -> tuple[lt.CurveSpec, ...]:
    curves = []
    for _ in range(n):
        kind = lt.CURVE_KINDS[int(rng.integers(0, 3))]
        direction = _random_direction(rng, dim)
        if kind == "power":
            curves.append(lt.CurveSpec.power(apply_spectral(direction, "exp_of_sym")))
        elif kind == "affine":
            curves.append(lt.CurveSpec.affine(direction))
        else:
            curves.append(lt.CurveSpec.exp_line(direction))
    return tuple(curves)


def _ratio_window(errors: tuple[float, ...], last: int = 4) -> tuple[bool, float, float]:
    ratios = [
        errors[i + 1] / errors[i] for i in range(len(errors) - 1) if errors[i] > 0.0
    ]
    tail = ratios[-last:]
    if not tail:
        return False, 0.0, 0.0
    return all(0.25 <= r <= 0.75 for r in tail), min(tail), max(tail)


def _run_lie_trotter_instance(rng: np.random.Generator, spec: EnsembleSpec) -> list:
    n = int(rng.integers(2, min(spec.n_range[1], 4) + 1))
    dim = int(rng.integers(spec.dim_range[0], min(spec.dim_range[1], 6) + 1))
    curves = _draw_curves(rng, n, dim)
    weights = bc.WeightVector(rng.uniform(0.2, 1.0, size=n))
    trace_pos = lt.convergence_trace(weights, curves)
    trace_neg = lt.convergence_trace(weights, curves, negate=True)
    checks = []

    complete = not trace_pos.failed_s and not trace_neg.failed_s
    checks.append(
        _check(
            "lie_trotter.trace_complete",
            complete and len(trace_pos.errors) == 10,
            {"failed_points": len(trace_pos.failed_s) + len(trace_neg.failed_s)},
        )
    )
    errs = trace_pos.errors
    half = len(errs) // 2
    tail_monotone = all(errs[i + 1] < errs[i] for i in range(half, len(errs) - 1))
    checks.append(
        _check(
            "lie_trotter.trace_monotone",
            tail_monotone,
            {"initial_error": errs[0], "final_error": errs[-1]},
        )
    )
    reduction = errs[-1] / errs[0] if errs[0] > 0 else 0.0
    checks.append(_check("lie_trotter.trace_reduction", reduction <= 1e-2, {"ratio": reduction}))
    ratio_ok, rmin, rmax = _ratio_window(errs)
    checks.append(
        _check("lie_trotter.trace_ratio", ratio_ok, {"min_ratio": rmin, "max_ratio": rmax})
    )
    final_pos, final_neg = trace_pos.errors[-1], trace_neg.errors[-1]
    two_sided = max(final_pos, final_neg) <= 2.0 * min(final_pos, final_neg)
    checks.append(
        _check(
            "lie_trotter.two_sided",
            two_sided,
            {"final_pos": final_pos, "final_neg": final_neg},
        )
    )

    deriv = lt.derivative_at_identity_check(
        weights, tuple(c.derivative_at_zero for c in curves)
    )
    ok_pos, dmin, dmax = _ratio_window(deriv.errors_pos)
    ok_neg, nmin, nmax = _ratio_window(deriv.errors_neg)
    checks.append(
        _check(
            "lie_trotter.derivative_ratio",
            ok_pos and ok_neg,
            {"min_ratio": min(dmin, nmin), "max_ratio": max(dmax, nmax)},
        )
    )

    # all-power specialization: the stored-derivative target must coincide
    # bit for bit with the independently assembled log-Euclidean mean
    bases = tuple(
        apply_spectral(_random_direction(rng, dim), "exp_of_sym") for _ in range(n)
    )
    power_curves = tuple(lt.CurveSpec.power(b) for b in bases)
    target = lt.lie_trotter_target(weights, power_curves)
    acc = np.zeros((dim, dim))
    for wj, base in zip(weights.values, bases):
        acc = acc + wj * apply_spectral(base, "log").entries
    independent = apply_spectral(SymMatrix(acc), "exp_of_sym")
    exact = bool(np.array_equal(target.entries, independent.entries))
    gap = float(np.max(np.abs(target.entries - independent.entries)))
    checks.append(_check("lie_trotter.power_target_exact", exact, {"max_abs_diff": gap}))
    return checks


# ---------------------------------------------------------------------------
# registry and runner


@dataclass(frozen=True)
class CheckStream:
    stream_id: str
    family: str
    count_of: Callable[[int], int]
    run: Callable[[np.random.Generator, EnsembleSpec], list]


STREAMS: tuple[CheckStream, ...] = (
    CheckStream("metric.axioms", "metric", lambda c: c, _run_metric_axioms),
    CheckStream("metric.oracle", "metric", lambda c: c // 4, _run_metric_oracle),
    CheckStream("metric.perturbation", "metric", lambda c: c // 2, _run_metric_perturbation),
    CheckStream("geomean.pair", "geomean", lambda c: c // 2, _run_geomean_pair),
    CheckStream("bounds.golden", "bounds", lambda c: min(c, 1), _run_bounds_golden),
    CheckStream("bounds.problem", "bounds", lambda c: c, _run_bounds_problem),
    CheckStream("det.problem", "det", lambda c: c, _run_det_problem),
    CheckStream("invariance.problem", "invariance", lambda c: c // 4, _run_invariance_problem),
    CheckStream("lie_trotter.instance", "lie-trotter", lambda c: c // 10, _run_lie_trotter_instance),
)


def expand_families(selection) -> tuple[str, ...]:
    if isinstance(selection, str):
        selection = (selection,)
    chosen = []
    for name in selection:
        if name == "all":
            return FAMILIES
        if name not in FAMILIES:
            raise ValueError(f"unknown suite family {name!r}; choose from {FAMILIES} or 'all'")
        if name not in chosen:
            chosen.append(name)
    return tuple(chosen)


def run_instance(stream_id: str, instance_seed: int, spec: EnsembleSpec, index: int = -1) -> list[CheckRecord]:
    """Re-run one instance of one stream from its recorded seed."""
    stream = next((s for s in STREAMS if s.stream_id == stream_id), None)
    if stream is None:
        raise ValueError(f"unknown stream {stream_id!r}")
    rng = np.random.default_rng(instance_seed)
    out = []
    for check_id, passed, witness in stream.run(rng, spec):
        out.append(
            CheckRecord(
                check_id=check_id,
                stream=stream_id,
                index=index,
                instance_seed=instance_seed,
                passed=passed,
                witness=witness,
            )
        )
    return out


def run_suite(spec: EnsembleSpec, families="all") -> SuiteReport:
    """Run the selected check families over the spec's ensemble.

    Per-stream instance counts scale from ``spec.count`` (at the default 200:
    200 axiom triples, 50 oracle pairs, 100 perturbation quadruples, 100
    two-matrix instances, one golden worked-pair reproduction, 200 bound
    problems, 200 determinant problems, 50 invariance instances, 20 limit
    instances).
    """
    chosen = expand_families(families)
    records: list[CheckRecord] = []
    for stream in STREAMS:
        if stream.family not in chosen:
            continue
        for index in range(stream.count_of(spec.count)):
            seed = derive_seed(spec.seed, stream.stream_id, index)
            records.extend(run_instance(stream.stream_id, seed, spec, index))
    return SuiteReport(spec=spec, families=chosen, records=tuple(records))
