"""Dense symmetric linear algebra on top of a cyclic Jacobi eigensolver.

Everything downstream (two-matrix means, barycenters, limit experiments) is
spectral: square roots, logarithms, powers and Loewner comparisons are all
obtained by diagonalising with the same solver, so this module is the single
source of numerical truth for the package.  Matrices are small and dense
(desk scale, dims up to a few dozen); no attempt is made to compete with
LAPACK.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Jacobi sweep budget and convergence target (fraction of the input Frobenius
# norm left in the off-diagonal part).
SWEEP_LIMIT = 64
OFFDIAG_TARGET = 1e-14

# Admission threshold for positive definiteness: lambda_min > threshold * lambda_max.
# Below this the matrix is treated as numerically singular and rejected rather
# than silently regularized.
SPD_ADMISSION = 1e-12

SPECTRAL_FUNCTIONS = ("sqrt", "inv_sqrt", "log", "exp_of_sym", "power", "inverse")


class LinearAlgebraError(Exception):
    """Base class for numerical failures raised by this package."""


class EighConvergenceError(LinearAlgebraError):
    """Jacobi sweeps exhausted before the off-diagonal mass reached target."""

    def __init__(self, off_diagonal: float, sweeps: int):
        self.off_diagonal = off_diagonal
        self.sweeps = sweeps
        super().__init__(
            f"eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {off_diagonal:.3e})"
        )


class NotPositiveDefiniteError(LinearAlgebraError):
    """Matrix failed the positive definiteness admission check."""

    def __init__(self, lambda_min: float, lambda_max: float):
        self.lambda_min = lambda_min
        self.lambda_max = lambda_max
        super().__init__(
            f"matrix is not positive definite: lambda_min={lambda_min:.6e}, "
            f"lambda_max={lambda_max:.6e}"
        )


class SpectralDomainError(LinearAlgebraError):
    """Scalar function applied to an eigenvalue outside its domain."""


class NumericalBreakdownError(LinearAlgebraError):
    """A quantity left its mathematically guaranteed range by more than roundoff."""


class SymMatrix:
    """Real symmetric matrix.  Construction symmetrizes ((M + M^T)/2) and freezes."""

    __slots__ = ("_entries",)

    def __init__(self, entries) -> None:
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("matrix entries must be finite")
        m = (m + m.T) / 2.0
        m.flags.writeable = False
        self._entries = m

    @property
    def entries(self) -> np.ndarray:
        """Read-only (dim, dim) float array, exactly symmetric."""
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{type(self).__name__}({self._entries.tolist()!r})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Orthogonal factor and descending eigenvalues of a symmetric matrix.

    ``q`` holds eigenvectors in its columns; ``lam`` is sorted so that
    ``lam[0]`` is the largest eigenvalue (the spectral radius for SPD input).
    """

    q: np.ndarray
    lam: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or lam.shape != (q.shape[0],):
            raise ValueError("inconsistent eigendecomposition shapes")
        if np.any(np.diff(lam) > 0):
            raise ValueError("eigenvalues must be sorted in descending order")
        q = q.copy()
        lam = lam.copy()
        q.flags.writeable = False
        lam.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self) -> int:
        return self.lam.shape[0]

    def recompose(self) -> np.ndarray:
        """Q diag(lam) Q^T, symmetrized."""
        m = (self.q * self.lam) @ self.q.T
        return (m + m.T) / 2.0


class SpdMatrix(SymMatrix):
    """Symmetric positive definite matrix with its eigendecomposition cached.

    Construction runs the eigensolver once and fails (rather than
    regularizing) when lambda_min <= SPD_ADMISSION * lambda_max.
    """

    __slots__ = ("_eigen",)

    def __init__(self, entries, _eigen: EigenDecomposition | None = None) -> None:
        super().__init__(entries)
        if _eigen is None:
            _eigen = _jacobi(self.entries)
        lam_max = float(_eigen.lam[0])
        lam_min = float(_eigen.lam[-1])
        if lam_max <= 0.0 or lam_min <= SPD_ADMISSION * lam_max:
            raise NotPositiveDefiniteError(lam_min, lam_max)
        self._eigen = _eigen

    @classmethod
    def from_eigen(cls, eigen: EigenDecomposition) -> "SpdMatrix":
        """Build from a known decomposition without re-running the solver."""
        return cls(eigen.recompose(), _eigen=eigen)

    @property
    def eigen(self) -> EigenDecomposition:
        return self._eigen


def identity(dim: int) -> SpdMatrix:
    eye = np.eye(dim)
    return SpdMatrix(eye, _eigen=EigenDecomposition(q=eye, lam=np.ones(dim)))


def eigh(a: SymMatrix) -> EigenDecomposition:
    """Eigendecomposition by cyclic Jacobi rotations.

    Deterministic for fixed input; SPD inputs return their cached
    decomposition.  Raises EighConvergenceError if the off-diagonal mass has
    not dropped below OFFDIAG_TARGET * ||a||_F after SWEEP_LIMIT sweeps.
    """
    if isinstance(a, SpdMatrix):
        return a.eigen
    return _jacobi(a.entries)


def _offdiag_norm(w: np.ndarray) -> float:
    off = w - np.diag(np.diagonal(w))
    return math.sqrt(float(np.sum(off * off)))


_SCHEDULES: dict[int, tuple[tuple[np.ndarray, np.ndarray], ...]] = {}


def _round_robin_schedule(m: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin ordering of the index pairs: each sweep visits every pair
    exactly once, grouped into rounds of mutually disjoint planes so a whole
    round can be applied as a single rotation matrix."""
    cached = _SCHEDULES.get(m)
    if cached is not None:
        return cached
    padded = m if m % 2 == 0 else m + 1
    players = list(range(padded))
    rounds = []
    for _ in range(padded - 1):
        ps, rs = [], []
        for i in range(padded // 2):
            a, b = players[i], players[padded - 1 - i]
            if a < m and b < m:
                ps.append(min(a, b))
                rs.append(max(a, b))
        rounds.append((np.array(ps), np.array(rs)))
        players = [players[0], players[-1]] + players[1:-1]
    schedule = tuple(rounds)
    _SCHEDULES[m] = schedule
    return schedule


def _rotation_params(a_pp: float, a_rr: float, a_pr: float) -> tuple[float, float]:
    """Cosine and sine of the Jacobi angle annihilating the (p, r) entry."""
    theta = (a_rr - a_pp) / (2.0 * a_pr)
    if theta == 0.0:
        t = 1.0
    elif abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


def _jacobi(matrix: np.ndarray) -> EigenDecomposition:
    m = matrix.shape[0]
    w = np.array(matrix, dtype=float)
    q = np.eye(m)
    scale = math.sqrt(float(np.sum(w * w)))
    if scale == 0.0 or m == 1:
        lam = np.diagonal(w).copy()
        order = np.argsort(-lam, kind="stable")
        return EigenDecomposition(q=q[:, order], lam=lam[order])
    if m == 2:
        # A single rotation diagonalizes a 2x2 exactly.
        a_pp, a_pr, a_rr = w[0, 0], w[0, 1], w[1, 1]
        if a_pr != 0.0:
            c, s = _rotation_params(a_pp, a_rr, a_pr)
            t = s / c
            w = np.diag([a_pp - t * a_pr, a_rr + t * a_pr])
            q = np.array([[c, s], [-s, c]])
        lam = np.diagonal(w).copy()
        order = np.argsort(-lam, kind="stable")
        return EigenDecomposition(q=q[:, order], lam=lam[order])
    target = OFFDIAG_TARGET * scale
    # Entries below this level cannot push the off-diagonal mass back above
    # the convergence target, so their rotations are skipped.
    skip_level = target / (2.0 * m)
    eye = np.eye(m)
    converged = False
    for _ in range(SWEEP_LIMIT + 1):
        if _offdiag_norm(w) <= target:
            converged = True
            break
        for ps, rs in _round_robin_schedule(m):
            apr = w[ps, rs]
            active = np.abs(apr) > skip_level
            if not active.any():
                continue
            pa, ra, va = ps[active], rs[active], apr[active]
            diag = np.diagonal(w)
            theta = (diag[ra] - diag[pa]) / (2.0 * va)
            abs_theta = np.abs(theta)
            t = np.where(
                abs_theta > 1e150,
                0.5 / np.where(theta == 0.0, 1.0, theta),
                np.sign(theta) / (abs_theta + np.hypot(theta, 1.0)),
            )
            t = np.where(theta == 0.0, 1.0, t)  # theta == 0 means a 45 degree rotation
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # One rotation matrix for the whole round: the planes are
            # disjoint, so this equals applying the rotations sequentially.
            rot = eye.copy()
            rot[pa, pa] = c
            rot[ra, ra] = c
            rot[pa, ra] = s
            rot[ra, pa] = -s
            w = rot.T @ w @ rot
            w[pa, ra] = 0.0
            w[ra, pa] = 0.0
            q = q @ rot
    if not converged:
        final_off = _offdiag_norm(w)
        if final_off > target:
            raise EighConvergenceError(final_off, SWEEP_LIMIT)
    lam = np.diagonal(w).copy()
    order = np.argsort(-lam, kind="stable")
    return EigenDecomposition(q=q[:, order], lam=lam[order])


def apply_spectral(a: SymMatrix, f: str, p: float | None = None) -> SymMatrix | SpdMatrix:
    """Apply a scalar function to the spectrum: Q diag(f(lam)) Q^T.

    ``f`` is one of SPECTRAL_FUNCTIONS; ``power`` takes the exponent ``p``.
    ``exp_of_sym`` accepts any symmetric matrix and returns an SpdMatrix; the
    remaining tags require a strictly positive spectrum and return SpdMatrix
    except for ``log``, which returns a plain SymMatrix.
    """
    if f not in SPECTRAL_FUNCTIONS:
        raise ValueError(f"unknown spectral function {f!r}")
    if f == "power" and p is None:
        raise ValueError("power requires an exponent")
    eigen = eigh(a)
    lam = eigen.lam
    if f == "exp_of_sym":
        with np.errstate(over="ignore"):
            vals = np.exp(lam)
        if not np.isfinite(vals).all():
            raise SpectralDomainError(f"exp overflows on eigenvalue {lam[0]!r}")
        return _recompose_spd(eigen.q, vals)
    if lam[-1] <= 0.0:
        raise SpectralDomainError(f"{f} undefined on eigenvalue {float(lam[-1])!r}")
    if f == "sqrt":
        return _recompose_spd(eigen.q, np.sqrt(lam))
    if f == "inv_sqrt":
        return _recompose_spd(eigen.q, 1.0 / np.sqrt(lam))
    if f == "inverse":
        return _recompose_spd(eigen.q, 1.0 / lam)
    if f == "power":
        return _recompose_spd(eigen.q, lam ** float(p))
    # log
    vals = np.log(lam)
    return SymMatrix((eigen.q * vals) @ eigen.q.T)


def _recompose_spd(q: np.ndarray, vals: np.ndarray) -> SpdMatrix:
    order = np.argsort(-vals, kind="stable")
    return SpdMatrix.from_eigen(EigenDecomposition(q=q[:, order], lam=vals[order]))


def congruence(x: np.ndarray | SymMatrix, a: SymMatrix) -> SymMatrix:
    """X A X^T for a square matrix X; symmetric by construction."""
    xm = x.entries if isinstance(x, SymMatrix) else np.asarray(x, dtype=float)
    if xm.shape != (a.dim, a.dim):
        raise ValueError(f"dimension mismatch: {xm.shape} vs {(a.dim, a.dim)}")
    return SymMatrix(xm @ a.entries @ xm.T)


def frobenius_norm(a: SymMatrix | np.ndarray) -> float:
    m = a.entries if isinstance(a, SymMatrix) else np.asarray(a, dtype=float)
    return math.sqrt(float(np.sum(m * m)))


def operator_norm(a: SymMatrix) -> float:
    """Spectral radius max_i |lambda_i|."""
    lam = eigh(a).lam
    return max(abs(float(lam[0])), abs(float(lam[-1])))


def trace(a: SymMatrix) -> float:
    return float(np.trace(a.entries))


def determinant(a: SymMatrix) -> float:
    """Determinant as the product of eigenvalues (never cofactor expansion)."""
    return float(np.prod(eigh(a).lam))


@dataclass(frozen=True)
class LoewnerComparison:
    """Outcome of a Loewner-order test a >= b, with its witness.

    ``witness`` is the smallest eigenvalue of a - b; the comparison holds when
    the witness is above ``-threshold``.
    """

    holds: bool
    witness: float
    threshold: float


def loewner_geq(a: SymMatrix, b: SymMatrix, rel_tol: float = 0.0) -> LoewnerComparison:
    """Test a >= b in the Loewner order (a - b positive semidefinite).

    The slack is relative: lambda_min(a - b) >= -rel_tol * max(1, ||a||, ||b||)
    with operator norms.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = SymMatrix(a.entries - b.entries)
    witness = float(eigh(diff).lam[-1])
    threshold = rel_tol * max(1.0, operator_norm(a), operator_norm(b))
    return LoewnerComparison(holds=witness >= -threshold, witness=witness, threshold=threshold)
