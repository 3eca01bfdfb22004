"""Dense real-matrix primitives used by every solver in the package.

All routines are pure functions of their arguments, so they are safe to
call concurrently. Thresholds are always relative to the scale of the
input: integer fixtures and rescaled copies of them make the same
decisions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ShapeError, SingularMatrixError

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "SpectralDecomposition",
    "EigenCluster",
    "EigenClusterBasis",
    "as_matrix",
    "block_diag",
    "check_symmetric",
    "spectral_decompose",
    "real_diagonalizing_basis",
    "rank_with_nullspace",
    "numerical_rank",
    "congruence_transform",
    "solve_linear",
]


@dataclass(frozen=True)
class Tolerances:
    """Relative thresholds for the four kinds of numerical decision.

    sym         symmetry acceptance, relative to max(1, ||M||_F)
    eig_cluster eigenvalue clustering / realness, relative to max |lambda|
    rank        rank cutoff, relative to the largest singular value
    residual    off-diagonal and reconstruction residuals, relative to
                the input scale
    """

    sym: float = 1e-10
    eig_cluster: float = 1e-8
    rank: float = 1e-10
    residual: float = 1e-8

    def __post_init__(self):
        for name in ("sym", "eig_cluster", "rank", "residual"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(
                    f"tolerance {name!r} must lie strictly in (0, 1), got {value!r}"
                )


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Orthogonal eigendecomposition of a symmetric matrix.

    ``orthogonal_factor`` holds eigenvectors column by column, ordered so
    that ``eigenvalues`` is sorted by decreasing absolute value (ties
    broken by decreasing value, then input order).
    """

    orthogonal_factor: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class EigenCluster:
    """One group of numerically equal eigenvalues.

    ``basis`` columns ``start:stop`` of the owning EigenClusterBasis span
    the corresponding eigenspace.
    """

    eigenvalue: float
    multiplicity: int
    start: int
    stop: int


@dataclass(frozen=True)
class EigenClusterBasis:
    """Real eigenvector basis of a diagonalizable matrix, grouped by
    clustered eigenvalue (clusters sorted by increasing eigenvalue)."""

    clusters: tuple[EigenCluster, ...]
    basis: np.ndarray


def as_matrix(M) -> np.ndarray:
    """Coerce input to a 2-d float array with finite entries."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ShapeError(f"expected a 2-d array, got ndim={A.ndim}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return A


def _require_square(A: np.ndarray, what: str = "matrix") -> None:
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {A.shape}")


def block_diag(blocks) -> np.ndarray:
    """Dense block-diagonal assembly of square blocks."""
    blocks = [as_matrix(B) for B in blocks]
    n = sum(B.shape[0] for B in blocks)
    m = sum(B.shape[1] for B in blocks)
    out = np.zeros((n, m))
    i = j = 0
    for B in blocks:
        out[i : i + B.shape[0], j : j + B.shape[1]] = B
        i += B.shape[0]
        j += B.shape[1]
    return out


def check_symmetric(M, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff max|M - M^T| <= sym * max(1, ||M||_F). Raises ShapeError
    for non-square input."""
    M = as_matrix(M)
    _require_square(M)
    if M.size == 0:
        return True
    gap = float(np.max(np.abs(M - M.T)))
    return gap <= tol.sym * max(1.0, float(np.linalg.norm(M)))


def symmetry_gap(M) -> float:
    """max|M - M^T|, the quantity check_symmetric thresholds."""
    M = as_matrix(M)
    _require_square(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - M.T)))


def spectral_decompose(S, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    S : array_like
        Square matrix passing ``check_symmetric``.
    tol : Tolerances

    Returns
    -------
    SpectralDecomposition
        ``U`` orthogonal and eigenvalues ``w`` with ``U diag(w) U^T = S``,
        sorted by decreasing |w|.
    """
    S = as_matrix(S)
    _require_square(S)
    if not check_symmetric(S, tol):
        raise ValueError("spectral_decompose requires a symmetric matrix")
    if S.size == 0:
        return SpectralDecomposition(np.zeros((0, 0)), np.zeros(0))
    sym = 0.5 * (S + S.T)
    try:
        w, U = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"symmetric eigensolver failed: {exc}") from exc
    order = np.lexsort((-w, -np.abs(w)))
    return SpectralDecomposition(U[:, order], w[order])


def rank_with_nullspace(M, tol: Tolerances = DEFAULT_TOL):
    """Numerical rank and an orthonormal null-space basis.

    rank counts singular values above ``rank * sigma_max``; the returned
    basis has shape (cols, cols - rank) and satisfies M @ basis ~ 0.
    """
    M = as_matrix(M)
    if M.size == 0:
        return 0, np.eye(M.shape[1])
    try:
        _, s, Vt = np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    smax = float(s[0]) if s.size else 0.0
    if smax == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol.rank * smax))
    return rank, Vt[rank:].T.copy()


def numerical_rank(M, tol: Tolerances = DEFAULT_TOL) -> int:
    """Numerical rank by the same cutoff as rank_with_nullspace."""
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    smax = float(s[0]) if s.size else 0.0
    if smax == 0.0:
        return 0
    return int(np.sum(s > tol.rank * smax))


def real_diagonalizing_basis(A, tol: Tolerances = DEFAULT_TOL):
    """Real eigenvector basis of A grouped by clustered eigenvalue, or
    None when A has a complex pair or is defective.

    Eigenvalues are computed by the LAPACK real nonsymmetric solver
    (Hessenberg reduction plus shifted QR). Clustering is single-linkage:
    sorted values merge while consecutive gaps stay within
    ``eig_cluster * max|lambda|``. A cluster of algebraic multiplicity k
    is accepted only if ``A - lambda I`` has null-space dimension exactly
    k; the orthonormal null-space vectors become the basis columns, so
    the basis is real even when LAPACK's eigenvectors are not.
    """
    A = as_matrix(A)
    _require_square(A)
    n = A.shape[0]
    if n == 0:
        return EigenClusterBasis((), np.zeros((0, 0)))
    try:
        eigvals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from exc
    scale = float(np.max(np.abs(eigvals)))
    if np.max(np.abs(eigvals.imag)) > tol.eig_cluster * scale:
        return None
    values = np.sort(eigvals.real)
    # single-linkage merge of sorted eigenvalues
    boundaries = [0]
    for k in range(1, n):
        if values[k] - values[k - 1] > tol.eig_cluster * scale:
            boundaries.append(k)
    boundaries.append(n)

    clusters = []
    columns = []
    start = 0
    for b in range(len(boundaries) - 1):
        members = values[boundaries[b] : boundaries[b + 1]]
        lam = float(np.mean(members))
        mult = members.size
        rank, null_basis = rank_with_nullspace(A - lam * np.eye(n), tol)
        if n - rank != mult:
            return None  # defective (or clustering too coarse to resolve)
        clusters.append(EigenCluster(lam, mult, start, start + mult))
        columns.append(null_basis)
        start += mult
    basis = np.hstack(columns)
    svals = np.linalg.svd(basis, compute_uv=False)
    if svals[-1] <= tol.rank * svals[0]:
        return None
    return EigenClusterBasis(tuple(clusters), basis)


def congruence_transform(C, Q) -> np.ndarray:
    """Re-symmetrized congruence product (Q^T C Q + (Q^T C Q)^T) / 2."""
    C = as_matrix(C)
    Q = as_matrix(Q)
    _require_square(C)
    if Q.shape[0] != C.shape[0]:
        raise ShapeError(
            f"congruence factor has {Q.shape[0]} rows, matrix is {C.shape[0]}x{C.shape[1]}"
        )
    T = Q.T @ C @ Q
    return 0.5 * (T + T.T)


def solve_linear(A, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve A X = B for square nonsingular A.

    Raises SingularMatrixError (carrying the smallest singular value)
    when A fails the relative rank test.
    """
    A = as_matrix(A)
    B = as_matrix(B)
    _require_square(A, "coefficient matrix")
    if B.shape[0] != A.shape[0]:
        raise ShapeError(
            f"right-hand side has {B.shape[0]} rows, expected {A.shape[0]}"
        )
    if A.size == 0:
        return np.zeros(B.shape)
    s = np.linalg.svd(A, compute_uv=False)
    smax = float(s[0])
    smin = float(s[-1])
    if smax == 0.0 or smin <= tol.rank * smax:
        raise SingularMatrixError(
            f"matrix is numerically singular (sigma_min={smin:.3e}, sigma_max={smax:.3e})",
            smallest=smin,
            largest=smax,
        )
    return np.linalg.solve(A, B)
