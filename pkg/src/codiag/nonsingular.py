"""Simultaneous diagonalization of collections with an invertible member.

The solver works against an anchor matrix A (any invertible member).
It first checks the two necessary-and-sufficient conditions:

  * A^-1 C^i is real similarly diagonalizable for every member, and
  * C^j A^-1 C^i is symmetric for every pair of non-anchor members.

When they hold, a congruence R is built that turns the whole collection
into matching block diagonals where every block of every matrix is a
scalar multiple of the anchor's block in that position. The blocks are
refined matrix by matrix: splitting on member k replaces each unmatched
column by the eigenvalue clusters of (A_t)^-1 C^k_t. Spectral factors of
the final anchor blocks then finish the job, giving P with every
P^T C^i P diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .collection import MatrixCollection
from .errors import NumericalFailure, SingularMatrixError
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    block_diag,
    check_symmetric,
    congruence_transform,
    numerical_rank,
    real_diagonalizing_basis,
    solve_linear,
    spectral_decompose,
    symmetry_gap,
)
from .results import (
    Certificate,
    CongruenceResult,
    NoNonsingularAnchor,
    NorthwestNotSDC,
    NotDiagonalizable,
    SymmetryViolation,
)

__all__ = [
    "BlockDiagonalState",
    "column_match",
    "necessary_conditions_check",
    "block_decompose_step",
    "find_R",
    "diagonalize_nonsingular",
    "pair_sdc_check",
]


def column_match(A, C, tol: Tolerances = DEFAULT_TOL):
    """Best scalar alpha with C ~ alpha A, or None if C is not a multiple.

    alpha is the Frobenius projection <A, C> / <A, A>, which stays well
    defined for blocks with zero entries; acceptance requires
    ||C - alpha A||_F <= residual * max(1, |alpha|) * ||A||_F.
    """
    A = as_matrix(A)
    C = as_matrix(C)
    denom = float(np.sum(A * A))
    if denom == 0.0:
        raise SingularMatrixError("column anchor is the zero matrix")
    alpha = float(np.sum(A * C)) / denom
    gap = float(np.linalg.norm(C - alpha * A))
    if gap <= tol.residual * max(1.0, abs(alpha)) * float(np.linalg.norm(A)):
        return alpha
    return None


def necessary_conditions_check(c: MatrixCollection, anchor: int):
    """Certificate of the first violated SDC condition, or None on pass.

    Checks real diagonalizability of (C^anchor)^-1 C^i for every other
    member, then symmetry of C^j (C^anchor)^-1 C^i over non-anchor pairs
    i < j. The anchor must be invertible.
    """
    tol = c.tol
    A = c.matrices[anchor]
    others = [i for i in range(c.m) if i != anchor]
    products = {}
    for i in others:
        X = solve_linear(A, c.matrices[i], tol)
        if real_diagonalizing_basis(X, tol) is None:
            return NotDiagonalizable(index=i, anchor=anchor)
        products[i] = X
    for a in range(len(others)):
        for b in range(a + 1, len(others)):
            i, j = others[a], others[b]
            T = c.matrices[j] @ products[i]
            if not check_symmetric(T, tol):
                return SymmetryViolation(
                    i=i, j=j, anchor=anchor, residual=symmetry_gap(T)
                )
    return None


def _diagonal_blocks(T: np.ndarray, partition) -> list[np.ndarray]:
    out = []
    off = 0
    for size in partition:
        out.append(T[off : off + size, off : off + size])
        off += size
    return out


@dataclass
class BlockDiagonalState:
    """Progress of the block refinement over one collection.

    partition   block sizes m_t, summing to n
    anchors     the anchor's diagonal blocks A_t (invertible, symmetric)
    coeffs      matrix index -> per-column coefficients alpha^i_t, filled
                once a matrix is fully reduced to multiples (the anchor's
                own row is all ones)
    pending     matrix index -> current diagonal blocks of matrices not
                yet reduced to coefficients (empty on success)
    transform   the accumulated congruence R
    history     the partition after each refinement
    """

    collection: MatrixCollection
    anchor: int
    partition: tuple[int, ...]
    anchors: tuple[np.ndarray, ...]
    coeffs: dict[int, np.ndarray] = field(default_factory=dict)
    pending: dict[int, list[np.ndarray]] = field(default_factory=dict)
    transform: np.ndarray = None  # type: ignore[assignment]
    history: tuple[tuple[int, ...], ...] = ()

    @property
    def order(self) -> tuple[int, ...]:
        rest = (i for i in range(self.collection.m) if i != self.anchor)
        return (self.anchor, *rest)

    def blocks_of(self, i: int) -> list[np.ndarray]:
        T = congruence_transform(self.collection.matrices[i], self.transform)
        return _diagonal_blocks(T, self.partition)

    def matches_all_columns(self, i: int) -> bool:
        tol = self.collection.tol
        return all(
            column_match(A_t, B_t, tol) is not None
            for A_t, B_t in zip(self.anchors, self.blocks_of(i))
        )

    def refresh_pending(self) -> None:
        others = (i for i in range(self.collection.m) if i != self.anchor)
        self.pending = {
            i: self.blocks_of(i) for i in others if i not in self.coeffs
        }


def _initial_state(c: MatrixCollection, anchor: int) -> BlockDiagonalState:
    A0 = c.matrices[anchor]
    state = BlockDiagonalState(
        collection=c,
        anchor=anchor,
        partition=(c.n,),
        anchors=(0.5 * (A0 + A0.T),),
        transform=np.eye(c.n),
        history=((c.n,),),
    )
    state.refresh_pending()
    return state


def block_decompose_step(state: BlockDiagonalState, splitter: int):
    """Refine the partition so every block of ``splitter`` is a multiple
    of its column anchor.

    Columns already matching keep Q_t = I. Each failing column t is
    refined by the eigenvalue clusters of (A_t)^-1 C^splitter_t: the
    cluster basis Q_t splits A_t into invertible sub-anchors and the
    splitter's blocks into the cluster eigenvalues times those anchors.
    Returns the refined state, or a Certificate when a sub-problem is
    defective or a refined anchor loses invertibility (possible only
    through rounding once the up-front check passed).
    """
    c = state.collection
    tol = c.tol
    blocks = state.blocks_of(splitter)
    qs = []
    new_partition: list[int] = []
    for t, (A_t, B_t) in enumerate(zip(state.anchors, blocks)):
        if column_match(A_t, B_t, tol) is not None:
            qs.append(np.eye(A_t.shape[0]))
            new_partition.append(A_t.shape[0])
            continue
        X = solve_linear(A_t, B_t, tol)
        cb = real_diagonalizing_basis(X, tol)
        if cb is None:
            return NotDiagonalizable(index=splitter, anchor=state.anchor, column=t)
        refined = congruence_transform(A_t, cb.basis)
        for cluster in cb.clusters:
            sub = refined[cluster.start : cluster.stop, cluster.start : cluster.stop]
            if numerical_rank(sub, tol) < cluster.multiplicity:
                return NoNonsingularAnchor(
                    stage=splitter, anchor=state.anchor, column=t, block=sub
                )
            new_partition.append(cluster.multiplicity)
        qs.append(cb.basis)
    transform = state.transform @ block_diag(qs)
    partition = tuple(new_partition)
    anchor_full = congruence_transform(c.matrices[state.anchor], transform)
    anchors = tuple(B.copy() for B in _diagonal_blocks(anchor_full, partition))
    new_state = BlockDiagonalState(
        collection=c,
        anchor=state.anchor,
        partition=partition,
        anchors=anchors,
        coeffs=dict(state.coeffs),
        transform=transform,
        history=state.history + (partition,),
    )
    new_state.refresh_pending()
    return new_state


def find_R(c: MatrixCollection, anchor: int = 0):
    """Drive block refinement until every matrix is represented by
    per-column coefficients against invertible anchor blocks.

    Splits on the non-anchor members in input order, skipping any whose
    blocks already match, and stops as soon as all pending blocks match
    their column anchors (one split suffices when the first splitter has
    all-distinct eigenvalues, since singleton blocks always match).
    Returns the completed BlockDiagonalState, or a Certificate if some
    block never matches (inconsistent input at working precision).
    """
    tol = c.tol
    if numerical_rank(c.matrices[anchor], tol) < c.n:
        raise SingularMatrixError(f"anchor matrix {anchor} is singular")
    others = [i for i in range(c.m) if i != anchor]
    state = _initial_state(c, anchor)

    for j in others:
        if all(state.matches_all_columns(i) for i in others):
            break
        if state.matches_all_columns(j):
            continue
        outcome = block_decompose_step(state, j)
        if isinstance(outcome, Certificate):
            return outcome
        state = outcome

    coeffs: dict[int, np.ndarray] = {anchor: np.ones(len(state.partition))}
    for i in others:
        row = []
        for t, (A_t, B_t) in enumerate(zip(state.anchors, state.blocks_of(i))):
            alpha = column_match(A_t, B_t, tol)
            if alpha is None:
                return NorthwestNotSDC(
                    stage=i, anchor=anchor, column=t, block=np.array(B_t)
                )
            row.append(alpha)
        coeffs[i] = np.array(row)
    state.coeffs = coeffs
    state.pending = {}
    return state


def _diagonals_and_residuals(c: MatrixCollection, P: np.ndarray):
    diagonals = []
    residuals = []
    for M in c.matrices:
        T = congruence_transform(M, P)
        d = np.diag(T).copy()
        off = T - np.diag(d)
        scale = max(1.0, float(np.linalg.norm(M)))
        diagonals.append(d)
        residuals.append(float(np.linalg.norm(off)) / scale)
    return diagonals, np.array(residuals)


def _check_soundness(c: MatrixCollection, P: np.ndarray, residuals: np.ndarray):
    tol = c.tol
    bad = np.flatnonzero(residuals > tol.residual)
    if bad.size:
        raise NumericalFailure(
            "result lost diagonality to rounding "
            f"(matrix {bad[0]}, scaled residual {residuals[bad[0]]:.3e})"
        )
    s = np.linalg.svd(P, compute_uv=False)
    if s[-1] <= tol.rank * s[0]:
        raise NumericalFailure(
            f"computed congruence is numerically singular (sigma_min={s[-1]:.3e})"
        )


def diagonalize_nonsingular(
    c: MatrixCollection, anchor: int | None = None
) -> CongruenceResult:
    """Decide SDC for a collection with an invertible member and build P.

    Parameters
    ----------
    c : MatrixCollection
    anchor : int, optional
        Index of an invertible member. Defaults to the first member of
        full numerical rank. The reported status does not depend on the
        choice; P itself may.

    Returns
    -------
    CongruenceResult
        SDC with P, per-matrix diagonals and scaled off-diagonal
        residuals, or NOT_SDC with a certificate of the violated
        condition.
    """
    tol = c.tol
    if anchor is None:
        for k in range(c.m):
            if numerical_rank(c.matrices[k], tol) == c.n:
                anchor = k
                break
        else:
            raise SingularMatrixError(
                "collection has no invertible member; use the singular solver"
            )
    else:
        if not 0 <= anchor < c.m:
            raise IndexError(f"anchor index {anchor} out of range")
        if numerical_rank(c.matrices[anchor], tol) < c.n:
            raise SingularMatrixError(f"anchor matrix {anchor} is singular")

    cert = necessary_conditions_check(c, anchor)
    if cert is not None:
        return CongruenceResult.not_sdc(cert)

    state = find_R(c, anchor)
    if isinstance(state, Certificate):
        return CongruenceResult.not_sdc(state)

    factors = [spectral_decompose(A_t, tol).orthogonal_factor for A_t in state.anchors]
    P = state.transform @ block_diag(factors)
    diagonals, residuals = _diagonals_and_residuals(c, P)
    _check_soundness(c, P, residuals)
    return CongruenceResult.sdc(P, diagonals, residuals)


def pair_sdc_check(C1, C2, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Independent two-matrix oracle: with C1 invertible, the pair is SDC
    iff C1^-1 C2 is real similarly diagonalizable."""
    C1 = as_matrix(C1)
    C2 = as_matrix(C2)
    X = solve_linear(C1, C2, tol)
    return real_diagonalizing_basis(X, tol) is not None
