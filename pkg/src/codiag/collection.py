"""Ordered collections of same-size real symmetric matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .kernel import DEFAULT_TOL, Tolerances, as_matrix, check_symmetric

__all__ = ["MatrixCollection"]


@dataclass(frozen=True, eq=False)
class MatrixCollection:
    """The input to every solver: matrices C^1 ... C^m plus the shared
    tolerance configuration.

    Validation happens on construction: at least one member, all square
    of one size, finite, and symmetric within ``tol.sym``.
    """

    matrices: tuple[np.ndarray, ...]
    tol: Tolerances = field(default_factory=Tolerances)

    def __init__(self, matrices, tol: Tolerances = DEFAULT_TOL):
        mats = tuple(as_matrix(M) for M in matrices)
        if not mats:
            raise ValueError("a collection needs at least one matrix")
        n = mats[0].shape[0]
        if n < 1:
            raise ShapeError("matrices must have at least one row")
        for k, M in enumerate(mats):
            if M.shape != (n, n):
                raise ShapeError(
                    f"matrix {k} has shape {M.shape}, expected ({n}, {n})"
                )
            if not check_symmetric(M, tol):
                raise ValueError(f"matrix {k} is not symmetric within tolerance")
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "tol", tol)

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.matrices)

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, k) -> np.ndarray:
        return self.matrices[k]

    def subcollection(self, indices) -> "MatrixCollection":
        """New collection from the given member indices, same tolerances."""
        return MatrixCollection([self.matrices[k] for k in indices], self.tol)
