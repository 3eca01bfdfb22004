"""Solver outcomes: a congruence with diagonals, or a failure certificate.

Certificates are machine-checkable witnesses. Each one stores the data
needed to replay the violated condition from the raw collection (see
``codiag.verify.validate_certificate``). All matrix indices are 0-based
positions in the input collection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

__all__ = [
    "Certificate",
    "NotDiagonalizable",
    "SymmetryViolation",
    "CouplingNonzero",
    "NorthwestNotSDC",
    "NoNonsingularAnchor",
    "CongruenceResult",
]


def _listify(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


@dataclass(frozen=True)
class Certificate:
    """Base class; concrete kinds carry the witness data."""

    @property
    def kind(self) -> str:
        return self._KIND  # type: ignore[attr-defined]

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        for name, value in self.__dict__.items():
            if isinstance(value, Certificate):
                out[name] = value.to_dict()
            else:
                out[name] = _listify(value)
        return out


@dataclass(frozen=True)
class NotDiagonalizable(Certificate):
    """(C^anchor)^-1 C^index is not real similarly diagonalizable.

    ``column`` is None when found by the up-front necessary-conditions
    scan; otherwise it names the block column where a sub-problem turned
    out defective during decomposition (possible only via rounding after
    the scan passed).
    """

    _KIND = "not_diagonalizable"
    index: int
    anchor: int
    column: Optional[int] = None


@dataclass(frozen=True)
class SymmetryViolation(Certificate):
    """C^j (C^anchor)^-1 C^i is not symmetric; ``residual`` records the
    observed max|T - T^T|."""

    _KIND = "symmetry_violation"
    i: int
    j: int
    anchor: int
    residual: float


@dataclass(frozen=True)
class CouplingNonzero(Certificate):
    """The coupling block at reduction stage ``stage`` has norm above
    the residual threshold, so the singular collection cannot be SDC."""

    _KIND = "coupling_nonzero"
    stage: int
    norm: float


@dataclass(frozen=True)
class NorthwestNotSDC(Certificate):
    """A reduced sub-problem is itself not SDC.

    From the singular solver: ``inner`` holds the certificate of the
    north-west sub-collection at stage ``stage`` (inner indices count the
    prepended diagonal anchor as 0, then the north-west blocks in input
    order). From the nonsingular solver: ``inner`` is None and
    ``column``/``block`` witness a block of matrix ``stage`` that never
    became a multiple of its column anchor.
    """

    _KIND = "northwest_not_sdc"
    stage: int
    inner: Optional[Certificate] = None
    anchor: Optional[int] = None
    column: Optional[int] = None
    block: Optional[np.ndarray] = None


@dataclass(frozen=True)
class NoNonsingularAnchor(Certificate):
    """A refined anchor block turned out numerically singular while
    splitting on matrix ``stage`` (inconsistent with the invertibility
    the decomposition guarantees in exact arithmetic)."""

    _KIND = "no_nonsingular_anchor"
    stage: int
    anchor: int
    column: int
    block: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class CongruenceResult:
    """Either a diagonalizing congruence or a certificate of failure.

    status "SDC": ``P`` nonsingular, ``diagonals[i]`` the diagonal of
    P^T C^i P, ``residuals[i]`` its off-diagonal Frobenius norm divided
    by max(1, ||C^i||_F).

    status "NOT_SDC": ``certificate`` explains which condition failed.

    ``trace`` is populated by the singular-collection solver with its
    stage-by-stage reduction record.
    """

    status: str
    P: Optional[np.ndarray] = None
    diagonals: Optional[tuple[np.ndarray, ...]] = None
    residuals: Optional[np.ndarray] = None
    certificate: Optional[Certificate] = None
    trace: Any = None

    @property
    def is_sdc(self) -> bool:
        return self.status == "SDC"

    @staticmethod
    def sdc(P, diagonals, residuals, trace=None) -> "CongruenceResult":
        return CongruenceResult(
            status="SDC",
            P=P,
            diagonals=tuple(diagonals),
            residuals=np.asarray(residuals, dtype=float),
            trace=trace,
        )

    @staticmethod
    def not_sdc(certificate: Certificate) -> "CongruenceResult":
        return CongruenceResult(status="NOT_SDC", certificate=certificate)
