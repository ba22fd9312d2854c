"""Dense symmetric eigendecomposition, top-rank projectors, and matrix norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError, RankOutOfRangeError

__all__ = [
    "SpectralDecomposition",
    "Projector",
    "as_symmetric",
    "eigh_descending",
    "top_projector",
    "spectral_norm",
    "frobenius_norm",
    "projector_column_mass",
]


def as_symmetric(a: np.ndarray) -> np.ndarray:
    """Exactly symmetric float64 copy of a square matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    return (a + a.T) / 2.0


def _require_finite(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if not np.isfinite(a).all():
        raise NonFiniteError("matrix has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in descending order with aligned orthonormal eigenvectors.

    `eigenvectors[:, i]` belongs to `eigenvalues[i]`.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        if (np.diff(self.eigenvalues) > 0).any():
            raise ValueError("eigenvalues must be non-increasing")


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector onto the span of the top `rank` eigenvectors."""

    dim: int
    rank: int
    matrix: np.ndarray

    def idempotency_defect(self) -> float:
        """Frobenius norm of P@P - P; near zero for a true projector."""
        p = self.matrix
        return float(np.linalg.norm(p @ p - p, "fro"))


def eigh_descending(a: np.ndarray) -> SpectralDecomposition:
    """Full symmetric eigendecomposition, eigenvalues sorted descending.

    Deterministic for a fixed input: the order is the exact reverse of the
    LAPACK ascending output, so degenerate eigenvalues keep a stable layout.
    """
    a = _require_finite(a)
    w, v = np.linalg.eigh(as_symmetric(a))
    return SpectralDecomposition(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def top_projector(a: np.ndarray, rank: int) -> Projector:
    """Projector onto the eigenspace of the `rank` largest eigenvalues of `a`."""
    a = np.asarray(a)
    m = a.shape[0]
    if not 1 <= rank <= m:
        raise RankOutOfRangeError(f"rank must be in 1..{m}, got {rank}")
    dec = eigh_descending(a)
    basis = dec.eigenvectors[:, :rank]
    return Projector(dim=m, rank=rank, matrix=as_symmetric(basis @ basis.T))


def spectral_norm(a: np.ndarray) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    a = _require_finite(a)
    if a.shape[0] == 0:
        return 0.0
    w = np.linalg.eigvalsh(as_symmetric(a))
    return float(max(abs(w[0]), abs(w[-1])))


def frobenius_norm(a: np.ndarray) -> float:
    """Entrywise 2-norm."""
    return float(np.linalg.norm(_require_finite(a), "fro"))


def projector_column_mass(p, members) -> float:
    """2-norm of P applied to the indicator vector of `members`."""
    matrix = p.matrix if isinstance(p, Projector) else np.asarray(p, dtype=np.float64)
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix[:, members].sum(axis=1)))
