"""Recursive spectral cluster identification.

One round works on the current graph with n vertices and target size s:
project the adjacency matrix onto its top floor(n/s) eigenvectors, read off a
size-s candidate set from every projector column, keep the candidate set whose
indicator vector the projector preserves best, and clean it up by taking the s
vertices with the most neighbors inside it.  That cluster is removed and the
round repeats on the rest.

All tie-breaks (column-entry ranking, pivot choice, neighbor counts) prefer
the smaller vertex index, so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    GraphTooSmallError,
    InvariantViolationError,
    SizeOutOfRangeError,
    ZeroSizeError,
)
from .model import Graph, PlantedPartition
from .spectral import Projector, projector_column_mass, top_projector

__all__ = [
    "CandidateSet",
    "RecoveryResult",
    "PivotTrace",
    "candidate_set",
    "all_candidate_sets",
    "select_pivot",
    "extract_cluster",
    "identify_clusters",
    "recover_with_trace",
    "same_partition",
]


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """A pivot vertex, its size-s candidate set, and the set's projector mass."""

    pivot: int
    members: np.ndarray
    mass: float


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Recovered clusters in recovery order plus vertices never assigned."""

    clusters: list
    leftover: np.ndarray

    def as_dict(self, s: int) -> dict:
        """JSON-ready form: {"s", "clusters", "leftover"}, 0-based ids."""
        return {
            "s": int(s),
            "clusters": [[int(v) for v in c] for c in self.clusters],
            "leftover": [int(v) for v in self.leftover],
        }


@dataclass(frozen=True)
class PivotTrace:
    """Per-round diagnostics: rank used, chosen pivot (original id), its mass."""

    level: int
    rank: int
    pivot: int
    mass: float


def _as_matrix(p) -> np.ndarray:
    return p.matrix if isinstance(p, Projector) else np.asarray(p, dtype=np.float64)


def candidate_set(p_hat, j: int, s: int) -> CandidateSet:
    """Column j's candidate set: j plus the s-1 largest other entries of column j."""
    matrix = _as_matrix(p_hat)
    m = matrix.shape[0]
    if not 1 <= s <= m:
        raise SizeOutOfRangeError(f"size must be in 1..{m}, got {s}")
    if not 0 <= j < m:
        raise ValueError(f"vertex {j} out of range")
    col = matrix[:, j].copy()
    col[j] = -np.inf  # own entry never ranked; j is included unconditionally
    order = np.argsort(-col, kind="stable")
    members = np.sort(np.append(order[: s - 1], j))
    return CandidateSet(pivot=j, members=members, mass=projector_column_mass(matrix, members))


def all_candidate_sets(p_hat, s: int) -> list[CandidateSet]:
    """Candidate sets for every column, with masses computed in one pass."""
    matrix = _as_matrix(p_hat)
    m = matrix.shape[0]
    if not 1 <= s <= m:
        raise SizeOutOfRangeError(f"size must be in 1..{m}, got {s}")
    cols = matrix.copy()
    np.fill_diagonal(cols, -np.inf)
    order = np.argsort(-cols, axis=0, kind="stable")
    indicator = np.zeros((m, m), dtype=np.float64)
    rows = order[: s - 1, :]
    indicator[rows, np.arange(m)[None, :]] = 1.0
    np.fill_diagonal(indicator, 1.0)
    masses = np.linalg.norm(matrix @ indicator, axis=0)
    sets = []
    for j in range(m):
        members = np.sort(np.append(rows[:, j], j))
        sets.append(CandidateSet(pivot=j, members=members, mass=float(masses[j])))
    return sets


def select_pivot(p_hat, sets: list[CandidateSet]) -> int:
    """Pivot with the largest candidate-set mass; ties go to the smaller vertex."""
    dim = _as_matrix(p_hat).shape[0]
    if {c.pivot for c in sets} != set(range(dim)):
        raise ValueError("candidate sets must cover every vertex exactly once")
    best = min(sets, key=lambda c: (-c.mass, c.pivot))
    return best.pivot


def extract_cluster(g: Graph, w: np.ndarray, s: int) -> np.ndarray:
    """The s vertices of g (not only of w) with the most neighbors in w."""
    w = np.asarray(w, dtype=np.int64)
    if w.size != s:
        raise SizeOutOfRangeError(f"candidate set must have exactly {s} vertices")
    if g.n < s:
        raise GraphTooSmallError(f"graph has {g.n} vertices, needs at least {s}")
    return _extract(g.adj, w, s)


def _extract(adj: np.ndarray, w: np.ndarray, s: int) -> np.ndarray:
    counts = adj[:, w].sum(axis=1, dtype=np.int64)
    order = np.argsort(-counts, kind="stable")
    return np.sort(order[:s])


def recover_with_trace(g: Graph, s: int) -> tuple[RecoveryResult, list[PivotTrace]]:
    """Run the full recursion and keep per-round pivot diagnostics."""
    if s <= 0:
        raise ZeroSizeError("cluster size must be positive")
    active = np.arange(g.n, dtype=np.int64)
    adj = g.adj
    clusters: list[np.ndarray] = []
    traces: list[PivotTrace] = []
    level = 0
    while active.size // s >= 1:
        rank = active.size // s
        p_hat = top_projector(adj.astype(np.float64), rank)
        sets = all_candidate_sets(p_hat, s)
        j_star = select_pivot(p_hat, sets)
        members = _extract(adj, sets[j_star].members, s)
        clusters.append(active[members])
        traces.append(
            PivotTrace(level=level, rank=rank, pivot=int(active[j_star]), mass=sets[j_star].mass)
        )
        keep = np.setdiff1d(np.arange(active.size), members)
        active = active[keep]
        adj = adj[np.ix_(keep, keep)]
        level += 1
    result = RecoveryResult(clusters=clusters, leftover=active)
    _check_result(result, g.n, s)
    return result, traces


def identify_clusters(g: Graph, s: int) -> RecoveryResult:
    """Recover all size-s clusters; vertices left when fewer than s remain are leftover."""
    result, _ = recover_with_trace(g, s)
    return result


def _check_result(result: RecoveryResult, n: int, s: int) -> None:
    seen = np.concatenate([np.asarray(c) for c in result.clusters] + [result.leftover])
    if any(len(c) != s for c in result.clusters):
        raise InvariantViolationError("recovered cluster of wrong size")
    if seen.size != n or np.unique(seen).size != n:
        raise InvariantViolationError("clusters and leftover do not partition the vertex set")


def same_partition(result: RecoveryResult, truth: PlantedPartition) -> bool:
    """True iff recovered clusters equal the planted ones as sets and nothing is left over."""
    if result.leftover.size != 0:
        return False
    recovered = {frozenset(int(v) for v in c) for c in result.clusters}
    planted = {frozenset(int(v) for v in c) for c in truth.clusters()}
    return recovered == planted
