"""Planted partition model: ground-truth clusterings and random graph sampling.

A model instance places n = k*s vertices into k hidden clusters of size s and
draws each edge independently: probability p inside a cluster, q across.
Sampling is counter-based (Philox), with the draw for a vertex pair addressed
purely by (seed, i, j), so any induced subgraph of one sample can be replayed
without generating the rest of the graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySetError,
    NonDivisibleError,
    ZeroSizeError,
)

__all__ = [
    "PlantedPartition",
    "ModelParams",
    "Graph",
    "make_partition",
    "sample_graph",
    "sample_induced",
    "expectation_matrix",
    "true_cluster_matrix",
    "principal_submatrix",
    "permute_partition",
]

_SEED_MAX = 2**64


@dataclass(frozen=True, eq=False)
class PlantedPartition:
    """Ground-truth clustering of vertices 0..n-1 into k clusters of size s.

    `assignment[v]` is the cluster id (0-based) of vertex v.  Treat instances
    as immutable; the arrays they hold are never written after construction.
    """

    assignment: np.ndarray
    k: int
    s: int

    def __post_init__(self) -> None:
        assignment = np.asarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", assignment)
        if self.s <= 0:
            raise ZeroSizeError("cluster size must be positive")
        if assignment.size != self.k * self.s:
            raise NonDivisibleError(
                f"assignment length {assignment.size} != k*s = {self.k * self.s}"
            )
        counts = np.bincount(assignment, minlength=self.k)
        if counts.size != self.k or not (counts == self.s).all():
            raise NonDivisibleError("every cluster id in 0..k-1 must occur exactly s times")

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    def clusters(self) -> list[np.ndarray]:
        """Vertex ids of each cluster, ascending within a cluster."""
        return [np.flatnonzero(self.assignment == i) for i in range(self.k)]


@dataclass(frozen=True)
class ModelParams:
    """Edge probabilities and the 64-bit seed driving all pair draws."""

    p: float
    q: float
    seed: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.q < self.p <= 1.0):
            raise ValueError(f"need 0 <= q < p <= 1, got p={self.p}, q={self.q}")
        if not (0 <= self.seed < _SEED_MAX):
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph stored as a dense symmetric 0-1 matrix."""

    adj: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adj, dtype=np.uint8)
        object.__setattr__(self, "adj", adj)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if adj.max(initial=0) > 1:
            raise ValueError("adjacency entries must be 0 or 1")
        if (np.diag(adj) != 0).any():
            raise ValueError("diagonal must be zero")
        if not (adj == adj.T).all():
            raise ValueError("adjacency matrix must be symmetric")

    @property
    def n(self) -> int:
        return int(self.adj.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    def dense(self) -> np.ndarray:
        """Adjacency as float64, for spectral work."""
        return self.adj.astype(np.float64)


def make_partition(n: int, s: int) -> PlantedPartition:
    """Canonical contiguous partition: vertices i*s..(i+1)*s-1 form cluster i."""
    if s <= 0:
        raise ZeroSizeError("cluster size must be positive")
    if n % s != 0:
        raise NonDivisibleError(f"cluster size {s} does not divide n={n}")
    k = n // s
    return PlantedPartition(assignment=np.repeat(np.arange(k, dtype=np.int64), s), k=k, s=s)


def permute_partition(part: PlantedPartition, perm: np.ndarray) -> PlantedPartition:
    """Relabel vertices so that old vertex v becomes perm[v]."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.size != part.n or not np.array_equal(np.sort(perm), np.arange(part.n)):
        raise ValueError("perm must be a permutation of 0..n-1")
    assignment = np.empty(part.n, dtype=np.int64)
    assignment[perm] = part.assignment
    return PlantedPartition(assignment=assignment, k=part.k, s=part.s)


def _pair_index(i: np.ndarray, j: np.ndarray) -> np.ndarray:
    # Column-major upper-triangle numbering: depends on (i, j) only, not on n,
    # which is what makes induced subgraphs replayable.
    return j * (j - 1) // 2 + i


def _uniform_stream(seed: int, count: int) -> np.ndarray:
    """First `count` uniforms of the pair-draw stream for `seed`."""
    if count == 0:
        return np.empty(0, dtype=np.float64)
    raw = np.random.Philox(key=np.uint64(seed)).random_raw(count)
    return (raw >> np.uint64(11)) * 2.0**-53


def _sample_adjacency(part: PlantedPartition, params: ModelParams, vertices: np.ndarray) -> np.ndarray:
    m = vertices.size
    adj = np.zeros((m, m), dtype=np.uint8)
    if m < 2:
        return adj
    iu, ju = np.triu_indices(m, k=1)
    orig_i, orig_j = vertices[iu], vertices[ju]
    draws = _uniform_stream(params.seed, int(_pair_index(orig_i[-1], orig_j[-1])) + 1)
    u = draws[_pair_index(orig_i, orig_j)]
    same = part.assignment[orig_i] == part.assignment[orig_j]
    edge = u < np.where(same, params.p, params.q)
    adj[iu, ju] = edge
    adj[ju, iu] = edge
    return adj


def sample_graph(part: PlantedPartition, params: ModelParams) -> Graph:
    """Draw one random graph from the model; a pure function of (part, params)."""
    return Graph(adj=_sample_adjacency(part, params, np.arange(part.n, dtype=np.int64)))


def sample_induced(part: PlantedPartition, params: ModelParams, vertices: np.ndarray) -> Graph:
    """Replay the sample restricted to `vertices` (original ids, ascending).

    Uses the same per-pair draws as :func:`sample_graph`, so the result equals
    the corresponding principal submatrix of the full sample.
    """
    vertices = np.unique(np.asarray(vertices, dtype=np.int64))
    if vertices.size == 0:
        raise EmptySetError("vertex set must be nonempty")
    if vertices[0] < 0 or vertices[-1] >= part.n:
        raise ValueError("vertex ids out of range")
    return Graph(adj=_sample_adjacency(part, params, vertices))


def expectation_matrix(part: PlantedPartition, params: ModelParams) -> np.ndarray:
    """Rank-k matrix with p on same-cluster entries (diagonal included), q elsewhere."""
    same = part.assignment[:, None] == part.assignment[None, :]
    return np.where(same, params.p, params.q)


def true_cluster_matrix(part: PlantedPartition) -> np.ndarray:
    """0-1 co-membership matrix: entry (i, j) is 1 iff i and j share a cluster."""
    return (part.assignment[:, None] == part.assignment[None, :]).astype(np.float64)


def principal_submatrix(g, vertices: np.ndarray):
    """Restrict a Graph or square matrix to `vertices`, ascending, same kind out."""
    vertices = np.unique(np.asarray(vertices, dtype=np.int64))
    if vertices.size == 0:
        raise EmptySetError("vertex set must be nonempty")
    if isinstance(g, Graph):
        if vertices[0] < 0 or vertices[-1] >= g.n:
            raise ValueError("vertex ids out of range")
        return Graph(adj=g.adj[np.ix_(vertices, vertices)])
    a = np.asarray(g)
    if vertices[0] < 0 or vertices[-1] >= a.shape[0]:
        raise ValueError("vertex ids out of range")
    return a[np.ix_(vertices, vertices)]
