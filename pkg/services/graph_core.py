"""
Graph-level queries: connectivity, volume, and vertex-function coercion.
"""

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from schemas.graph import WeightedGraph
from utils.errors import DimensionError

VertexFunction = np.ndarray
EdgeFunction = np.ndarray


def adjacency_matrix(g: WeightedGraph) -> sparse.csr_matrix:
    """Symmetric weighted adjacency in CSR form."""
    a = g.arrays
    return sparse.coo_matrix((a.weight, (a.src, a.dst)), shape=(a.n, a.n)).tocsr()


def is_connected(g: WeightedGraph) -> bool:
    """True iff every vertex is reachable from vertex 0."""
    if g.n == 1:
        return True
    reached = csgraph.breadth_first_order(
        adjacency_matrix(g), 0, directed=False, return_predecessors=False
    )
    return len(reached) == g.n


def volume(g: WeightedGraph) -> float:
    """Vol(G) = Σ_i μ_i."""
    return float(np.sum(g.arrays.mu))


def as_vertex_function(g: WeightedGraph, u, operation: str = "vertex function") -> VertexFunction:
    """Coerce u to a float array of length n, rejecting wrong lengths and non-finite entries."""
    arr = np.asarray(u, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != g.n:
        raise DimensionError(operation, f"expected a vertex function of length {g.n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(operation, "vertex function has non-finite entries")
    return arr
