"""
Graph and problem contracts.

WeightedGraph is the finite graph G = (V, E) with vertex measure mu and
symmetric edge measure omega. Each unordered edge is stored once as (i, j, omega)
with i < j, sorted by (i, j). ProblemInstance adds the coefficient functions h, f
and the exponents p, alpha of

    Δ_p φ + h φ^{p-1} = λ f φ^{α-1}.

Both models are frozen. Numerical code works on the read-only numpy views exposed
by `WeightedGraph.arrays`, `ProblemInstance.h_array` and `ProblemInstance.f_array`.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from utils.errors import InstanceValidationError

Edge = Tuple[int, int, float]


def _frozen_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GraphArrays:
    """
    Read-only numpy view of a WeightedGraph.

    Unordered edges (edge_i < edge_j) are in (i, j) order. The directed arrays
    (src, dst, weight) hold every edge in both orientations sorted by (src, dst), so a
    bincount over src accumulates each vertex's neighbours in ascending index.
    """

    n: int
    mu: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    omega: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @classmethod
    def from_graph(cls, graph: "WeightedGraph") -> "GraphArrays":
        if graph.edges:
            ei, ej, om = (np.asarray(col) for col in zip(*graph.edges))
        else:
            ei = ej = np.zeros(0, dtype=np.int64)
            om = np.zeros(0, dtype=float)
        ei = ei.astype(np.int64)
        ej = ej.astype(np.int64)
        om = om.astype(float)

        src = np.concatenate([ei, ej])
        dst = np.concatenate([ej, ei])
        weight = np.concatenate([om, om])
        order = np.lexsort((dst, src))

        def ro(a):
            a.setflags(write=False)
            return a

        return cls(
            n=graph.n,
            mu=_frozen_array(graph.mu),
            edge_i=ro(ei),
            edge_j=ro(ej),
            omega=ro(om),
            src=ro(src[order]),
            dst=ro(dst[order]),
            weight=ro(weight[order]),
        )


class WeightedGraph(BaseModel):
    """
    Finite weighted graph with positive vertex and edge measures.

    Vertices are 0..n-1. Edges given as (j, i) with j > i are stored as (i, j);
    self-loops and repeated unordered pairs are rejected.
    """

    n: int = Field(..., description="Vertex count")
    mu: Tuple[float, ...] = Field(..., description="Vertex measure, one positive value per vertex")
    edges: Tuple[Edge, ...] = Field(default=(), description="Unordered edges (i, j, omega), i < j")

    model_config = ConfigDict(frozen=True)

    @field_validator("n")
    @classmethod
    def validate_n(cls, n: int) -> int:
        if n < 1:
            raise InstanceValidationError("n", f"vertex count must be >= 1, got {n}")
        return n

    @field_validator("mu")
    @classmethod
    def validate_mu(cls, mu: Tuple[float, ...], info: ValidationInfo) -> Tuple[float, ...]:
        n = info.data.get("n")
        if n is not None and len(mu) != n:
            raise InstanceValidationError("mu", f"expected {n} entries, got {len(mu)}")
        for k, value in enumerate(mu):
            if not np.isfinite(value) or value <= 0:
                raise InstanceValidationError("mu", f"vertex measure must be positive and finite, got {value}", k)
        return mu

    @field_validator("edges")
    @classmethod
    def canonicalize_edges(cls, edges: Tuple[Edge, ...], info: ValidationInfo) -> Tuple[Edge, ...]:
        n = info.data.get("n")
        seen = {}
        canonical = []
        for k, (i, j, omega) in enumerate(edges):
            if n is not None and not (0 <= i < n and 0 <= j < n):
                raise InstanceValidationError("edges", f"endpoint out of range 0..{n - 1}: ({i}, {j})", k)
            if i == j:
                raise InstanceValidationError("edges", f"self-loop at vertex {i}", k)
            if not np.isfinite(omega) or omega <= 0:
                raise InstanceValidationError("edges", f"edge weight must be positive and finite, got {omega}", k)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InstanceValidationError(
                    "edges", f"duplicate edge {key} (first given as edges[{seen[key]}])", k
                )
            seen[key] = k
            canonical.append((key[0], key[1], float(omega)))
        canonical.sort(key=lambda e: (e[0], e[1]))
        return tuple(canonical)

    @cached_property
    def arrays(self) -> GraphArrays:
        """Numpy view used by the operators."""
        return GraphArrays.from_graph(self)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> Tuple[Edge, ...]:
        """Edges incident to vertex i."""
        return tuple(e for e in self.edges if e[0] == i or e[1] == i)

    # cached_property entries live in __dict__; compare and hash fields only
    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.n, self.mu, self.edges) == (other.n, other.mu, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.mu, self.edges))


class ProblemInstance(BaseModel):
    """
    One p-th Yamabe problem on a finite connected graph.

    Requires f > 0 everywhere and alpha >= p > 1. Connectivity is checked on
    construction because the positivity of the minimizer depends on it.
    """

    graph: WeightedGraph
    h: Tuple[float, ...] = Field(..., description="Coefficient of φ^{p-1}, any sign")
    f: Tuple[float, ...] = Field(..., description="Coefficient of λφ^{α-1}, strictly positive")
    p: float = Field(..., description="Laplacian exponent, p > 1")
    alpha: float = Field(..., description="Nonlinearity exponent, alpha >= p")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_instance(self) -> "ProblemInstance":
        from services.graph_core import is_connected

        n = self.graph.n
        for name in ("h", "f"):
            values = getattr(self, name)
            if len(values) != n:
                raise InstanceValidationError(name, f"expected {n} entries, got {len(values)}")
            for k, value in enumerate(values):
                if not np.isfinite(value):
                    raise InstanceValidationError(name, f"value must be finite, got {value}", k)
        for k, value in enumerate(self.f):
            if value <= 0:
                raise InstanceValidationError("f", f"f must be > 0 at every vertex, got {value}", k)
        if not np.isfinite(self.p) or self.p <= 1:
            raise InstanceValidationError("p", f"p must be > 1, got {self.p}")
        if not np.isfinite(self.alpha) or self.alpha < self.p:
            raise InstanceValidationError("alpha", f"alpha < p ({self.alpha} < {self.p})")
        if not is_connected(self.graph):
            raise InstanceValidationError("edges", "graph is not connected")
        return self

    @cached_property
    def h_array(self) -> np.ndarray:
        return _frozen_array(self.h)

    @cached_property
    def f_array(self) -> np.ndarray:
        return _frozen_array(self.f)

    @property
    def n(self) -> int:
        return self.graph.n

    def with_exponents(self, p: float, alpha: float) -> "ProblemInstance":
        """Same graph and coefficients, new exponents (validated)."""
        return ProblemInstance(graph=self.graph, h=self.h, f=self.f, p=p, alpha=alpha)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (self.graph, self.h, self.f, self.p, self.alpha) == (
            other.graph, other.h, other.f, other.p, other.alpha,
        )

    def __hash__(self) -> int:
        return hash((self.graph, self.h, self.f, self.p, self.alpha))
