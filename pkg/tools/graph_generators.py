"""
Graph and instance generators.

Deterministic families come from networkx; the random connected family is a
seeded random recursive tree plus seeded extra edges, so it is connected by
construction. Every random draw flows from the integer seed.
"""

import logging
from enum import Enum
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from schemas.graph import ProblemInstance, WeightedGraph
from utils.errors import InstanceValidationError
from utils.flow_logger import function_logger

logger = logging.getLogger(__name__)

# probability of each non-tree pair in random_connected
EXTRA_EDGE_PROBABILITY = 0.2


class GraphFamily(str, Enum):
    """Supported graph families."""
    PATH = "path"
    CYCLE = "cycle"
    COMPLETE = "complete"
    STAR = "star"
    RANDOM_CONNECTED = "random_connected"


class WeightPolicy(BaseModel):
    """Edge weights: all 1, or i.i.d. uniform on (low, high) with 0 < low < high."""

    kind: str = "unit"
    low: float = 1.0
    high: float = 1.0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_bounds(self) -> "WeightPolicy":
        if self.kind not in ("unit", "uniform"):
            raise InstanceValidationError("weights", f"unknown weight policy '{self.kind}'")
        if self.kind == "uniform" and not 0 < self.low < self.high:
            raise InstanceValidationError("weights", f"uniform needs 0 < a < b, got ({self.low}, {self.high})")
        return self

    @classmethod
    def unit(cls) -> "WeightPolicy":
        return cls()

    @classmethod
    def uniform(cls, low: float, high: float) -> "WeightPolicy":
        return cls(kind="uniform", low=low, high=high)

    @classmethod
    def parse(cls, spec: str) -> "WeightPolicy":
        """'unit' or 'uniform:a,b'."""
        if spec == "unit":
            return cls.unit()
        kind, _, args = spec.partition(":")
        if kind != "uniform":
            raise InstanceValidationError("weights", f"expected 'unit' or 'uniform:a,b', got '{spec}'")
        low, high = _parse_floats(args, "weights", expected=2)
        return cls.uniform(low, high)

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "unit":
            return np.ones(count)
        return rng.uniform(self.low, self.high, size=count)


def _parse_floats(text: str, field: str, expected: Optional[int] = None) -> List[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InstanceValidationError(field, f"could not parse numbers from '{text}'")
    if expected is not None and len(values) != expected:
        raise InstanceValidationError(field, f"expected {expected} numbers, got '{text}'")
    return values


def parse_generator_spec(spec: str) -> Tuple[GraphFamily, int]:
    """'FAMILY:N' → (family, n)."""
    family, _, count = spec.partition(":")
    try:
        return GraphFamily(family), int(count)
    except ValueError:
        choices = ", ".join(f.value for f in GraphFamily)
        raise InstanceValidationError("gen", f"expected FAMILY:N with FAMILY in {{{choices}}}, got '{spec}'")


def _min_vertices(family: GraphFamily) -> int:
    return 3 if family == GraphFamily.CYCLE else 1


def _random_connected_edges(n: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    labels = rng.permutation(n)
    tree = {
        tuple(sorted((int(labels[v]), int(labels[rng.integers(0, v)])))) for v in range(1, n)
    }
    extra = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in tree and rng.random() < EXTRA_EDGE_PROBABILITY:
                extra.append((i, j))
    return sorted(tree) + extra


@function_logger("Generate graph")
def generate(
    family: GraphFamily,
    n: int,
    seed: int = 0,
    weight_policy: Optional[WeightPolicy] = None,
) -> WeightedGraph:
    """
    Connected graph of the requested family with μ ≡ 1.

    Weights are drawn after the structure from the same seeded generator, one per
    edge in (i, j) order.
    """
    family = GraphFamily(family)
    weight_policy = weight_policy or WeightPolicy.unit()
    if n < _min_vertices(family):
        raise InstanceValidationError("n", f"{family.value} needs n >= {_min_vertices(family)}, got {n}")

    rng = np.random.default_rng(seed)
    if family == GraphFamily.RANDOM_CONNECTED:
        pairs = _random_connected_edges(n, rng)
    else:
        builders = {
            GraphFamily.PATH: nx.path_graph,
            GraphFamily.CYCLE: nx.cycle_graph,
            GraphFamily.COMPLETE: nx.complete_graph,
            GraphFamily.STAR: lambda k: nx.star_graph(k - 1),
        }
        pairs = [(min(u, v), max(u, v)) for u, v in builders[family](n).edges()]

    pairs.sort()
    weights = weight_policy.draw(len(pairs), rng)
    edges = tuple((i, j, float(w)) for (i, j), w in zip(pairs, weights))
    logger.debug("Generated graph", extra={"family": family.value, "n": n, "edges": len(edges)})
    return WeightedGraph(n=n, mu=(1.0,) * n, edges=edges)


def vertex_values(spec: str, n: int, rng: np.random.Generator, field: str = "h") -> Tuple[float, ...]:
    """
    Vertex function from a short spec.

    'const:c' repeats c, 'uniform:a,b' draws n values from rng, 'values:v0,...' lists them.
    """
    kind, _, args = spec.partition(":")
    if kind == "const":
        (c,) = _parse_floats(args, field, expected=1)
        return (c,) * n
    if kind == "uniform":
        low, high = _parse_floats(args, field, expected=2)
        if not low < high:
            raise InstanceValidationError(field, f"uniform needs a < b, got ({low}, {high})")
        return tuple(float(x) for x in rng.uniform(low, high, size=n))
    if kind == "values":
        values = _parse_floats(args, field)
        if len(values) != n:
            raise InstanceValidationError(field, f"expected {n} values, got {len(values)}")
        return tuple(values)
    raise InstanceValidationError(field, f"expected const:c, uniform:a,b or values:..., got '{spec}'")


def generate_instance(
    family: GraphFamily,
    n: int,
    p: float,
    alpha: float,
    seed: int = 0,
    weight_policy: Optional[WeightPolicy] = None,
    h_spec: str = "const:0",
    f_spec: str = "const:1",
) -> ProblemInstance:
    """Generated graph plus h and f; h and f use their own streams derived from seed."""
    graph = generate(family, n, seed, weight_policy)
    h = vertex_values(h_spec, n, np.random.default_rng([seed, 1]), "h")
    f = vertex_values(f_spec, n, np.random.default_rng([seed, 2]), "f")
    return ProblemInstance(graph=graph, h=h, f=f, p=p, alpha=alpha)
