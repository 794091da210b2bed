"""Shared fixtures."""

import os

os.environ.setdefault("ENVIRONMENT", "testing")

import numpy as np
import pytest

from agents.oracle_agent import reset_oracle_agent
from agents.solver_agent import reset_solver_agent
from schemas.graph import ProblemInstance, WeightedGraph
from tools.graph_generators import GraphFamily, WeightPolicy, generate
from utils.flow_logger import reset_flow_logger

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0  # (√5 − 1)/2


def k2(h, f=(1.0, 1.0), p=2.0, alpha=2.0, omega=1.0, mu=(1.0, 1.0)) -> ProblemInstance:
    graph = WeightedGraph(n=2, mu=mu, edges=((0, 1, omega),))
    return ProblemInstance(graph=graph, h=h, f=f, p=p, alpha=alpha)


def random_instance(
    seed: int,
    n: int,
    p: float,
    alpha: float,
    h_range=(-1.0, 1.0),
    f_range=(0.5, 2.0),
) -> ProblemInstance:
    """Random connected graph with uniform(0.5, 2) weights and uniform h, f."""
    graph = generate(GraphFamily.RANDOM_CONNECTED, n, seed, WeightPolicy.uniform(0.5, 2.0))
    rng = np.random.default_rng([seed, 99])
    h = tuple(rng.uniform(*h_range, size=n))
    f = tuple(rng.uniform(*f_range, size=n))
    return ProblemInstance(graph=graph, h=h, f=f, p=p, alpha=alpha)


@pytest.fixture(autouse=True)
def fresh_singletons():
    """Agents and the flow logger are module singletons."""
    reset_solver_agent()
    reset_oracle_agent()
    reset_flow_logger()
    yield
    reset_flow_logger()


@pytest.fixture
def k2_graph():
    return WeightedGraph(n=2, mu=(1.0, 1.0), edges=((0, 1, 1.0),))


@pytest.fixture
def p3_graph():
    """P3 with μ = (1, 2, 1) and unit weights."""
    return WeightedGraph(n=3, mu=(1.0, 2.0, 1.0), edges=((0, 1, 1.0), (1, 2, 1.0)))


@pytest.fixture
def k2_linear():
    """K2, h = (1, 0), f ≡ 1, p = α = 2: β = (1 − √5)/2."""
    return k2(h=(1.0, 0.0))


@pytest.fixture
def k2_constant_minimizer():
    """K2, h ≡ 1, f ≡ 1, p = 2, α = 4: β = −√2 at constant φ."""
    return k2(h=(1.0, 1.0), alpha=4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
