"""
Discrete operators on a weighted graph.

    ∫_V u dμ          = Σ_i μ_i u_i
    |∇u|_ij           = |u_j − u_i|                 (one entry per unordered edge)
    ∫_E |∇u|^p dω     = Σ_{i<j, i∼j} ω_ij |u_j − u_i|^p
    (Δ_p u)_i         = (1/μ_i) Σ_{j∼i} ω_ij |u_j − u_i|^{p−2} (u_j − u_i)

Each unordered edge is counted once in the edge integral, which makes
∫_V u Δ_p u dμ = −∫_E |∇u|^p dω hold exactly.

All functions are pure; inputs are never modified.
"""

from typing import Tuple

import numpy as np

from schemas.graph import WeightedGraph
from services.graph_core import EdgeFunction, VertexFunction, as_vertex_function
from utils.errors import DomainError


def _check_p(p: float, operation: str, lower: float = 1.0, strict: bool = True):
    if not np.isfinite(p) or (p <= lower if strict else p < lower):
        bound = f"> {lower}" if strict else f">= {lower}"
        raise DomainError(operation, f"exponent must be {bound}, got {p}")


def signed_power(t: np.ndarray, q: float) -> np.ndarray:
    """|t|^q · sign(t); zero at t = 0 for every q > 0."""
    return np.sign(t) * np.abs(t) ** q


def integral_v(g: WeightedGraph, u) -> float:
    """∫_V u dμ."""
    u = as_vertex_function(g, u, "integral_v")
    return float(np.dot(g.arrays.mu, u))


def edge_gradient_abs(g: WeightedGraph, u) -> EdgeFunction:
    """|u_j − u_i| on every stored edge, in edge order."""
    u = as_vertex_function(g, u, "edge_gradient_abs")
    a = g.arrays
    return np.abs(u[a.edge_j] - u[a.edge_i])


def dirichlet_energy(g: WeightedGraph, u, p: float) -> float:
    """∫_E |∇u|^p dω."""
    _check_p(p, "dirichlet_energy")
    u = as_vertex_function(g, u, "dirichlet_energy")
    a = g.arrays
    return float(np.dot(a.omega, np.abs(u[a.edge_j] - u[a.edge_i]) ** p))


def p_laplacian_kernel(g: WeightedGraph, u: np.ndarray, p: float) -> np.ndarray:
    """Δ_p u without argument checks; u must already be a length-n float array."""
    a = g.arrays
    flux = a.weight * signed_power(u[a.dst] - u[a.src], p - 1.0)
    return np.bincount(a.src, weights=flux, minlength=a.n) / a.mu


def p_laplacian(g: WeightedGraph, u, p: float) -> VertexFunction:
    """Δ_p u; for p < 2 the term |t|^{p−2}t is taken as 0 at t = 0."""
    _check_p(p, "p_laplacian")
    u = as_vertex_function(g, u, "p_laplacian")
    return p_laplacian_kernel(g, u, p)


def p_norm(g: WeightedGraph, u, q: float) -> float:
    """‖u‖_q = (Σ_i μ_i |u_i|^q)^{1/q}."""
    _check_p(q, "p_norm", strict=False)
    u = as_vertex_function(g, u, "p_norm")
    return float(np.dot(g.arrays.mu, np.abs(u) ** q) ** (1.0 / q))


def sobolev_norm(g: WeightedGraph, u, p: float) -> float:
    """‖u‖_{W^{1,p}} = (∫_E |∇u|^p dω + ∫_V |u|^p dμ)^{1/p}."""
    _check_p(p, "sobolev_norm")
    u = as_vertex_function(g, u, "sobolev_norm")
    return (dirichlet_energy(g, u, p) + float(np.dot(g.arrays.mu, np.abs(u) ** p))) ** (1.0 / p)


def green_pairing(g: WeightedGraph, u, p: float) -> Tuple[float, float]:
    """
    Both sides of Green's identity, evaluated independently.

    Returns (∫_V u Δ_p u dμ, −∫_E |∇u|^p dω).
    """
    _check_p(p, "green_pairing")
    u = as_vertex_function(g, u, "green_pairing")
    lhs = integral_v(g, u * p_laplacian_kernel(g, u, p))
    rhs = -dirichlet_energy(g, u, p)
    return lhs, rhs
