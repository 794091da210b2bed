"""
Services Package

Numerical layers, bottom-up:
- graph_core: connectivity, volume, vertex-function coercion
- operators: integrals, |∇u|, Dirichlet energy, Δ_p, norms
- variational: energy functional, λ_φ, gradient, residual, bounds

Usage:
    from services import energy, energy_gradient

    bd = energy(inst, phi)
"""

from .graph_core import (
    adjacency_matrix,
    as_vertex_function,
    is_connected,
    volume,
)

from .operators import (
    dirichlet_energy,
    edge_gradient_abs,
    green_pairing,
    integral_v,
    p_laplacian,
    p_norm,
    sobolev_norm,
)

from .variational import (
    bound_constants,
    energy,
    energy_gradient,
    evaluate_point,
    holder_check,
    lambda_of,
    lower_bound,
    residual,
    verify_solution,
)

__all__ = [
    # Graph
    "adjacency_matrix",
    "as_vertex_function",
    "is_connected",
    "volume",
    # Operators
    "dirichlet_energy",
    "edge_gradient_abs",
    "green_pairing",
    "integral_v",
    "p_laplacian",
    "p_norm",
    "sobolev_norm",
    # Variational
    "bound_constants",
    "energy",
    "energy_gradient",
    "evaluate_point",
    "holder_check",
    "lambda_of",
    "lower_bound",
    "residual",
    "verify_solution",
]
