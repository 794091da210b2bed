"""
Oracle Agent

Independent reference computations used to validate solver output:

- grid_search_two_vertex: exhaustive search over φ = (1, t) on K2 (scale
  invariance reduces n = 2 to the ratio t = φ_1/φ_0).
- linear_eigen_oracle: p = α = 2 turns β into the smallest generalized Rayleigh
  quotient of (A, B) with A(φ) = ∫_E|∇φ|² dω − ∫_V hφ² dμ and B(φ) = ∫_V fφ² dμ.
  Solved with a closed form for n ≤ 3 and shifted inverse iteration for n ≤ 12.
- finite_difference_gradient: central differences of I, the check on ∂I/∂φ_i.

None of these share code paths with the solver beyond `energy` and `normalize`.
"""

import asyncio
import logging
from typing import Optional, Tuple

import numpy as np

from agents.base import BaseAgent
from agents.solver_agent import normalize
from schemas.graph import ProblemInstance
from schemas.oracle import OracleMethod, OracleReport
from services.graph_core import VertexFunction, as_vertex_function
from services.variational import energy, energy_gradient
from utils.errors import DomainError, OracleError
from utils.flow_logger import function_logger

logger = logging.getLogger(__name__)

GRID_LOG10_RANGE = (-4.0, 4.0)
GRID_MAX_EXPANSIONS = 60
GRID_REFINEMENTS = 3

EIGEN_MAX_N = 12
EIGEN_TOL = 1e-13
EIGEN_MAX_ITERS = 10_000
EIGEN_CHECK_TOL = 1e-10
EIGEN_SHIFT_SWITCH = 1e-3

FD_MAX_SHRINKS = 40


# ============================================================================
# Two-vertex grid search
# ============================================================================

def _two_vertex_energy(inst: ProblemInstance, t: np.ndarray) -> np.ndarray:
    """I(1, t) for an array of ratios t > 0."""
    a = inst.graph.arrays
    mu, h, f = a.mu, inst.h_array, inst.f_array
    p, alpha = inst.p, inst.alpha
    omega = a.omega[0]
    dirichlet = omega * np.abs(t - 1.0) ** p
    h_term = mu[0] * h[0] + mu[1] * h[1] * t ** p
    constraint = mu[0] * f[0] + mu[1] * f[1] * t ** alpha
    return (dirichlet - h_term) * constraint ** (-p / alpha)


@function_logger("Grid-search oracle on two vertices")
def grid_search_two_vertex(inst: ProblemInstance, resolution: int = 10_000) -> OracleReport:
    """
    Minimize I over φ = (1, t) on a log-spaced grid, then refine locally.

    The grid starts on [1e-4, 1e4] and its ends are pushed out (factor 2) until the
    minimum is interior; three linear refinements around the best node follow.
    """
    if inst.n != 2:
        raise OracleError(f"grid_search_two_vertex needs n = 2, got n = {inst.n}")
    if resolution < 10_000:
        raise OracleError(f"resolution must be >= 10^4, got {resolution}")

    lo, hi = GRID_LOG10_RANGE
    for _ in range(GRID_MAX_EXPANSIONS):
        t = np.logspace(lo, hi, resolution)
        values = _two_vertex_energy(inst, t)
        k = int(np.argmin(values))
        if k == 0:
            lo -= np.log10(2.0)
        elif k == resolution - 1:
            hi += np.log10(2.0)
        else:
            break
    else:
        raise OracleError("grid minimum stayed on the boundary; the infimum is not attained inside")

    beta = float(values[k])
    change = np.inf
    for _ in range(GRID_REFINEMENTS):
        left, right = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
        t = np.linspace(left, right, resolution)
        values = _two_vertex_energy(inst, t)
        k = int(np.argmin(values))
        change = abs(beta - float(values[k]))
        beta = float(values[k])

    phi = normalize(inst, np.array([1.0, t[k]]))
    logger.info("Grid oracle finished", extra={"beta": beta, "t": float(t[k]), "last_change": change})
    return OracleReport(
        beta_oracle=beta,
        lambda_oracle=-beta,
        phi_oracle=phi.tolist(),
        method=OracleMethod.GRID_1D,
        check=float(change),
    )


# ============================================================================
# Linear case: generalized Rayleigh quotient
# ============================================================================

def _quadratic_forms(inst: ProblemInstance) -> Tuple[np.ndarray, np.ndarray]:
    """Dense A = L − diag(μh) and the diagonal of B = diag(μf)."""
    a = inst.graph.arrays
    n = a.n
    lap = np.zeros((n, n))
    np.add.at(lap, (a.edge_i, a.edge_j), -a.omega)
    np.add.at(lap, (a.edge_j, a.edge_i), -a.omega)
    lap[np.diag_indices(n)] = -lap.sum(axis=1)
    return lap - np.diag(a.mu * inst.h_array), a.mu * inst.f_array


def _smallest_eigenpair_closed_form(m: np.ndarray) -> Tuple[float, np.ndarray]:
    """Smallest eigenpair of a symmetric matrix of order 1, 2 or 3 from its characteristic polynomial."""
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0]), np.ones(1)

    if n == 2:
        a, b, d = m[0, 0], m[0, 1], m[1, 1]
        beta = 0.5 * (a + d) - np.hypot(0.5 * (a - d), b)
        v = np.array([b, beta - a]) if abs(b) > 0 else np.array([1.0, 0.0])
        return float(beta), v / np.linalg.norm(v)

    # n == 3: trigonometric roots of det(m − xI) = 0
    q = np.trace(m) / 3.0
    shifted = m - q * np.eye(3)
    r = np.sqrt(np.sum(shifted * shifted) / 6.0)
    if r == 0:
        return float(q), np.ones(3) / np.sqrt(3.0)
    half_det = np.linalg.det(shifted / r) / 2.0
    angle = np.arccos(np.clip(half_det, -1.0, 1.0)) / 3.0
    beta = q + 2.0 * r * np.cos(angle + 2.0 * np.pi / 3.0)

    # eigenvector: the largest cross product of two rows of (m − βI)
    rows = m - beta * np.eye(3)
    candidates = [np.cross(rows[0], rows[1]), np.cross(rows[0], rows[2]), np.cross(rows[1], rows[2])]
    v = max(candidates, key=np.linalg.norm)
    return float(beta), v / np.linalg.norm(v)


def _smallest_eigenpair_inverse_iteration(
    m: np.ndarray, v0: Optional[np.ndarray] = None, sigma: Optional[float] = None
) -> Tuple[float, np.ndarray]:
    """
    Shifted inverse power iteration, from the all-ones vector unless v0 is given.

    The initial shift sits just below the Gershgorin lower bound, so m − σI is a
    nonsingular M-matrix on a connected graph and its inverse is entrywise
    positive: the iterates stay positive and converge to the smallest eigenpair.
    Once the eigen residual is small the shift moves up to ρ − 2‖mv − ρv‖, which
    stays below the smallest eigenvalue while the residual is below half the gap.
    """
    n = m.shape[0]
    scale = max(1.0, float(np.max(np.sum(np.abs(m), axis=1))))
    tol = EIGEN_TOL * scale
    if sigma is None:
        radius = np.sum(np.abs(m), axis=1) - np.abs(np.diag(m))
        gershgorin = float(np.min(np.diag(m) - radius))
        sigma = gershgorin - 1e-6 * (1.0 + abs(gershgorin))

    v = np.ones(n) / np.sqrt(n) if v0 is None else v0 / np.linalg.norm(v0)
    rho = float(v @ m @ v)
    for _ in range(EIGEN_MAX_ITERS):
        try:
            w = np.linalg.solve(m - sigma * np.eye(n), v)
        except np.linalg.LinAlgError:
            # shift landed on the eigenvalue: v is already the eigenvector
            break
        v = w / np.linalg.norm(w)
        mv = m @ v
        rho = float(v @ mv)
        res = float(np.linalg.norm(mv - rho * v))
        if res <= tol:
            break
        if res < EIGEN_SHIFT_SWITCH * scale:
            sigma = rho - 2.0 * res
    else:
        logger.warning("Inverse iteration hit the iteration cap", extra={"rho": rho})
    return rho, v


@function_logger("Linear eigen oracle")
def linear_eigen_oracle(inst: ProblemInstance) -> OracleReport:
    """
    β = min over φ of A(φ)/B(φ) for p = α = 2, with its positive eigenvector.

    λ_oracle = −β_oracle.
    """
    if inst.p != 2 or inst.alpha != 2:
        raise OracleError(f"linear_eigen_oracle needs p = alpha = 2, got p={inst.p}, alpha={inst.alpha}")
    if inst.n > EIGEN_MAX_N:
        raise OracleError(f"linear_eigen_oracle supports n <= {EIGEN_MAX_N}, got n = {inst.n}")

    a_form, b_diag = _quadratic_forms(inst)
    scale = 1.0 / np.sqrt(b_diag)
    m = scale[:, None] * a_form * scale[None, :]
    m = 0.5 * (m + m.T)

    if inst.n <= 3:
        beta, v = _smallest_eigenpair_closed_form(m)
        method = OracleMethod.EIGEN_2X2 if inst.n <= 2 else OracleMethod.EIGEN_DENSE
        if inst.n == 3:
            # the trigonometric root loses digits when two eigenvalues nearly meet
            beta, v = _smallest_eigenpair_inverse_iteration(m, v0=v, sigma=beta - 1e-8 * (1.0 + abs(beta)))
    else:
        beta, v = _smallest_eigenpair_inverse_iteration(m)
        method = OracleMethod.EIGEN_DENSE

    phi = scale * v
    if phi.sum() < 0:
        phi = -phi
    if np.any(phi <= 0):
        raise OracleError("smallest eigenvector is not strictly positive")
    phi = normalize(inst, phi)

    check = float(np.max(np.abs(a_form @ phi - beta * b_diag * phi)))
    if check > EIGEN_CHECK_TOL:
        raise OracleError(f"eigen residual {check:.3e} exceeds {EIGEN_CHECK_TOL}")

    return OracleReport(
        beta_oracle=beta,
        lambda_oracle=-beta,
        phi_oracle=phi.tolist(),
        method=method,
        check=check,
    )


# ============================================================================
# Finite differences
# ============================================================================

def finite_difference_gradient(inst: ProblemInstance, phi, step: float = 1e-6) -> VertexFunction:
    """
    Central differences (I(φ + s e_i) − I(φ − s e_i)) / 2s with s = step · max(1, |φ_i|).

    s is halved while φ_i − s ≤ 0, at most 40 times.
    """
    phi = as_vertex_function(inst.graph, phi, "finite_difference_gradient")
    if np.any(phi <= 0):
        raise DomainError("finite_difference_gradient", "φ must be strictly positive")
    if not step > 0:
        raise DomainError("finite_difference_gradient", f"step must be > 0, got {step}")

    grad = np.empty(inst.n)
    for i in range(inst.n):
        s = step * max(1.0, abs(phi[i]))
        shrinks = 0
        while phi[i] - s <= 0:
            if shrinks == FD_MAX_SHRINKS:
                raise OracleError(f"perturbation at vertex {i} stays inadmissible after {FD_MAX_SHRINKS} shrinks")
            s *= 0.5
            shrinks += 1
        plus, minus = phi.copy(), phi.copy()
        plus[i] += s
        minus[i] -= s
        grad[i] = (energy(inst, plus).energy - energy(inst, minus).energy) / (2.0 * s)
    return grad


def gradient_relative_error(gradient: np.ndarray, reference: np.ndarray) -> float:
    """‖g − g_ref‖_∞ / (1 + ‖g‖_∞)."""
    return float(np.max(np.abs(gradient - reference)) / (1.0 + np.max(np.abs(gradient))))


def energy_gradient_check(inst: ProblemInstance, phi, step: float = 1e-6) -> float:
    """Relative error of energy_gradient against finite_difference_gradient at φ."""
    return gradient_relative_error(energy_gradient(inst, phi), finite_difference_gradient(inst, phi, step))


class OracleAgent(BaseAgent):
    """Async front for the oracles."""

    name = "oracle"

    async def run(self, inst: ProblemInstance, method: OracleMethod = OracleMethod.EIGEN_DENSE,
                  beta_solver: Optional[float] = None, **kwargs) -> OracleReport:
        if method == OracleMethod.GRID_1D:
            report = await asyncio.to_thread(grid_search_two_vertex, inst, **kwargs)
        elif method in (OracleMethod.EIGEN_2X2, OracleMethod.EIGEN_DENSE):
            report = await asyncio.to_thread(linear_eigen_oracle, inst)
        else:
            raise OracleError(f"{method.value} produces a gradient, not a report; call finite_difference_gradient")
        return report.compare(beta_solver) if beta_solver is not None else report


_oracle_agent: Optional[OracleAgent] = None


def get_oracle_agent() -> OracleAgent:
    """Get or create the shared oracle agent."""
    global _oracle_agent
    if _oracle_agent is None:
        _oracle_agent = OracleAgent()
    return _oracle_agent


def reset_oracle_agent():
    """Drop the shared oracle agent (tests)."""
    global _oracle_agent
    _oracle_agent = None
