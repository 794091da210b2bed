"""
Energy functional of the p-th Yamabe equation and everything derived from it.

    I(φ)  = (∫_E|∇φ|^p dω − ∫_V hφ^p dμ) · (∫_V fφ^α dμ)^{−p/α}
    λ_φ   = −(∫_E|∇φ|^p dω − ∫_V hφ^p dμ) / ∫_V fφ^α dμ
    ∂I/∂φ_i = −p μ_i (Δ_pφ_i + h_iφ_i^{p−1} − λ_φ f_iφ_i^{α−1}) · (∫_V fφ^α dμ)^{−p/α}

I is defined on φ ≥ 0, φ ≢ 0 and is invariant under φ → cφ, c > 0.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from schemas.energy import BoundConstants, EnergyBreakdown
from schemas.graph import ProblemInstance, WeightedGraph
from schemas.run_record import VerifyReport
from services.graph_core import VertexFunction, as_vertex_function, volume
from services.operators import p_laplacian_kernel, signed_power
from utils.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PointEvaluation:
    """Everything the solver needs at one iterate, from a single operator pass."""

    phi: np.ndarray
    breakdown: EnergyBreakdown
    laplacian: np.ndarray
    residual: np.ndarray
    gradient: np.ndarray
    rhs_scale: float  # ‖λ_φ f φ^{α−1}‖_∞

    @property
    def energy(self) -> float:
        return self.breakdown.energy

    @property
    def lambda_(self) -> float:
        return self.breakdown.lambda_

    @property
    def residual_inf(self) -> float:
        return float(np.max(np.abs(self.residual)))


def _admissible(inst: ProblemInstance, phi, operation: str, strict: bool) -> np.ndarray:
    phi = as_vertex_function(inst.graph, phi, operation)
    if strict:
        bad = np.flatnonzero(phi <= 0)
        if bad.size:
            raise DomainError(operation, f"φ must be strictly positive; φ[{bad[0]}] = {phi[bad[0]]}")
    else:
        bad = np.flatnonzero(phi < 0)
        if bad.size:
            raise DomainError(operation, f"φ must be nonnegative; φ[{bad[0]}] = {phi[bad[0]]}")
        if not np.any(phi > 0):
            raise DomainError(operation, "φ ≡ 0 is outside the domain of I")
    return phi


def _breakdown(inst: ProblemInstance, phi: np.ndarray) -> EnergyBreakdown:
    a = inst.graph.arrays
    p, alpha = inst.p, inst.alpha
    dirichlet = float(np.dot(a.omega, np.abs(phi[a.edge_j] - phi[a.edge_i]) ** p))
    h_term = float(np.dot(a.mu, inst.h_array * phi ** p))
    constraint = float(np.dot(a.mu, inst.f_array * phi ** alpha))
    numerator = dirichlet - h_term
    return EnergyBreakdown(
        dirichlet=dirichlet,
        h_term=h_term,
        constraint=constraint,
        energy=numerator * constraint ** (-p / alpha),
        lambda_=-numerator / constraint,
    )


def _equation_terms(inst: ProblemInstance, phi: np.ndarray, lam: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Δ_pφ, residual, λ f φ^{α−1}) for a given λ."""
    lap = p_laplacian_kernel(inst.graph, phi, inst.p)
    rhs = lam * inst.f_array * phi ** (inst.alpha - 1.0)
    return lap, lap + inst.h_array * phi ** (inst.p - 1.0) - rhs, rhs


def evaluate_point(inst: ProblemInstance, phi) -> PointEvaluation:
    """
    Energy, λ_φ, Δ_pφ, residual and gradient at a strictly positive φ.

    Used by the solver loop; the public operations below are views over the
    same formulas.
    """
    phi = _admissible(inst, phi, "evaluate_point", strict=True)
    bd = _breakdown(inst, phi)
    lap, res, rhs = _equation_terms(inst, phi, bd.lambda_)
    grad = -inst.p * inst.graph.arrays.mu * res * bd.constraint ** (-inst.p / inst.alpha)
    return PointEvaluation(
        phi=phi,
        breakdown=bd,
        laplacian=lap,
        residual=res,
        gradient=grad,
        rhs_scale=float(np.max(np.abs(rhs))),
    )


def energy(inst: ProblemInstance, phi) -> EnergyBreakdown:
    """I(φ) with its three integrals and λ_φ; φ ≥ 0, φ ≢ 0."""
    phi = _admissible(inst, phi, "energy", strict=False)
    return _breakdown(inst, phi)


def lambda_of(inst: ProblemInstance, phi) -> float:
    """λ_φ; scales as λ_{cφ} = c^{p−α} λ_φ."""
    return energy(inst, phi).lambda_


def energy_gradient(inst: ProblemInstance, phi) -> VertexFunction:
    """
    ∂I/∂φ_i at φ.

    φ must be strictly positive unless p ≥ 2 and α ≥ 2, in which case zero
    entries are allowed (φ ≢ 0 still required). The Euler identity
    Σ_i φ_i ∂I/∂φ_i = 0 holds because I has degree 0.
    """
    strict = inst.p < 2 or inst.alpha < 2
    phi = _admissible(inst, phi, "energy_gradient", strict=strict)
    bd = _breakdown(inst, phi)
    _, res, _ = _equation_terms(inst, phi, bd.lambda_)
    return -inst.p * inst.graph.arrays.mu * res * bd.constraint ** (-inst.p / inst.alpha)


def residual(inst: ProblemInstance, phi, lam: float) -> VertexFunction:
    """Δ_pφ + hφ^{p−1} − λ f φ^{α−1}; φ must be strictly positive."""
    phi = _admissible(inst, phi, "residual", strict=True)
    _, res, _ = _equation_terms(inst, phi, float(lam))
    return res


def residual_scale(inst: ProblemInstance, phi, lam: float) -> float:
    """‖λ f φ^{α−1}‖_∞, the reference magnitude for relative residuals."""
    phi = as_vertex_function(inst.graph, phi, "residual_scale")
    return float(np.max(np.abs(lam * inst.f_array * np.abs(phi) ** (inst.alpha - 1.0))))


def bound_constants(inst: ProblemInstance) -> BoundConstants:
    h, f = inst.h_array, inst.f_array
    return BoundConstants(
        f_max=float(f.max()),
        f_min=float(f.min()),
        neg_h_min=float((-h).min()),
        abs_h_max=float(np.abs(h).max()),
        volume=volume(inst.graph),
    )


def lower_bound(inst: ProblemInstance) -> float:
    """
    C = ((−h)_m ∧ 0) · f_m^{−p/α} · Vol(G)^{1−p/α} ≤ 0, f_m = min_i f_i.

    The prefactor is negative whenever it is nonzero, so the constraint integral
    has to be bounded from below, which takes the minimum of f.

    I(φ) ≥ C for every admissible φ; equality for constant h, f and φ.
    """
    c = bound_constants(inst)
    ratio = inst.p / inst.alpha
    return min(c.neg_h_min, 0.0) * c.f_min ** (-ratio) * c.volume ** (1.0 - ratio)


def holder_check(g: WeightedGraph, phi, p: float, alpha: float) -> Tuple[float, float]:
    """
    Both sides of ‖φ‖_p^p ≤ ‖φ‖_α^p · Vol(G)^{1−p/α} for α ≥ p ≥ 1.

    Equality when φ is constant or α = p.
    """
    if not (np.isfinite(p) and np.isfinite(alpha) and alpha >= p >= 1):
        raise DomainError("holder_check", f"need alpha >= p >= 1, got p={p}, alpha={alpha}")
    phi = as_vertex_function(g, phi, "holder_check")
    if not np.any(phi != 0):
        raise DomainError("holder_check", "φ ≡ 0")
    mu = g.arrays.mu
    abs_phi = np.abs(phi)
    lhs = float(np.dot(mu, abs_phi ** p))
    rhs = float(np.dot(mu, abs_phi ** alpha)) ** (p / alpha) * volume(g) ** (1.0 - p / alpha)
    return lhs, rhs


def verify_solution(inst: ProblemInstance, phi, lam: float, tol: float = 1e-9) -> VerifyReport:
    """
    Re-check a claimed solution independently of the solver.

    Passes iff φ > 0 and ‖r‖_∞ ≤ tol · (1 + ‖λ f φ^{α−1}‖_∞). Entries φ_i ≤ 0 are
    reported; the residual is still evaluated there with signed powers.
    """
    phi = as_vertex_function(inst.graph, phi, "verify_solution")
    lam = float(lam)
    nonpositive = [int(i) for i in np.flatnonzero(phi <= 0)]
    positive = not nonpositive

    lap = p_laplacian_kernel(inst.graph, phi, inst.p)
    rhs = lam * inst.f_array * signed_power(phi, inst.alpha - 1.0)
    res = lap + inst.h_array * signed_power(phi, inst.p - 1.0) - rhs
    residual_inf = float(np.max(np.abs(res)))
    relative = residual_inf / (1.0 + float(np.max(np.abs(rhs))))
    constraint = float(np.dot(inst.graph.arrays.mu, inst.f_array * np.abs(phi) ** inst.alpha))

    report = VerifyReport(
        residual=res.tolist(),
        residual_inf=residual_inf,
        relative_residual=relative,
        tol=tol,
        positive=positive,
        nonpositive_indices=nonpositive,
        constraint=constraint,
        lambda_=lam,
        lambda_phi=_breakdown(inst, phi).lambda_ if positive else None,
        passed=positive and relative <= tol,
    )
    if not report.passed:
        logger.warning(
            "Solution failed verification",
            extra={"relative_residual": relative, "nonpositive": nonpositive[:10]},
        )
    return report
