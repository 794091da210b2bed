"""
Solver Agent

Minimizes I(φ) over {φ ≥ 0, ∫ f φ^α dμ = 1} by projected gradient descent with
Armijo backtracking, and returns a strictly positive minimizer with its λ.

Each iterate is:
    φ ← normalize(max(φ − t ∇I(φ), floor_eps))
with t found by backtracking from a trial step. The trial step is the spectral
length sᵀy / yᵀy of the last accepted move (s = Δφ, y = Δ∇I) when sᵀy > 0, and
the last accepted step times step_growth otherwise.

Near a minimizer the Armijo decrease c·t·‖∇I‖² drops below the rounding level
of I itself. From there on energy cannot rank trial points, so a step is
accepted only when ‖∇I‖ strictly decreases and I does not rise beyond rounding.

Restart 0 starts from the constant function (or the configured start); later
restarts start from i.i.d. uniform(0.5, 1.5) draws of one seeded generator.
The lowest β among converged restarts wins; ties within 1e-12 go to the lower
restart index.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from agents.base import BaseAgent
from schemas.graph import ProblemInstance
from schemas.solver import InitPolicy, SolveResult, SolverConfig, TraceEntry
from services.graph_core import VertexFunction, as_vertex_function, is_connected
from services.variational import (
    PointEvaluation,
    bound_constants,
    energy,
    energy_gradient,
    evaluate_point,
)
from utils.errors import DomainError, InstanceValidationError, NotConvergedError
from utils.flow_logger import function_logger, log_step

logger = logging.getLogger(__name__)

# Per-term rounding of the energy sums; scaled by n and the size of the terms
ENERGY_ROUNDOFF = 8 * np.finfo(float).eps
BETA_TIE = 1e-12
RESTART_AGREEMENT = 1e-6


def normalize(inst: ProblemInstance, phi) -> VertexFunction:
    """φ / (∫ f φ^α dμ)^{1/α}; φ ≥ 0 and φ ≢ 0."""
    phi = as_vertex_function(inst.graph, phi, "normalize")
    if np.any(phi < 0):
        raise DomainError("normalize", f"φ must be nonnegative; φ[{int(np.argmin(phi))}] = {phi.min()}")
    top = phi.max()
    if top <= 0:
        raise DomainError("normalize", "φ ≡ 0 cannot be normalized")
    scaled = phi / top
    constraint = float(np.dot(inst.graph.arrays.mu, inst.f_array * scaled ** inst.alpha))
    return scaled / constraint ** (1.0 / inst.alpha)


def _project(inst: ProblemInstance, phi: np.ndarray, floor_eps: float) -> np.ndarray:
    return normalize(inst, np.maximum(phi, floor_eps))


def descend_step(
    inst: ProblemInstance,
    phi,
    step: float,
    gradient: Optional[np.ndarray] = None,
    floor_eps: float = 1e-14,
) -> Tuple[VertexFunction, float]:
    """
    One projected-gradient iterate.

    Returns (normalize(max(φ − step·∇I(φ), floor_eps)), I of that point).
    """
    phi = as_vertex_function(inst.graph, phi, "descend_step")
    if gradient is None:
        gradient = energy_gradient(inst, phi)
    phi_next = _project(inst, phi - step * gradient, floor_eps)
    return phi_next, energy(inst, phi_next).energy


def sobolev_bound(inst: ProblemInstance, beta0: float) -> float:
    """
    Bound on ‖φ_k‖_{W^{1,p}}^p along a normalized minimizing sequence with I(φ_k) ≤ β₀:

        1 + β₀ + (1 + |h|_M) · Vol(G)^{1−p/α} · f_m^{−p/α}
    """
    c = bound_constants(inst)
    ratio = inst.p / inst.alpha
    return 1.0 + beta0 + (1.0 + c.abs_h_max) * c.volume ** (1.0 - ratio) * c.f_min ** (-ratio)


@dataclass
class _RunOutcome:
    restart: int
    point: PointEvaluation
    iterations: int
    converged: bool
    trace: List[TraceEntry] = field(default_factory=list)

    @property
    def relative_residual(self) -> float:
        return self.point.residual_inf / (1.0 + self.point.rhs_scale)


def _is_converged(point: PointEvaluation, cfg: SolverConfig) -> bool:
    relative = point.residual_inf / (1.0 + point.rhs_scale)
    return relative <= cfg.grad_tol and float(point.phi.min()) > cfg.floor_eps


def _initial_guess(inst: ProblemInstance, cfg: SolverConfig, restart: int, rng: np.random.Generator) -> np.ndarray:
    if restart == 0 and cfg.init_policy == InitPolicy.CONSTANT:
        return np.ones(inst.n)
    if restart == 0 and cfg.init_policy == InitPolicy.USER_SUPPLIED:
        return as_vertex_function(inst.graph, cfg.initial_phi, "initial_phi")
    return rng.uniform(0.5, 1.5, size=inst.n)


def _trace_entry(inst: ProblemInstance, point: PointEvaluation, iteration: int, step: float) -> TraceEntry:
    phi = point.phi
    sobolev_p = point.breakdown.dirichlet + float(np.dot(inst.graph.arrays.mu, phi ** inst.p))
    return TraceEntry(
        iteration=iteration,
        energy=point.energy,
        residual_inf=point.residual_inf,
        sobolev_p=sobolev_p,
        step=step,
    )


def energy_noise(inst: ProblemInstance, point: PointEvaluation) -> float:
    """Rounding level of I at `point`: differences of I below this carry no information."""
    bd = point.breakdown
    terms = (bd.dirichlet + abs(bd.h_term)) * bd.constraint ** (-inst.p / inst.alpha)
    return ENERGY_ROUNDOFF * inst.n * (1.0 + abs(bd.energy) + terms)


def _accepts(
    point: PointEvaluation, trial: PointEvaluation, t: float, gnorm2: float, noise: float, armijo_c: float
) -> bool:
    decrease = point.energy - trial.energy
    required = armijo_c * t * gnorm2
    if decrease > noise and decrease >= required:
        return True
    if required > noise:
        return False
    # energy cannot resolve the decrease: rank by the gradient norm instead
    return decrease >= -noise and float(np.dot(trial.gradient, trial.gradient)) < gnorm2


def _line_search(
    inst: ProblemInstance, point: PointEvaluation, step: float, cfg: SolverConfig
) -> Tuple[Optional[PointEvaluation], float]:
    """Backtrack from `step` until a trial is accepted; (None, last step) if none is."""
    g = point.gradient
    gnorm2 = float(np.dot(g, g))
    noise = energy_noise(inst, point)
    t = step
    for _ in range(cfg.max_backtracks):
        try:
            trial = evaluate_point(inst, _project(inst, point.phi - t * g, cfg.floor_eps))
        except DomainError:
            t *= cfg.backtrack_factor
            continue
        if _accepts(point, trial, t, gnorm2, noise, cfg.armijo_c):
            return trial, t
        t *= cfg.backtrack_factor
    return None, t


def _next_step(previous: PointEvaluation, accepted: PointEvaluation, t: float, cfg: SolverConfig) -> float:
    """Trial step for the next iteration."""
    if cfg.spectral_step:
        s = accepted.phi - previous.phi
        y = accepted.gradient - previous.gradient
        sy, yy = float(np.dot(s, y)), float(np.dot(y, y))
        if sy > 0 and yy > 0:
            return min(sy / yy, cfg.step_max)
    return min(t * cfg.step_growth, cfg.step_max)


def _descend(inst: ProblemInstance, cfg: SolverConfig, phi0: np.ndarray, restart: int) -> _RunOutcome:
    point = evaluate_point(inst, _project(inst, phi0, cfg.floor_eps))
    step = cfg.step_init
    trace: List[TraceEntry] = []
    if cfg.trace:
        trace.append(_trace_entry(inst, point, 0, 0.0))

    iteration = 0
    while iteration < cfg.max_iters:
        if _is_converged(point, cfg):
            break
        accepted, t = _line_search(inst, point, step, cfg)
        if accepted is None:
            logger.warning(
                "Line search stagnated",
                extra={"restart": restart, "iteration": iteration, "residual_inf": point.residual_inf},
            )
            break
        step = _next_step(point, accepted, t, cfg)
        point = accepted
        iteration += 1
        if cfg.trace and iteration % cfg.trace_every == 0:
            trace.append(_trace_entry(inst, point, iteration, t))

    converged = _is_converged(point, cfg)
    if cfg.trace and trace[-1].iteration != iteration:
        trace.append(_trace_entry(inst, point, iteration, step))
    return _RunOutcome(restart=restart, point=point, iterations=iteration, converged=converged, trace=trace)


def _pick_winner(outcomes: List[_RunOutcome]) -> _RunOutcome:
    pool = [o for o in outcomes if o.converged] or outcomes
    best_energy = min(o.point.energy for o in pool)
    # pool keeps restart order, so the first within the tie band is the lowest index
    return next(o for o in pool if o.point.energy <= best_energy + BETA_TIE)


@function_logger("Solve p-th Yamabe instance")
def solve(inst: ProblemInstance, cfg: Optional[SolverConfig] = None, raise_on_failure: bool = False) -> SolveResult:
    """
    Minimize I over the normalized constraint set and return the best restart.

    A result with converged=False is returned when no restart met the residual
    tolerance; pass raise_on_failure=True to get NotConvergedError instead.
    """
    cfg = cfg or SolverConfig()
    if not is_connected(inst.graph):
        raise InstanceValidationError("edges", "graph is not connected")

    rng = np.random.default_rng(cfg.seed)
    outcomes: List[_RunOutcome] = []
    for restart in range(cfg.restarts):
        phi0 = _initial_guess(inst, cfg, restart, rng)
        outcome = _descend(inst, cfg, phi0, restart)
        log_step(
            "restart",
            f"restart {restart} finished",
            {
                "beta": outcome.point.energy,
                "iterations": outcome.iterations,
                "converged": outcome.converged,
                "relative_residual": outcome.relative_residual,
            },
        )
        if not outcome.converged:
            logger.warning(
                "Restart did not converge",
                extra={"restart": restart, "relative_residual": outcome.relative_residual},
            )
        outcomes.append(outcome)

    best = _pick_winner(outcomes)
    restart_betas = [o.point.energy if o.converged else None for o in outcomes]
    agree = all(
        abs(beta - best.point.energy) <= RESTART_AGREEMENT for beta in restart_betas if beta is not None
    )
    if not agree:
        logger.warning("Converged restarts disagree on beta", extra={"restart_betas": restart_betas})

    point = best.point
    result = SolveResult(
        phi=point.phi.tolist(),
        lambda_=point.lambda_,
        beta=point.energy,
        residual_inf=point.residual_inf,
        relative_residual=best.relative_residual,
        iterations=best.iterations,
        converged=best.converged,
        restart_index=best.restart,
        restart_betas=restart_betas,
        restarts_agree=agree,
        trace=best.trace if cfg.trace else None,
    )
    if not result.converged and raise_on_failure:
        raise NotConvergedError(result)
    return result


class SolverAgent(BaseAgent):
    """Async front for `solve` so batches can be awaited together."""

    name = "solver"

    async def run(self, inst: ProblemInstance, cfg: Optional[SolverConfig] = None) -> SolveResult:
        return await asyncio.to_thread(solve, inst, cfg)


_solver_agent: Optional[SolverAgent] = None


def get_solver_agent() -> SolverAgent:
    """Get or create the shared solver agent."""
    global _solver_agent
    if _solver_agent is None:
        _solver_agent = SolverAgent()
    return _solver_agent


def reset_solver_agent():
    """Drop the shared solver agent (tests)."""
    global _solver_agent
    _solver_agent = None
