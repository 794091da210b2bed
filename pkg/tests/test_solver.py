"""
Solver tests.

Covers:
- normalize / descend_step
- solve on instances with known minimizers
- restarts, determinism, trace bound
- SolverAgent
"""

import numpy as np
import pytest

from agents import solver_agent
from agents.oracle_agent import linear_eigen_oracle
from agents.solver_agent import (
    SolverAgent,
    descend_step,
    get_solver_agent,
    normalize,
    sobolev_bound,
    solve,
)
from config import config
from schemas.graph import ProblemInstance, WeightedGraph
from schemas.solver import InitPolicy, SolverConfig
from services.variational import energy, energy_gradient, lower_bound, residual
from tests.conftest import GOLDEN, k2, random_instance
from tools.graph_generators import GraphFamily, WeightPolicy, generate
from utils.errors import DomainError, InstanceValidationError, NotConvergedError

pytestmark = pytest.mark.solver


def _constraint(inst, phi):
    phi = np.asarray(phi)
    return float(np.dot(inst.graph.arrays.mu, inst.f_array * phi ** inst.alpha))


# ========== normalize ==========

def test_normalize_k2(k2_linear):
    np.testing.assert_allclose(normalize(k2_linear, [1.0, 1.0]), [2 ** -0.5, 2 ** -0.5], rtol=1e-15)


def test_normalize_idempotent(rng):
    inst = random_instance(seed=2, n=10, p=2.5, alpha=3.5)
    once = normalize(inst, rng.uniform(0.1, 3.0, size=10))
    np.testing.assert_allclose(normalize(inst, once), once, rtol=1e-14, atol=0)
    assert _constraint(inst, once) == pytest.approx(1.0, rel=1e-14)


def test_normalize_preserves_energy(rng):
    inst = random_instance(seed=3, n=10, p=2.0, alpha=4.0)
    phi = rng.uniform(0.1, 3.0, size=10)
    assert energy(inst, normalize(inst, phi)).energy == pytest.approx(energy(inst, phi).energy, rel=1e-12)


def test_normalize_handles_large_values(k2_linear):
    phi = normalize(k2_linear, [1e200, 2e200])
    assert np.all(np.isfinite(phi))
    assert _constraint(k2_linear, phi) == pytest.approx(1.0, rel=1e-14)


def test_normalize_rejects_zero_and_negative(k2_linear):
    with pytest.raises(DomainError):
        normalize(k2_linear, [0.0, 0.0])
    with pytest.raises(DomainError):
        normalize(k2_linear, [1.0, -1.0])


# ========== descend_step ==========

def test_descend_step_fixed_point(k2_constant_minimizer):
    phi = normalize(k2_constant_minimizer, [1.0, 1.0])
    phi_next, value = descend_step(k2_constant_minimizer, phi, 0.5)
    np.testing.assert_allclose(phi_next, phi, atol=1e-14)
    assert value == pytest.approx(-np.sqrt(2.0), rel=1e-14)


def test_descend_step_small_step_decreases_energy(k2_linear):
    phi = normalize(k2_linear, [1.0, 1.0])
    before = energy(k2_linear, phi).energy
    _, after = descend_step(k2_linear, phi, 1e-2)
    assert after < before


def test_descend_step_projects_onto_floor(k2_linear):
    phi = normalize(k2_linear, [1.0, 1.0])
    g = energy_gradient(k2_linear, phi)
    phi_next, _ = descend_step(k2_linear, phi, 1e6, gradient=g)
    assert phi_next.min() > 0
    assert _constraint(k2_linear, phi_next) == pytest.approx(1.0, rel=1e-14)


# ========== solve ==========

def test_solve_k2_linear_eigenproblem(k2_linear):
    result = solve(k2_linear)
    assert result.converged
    assert result.beta == pytest.approx((1.0 - np.sqrt(5.0)) / 2.0, abs=1e-8)
    assert result.lambda_ == pytest.approx(GOLDEN, abs=1e-8)
    assert result.phi[1] / result.phi[0] == pytest.approx(GOLDEN, abs=1e-7)


def test_solve_k2_constant_minimizer(k2_constant_minimizer):
    result = solve(k2_constant_minimizer)
    assert result.converged
    assert result.beta == pytest.approx(-np.sqrt(2.0), abs=1e-8)
    np.testing.assert_allclose(result.phi, [2 ** -0.25, 2 ** -0.25], rtol=1e-7)
    # constant start already solves it
    assert result.restart_index == 0
    assert result.iterations == 0


def test_solve_postconditions_on_random_instances():
    for seed, (n, p, alpha) in enumerate([(5, 2.0, 2.0), (6, 2.0, 3.0), (7, 3.0, 4.0), (8, 1.5, 2.5)]):
        inst = random_instance(seed=seed, n=n, p=p, alpha=alpha)
        result = solve(inst, SolverConfig(restarts=2, seed=seed))
        assert result.converged, f"seed {seed} did not converge"
        phi = np.asarray(result.phi)
        assert phi.min() > 0
        assert _constraint(inst, phi) == pytest.approx(1.0, rel=1e-12)
        r = residual(inst, phi, result.lambda_)
        rhs = np.abs(result.lambda_ * inst.f_array * phi ** (alpha - 1.0)).max()
        assert np.abs(r).max() <= 1e-9 * (1.0 + rhs) * (1.0 + 1e-6)
        assert result.beta >= lower_bound(inst) - 1e-9
        assert result.lambda_ == pytest.approx(-result.beta, rel=1e-10, abs=1e-14)


def test_solve_star_with_mixed_sign_h():
    """Flat energy near the minimum: acceptance has to switch from energy to the gradient norm."""
    graph = generate(GraphFamily.STAR, 6, weight_policy=WeightPolicy.uniform(0.5, 2.0), seed=1)
    inst = ProblemInstance(graph=graph, h=(1.0, -1.0, 0.5, 0.0, 0.2, -0.3), f=(1.0,) * 6, p=2.0, alpha=2.0)
    result = solve(inst)
    assert result.converged
    assert None not in result.restart_betas
    assert result.relative_residual <= 1e-9
    assert linear_eigen_oracle(inst).compare(result.beta).gap <= 1e-8


def test_solve_sublinear_p_instance():
    inst = random_instance(seed=0, n=6, p=1.5, alpha=2.0)
    result = solve(inst)
    assert result.converged
    assert None not in result.restart_betas
    assert result.relative_residual <= 1e-9


def test_rescaled_solution_still_solves():
    """(cφ, c^{p−α}λ) solves the equation whenever (φ, λ) does."""
    inst = random_instance(seed=7, n=8, p=2.5, alpha=4.0)
    result = solve(inst, SolverConfig(restarts=1))
    assert result.converged
    phi = np.asarray(result.phi)
    for c in (0.5, 3.0):
        lam = c ** (inst.p - inst.alpha) * result.lambda_
        r = residual(inst, c * phi, lam)
        scale = np.abs(lam * inst.f_array * (c * phi) ** (inst.alpha - 1.0)).max()
        assert np.abs(r).max() <= 1e-8 * (1.0 + scale)


def test_converged_minimum_stays_clear_of_floor():
    cfg = SolverConfig(restarts=2)
    for seed, (p, alpha) in enumerate([(1.5, 3.0), (2.0, 4.5), (3.0, 3.0), (4.0, 6.0)]):
        inst = random_instance(seed=seed, n=9, p=p, alpha=alpha, h_range=(-1.0, 0.0))
        result = solve(inst, cfg)
        assert result.converged
        assert min(result.phi) >= 10.0 * cfg.floor_eps


def test_solve_flags_restarts_on_distinct_local_minima(monkeypatch):
    """
    K2 with h ≈ −5, ω = 0.1, α = 4 has two wells: φ_1 ≪ φ_0 (I ≈ 5.10) and
    φ_0 ≪ φ_1 (I ≈ 5.30), separated by I ≈ 7.2 at the constant.
    """
    inst = k2(h=(-5.0, -5.2), p=2.0, alpha=4.0, omega=0.1)
    starts = {0: np.array([0.05, 1.0]), 1: np.array([1.0, 0.05])}
    monkeypatch.setattr(solver_agent, "_initial_guess", lambda inst, cfg, restart, rng: starts[restart])
    result = solve(inst, SolverConfig(restarts=2))
    assert result.converged
    assert None not in result.restart_betas
    assert result.restart_betas[0] > result.restart_betas[1] + 0.1
    assert result.restart_index == 1
    assert result.beta == result.restart_betas[1]
    assert not result.restarts_agree


def test_solve_is_deterministic():
    inst = random_instance(seed=4, n=7, p=2.5, alpha=3.0)
    cfg = SolverConfig(seed=1, restarts=3)
    assert solve(inst, cfg).model_dump() == solve(inst, cfg).model_dump()


def test_solve_restart_diagnostics(k2_linear):
    result = solve(k2_linear, SolverConfig(restarts=4, seed=3))
    assert len(result.restart_betas) == 4
    assert all(b is not None for b in result.restart_betas)
    assert result.restarts_agree
    assert result.beta == pytest.approx(min(result.restart_betas), abs=1e-12)


def test_solve_single_vertex():
    inst = ProblemInstance(
        graph=WeightedGraph(n=1, mu=(2.0,)), h=(3.0,), f=(1.5,), p=2.0, alpha=3.0
    )
    result = solve(inst)
    assert result.converged
    phi = (1.0 / 3.0) ** (1.0 / 3.0)  # μ f φ^α = 1
    assert result.phi[0] == pytest.approx(phi, rel=1e-12)
    assert result.beta == pytest.approx(-2.0 * 3.0 * phi ** 2, rel=1e-12)


def test_solve_not_converged_reports_flag(k2_linear):
    result = solve(k2_linear, SolverConfig(max_iters=1, restarts=1))
    assert not result.converged
    assert result.iterations == 1
    assert result.restart_betas == [None]


def test_solve_raise_on_failure(k2_linear):
    with pytest.raises(NotConvergedError) as exc:
        solve(k2_linear, SolverConfig(max_iters=1, restarts=1), raise_on_failure=True)
    assert exc.value.result.iterations == 1


def test_solve_user_supplied_start(k2_linear):
    cfg = SolverConfig(init_policy=InitPolicy.USER_SUPPLIED, initial_phi=(1.0, GOLDEN), restarts=1)
    result = solve(k2_linear, cfg)
    assert result.converged
    assert result.iterations <= 2


def test_equal_exponents_lambda_ignores_start_scale():
    inst = random_instance(seed=21, n=6, p=3.0, alpha=3.0)
    first = solve(inst, SolverConfig(restarts=1))
    scaled = tuple(5.0 * x for x in first.phi)
    cfg = SolverConfig(init_policy=InitPolicy.USER_SUPPLIED, initial_phi=scaled, restarts=1)
    assert solve(inst, cfg).lambda_ == pytest.approx(first.lambda_, abs=1e-8)


def test_from_config_names_out_of_range_field():
    with pytest.raises(InstanceValidationError) as exc:
        SolverConfig.from_config(config, max_iters=0)
    assert exc.value.field == "max_iters"


def test_user_supplied_start_required():
    with pytest.raises(InstanceValidationError):
        SolverConfig(init_policy=InitPolicy.USER_SUPPLIED)


def test_user_supplied_start_wrong_length(k2_linear):
    cfg = SolverConfig(init_policy=InitPolicy.USER_SUPPLIED, initial_phi=(1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        solve(k2_linear, cfg)


# ========== Trace ==========

def test_trace_energy_is_nonincreasing():
    inst = random_instance(seed=5, n=8, p=3.0, alpha=4.0)
    result = solve(inst, SolverConfig(trace=True, restarts=1))
    energies = [entry.energy for entry in result.trace]
    for before, after in zip(energies, energies[1:]):
        assert after <= before + 1e-12 * (1.0 + abs(before))


def test_trace_respects_sobolev_bound():
    """‖φ_k‖_{W^{1,p}}^p stays below 1 + β₀ + (1 + |h|_M) Vol^{1−p/α} f_m^{−p/α}."""
    for seed in range(3):
        inst = random_instance(seed=seed, n=8, p=2.5, alpha=3.5)
        result = solve(inst, SolverConfig(trace=True, restarts=1))
        bound = sobolev_bound(inst, result.trace[0].energy)
        assert all(entry.sobolev_p <= bound + 1e-6 for entry in result.trace)


def test_trace_disabled_by_default(k2_linear):
    assert solve(k2_linear).trace is None


# ========== SolverAgent ==========

def test_get_solver_agent_is_shared():
    assert get_solver_agent() is get_solver_agent()


async def test_solver_agent_matches_solve(k2_linear):
    agent = SolverAgent()
    result = await agent.run(k2_linear, SolverConfig(seed=2))
    assert result.model_dump() == solve(k2_linear, SolverConfig(seed=2)).model_dump()
