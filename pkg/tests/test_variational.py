"""
Energy functional tests: I(φ), λ_φ, gradient, residual, bounds, verification.
"""

import numpy as np
import pytest

from schemas.graph import ProblemInstance, WeightedGraph
from services.variational import (
    energy,
    energy_gradient,
    evaluate_point,
    holder_check,
    lambda_of,
    lower_bound,
    residual,
    residual_scale,
    verify_solution,
)
from tests.conftest import GOLDEN, k2, random_instance
from utils.errors import DomainError

pytestmark = pytest.mark.variational


@pytest.fixture
def h_twice_f():
    """Random graph with h = 2f, so φ ≡ 1, λ = 2 solves the equation."""
    base = random_instance(seed=21, n=8, p=3.0, alpha=4.0)
    return ProblemInstance(graph=base.graph, h=tuple(2.0 * x for x in base.f), f=base.f, p=3.0, alpha=4.0)


# ========== Energy ==========

def test_energy_constant_minimizer_breakdown(k2_constant_minimizer):
    bd = energy(k2_constant_minimizer, [1.0, 1.0])
    assert bd.dirichlet == 0.0
    assert bd.h_term == 2.0
    assert bd.constraint == 2.0
    assert bd.energy == pytest.approx(-np.sqrt(2.0), rel=1e-15)
    assert bd.lambda_ == pytest.approx(1.0, rel=1e-15)


def test_energy_k2_nonconstant():
    inst = k2(h=(0.0, 0.0))
    bd = energy(inst, [1.0, 2.0])
    assert bd.energy == pytest.approx(0.2, rel=1e-15)
    assert bd.lambda_ == pytest.approx(-0.2, rel=1e-15)
    assert bd.numerator == 1.0


def test_energy_scale_invariant(rng):
    inst = random_instance(seed=3, n=10, p=2.5, alpha=3.5)
    for _ in range(10):
        phi = rng.uniform(0.1, 2.0, size=10)
        assert energy(inst, 2.0 * phi).energy == pytest.approx(energy(inst, phi).energy, rel=1e-12)


def test_energy_allows_zero_entries(k2_linear):
    assert energy(k2_linear, [1.0, 0.0]).energy == pytest.approx(0.0, abs=1e-15)


def test_energy_rejects_negative_entry(k2_linear):
    with pytest.raises(DomainError):
        energy(k2_linear, [1.0, -0.5])


def test_energy_rejects_zero_function(k2_linear):
    with pytest.raises(DomainError) as exc:
        energy(k2_linear, [0.0, 0.0])
    assert "φ ≡ 0" in str(exc.value)


def test_energy_bounded_below_by_lower_bound(rng):
    for seed in range(5):
        inst = random_instance(seed=seed, n=9, p=2.0, alpha=3.0)
        c = lower_bound(inst)
        for _ in range(20):
            assert energy(inst, rng.uniform(0.01, 3.0, size=9)).energy >= c - 1e-12


# ========== λ_φ ==========

def test_lambda_constant_with_zero_h():
    inst = k2(h=(0.0, 0.0), p=2.0, alpha=3.0)
    assert lambda_of(inst, [1.0, 1.0]) == 0.0


def test_lambda_k2_nonconstant():
    assert lambda_of(k2(h=(0.0, 0.0)), [1.0, 2.0]) == pytest.approx(-0.2, rel=1e-15)


def test_lambda_homogeneity(rng):
    """λ_{cφ} = c^{p−α} λ_φ."""
    inst = random_instance(seed=4, n=10, p=2.0, alpha=4.0)
    phi = rng.uniform(0.5, 1.5, size=10)
    assert lambda_of(inst, 2.0 * phi) == pytest.approx(0.25 * lambda_of(inst, phi), rel=1e-12)


# ========== Gradient ==========

def test_gradient_zero_at_constant_with_zero_h():
    inst = k2(h=(0.0, 0.0), p=3.0, alpha=3.0)
    assert np.all(energy_gradient(inst, [0.7, 0.7]) == 0.0)


def test_gradient_euler_identity(rng):
    """I has degree 0, so Σ φ_i ∂I/∂φ_i = 0."""
    for seed, (p, alpha) in enumerate([(1.5, 2.0), (2.0, 2.0), (3.0, 4.0), (4.5, 6.0)]):
        inst = random_instance(seed=seed, n=12, p=p, alpha=alpha)
        phi = rng.uniform(0.5, 1.5, size=12)
        grad = energy_gradient(inst, phi)
        assert abs(np.dot(phi, grad)) <= 1e-10 * (1.0 + np.abs(grad).max() * np.abs(phi).sum())


def test_gradient_matches_central_difference():
    inst = random_instance(seed=6, n=6, p=2.5, alpha=3.0)
    phi = np.linspace(0.6, 1.4, 6)
    grad = energy_gradient(inst, phi)
    step = 1e-6
    for i in range(6):
        e = np.zeros(6)
        e[i] = step
        fd = (energy(inst, phi + e).energy - energy(inst, phi - e).energy) / (2 * step)
        assert fd == pytest.approx(grad[i], abs=1e-6)


def test_gradient_zero_entry_allowed_for_p_alpha_at_least_two(k2_linear):
    grad = energy_gradient(k2_linear, [1.0, 0.0])
    assert np.all(np.isfinite(grad))


def test_gradient_zero_entry_rejected_for_small_p():
    inst = k2(h=(1.0, 0.0), p=1.5, alpha=2.0)
    with pytest.raises(DomainError):
        energy_gradient(inst, [1.0, 0.0])


def test_evaluate_point_agrees_with_public_operations(rng):
    inst = random_instance(seed=9, n=7, p=3.0, alpha=3.5)
    phi = rng.uniform(0.5, 1.5, size=7)
    point = evaluate_point(inst, phi)
    assert point.energy == energy(inst, phi).energy
    np.testing.assert_array_equal(point.gradient, energy_gradient(inst, phi))
    np.testing.assert_array_equal(point.residual, residual(inst, phi, point.lambda_))
    assert point.rhs_scale == residual_scale(inst, phi, point.lambda_)


# ========== Residual ==========

def test_residual_constant_solution(h_twice_f):
    res = residual(h_twice_f, np.ones(h_twice_f.n), 2.0)
    np.testing.assert_allclose(res, 0.0, atol=1e-14)


def test_residual_k2_eigenpair(k2_linear):
    res = residual(k2_linear, [1.0, GOLDEN], GOLDEN)
    assert np.abs(res).max() <= 1e-12


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_residual_homogeneity(rng, c):
    """R(cφ, c^{p−α}λ) = c^{p−1} R(φ, λ)."""
    for seed, (p, alpha) in enumerate([(1.5, 2.5), (2.0, 2.0), (3.0, 4.5)]):
        inst = random_instance(seed=seed, n=10, p=p, alpha=alpha)
        phi = rng.uniform(0.3, 1.7, size=10)
        lam = float(rng.normal())
        np.testing.assert_allclose(
            residual(inst, c * phi, c ** (p - alpha) * lam),
            c ** (p - 1.0) * residual(inst, phi, lam),
            rtol=1e-11,
            atol=1e-11 * c ** (p - 1.0),
        )


def test_residual_requires_positive_phi(k2_linear):
    with pytest.raises(DomainError):
        residual(k2_linear, [1.0, 0.0], 1.0)


# ========== Bounds ==========

def test_lower_bound_zero_when_h_nonpositive(rng):
    inst = k2(h=(-1.0, -1.0), p=2.0, alpha=3.0)
    assert lower_bound(inst) == 0.0
    for _ in range(20):
        assert energy(inst, rng.uniform(0.01, 2.0, size=2)).energy >= 0.0


def test_lower_bound_attained_by_constant(k2_constant_minimizer):
    c = lower_bound(k2_constant_minimizer)
    assert c == pytest.approx(-np.sqrt(2.0), rel=1e-15)
    assert energy(k2_constant_minimizer, [1.0, 1.0]).energy == pytest.approx(c, rel=1e-15)


def test_lower_bound_measure_scaling():
    inst = random_instance(seed=12, n=6, p=2.0, alpha=5.0)
    c = 3.0
    graph = WeightedGraph(n=6, mu=tuple(c * m for m in inst.graph.mu), edges=inst.graph.edges)
    scaled = ProblemInstance(graph=graph, h=inst.h, f=inst.f, p=2.0, alpha=5.0)
    assert lower_bound(scaled) == pytest.approx(c ** (1.0 - 2.0 / 5.0) * lower_bound(inst), rel=1e-13)


def test_lower_bound_holds_with_nonconstant_f():
    """h ≡ 1, f = (1, 4): I reaches −1 at φ = (1, 1/√2), below the bound built from max f."""
    inst = k2(h=(1.0, 1.0), f=(1.0, 4.0), p=2.0, alpha=4.0)
    c = lower_bound(inst)
    assert c == pytest.approx(-np.sqrt(2.0), rel=1e-15)
    assert energy(inst, [1.0, 1.0 / np.sqrt(2.0)]).energy == pytest.approx(-1.0, rel=1e-14)
    for t in np.linspace(0.01, 3.0, 300):
        assert energy(inst, [1.0, t]).energy >= c


def test_holder_constant_is_tight(p3_graph):
    lhs, rhs = holder_check(p3_graph, [1.5, 1.5, 1.5], 2.0, 5.0)
    assert lhs == pytest.approx(rhs, rel=1e-14)


def test_holder_equal_exponents(rng, p3_graph):
    lhs, rhs = holder_check(p3_graph, rng.uniform(0.1, 2.0, size=3), 3.0, 3.0)
    assert lhs == pytest.approx(rhs, rel=1e-15)


def test_holder_random(rng):
    inst = random_instance(seed=1, n=10, p=2.0, alpha=5.0)
    for _ in range(20):
        lhs, rhs = holder_check(inst.graph, rng.uniform(0.0, 3.0, size=10), 2.0, 5.0)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_holder_rejects_alpha_below_p(p3_graph):
    with pytest.raises(DomainError):
        holder_check(p3_graph, [1.0, 1.0, 1.0], 3.0, 2.0)


# ========== Verification ==========

def test_verify_constant_solution_passes(h_twice_f):
    report = verify_solution(h_twice_f, np.ones(h_twice_f.n), 2.0, tol=1e-12)
    assert report.passed
    assert report.positive
    assert report.lambda_phi == pytest.approx(2.0, rel=1e-12)


def test_verify_reports_negated_entry(k2_linear):
    report = verify_solution(k2_linear, [1.0, -GOLDEN], GOLDEN)
    assert not report.passed
    assert not report.positive
    assert report.nonpositive_indices == [1]
    assert report.lambda_phi is None


def test_verify_rejects_wrong_lambda(k2_linear):
    report = verify_solution(k2_linear, [1.0, GOLDEN], 0.5)
    assert report.positive
    assert not report.passed
    assert report.relative_residual > report.tol
