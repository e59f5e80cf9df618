# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
# tests/test_optimizer.py
import math

import pytest
from pydantic import ValidationError

from qaoatransfer.errors import MetricError
from qaoatransfer.graph import LightconeClass, random_regular_graph
from qaoatransfer.maxcut import solve_exact
from qaoatransfer.optimizer import CONVERGENCE_GRADIENT_NORM, OptimaSet, OptimizerConfig, Optimum, best, optimize
from qaoatransfer.seeding import spawn_rngs

SINGLE_EDGE = LightconeClass(1, 1, 0)


def _optima(*energies):
    return OptimaSet("test", OptimizerConfig(), [Optimum(0.1 * k, 0.05 * k, e, True) for k, e in enumerate(energies)])


def test_single_edge_reaches_maximum(model):
    """Default protocol finds the single-edge optimum."""
    result = optimize(SINGLE_EDGE, OptimizerConfig(seed=1), model)
    assert len(result) == 20
    _, energy = best(result)
    assert energy == pytest.approx(1.0, abs=1e-3)


def test_optima_in_canonical_domain(model, k4):
    result = optimize(k4, OptimizerConfig(restarts=8, iterations=30, seed=3), model)
    for o in result.optima:
        assert 0.0 <= o.gamma < 2 * math.pi
        assert 0.0 <= o.beta < math.pi
        assert 0.0 <= o.energy <= k4.num_edges


def test_zero_iterations_returns_initial_point(model):
    """With no steps the optimum is the seeded starting point."""
    cfg = OptimizerConfig(restarts=1, iterations=0, seed=9)
    result = optimize(SINGLE_EDGE, cfg, model)
    rng = spawn_rngs(9, 1)[0]
    gamma0, beta0 = rng.uniform(0.0, 2 * math.pi), rng.uniform(0.0, math.pi)
    assert result.optima[0].gamma == pytest.approx(gamma0)
    assert result.optima[0].beta == pytest.approx(beta0)
    assert result.optima[0].energy == pytest.approx(model.class_energy(SINGLE_EDGE, result.optima[0].params))


def test_ascent_never_loses_energy(model):
    """Each restart ends at least as high as where it started."""
    start = optimize(LightconeClass(3, 3, 0), OptimizerConfig(restarts=6, iterations=0, seed=4), model)
    end = optimize(LightconeClass(3, 3, 0), OptimizerConfig(restarts=6, iterations=50, seed=4), model)
    for a, b in zip(start.optima, end.optima):
        assert b.energy >= a.energy - 1e-12


def test_optimize_is_deterministic(model, triangle):
    cfg = OptimizerConfig(restarts=5, iterations=40, seed=12)
    assert optimize(triangle, cfg, model).to_json() == optimize(triangle, cfg, model).to_json()


def test_workers_do_not_change_results(model, cycle6):
    cfg = OptimizerConfig(restarts=6, iterations=40, seed=2)
    serial = optimize(cycle6, cfg, model, workers=1)
    threaded = optimize(cycle6, cfg, model, workers=4)
    assert serial.to_json() == threaded.to_json()


def test_best_picks_highest_energy():
    assert _optima(0.4, 0.9, 0.7).best_index == 1
    params, energy = best(_optima(0.4, 0.9, 0.7))
    assert energy == 0.9
    assert params.gamma == pytest.approx(0.1)


def test_best_ties_go_to_lowest_index():
    assert _optima(0.5, 0.8, 0.8, 0.2).best_index == 1


def test_best_of_empty_set():
    with pytest.raises(MetricError):
        best(OptimaSet("empty", OptimizerConfig(), []))


def test_optima_set_json(model):
    result = optimize(SINGLE_EDGE, OptimizerConfig(restarts=3, iterations=10), model)
    restored = OptimaSet.from_json(result.to_json())
    assert restored.to_json() == result.to_json()
    assert restored.subject == "(1,1,0)"
    assert restored.config == result.config


@pytest.mark.parametrize("field, value", [
    ("restarts", 0), ("iterations", -1), ("learning_rate", 0.0), ("rms_decay", 1.0), ("unknown", 1),
    ("max_iterations", -1), ("gradient_tolerance", 0.0),
])
def test_config_validation(field, value):
    with pytest.raises(ValidationError):
        OptimizerConfig(**{field: value})


def test_three_regular_lower_bound(model):
    """Triangle-free 3-regular graphs reach at least 0.6924 of the maximum cut."""
    for seed in range(3):
        g = random_regular_graph(16, 3, seed=seed)
        _, energy = best(optimize(g, OptimizerConfig(seed=seed), model))
        assert energy / solve_exact(g).value >= 0.6924


@pytest.mark.parametrize("iterations", [0, 200])
def test_converged_flag_matches_gradient_norm(model, iterations):
    """converged is set exactly when the returned point's gradient norm is within tolerance."""
    subject = LightconeClass(2, 3, 1)
    cfg = OptimizerConfig(restarts=10, iterations=iterations, max_iterations=iterations, seed=6)
    for o in optimize(subject, cfg, model).optima:
        norm = math.hypot(*model.gradient(subject, o.params))
        if abs(norm - CONVERGENCE_GRADIENT_NORM) > 1e-9:
            assert o.converged == (norm <= CONVERGENCE_GRADIENT_NORM)


def test_step_limit():
    assert OptimizerConfig().step_limit == 2000
    assert OptimizerConfig(iterations=50, max_iterations=80).step_limit == 80
    # never below the protocol step count
    assert OptimizerConfig(iterations=50, max_iterations=10).step_limit == 50


def test_extension_only_improves_capped_restarts(model):
    """Stepping past the protocol count keeps each restart's energy and converges more of them."""
    subject = LightconeClass(3, 3, 0)
    capped = optimize(subject, OptimizerConfig(restarts=12, max_iterations=200, seed=5), model)
    extended = optimize(subject, OptimizerConfig(restarts=12, seed=5), model)
    for a, b in zip(capped.optima, extended.optima):
        assert b.energy >= a.energy - 1e-12
        assert b.converged or not a.converged
    assert sum(o.converged for o in extended.optima) >= sum(o.converged for o in capped.optima)


def test_single_edge_restarts_all_converge(model):
    result = optimize(SINGLE_EDGE, OptimizerConfig(seed=1), model)
    assert all(o.converged for o in result.optima)
