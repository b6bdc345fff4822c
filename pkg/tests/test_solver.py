"""Trust-region solver tests.

The quadratic instance has a closed-form minimizer (linear solve), the
independent oracle for the optimization loop; localization instances then
exercise the quartic path.
"""

import numpy as np
import pytest

from snl.errors import NumericalFailureError
from snl.objective import CompleteInstance, Prepared
from snl.trust_region import CONVERGED, MAX_ITERS, STALLED, SolverOptions, minimize


class QuadraticInstance:
    """f(z) = 1/2 z^T H z - b^T z on column vectors, H symmetric positive definite."""

    def __init__(self, H, b):
        self.H = H
        self.b = b
        self.scale = 1.0

    def prepare(self, Z):
        z = Z[:, 0]
        g = self.H @ z - self.b
        cost = 0.5 * float(z @ self.H @ z) - float(self.b @ z)
        return Prepared(cost, g[:, None], lambda dZ: (self.H @ dZ[:, 0])[:, None])


class ExplodingInstance:
    """Finite at the origin, non-finite everywhere else."""

    scale = 1.0

    def prepare(self, Z):
        if np.linalg.norm(Z) == 0.0:
            return Prepared(1.0, np.ones_like(Z), lambda dZ: dZ)
        return Prepared(np.nan, np.full_like(Z, np.nan), lambda dZ: dZ)


def test_quadratic_reaches_linear_solve_solution():
    rng = np.random.default_rng(0)
    n = 12
    M = rng.standard_normal((n, n))
    H = M @ M.T + n * np.eye(n)
    b = rng.standard_normal(n)
    expected = np.linalg.solve(H, b)
    res = minimize(QuadraticInstance(H, b), np.zeros((n, 1)))
    assert res.status == CONVERGED
    assert np.linalg.norm(res.Z[:, 0] - expected) <= 1e-8


def test_already_optimal_converges_at_iteration_zero():
    rng = np.random.default_rng(1)
    Y = rng.standard_normal((6, 2))
    inst = CompleteInstance(Y, 2)
    res = minimize(inst, Y)
    assert res.status == CONVERGED
    assert res.iterations == 0
    assert res.cost == 0.0


def test_small_complete_instance_reaches_global_optimum():
    rng = np.random.default_rng(7)
    Y = rng.standard_normal((10, 2))
    inst = CompleteInstance(Y, 3)
    Z0 = rng.standard_normal((10, 3))
    res = minimize(inst, Z0)
    assert res.cost <= 1e-10
    assert res.status == CONVERGED


def test_deterministic_reruns_bit_identical():
    rng = np.random.default_rng(2)
    Y = rng.standard_normal((8, 2))
    Z0 = rng.standard_normal((8, 3))
    first = minimize(CompleteInstance(Y, 3), Z0)
    second = minimize(CompleteInstance(Y, 3), Z0)
    assert first.iterations == second.iterations
    assert first.cost == second.cost
    assert first.status == second.status
    assert np.array_equal(first.Z, second.Z)
    assert first.cost_history == second.cost_history
    assert first.radius_history == second.radius_history


def test_cost_history_monotone():
    rng = np.random.default_rng(3)
    Y = rng.standard_normal((9, 2))
    res = minimize(CompleteInstance(Y, 3), rng.standard_normal((9, 3)))
    diffs = np.diff(res.cost_history)
    assert np.all(diffs <= 0.0)


def test_full_relaxation_always_global():
    # k >= n-1 leaves no spurious basins on noiseless complete instances
    rng = np.random.default_rng(4)
    for trial in range(10):
        n = int(rng.integers(4, 9))
        Y = rng.standard_normal((n, 2))
        inst = CompleteInstance(Y, n - 1)
        res = minimize(inst, rng.standard_normal((n, n - 1)))
        assert res.cost <= 1e-10 * inst.scale


def test_deep_mode_runs_to_floating_point_floor():
    rng = np.random.default_rng(5)
    Y = rng.standard_normal((8, 2))
    inst = CompleteInstance(Y, 3)
    res = minimize(inst, rng.standard_normal((8, 3)), SolverOptions(grad_tol=0.0))
    assert res.status in (STALLED, CONVERGED)
    assert res.cost <= 1e-18


def test_max_iters_status():
    rng = np.random.default_rng(6)
    Y = rng.standard_normal((8, 2))
    res = minimize(CompleteInstance(Y, 2), rng.standard_normal((8, 2)), SolverOptions(max_iters=2))
    assert res.status == MAX_ITERS
    assert res.iterations == 2


def test_numerical_failure_carries_last_iterate():
    with pytest.raises(NumericalFailureError) as info:
        minimize(ExplodingInstance(), np.zeros((3, 1)))
    assert info.value.last_iterate is not None
    assert np.array_equal(info.value.last_iterate, np.zeros((3, 1)))


def test_gradient_threshold_respected_at_convergence():
    rng = np.random.default_rng(8)
    Y = rng.standard_normal((9, 2))
    inst = CompleteInstance(Y, 3)
    opts = SolverOptions(grad_tol=1e-12)
    res = minimize(inst, rng.standard_normal((9, 3)), opts)
    assert res.status == CONVERGED
    assert res.grad_norm <= opts.grad_tol * inst.scale
