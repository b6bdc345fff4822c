"""Trust-region minimizer with a truncated conjugate gradient subproblem solver.

Driven entirely by an instance exposing prepare(Z) -> (cost, grad, hess_vec)
and a tolerance scale, so the same loop serves complete, masked, and synthetic
objectives.  Fully deterministic: identical inputs give bit-identical iterate
sequences (the optional wall-clock cap is the one documented exception; it is
meant as a safety net and is not binding in normal runs).

Termination:
  * converged: ||grad|| <= grad_tol * instance.scale;
  * stalled: 50 consecutive rejected steps (the iterate stopped moving; with
    grad_tol = 0 this is the normal deep-convergence exit at the floating
    point floor), or the wall-clock cap was exceeded;
  * max_iters: iteration budget exhausted.

Accepted steps strictly decrease the cost, so the recorded cost history is
monotone along accepted iterates.
"""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from .errors import InvalidInputError, NumericalFailureError

CONVERGED = "converged"
MAX_ITERS = "max_iters"
STALLED = "stalled"

_STALL_LIMIT = 50


@dataclasses.dataclass(frozen=True)
class SolverOptions:
    grad_tol: float = 1e-12          # relative to the instance scale
    max_iters: int = 10000
    initial_radius: float = 1.0
    max_radius: float = 1e6
    acceptance_threshold: float = 0.1
    tcg_max_inner: int | None = None  # None means the ambient dimension n*k
    tcg_kappa: float = 0.1
    tcg_theta: float = 1.0
    time_limit_s: float | None = None

    def __post_init__(self):
        if self.grad_tol < 0 or self.max_iters < 1 or self.initial_radius <= 0:
            raise InvalidInputError("grad_tol must be >= 0, max_iters >= 1, initial_radius > 0")
        if self.max_radius < self.initial_radius:
            raise InvalidInputError("max_radius must be at least initial_radius")
        if not 0 < self.acceptance_threshold < 0.25:
            raise InvalidInputError("acceptance_threshold must lie in (0, 0.25)")
        if self.tcg_max_inner is not None and self.tcg_max_inner < 1:
            raise InvalidInputError("tcg_max_inner must be a positive integer")


@dataclasses.dataclass
class SolveResult:
    Z: np.ndarray
    cost: float
    grad_norm: float
    iterations: int
    status: str
    cost_history: list
    radius_history: list


def _boundary_step(p, d, radius):
    # positive tau with ||p + tau d|| = radius
    pp = float(np.sum(p * p))
    pd = float(np.sum(p * d))
    dd = float(np.sum(d * d))
    disc = pd * pd + dd * (radius * radius - pp)
    return (-pd + np.sqrt(max(disc, 0.0))) / dd


def _tcg(state, radius, max_inner, kappa, theta):
    """Steihaug-Toint truncated CG on the quadratic model inside the radius.

    Returns (step, hit_boundary, predicted) where predicted is the model
    decrease at the returned step, tracked incrementally so no extra Hessian
    product is needed for the acceptance ratio.  Stops on negative curvature
    or boundary crossing (step extended to the boundary), or once the residual
    drops below ||g|| * min(kappa, ||g||^theta).
    """
    g = state.grad
    g_norm = float(np.linalg.norm(g))
    p = np.zeros_like(g)
    if g_norm == 0.0:
        return p, False, 0.0
    r = g.copy()
    d = -g
    rr = g_norm * g_norm
    stop = g_norm * min(kappa, g_norm**theta)
    model = 0.0  # g^T p + (1/2) p^T H p along the CG path
    for _ in range(max_inner):
        Hd = state.hess_vec(d)
        dHd = float(np.sum(d * Hd))
        if dHd <= 0.0:
            tau = _boundary_step(p, d, radius)
            model += tau * float(np.sum(r * d)) + 0.5 * tau * tau * dHd
            return p + tau * d, True, -model
        alpha = rr / dHd
        p_next = p + alpha * d
        if float(np.linalg.norm(p_next)) >= radius:
            tau = _boundary_step(p, d, radius)
            model += tau * float(np.sum(r * d)) + 0.5 * tau * tau * dHd
            return p + tau * d, True, -model
        p = p_next
        model -= 0.5 * alpha * rr
        r = r + alpha * Hd
        rr_next = float(np.sum(r * r))
        if np.sqrt(rr_next) <= stop:
            return p, False, -model
        d = -r + (rr_next / rr) * d
        rr = rr_next
    return p, False, -model


def minimize(instance, Z0: np.ndarray, options: SolverOptions | None = None) -> SolveResult:
    """Run the trust-region loop from Z0 until convergence, stall, or budget."""
    opts = options or SolverOptions()
    Z = np.array(Z0, dtype=float, copy=True)
    if Z.ndim != 2:
        raise InvalidInputError(f"initial point must be a 2d array, got shape {Z.shape}")
    state = instance.prepare(Z)
    if not np.isfinite(state.cost) or not np.all(np.isfinite(state.grad)):
        raise NumericalFailureError("non-finite cost or gradient at the initial point", last_iterate=Z)

    threshold = opts.grad_tol * float(instance.scale)
    max_inner = opts.tcg_max_inner if opts.tcg_max_inner is not None else Z.size
    radius = opts.initial_radius
    cost_history = [state.cost]
    radius_history = [radius]
    rejects = 0
    status = MAX_ITERS
    iterations = 0
    t0 = time.monotonic()

    grad_norm = float(np.linalg.norm(state.grad))
    if grad_norm <= threshold:
        return SolveResult(Z, state.cost, grad_norm, 0, CONVERGED, cost_history, radius_history)

    for iterations in range(1, opts.max_iters + 1):
        if opts.time_limit_s is not None and time.monotonic() - t0 > opts.time_limit_s:
            status = STALLED
            break

        p, hit_boundary, predicted = _tcg(state, radius, max_inner, opts.tcg_kappa, opts.tcg_theta)

        Z_trial = Z + p
        trial = instance.prepare(Z_trial)
        if not np.isfinite(trial.cost) or not np.all(np.isfinite(trial.grad)):
            raise NumericalFailureError(
                f"non-finite cost or gradient at iteration {iterations}", last_iterate=Z
            )
        actual = state.cost - trial.cost
        rho = actual / predicted if predicted > 0 else -np.inf

        if rho > opts.acceptance_threshold and actual > 0:
            Z = Z_trial
            state = trial
            rejects = 0
        else:
            rejects += 1

        if rho < 0.25:
            radius *= 0.25
        elif rho > 0.75 and hit_boundary:
            radius = min(2.0 * radius, opts.max_radius)

        cost_history.append(state.cost)
        radius_history.append(radius)

        if rejects >= _STALL_LIMIT:
            status = STALLED
            break
        grad_norm = float(np.linalg.norm(state.grad))
        if grad_norm <= threshold:
            status = CONVERGED
            break

    grad_norm = float(np.linalg.norm(state.grad))
    return SolveResult(Z, state.cost, grad_norm, iterations, status, cost_history, radius_history)
