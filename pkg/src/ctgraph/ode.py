"""Fixed-step ODE integration, stochastic simulation, and exact solver gradients.

The integrators evaluate a vector field ``f`` at the requested observation
times exactly: between two consecutive requested times ``a < b`` the solver
takes ``ceil((b - a) / step_size)`` equal internal substeps, so no
interpolation is ever performed.  ``ode_solve_with_grad`` records every
internal stage and replays it in reverse, producing the exact gradient of the
discrete solver output (discretize-then-optimize) rather than a continuous
adjoint approximation.

Vector fields are callables mapping a state batch ``(B, d)`` to drift values
``(B, d)``.  Differentiable fields additionally expose ``n_params`` and
``vjp(x, cotangent) -> (state_cotangent, flat_parameter_cotangent)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NonFiniteError, TimeOrderError

_METHODS = ("rk4", "euler")


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step solver settings.

    ``step_size`` is an upper bound on the internal step; each requested
    interval is subdivided into equal steps no larger than it.
    """

    method: str = "rk4"
    step_size: float = 0.02
    max_internal_steps: int = 1_000_000

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {_METHODS}")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.max_internal_steps < 1:
            raise ValueError("max_internal_steps must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Solution samples: ``states[i]`` is the state at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "states", np.asarray(self.states, dtype=float))
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        _check_times(self.times)
        if not np.isfinite(self.states).all():
            raise NonFiniteError("trajectory contains non-finite states")

    @property
    def dim(self) -> int:
        return self.states.shape[1]


def _check_times(times: np.ndarray) -> None:
    if times.size == 0:
        raise TimeOrderError("empty time sequence")
    if times.size > 1 and not (np.diff(times) > 0).all():
        raise TimeOrderError("times must be strictly increasing")


def rk4_step(f, x: np.ndarray, h) -> np.ndarray:
    """One classical Runge-Kutta step of size ``h`` (scalar or per-row column)."""
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _eval_record(f, x):
    """Evaluate the field, capturing layer activations when it offers them."""
    fwd = getattr(f, "forward_with_activations", None)
    if fwd is None:
        return f(x), None
    return fwd(x)


def _vjp(f, x, cot, acts):
    if acts is None:
        return f.vjp(x, cot)
    return f.vjp(x, cot, acts)


def rk4_step_record(f, x: np.ndarray, h):
    """Like :func:`rk4_step` but also returns the recorded stage inputs.

    Each stage record pairs the stage input with the field's cached layer
    activations so the backward sweep can skip the forward recomputation.
    """
    k1, a1 = _eval_record(f, x)
    x2 = x + 0.5 * h * k1
    k2, a2 = _eval_record(f, x2)
    x3 = x + 0.5 * h * k2
    k3, a3 = _eval_record(f, x3)
    x4 = x + h * k3
    k4, a4 = _eval_record(f, x4)
    x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x_next, ((x, a1), (x2, a2), (x3, a3), (x4, a4))


def rk4_step_backward(f, stages, h, cot):
    """Reverse one recorded RK4 step.

    Given the cotangent ``cot`` of the step output, returns the cotangent of
    the step input and the flat parameter cotangent accumulated over the four
    stages.  Each stage is differentiated exactly via the field's ``vjp``.
    """
    (x1, a1), (x2, a2), (x3, a3), (x4, a4) = stages
    u4, p4 = _vjp(f, x4, (h / 6.0) * cot, a4)
    u3, p3 = _vjp(f, x3, (h / 3.0) * cot + h * u4, a3)
    u2, p2 = _vjp(f, x2, (h / 3.0) * cot + 0.5 * h * u3, a2)
    u1, p1 = _vjp(f, x1, (h / 6.0) * cot + 0.5 * h * u2, a1)
    return cot + u1 + u2 + u3 + u4, p1 + p2 + p3 + p4


def euler_step(f, x: np.ndarray, h) -> np.ndarray:
    return x + h * f(x)


def euler_step_record(f, x: np.ndarray, h):
    k, a = _eval_record(f, x)
    return x + h * k, (x, a)


def euler_step_backward(f, record, h, cot):
    x, a = record
    u, p = _vjp(f, x, h * cot, a)
    return cot + u, p


def _substep_count(delta: float, cfg: SolverConfig) -> int:
    n = max(1, math.ceil(delta / cfg.step_size - 1e-12))
    if n > cfg.max_internal_steps:
        raise ValueError(
            f"interval of length {delta} needs {n} substeps, above "
            f"max_internal_steps={cfg.max_internal_steps}"
        )
    return n


def ode_solve(f, x0: np.ndarray, times, cfg: SolverConfig, t0: float | None = None) -> Trajectory:
    """Integrate ``dx/dt = f(x)`` from ``x0`` and sample at ``times``.

    ``t0`` is the time attached to ``x0`` and defaults to ``times[0]``.  When
    ``times[0] == t0`` the first output state is ``x0`` itself (bitwise).

    Raises:
        TimeOrderError: times not strictly increasing or before ``t0``.
        NonFiniteError: the state left the finite range during integration.
    """
    times = np.asarray(times, dtype=float)
    _check_times(times)
    x0 = np.asarray(x0, dtype=float)
    if not np.isfinite(x0).all():
        raise NonFiniteError("initial state is not finite")
    if t0 is None:
        t0 = float(times[0])
    if times[0] < t0:
        raise TimeOrderError("first requested time precedes the initial time")

    step = rk4_step if cfg.method == "rk4" else euler_step
    x = x0[None, :]

    out = np.empty((len(times), x0.size), dtype=float)
    t_prev = t0
    for i, t in enumerate(times):
        delta = float(t) - t_prev
        if delta > 0:
            n = _substep_count(delta, cfg)
            h = delta / n
            for _ in range(n):
                x = step(f, x, h)
            if not np.isfinite(x).all():
                raise NonFiniteError(f"state became non-finite approaching t={t}")
        out[i] = x[0]
        t_prev = float(t)

    return Trajectory(times=times.copy(), states=out)


def ode_solve_with_grad(
    f,
    x0: np.ndarray,
    times,
    cfg: SolverConfig,
    cotangents,
    t0: float | None = None,
):
    """Integrate and return the exact parameter gradient of a trajectory loss.

    Computes ``grad_theta sum_i <cotangents[i], x_hat(times[i])>`` by reverse
    traversal of the recorded solver steps.  One cotangent (a ``d``-vector) is
    required per requested time point.

    Returns:
        (Trajectory, flat gradient vector of length ``f.n_params``).
    """
    times = np.asarray(times, dtype=float)
    _check_times(times)
    cotangents = np.asarray(cotangents, dtype=float)
    if cotangents.shape != (len(times), len(np.atleast_1d(x0))):
        raise ValueError("need one cotangent vector per requested time point")
    x0 = np.asarray(x0, dtype=float)
    if not np.isfinite(x0).all():
        raise NonFiniteError("initial state is not finite")
    if t0 is None:
        t0 = float(times[0])
    if times[0] < t0:
        raise TimeOrderError("first requested time precedes the initial time")

    rk4 = cfg.method == "rk4"
    x = x0[None, :]
    # One record per internal substep; intervals[i] is the list of records
    # that advance the state from output point i-1 (or t0) to point i.
    intervals: list[list] = []
    out = np.empty((len(times), x0.size), dtype=float)
    t_prev = t0
    for i, t in enumerate(times):
        delta = float(t) - t_prev
        records = []
        if delta > 0:
            n = _substep_count(delta, cfg)
            h = delta / n
            for _ in range(n):
                if rk4:
                    x, stages = rk4_step_record(f, x, h)
                else:
                    x, stages = euler_step_record(f, x, h)
                records.append((stages, h))
            if not np.isfinite(x).all():
                raise NonFiniteError(f"state became non-finite approaching t={t}")
        intervals.append(records)
        out[i] = x[0]
        t_prev = float(t)

    grad = np.zeros(f.n_params)
    adj = np.zeros((1, x0.size))
    for i in range(len(times) - 1, -1, -1):
        adj = adj + cotangents[i][None, :]
        for stages, h in reversed(intervals[i]):
            if rk4:
                adj, p = rk4_step_backward(f, stages, h, adj)
            else:
                adj, p = euler_step_backward(f, stages, h, adj)
            grad += p

    return Trajectory(times=times.copy(), states=out), grad


def euler_maruyama(drift, sigma: float, x0: np.ndarray, t_grid, seed: int) -> Trajectory:
    """Simulate ``dx = f(x) dt + sigma dW`` on a uniform grid.

    Update rule: ``x[k+1] = x[k] + f(x[k]) h + sigma sqrt(h) z[k]`` with
    ``z[k]`` i.i.d. standard normal per coordinate drawn from a generator
    seeded with ``seed``; the result is a pure function of its arguments.
    With ``sigma == 0`` the path equals a fixed-step Euler ODE solve on the
    same grid.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    _check_times(t_grid)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    d = x0.size
    rng = np.random.default_rng(seed)

    states = np.empty((len(t_grid), d), dtype=float)
    states[0] = x0
    x = x0[None, :]
    hs = np.diff(t_grid)
    for k, h in enumerate(hs):
        x = x + h * drift(x)
        if sigma > 0:
            x = x + sigma * math.sqrt(h) * rng.standard_normal(d)
        if not np.isfinite(x).all():
            raise NonFiniteError(f"simulation blew up at t={t_grid[k + 1]}")
        states[k + 1] = x[0]
    return Trajectory(times=t_grid.copy(), states=states)
