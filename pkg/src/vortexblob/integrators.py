"""Baseline one-step integrators and the trajectory driver.

Explicit methods: classical RK4 (also the predictor for the implicit
schemes), Ralston's minimal-truncation-error 2nd and 4th order methods.
Implicit methods: the implicit midpoint method and the conservative
scheme from :mod:`vortexblob.conservative`, both solved by fixed-point
iteration from an RK4 predictor.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .conservative import DEFAULT_CTAU, DEFAULT_SOLVER, StepOutcome, dmm_step
from .errors import ConfigurationError, SolverFailureError
from .model import State, conserved, rhs

METHODS = ("rk4", "rm2", "rm4", "imm", "dmm")

# Ralston's 4th-order minimum-error tableau: nodes c2 = 2/5,
# c3 = (14 - 3*sqrt(5))/16, c4 = 1; remaining coefficients solve the
# eight order-4 conditions exactly (frozen to double precision here).
_RM4_A21 = 0.4
_RM4_A31 = 0.29697760924775360007
_RM4_A32 = 0.15875964497103583185
_RM4_A41 = 0.21810038822592046760
_RM4_A42 = -3.0509651486929308054
_RM4_A43 = 3.8328647604670103378
_RM4_B = (
    0.17476028226269037125,
    -0.55148066287873294055,
    1.2055355993965235350,
    0.17118478121951903426,
)


def rk4_step(system, state, tau):
    """Classical 4-stage Runge-Kutta step."""
    x, y = state.x, state.y
    k1x, k1y = rhs(system, state)
    k2x, k2y = rhs(system, State(x=x + 0.5 * tau * k1x, y=y + 0.5 * tau * k1y))
    k3x, k3y = rhs(system, State(x=x + 0.5 * tau * k2x, y=y + 0.5 * tau * k2y))
    k4x, k4y = rhs(system, State(x=x + tau * k3x, y=y + tau * k3y))
    nx = x + tau / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    ny = y + tau / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return State(x=nx, y=ny, t=state.t + tau)


def rm2_step(system, state, tau):
    """Ralston's 2nd-order step (stages at 0 and 2/3, weights 1/4 and 3/4)."""
    x, y = state.x, state.y
    k1x, k1y = rhs(system, state)
    k2x, k2y = rhs(system, State(x=x + (2.0 / 3.0) * tau * k1x, y=y + (2.0 / 3.0) * tau * k1y))
    nx = x + tau * (0.25 * k1x + 0.75 * k2x)
    ny = y + tau * (0.25 * k1y + 0.75 * k2y)
    return State(x=nx, y=ny, t=state.t + tau)


def rm4_step(system, state, tau):
    """Ralston's 4th-order minimum-error step."""
    x, y = state.x, state.y
    k1x, k1y = rhs(system, state)
    k2x, k2y = rhs(system, State(x=x + tau * _RM4_A21 * k1x, y=y + tau * _RM4_A21 * k1y))
    k3x, k3y = rhs(
        system,
        State(x=x + tau * (_RM4_A31 * k1x + _RM4_A32 * k2x), y=y + tau * (_RM4_A31 * k1y + _RM4_A32 * k2y)),
    )
    k4x, k4y = rhs(
        system,
        State(
            x=x + tau * (_RM4_A41 * k1x + _RM4_A42 * k2x + _RM4_A43 * k3x),
            y=y + tau * (_RM4_A41 * k1y + _RM4_A42 * k2y + _RM4_A43 * k3y),
        ),
    )
    b1, b2, b3, b4 = _RM4_B
    nx = x + tau * (b1 * k1x + b2 * k2x + b3 * k3x + b4 * k4x)
    ny = y + tau * (b1 * k1y + b2 * k2y + b3 * k3y + b4 * k4y)
    return State(x=nx, y=ny, t=state.t + tau)


def imm_step(system, state, tau, solver=DEFAULT_SOLVER):
    """Implicit midpoint step solved by fixed point from an RK4 predictor.

    Preserves the quadratic invariants (linear and angular impulse) to
    solver tolerance; the Hamiltonian is only approximately conserved.
    """
    guess = rk4_step(system, state, tau)
    x, y = guess.x, guess.y
    threshold = solver.threshold(state)
    residual = np.inf
    for iteration in range(1, solver.max_iters + 1):
        mid = State(x=0.5 * (state.x + x), y=0.5 * (state.y + y))
        fx, fy = rhs(system, mid)
        xn = state.x + tau * fx
        yn = state.y + tau * fy
        residual = max(np.abs(xn - x).max(), np.abs(yn - y).max(), 0.0)
        x, y = xn, yn
        if residual <= threshold:
            return StepOutcome(next=State(x=x, y=y, t=state.t + tau), iterations=iteration, residual=residual)
    raise SolverFailureError(solver.max_iters, residual, last_state=State(x=x, y=y, t=state.t + tau))


@dataclass
class RunRecord:
    """Sampled trajectory, conserved quantities, and solver diagnostics."""

    config: dict
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    conserved: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    wall_time: float = 0.0

    def drift(self):
        """Per-quantity time series of |psi_k - psi_0| (4 x n_samples)."""
        if not self.conserved:
            raise ValueError("record holds no conserved-set samples")
        arr = np.array([c.as_array() for c in self.conserved])
        return np.abs(arr - arr[0]).T

    def max_drift(self):
        return self.drift().max(axis=1)


def integrate(
    system,
    state,
    tau,
    n_steps,
    method,
    solver=DEFAULT_SOLVER,
    ctau_params=DEFAULT_CTAU,
    sample_stride=1,
    keep_states=False,
    observer=None,
):
    """Run n_steps of the chosen method, sampling every sample_stride steps.

    The observer, if given, is called as observer(step_index, state) at
    each sample.  Step errors propagate with the failing step index noted.
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; expected one of {METHODS}")
    if n_steps < 0:
        raise ConfigurationError("n_steps must be >= 0")

    record = RunRecord(
        config={
            "method": method,
            "tau": tau,
            "n_steps": n_steps,
            "m": system.m,
            "h": system.h,
            "delta": system.delta,
            "M": system.size,
            "tol": solver.tol,
            "max_iters": solver.max_iters,
            "sample_stride": sample_stride,
        }
    )

    def sample(k, st, iters):
        record.times.append(st.t)
        record.conserved.append(conserved(system, st))
        if keep_states:
            record.states.append(st)
        if iters is not None:
            record.iterations.append(iters)
        if observer is not None:
            observer(k, st)

    sample(0, state, None)
    start = time.perf_counter()
    for k in range(1, n_steps + 1):
        try:
            if method == "rk4":
                state, iters = rk4_step(system, state, tau), None
            elif method == "rm2":
                state, iters = rm2_step(system, state, tau), None
            elif method == "rm4":
                state, iters = rm4_step(system, state, tau), None
            elif method == "imm":
                out = imm_step(system, state, tau, solver)
                state, iters = out.next, out.iterations
            else:
                out = dmm_step(system, state, tau, ctau_params, solver)
                state, iters = out.next, out.iterations
        except (SolverFailureError,) as exc:
            exc.step_index = k
            raise
        if k % sample_stride == 0 or k == n_steps:
            sample(k, state, iters)
    record.wall_time = time.perf_counter() - start
    return record, state
