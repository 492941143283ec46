"""Conservative one-step scheme for the vortex-blob equations.

The update is the implicit midpoint-like discretization

    (x^{k+1} - x^k)/tau = f_tau(x^{k+1}, x^k)

where f_tau replaces the continuous cutoff factor C(r^2)/r^2 by a divided
difference of the pair potential between the two time levels, so the
linear impulses, angular impulse, and Hamiltonian of the system are
preserved exactly (up to solver tolerance) on each step.

The divided-difference factor ``c_tau`` is singular-looking when the two
pair separations agree; a truncated Taylor expansion in (z - 1), with
z the squared-separation ratio, is substituted when |z - 1| is below a
small switch threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PairDegeneracyError, SolverFailureError
from .expint import exp_integral_e1
from .model import BlobSystem, State, _live_mask, _raise_degenerate, cutoff_over_r2, row_blocks

SUPPORTED_ORDERS = (2, 4, 6)


@dataclass(frozen=True)
class CTauParams:
    """Switch parameters for the divided-difference cutoff factor."""

    epsilon_switch: float = 1e-4
    taylor_terms: int = 3

    def __post_init__(self):
        if not 0.0 < self.epsilon_switch < 1.0:
            raise ValueError("epsilon_switch must lie in (0, 1)")
        if self.taylor_terms not in (1, 2, 3):
            raise ValueError("taylor_terms must be 1, 2, or 3")


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-point iteration controls.

    ``tol`` is relative to the position scale max(1, |x|, |y|) of the
    step's starting state; the pure roundoff floor of the iteration sits
    a few hundred eps above zero at unit scale, so tolerances much below
    1e-13 are generally unreachable.
    """

    tol: float = 1e-12
    max_iters: int = 200
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def threshold(self, state):
        """Absolute convergence threshold for a step starting at state."""
        scale = max(1.0, float(np.abs(state.x).max()), float(np.abs(state.y).max()))
        return self.tol * scale


@dataclass(frozen=True)
class StepOutcome:
    """Converged step plus solver diagnostics."""

    next: State
    iterations: int
    residual: float


DEFAULT_CTAU = CTauParams()
DEFAULT_SOLVER = SolverConfig()


def _taylor_coefficients(m, xi):
    """Coefficients of the (z-1) expansion of the divided-difference factor.

    Returns (c0, c1, c2) arrays; the expansion is
    c0 + c1*(z-1)/2 + c2*(z-1)^2/6.
    """
    e = np.exp(-xi)
    if m == 2:
        c0 = 1.0 - e
        c1 = -1.0 + (1.0 + xi) * e
        c2 = 2.0 + (-2.0 - 2.0 * xi - xi**2) * e
    elif m == 4:
        c0 = 1.0 + (-1.0 + xi) * e
        c1 = -1.0 + (1.0 + xi - xi**2) * e
        c2 = 2.0 + (-2.0 - 2.0 * xi - xi**2 + xi**3) * e
    elif m == 6:
        c0 = 1.0 + (-1.0 + 2.0 * xi - 0.5 * xi**2) * e
        c1 = -1.0 + (1.0 + xi - 2.5 * xi**2 + 0.5 * xi**3) * e
        c2 = 2.0 + (-2.0 - 2.0 * xi - xi**2 + 3.0 * xi**3 - 0.5 * xi**4) * e
    else:
        raise ValueError(f"unsupported order m={m}")
    return c0, c1, c2


def c_tau_taylor(m, xi_k, z, params=DEFAULT_CTAU):
    """Truncated Taylor expansion of the divided-difference factor in (z-1)."""
    xi_k = np.asarray(xi_k, dtype=float)
    s = np.asarray(z, dtype=float) - 1.0
    c0, c1, c2 = _taylor_coefficients(m, xi_k)
    out = c0
    if params.taylor_terms >= 2:
        out = out + c1 * s / 2.0
    if params.taylor_terms >= 3:
        out = out + c2 * s**2 / 6.0
    return out


def c_tau_closed(m, xi_k, xi_k1):
    """Closed-form divided-difference factor (log, E1, exponential terms).

    Not protected against the z -> 1 cancellation; see c_tau for the
    branch-switched version.
    """
    xi_k = np.asarray(xi_k, dtype=float)
    xi_k1 = np.asarray(xi_k1, dtype=float)
    z = xi_k1 / xi_k
    base = np.log(np.abs(z)) + exp_integral_e1(xi_k1) - exp_integral_e1(xi_k)
    dxi = xi_k1 - xi_k
    if m == 2:
        num = base
        extra = 0.0
    elif m == 4:
        num = base - np.exp(-xi_k) * (np.exp(-dxi) - 1.0)
        extra = 0.0
    elif m == 6:
        num = base + np.exp(-xi_k) * (np.exp(-dxi) - 1.0) * (-1.5 + 0.5 * xi_k)
        extra = 0.5 * xi_k * np.exp(-xi_k1)
    else:
        raise ValueError(f"unsupported order m={m}")
    return num / (z - 1.0) + extra


def c_tau(m, xi_k, xi_k1, params=DEFAULT_CTAU):
    """Divided-difference cutoff factor between two time levels (vectorized).

    Requires xi = (r/delta)^2 > 0 at both levels.  Uses the closed form
    when |xi_k1/xi_k - 1| exceeds the switch threshold, the truncated
    Taylor expansion otherwise.
    """
    xi_k = np.asarray(xi_k, dtype=float)
    xi_k1 = np.asarray(xi_k1, dtype=float)
    if np.any(xi_k <= 0.0) or np.any(xi_k1 <= 0.0):
        raise PairDegeneracyError(-1, -1, "coincident vortices at one of the time levels")
    scalar = xi_k.ndim == 0 and xi_k1.ndim == 0
    xi_k, xi_k1 = np.atleast_1d(xi_k), np.atleast_1d(xi_k1)
    xi_k, xi_k1 = np.broadcast_arrays(xi_k, xi_k1)
    z = xi_k1 / xi_k
    out = np.empty_like(z)
    near = np.abs(z - 1.0) <= params.epsilon_switch
    if np.any(near):
        out[near] = c_tau_taylor(m, xi_k[near], z[near], params)
    far = ~near
    if np.any(far):
        out[far] = c_tau_closed(m, xi_k[far], xi_k1[far])
    return float(out[0]) if scalar else out


def _pair_factor_blocks(system, prev, cand, params):
    """Yield (rows, bx, by, weight) over row blocks to bound peak memory.

    bx, by are midpoint pair differences; weight = c_tau / r2^k with zeros
    on the diagonal and on coincident zero-strength pairs.
    """
    M = system.size
    d2 = system.delta**2
    for sl in row_blocks(M, M):
        dxk = prev.x[sl, None] - prev.x[None, :]
        dyk = prev.y[sl, None] - prev.y[None, :]
        r2k = dxk * dxk + dyk * dyk
        dx1 = cand.x[sl, None] - cand.x[None, :]
        dy1 = cand.y[sl, None] - cand.y[None, :]
        r21 = dx1 * dx1 + dy1 * dy1
        live = _live_mask(system, sl)
        _raise_degenerate(live, r2k, sl)
        _raise_degenerate(live, r21, sl)
        off = (r2k > 0.0) & (r21 > 0.0)
        rows = np.arange(sl.start, sl.stop)
        off[np.arange(rows.size), rows] = False
        weight = np.zeros_like(r2k)
        weight[off] = c_tau(system.m, r2k[off] / d2, r21[off] / d2, params) / r2k[off]
        yield sl, 0.5 * (dx1 + dxk), 0.5 * (dy1 + dyk), weight


def _pair_factor(system, prev, cand, params):
    """Full (M, M) midpoint differences and weights; verification paths only."""
    M = system.size
    bx = np.empty((M, M))
    by = np.empty((M, M))
    weight = np.empty((M, M))
    for sl, bbx, bby, bw in _pair_factor_blocks(system, prev, cand, params):
        bx[sl], by[sl], weight[sl] = bbx, bby, bw
    return bx, by, weight


def dmm_rhs(system, prev, cand, params=DEFAULT_CTAU):
    """Discrete right-hand side built from midpoint averages and c_tau.

    Reduces to the continuous rhs when cand == prev.
    """
    M = system.size
    xdot = np.empty(M)
    ydot = np.empty(M)
    scale = system.kappa / (2.0 * np.pi)
    for sl, bx, by, weight in _pair_factor_blocks(system, prev, cand, params):
        w = weight * scale[None, :]
        xdot[sl] = -(w * by).sum(axis=1)
        ydot[sl] = (w * bx).sum(axis=1)
    return xdot, ydot


def dmm_residual(system, prev, cand, tau, params=DEFAULT_CTAU):
    """Residual of the conservative update: (cand - prev)/tau - f_tau."""
    if tau == 0.0:
        raise ValueError("tau must be nonzero")
    fx, fy = dmm_rhs(system, prev, cand, params)
    rx = (cand.x - prev.x) / tau - fx
    ry = (cand.y - prev.y) / tau - fy
    return rx, ry


def _rk4_predict(system, state, tau):
    from .integrators import rk4_step

    return rk4_step(system, state, tau)


def dmm_step(system, state, tau, params=DEFAULT_CTAU, solver=DEFAULT_SOLVER):
    """One conservative step by Picard iteration from an RK4 predictor.

    Raises SolverFailureError if the max-norm position update does not
    drop below solver.tol within solver.max_iters iterations.
    """
    guess = _rk4_predict(system, state, tau)
    x, y = guess.x, guess.y
    damping = solver.damping
    threshold = solver.threshold(state)
    residual = np.inf
    for iteration in range(1, solver.max_iters + 1):
        cand = State(x=x, y=y, t=state.t + tau)
        fx, fy = dmm_rhs(system, state, cand, params)
        xn = state.x + tau * fx
        yn = state.y + tau * fy
        residual = max(np.abs(xn - x).max(), np.abs(yn - y).max(), 0.0)
        if damping != 1.0:
            xn = x + damping * (xn - x)
            yn = y + damping * (yn - y)
        x, y = xn, yn
        if residual <= threshold:
            return StepOutcome(next=State(x=x, y=y, t=state.t + tau), iterations=iteration, residual=residual)
    raise SolverFailureError(solver.max_iters, residual, last_state=State(x=x, y=y, t=state.t + tau))


def discrete_multiplier_matrix(system, prev, cand, params=DEFAULT_CTAU):
    """Discrete multiplier: 4 x 2M matrix on a pair of states.

    Assembled only in verification paths.
    """
    M = system.size
    kappa = system.kappa
    bx_i = 0.5 * (cand.x + prev.x)
    by_i = 0.5 * (cand.y + prev.y)
    bx, by, weight = _pair_factor(system, prev, cand, params)
    lam = np.zeros((4, 2 * M))
    lam[0, M:] = kappa
    lam[1, :M] = -kappa
    lam[2, :M] = -kappa * bx_i
    lam[2, M:] = -kappa * by_i
    kk = kappa[:, None] * kappa[None, :]
    lam[3, :M] = -(kk * bx * weight).sum(axis=1) / (2.0 * np.pi)
    lam[3, M:] = -(kk * by * weight).sum(axis=1) / (2.0 * np.pi)
    return lam


def discrete_multiplier_residuals(system, prev, cand, tau, params=DEFAULT_CTAU):
    """Max-norm residuals of the two discrete multiplier identities.

    res1: Lambda_tau (cand - prev)/tau vs the divided difference of the
    conserved quantities; res2: Lambda_tau f_tau.  Both vanish identically
    for arbitrary state pairs, not just scheme solutions.
    """
    from .model import conserved

    lam = discrete_multiplier_matrix(system, prev, cand, params)
    dx = np.concatenate([cand.x - prev.x, cand.y - prev.y]) / tau
    psi_prev = conserved(system, prev).as_array()
    psi_cand = conserved(system, cand).as_array()
    res1 = float(np.abs(lam @ dx - (psi_cand - psi_prev) / tau).max())
    f = np.concatenate(dmm_rhs(system, prev, cand, params))
    res2 = float(np.abs(lam @ f).max())
    return res1, res2
