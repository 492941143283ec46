"""Blob kernels, dynamics, conserved quantities, and grid setup."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexblob.errors import ConfigurationError, PairDegeneracyError
from vortexblob.model import (
    SMALL_XI,
    BlobSystem,
    State,
    blob_vorticity,
    conserved,
    cutoff,
    cutoff_over_r2,
    init_grid,
    initial_vorticity,
    multiplier_matrix,
    p_polynomial,
    pair_potential,
    q_polynomial,
    rhs,
    velocity_field,
)


def random_system(rng, n, m=2, delta=1.0):
    return (
        BlobSystem(m=m, h=1.0, delta=delta, kappa=rng.uniform(-1.0, 1.0, n)),
        State(x=rng.uniform(-1.0, 1.0, n), y=rng.uniform(-1.0, 1.0, n)),
    )


class TestKernels:
    def test_q_polynomial_values(self):
        # Q(0) = 1 for every order; spot values at r = 1 and r = 2
        for m in (2, 4, 6):
            assert q_polynomial(m, 0.0) == 1.0
        assert q_polynomial(2, 1.0) == 1.0
        assert q_polynomial(4, 1.0) == 0.0
        assert q_polynomial(6, 1.0) == -0.5
        assert q_polynomial(6, 2.0) == -1.0

    def test_p_polynomial_values(self):
        assert p_polynomial(2, 0.7) == pytest.approx(1.0 / np.pi)
        assert p_polynomial(4, 1.0) == pytest.approx(1.0 / np.pi)
        assert p_polynomial(6, 1.0) == pytest.approx(0.5 / np.pi)

    def test_vorticity_shape_normalized(self):
        # each blob carries unit circulation: 2 pi int_0^inf P(s) e^-s ds/2 = 1
        s = np.linspace(0.0, 60.0, 400001)
        for m in (2, 4, 6):
            integrand = p_polynomial(m, s) * np.exp(-s)
            total = np.pi * np.trapezoid(integrand, s)
            assert total == pytest.approx(1.0, abs=5e-8)

    def test_cutoff_limits(self):
        for m in (2, 4, 6):
            assert cutoff(m, 0.0, 1.0) == 0.0
            assert cutoff(m, 1e4, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert cutoff(2, 1.0, 1.0) == pytest.approx(1.0 - np.exp(-1.0))
        assert cutoff(4, 1.0, 1.0) == pytest.approx(1.0)

    def test_cutoff_over_r2_matches_direct_form(self):
        r2 = np.array([SMALL_XI * 1.5, 0.1, 1.0, 9.0])
        for m in (2, 4, 6):
            direct = cutoff(m, r2, 1.3) / r2
            assert cutoff_over_r2(m, r2, 1.3) == pytest.approx(direct, rel=1e-14)

    def test_cutoff_over_r2_series_branch_matches_direct(self):
        # just below the switch point the series value must agree with the
        # (still well-conditioned) direct ratio at the same argument
        for m in (2, 4, 6):
            for delta in (0.5, 1.0, 2.0):
                r2 = 0.999 * SMALL_XI * delta**2
                series_value = cutoff_over_r2(m, r2, delta)
                direct = cutoff(m, r2, delta) / r2
                assert series_value == pytest.approx(direct, rel=1e-10)

    def test_cutoff_over_r2_finite_at_zero(self):
        # C(r2)/r2 -> -a_1/delta^2 where a_1 is the linear Taylor
        # coefficient of Q(xi) e^(-xi): 1, 2, 3 for m = 2, 4, 6.
        for m, limit in ((2, 1.0), (4, 2.0), (6, 3.0)):
            assert cutoff_over_r2(m, 0.0, 1.0) == pytest.approx(limit)
            assert cutoff_over_r2(m, 0.0, 2.0) == pytest.approx(limit / 4.0)

    def test_unsupported_order_rejected(self):
        with pytest.raises(ConfigurationError):
            cutoff(3, 1.0, 1.0)
        with pytest.raises(ConfigurationError):
            q_polynomial(8, 1.0)


class TestDynamics:
    def test_single_vortex_is_stationary(self):
        system = BlobSystem(m=4, h=1.0, delta=1.0, kappa=np.array([2.0]))
        state = State(x=np.array([0.3]), y=np.array([-0.7]))
        fx, fy = rhs(system, state)
        assert fx[0] == 0.0 and fy[0] == 0.0

    def test_pair_orbits_perpendicular_to_separation(self):
        system = BlobSystem(m=2, h=1.0, delta=1.0, kappa=np.array([1.0, 1.0]))
        state = State(x=np.array([-0.5, 0.5]), y=np.array([0.0, 0.0]))
        fx, fy = rhs(system, state)
        # equal strengths on the x-axis: velocities are purely vertical,
        # opposite, and equal in magnitude
        assert fx == pytest.approx([0.0, 0.0])
        assert fy[0] == pytest.approx(-fy[1])
        assert fy[1] > 0.0

    def test_velocity_field_consistent_with_rhs(self):
        rng = np.random.default_rng(7)
        system, state = random_system(rng, 6, m=4)
        fx, fy = rhs(system, state)
        # evaluating the induced field at vortex i, excluding i's own
        # (vanishing) self-term, reproduces the ODE right-hand side
        for i in range(6):
            others = np.ones(6, dtype=bool)
            others[i] = False
            sub = BlobSystem(m=4, h=1.0, delta=system.delta, kappa=system.kappa[others])
            sub_state = State(x=state.x[others], y=state.y[others])
            vel = velocity_field(sub, sub_state, np.array([state.x[i], state.y[i]]))
            assert vel[0] == pytest.approx(fx[i], abs=1e-15)
            assert vel[1] == pytest.approx(fy[i], abs=1e-15)

    def test_coincident_strength_pair_raises(self):
        system = BlobSystem(m=2, h=1.0, delta=1.0, kappa=np.array([1.0, 1.0]))
        state = State(x=np.array([0.1, 0.1]), y=np.array([0.2, 0.2]))
        with pytest.raises(PairDegeneracyError) as exc:
            rhs(system, state)
        assert {exc.value.i, exc.value.j} == {0, 1}

    def test_coincident_zero_strength_pair_allowed(self):
        system = BlobSystem(m=2, h=1.0, delta=1.0, kappa=np.array([1.0, 0.0]))
        state = State(x=np.array([0.1, 0.1]), y=np.array([0.2, 0.2]))
        fx, fy = rhs(system, state)
        assert np.all(np.isfinite(fx)) and np.all(np.isfinite(fy))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=2, max_value=8), st.sampled_from([2, 4, 6]),
           st.integers(min_value=0, max_value=2**31 - 1))
    def test_multiplier_annihilates_rhs(self, n, m, seed):
        rng = np.random.default_rng(seed)
        system, state = random_system(rng, n, m=m)
        lam = multiplier_matrix(system, state)
        f = np.concatenate(rhs(system, state))
        scale = max(1.0, np.abs(f).max())
        assert np.abs(lam @ f).max() <= 1e-13 * scale

    def test_rhs_is_hamiltonian_gradient(self):
        # kappa_i xdot_i = dH/dy_i and kappa_i ydot_i = -dH/dx_i
        rng = np.random.default_rng(3)
        system, state = random_system(rng, 5, m=6)
        fx, fy = rhs(system, state)
        eps = 1e-6
        for i in range(5):
            for axis in ("x", "y"):
                xs, ys = state.x.copy(), state.y.copy()
                if axis == "x":
                    xs[i] += eps
                    plus = conserved(system, State(x=xs, y=ys)).ham
                    xs[i] -= 2 * eps
                    minus = conserved(system, State(x=xs, y=ys)).ham
                    grad = (plus - minus) / (2 * eps)
                    assert grad == pytest.approx(-system.kappa[i] * fy[i], abs=2e-9)
                else:
                    ys[i] += eps
                    plus = conserved(system, State(x=xs, y=ys)).ham
                    ys[i] -= 2 * eps
                    minus = conserved(system, State(x=xs, y=ys)).ham
                    grad = (plus - minus) / (2 * eps)
                    assert grad == pytest.approx(system.kappa[i] * fx[i], abs=2e-9)


class TestConserved:
    def test_two_vortex_closed_form(self):
        kappa = np.array([1.5, -0.5])
        x = np.array([0.0, 1.0])
        y = np.array([2.0, 0.0])
        system = BlobSystem(m=2, h=1.0, delta=1.0, kappa=kappa)
        c = conserved(system, State(x=x, y=y))
        assert c.gamma == pytest.approx(1.0)
        assert c.px == pytest.approx((kappa * y).sum())
        assert c.py == pytest.approx(-(kappa * x).sum())
        assert c.ell == pytest.approx(-0.5 * (kappa * (x**2 + y**2)).sum())
        r2 = 5.0
        expected_h = -(kappa[0] * kappa[1]) * pair_potential(2, r2, 1.0) / (4 * np.pi)
        assert c.ham == pytest.approx(float(expected_h))

    def test_conserved_blocked_matches_small_direct(self):
        # block-accumulated Hamiltonian must equal a plain double loop
        rng = np.random.default_rng(11)
        system, state = random_system(rng, 12, m=4, delta=0.8)
        direct = 0.0
        for i in range(12):
            for j in range(i + 1, 12):
                r2 = (state.x[i] - state.x[j]) ** 2 + (state.y[i] - state.y[j]) ** 2
                direct -= system.kappa[i] * system.kappa[j] * float(
                    pair_potential(4, r2, 0.8)
                ) / (4 * np.pi)
        assert conserved(system, state).ham == pytest.approx(direct, rel=1e-14)

    def test_pair_potential_order_terms(self):
        xi = 0.9
        base = pair_potential(2, xi, 1.0)
        assert pair_potential(4, xi, 1.0) == pytest.approx(base - np.exp(-xi))
        assert pair_potential(6, xi, 1.0) == pytest.approx(
            base + (-1.5 + 0.5 * xi) * np.exp(-xi)
        )


class TestGrid:
    def test_grid_geometry(self):
        system, state = init_grid(4)
        assert system.size == 16
        assert system.h == pytest.approx(0.5)
        assert system.delta == pytest.approx(0.5**0.75)
        assert state.x.min() == pytest.approx(-0.75)
        assert state.x.max() == pytest.approx(0.75)

    def test_circulation_converges_to_quarter_pi(self):
        # sum kappa_i -> integral of (1-r^2)^3 over the unit disk = pi/4
        errs = []
        for cells in (20, 40, 80):
            system, _ = init_grid(cells, p=3)
            errs.append(abs(system.kappa.sum() - np.pi / 4))
        assert errs[0] > errs[1] > errs[2]
        assert errs[-1] < 2e-8

    def test_prune_drops_only_zero_strengths(self):
        full_sys, full_state = init_grid(10, prune_zero=False)
        pruned_sys, pruned_state = init_grid(10, prune_zero=True)
        assert pruned_sys.size == int((full_sys.kappa != 0).sum())
        assert pruned_sys.kappa.sum() == pytest.approx(full_sys.kappa.sum())
        fx_full, fy_full = rhs(full_sys, full_state)
        fx_pru, _ = rhs(pruned_sys, pruned_state)
        keep = full_sys.kappa != 0
        assert fx_full[keep] == pytest.approx(fx_pru, abs=1e-15)

    def test_initial_vorticity_support(self):
        r = np.array([0.0, 0.5, 1.0, 1.5])
        w = initial_vorticity(r, p=3)
        assert w[0] == 1.0
        assert w[1] == pytest.approx(0.75**3)
        assert w[2] == 0.0 and w[3] == 0.0

    def test_invalid_configuration_rejected(self):
        with pytest.raises(ConfigurationError):
            init_grid(0)
        with pytest.raises(ConfigurationError):
            initial_vorticity(np.array([0.5]), p=0)
        with pytest.raises(ConfigurationError):
            BlobSystem(m=4, h=-1.0, delta=1.0, kappa=np.array([1.0]))
        with pytest.raises(ConfigurationError):
            State(x=np.array([1.0]), y=np.array([1.0, 2.0]))


class TestVorticityField:
    def test_blob_vorticity_peak_value(self):
        # one unit-strength blob: zeta(0) = P(0)/(pi-normalization) / delta^2
        system = BlobSystem(m=2, h=1.0, delta=0.5, kappa=np.array([1.0]))
        state = State(x=np.array([0.0]), y=np.array([0.0]))
        assert blob_vorticity(system, state, np.array([0.0, 0.0])) == pytest.approx(
            1.0 / np.pi / 0.25
        )

    def test_blob_vorticity_integrates_to_circulation(self):
        rng = np.random.default_rng(5)
        system, state = random_system(rng, 4, m=4, delta=0.3)
        # tensor-grid quadrature over a box comfortably containing the blobs
        grid = np.linspace(-6.0, 6.0, 601)
        step = grid[1] - grid[0]
        gx, gy = np.meshgrid(grid, grid)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        total = blob_vorticity(system, state, pts).sum() * step**2
        assert total == pytest.approx(system.kappa.sum(), abs=1e-6)
