import numpy as np
import pytest

from oracles import refined_trapz
from vcfield.coeffs import (CoefficientField, make_grid, sech_well_field,
                            tanh_sech_drift_field, zero_field)
from vcfield.evolve import (BlowUpError, CFLError, FieldState, Grid,
                            SpongeProfile, Stepper, energy, h1_l2_norm,
                            initial_data, stability_limit, weight_omega)
from vcfield.greensolve import construct_steady_state
from vcfield.potentials import make_potential

SG = make_potential("sine-gordon")
FREE = make_potential({"family": "polynomial", "coeffs": [0.0, 0.0, 0.0]})


def test_grid_even_and_centered():
    g = Grid.from_spacing(80, 0.01)
    assert g.N % 2 == 0
    assert g.y[0] == -80.0 and g.y[-1] == 80.0
    assert g.y[g.N // 2] == 0.0
    with pytest.raises(ValueError):
        Grid(L=10.0, N=101)


def test_sponge_profile_shape():
    g = Grid.from_spacing(80, 0.1)
    sp = SpongeProfile.build(g, 0.2, 1.0)
    y = g.y
    interior = np.abs(y) <= 0.6 * g.L
    assert np.all(sp.gamma[interior] == 0.0)
    assert sp.gamma.max() == pytest.approx(1.0)
    # C^1 ramp: discrete slope is continuous at the ramp foot
    assert np.all(np.abs(np.diff(sp.gamma, 2)) < 5 * g.dy**2 / (0.2 * g.L) ** 2 * 6)


def test_cfl_gate():
    g = Grid.from_spacing(40, 0.01)
    cfs = zero_field(g.y)
    limit = stability_limit(g, cfs, SG, 0.0)
    with pytest.raises(CFLError):
        Stepper(g, cfs, SG, 0.0, np.zeros(g.N + 1), np.zeros(g.N + 1),
                dt=1.1 * limit)


def test_stability_limit_accounts_for_stiff_well():
    from vcfield.coeffs import paper_example_field
    g = Grid.from_spacing(80, 0.01)
    mild = stability_limit(g, zero_field(g.y), SG, 0.0)
    stiff = stability_limit(g, paper_example_field(g.y, 13.0), SG, 0.0)
    assert mild == pytest.approx(g.dy, rel=1e-4)
    assert stiff < 2.05 / np.sqrt(4 / g.dy**2 + 8 * 13.0**4)


def test_equilibrium_is_fixed_point():
    g = Grid.from_spacing(40, 0.01)
    cfs = zero_field(g.y)
    xi = 2 * np.pi
    st = Stepper(g, cfs, SG, xi, np.full(g.N + 1, xi), np.zeros(g.N + 1),
                 dt=0.4 * g.dy)
    for _ in range(1000):
        state = st.advance()
    assert np.max(np.abs(state.u - xi)) < 1e-12


def test_constructed_steady_state_persists():
    y = make_grid(80, 0.01)
    cfs = sech_well_field(y, -0.05)
    steady = construct_steady_state(cfs, SG, 6.28)
    g = Grid.from_spacing(80, 0.01)
    st = Stepper(g, cfs, SG, steady.xi, steady.U(), np.zeros(g.N + 1),
                 dt=0.4 * g.dy)
    n = int(round(50.0 / st.dt))
    for k in range(n):
        state = st.advance()
    assert state.t >= 50.0 - 2 * st.dt
    assert np.max(np.abs(state.u - steady.U())) < 1e-5


def test_linear_dispersion_periodic_variant():
    # periodic linearized stepper, used only here: u_tt = u_yy - u with
    # u = cos(w t) cos(k y) and w^2 = k^2 + 1
    L = np.pi
    n = 256
    dy = 2 * L / n
    y = np.arange(n) * dy - L
    kappa = 3.0
    dt = 0.4 * dy
    u = np.cos(kappa * y)
    om2 = kappa**2 + 1
    uprev = u + 0.5 * dt**2 * ((np.roll(u, -1) - 2 * u + np.roll(u, 1)) / dy**2 - u)
    mode0 = np.sum(u * np.cos(kappa * y))
    target = int(round(0.25 * 2 * np.pi / np.sqrt(om2) / dt))
    for _ in range(target):
        lap = (np.roll(u, -1) - 2 * u + np.roll(u, 1)) / dy**2
        u, uprev = 2 * u - uprev + dt**2 * (lap - u), u
    amp = np.sum(u * np.cos(kappa * y)) / mode0
    t = target * dt
    omega_hat = np.arccos(np.clip(amp, -1, 1)) / t
    assert abs(omega_hat**2 - om2) < 50 * (dt**2 + dy**2)


class TestEnergy:
    def test_constant_state_zero(self):
        g = Grid.from_spacing(40, 0.01)
        cfs = zero_field(g.y)
        state = FieldState(t=0.0, u=np.full(g.N + 1, 2 * np.pi),
                           ut=np.zeros(g.N + 1))
        assert abs(energy(state, cfs, SG, 2 * np.pi)) < 1e-12

    def test_small_bump_against_refined_quadrature(self):
        g = Grid.from_spacing(80, 0.01)
        cfs = zero_field(g.y)
        xi = 2 * np.pi
        u = xi + 0.01 / np.cosh(g.y)
        state = FieldState(t=0.0, u=u, ut=np.zeros(g.N + 1))
        E = energy(state, cfs, SG, xi)
        oracle = refined_trapz(
            lambda t: 0.5 * (0.01 * np.tanh(t) / np.cosh(t)) ** 2
            + (1 - np.cos(xi + 0.01 / np.cosh(t))), -80, 80)
        assert abs(E - oracle) / oracle < 1e-6

    def test_weight_ratio_for_sech2_drift(self):
        y = make_grid(80, 0.01)
        z = np.zeros_like(y)
        cfs = CoefficientField(y=y, b=1 / np.cosh(y) ** 2, c=z,
                               bp=-2 * np.tanh(y) / np.cosh(y) ** 2, cp=z.copy())
        om = weight_omega(cfs)
        assert abs(om[-1] / om[0] - np.exp(2.0)) < 1e-6


def test_sponge_absorbs_linear_pulse():
    # free wave, nonlinearity off: once the rightward pulse is inside the
    # sponge the domain energy only goes down (Dirichlet ends carry no flux)
    g = Grid.from_spacing(80, 0.02)
    y = g.y
    cfs = zero_field(y)
    sp = SpongeProfile.build(g, 0.2, 1.0)
    u0 = np.exp(-((y - 40) / 4.0) ** 2)
    du0 = -2 * (y - 40) / 16.0 * u0
    st = Stepper(g, cfs, FREE, 0.0, u0, -du0, dt=0.4 * g.dy, sponge=sp)
    h = g.dy

    def domain_energy(state):
        uy = np.gradient(state.u, h)
        return float(np.trapezoid(0.5 * state.ut**2 + 0.5 * uy**2, dx=h))

    series = []
    nsteps = int(round(50.0 / st.dt))
    probe = max(1, int(round(0.5 / st.dt)))
    for k in range(nsteps):
        state = st.advance()
        if k % probe == 0:
            series.append((state.t, domain_energy(state)))
    E0 = series[0][1]
    after = [(t, e) for t, e in series if t >= 15.0]
    for (t0, e0), (t1, e1) in zip(after, after[1:]):
        assert e1 <= e0 + 1e-8 * E0 * probe
    # most of the pulse is gone by the end
    assert series[-1][1] < 0.1 * E0


def test_parity_preservation_long_run():
    # U = xi exactly (c = 0), b odd: the stencil is parity-exact, so odd data
    # stays odd to roundoff over t <= 100
    g = Grid.from_spacing(80, 0.01)
    y = g.y
    cfs = tanh_sech_drift_field(y, -0.5, 0.0)
    xi = 2 * np.pi
    rng = np.random.default_rng(0)
    v1, v2 = initial_data(g, {"family": "odd-pair", "epsilon": 0.01,
                              "parity": "odd", "component": "both",
                              "width": 2.0}, rng)
    sp = SpongeProfile.build(g, 0.2, 1.0)
    st = Stepper(g, cfs, SG, xi, xi + v1, v2, dt=0.4 * g.dy, sponge=sp)
    nsteps = int(round(100.0 / st.dt))
    worst = 0.0
    for k in range(nsteps):
        state = st.advance()
        if k % 2500 == 0:
            even = (np.max(np.abs((state.u - xi) + (state.u - xi)[::-1]))
                    + np.max(np.abs(state.ut + state.ut[::-1])))
            worst = max(worst, even)
    assert worst < 1e-8


def test_blowup_detector():
    g = Grid.from_spacing(20, 0.01)
    cfs = zero_field(g.y)
    huge = np.full(g.N + 1, 1e7)
    st = Stepper(g, cfs, SG, 0.0, huge, np.zeros(g.N + 1), dt=0.4 * g.dy)
    with pytest.raises(BlowUpError):
        for _ in range(5):
            st.advance()


class TestInitialData:
    def test_norm_scaling(self):
        g = Grid.from_spacing(80, 0.01)
        rng = np.random.default_rng(0)
        for fam, par in [("sech-bump", "none"), ("odd-pair", "odd"),
                         ("random-spline", "odd"), ("random-spline", "even")]:
            v1, v2 = initial_data(g, {"family": fam, "epsilon": 0.01,
                                      "parity": par, "component": "both"}, rng)
            assert h1_l2_norm(v1, v2, g.dy) == pytest.approx(0.01, rel=1e-12)

    def test_parity_projection(self):
        g = Grid.from_spacing(40, 0.01)
        rng = np.random.default_rng(1)
        v1, v2 = initial_data(g, {"family": "random-spline", "epsilon": 0.01,
                                  "parity": "odd", "component": "both"}, rng)
        assert np.max(np.abs(v1 + v1[::-1])) < 1e-15
        assert np.max(np.abs(v2 + v2[::-1])) < 1e-15

    def test_velocity_component(self):
        g = Grid.from_spacing(40, 0.01)
        rng = np.random.default_rng(2)
        v1, v2 = initial_data(g, {"family": "sech-bump", "epsilon": 0.01,
                                  "component": "velocity"}, rng)
        assert np.all(v1 == 0.0)
        assert np.max(np.abs(v2)) > 0

    def test_seed_determinism(self):
        g = Grid.from_spacing(40, 0.01)
        a = initial_data(g, {"family": "random-spline", "epsilon": 0.01},
                         np.random.default_rng(5))
        b = initial_data(g, {"family": "random-spline", "epsilon": 0.01},
                         np.random.default_rng(5))
        c = initial_data(g, {"family": "random-spline", "epsilon": 0.01},
                         np.random.default_rng(6))
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        assert not np.array_equal(a[0], c[0])


def test_reflection_guard():
    from vcfield.driver import run_simulation
    g = Grid.from_spacing(40, 0.02)
    cfs = zero_field(g.y)
    rng = np.random.default_rng(0)
    v1, v2 = initial_data(g, {"family": "sech-bump", "epsilon": 0.01}, rng)
    with pytest.raises(ValueError, match="reflection guard"):
        run_simulation(g, cfs, SG, 0.0, v1, v2, T=40.0, sponge=None,
                       intervals=[(-5.0, 5.0)], conservation_mode=True)
