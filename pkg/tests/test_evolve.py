import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wentzell.core import (BulkBoundaryFunction, CauchyData, Grid1D,
                           PhysicalParams, Strip, symplectic_form)
from wentzell.evolve import (CflError, SpectralState, causality_probe, energy,
                             energy_in_region, explicit_solution,
                             explicit_solution_dt, fdtd_run, fdtd_step,
                             make_fdtd_state, reflection_cauchy_data,
                             spectral_evolve, spectral_symplectic,
                             synthesize_state)
from wentzell.modes import build_table, synthesize

P0 = PhysicalParams(c=1.0, mu=0.0, geometry=Strip(1.0))
P1 = PhysicalParams(c=1.0, mu=1.0, geometry=Strip(1.0))


@pytest.fixture(scope="module")
def table0():
    return build_table(10, P0)


@pytest.fixture(scope="module")
def table1():
    return build_table(10, P1)


def gaussian_data(grid, width=0.1, center=0.0):
    z = grid.nodes
    pos = np.exp(-((z - center) ** 2) / (2 * width**2))
    zero = np.zeros_like(z)
    return CauchyData(
        position=BulkBoundaryFunction(grid=grid, bulk=pos,
                                      boundary=np.array([pos[0], pos[-1]])),
        velocity=BulkBoundaryFunction(grid=grid, bulk=zero, boundary=np.zeros(2)))


# ---------------------------------------------------------------------------
# spectral propagator

def test_spectral_identity_at_t0(table1):
    s = SpectralState(a=np.arange(11.0), b=np.ones(11), table=table1)
    s2 = spectral_evolve(s, 0.0)
    assert np.array_equal(s2.a, s.a) and np.array_equal(s2.b, s.b)


def test_spectral_periodicity(table1):
    a = np.zeros(11)
    a[1] = 1.0
    s = SpectralState(a=a, b=np.zeros(11), table=table1)
    w1 = s.omegas()[1]
    s2 = spectral_evolve(s, 2 * np.pi / w1)
    assert abs(s2.a[1] - 1.0) < 1e-12 and abs(s2.b[1]) < 1e-12


def test_zero_mode_linear_growth(table0):
    b = np.zeros(11)
    b[0] = 1.0
    s = SpectralState(a=np.zeros(11), b=b, table=table0)
    s2 = spectral_evolve(s, 3.0)
    assert s2.a[0] == pytest.approx(3.0)
    assert s2.b[0] == pytest.approx(1.0)


def test_spectral_energy_exact_over_many_steps(table1):
    m = np.arange(11.0)
    s = SpectralState(a=1.0 / (1 + m) ** 2, b=0.5 / (1 + m), table=table1)
    E0 = energy(s).total
    dt = 7.3e-3
    drift = 0.0
    for _ in range(10_000):
        s = spectral_evolve(s, dt)
        # re-evaluation every step; accumulated rotations stay on the shell
    drift = abs(energy(s).total - E0) / E0
    assert drift < 1e-12


def test_single_mode_energy(table1):
    a = np.zeros(11)
    a[1] = 1.0
    s = SpectralState(a=a, b=np.zeros(11), table=table1)
    w1 = s.omegas()[1]
    assert energy(s).total == pytest.approx(w1**2 / 2, rel=1e-12)
    s2 = spectral_evolve(s, 1.7)
    assert energy(s2).total == pytest.approx(w1**2 / 2, rel=1e-12)
    assert energy(s).boundary >= 0 and energy(s).bulk >= 0


def test_zero_state_energy(table1):
    s = SpectralState(a=np.zeros(11), b=np.zeros(11), table=table1)
    assert energy(s).total == 0.0


def test_symplectic_time_invariance_quadrature(table1):
    # conservation of the quadrature symplectic form along spectral evolution
    m = np.arange(11.0)
    A = SpectralState(a=0.6 / (1 + m) ** 2, b=0.1 / (1 + m), table=table1)
    B = SpectralState(a=0.2 / (1 + m), b=0.5 / (1 + m) ** 2, table=table1)
    grid = Grid1D.for_strip(1.0, 2048)
    s0 = symplectic_form(synthesize_state(A, grid), synthesize_state(B, grid), P1)
    At, Bt = spectral_evolve(A, 1.0), spectral_evolve(B, 1.0)
    s1 = symplectic_form(synthesize_state(At, grid), synthesize_state(Bt, grid), P1)
    assert s1 == pytest.approx(s0, abs=1e-6)
    # and the mode representation agrees with the quadrature within tolerance
    assert spectral_symplectic(A, B) == pytest.approx(s0, abs=1e-6)


coeffs = arrays(float, 11, elements=st.floats(min_value=-2, max_value=2,
                                              allow_nan=False))


@given(a=coeffs, b=coeffs, t=st.floats(min_value=0, max_value=20, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_spectral_conservation_property(a, b, t):
    table = build_table(10, P1)
    s = SpectralState(a=a, b=b, table=table)
    st_ = spectral_evolve(s, t)
    assert energy(st_).total == pytest.approx(energy(s).total, rel=1e-10, abs=1e-12)


# ---------------------------------------------------------------------------
# FDTD

def test_fdtd_zero_data_stays_zero():
    grid = Grid1D.for_strip(1.0, 64)
    data = CauchyData(
        position=BulkBoundaryFunction(grid=grid, bulk=np.zeros(65), boundary=np.zeros(2)),
        velocity=BulkBoundaryFunction(grid=grid, bulk=np.zeros(65), boundary=np.zeros(2)))
    s = make_fdtd_state(data, P0)
    s = fdtd_run(s, 200)
    assert np.all(s.phi == 0.0)


def test_fdtd_cfl_rejected():
    grid = Grid1D.for_strip(1.0, 64)
    data = gaussian_data(grid)
    with pytest.raises(CflError):
        make_fdtd_state(data, P0, dt=2.0 * grid.h)


def test_fdtd_standing_mode_vs_spectral(table0):
    grid = Grid1D.for_strip(1.0, 1024)
    a = np.zeros(11)
    a[1] = 1.0
    data = CauchyData(position=synthesize(a, table0, grid),
                      velocity=synthesize(np.zeros(11), table0, grid))
    s = make_fdtd_state(data, P0, cfl=0.5)
    w1 = table0.omegas()[1]
    steps = int(round(2 * np.pi / w1 / s.dt))
    s = fdtd_run(s, steps)
    ref = synthesize_state(
        spectral_evolve(SpectralState(a=a, b=np.zeros(11), table=table0),
                        steps * s.dt), grid)
    err = np.sqrt(np.trapezoid((s.phi - ref.position.bulk) ** 2, grid.nodes))
    assert err < 1e-3


def test_fdtd_step_matches_run():
    grid = Grid1D.for_strip(1.0, 128)
    data = gaussian_data(grid, width=0.2)
    s1 = make_fdtd_state(data, P1)
    s2 = make_fdtd_state(data, P1)
    for _ in range(7):
        s1 = fdtd_step(s1)
    s2 = fdtd_run(s2, 7)
    assert np.allclose(s1.phi, s2.phi, atol=1e-15)
    assert s1.t == pytest.approx(s2.t)


def test_fdtd_second_order_convergence(table1):
    m = np.arange(11.0)
    a = 0.4 / (1 + m) ** 2
    b = 0.2 / (1 + m) ** 2

    def err(n):
        grid = Grid1D.for_strip(1.0, n)
        data = CauchyData(position=synthesize(a, table1, grid),
                          velocity=synthesize(b, table1, grid))
        s = make_fdtd_state(data, P1, cfl=0.5)
        steps = int(round(1.0 / s.dt))
        s = fdtd_run(s, steps)
        ref = synthesize_state(
            spectral_evolve(SpectralState(a=a, b=b, table=table1), steps * s.dt), grid)
        return float(np.max(np.abs(s.phi - ref.position.bulk)))

    ratio = err(512) / err(1024)
    assert 3.2 <= ratio <= 4.8


# ---------------------------------------------------------------------------
# causality

def test_causality_trivial_at_t0():
    grid = Grid1D.for_strip(1.0, 512)
    rep = causality_probe(gaussian_data(grid, width=0.05), P0, t=0.0)
    assert rep.passed


def test_causality_before_boundary_contact():
    grid = Grid1D.for_strip(1.0, 1024)
    data = gaussian_data(grid, width=0.03)
    data.position.bulk[np.abs(grid.nodes) > 0.2] = 0.0
    rep = causality_probe(data, P0, t=0.5, tol=1e-8)
    assert rep.passed
    assert rep.max_outside < 1e-8


def test_causality_boundary_bump_far_half():
    # bump near the left boundary: the right half stays silent until t ~ distance
    grid = Grid1D.for_strip(1.0, 1024)
    data = gaussian_data(grid, width=0.04, center=-0.8)
    data.position.bulk[grid.nodes > -0.6] = 0.0
    st_ = make_fdtd_state(data, P0, cfl=0.5)
    total = energy(st_).total
    steps = int(round(0.5 / st_.dt))  # right edge of the cone reaches z ~ -0.1
    st_ = fdtd_run(st_, steps)
    far = energy_in_region(st_, 0.0, 1.0)
    assert far < 1e-8 * total


def test_local_energy_estimate():
    grid = Grid1D.for_strip(1.0, 1024)
    data = gaussian_data(grid, width=0.05, center=0.2)
    st_ = make_fdtd_state(data, P0, cfl=0.5)
    lo, hi = 0.2 - 0.3, 0.2 + 0.3
    E0 = energy_in_region(st_, lo, hi)
    for _ in range(5):
        st_ = fdtd_run(st_, int(round(0.04 / st_.dt)))
        assert energy_in_region(st_, lo + st_.t, hi - st_.t) <= E0 * (1 + 1e-3)


# ---------------------------------------------------------------------------
# exact reflection solution

def test_explicit_solution_before_arrival():
    z = np.linspace(0.0, 2.0, 101)
    phi, bdy = explicit_solution(-0.5, z, eps=0.02, c=1.0)
    assert abs(bdy) < 1e-60
    # only the infalling pulse: a single Gaussian at z = 0.5
    assert phi[np.argmax(np.abs(phi))] == pytest.approx(
        1.0 / (0.02 * np.sqrt(2 * np.pi)), rel=1e-6)


def test_explicit_solution_boundary_value():
    # eps -> 0 limit of the trace at t = 1, c = 1 is 2/e
    _, b1 = explicit_solution(1.0, np.array([0.0]), eps=1e-4, c=1.0)
    assert b1 == pytest.approx(2 * np.exp(-1.0), rel=1e-6)
    phi0, b0 = explicit_solution(0.7, np.array([0.0]), eps=0.02, c=1.0)
    assert phi0[0] == pytest.approx(b0, rel=1e-12)  # trace condition


def test_explicit_solution_solves_boundary_ode():
    # d2/dt2 phi| = c^-1 dperp phi at z = 0 (mu = 0), by finite differences
    eps, c = 0.05, 0.7
    dt = 1e-4
    t0 = 0.4
    _, b_m = explicit_solution(t0 - dt, np.array([0.0]), eps, c)
    _, b_0 = explicit_solution(t0, np.array([0.0]), eps, c)
    _, b_p = explicit_solution(t0 + dt, np.array([0.0]), eps, c)
    acc = (b_p - 2 * b_0 + b_m) / dt**2
    dz = 1e-5
    z = np.array([0.0, dz, 2 * dz])
    phi, _ = explicit_solution(t0, z, eps, c)
    dperp = (-3 * phi[0] + 4 * phi[1] - phi[2]) / (2 * dz)
    assert acc == pytest.approx(dperp / c, rel=1e-4)


def test_explicit_solution_dt_consistency():
    eps, c = 0.03, 1.3
    z = np.linspace(0.0, 1.5, 301)
    dt = 1e-6
    up, _ = explicit_solution(0.3 + dt, z, eps, c)
    dn, _ = explicit_solution(0.3 - dt, z, eps, c)
    v, _ = explicit_solution_dt(0.3, z, eps, c)
    assert np.max(np.abs((up - dn) / (2 * dt) - v)) < 1e-4 * np.max(np.abs(v))


def test_fdtd_reflection_trace():
    # coarser, faster variant of the full acceptance run
    eps, c = 0.02, 1.0
    grid = Grid1D(-1.0, 1.0, 4096)
    p = PhysicalParams(c=c, mu=0.0, geometry=Strip(1.0))
    data = reflection_cauchy_data(grid, t0=-0.5, eps=eps, c=c)
    s = make_fdtd_state(data, p, cfl=0.5)
    sup = 0.0
    for k in range(int(round(1.5 / s.dt))):
        s = fdtd_run(s, 1)
        t = -0.5 + (k + 1) * s.dt
        _, exact = explicit_solution(t, np.array([0.0]), eps, c)
        sup = max(sup, abs(s.phi[0] - exact))
    assert sup < 5e-2 * 2 / c
