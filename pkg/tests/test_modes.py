import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wentzell.core import GeometryError, Grid1D, HalfSpace, PhysicalParams, Strip
from wentzell.modes import (HalfSpaceMode, bracket, build_table, d_asymptote,
                            eval_halfspace_mode, eval_mode, mode_function,
                            project, residual_normalized, solve_q, synthesize,
                            verify_table)

P1 = PhysicalParams(c=1.0, geometry=Strip(1.0))


@pytest.fixture(scope="module")
def table20():
    return build_table(20, P1)


def weighted_quad(f, S, c, n=200_000):
    """Independent dense-trapezoid oracle for the weighted norm of a profile."""
    z = np.linspace(-S, S, n + 1)
    y = f(z)
    return np.trapezoid(y * y, z) + c * (f(-S) ** 2 + f(S) ** 2)


def test_solve_q_zero_mode():
    assert solve_q(0, P1) == 0.0
    assert solve_q(0, PhysicalParams(c=3.7, geometry=Strip(0.4))) == 0.0


def test_solve_q_reference_roots():
    # bisection oracle values: q tan q = 1 on (0, pi/2); tan q = -q on (pi/2, pi)
    assert solve_q(1, P1) == pytest.approx(0.86033, abs=1e-5)
    assert solve_q(2, P1) == pytest.approx(2.02876, abs=1e-5)


def test_solve_q_rejects_halfspace():
    with pytest.raises(GeometryError):
        solve_q(1, PhysicalParams(c=1.0, geometry=HalfSpace()))


def test_normalization_against_quadrature(table20):
    e1 = table20.entries[1]
    W = weighted_quad(lambda z: np.sin(e1.q * z), 1.0, 1.0)
    assert e1.c_norm == pytest.approx(np.sqrt(1.0 / W), rel=1e-8)
    assert e1.c_norm == pytest.approx(0.7969, abs=1e-4)
    assert e1.d_bdy == pytest.approx(0.6041, abs=1e-4)
    e2 = table20.entries[2]
    W2 = weighted_quad(lambda z: np.cos(e2.q * z), 1.0, 1.0)
    assert e2.c_norm == pytest.approx(np.sqrt(1.0 / W2), rel=1e-8)


def test_zero_mode_normalization(table20):
    # constant mode: unit weighted norm gives d_0 = 1 / sqrt(2S + 2c)
    assert table20.entries[0].d_bdy == pytest.approx(0.5)
    W = weighted_quad(lambda z: np.ones_like(z), 1.0, 1.0)
    assert table20.entries[0].c_norm == pytest.approx(np.sqrt(1.0 / W), rel=1e-10)


def test_d9_asymptotic_law(table20):
    assert abs(table20.entries[9].d_bdy) == pytest.approx(2.0 / (np.pi * 8), rel=0.15)


def test_verify_table_passes():
    table = build_table(200, P1)
    rep = verify_table(table, delta=0.1, m_start=50)
    assert rep.all_pass
    assert 0 in rep.skipped and 1 in rep.skipped
    # empirical constant fit: scaled deviations bounded by 10x the first one
    assert np.max(rep.c_dev_scaled) <= 10.0 * rep.c_dev_scaled[0]


def test_eval_mode_constant(table20):
    z = np.linspace(-1, 1, 7)
    vals = eval_mode(table20.entries[0], z, P1)
    assert np.allclose(vals, table20.entries[0].c_norm)


def test_eval_mode_outside_domain(table20):
    with pytest.raises(GeometryError):
        eval_mode(table20.entries[1], 1.5, P1)


def test_eval_mode_trace_is_d(table20):
    e2 = table20.entries[2]
    assert float(eval_mode(e2, 1.0, P1)) == pytest.approx(e2.d_bdy, abs=1e-14)


def test_halfspace_mode_boundary_value():
    q = 1.3
    val = eval_halfspace_mode(q, 0.0, P1)
    assert val == pytest.approx((np.pi / 2 * (q**2 + 1)) ** -0.5)
    assert HalfSpaceMode(q).boundary_value(P1) == pytest.approx(float(val))
    with pytest.raises(GeometryError):
        eval_halfspace_mode(q, -0.1, P1)


def test_project_unit_vectors(table20):
    g = Grid1D.for_strip(1.0, 4096)
    F = mode_function(table20.entries[7], table20, g)
    a = project(F, table20)
    e7 = np.zeros(21)
    e7[7] = 1.0
    assert np.max(np.abs(a - e7)) < 1e-8


def test_project_zero(table20):
    g = Grid1D.for_strip(1.0, 256)
    F = mode_function(table20.entries[0], table20, g)
    F.bulk[:] = 0.0
    F.boundary[:] = 0.0
    assert np.all(project(F, table20) == 0.0)


def test_gram_identity(table20):
    g = Grid1D.for_strip(1.0, 4096)
    G = np.array([project(mode_function(e, table20, g), table20)
                  for e in table20.entries])
    assert np.max(np.abs(G - np.eye(21))) < 1e-8


def test_synthesize_round_trip(table20):
    g = Grid1D.for_strip(1.0, 4096)
    rng = np.random.default_rng(11)
    coeffs = rng.normal(size=21) / (1 + np.arange(21.0))
    F = synthesize(coeffs, table20, g)
    assert np.max(np.abs(project(F, table20) - coeffs)) < 1e-8
    # completeness: band-limited functions reproduce in sup norm
    G = synthesize(project(F, table20), table20, g)
    assert np.max(np.abs(G.bulk - F.bulk)) < 1e-6


def test_synthesize_trace_exact(table20):
    g = Grid1D.for_strip(1.0, 128)
    coeffs = np.linspace(1.0, 0.1, 21)
    F = synthesize(coeffs, table20, g)
    assert F.bulk[0] == F.boundary[0]
    assert F.bulk[-1] == F.boundary[1]


@pytest.mark.parametrize("S", (0.5, 1.0, 2.0))
@pytest.mark.parametrize("c", (0.5, 1.0, 2.0))
def test_bracket_unique_root(S, c):
    # the defining trig form changes sign at the window endpoints and crosses
    # zero exactly once inside, for every tested geometry
    p = PhysicalParams(c=c, geometry=Strip(S))
    for m in range(1, 31):
        lo, hi = bracket(m, p)
        q = np.linspace(lo, hi, 201)
        even = m % 2 == 0
        if even:
            vals = np.sin(q * S) / c + q * np.cos(q * S)
        else:
            vals = q * np.sin(q * S) - np.cos(q * S) / c
        assert vals[0] * vals[-1] < 0
        assert np.count_nonzero(np.diff(np.sign(vals))) == 1


st_sc = st.floats(min_value=0.5, max_value=2.0, allow_nan=False)
st_m = st.integers(min_value=1, max_value=40)


@given(S=st_sc, c=st_sc, m=st_m)
@settings(max_examples=60, deadline=None)
def test_bracket_contains_root(S, c, m):
    p = PhysicalParams(c=c, geometry=Strip(S))
    lo, hi = bracket(m, p)
    q = solve_q(m, p)
    assert lo < q < hi
    assert residual_normalized(q, p, m % 2 == 0) < 1e-12 * max(1.0, 1.0 / S)


@given(S=st_sc, c=st_sc)
@settings(max_examples=15, deadline=None)
def test_d_nonzero_and_increasing(S, c):
    p = PhysicalParams(c=c, geometry=Strip(S))
    table = build_table(30, p)
    assert np.all(table.d_bdys != 0.0)
    assert np.all(np.diff(table.qs) > 0)
    # decay law within 25% already by m = 30
    assert abs(table.d_bdys[30]) == pytest.approx(
        float(d_asymptote(30, S, c)), rel=0.25)
