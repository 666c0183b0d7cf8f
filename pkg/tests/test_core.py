import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wentzell.core import (BulkBoundaryFunction, CauchyData, GridMismatchError,
                           Grid1D, PhysicalParams, Strip, ZeroModeError,
                           compatibility_check, spectral_sobolev_norm,
                           symplectic_form, trace, weighted_inner_product,
                           weighted_norm)
from wentzell.modes import build_table, eval_mode_deriv, mode_function, synthesize

P1 = PhysicalParams(c=1.0, geometry=Strip(1.0))
GRID = Grid1D.for_strip(1.0, 64)


def bbf(bulk, bdy, grid=GRID):
    return BulkBoundaryFunction(grid=grid, bulk=np.asarray(bulk, dtype=float),
                                boundary=np.asarray(bdy, dtype=float))


def const(value, grid=GRID):
    return bbf(np.full(grid.n_nodes, value), [value, value], grid)


def test_params_validation():
    with pytest.raises(ValueError, match="negative c is rejected"):
        PhysicalParams(c=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(c=1.0, mu=-0.5)
    with pytest.raises(ValueError):
        PhysicalParams(c=1.0, geometry=Strip(-2.0))
    with pytest.raises(ValueError):
        PhysicalParams(c=1.0, d=0)


def test_grid_basics():
    g = Grid1D.for_strip(1.0, 8)
    assert g.h == pytest.approx(0.25)
    assert g.nodes[0] == -1.0 and g.nodes[-1] == 1.0
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 1)
    # weights integrate constants exactly and are all positive
    w = Grid1D.for_strip(1.0, 64).quad_weights()
    assert np.sum(w) == pytest.approx(2.0, abs=1e-14)
    assert np.all(w > 0)


def test_inner_product_constant():
    # int 1 over [-1,1] + c * (1 + 1) = 4
    assert weighted_inner_product(const(1.0), const(1.0), P1) == pytest.approx(4.0, abs=1e-14)


def test_inner_product_odd_integrand():
    z = GRID.nodes
    F = bbf(np.sin(np.pi * z), [0.0, 0.0])
    assert abs(weighted_inner_product(F, const(1.0), P1)) < 1e-14


def test_inner_product_normalized_mode():
    # quadrature against the closed-form normalization of mode 1
    table = build_table(1, P1)
    g = Grid1D.for_strip(1.0, 4096)
    F = mode_function(table.entries[1], table, g)
    assert weighted_inner_product(F, F, P1) == pytest.approx(1.0, abs=1e-8)


def test_inner_product_grid_mismatch():
    other = Grid1D.for_strip(1.0, 32)
    with pytest.raises(GridMismatchError):
        weighted_inner_product(const(1.0), const(1.0, other), P1)


def test_symplectic_constants():
    A = CauchyData(position=const(1.0), velocity=const(0.0))
    B = CauchyData(position=const(0.0), velocity=const(1.0))
    assert symplectic_form(A, B, P1) == pytest.approx(4.0, abs=1e-14)
    assert symplectic_form(A, A, P1) == 0.0


def test_sobolev_norm_single_mode():
    table = build_table(5, PhysicalParams(c=1.0, mu=1.0, geometry=Strip(1.0)))
    e3 = np.zeros(6)
    e3[3] = 1.0
    assert spectral_sobolev_norm(e3, table, 0.0) == pytest.approx(1.0)
    assert spectral_sobolev_norm(e3, table, 1.0) == pytest.approx(table.omegas()[3])


def test_sobolev_zero_mode_negative_order():
    table = build_table(3, P1)  # mu = 0: omega_0 = 0
    coeffs = np.array([1.0, 0.0, 0.0, 0.0])
    with pytest.raises(ZeroModeError):
        spectral_sobolev_norm(coeffs, table, -1.0)
    # absent zero mode is fine
    coeffs = np.array([0.0, 1.0, 0.0, 0.0])
    assert spectral_sobolev_norm(coeffs, table, -1.0) > 0


def test_sobolev_r0_equals_weighted_l2():
    p = PhysicalParams(c=1.0, mu=1.0, geometry=Strip(1.0))
    table = build_table(20, p)
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=21) / (1.0 + np.arange(21.0)) ** 2
    g = Grid1D.for_strip(1.0, 4096)
    F = synthesize(coeffs, table, g)
    assert spectral_sobolev_norm(coeffs, table, 0.0) == pytest.approx(
        weighted_norm(F, p), abs=1e-6)


def test_sobolev_r1_is_dirichlet_energy():
    # order-1 norm^2 equals the bulk + boundary gradient/mass integrals
    p = PhysicalParams(c=1.0, mu=1.0, geometry=Strip(1.0))
    table = build_table(12, p)
    rng = np.random.default_rng(5)
    coeffs = rng.normal(size=13) / (1.0 + np.arange(13.0)) ** 2
    g = Grid1D.for_strip(1.0, 4096)
    F = synthesize(coeffs, table, g)
    dz = sum(c * eval_mode_deriv(e, g.nodes, p)
             for c, e in zip(coeffs, table.entries))
    w = g.quad_weights()
    quad = (np.dot(w, dz**2) + p.mu**2 * np.dot(w, F.bulk**2)
            + p.c * p.mu**2 * np.sum(F.boundary**2))
    assert spectral_sobolev_norm(coeffs, table, 1.0) ** 2 == pytest.approx(quad, rel=1e-6)


def test_trace_and_compatibility():
    F = const(2.5)
    assert np.allclose(trace(F), [2.5, 2.5])
    assert compatibility_check(F)
    table = build_table(3, P1)
    G = mode_function(table.entries[2], table, GRID)
    assert compatibility_check(G, tol=1e-10)
    G.boundary = G.boundary + 1.0
    assert not compatibility_check(G)


finite = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False)
sampled = arrays(float, GRID.n_nodes, elements=finite)
bdy2 = arrays(float, 2, elements=finite)


@given(f=sampled, fb=bdy2, g=sampled, gb=bdy2)
@settings(max_examples=50, deadline=None)
def test_inner_product_conjugate_symmetry(f, fb, g, gb):
    F, G = bbf(f, fb), bbf(g, gb)
    assert weighted_inner_product(F, G, P1) == pytest.approx(
        np.conj(weighted_inner_product(G, F, P1)), abs=1e-9)


@given(f=sampled, fb=bdy2)
@settings(max_examples=50, deadline=None)
def test_inner_product_positive(f, fb):
    F = bbf(f, fb)
    norm2 = np.real(weighted_inner_product(F, F, P1))
    if np.max(np.abs(f)) > 1e-6 or np.max(np.abs(fb)) > 1e-6:
        assert norm2 > 0
    assert norm2 >= 0


@given(f=sampled, fb=bdy2, g=sampled, gb=bdy2, u=sampled, ub=bdy2)
@settings(max_examples=30, deadline=None)
def test_symplectic_antisymmetry(f, fb, g, gb, u, ub):
    A = CauchyData(position=bbf(f, fb), velocity=bbf(g, gb))
    B = CauchyData(position=bbf(u, ub), velocity=bbf(g, gb))
    sab = symplectic_form(A, B, P1)
    sba = symplectic_form(B, A, P1)
    scale = max(abs(sab), abs(sba), 1.0)
    assert abs(sab + sba) <= 1e-12 * scale
