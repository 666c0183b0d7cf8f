"""Geometry, parameters, and the weighted function space L2(bulk) + c*L2(boundary).

The boundary is a genuine degree of freedom: a field configuration is a pair
(bulk samples, boundary values), and all inner products carry the boundary
measure c * (Dirac at each boundary component).  Everything here is a pure
function over immutable value objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridMismatchError(ValueError):
    """Two sampled functions do not live on the same grid."""


class GeometryError(ValueError):
    """Grid or evaluation point is incompatible with the geometry."""


class ZeroModeError(ValueError):
    """An operation is undefined in the presence of a zero-frequency mode."""


@dataclass(frozen=True)
class Strip:
    """Transverse interval [-S, S] with a boundary component at each end."""

    S: float

    def __post_init__(self):
        if not self.S > 0:
            raise ValueError(f"strip half-width must be positive, got S={self.S}")


@dataclass(frozen=True)
class HalfSpace:
    """Transverse half-line [0, inf) with a single boundary component at z=0."""


Geometry = Strip | HalfSpace


@dataclass(frozen=True)
class PhysicalParams:
    """Boundary coupling c (a length, > 0), mass mu >= 0, geometry, and the
    boundary spacetime dimension d."""

    c: float
    mu: float = 0.0
    geometry: Geometry = field(default_factory=lambda: Strip(1.0))
    d: int = 1

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(
                f"boundary coupling must be positive, got c={self.c}; "
                "negative c is rejected (no well-posed classical theory)"
            )
        if self.mu < 0:
            raise ValueError(f"mass must be non-negative, got mu={self.mu}")
        if self.d < 1 or int(self.d) != self.d:
            raise ValueError(f"boundary dimension must be an integer >= 1, got d={self.d}")

    @property
    def n_boundary(self) -> int:
        return 2 if isinstance(self.geometry, Strip) else 1


# Second-order one-sided endpoint-derivative stencil, used to correct the
# h^2/12*[f'(b)-f'(a)] Euler-Maclaurin term of the composite trapezoid rule.
# The resulting Gregory-type weights stay positive, so the quadrature form is
# positive definite on sampled data.
_END_CORRECTION = np.array([25.0, -48.0, 36.0, -16.0, 3.0]) / 144.0


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n intervals on [z_min, z_max], both endpoints included."""

    z_min: float
    z_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 intervals, got n={self.n}")
        if not self.z_max > self.z_min:
            raise ValueError("grid endpoints must be increasing")

    @property
    def h(self) -> float:
        return (self.z_max - self.z_min) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n + 1)

    @property
    def n_nodes(self) -> int:
        return self.n + 1

    def quad_weights(self) -> np.ndarray:
        """Endpoint-corrected trapezoid weights (plain trapezoid below 10 nodes)."""
        h = self.h
        w = np.full(self.n + 1, h)
        w[0] = w[-1] = h / 2.0
        if self.n + 1 >= 10:
            w[:5] -= _END_CORRECTION * h
            w[-5:] -= _END_CORRECTION[::-1] * h
        return w

    @classmethod
    def for_strip(cls, S: float, n: int) -> "Grid1D":
        return cls(-S, S, n)

    @classmethod
    def for_halfspace(cls, z_max: float, n: int) -> "Grid1D":
        return cls(0.0, z_max, n)


def _check_grid_geometry(grid: Grid1D, p: PhysicalParams):
    if isinstance(p.geometry, Strip):
        S = p.geometry.S
        if not (np.isclose(grid.z_min, -S) and np.isclose(grid.z_max, S)):
            raise GeometryError(
                f"strip grid must span [-S, S] = [{-S}, {S}], got [{grid.z_min}, {grid.z_max}]"
            )
    else:
        if not np.isclose(grid.z_min, 0.0):
            raise GeometryError(f"half-space grid must start at z=0, got z_min={grid.z_min}")


@dataclass
class BulkBoundaryFunction:
    """A sampled element of L2(bulk) + L2(boundary).

    ``boundary`` holds one value per boundary component: for the strip,
    index 0 is the component at -S and index 1 the one at +S; the half-space
    has the single component at z=0.  The boundary values are independent data;
    ``compatibility_check`` tests whether they agree with the bulk trace.
    """

    grid: Grid1D
    bulk: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        self.bulk = np.asarray(self.bulk)
        self.boundary = np.atleast_1d(np.asarray(self.boundary))
        if self.bulk.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"bulk samples have shape {self.bulk.shape}, expected ({self.grid.n_nodes},)"
            )
        if self.boundary.shape[0] not in (1, 2):
            raise ValueError("boundary must hold one or two component values")

    @property
    def n_boundary(self) -> int:
        return self.boundary.shape[0]


@dataclass
class CauchyData:
    """Position and velocity pair on a common grid."""

    position: BulkBoundaryFunction
    velocity: BulkBoundaryFunction

    def __post_init__(self):
        if self.position.grid != self.velocity.grid:
            raise GridMismatchError("Cauchy data components live on different grids")
        if self.position.n_boundary != self.velocity.n_boundary:
            raise GridMismatchError("Cauchy data components disagree on boundary components")


def _check_same_grid(F: BulkBoundaryFunction, G: BulkBoundaryFunction):
    if F.grid != G.grid or F.n_boundary != G.n_boundary:
        raise GridMismatchError("operands live on different grids")


def weighted_inner_product(F: BulkBoundaryFunction, G: BulkBoundaryFunction,
                           p: PhysicalParams):
    """<F, G> = integral conj(F)*G over the bulk + c * sum over boundary components.

    The bulk integral uses the endpoint-corrected trapezoid rule of the grid;
    the boundary measure is an exact point evaluation weighted by c.
    """
    _check_same_grid(F, G)
    _check_grid_geometry(F.grid, p)
    if F.n_boundary != p.n_boundary:
        raise GeometryError(
            f"expected {p.n_boundary} boundary component(s), got {F.n_boundary}"
        )
    w = F.grid.quad_weights()
    bulk = np.dot(w, np.conj(F.bulk) * G.bulk)
    bdy = p.c * np.sum(np.conj(F.boundary) * G.boundary)
    return bulk + bdy


def weighted_norm(F: BulkBoundaryFunction, p: PhysicalParams) -> float:
    return float(np.sqrt(np.real(weighted_inner_product(F, F, p))))


def symplectic_form(A: CauchyData, B: CauchyData, p: PhysicalParams) -> float:
    """sigma(A, B) = int (phi_A dpsi_B - dphi_A psi_B) + c * boundary sum.

    Conserved along solutions of the wave equation; antisymmetric.
    """
    _check_same_grid(A.position, B.position)
    _check_same_grid(A.velocity, B.velocity)
    _check_same_grid(A.position, B.velocity)
    _check_grid_geometry(A.position.grid, p)
    w = A.position.grid.quad_weights()
    bulk = np.dot(w, A.position.bulk * B.velocity.bulk - A.velocity.bulk * B.position.bulk)
    bdy = p.c * np.sum(A.position.boundary * B.velocity.boundary
                       - A.velocity.boundary * B.position.boundary)
    return float(bulk + bdy)


def spectral_sobolev_norm(coeffs: np.ndarray, table, r: float) -> float:
    """Sobolev-scale norm ( sum_m (omega_m^2)^r |a_m|^2 )^(1/2) in the mode basis.

    ``table`` is a ModeTable (anything exposing ``omegas()``).  For r < 0 the
    zero mode must be absent (coefficient exactly zero), otherwise the norm is
    not defined.
    """
    coeffs = np.asarray(coeffs)
    omegas = np.asarray(table.omegas())
    if coeffs.shape != omegas.shape:
        raise ValueError(f"got {coeffs.shape[0]} coefficients for {omegas.shape[0]} modes")
    zero = omegas == 0.0
    if r < 0 and np.any(zero & (coeffs != 0)):
        raise ZeroModeError("norm with r < 0 is undefined on the zero mode")
    w2 = omegas**2
    if r == 0:
        scale = np.ones_like(w2)
    else:
        scale = np.zeros_like(w2)
        nz = ~zero
        scale[nz] = w2[nz] ** r
    return float(np.sqrt(np.sum(scale * np.abs(coeffs) ** 2)))


def trace(F: BulkBoundaryFunction) -> np.ndarray:
    """Bulk samples at the boundary node(s), one per boundary component."""
    if F.n_boundary == 2:
        return np.array([F.bulk[0], F.bulk[-1]])
    return np.array([F.bulk[0]])


def compatibility_check(F: BulkBoundaryFunction, tol: float = 1e-9) -> bool:
    """True if the stored boundary values equal the bulk trace within a
    relative tolerance (the domain condition of the spatial operator)."""
    tr = trace(F)
    scale = max(np.max(np.abs(F.bulk)), np.max(np.abs(F.boundary)), 1e-300)
    return bool(np.all(np.abs(tr - F.boundary) <= tol * scale))
