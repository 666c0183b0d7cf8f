"""Time evolution: exact spectral propagator, FDTD with dynamical boundary
nodes, energy and causality diagnostics, and the exact reflection solution.

The FDTD scheme is leapfrog throughout.  Interior nodes integrate the bulk
wave equation; each endpoint node is the boundary degree of freedom itself
(the bulk trace and the boundary field are a single unknown) and integrates

    d2/dt2 phi| = -mu^2 phi| + c^-1 dperp phi,

with the inward normal derivative from the second-order one-sided 3-point
stencil.  A first-order stencil degrades global convergence and is not used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .core import BulkBoundaryFunction, CauchyData, GeometryError, Grid1D, \
    PhysicalParams, Strip
from .modes import ModeTable, project, synthesize


class CflError(ValueError):
    """Time step violates the stability bound dt <= h."""


# ---------------------------------------------------------------------------
# spectral propagator

@dataclass
class SpectralState:
    """Mode coefficients of position (a) and velocity (b) at time t."""

    a: np.ndarray
    b: np.ndarray
    table: ModeTable
    t: float = 0.0
    k: float = 0.0  # transverse momentum, enters through omega^2

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.a.shape != (len(self.table),) or self.b.shape != (len(self.table),):
            raise ValueError("coefficient lengths must equal the table length")

    def omegas(self) -> np.ndarray:
        return self.table.omegas(self.k)


def spectral_evolve(s: SpectralState, t: float) -> SpectralState:
    """Advance by duration t: per mode a -> a cos wt + b sin(wt)/w,
    b -> -a w sin wt + b cos wt; the zero mode drifts linearly."""
    w = s.omegas()
    zero = w == 0.0
    wt = w * t
    cos = np.cos(wt)
    sin = np.sin(wt)
    wsafe = np.where(zero, 1.0, w)
    sinc = np.where(zero, t, sin / wsafe)
    return SpectralState(a=s.a * cos + s.b * sinc,
                         b=-s.a * np.where(zero, 0.0, w * sin) + s.b * cos,
                         table=s.table, t=s.t + t, k=s.k)


def spectral_state_from_data(data: CauchyData, table: ModeTable, t: float = 0.0,
                             k: float = 0.0) -> SpectralState:
    return SpectralState(a=project(data.position, table), b=project(data.velocity, table),
                         table=table, t=t, k=k)


def spectral_symplectic(A: SpectralState, B: SpectralState) -> float:
    """Symplectic form in the mode representation, sum_m (a^A b^B - b^A a^B);
    equals the quadrature form on the synthesized states up to quadrature
    error, and is conserved to rounding under spectral evolution."""
    if A.table is not B.table and len(A.table) != len(B.table):
        raise ValueError("states live on different mode tables")
    return float(np.sum(A.a * B.b - A.b * B.a))


def synthesize_state(s: SpectralState, grid: Grid1D) -> CauchyData:
    return CauchyData(position=synthesize(s.a, s.table, grid),
                      velocity=synthesize(s.b, s.table, grid))


# ---------------------------------------------------------------------------
# FDTD

@dataclass
class FdtdState:
    """Leapfrog levels (phi_prev, phi) at times (t - dt, t); endpoint samples
    are the boundary degrees of freedom."""

    grid: Grid1D
    p: PhysicalParams
    phi: np.ndarray
    phi_prev: np.ndarray
    t: float
    dt: float

    @property
    def bdy(self) -> np.ndarray:
        return np.array([self.phi[0], self.phi[-1]])

    @property
    def bdy_prev(self) -> np.ndarray:
        return np.array([self.phi_prev[0], self.phi_prev[-1]])


def _acceleration(phi: np.ndarray, h: float, p: PhysicalParams) -> np.ndarray:
    acc = np.empty_like(phi)
    acc[1:-1] = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / h**2 - p.mu**2 * phi[1:-1]
    cinv = 1.0 / p.c
    dperp_lo = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h)
    dperp_hi = -(3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / (2.0 * h)
    acc[0] = -p.mu**2 * phi[0] + cinv * dperp_lo
    acc[-1] = -p.mu**2 * phi[-1] + cinv * dperp_hi
    return acc


def make_fdtd_state(data: CauchyData, p: PhysicalParams, cfl: float = 0.5,
                    dt: float | None = None) -> FdtdState:
    """Initialize leapfrog levels from Cauchy data with a second-order Taylor
    back-step.  The bulk endpoint samples are overwritten by the boundary
    values (they are one unknown)."""
    if not isinstance(p.geometry, Strip):
        raise GeometryError("the FDTD engine integrates the strip geometry")
    grid = data.position.grid
    h = grid.h
    if dt is None:
        dt = cfl * h
    if dt > h * (1 + 1e-12):
        raise CflError(f"dt={dt} exceeds the stability bound h={h}")
    phi0 = np.array(data.position.bulk, dtype=float)
    v0 = np.array(data.velocity.bulk, dtype=float)
    phi0[0], phi0[-1] = data.position.boundary
    v0[0], v0[-1] = data.velocity.boundary
    phi_prev = phi0 - dt * v0 + 0.5 * dt**2 * _acceleration(phi0, h, p)
    return FdtdState(grid=grid, p=p, phi=phi0, phi_prev=phi_prev, t=0.0, dt=dt)


def fdtd_step(s: FdtdState) -> FdtdState:
    phi_next = 2.0 * s.phi - s.phi_prev + s.dt**2 * _acceleration(s.phi, s.grid.h, s.p)
    return FdtdState(grid=s.grid, p=s.p, phi=phi_next, phi_prev=s.phi,
                     t=s.t + s.dt, dt=s.dt)


def fdtd_run(s: FdtdState, n_steps: int) -> FdtdState:
    """Advance n_steps with buffer reuse (equivalent to iterating fdtd_step)."""
    h, p, dt = s.grid.h, s.p, s.dt
    prev = s.phi_prev.copy()
    cur = s.phi.copy()
    for _ in range(n_steps):
        acc = _acceleration(cur, h, p)
        prev *= -1.0
        prev += 2.0 * cur
        prev += dt**2 * acc
        prev, cur = cur, prev
    return FdtdState(grid=s.grid, p=s.p, phi=cur, phi_prev=prev,
                     t=s.t + n_steps * dt, dt=dt)


# ---------------------------------------------------------------------------
# energy

@dataclass
class EnergyReport:
    bulk: float
    boundary: float
    total: float
    bulk_density: np.ndarray | None = None  # per-node energy density


def _fdtd_fields(s: FdtdState) -> tuple[np.ndarray, np.ndarray]:
    """(phi, dphi/dt) at the current level; velocity is the centered
    difference through an internal forward step."""
    phi_next = fdtd_step(s).phi
    v = (phi_next - s.phi_prev) / (2.0 * s.dt)
    return s.phi, v


def energy(state: SpectralState | FdtdState) -> EnergyReport:
    """Field energy split into bulk and boundary parts.

    Spectral states use the exact closed form sum (b^2 + w^2 a^2) / 2 and the
    exact boundary values from the coefficients; FDTD states use quadrature.
    """
    if isinstance(state, SpectralState):
        w = state.omegas()
        total = 0.5 * float(np.sum(state.b**2 + w**2 * state.a**2))
        bvals = state.table.boundary_values()
        pos_b = state.a @ bvals
        vel_b = state.b @ bvals
        p = state.table.params
        bdy = 0.5 * p.c * float(np.sum(vel_b**2 + p.mu**2 * pos_b**2))
        return EnergyReport(bulk=total - bdy, boundary=bdy, total=total)
    phi, v = _fdtd_fields(state)
    p = state.p
    z = state.grid.nodes
    phi_z = np.gradient(phi, z)
    dens = 0.5 * (v**2 + phi_z**2 + p.mu**2 * phi**2)
    bulk = float(np.trapezoid(dens, z))
    bdy = 0.5 * p.c * float((v[0]**2 + v[-1]**2) + p.mu**2 * (phi[0]**2 + phi[-1]**2))
    return EnergyReport(bulk=bulk, boundary=bdy, total=bulk + bdy, bulk_density=dens)


def energy_in_region(state: FdtdState, z_lo: float, z_hi: float) -> float:
    """Bulk energy in [z_lo, z_hi] (node-snapped trapezoid) plus the weighted
    boundary terms of any boundary component inside the region."""
    rep = energy(state)
    z = state.grid.nodes
    mask = (z >= z_lo - 1e-12) & (z <= z_hi + 1e-12)
    if np.count_nonzero(mask) < 2:
        bulk = 0.0
    else:
        bulk = float(np.trapezoid(rep.bulk_density[mask], z[mask]))
    phi, v = _fdtd_fields(state)
    p = state.p
    bdy = 0.0
    if z[0] >= z_lo - 1e-12 and z[0] <= z_hi + 1e-12:
        bdy += 0.5 * p.c * (v[0]**2 + p.mu**2 * phi[0]**2)
    if z[-1] >= z_lo - 1e-12 and z[-1] <= z_hi + 1e-12:
        bdy += 0.5 * p.c * (v[-1]**2 + p.mu**2 * phi[-1]**2)
    return bulk + bdy


# ---------------------------------------------------------------------------
# causality diagnostics

@dataclass
class CausalityReport:
    t: float
    support: tuple[float, float]        # initial data support [z0-r, z0+r]
    cone: tuple[float, float]           # discrete light cone incl. halo
    max_outside: float
    energy_outside_fraction: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_outside < self.tol


def data_support(data: CauchyData, threshold: float = 0.0) -> tuple[float, float]:
    z = data.position.grid.nodes
    amp = np.maximum(np.abs(data.position.bulk), np.abs(data.velocity.bulk))
    live = amp > threshold * max(float(np.max(amp)), 1e-300)
    if not np.any(live):
        return (z[0], z[0])
    idx = np.nonzero(live)[0]
    return (float(z[idx[0]]), float(z[idx[-1]]))


def causality_probe(data: CauchyData, p: PhysicalParams, t: float,
                    tol: float = 1e-8, cfl: float = 0.5,
                    halo_cells: int = 2) -> CausalityReport:
    """Evolve compactly supported data and measure leakage outside the
    discrete light cone (N steps widen the support by at most N cells; the
    halo covers the stencil reach of the Taylor back-step)."""
    state = make_fdtd_state(data, p, cfl=cfl)
    n_steps = int(np.ceil(t / state.dt))
    state = fdtd_run(state, n_steps)
    z_lo, z_hi = data_support(data)
    h = state.grid.h
    width = (n_steps + halo_cells) * h
    cone = (z_lo - width, z_hi + width)
    z = state.grid.nodes
    outside = (z < cone[0]) | (z > cone[1])
    max_out = float(np.max(np.abs(state.phi[outside]))) if np.any(outside) else 0.0
    rep = energy(state)
    e_out = 0.0
    if np.count_nonzero(outside) >= 2:
        lo_part = z < cone[0]
        hi_part = z > cone[1]
        for part in (lo_part, hi_part):
            if np.count_nonzero(part) >= 2:
                e_out += float(np.trapezoid(rep.bulk_density[part], z[part]))
    phi, v = _fdtd_fields(state)
    if z[0] < cone[0]:
        e_out += 0.5 * p.c * (v[0]**2 + p.mu**2 * phi[0]**2)
    if z[-1] > cone[1]:
        e_out += 0.5 * p.c * (v[-1]**2 + p.mu**2 * phi[-1]**2)
    frac = e_out / rep.total if rep.total > 0 else 0.0
    return CausalityReport(t=state.t, support=(z_lo, z_hi), cone=cone,
                           max_outside=max_out, energy_outside_fraction=frac, tol=tol)


# ---------------------------------------------------------------------------
# exact reflection solution (half-space, mu = 0), delta pulse mollified by a
# unit-mass Gaussian of width eps

def _gauss(u, eps):
    return np.exp(-u**2 / (2 * eps**2)) / (eps * np.sqrt(2 * np.pi))


def _exp_tail(u, eps, c):
    """(E * G_eps)(u) with E(u) = exp(-u/c) theta(u), in log space to avoid
    overflow of exp(-u/c) at large negative u."""
    u = np.asarray(u, dtype=float)
    return np.exp(eps**2 / (2 * c**2) - u / c + log_ndtr(u / eps - eps / c))


def explicit_solution(t, z, eps: float, c: float):
    """Mollified reflection solution: incoming Gaussian pulse G(t+z), the
    sign-flipped reflection -G(t-z), and the boundary re-emission tail
    (2/c) exp(-(t-z)/c) theta(t-z) mollified in time.

    Returns (phi(z), phi_bdy); the trace phi(t, 0) equals phi_bdy exactly.
    """
    z = np.asarray(z, dtype=float)
    phi = _gauss(t + z, eps) - _gauss(t - z, eps) + (2.0 / c) * _exp_tail(t - z, eps, c)
    phi_bdy = float((2.0 / c) * _exp_tail(np.asarray(t), eps, c))
    return phi, phi_bdy


def explicit_solution_dt(t, z, eps: float, c: float):
    """Time derivative of explicit_solution (for building Cauchy data)."""
    z = np.asarray(z, dtype=float)

    def dg(u):
        return -u / eps**2 * _gauss(u, eps)

    tail = _exp_tail(t - z, eps, c)
    dphi = dg(t + z) - dg(t - z) + (2.0 / c) * (_gauss(t - z, eps) - tail / c)
    dbdy = float((2.0 / c) * (_gauss(np.asarray(t), eps) - _exp_tail(np.asarray(t), eps, c) / c))
    return dphi, dbdy


def reflection_cauchy_data(grid: Grid1D, t0: float, eps: float, c: float) -> CauchyData:
    """Cauchy data of the exact solution at time t0, mapped onto a strip grid
    whose left endpoint is the physical boundary (z' = z - z_min)."""
    zp = grid.nodes - grid.z_min
    pos, _ = explicit_solution(t0, zp, eps, c)
    vel, _ = explicit_solution_dt(t0, zp, eps, c)
    position = BulkBoundaryFunction(grid=grid, bulk=pos, boundary=np.array([pos[0], pos[-1]]))
    velocity = BulkBoundaryFunction(grid=grid, bulk=vel, boundary=np.array([vel[0], vel[-1]]))
    return CauchyData(position=position, velocity=velocity)
