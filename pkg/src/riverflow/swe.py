"""Reference steady-state 2-D depth-averaged shallow-water solver.

Produces the ground-truth velocity fields used for training data and serves
as the wall-clock baseline for the surrogate speed benchmark. Steady states
are reached by explicit pseudo-time marching of a well-balanced MUSCL /
Rusanov finite-volume scheme with semi-implicit Manning friction (see
_swe_kernels for the discretization).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _swe_kernels
from .errors import ConvergenceError, DryDomainError, NumericalBlowupError
from .fields import BoundaryCondition, Grid, ScalarField, VectorField, _validated_values


@dataclass(frozen=True)
class SolverParams:
    """Numerical parameters of the pseudo-time solver."""

    manning_n: float = 0.03
    gravity_g: float = 9.81
    cfl: float = 0.45
    dry_tol: float = 1e-4
    resid_tol: float = 1e-6
    max_steps: int = 200_000

    def __post_init__(self):
        if not (0 < self.cfl <= 0.9):
            raise ValueError(f"cfl must be in (0, 0.9], got {self.cfl}")
        if self.dry_tol <= 0 or self.resid_tol <= 0 or self.manning_n <= 0:
            raise ValueError("dry_tol, resid_tol and manning_n must be positive")
        if self.gravity_g <= 0:
            raise ValueError("gravity must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class FlowState:
    """Per-cell water depth (m) and depth-averaged velocity (m/s).

    Cells with depth below dry_tol are dry and carry zero velocity.
    """

    grid: Grid
    depth_h: np.ndarray = field(repr=False)
    vel_u: np.ndarray = field(repr=False)
    vel_v: np.ndarray = field(repr=False)
    dry_tol: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "depth_h", _validated_values(self.grid, self.depth_h, "depth_h"))
        object.__setattr__(self, "vel_u", _validated_values(self.grid, self.vel_u, "vel_u"))
        object.__setattr__(self, "vel_v", _validated_values(self.grid, self.vel_v, "vel_v"))
        if np.any(self.depth_h < 0):
            raise ValueError("depths must be non-negative")
        dry = self.depth_h < self.dry_tol
        if np.any(self.vel_u[dry] != 0.0) or np.any(self.vel_v[dry] != 0.0):
            raise ValueError("dry cells must have zero velocity")

    def velocity(self) -> VectorField:
        return VectorField(self.grid, self.vel_u, self.vel_v)

    def wet_mask(self) -> np.ndarray:
        return self.depth_h >= self.dry_tol

    def stage(self, bathy: ScalarField) -> np.ndarray:
        """Free-surface elevation z_b + h (flat array)."""
        return bathy.values + self.depth_h


def _conserved_from_state(state: FlowState):
    ny, nx = state.grid.ny, state.grid.nx
    h = state.depth_h.reshape(ny, nx).copy()
    hu = (state.depth_h * state.vel_u).reshape(ny, nx).copy()
    hv = (state.depth_h * state.vel_v).reshape(ny, nx).copy()
    return h, hu, hv


def _state_from_conserved(grid: Grid, h, hu, hv, dry_tol: float) -> FlowState:
    hf = h.ravel()
    wet = hf > dry_tol
    u = np.zeros_like(hf)
    v = np.zeros_like(hf)
    u[wet] = hu.ravel()[wet] / hf[wet]
    v[wet] = hv.ravel()[wet] / hf[wet]
    return FlowState(grid, hf, u, v, dry_tol=dry_tol)


def initial_state(bathy: ScalarField, bc: BoundaryCondition, params: SolverParams) -> FlowState:
    """Starting guess: flat stage at z_f, per-column conveyance-weighted velocity.

    Starting from a discharge-consistent velocity field removes the slow
    spin-up transient and roughly halves the iterations to steady state.
    """
    grid = bathy.grid
    z = bathy.as_2d()
    h0 = np.maximum(bc.surface_zf - z, 0.0)
    wet = h0 > params.dry_tol
    if not wet.any():
        raise DryDomainError("free surface lies below the bed everywhere")
    u0 = np.zeros_like(h0)
    conv = np.where(wet, h0 ** (5.0 / 3.0), 0.0)
    denom = conv.sum(axis=0) * grid.dy  # per-column conveyance
    for i in range(grid.nx):
        if denom[i] > 0:
            u0[:, i] = bc.discharge_q * np.where(wet[:, i], h0[:, i] ** (2.0 / 3.0), 0.0) / denom[i]
    # keep the guess subcritical even in nearly-dry columns
    cap = 0.8 * np.sqrt(params.gravity_g * np.maximum(h0, params.dry_tol))
    u0 = np.minimum(u0, cap)
    u0[~wet] = 0.0
    return FlowState(grid, h0.ravel(), u0.ravel(), np.zeros(grid.n_cells), dry_tol=params.dry_tol)


def step_pseudo_time(
    state: FlowState,
    bathy: ScalarField,
    bc: BoundaryCondition,
    params: SolverParams = SolverParams(),
) -> tuple[FlowState, float]:
    """One explicit update with dt = cfl * min(dx, dy) / max wave speed.

    Returns the new state and the normalized steady-state residual of the
    step (max cell rate of change over characteristic rate scales).
    """
    if bathy.grid != state.grid:
        raise ValueError("bathymetry and state grids differ")
    h, hu, hv = _conserved_from_state(state)
    if not np.any(h > params.dry_tol):
        raise DryDomainError("no wet cells")
    z = np.ascontiguousarray(bathy.as_2d())
    h1, hu1, hv1, _dt, resid, ok = _swe_kernels.swe_step(
        h, hu, hv, z, bc.discharge_q, bc.surface_zf, state.grid.dx, state.grid.dy,
        params.gravity_g, params.manning_n, params.cfl, params.dry_tol,
    )
    if not ok:
        raise NumericalBlowupError("non-finite value after pseudo-time step")
    return _state_from_conserved(state.grid, h1, hu1, hv1, params.dry_tol), float(resid)


def solve_steady(
    bathy: ScalarField,
    bc: BoundaryCondition,
    params: SolverParams = SolverParams(),
) -> FlowState:
    """March to steady state and verify the boundary-condition contracts.

    Raises ConvergenceError if the residual tolerance is not met within
    max_steps, or if the converged solution fails the discharge / outflow
    stage checks; NumericalBlowupError on non-finite values.
    """
    grid = bathy.grid
    z = np.ascontiguousarray(bathy.as_2d())
    if bc.surface_zf <= z[:, -1].min():
        raise ValueError(
            f"outflow stage {bc.surface_zf} must exceed the minimum outflow-boundary "
            f"bed elevation {z[:, -1].min():.3f}"
        )
    state0 = initial_state(bathy, bc, params)
    h, hu, hv = _conserved_from_state(state0)

    resid = np.inf
    steps = 0
    for steps in range(1, params.max_steps + 1):
        h, hu, hv, _dt, resid, ok = _swe_kernels.swe_step(
            h, hu, hv, z, bc.discharge_q, bc.surface_zf, grid.dx, grid.dy,
            params.gravity_g, params.manning_n, params.cfl, params.dry_tol,
        )
        if not ok:
            raise NumericalBlowupError(f"non-finite value at step {steps}")
        if resid <= params.resid_tol:
            break
    else:
        raise ConvergenceError(
            f"not converged after {params.max_steps} steps, residual {resid:.3e}",
            residual=float(resid), steps=params.max_steps,
        )
    if not np.any(h > params.dry_tol):
        raise DryDomainError("domain dried out during iteration")

    state = _state_from_conserved(grid, h, hu, hv, params.dry_tol)
    _verify_steady_contracts(state, bathy, bc, params, steps, float(resid))
    return state


def _verify_steady_contracts(state, bathy, bc, params, steps, resid):
    grid = state.grid
    h2 = state.depth_h.reshape(grid.ny, grid.nx)

    # discharge passes every fully wet cross-section within 0.5%
    wet_cols = np.where((h2 > params.dry_tol).all(axis=0))[0]
    for i in wet_cols:
        flux = cross_section_flux(state, int(i))
        err = abs(flux - bc.discharge_q) / bc.discharge_q
        if err > 0.005:
            raise ConvergenceError(
                f"cross-section flux at column {i} is {flux:.4f} m^3/s, "
                f"off the prescribed {bc.discharge_q:.4f} by {err:.2%}",
                residual=resid, steps=steps,
            )

    # free surface at the outflow face matches z_f within 1 mm
    eta = state.stage(bathy).reshape(grid.ny, grid.nx)
    wet_rows = (h2[:, -1] > params.dry_tol) & (h2[:, -2] > params.dry_tol)
    if wet_rows.any():
        face_stage = 1.5 * eta[wet_rows, -1] - 0.5 * eta[wet_rows, -2]
        weights = h2[wet_rows, -1]
        mean_face = float(np.sum(face_stage * weights) / np.sum(weights))
        if abs(mean_face - bc.surface_zf) > 1e-3:
            raise ConvergenceError(
                f"outflow stage {mean_face:.5f} differs from z_f={bc.surface_zf} "
                f"by more than 1 mm",
                residual=resid, steps=steps,
            )


def cross_section_flux(state: FlowState, i: int) -> float:
    """Discharge through column i: sum over rows of h * u * dy (m^3/s)."""
    grid = state.grid
    if not (0 <= i < grid.nx):
        raise IndexError(f"column {i} out of range [0, {grid.nx})")
    h = state.depth_h.reshape(grid.ny, grid.nx)[:, i]
    u = state.vel_u.reshape(grid.ny, grid.nx)[:, i]
    return float(np.sum(h * u) * grid.dy)
