"""Random bathymetry generation: anisotropic Gaussian-kernel random fields with
shore tapering, plus boundary-condition and observation-noise sampling.

All sampling is reproducible: a draw is fully determined by an (seed, stream)
pair, so dataset generation can fan out per-sample streams and stay
order-independent under parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import BoundaryCondition, Grid, ScalarField, VectorField


@dataclass(frozen=True)
class GrfSpec:
    """Gaussian-kernel random field parameters.

    beta is the marginal standard deviation (m); len_x / len_y are the
    along-river and across-river correlation lengths (m); taper_exp is the
    shore-taper exponent p (0 disables tapering).
    """

    beta: float = 1.2
    len_x: float = 115.0
    len_y: float = 29.0
    taper_exp: float = 1.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.beta, self.len_x, self.len_y, self.taper_exp)):
            raise ValueError("GrfSpec values must be finite")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.len_x <= 0 or self.len_y <= 0:
            raise ValueError("correlation lengths must be positive")
        if self.taper_exp < 0:
            raise ValueError(f"taper_exp must be >= 0, got {self.taper_exp}")


@dataclass(frozen=True)
class BcRanges:
    """Uniform sampling box for boundary conditions."""

    q_min: float = 100.0
    q_max: float = 700.0
    zf_min: float = 29.0
    zf_max: float = 34.5

    def __post_init__(self):
        if not (0 < self.q_min <= self.q_max):
            raise ValueError(f"need 0 < q_min <= q_max, got [{self.q_min}, {self.q_max}]")
        if not (self.zf_min <= self.zf_max):
            raise ValueError(f"need zf_min <= zf_max, got [{self.zf_min}, {self.zf_max}]")


@dataclass(frozen=True)
class RngSeed:
    """Deterministic random stream handle: same (seed, stream) -> same draws."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream < 2**64):
            raise ValueError("seed and stream must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((self.seed, self.stream))


def derive_stream(kind: int, index: int, retry: int = 0) -> int:
    """Pack a (purpose, sample index, retry) triple into one stream id.

    kind < 16, index < 2**40, retry < 2**16; collisions are impossible in
    that range, which covers any realistic dataset.
    """
    if not (0 <= kind < 16 and 0 <= index < 2**40 and 0 <= retry < 2**16):
        raise ValueError(f"stream components out of range: {(kind, index, retry)}")
    return kind + 16 * (index + 2**40 * retry)


def kernel_cov(lag_x, lag_y, spec: GrfSpec):
    """Covariance at a coordinate lag: beta^2 * exp(-dx^2/lx^2 - dy^2/ly^2)."""
    lag_x = np.asarray(lag_x, dtype=np.float64)
    lag_y = np.asarray(lag_y, dtype=np.float64)
    out = spec.beta**2 * np.exp(
        -(lag_x * lag_x) / spec.len_x**2 - (lag_y * lag_y) / spec.len_y**2
    )
    return float(out) if out.ndim == 0 else out


def shore_taper(grid: Grid, taper_exp: float) -> ScalarField:
    """Per-cell factor sin(pi * y_c / W)^p: ~0 at the banks, 1 at midstream."""
    y = grid.y_centers() / grid.width
    row = np.sin(np.pi * y) ** taper_exp
    vals = np.tile(row[:, None], (1, grid.nx)).ravel()
    return ScalarField(grid, vals)


@lru_cache(maxsize=8)
def _covariance_factor(spec: GrfSpec, grid: Grid) -> np.ndarray:
    """Dense factor L with L @ L.T equal to the kernel covariance over cell centers.

    Eigendecomposition with eigenvalues clamped at max(lam) * 1e-12; exact for
    desk-scale grids (a few thousand cells), where the dense route is cheap.
    """
    x = grid.x_centers()
    y = grid.y_centers()
    xx, yy = np.meshgrid(x, y)  # (ny, nx), x fastest when raveled
    px = xx.ravel()
    py = yy.ravel()
    cov = kernel_cov(px[:, None] - px[None, :], py[:, None] - py[None, :], spec)
    lam, vec = np.linalg.eigh(cov)
    floor = lam.max() * 1e-12 if lam.size and lam.max() > 0 else 0.0
    lam = np.maximum(lam, floor)
    return vec * np.sqrt(lam)[None, :]


def sample_grf(spec: GrfSpec, grid: Grid, rng: RngSeed) -> ScalarField:
    """One zero-mean draw whose covariance between cells matches kernel_cov."""
    return ScalarField(grid, sample_grf_batch(spec, grid, rng, 1)[0])


def sample_grf_batch(spec: GrfSpec, grid: Grid, rng: RngSeed, count: int) -> np.ndarray:
    """(count, n_cells) array of independent draws from one stream."""
    factor = _covariance_factor(spec, grid)
    z = rng.generator().standard_normal((grid.n_cells, count))
    return (factor @ z).T


def augment_bathymetry(base: ScalarField, spec: GrfSpec, rng: RngSeed) -> ScalarField:
    """base + shore_taper * GRF draw, on the base field's grid."""
    if spec.beta == 0.0:
        return base
    taper = shore_taper(base.grid, spec.taper_exp)
    bump = sample_grf(spec, base.grid, rng)
    return ScalarField(base.grid, base.values + taper.values * bump.values)


def sample_bc(ranges: BcRanges, rng: RngSeed) -> BoundaryCondition:
    """Independent uniform draws: Q first, then z_f."""
    gen = rng.generator()
    q = gen.uniform(ranges.q_min, ranges.q_max)
    zf = gen.uniform(ranges.zf_min, ranges.zf_max)
    return BoundaryCondition(float(q), float(zf))


def add_velocity_noise(vel: VectorField, rng: RngSeed, frac: float = 0.10) -> VectorField:
    """i.i.d. Gaussian noise per component, std = frac * max velocity magnitude.

    A zero field defines sigma = 0 and is returned unchanged. Easting noise is
    drawn before northing noise.
    """
    sigma = frac * float(vel.magnitude().max())
    if sigma == 0.0:
        return vel
    gen = rng.generator()
    n = vel.grid.n_cells
    e = vel.easting + gen.normal(0.0, sigma, n)
    nn = vel.northing + gen.normal(0.0, sigma, n)
    return VectorField(vel.grid, e, nn)
