"""Structured river grids, cell-centered fields, and the binary field file format.

Layout convention used everywhere in this package: the x axis runs
along-river (easting-aligned), the y axis across-river (northing-aligned).
Flat arrays are row-major with x fastest, i.e. ``values[j * nx + i]`` is the
cell in column ``i``, row ``j``; ``values.reshape(ny, nx)`` gives the 2-D view.
Cell centers sit at ``x = (i + 0.5) * dx``, ``y = (j + 0.5) * dy``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptFileError, ShapeMismatchError

MAGIC = b"RFSF"
FORMAT_VERSION = 1
KIND_SCALAR = 1
KIND_VECTOR = 2
HEADER_SIZE = 64
# magic, version, kind, nx, ny, dx, dy, 28 reserved zero bytes -> 64 bytes
_HEADER_FMT = "<4sIIIIdd28x"


@dataclass(frozen=True)
class Grid:
    """Rectilinear river-aligned grid of nx-by-ny cells of size dx-by-dy meters."""

    nx: int
    ny: int
    dx: float
    dy: float

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValueError(f"grid must be at least 4x4 cells, got {self.nx}x{self.ny}")
        if not (np.isfinite(self.dx) and np.isfinite(self.dy)):
            raise ValueError("cell sizes must be finite")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError(f"cell sizes must be positive, got dx={self.dx}, dy={self.dy}")

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def length(self) -> float:
        """Along-river domain extent L = nx * dx (m)."""
        return self.nx * self.dx

    @property
    def width(self) -> float:
        """Across-river domain extent W = ny * dy (m)."""
        return self.ny * self.dy

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.dy


def make_grid(nx: int, ny: int, dx: float, dy: float) -> Grid:
    """Build a validated grid (see Grid for the invariants)."""
    return Grid(int(nx), int(ny), float(dx), float(dy))


def _validated_values(grid: Grid, values, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64).ravel()
    if arr.size != grid.n_cells:
        raise ShapeMismatchError(
            f"{name} has {arr.size} values, grid expects {grid.n_cells}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField:
    """One real value per cell (bed elevation in m, speed in m/s, ...)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _validated_values(self.grid, self.values, "values"))

    def as_2d(self) -> np.ndarray:
        """(ny, nx) view, row j / column i."""
        return self.values.reshape(self.grid.ny, self.grid.nx)


@dataclass(frozen=True)
class VectorField:
    """Velocity field with easting (x) and northing (y) components in m/s."""

    grid: Grid
    easting: np.ndarray = field(repr=False)
    northing: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "easting", _validated_values(self.grid, self.easting, "easting"))
        object.__setattr__(self, "northing", _validated_values(self.grid, self.northing, "northing"))

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.easting, self.northing)

    def easting_2d(self) -> np.ndarray:
        return self.easting.reshape(self.grid.ny, self.grid.nx)

    def northing_2d(self) -> np.ndarray:
        return self.northing.reshape(self.grid.ny, self.grid.nx)


@dataclass(frozen=True)
class BoundaryCondition:
    """Inflow discharge Q (m^3/s) and downstream free-surface elevation z_f (m)."""

    discharge_q: float
    surface_zf: float

    def __post_init__(self):
        if not (np.isfinite(self.discharge_q) and np.isfinite(self.surface_zf)):
            raise ValueError("boundary condition values must be finite")
        if self.discharge_q <= 0:
            raise ValueError(f"discharge must be positive, got {self.discharge_q}")


def rmse_velocity(pred: VectorField, reference: VectorField) -> float:
    """RMSE of velocity magnitude: sqrt(mean over cells of (|v_pred| - |v_ref|)^2)."""
    if pred.grid != reference.grid:
        raise ShapeMismatchError(
            f"grids differ: {pred.grid} vs {reference.grid}"
        )
    diff = pred.magnitude() - reference.magnitude()
    return float(np.sqrt(np.mean(diff * diff)))


def write_field(path, fld: ScalarField | VectorField) -> None:
    """Write a field file: 64-byte header + little-endian f32 payload.

    Payload values are quantized to 32-bit floats; reading recovers exactly
    those 32-bit values (lossless at the declared precision).
    """
    if isinstance(fld, ScalarField):
        kind = KIND_SCALAR
        payload = fld.values.astype("<f4").tobytes()
    elif isinstance(fld, VectorField):
        kind = KIND_VECTOR
        payload = fld.easting.astype("<f4").tobytes() + fld.northing.astype("<f4").tobytes()
    else:
        raise TypeError(f"not a field: {type(fld)!r}")
    g = fld.grid
    header = struct.pack(_HEADER_FMT, MAGIC, FORMAT_VERSION, kind, g.nx, g.ny, g.dx, g.dy)
    assert len(header) == HEADER_SIZE
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_field(path) -> ScalarField | VectorField:
    """Read a field file written by write_field; strict about sizes and content."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise CorruptFileError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")
    magic, version, kind, nx, ny, dx, dy = struct.unpack(_HEADER_FMT, raw[:HEADER_SIZE])
    if magic != MAGIC:
        raise CorruptFileError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CorruptFileError(f"{path}: unsupported format version {version}")
    if kind not in (KIND_SCALAR, KIND_VECTOR):
        raise CorruptFileError(f"{path}: unknown field kind {kind}")
    try:
        grid = Grid(nx, ny, dx, dy)
    except ValueError as exc:
        raise CorruptFileError(f"{path}: invalid grid in header: {exc}") from exc
    n = grid.n_cells
    blocks = 1 if kind == KIND_SCALAR else 2
    expected = HEADER_SIZE + 4 * n * blocks
    if len(raw) != expected:
        raise CorruptFileError(
            f"{path}: payload length mismatch, expected {expected} bytes total, got {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).astype(np.float64)
    try:
        if kind == KIND_SCALAR:
            return ScalarField(grid, data)
        return VectorField(grid, data[:n], data[n:])
    except ValueError as exc:
        raise CorruptFileError(f"{path}: invalid payload: {exc}") from exc
