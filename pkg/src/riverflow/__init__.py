"""riverflow: desk-scale river hydraulics with a steady shallow-water solver,
geostatistical bathymetry inversion, and neural-network surrogate solvers."""

from .fields import (
    BoundaryCondition,
    Grid,
    ScalarField,
    VectorField,
    make_grid,
    read_field,
    rmse_velocity,
    write_field,
)

__all__ = [
    "BoundaryCondition",
    "Grid",
    "ScalarField",
    "VectorField",
    "make_grid",
    "read_field",
    "rmse_velocity",
    "write_field",
]

__version__ = "0.1.0"
