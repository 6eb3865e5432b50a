"""Uniform node-centered grids on the unit square, scalar fields, stencils, quadrature.

The domain is always [0,1] x [0,1]; nodes sit at (ix*hx, iy*hy) with
hx = 1/(nx-1), hy = 1/(ny-1).  Field values are stored as (ny, nx) arrays,
so ``values[iy, ix]`` is the node at x = ix*hx, y = iy*hy.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class BoundaryMode(Enum):
    DIRICHLET0 = "dirichlet0"
    NEUMANN = "neumann"


class DimensionMismatchError(ValueError):
    """Two fields (or a field and an expected grid) do not share dimensions."""


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid must be at least 3x3, got {self.nx}x{self.ny}")

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny - 1)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def num_nodes(self) -> int:
        return self.nx * self.ny

    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx)

    def y(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ny)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) coordinate arrays of shape (ny, nx)."""
        return np.meshgrid(self.x(), self.y())

    def node_weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights, shape (ny, nx).

        Interior weight hx*hy, halved on each boundary edge (quartered at
        corners); the weights sum to 1 (the domain area).
        """
        wx = np.full(self.nx, self.hx)
        wx[0] = wx[-1] = 0.5 * self.hx
        wy = np.full(self.ny, self.hy)
        wy[0] = wy[-1] = 0.5 * self.hy
        return np.outer(wy, wx)


@dataclass
class ScalarField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise DimensionMismatchError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    @classmethod
    def constant(cls, grid: Grid2D, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))


@dataclass
class BinaryMask:
    grid: Grid2D
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.shape != self.grid.shape:
            raise DimensionMismatchError(
                f"mask shape {self.bits.shape} does not match grid {self.grid.shape}"
            )

    def to_field(self) -> ScalarField:
        return ScalarField(self.grid, self.bits.astype(np.float64))


def clamp01(u: ScalarField) -> ScalarField:
    return ScalarField(u.grid, np.clip(u.values, 0.0, 1.0))


def _padded(values: np.ndarray, bc: BoundaryMode) -> np.ndarray:
    if bc is BoundaryMode.DIRICHLET0:
        return np.pad(values, 1, mode="constant", constant_values=0.0)
    # Neumann: ghost mirrors the first interior node across the boundary node,
    # which makes the normal derivative vanish at the boundary.
    return np.pad(values, 1, mode="reflect")


def laplacian(u: ScalarField, bc: BoundaryMode) -> ScalarField:
    """5-point Laplacian with ghost nodes chosen by the boundary mode."""
    g = u.grid
    p = _padded(u.values, bc)
    lap = (p[1:-1, 2:] - 2.0 * p[1:-1, 1:-1] + p[1:-1, :-2]) / g.hx**2 + (
        p[2:, 1:-1] - 2.0 * p[1:-1, 1:-1] + p[:-2, 1:-1]
    ) / g.hy**2
    return ScalarField(g, lap)


def gradient_centered(u: ScalarField, bc: BoundaryMode) -> tuple[np.ndarray, np.ndarray]:
    """(du/dx, du/dy) by centered differences.

    Neumann uses one-sided differences on the boundary; Dirichlet uses
    centered differences against zero ghost values.
    """
    g = u.grid
    if bc is BoundaryMode.NEUMANN:
        uy, ux = np.gradient(u.values, g.hy, g.hx)
        return ux, uy
    p = _padded(u.values, bc)
    ux = (p[1:-1, 2:] - p[1:-1, :-2]) / (2.0 * g.hx)
    uy = (p[2:, 1:-1] - p[:-2, 1:-1]) / (2.0 * g.hy)
    return ux, uy


def integrate(f: ScalarField) -> float:
    """Trapezoidal quadrature over the unit square; exact for bilinear fields."""
    return float(np.sum(f.values * f.grid.node_weights()))
