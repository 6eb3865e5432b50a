"""Built-in experiment geometries: disk pairs and the occluded rectangle.

The rasters are generated analytically (anti-aliased over one pixel) so the
experiments are self-contained and their sharp-interface reference values
can be computed from the same geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .energetics import FidelityData
from .flow import ExperimentConfig, InitMode, PenaltyMode
from .grid import BinaryMask, Grid2D, ScalarField

NEAR_DISK_RADIUS = 0.1
NEAR_DISK_CENTERS = ((0.35, 0.5), (0.65, 0.5))
FAR_DISK_CENTERS = ((0.22, 0.5), (0.78, 0.5))
RECT_LEFT = (0.2, 0.45, 0.35, 0.65)  # x0, x1, y0, y1
RECT_RIGHT = (0.55, 0.8, 0.35, 0.65)
OCCLUSION_STRIP = (0.45, 0.55)
ARTIFACT_RADIUS = 0.03
ARTIFACT_CENTERS = ((0.15, 0.15), (0.85, 0.15), (0.15, 0.85), (0.85, 0.85))

PRESET_NAMES = ("two_disks_near", "two_disks_far", "occluded_rectangle")


def _disk(grid: Grid2D, cx: float, cy: float, r: float) -> np.ndarray:
    """Anti-aliased disk coverage in [0, 1], one-pixel transition band."""
    X, Y = grid.meshgrid()
    dist = np.hypot(X - cx, Y - cy)
    aa = max(grid.hx, grid.hy)
    return np.clip(0.5 + (r - dist) / aa, 0.0, 1.0)


def _rect(grid: Grid2D, x0, x1, y0, y1) -> np.ndarray:
    X, Y = grid.meshgrid()
    aa = max(grid.hx, grid.hy)
    cov_x = np.clip(0.5 + (np.minimum(X - x0, x1 - X)) / aa, 0.0, 1.0)
    cov_y = np.clip(0.5 + (np.minimum(Y - y0, y1 - Y)) / aa, 0.0, 1.0)
    return cov_x * cov_y


def disk_pair_image(grid: Grid2D, centers=NEAR_DISK_CENTERS, r=NEAR_DISK_RADIUS) -> ScalarField:
    vals = np.zeros(grid.shape)
    for cx, cy in centers:
        vals = np.maximum(vals, _disk(grid, cx, cy, r))
    return ScalarField(grid, vals)


def disk_pair_mask(grid: Grid2D, centers=NEAR_DISK_CENTERS, r=NEAR_DISK_RADIUS) -> BinaryMask:
    return BinaryMask(grid, disk_pair_image(grid, centers, r).values > 0.5)


def occluded_rectangle_images(grid: Grid2D) -> tuple[ScalarField, ScalarField]:
    """(g, phi): two rectangles with an occluding zero-confidence strip and
    four small artifact disks."""
    g = np.maximum(_rect(grid, *RECT_LEFT), _rect(grid, *RECT_RIGHT))
    for cx, cy in ARTIFACT_CENTERS:
        g = np.maximum(g, _disk(grid, cx, cy, ARTIFACT_RADIUS))
    X, _ = grid.meshgrid()
    strip = (X >= OCCLUSION_STRIP[0]) & (X <= OCCLUSION_STRIP[1])
    phi = np.ones(grid.shape)
    phi[strip] = 0.0
    g = g.copy()
    g[strip] = 0.0
    return ScalarField(grid, g), ScalarField(grid, phi)


@dataclass
class Preset:
    name: str
    config: ExperimentConfig
    g: ScalarField
    phi: ScalarField

    @property
    def fidelity(self) -> FidelityData:
        return FidelityData(g=self.g, phi=self.phi, delta=self.config.delta)


def make_preset(name: str, nx: int = 152, ny: int = 152) -> Preset:
    grid = Grid2D(nx, ny)
    base = ExperimentConfig(
        nx=nx, ny=ny, penalty=PenaltyMode.CONNECTED, max_steps=200_000
    )
    if name == "two_disks_near":
        g = disk_pair_image(grid, NEAR_DISK_CENTERS)
        phi = ScalarField.constant(grid, 1.0)
        cfg = replace(base, delta=140.0, init=InitMode.ONES_WITH_BOUNDARY_TAPER)
    elif name == "two_disks_far":
        g = disk_pair_image(grid, FAR_DISK_CENTERS)
        phi = ScalarField.constant(grid, 1.0)
        cfg = replace(base, delta=50.0, init=InitMode.ONES_WITH_BOUNDARY_TAPER)
    elif name == "occluded_rectangle":
        g, phi = occluded_rectangle_images(grid)
        cfg = replace(base, delta=140.0, init=InitMode.FROM_IMAGE)
    else:
        raise ValueError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
    return Preset(name=name, config=cfg, g=g, phi=phi)
