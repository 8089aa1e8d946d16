"""Procedural terrain heightmaps and height queries.

Terrains are square grids of elevations generated by midpoint displacement
(diamond-square family). Per-step displacement amplitude is scaled by the
initial roughness and modulated across the map by a smooth low-frequency
field whose strength is the roughness-variation parameter, so one map can
mix plains with rugged ridges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Resolution of the coarse field that modulates roughness across the map.
_MODULATION_RES = 5
# Per-level amplitude decay of the midpoint displacement.
_AMPLITUDE_DECAY = 0.5


@dataclass(frozen=True)
class TerrainParams:
    """Inputs of the terrain generator; same params always give the same grid."""

    iterations: int = 10
    mesh_size: int = 900
    initial_elevation: float = 100.0
    initial_roughness: float = -60.0
    roughness_variation: float = 300.0
    seed: int = 13

    def validate(self) -> None:
        if self.mesh_size < 2:
            raise ValueError(f"mesh_size must be >= 2, got {self.mesh_size}")
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        for name in ("initial_elevation", "initial_roughness", "roughness_variation"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")


@dataclass
class TerrainGrid:
    """Square heightmap with world-unit scaling.

    ``heights[iy, ix]`` is the elevation at world point
    ``(x, y) = (ix * cell_length, iy * cell_length)``.
    """

    size: int
    cell_length: float
    heights: np.ndarray

    def __post_init__(self) -> None:
        self.heights = np.asarray(self.heights, dtype=np.float64)
        if self.heights.shape != (self.size, self.size):
            raise ValueError(
                f"heights must be {self.size}x{self.size}, got {self.heights.shape}"
            )
        if not np.all(np.isfinite(self.heights)):
            raise ValueError("heights must all be finite")
        if not (self.cell_length > 0 and math.isfinite(self.cell_length)):
            raise ValueError(f"cell_length must be positive, got {self.cell_length}")

    @property
    def extent(self) -> float:
        """World length of each side (grid nodes span [0, extent])."""
        return (self.size - 1) * self.cell_length


def _bilinear_upsample(coarse: np.ndarray, size: int) -> np.ndarray:
    """Stretch a small square field to ``size`` points per side."""
    m = coarse.shape[0]
    if size == 1:
        return np.full((1, 1), coarse[0, 0])
    pos = np.linspace(0.0, m - 1.0, size)
    i0 = np.clip(np.floor(pos).astype(int), 0, m - 2)
    frac = pos - i0
    rows = coarse[i0, :] * (1.0 - frac)[:, None] + coarse[i0 + 1, :] * frac[:, None]
    out = rows[:, i0] * (1.0 - frac)[None, :] + rows[:, i0 + 1] * frac[None, :]
    return out


def generate_terrain(params: TerrainParams) -> TerrainGrid:
    """Generate a heightmap; pure function of ``params`` (bit-identical reruns).

    The grid is built on the smallest (2**k + 1) lattice covering
    ``mesh_size`` and cropped. Displacement noise is only injected on the
    first ``iterations`` refinement levels; deeper levels interpolate
    noiselessly, so ``iterations=0`` yields a flat map at the initial
    elevation and larger values add progressively finer detail.
    """
    params.validate()
    rng = np.random.default_rng(params.seed)

    levels = max(0, math.ceil(math.log2(params.mesh_size - 1))) if params.mesh_size > 2 else 0
    base = 2**levels + 1
    if base < params.mesh_size:  # guard against log rounding
        levels += 1
        base = 2**levels + 1

    h = np.full((base, base), float(params.initial_elevation))
    modulation = _bilinear_upsample(
        rng.standard_normal((_MODULATION_RES, _MODULATION_RES)), base
    )
    r0 = params.initial_roughness
    rr = params.roughness_variation

    step = base - 1
    for level in range(1, levels + 1):
        half = step // 2
        noisy = level <= params.iterations
        amp = _AMPLITUDE_DECAY ** (level - 1)

        # Diamond step: square centers from their four corners.
        tl = h[:-1:step, :-1:step]
        tr = h[:-1:step, step::step]
        bl = h[step::step, :-1:step]
        br = h[step::step, step::step]
        centers = 0.25 * (tl + tr + bl + br)
        if noisy:
            sigma = amp * (r0 + rr * modulation[half::step, half::step])
            centers = centers + rng.standard_normal(centers.shape) * sigma
        h[half::step, half::step] = centers

        # Square step: edge midpoints from their (up to four) axial neighbours.
        padded = np.full((base + 2 * half, base + 2 * half), np.nan)
        padded[half:-half, half:-half] = h
        lattices = (
            (np.arange(half, base, step), np.arange(0, base, step)),
            (np.arange(0, base, step), np.arange(half, base, step)),
        )
        for rows, cols in lattices:
            r_grid, c_grid = np.ix_(rows, cols)
            rp, cp = r_grid + half, c_grid + half
            neighbours = np.stack(
                [
                    padded[rp - half, cp],
                    padded[rp + half, cp],
                    padded[rp, cp - half],
                    padded[rp, cp + half],
                ]
            )
            vals = np.nanmean(neighbours, axis=0)
            if noisy:
                sigma = amp * (r0 + rr * modulation[r_grid, c_grid])
                vals = vals + rng.standard_normal(vals.shape) * sigma
            h[r_grid, c_grid] = vals
        step = half

    cropped = np.ascontiguousarray(h[: params.mesh_size, : params.mesh_size])
    return TerrainGrid(size=params.mesh_size, cell_length=1.0, heights=cropped)


def terrain_height_at(terrain: TerrainGrid, x, y):
    """Bilinear interpolation of the heightmap at world (x, y).

    Exact at grid nodes. Raises ValueError on out-of-bounds queries;
    callers are expected to clamp decoded waypoints first.
    Accepts scalars or equally shaped arrays.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    extent = terrain.extent
    tol = 1e-9 * max(1.0, extent)
    if np.any(x < -tol) or np.any(x > extent + tol) or np.any(y < -tol) or np.any(y > extent + tol):
        raise ValueError(f"query outside terrain bounds [0, {extent}]")

    gx = np.clip(x / terrain.cell_length, 0.0, terrain.size - 1.0)
    gy = np.clip(y / terrain.cell_length, 0.0, terrain.size - 1.0)
    ix = np.clip(np.floor(gx).astype(int), 0, terrain.size - 2)
    iy = np.clip(np.floor(gy).astype(int), 0, terrain.size - 2)
    fx = gx - ix
    fy = gy - iy

    hgt = terrain.heights
    h00 = hgt[iy, ix]
    h01 = hgt[iy, ix + 1]
    h10 = hgt[iy + 1, ix]
    h11 = hgt[iy + 1, ix + 1]
    value = (
        h00 * (1.0 - fx) * (1.0 - fy)
        + h01 * fx * (1.0 - fy)
        + h10 * (1.0 - fx) * fy
        + h11 * fx * fy
    )
    if value.ndim == 0:
        return float(value)
    return value
