import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_params
from reference_impl import bilinear_ref
from uavbench.terrain import TerrainGrid, TerrainParams, generate_terrain, terrain_height_at


def test_zero_iterations_is_flat():
    grid = generate_terrain(
        TerrainParams(iterations=0, mesh_size=64, initial_elevation=100.0, seed=5)
    )
    assert grid.size == 64
    assert np.all(grid.heights == 100.0)


def test_determinism_bit_identical():
    params = small_params(seed=9)
    a = generate_terrain(params)
    b = generate_terrain(params)
    assert np.array_equal(a.heights, b.heights)


def test_showcase_parameter_combos_differ():
    a = generate_terrain(
        TerrainParams(initial_roughness=-60.0, roughness_variation=300.0, seed=13)
    )
    b = generate_terrain(
        TerrainParams(initial_roughness=-20.0, roughness_variation=300.0, seed=3)
    )
    assert a.heights.shape == (900, 900)
    assert not np.array_equal(a.heights, b.heights)
    assert not np.isclose(a.heights.var(), b.heights.var(), rtol=0.05)


def test_roughness_scales_elevation_spread():
    rough = generate_terrain(small_params(seed=4, r=-80.0, rr=0.0))
    gentle = generate_terrain(small_params(seed=4, r=-10.0, rr=0.0))
    assert rough.heights.std() > 4 * gentle.heights.std()


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        generate_terrain(TerrainParams(mesh_size=1))
    with pytest.raises(ValueError):
        generate_terrain(TerrainParams(iterations=-1))
    with pytest.raises(ValueError):
        generate_terrain(TerrainParams(initial_roughness=float("nan")))


def test_height_at_grid_nodes_exact():
    grid = generate_terrain(small_params(seed=7, mesh=17))
    for iy in (0, 3, 16):
        for ix in (0, 8, 16):
            got = terrain_height_at(grid, ix * grid.cell_length, iy * grid.cell_length)
            assert got == grid.heights[iy, ix]


def test_height_at_cell_midpoint_averages_corners():
    grid = TerrainGrid(size=2, cell_length=1.0, heights=np.array([[0.0, 0.0], [4.0, 4.0]]))
    assert terrain_height_at(grid, 0.5, 0.5) == pytest.approx(2.0)


def test_flat_terrain_interpolates_to_h0():
    grid = generate_terrain(
        TerrainParams(iterations=0, mesh_size=33, initial_elevation=42.5, seed=0)
    )
    rng = np.random.default_rng(0)
    pts = rng.uniform(0.0, grid.extent, size=(50, 2))
    vals = terrain_height_at(grid, pts[:, 0], pts[:, 1])
    assert np.allclose(vals, 42.5, rtol=0, atol=1e-12)


def test_height_query_out_of_bounds():
    grid = generate_terrain(small_params(mesh=17))
    with pytest.raises(ValueError):
        terrain_height_at(grid, -1.0, 3.0)
    with pytest.raises(ValueError):
        terrain_height_at(grid, 3.0, grid.extent + 0.5)


def test_height_matches_scalar_reference():
    grid = generate_terrain(small_params(seed=21, mesh=17))
    heights = grid.heights.tolist()
    rng = np.random.default_rng(3)
    for _ in range(100):
        x, y = rng.uniform(0.0, grid.extent, size=2)
        assert terrain_height_at(grid, x, y) == pytest.approx(
            bilinear_ref(heights, grid.cell_length, grid.size, x, y), rel=1e-12
        )


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    fx=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    fy=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    ix=st.integers(min_value=0, max_value=15),
    iy=st.integers(min_value=0, max_value=15),
)
def test_interpolation_sandwich(seed, fx, fy, ix, iy):
    grid = generate_terrain(small_params(seed=seed, mesh=17, iterations=4))
    x = min((ix + fx), grid.size - 1.0) * grid.cell_length
    y = min((iy + fy), grid.size - 1.0) * grid.cell_length
    corners = grid.heights[iy : iy + 2, ix : ix + 2]
    value = terrain_height_at(grid, x, y)
    assert corners.min() - 1e-9 <= value <= corners.max() + 1e-9
