import numpy as np
import pytest

from uavbench.instances import Cylinder, Instance, build_suite
from uavbench.terrain import TerrainParams, generate_terrain


def small_params(seed=1, mesh=65, iterations=6, r=-60.0, rr=300.0, h0=100.0):
    return TerrainParams(
        iterations=iterations,
        mesh_size=mesh,
        initial_elevation=h0,
        initial_roughness=r,
        roughness_variation=rr,
        seed=seed,
    )


def flat_terrain(mesh=65, h0=0.0):
    return generate_terrain(
        TerrainParams(iterations=0, mesh_size=mesh, initial_elevation=h0, seed=0)
    )


@pytest.fixture(scope="session")
def flat_instance():
    terrain = flat_terrain()
    inst = Instance(
        id="flat",
        terrain=terrain,
        threats=[],
        start=np.array([5.0, 5.0, 70.0]),
        goal=np.array([59.0, 59.0, 70.0]),
        danger_margin=3.2,
    )
    inst.validate()
    return inst


@pytest.fixture(scope="session")
def threat_instance():
    """Flat terrain with a single cylinder sitting on the direct S-G chord."""
    terrain = flat_terrain()
    inst = Instance(
        id="one-threat",
        terrain=terrain,
        threats=[Cylinder(cx=32.0, cy=32.0, radius=3.0, height=200.0)],
        start=np.array([5.0, 5.0, 70.0]),
        goal=np.array([59.0, 59.0, 70.0]),
        danger_margin=3.2,
    )
    inst.validate()
    return inst


@pytest.fixture(scope="session")
def small_suite():
    params = [small_params(seed=3), small_params(seed=11, r=-20.0)]
    return build_suite(params, densities=(15, 30), seed=42)
