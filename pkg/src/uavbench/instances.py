"""Benchmark instances: terrain plus cylindrical threats, start/goal points,
and the cost parameters. Includes the curated terrain parameter list used to
build the default 56-instance suite (28 terrains x 2 threat densities), and
JSON (de)serialization of single instances and suite manifests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .terrain import TerrainGrid, TerrainParams, generate_terrain, terrain_height_at


class PlacementError(RuntimeError):
    """Raised when threats or endpoints cannot be placed within bounds."""


class InstanceParseError(ValueError):
    """Raised on malformed instance files; message names the offending field."""


@dataclass(frozen=True)
class Cylinder:
    """Vertical cylindrical threat: horizontal disc center, radius, and the
    height of its top above the ground elevation at the center."""

    cx: float
    cy: float
    radius: float
    height: float

    def validate(self) -> None:
        if not (self.radius > 0):
            raise ValueError(f"cylinder radius must be positive, got {self.radius}")
        if not (self.height > 0):
            raise ValueError(f"cylinder height must be positive, got {self.height}")
        for name in ("cx", "cy", "radius", "height"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"cylinder {name} must be finite")


@dataclass
class Instance:
    """One benchmark problem: environment, threats, endpoints, cost parameters."""

    id: str
    terrain: TerrainGrid
    threats: list[Cylinder]
    start: np.ndarray
    goal: np.ndarray
    h_min: float = 20.0
    h_max: float = 120.0
    uav_diameter: float = 1.0
    danger_margin: float = 45.0
    j_pen: float = 1.0e4
    weights: tuple[float, float, float, float] = (5.0, 1.0, 10.0, 1.0)
    beta_turn: float = 1.0
    beta_climb: float = 1.0
    density_class: str = "low"

    def __post_init__(self) -> None:
        self.start = np.asarray(self.start, dtype=np.float64)
        self.goal = np.asarray(self.goal, dtype=np.float64)
        self.weights = tuple(float(w) for w in self.weights)

    def validate(self) -> None:
        if not self.h_min < self.h_max:
            raise ValueError(f"h_min ({self.h_min}) must be < h_max ({self.h_max})")
        if not self.j_pen > 0:
            raise ValueError(f"j_pen must be positive, got {self.j_pen}")
        if len(self.weights) != 4 or any(w < 0 for w in self.weights):
            raise ValueError(f"weights must be 4 non-negative reals, got {self.weights}")
        if self.density_class not in ("low", "high"):
            raise ValueError(f"density_class must be 'low' or 'high', got {self.density_class!r}")
        if self.start.shape != (3,) or self.goal.shape != (3,):
            raise ValueError("start and goal must be 3-D points")
        for cyl in self.threats:
            cyl.validate()
        for label, point in (("start", self.start), ("goal", self.goal)):
            for cyl in self.threats:
                clearance = self.danger_margin + self.uav_diameter + cyl.radius
                dist = math.hypot(point[0] - cyl.cx, point[1] - cyl.cy)
                if dist <= clearance:
                    raise ValueError(
                        f"{label} lies inside the danger zone of threat at "
                        f"({cyl.cx:.1f}, {cyl.cy:.1f})"
                    )


@dataclass(frozen=True)
class PlacementMargins:
    """Geometry knobs for endpoint placement."""

    danger_margin: float
    uav_diameter: float = 1.0
    h_min: float = 20.0
    h_max: float = 120.0
    corner_frac: float = 0.10
    anchor_frac: float = 0.05
    max_tries: int = 10_000


@dataclass(frozen=True)
class SuiteConfig:
    """Cost-model and sampling defaults applied to every generated instance.

    Fractions are relative to the terrain's world extent so the same config
    scales across mesh sizes.
    """

    h_min: float = 20.0
    h_max: float = 120.0
    uav_diameter: float = 1.0
    j_pen: float = 1.0e4
    weights: tuple[float, float, float, float] = (5.0, 1.0, 10.0, 1.0)
    beta_turn: float = 1.0
    beta_climb: float = 1.0
    danger_margin_frac: float = 0.05
    radius_frac: tuple[float, float] = (0.03, 0.08)
    threat_height_mult: float = 3.0
    corner_clearance_frac: float = 0.08


def _corner_anchors(extent: float, anchor_frac: float) -> np.ndarray:
    a = anchor_frac * extent
    return np.array(
        [[a, a], [extent - a, extent - a], [a, extent - a], [extent - a, a]]
    )


def place_threats(
    terrain: TerrainGrid,
    count: int,
    radius_range: tuple[float, float],
    height_range: tuple[float, float],
    seed: int,
    corner_clearance_frac: float = 0.08,
) -> list[Cylinder]:
    """Sample ``count`` cylinders fully inside the terrain, deterministically.

    Candidates whose disc (plus a clearance band) would swallow one of the
    four corner anchor points are rejected, which keeps start/goal placement
    feasible on either diagonal.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    r_lo, r_hi = radius_range
    h_lo, h_hi = height_range
    if not (0 < r_lo <= r_hi) or not (0 < h_lo <= h_hi):
        raise ValueError("radius_range and height_range must be positive and ordered")

    extent = terrain.extent
    if 2 * r_lo >= extent:
        raise PlacementError(f"minimum radius {r_lo} does not fit in extent {extent}")
    anchors = _corner_anchors(extent, 0.05)
    clearance = corner_clearance_frac * extent

    rng = np.random.default_rng(seed)
    cylinders: list[Cylinder] = []
    attempts = 0
    max_attempts = max(1000, 200 * count)
    while len(cylinders) < count:
        if attempts >= max_attempts:
            raise PlacementError(
                f"failed to place {count} threats after {attempts} attempts"
            )
        attempts += 1
        radius = rng.uniform(r_lo, min(r_hi, 0.49 * extent))
        cx = rng.uniform(radius, extent - radius)
        cy = rng.uniform(radius, extent - radius)
        height = rng.uniform(h_lo, h_hi)
        anchor_dist = np.hypot(anchors[:, 0] - cx, anchors[:, 1] - cy)
        if np.any(anchor_dist <= radius + clearance):
            continue
        cylinders.append(Cylinder(cx=float(cx), cy=float(cy), radius=float(radius), height=float(height)))
    return cylinders


def place_endpoints(
    terrain: TerrainGrid,
    threats: list[Cylinder],
    margins: PlacementMargins,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Pick start and goal in diagonally opposite corner regions.

    Both points sit at mid-altitude above local ground and strictly outside
    every threat's danger zone. The diagonal is chosen by the seed; with no
    threats the points land on fixed fractional offsets of the map diagonal.
    """
    extent = terrain.extent
    rng = np.random.default_rng(seed)
    anchors = _corner_anchors(extent, margins.anchor_frac)
    diagonal = int(rng.integers(2))
    pair = anchors[:2] if diagonal == 0 else anchors[2:]
    side = margins.corner_frac * extent
    mid_alt = 0.5 * (margins.h_min + margins.h_max)

    def clear(x: float, y: float) -> bool:
        for cyl in threats:
            keep_out = margins.danger_margin + margins.uav_diameter + cyl.radius
            if math.hypot(x - cyl.cx, y - cyl.cy) <= keep_out:
                return False
        return True

    points = []
    for anchor in pair:
        x, y = float(anchor[0]), float(anchor[1])
        if not clear(x, y):
            lo_x = extent - side if x > extent / 2 else 0.0
            lo_y = extent - side if y > extent / 2 else 0.0
            for _ in range(margins.max_tries):
                x = float(rng.uniform(lo_x, lo_x + side))
                y = float(rng.uniform(lo_y, lo_y + side))
                if clear(x, y):
                    break
            else:
                raise PlacementError(
                    "corner region fully covered by threats; cannot place endpoint"
                )
        z = terrain_height_at(terrain, x, y) + mid_alt
        points.append(np.array([x, y, z]))
    return points[0], points[1]


def default_terrain_params() -> list[TerrainParams]:
    """The curated 28-terrain parameter list behind the shipped suite.

    Mixes gentle plains, rolling hills, and sharp ridge/valley maps; the
    roughness/variation/seed combos from the generator's showcase maps are
    included verbatim.
    """
    combos = [
        (-60.0, 300.0, 13),
        (-20.0, 300.0, 3),
        (-60.0, 60.0, 18),
        (60.0, -60.0, 18),
        (40.0, 120.0, 1),
        (-40.0, 150.0, 2),
        (80.0, 200.0, 4),
        (-80.0, 100.0, 5),
        (20.0, 60.0, 6),
        (-30.0, 240.0, 7),
        (50.0, -120.0, 8),
        (-50.0, 180.0, 9),
        (70.0, 90.0, 10),
        (-70.0, 300.0, 11),
        (30.0, -90.0, 12),
        (-25.0, 75.0, 14),
        (55.0, 220.0, 15),
        (-45.0, -150.0, 16),
        (65.0, 45.0, 17),
        (-35.0, 260.0, 19),
        (45.0, 160.0, 20),
        (-55.0, 130.0, 21),
        (25.0, 280.0, 22),
        (-65.0, 200.0, 23),
        (35.0, 110.0, 24),
        (-75.0, 170.0, 25),
        (60.0, 240.0, 26),
        (-40.0, 90.0, 27),
    ]
    return [
        TerrainParams(
            iterations=10,
            mesh_size=900,
            initial_elevation=100.0,
            initial_roughness=r,
            roughness_variation=rr,
            seed=seed,
        )
        for r, rr, seed in combos
    ]


def _derived_seeds(seed: int, terrain_index: int, density: int) -> tuple[int, int]:
    ss = np.random.SeedSequence([int(seed), int(terrain_index), int(density)])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def build_suite(
    terrain_param_list: list[TerrainParams],
    densities: tuple[int, ...] = (15, 30),
    seed: int = 0,
    config: SuiteConfig = SuiteConfig(),
) -> list[Instance]:
    """Build one instance per (terrain, density); deterministic in ``seed``."""
    if not terrain_param_list:
        raise ValueError("terrain_param_list must be non-empty")
    instances = []
    for ti, params in enumerate(terrain_param_list):
        terrain = generate_terrain(params)
        extent = terrain.extent
        danger_margin = config.danger_margin_frac * extent
        radius_range = (config.radius_frac[0] * extent, config.radius_frac[1] * extent)
        height_range = (config.h_min, config.threat_height_mult * config.h_max)
        for density in densities:
            inst_id = f"t{ti:02d}_k{density}"
            threat_seed, endpoint_seed = _derived_seeds(seed, ti, density)
            try:
                threats = place_threats(
                    terrain,
                    density,
                    radius_range,
                    height_range,
                    threat_seed,
                    corner_clearance_frac=config.corner_clearance_frac,
                )
                margins = PlacementMargins(
                    danger_margin=danger_margin,
                    uav_diameter=config.uav_diameter,
                    h_min=config.h_min,
                    h_max=config.h_max,
                )
                start, goal = place_endpoints(terrain, threats, margins, endpoint_seed)
            except PlacementError as exc:
                raise PlacementError(f"instance {inst_id}: {exc}") from exc
            inst = Instance(
                id=inst_id,
                terrain=terrain,
                threats=threats,
                start=start,
                goal=goal,
                h_min=config.h_min,
                h_max=config.h_max,
                uav_diameter=config.uav_diameter,
                danger_margin=danger_margin,
                j_pen=config.j_pen,
                weights=config.weights,
                beta_turn=config.beta_turn,
                beta_climb=config.beta_climb,
                density_class="low" if density <= 15 else "high",
            )
            inst.validate()
            instances.append(inst)
    return instances


# --- serialization ---------------------------------------------------------

def _instance_doc(inst: Instance) -> dict:
    return {
        "id": inst.id,
        "terrain": {
            "size": inst.terrain.size,
            "cell_length": inst.terrain.cell_length,
            "heights": inst.terrain.heights.ravel().tolist(),
        },
        "threats": [
            {"cx": c.cx, "cy": c.cy, "r": c.radius, "h": c.height} for c in inst.threats
        ],
        "start": inst.start.tolist(),
        "goal": inst.goal.tolist(),
        "h_min": inst.h_min,
        "h_max": inst.h_max,
        "uav_diameter": inst.uav_diameter,
        "danger_margin": inst.danger_margin,
        "j_pen": inst.j_pen,
        "weights": list(inst.weights),
        "beta_turn": inst.beta_turn,
        "beta_climb": inst.beta_climb,
        "density_class": inst.density_class,
    }


def serialize_instance(inst: Instance) -> bytes:
    """JSON encoding with full round-trip float precision."""
    return json.dumps(_instance_doc(inst), separators=(",", ":")).encode("utf-8")


def _require(doc: dict, key: str, kind, context: str):
    if key not in doc:
        raise InstanceParseError(f"missing field {context}{key}")
    value = doc[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, kind):
        raise InstanceParseError(
            f"field {context}{key} has wrong type {type(value).__name__}"
        )
    return value


def deserialize_instance(data: bytes) -> Instance:
    """Inverse of :func:`serialize_instance`; errors name the offending field."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceParseError(f"not a valid JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceParseError("top-level value must be an object")

    terrain_doc = _require(doc, "terrain", dict, "")
    size = _require(terrain_doc, "size", int, "terrain.")
    cell_length = _require(terrain_doc, "cell_length", float, "terrain.")
    heights = _require(terrain_doc, "heights", list, "terrain.")
    if len(heights) != size * size:
        raise InstanceParseError(
            f"field terrain.heights has {len(heights)} values, expected {size * size}"
        )
    try:
        grid = np.asarray(heights, dtype=np.float64).reshape(size, size)
    except (TypeError, ValueError) as exc:
        raise InstanceParseError(f"field terrain.heights is not numeric: {exc}") from exc
    terrain = TerrainGrid(size=size, cell_length=cell_length, heights=grid)

    threats = []
    for i, tdoc in enumerate(_require(doc, "threats", list, "")):
        if not isinstance(tdoc, dict):
            raise InstanceParseError(f"field threats[{i}] must be an object")
        ctx = f"threats[{i}]."
        threats.append(
            Cylinder(
                cx=_require(tdoc, "cx", float, ctx),
                cy=_require(tdoc, "cy", float, ctx),
                radius=_require(tdoc, "r", float, ctx),
                height=_require(tdoc, "h", float, ctx),
            )
        )

    def point(key: str) -> np.ndarray:
        coords = _require(doc, key, list, "")
        if len(coords) != 3 or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in coords
        ):
            raise InstanceParseError(f"field {key} must be a 3-element numeric array")
        return np.asarray(coords, dtype=np.float64)

    weights = _require(doc, "weights", list, "")
    if len(weights) != 4:
        raise InstanceParseError("field weights must have exactly 4 entries")

    inst = Instance(
        id=_require(doc, "id", str, ""),
        terrain=terrain,
        threats=threats,
        start=point("start"),
        goal=point("goal"),
        h_min=_require(doc, "h_min", float, ""),
        h_max=_require(doc, "h_max", float, ""),
        uav_diameter=_require(doc, "uav_diameter", float, ""),
        danger_margin=_require(doc, "danger_margin", float, ""),
        j_pen=_require(doc, "j_pen", float, ""),
        weights=tuple(float(w) for w in weights),
        beta_turn=_require(doc, "beta_turn", float, ""),
        beta_climb=_require(doc, "beta_climb", float, ""),
        density_class=_require(doc, "density_class", str, ""),
    )
    try:
        inst.validate()
    except ValueError as exc:
        raise InstanceParseError(str(exc)) from exc
    return inst


def write_suite(
    instances: list[Instance],
    out_dir: str | Path,
    provenance: dict | None = None,
) -> Path:
    """Write one JSON file per instance plus a manifest; returns manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for inst in instances:
        fname = f"{inst.id}.json"
        (out / fname).write_bytes(serialize_instance(inst))
        paths.append(fname)
    manifest = {
        "instances": paths,
        "provenance": {"tool_version": __version__, **(provenance or {})},
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest_path


def load_instance(path: str | Path) -> Instance:
    return deserialize_instance(Path(path).read_bytes())


def load_manifest(path: str | Path) -> list[Path]:
    """Resolve the instance file paths listed in a suite manifest."""
    manifest_path = Path(path)
    doc = json.loads(manifest_path.read_text())
    if not isinstance(doc, dict) or "instances" not in doc:
        raise InstanceParseError("manifest must be an object with an 'instances' array")
    return [manifest_path.parent / p for p in doc["instances"]]
