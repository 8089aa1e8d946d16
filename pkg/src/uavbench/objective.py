"""Path decoding and the composite path cost.

A candidate solution is a list of (r, psi, phi) triplets: radial step length,
climb angle, azimuth. Decoding walks these displacements from the start point
to produce waypoints. The cost combines four weighted parts: total path
length, threat proximity penalties, deviation from the preferred altitude
band, and turn/climb smoothness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instances import Instance
from .terrain import terrain_height_at

_EPS_DEGENERATE = 1e-12


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation-mode switches; the defaults are what the harness runs.

    ``include_terminal_legs`` / ``include_terminal_angles`` extend the threat
    and smoothness sums to the start/goal legs; switching them off restores
    the waypoint-only sums. ``strict_infinite_altitude`` replaces the finite
    out-of-band altitude sentinel with +inf. ``threat_3d_gating`` zeroes a
    segment/threat penalty when both segment endpoints clear the cylinder top.
    """

    include_terminal_legs: bool = True
    include_terminal_angles: bool = True
    strict_infinite_altitude: bool = False
    threat_3d_gating: bool = False
    z_floor_margin: float = 0.0
    z_ceiling_factor: float = 2.0


DEFAULT_CONFIG = EvalConfig()


@dataclass
class SphericalPath:
    """Search-space encoding: one (r, psi, phi) triplet per waypoint."""

    triplets: np.ndarray

    def __post_init__(self) -> None:
        self.triplets = np.asarray(self.triplets, dtype=np.float64).reshape(-1, 3)

    @property
    def dv(self) -> int:
        return self.triplets.shape[0]

    @classmethod
    def from_vector(cls, x) -> "SphericalPath":
        return cls(np.asarray(x, dtype=np.float64).reshape(-1, 3))

    def as_vector(self) -> np.ndarray:
        return self.triplets.ravel().copy()


@dataclass
class CartesianPath:
    """Decoded waypoint sequence (start and goal kept separately)."""

    waypoints: np.ndarray
    start: np.ndarray
    goal: np.ndarray

    def nodes(self, include_endpoints: bool = True) -> np.ndarray:
        if include_endpoints:
            return np.vstack([self.start, self.waypoints, self.goal])
        return self.waypoints


@dataclass(frozen=True)
class CostBreakdown:
    f1: float
    f2: float
    f3: float
    f4: float
    total: float
    violated_pairs: int
    altitude_violations: int

    def as_dict(self) -> dict:
        return {
            "f1": self.f1,
            "f2": self.f2,
            "f3": self.f3,
            "f4": self.f4,
            "total": self.total,
            "violated_pairs": self.violated_pairs,
            "altitude_violations": self.altitude_violations,
        }


def max_step_length(inst: Instance, dv: int) -> float:
    """Per-step radial bound: permits detours up to twice the direct path."""
    return 2.0 * float(np.linalg.norm(inst.goal - inst.start)) / dv


def spherical_bounds(inst: Instance, dv: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate bounds of the flat (r, psi, phi) * dv search vector."""
    r_max = max_step_length(inst, dv)
    lo = np.tile([0.0, -0.5 * math.pi, -math.pi], dv)
    hi = np.tile([r_max, 0.5 * math.pi, math.pi], dv)
    return lo, hi


def decode(sp: SphericalPath, inst: Instance, config: EvalConfig = DEFAULT_CONFIG) -> CartesianPath:
    """Walk the spherical displacements from the start point.

    Each waypoint is the previous one plus
    (r cos(psi) cos(phi), r cos(psi) sin(phi), r sin(psi)); x/y are clamped to
    the terrain bounds and z to a band above local ground, clamp effects
    propagating to later waypoints.
    """
    obj = PathObjective(inst, sp.dv, config)
    waypoints, _ = obj.decode_arrays(sp.as_vector())
    return CartesianPath(waypoints=waypoints, start=inst.start.copy(), goal=inst.goal.copy())


def path_length(path: CartesianPath) -> float:
    """Sum of Euclidean segment lengths from start through waypoints to goal."""
    nodes = path.nodes()
    return float(np.linalg.norm(np.diff(nodes, axis=0), axis=1).sum())


def segment_threat_penalty(
    p: np.ndarray,
    q: np.ndarray,
    cyl,
    uav_diameter: float,
    s_margin: float,
    j_pen: float,
) -> float:
    """Penalty of one segment against one cylinder (horizontal projection).

    Zero beyond the danger zone, linear ramp inside it, flat collision
    penalty once the segment cuts the inflated disc.
    """
    d_k = _point_segment_distance_2d(
        float(p[0]), float(p[1]), float(q[0]), float(q[1]), cyl.cx, cyl.cy
    )
    inflated = uav_diameter + cyl.radius
    if d_k > s_margin + inflated:
        return 0.0
    if d_k > inflated:
        return (s_margin + inflated) - d_k
    return j_pen


def _point_segment_distance_2d(ax, ay, bx, by, cx, cy) -> float:
    abx, aby = bx - ax, by - ay
    ab2 = abx * abx + aby * aby
    if ab2 <= 0.0:
        return math.hypot(cx - ax, cy - ay)
    t = ((cx - ax) * abx + (cy - ay) * aby) / ab2
    t = min(1.0, max(0.0, t))
    return math.hypot(cx - (ax + t * abx), cy - (ay + t * aby))


def obstacle_cost(
    path: CartesianPath, inst: Instance, config: EvalConfig = DEFAULT_CONFIG
) -> tuple[float, int]:
    obj = PathObjective(inst, max(1, len(path.waypoints)), config)
    nodes = path.nodes(include_endpoints=config.include_terminal_legs)
    return obj.obstacle_terms(nodes)


def altitude_cost(
    path: CartesianPath, inst: Instance, config: EvalConfig = DEFAULT_CONFIG
) -> tuple[float, int]:
    w = path.waypoints
    ground = terrain_height_at(inst.terrain, w[:, 0], w[:, 1])
    return _altitude_terms(w[:, 2] - np.atleast_1d(ground), inst, config)


def _altitude_terms(h: np.ndarray, inst: Instance, config: EvalConfig) -> tuple[float, int]:
    mid = 0.5 * (inst.h_min + inst.h_max)
    in_band = (h >= inst.h_min) & (h <= inst.h_max)
    violations = len(h) - int(np.count_nonzero(in_band))
    in_cost = float((np.abs(h - mid) * in_band).sum())
    if violations == 0:
        return in_cost, 0
    sentinel = math.inf if config.strict_infinite_altitude else inst.j_pen
    return in_cost + sentinel * violations, violations


def smoothness_cost(
    path: CartesianPath,
    beta_turn: float,
    beta_climb: float,
    config: EvalConfig = DEFAULT_CONFIG,
) -> float:
    nodes = path.nodes(include_endpoints=config.include_terminal_angles)
    return _smoothness_terms(nodes, beta_turn, beta_climb)


def _smoothness_from_diffs(
    dxy: np.ndarray,
    hlen: np.ndarray,
    dz: np.ndarray,
    beta_turn: float,
    beta_climb: float,
) -> float:
    climb = np.where(
        hlen < _EPS_DEGENERATE,
        np.sign(dz) * (0.5 * math.pi),
        np.arctan2(dz, np.maximum(hlen, _EPS_DEGENERATE)),
    )

    u, v = dxy[:-1], dxy[1:]
    lu, lv = hlen[:-1], hlen[1:]
    dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
    cosang = dot / np.maximum(lu * lv, _EPS_DEGENERATE * _EPS_DEGENERATE)
    np.maximum(cosang, -1.0, out=cosang)
    np.minimum(cosang, 1.0, out=cosang)
    turn = np.where((lu >= _EPS_DEGENERATE) & (lv >= _EPS_DEGENERATE), np.arccos(cosang), 0.0)

    return float(beta_turn * turn.sum() + beta_climb * np.abs(climb[1:] - climb[:-1]).sum())


def _smoothness_terms(nodes: np.ndarray, beta_turn: float, beta_climb: float) -> float:
    if len(nodes) < 3:
        return 0.0
    diffs = nodes[1:] - nodes[:-1]
    hlen = np.hypot(diffs[:, 0], diffs[:, 1])
    return _smoothness_from_diffs(diffs[:, :2], hlen, diffs[:, 2], beta_turn, beta_climb)


def total_cost(sp, inst: Instance, config: EvalConfig = DEFAULT_CONFIG) -> CostBreakdown:
    """Full evaluation of one candidate; pure and deterministic."""
    if not isinstance(sp, SphericalPath):
        sp = SphericalPath.from_vector(sp)
    return PathObjective(inst, sp.dv, config).breakdown(sp.as_vector())


class PathObjective:
    """Evaluation-ready view of one instance at a fixed number of waypoints.

    Precomputes threat and terrain arrays once; ``__call__`` maps a flat
    search vector to the weighted total cost. Reentrant and side-effect
    free, so one object can serve many concurrent evaluations.
    """

    def __init__(self, inst: Instance, dv: int, config: EvalConfig = DEFAULT_CONFIG):
        if dv < 1:
            raise ValueError(f"dv must be >= 1, got {dv}")
        self.instance = inst
        self.dv = dv
        self.config = config
        self.start = inst.start.astype(np.float64)
        self.goal = inst.goal.astype(np.float64)
        self.r_max = max_step_length(inst, dv)
        self.bounds = spherical_bounds(inst, dv)

        self._heights = inst.terrain.heights
        self._cell = inst.terrain.cell_length
        self._size = inst.terrain.size
        self._extent = inst.terrain.extent

        k = len(inst.threats)
        self._centers = np.array([[c.cx, c.cy] for c in inst.threats]).reshape(k, 2)
        radii = np.array([c.radius for c in inst.threats])
        self._inflated = inst.uav_diameter + radii
        self._danger = inst.danger_margin + self._inflated
        if config.threat_3d_gating and k:
            ground_at_centers = terrain_height_at(
                inst.terrain, self._centers[:, 0], self._centers[:, 1]
            )
            tops = np.atleast_1d(ground_at_centers) + np.array(
                [c.height for c in inst.threats]
            )
            self._tops = tops
        else:
            self._tops = None

        self._z_lo_off = config.z_floor_margin
        self._z_hi_off = config.z_ceiling_factor * inst.h_max
        self._mid_alt = 0.5 * (inst.h_min + inst.h_max)

    # -- geometry helpers --------------------------------------------------

    def _ground(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        # Inlined bilinear interpolation; inputs already clamped to bounds.
        gx = xs / self._cell
        gy = ys / self._cell
        # inputs are pre-clamped to [0, extent], so only the top edge needs care
        ix = np.minimum(gx.astype(int), self._size - 2)
        iy = np.minimum(gy.astype(int), self._size - 2)
        fx = gx - ix
        fy = gy - iy
        hgt = self._heights
        return (
            hgt[iy, ix] * (1.0 - fx) * (1.0 - fy)
            + hgt[iy, ix + 1] * fx * (1.0 - fy)
            + hgt[iy + 1, ix] * (1.0 - fx) * fy
            + hgt[iy + 1, ix + 1] * fx * fy
        )

    def decode_arrays(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Flat vector -> (waypoints (dv,3), ground elevation under each)."""
        t = np.asarray(x, dtype=np.float64).reshape(self.dv, 3)
        r = t[:, 0]
        psi = t[:, 1]
        rcp = r * np.cos(psi)
        dx = rcp * np.cos(t[:, 2])
        dy = rcp * np.sin(t[:, 2])
        dz = r * np.sin(psi)

        xs = self.start[0] + np.cumsum(dx)
        ys = self.start[1] + np.cumsum(dy)
        ext = self._extent
        if xs.min() < 0.0 or xs.max() > ext or ys.min() < 0.0 or ys.max() > ext:
            # Clamp effects propagate: redo the walk step by step.
            px, py = float(self.start[0]), float(self.start[1])
            for j, (sx, sy) in enumerate(zip(dx.tolist(), dy.tolist())):
                px = min(ext, max(0.0, px + sx))
                py = min(ext, max(0.0, py + sy))
                xs[j] = px
                ys[j] = py

        ground = self._ground(xs, ys)
        z_lo = (ground + self._z_lo_off).tolist()
        z_hi = (ground + self._z_hi_off).tolist()
        zs = np.empty(self.dv)
        pz = float(self.start[2])
        for j, step in enumerate(dz.tolist()):
            pz = min(z_hi[j], max(z_lo[j], pz + step))
            zs[j] = pz

        waypoints = np.empty((self.dv, 3))
        waypoints[:, 0] = xs
        waypoints[:, 1] = ys
        waypoints[:, 2] = zs
        return waypoints, ground

    def obstacle_terms(self, nodes: np.ndarray) -> tuple[float, int]:
        """Threat penalty sum and collision-pair count over node segments."""
        if self._centers.shape[0] == 0 or len(nodes) < 2:
            return 0.0, 0
        ax = nodes[:-1, 0:1]
        ay = nodes[:-1, 1:2]
        abx = nodes[1:, 0:1] - ax
        aby = nodes[1:, 1:2] - ay
        apx = self._centers[:, 0] - ax
        apy = self._centers[:, 1] - ay
        ab2 = np.maximum(abx * abx + aby * aby, _EPS_DEGENERATE)
        t = (apx * abx + apy * aby) / ab2
        np.maximum(t, 0.0, out=t)
        np.minimum(t, 1.0, out=t)
        ex = apx - t * abx
        ey = apy - t * aby
        d_k = np.sqrt(ex * ex + ey * ey)

        collided = d_k <= self._inflated
        in_ramp = (~collided) & (d_k <= self._danger)
        if self._tops is not None:
            above = (nodes[:-1, 2:3] > self._tops) & (nodes[1:, 2:3] > self._tops)
            collided &= ~above
            in_ramp &= ~above
        n_collided = int(np.count_nonzero(collided))
        f2 = float(((self._danger - d_k) * in_ramp).sum()) + self.instance.j_pen * n_collided
        return f2, n_collided

    # -- evaluation --------------------------------------------------------

    def _compute(self, x) -> tuple[float, float, float, float, int, int]:
        waypoints, ground = self.decode_arrays(x)
        nodes = np.empty((self.dv + 2, 3))
        nodes[0] = self.start
        nodes[1:-1] = waypoints
        nodes[-1] = self.goal

        diffs = nodes[1:] - nodes[:-1]
        hlen2 = diffs[:, 0] * diffs[:, 0] + diffs[:, 1] * diffs[:, 1]
        dz = diffs[:, 2]
        f1 = float(np.sqrt(hlen2 + dz * dz).sum())

        cfg = self.config
        f2_nodes = nodes if cfg.include_terminal_legs else waypoints
        f2, violated = self.obstacle_terms(f2_nodes)

        f3, alt_violations = _altitude_terms(waypoints[:, 2] - ground, self.instance, cfg)

        if cfg.include_terminal_angles:
            f4 = _smoothness_from_diffs(
                diffs[:, :2],
                np.sqrt(hlen2),
                dz,
                self.instance.beta_turn,
                self.instance.beta_climb,
            )
        else:
            f4 = _smoothness_terms(waypoints, self.instance.beta_turn, self.instance.beta_climb)

        return f1, f2, f3, f4, violated, alt_violations

    def __call__(self, x) -> float:
        f1, f2, f3, f4, _, _ = self._compute(x)
        b1, b2, b3, b4 = self.instance.weights
        return b1 * f1 + b2 * f2 + b3 * f3 + b4 * f4

    def breakdown(self, x) -> CostBreakdown:
        f1, f2, f3, f4, violated, alt_violations = self._compute(x)
        b1, b2, b3, b4 = self.instance.weights
        return CostBreakdown(
            f1=f1,
            f2=f2,
            f3=f3,
            f4=f4,
            total=b1 * f1 + b2 * f2 + b3 * f3 + b4 * f4,
            violated_pairs=violated,
            altitude_violations=alt_violations,
        )


def straight_line_vector(inst: Instance, dv: int) -> np.ndarray:
    """Triplets that decode to evenly spaced waypoints on the S-G chord."""
    step = (inst.goal - inst.start) / dv
    r = float(np.linalg.norm(step))
    if r == 0.0:
        return np.zeros(3 * dv)
    psi = math.asin(step[2] / r)
    phi = math.atan2(step[1], step[0])
    return np.tile([r, psi, phi], dv)


def random_vector(inst: Instance, dv: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = spherical_bounds(inst, dv)
    return lo + rng.random(lo.shape) * (hi - lo)
