import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import flat_terrain
from reference_impl import evaluate_ref, point_segment_distance_sampled
from uavbench.instances import Cylinder, Instance
from uavbench.objective import (
    CartesianPath,
    EvalConfig,
    PathObjective,
    SphericalPath,
    altitude_cost,
    decode,
    max_step_length,
    obstacle_cost,
    path_length,
    random_vector,
    segment_threat_penalty,
    smoothness_cost,
    spherical_bounds,
    straight_line_vector,
    total_cost,
)


def make_path(start, waypoints, goal):
    return CartesianPath(
        waypoints=np.asarray(waypoints, dtype=float),
        start=np.asarray(start, dtype=float),
        goal=np.asarray(goal, dtype=float),
    )


# --- decoding ---------------------------------------------------------------

def test_decode_zero_angles_moves_along_x(flat_instance):
    sp = SphericalPath(np.array([[10.0, 0.0, 0.0]]))
    path = decode(sp, flat_instance)
    np.testing.assert_allclose(path.waypoints[0], [15.0, 5.0, 70.0])


def test_decode_vertical_climb(flat_instance):
    sp = SphericalPath(np.array([[10.0, math.pi / 2, 0.0]]))
    path = decode(sp, flat_instance)
    np.testing.assert_allclose(path.waypoints[0], [5.0, 5.0, 80.0], atol=1e-12)


def test_decode_is_pure(flat_instance):
    rng = np.random.default_rng(11)
    sp = SphericalPath.from_vector(random_vector(flat_instance, 5, rng))
    a = decode(sp, flat_instance)
    b = decode(sp, flat_instance)
    assert np.array_equal(a.waypoints, b.waypoints)


def test_decode_clamps_to_bounds(flat_instance):
    big = max_step_length(flat_instance, 1) * np.ones(1)
    sp = SphericalPath(np.array([[big[0], 0.0, math.pi]]))  # straight toward -x
    path = decode(sp, flat_instance)
    assert path.waypoints[0, 0] == 0.0  # clamped at the western edge


def test_decode_sequential_clamp_propagates(flat_instance):
    # two big -x steps: second starts from the clamped border, not from the
    # unclamped running sum
    r = max_step_length(flat_instance, 2)
    sp = SphericalPath(np.array([[r, 0.0, math.pi], [r, 0.0, 0.0]]))
    path = decode(sp, flat_instance)
    assert path.waypoints[0, 0] == 0.0
    assert path.waypoints[1, 0] == pytest.approx(min(r, flat_instance.terrain.extent))


# --- path length -------------------------------------------------------------

def test_path_length_three_four_five():
    path = make_path([0, 0, 0], [[3, 4, 0]], [3, 4, 12])
    assert path_length(path) == pytest.approx(17.0)


def test_path_length_collinear_midpoint(flat_instance):
    s, g = flat_instance.start, flat_instance.goal
    path = make_path(s, [(s + g) / 2], g)
    assert path_length(path) == pytest.approx(np.linalg.norm(g - s))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_path_length_at_least_direct(flat_instance, seed):
    rng = np.random.default_rng(seed)
    path = decode(SphericalPath.from_vector(random_vector(flat_instance, 5, rng)), flat_instance)
    direct = np.linalg.norm(flat_instance.goal - flat_instance.start)
    assert path_length(path) >= direct - 1e-9


# --- threat penalty ----------------------------------------------------------

CYL = Cylinder(cx=20.0, cy=0.0, radius=5.0, height=50.0)


def seg_at_distance(d):
    # horizontal segment y = d passing over the center's x
    return np.array([0.0, d, 0.0]), np.array([40.0, d, 0.0])


def test_penalty_beyond_danger_zone():
    p, q = seg_at_distance(20.0)
    assert segment_threat_penalty(p, q, CYL, 2.0, 10.0, 1e4) == 0.0


def test_penalty_ramp_value():
    p, q = seg_at_distance(12.0)
    assert segment_threat_penalty(p, q, CYL, 2.0, 10.0, 1e4) == pytest.approx(5.0)


def test_penalty_collision_value():
    p, q = seg_at_distance(6.0)
    assert segment_threat_penalty(p, q, CYL, 2.0, 10.0, 1e4) == 1e4


def test_penalty_continuous_at_danger_boundary():
    p, q = seg_at_distance(17.0 - 1e-9)
    assert segment_threat_penalty(p, q, CYL, 2.0, 10.0, 1e4) == pytest.approx(0.0, abs=2e-9)


@settings(max_examples=80, deadline=None)
@given(
    d1=st.floats(7.0001, 60.0),
    d2=st.floats(7.0001, 60.0),
)
def test_penalty_non_increasing_outside_collision(d1, d2):
    lo, hi = sorted([d1, d2])
    pen = [segment_threat_penalty(*seg_at_distance(d), CYL, 2.0, 10.0, 1e4) for d in (lo, hi)]
    assert pen[0] >= pen[1]


@settings(max_examples=40, deadline=None)
@given(d=st.floats(0.0, 7.0))
def test_penalty_flat_inside_collision(d):
    assert segment_threat_penalty(*seg_at_distance(d), CYL, 2.0, 10.0, 1e4) == 1e4


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_segment_distance_matches_dense_sampling(seed):
    rng = np.random.default_rng(seed)
    ax, ay, bx, by, cx, cy = rng.uniform(-50, 50, size=6)
    p = np.array([ax, ay, 0.0])
    q = np.array([bx, by, 0.0])
    cyl = Cylinder(cx=cx, cy=cy, radius=1.0, height=1.0)
    # recover d from the ramp branch with a huge margin
    margin = 1e6
    pen = segment_threat_penalty(p, q, cyl, 0.0, margin, 1e12)
    d_analytic = margin + cyl.radius - pen if pen > 0 else None
    d_sampled = point_segment_distance_sampled(ax, ay, bx, by, cx, cy, n=10_000)
    if d_analytic is not None and d_sampled > 1e-6:
        assert d_analytic == pytest.approx(d_sampled, rel=1e-6)


# --- obstacle cost -----------------------------------------------------------

def test_obstacle_cost_no_threats(flat_instance):
    path = decode(SphericalPath.from_vector(straight_line_vector(flat_instance, 5)), flat_instance)
    assert obstacle_cost(path, flat_instance) == (0.0, 0)


def test_obstacle_cost_far_path(threat_instance):
    path = make_path([5, 5, 70], [[5, 59, 70]], [59, 59, 70])
    f2, violated = obstacle_cost(path, threat_instance)
    assert f2 == 0.0 and violated == 0


def test_obstacle_cost_through_center(threat_instance):
    # straight chord passes exactly through the cylinder center at (32, 32)
    path = decode(
        SphericalPath.from_vector(straight_line_vector(threat_instance, 5)), threat_instance
    )
    f2, violated = obstacle_cost(path, threat_instance)
    assert violated >= 1
    assert f2 >= threat_instance.j_pen
    bd = total_cost(straight_line_vector(threat_instance, 5), threat_instance)
    assert bd.violated_pairs == violated
    assert bd.total >= threat_instance.weights[1] * threat_instance.j_pen


def test_obstacle_terminal_legs_config(threat_instance):
    # only the S->P1 leg crosses the threat; the literal mode misses it
    far = np.array([59.0, 5.0, 70.0])
    path = make_path([5, 5, 70], [far, far + [0, 1, 0]], [59, 59, 70])
    blocker = Instance(
        id="blocker",
        terrain=threat_instance.terrain,
        threats=[Cylinder(cx=32.0, cy=5.0, radius=3.0, height=200.0)],
        start=np.array([5.0, 5.0, 70.0]),
        goal=np.array([59.0, 59.0, 70.0]),
        danger_margin=3.2,
    )
    with_legs, _ = obstacle_cost(path, blocker, EvalConfig(include_terminal_legs=True))
    without, _ = obstacle_cost(path, blocker, EvalConfig(include_terminal_legs=False))
    assert with_legs >= blocker.j_pen
    assert without == 0.0


def test_obstacle_3d_gating(threat_instance):
    cyl = threat_instance.threats[0]
    above = cyl.height + 50.0
    path = make_path([5, 5, above], [[32, 32, above]], [59, 59, above])
    gated, gated_pairs = obstacle_cost(path, threat_instance, EvalConfig(threat_3d_gating=True))
    plain, plain_pairs = obstacle_cost(path, threat_instance)
    assert gated == 0.0 and gated_pairs == 0
    assert plain >= threat_instance.j_pen and plain_pairs >= 1


# --- altitude cost -----------------------------------------------------------

def alt_instance():
    terrain = flat_terrain(mesh=17, h0=0.0)
    return Instance(
        id="alt",
        terrain=terrain,
        threats=[],
        start=np.array([1.0, 1.0, 150.0]),
        goal=np.array([15.0, 15.0, 150.0]),
        h_min=100.0,
        h_max=200.0,
        danger_margin=1.0,
    )


@pytest.mark.parametrize(
    "z,expected,violations",
    [(150.0, 0.0, 0), (120.0, 30.0, 0), (90.0, 1e4, 1)],
)
def test_altitude_cost_cases(z, expected, violations):
    inst = alt_instance()
    path = make_path(inst.start, [[8.0, 8.0, z]], inst.goal)
    f3, nviol = altitude_cost(path, inst)
    assert f3 == pytest.approx(expected)
    assert nviol == violations


def test_altitude_strict_infinity_mode():
    inst = alt_instance()
    path = make_path(inst.start, [[8.0, 8.0, 90.0]], inst.goal)
    f3, nviol = altitude_cost(path, inst, EvalConfig(strict_infinite_altitude=True))
    assert math.isinf(f3) and nviol == 1


# --- smoothness --------------------------------------------------------------

def test_smoothness_straight_path_zero():
    path = make_path([0, 0, 5], [[1, 1, 5], [2, 2, 5]], [3, 3, 5])
    # acos(dot/(|u||v|)) on collinear unit steps lands within sqrt(eps) of zero
    assert smoothness_cost(path, 1.0, 1.0) == pytest.approx(0.0, abs=1e-6)


def test_smoothness_single_right_angle():
    path = make_path([0, 0, 0], [[1, 0, 0]], [1, 1, 0])
    assert smoothness_cost(path, 1.0, 1.0) == pytest.approx(math.pi / 2)


def test_smoothness_flat_then_climb():
    path = make_path([0, 0, 0], [[1, 0, 0]], [2, 0, 1])
    assert smoothness_cost(path, 0.0, 1.0) == pytest.approx(math.pi / 4)


def test_smoothness_vertical_segment_degenerate():
    path = make_path([0, 0, 0], [[0, 0, 3]], [1, 0, 3])
    # climb angles: +pi/2 then 0 -> |diff| = pi/2; turn at the degenerate joint is 0
    assert smoothness_cost(path, 1.0, 0.0) == pytest.approx(0.0)
    assert smoothness_cost(path, 0.0, 1.0) == pytest.approx(math.pi / 2)


def test_smoothness_literal_indexing_config():
    path = make_path([0, 0, 0], [[1, 0, 0], [1, 1, 0], [2, 1, 0]], [2, 2, 0])
    extended = smoothness_cost(path, 1.0, 0.0)
    literal = smoothness_cost(path, 1.0, 0.0, EvalConfig(include_terminal_angles=False))
    assert extended == pytest.approx(3 * math.pi / 2)  # turns at all three waypoints
    assert literal == pytest.approx(math.pi / 2)  # only the one interior joint


# --- total cost ---------------------------------------------------------------

def test_total_cost_straight_flat_equals_weighted_length(flat_instance):
    bd = total_cost(straight_line_vector(flat_instance, 5), flat_instance)
    direct = float(np.linalg.norm(flat_instance.goal - flat_instance.start))
    assert bd.f2 == 0.0 and bd.f3 == pytest.approx(0.0)
    assert bd.f4 == pytest.approx(0.0, abs=1e-6)
    assert bd.total == pytest.approx(flat_instance.weights[0] * direct, rel=1e-7)


def test_total_cost_weight_isolation(threat_instance):
    inst = Instance(
        id="w",
        terrain=threat_instance.terrain,
        threats=threat_instance.threats,
        start=threat_instance.start,
        goal=threat_instance.goal,
        weights=(0.0, 1.0, 0.0, 0.0),
        danger_margin=threat_instance.danger_margin,
    )
    x = straight_line_vector(inst, 5)
    bd = total_cost(x, inst)
    assert bd.total == pytest.approx(bd.f2)


def test_total_cost_purity_bit_identical(small_suite):
    inst = small_suite[0]
    rng = np.random.default_rng(0)
    x = random_vector(inst, 10, rng)
    a = total_cost(x, inst)
    b = total_cost(x, inst)
    assert a == b


def test_breakdown_identity(small_suite):
    inst = small_suite[2]
    rng = np.random.default_rng(5)
    for _ in range(20):
        bd = total_cost(random_vector(inst, 5, rng), inst)
        b = inst.weights
        assert bd.total == pytest.approx(
            b[0] * bd.f1 + b[1] * bd.f2 + b[2] * bd.f3 + b[3] * bd.f4, rel=1e-12
        )
        assert bd.f2 >= bd.violated_pairs * inst.j_pen


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dv=st.sampled_from([1, 2, 5, 8]))
def test_angle_ranges(small_suite, seed, dv):
    inst = small_suite[1]
    rng = np.random.default_rng(seed)
    path = decode(SphericalPath.from_vector(random_vector(inst, dv, rng)), inst)
    nodes = path.nodes()
    diffs = np.diff(nodes, axis=0)
    hlen = np.hypot(diffs[:, 0], diffs[:, 1])
    climb = np.arctan2(diffs[:, 2], hlen)
    assert np.all(np.abs(climb) <= math.pi / 2)
    for i in range(1, len(nodes) - 1):
        u, v = diffs[i - 1, :2], diffs[i, :2]
        lu, lv = np.linalg.norm(u), np.linalg.norm(v)
        if lu < 1e-12 or lv < 1e-12:
            continue
        theta = math.acos(max(-1.0, min(1.0, float(np.dot(u, v)) / (lu * lv))))
        assert 0.0 <= theta <= math.pi


def test_bounds_shapes(small_suite):
    inst = small_suite[0]
    lo, hi = spherical_bounds(inst, 7)
    assert lo.shape == hi.shape == (21,)
    assert np.all(lo < hi)
    assert hi[0] == pytest.approx(max_step_length(inst, 7))
    assert lo[0] == 0.0 and hi[1] == pytest.approx(math.pi / 2) and hi[2] == pytest.approx(math.pi)


def test_oracle_equivalence_sample(small_suite):
    rng = np.random.default_rng(99)
    for inst in small_suite:
        for dv in (5, 10):
            obj = PathObjective(inst, dv)
            for _ in range(25):
                x = random_vector(inst, dv, rng)
                bd = obj.breakdown(x)
                ref = evaluate_ref(x.tolist(), inst)
                assert bd.total == pytest.approx(ref[4], rel=1e-9)
                assert bd.f1 == pytest.approx(ref[0], rel=1e-9)
                assert bd.f2 == pytest.approx(ref[1], rel=1e-9, abs=1e-9)
                assert bd.f3 == pytest.approx(ref[2], rel=1e-9, abs=1e-9)
                assert bd.f4 == pytest.approx(ref[3], rel=1e-9, abs=1e-9)
                assert (bd.violated_pairs, bd.altitude_violations) == (ref[5], ref[6])
