import math

import numpy as np
import pytest
import shapely
from hypothesis import given, settings, strategies as st

from bayesrrdt import cspace
from bayesrrdt.cspace import (ContractViolation, Motion, PlanarArm, SamplingExhausted, World,
                              forward_kinematics, is_motion_valid, is_valid, sample_free,
                              sample_free_counted)
from conftest import rect

coord = st.floats(0, 10, allow_nan=False)


def test_empty_world_everything_valid(empty_world):
    assert is_valid(empty_world, [3.0, 7.0])
    assert is_valid(empty_world, [0.0, 10.0])


def test_out_of_bounds(empty_world):
    assert not is_valid(empty_world, [-0.1, 5.0])
    assert not is_valid(empty_world, [5.0, 10.5])


def test_dimension_mismatch_is_contract_violation(empty_world):
    with pytest.raises(ContractViolation):
        is_valid(empty_world, [1.0, 2.0, 3.0])
    with pytest.raises(ContractViolation):
        is_valid(empty_world, [1.0, math.nan])


def test_boundary_point_collides(wall_world):
    assert not is_valid(wall_world, [4.0, 5.0])
    assert not is_valid(wall_world, [6.0, 0.0])
    assert is_valid(wall_world, [3.999, 5.0])


def test_point_robot_matches_shapely():
    poly = [[1, 1], [6, 2], [8, 7], [4, 5], [2, 8]]   # non-convex
    w = World(bounds=[[0, 10], [0, 10]], obstacles=[poly])
    shape = shapely.Polygon(poly)
    rng = np.random.default_rng(0)
    for q in rng.uniform(0, 10, (2000, 2)):
        # shapely.intersects counts the boundary, matching our convention
        assert is_valid(w, q) == (not shape.intersects(shapely.Point(q)))


def test_arm_link_overlap_detected():
    # 3-link arm stretched along +x; a box straddles the second link only
    w = World(bounds=None, robot=PlanarArm((1.0, 1.0, 1.0)), obstacles=[rect(1.4, -0.1, 1.6, 0.1)])
    assert not is_valid(w, [0.0, 0.0, 0.0])
    # folding the arm upward at the base clears the box
    assert is_valid(w, [math.pi / 2, 0.0, 0.0])


def test_arm_segment_check_matches_shapely():
    w = World(bounds=None, robot=PlanarArm((1.0, 0.8, 0.6)), obstacles=[rect(0.5, 0.5, 1.0, 1.2)])
    box = shapely.Polygon(rect(0.5, 0.5, 1.0, 1.2))
    rng = np.random.default_rng(3)
    for q in rng.uniform(-math.pi, math.pi, (1000, 3)):
        segs = forward_kinematics(w, q)
        hits_box = any(shapely.LineString(s).intersects(box) for s in segs)
        self_hit = shapely.LineString(segs[0]).intersects(shapely.LineString(segs[2]))
        assert is_valid(w, q) == (not hits_box and not self_hit)


def test_arm_self_collision():
    w = World(bounds=None, robot=PlanarArm((1.0, 1.0, 1.0)))
    # second joint folds back by 180 degrees: link 2 lies on link 0 but they are not adjacent
    # until the third link swings back over the first
    assert not is_valid(w, [0.0, math.pi * 0.9, math.pi * 0.9])
    assert is_valid(w, [0.0, 0.3, 0.3])


def test_arm_joint_limits():
    w = World(bounds=None, robot=PlanarArm((1.0, 1.0), joint_limits=((-1, 1), (-1, 1))))
    assert is_valid(w, [0.5, -0.5])
    assert not is_valid(w, [1.5, 0.0])


def test_forward_kinematics_identity():
    w = World(bounds=None, robot=PlanarArm((1.0, 1.0, 1.0)))
    segs = forward_kinematics(w, [0, 0, 0])
    np.testing.assert_allclose(segs[-1, 1], [3.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(segs[:, 0, 1], 0.0, atol=1e-12)


def test_forward_kinematics_vertical():
    w = World(bounds=None, robot=PlanarArm((1.0, 1.0, 1.0)))
    np.testing.assert_allclose(forward_kinematics(w, [math.pi / 2, 0, 0])[-1, 1], [0, 3], atol=1e-12)


def test_forward_kinematics_mixed():
    w = World(bounds=None, robot=PlanarArm((1.0, 1.0, 1.0)))
    end = forward_kinematics(w, [math.pi / 4, math.pi / 4, 0])[-1, 1]
    expected = (1 / math.sqrt(2), 1 / math.sqrt(2) + 2.0)
    np.testing.assert_allclose(end, expected, atol=1e-9)


def test_forward_kinematics_needs_arm(empty_world):
    with pytest.raises(ContractViolation):
        forward_kinematics(empty_world, [1.0, 1.0])


@given(st.lists(st.floats(-math.pi, math.pi), min_size=4, max_size=4))
def test_chain_is_connected_and_lengths_sum(q):
    w = World(bounds=None, robot=PlanarArm((0.5, 1.0, 1.5, 0.25), base=(1.0, -2.0)))
    segs = forward_kinematics(w, q)
    np.testing.assert_allclose(segs[0, 0], [1.0, -2.0])
    np.testing.assert_allclose(segs[1:, 0], segs[:-1, 1])
    lengths = np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1)
    assert lengths.sum() == pytest.approx(3.25, abs=1e-9)
    angle = math.atan2(*(segs[2, 1] - segs[2, 0])[::-1])
    assert math.cos(angle - sum(q[:3])) == pytest.approx(1.0, abs=1e-9)


def test_zero_length_motion(empty_world):
    q = np.array([2.0, 2.0])
    assert is_motion_valid(empty_world, Motion(q, q))


def test_motion_through_wall(wall_world):
    m = Motion(np.array([1.0, 5.0]), np.array([9.0, 5.0]))
    assert not is_motion_valid(wall_world, m)
    # finer independent check agrees
    ts = np.linspace(0, 1, 10 * 256 + 1)
    assert not all(is_valid(wall_world, m.start + t * (m.end - m.start)) for t in ts)


def test_motion_in_free_space(wall_world):
    assert is_motion_valid(wall_world, Motion(np.array([1.0, 1.0]), np.array([3.5, 9.0])))


def test_motion_dimension_mismatch(empty_world):
    with pytest.raises(ContractViolation):
        is_motion_valid(empty_world, Motion(np.zeros(2), np.zeros(3)))


thin = World(bounds=[[0, 10], [0, 10]], obstacles=[rect(4.9, 2, 5.0, 8), [[1, 1], [3, 1.2], [2, 3]]],
             motion_check_resolution=0.3)


@settings(max_examples=300)
@given(coord, coord, coord, coord)
def test_motion_validity_properties(ax, ay, bx, by):
    a, b = np.array([ax, ay]), np.array([bx, by])
    ok = is_motion_valid(thin, Motion(a, b))
    assert ok == is_motion_valid(thin, Motion(b, a))
    if ok:
        assert is_valid(thin, a) and is_valid(thin, b)
    finer = World(thin.bounds, thin.obstacles, motion_check_resolution=0.15)
    if not ok:
        assert not is_motion_valid(finer, Motion(a, b))


def test_sample_free_empty_world(empty_world, rng):
    q, attempts = sample_free_counted(empty_world, rng)
    assert attempts == 1 and is_valid(empty_world, q)


def test_sample_free_mostly_blocked():
    # free square of side 1 in a 10 x 10 box: 1% free
    obstacles = [rect(0, 0, 10, 4.5), rect(0, 5.5, 10, 10), rect(0, 4.5, 4.5, 5.5), rect(5.5, 4.5, 10, 5.5)]
    w = World(bounds=[[0, 10], [0, 10]], obstacles=obstacles)
    rng = np.random.default_rng(7)
    trials = 2000
    attempts = 0
    for _ in range(trials):
        q, k = sample_free_counted(w, rng)
        assert is_valid(w, q)
        attempts += k
    # free interior excludes the boundary; free fraction p = 0.01
    p = 0.01
    rate = trials / attempts
    # geometric number of attempts: var of mean = (1 - p) / p^2 / trials
    mean_sd = math.sqrt((1 - p) / p ** 2 / trials)
    assert abs(attempts / trials - 1 / p) < 3 * mean_sd
    assert rate == pytest.approx(p, rel=0.1)


def test_sample_free_acceptance_rate_binomial():
    # quarter of the box blocked; acceptance over 1e5 uniform draws is the free fraction
    w = World(bounds=[[0, 10], [0, 10]], obstacles=[rect(0, 0, 5, 5)])
    rng = np.random.default_rng(11)
    qs = rng.uniform(0, 10, (100_000, 2))
    acc = cspace.batch_valid(w, qs).mean()
    sd = math.sqrt(0.75 * 0.25 / 100_000)
    assert abs(acc - 0.75) < 3 * sd


def test_sample_free_exhausted():
    w = World(bounds=[[0, 1], [0, 1]], obstacles=[rect(-1, -1, 2, 2)])
    with pytest.raises(SamplingExhausted):
        sample_free(w, np.random.default_rng(0), max_rejections=500)


def test_world_invariants():
    with pytest.raises(ContractViolation):
        World(bounds=[[0, 1], [0, 1], [0, 1]])
    with pytest.raises(ContractViolation):
        World(bounds=[[0, 1], [0, 1]], motion_check_resolution=0)
    w = World(bounds=None, robot=PlanarArm((1.0, 2.0, 0.5)))
    assert w.d == 3
