#!/usr/bin/env python3
"""
형상, 자세, 작업 모드 테스트
"""

import math
import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

# src 디렉토리를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from manipulator.exceptions import LimbIndexException
from manipulator.geometry import (
    E, base_anchor, canonical_modes, default_params, dump_params, load_params, mode_catalog,
    platform_attach, platform_points, rail_direction, rotate90, rotate_pose, rotate_scene
)
from manipulator.kinematics import inverse_kinematics
from schemas.manipulator_schemas import DesignParams, Pose, WorkingMode


def test_default_params():
    params = default_params()
    assert (params.R, params.l, params.r) == (200.0, 200.0, 100.0)
    assert params.r == params.R / 2
    assert params.base_angles[0] == pytest.approx(math.pi / 2)


def test_first_anchor_on_y_axis():
    np.testing.assert_allclose(base_anchor(default_params(), 1), [0.0, 200.0], atol=1e-12)


def test_default_rails_are_base_plus_quarter_turn():
    params = default_params()
    np.testing.assert_allclose(rail_direction(params, 1), [-1.0, 0.0], atol=1e-15)
    for i in range(3):
        assert params.rail_angles[i] == pytest.approx(params.base_angles[i] + math.pi / 2)


def test_rotate90_matches_matrix_e():
    rng = np.random.default_rng(0)
    for v in rng.normal(size=(10, 2)):
        np.testing.assert_allclose(rotate90(v), E @ v)
        np.testing.assert_allclose(rotate90(rotate90(v)), -v)
    np.testing.assert_allclose(E @ E, -np.eye(2))
    np.testing.assert_array_equal(rotate90([1.0, 0.0]), [0.0, 1.0])


def test_limb_index_out_of_range():
    params = default_params()
    for bad in (0, 4):
        with pytest.raises(LimbIndexException):
            base_anchor(params, bad)
    with pytest.raises(IndexError):
        rail_direction(params, 5)


def test_platform_points_match_single_attach():
    params = default_params()
    pose = Pose(x=12.0, y=-7.0, theta=0.4)
    batch = platform_points(params, pose.x, pose.y, pose.theta)
    for i in (1, 2, 3):
        np.testing.assert_allclose(batch[i - 1], platform_attach(params, pose, i), atol=1e-12)
    np.testing.assert_allclose(platform_attach(params, Pose(x=0, y=0, theta=0), 1), [0.0, 100.0], atol=1e-12)


def test_invalid_params_rejected():
    with pytest.raises(ValidationError):
        DesignParams(R=0.0, l=200.0, r=100.0)
    with pytest.raises(ValidationError):
        DesignParams(R=200.0, l=-1.0, r=100.0)
    with pytest.raises(ValidationError):
        DesignParams(R=float("nan"), l=200.0, r=100.0)


def test_scaled_params_recompute_anchors():
    params = default_params()
    _ = params.anchors
    scaled = params.scaled(2.0)
    assert (scaled.R, scaled.l, scaled.r) == (400.0, 400.0, 200.0)
    np.testing.assert_allclose(scaled.anchors, 2.0 * params.anchors)


def test_pose_equivalence_mod_two_pi():
    pose = Pose(x=1.0, y=2.0, theta=0.3)
    assert pose.equivalent(Pose(x=1.0, y=2.0, theta=0.3 + 2 * math.pi))
    assert not pose.equivalent(Pose(x=1.0, y=2.0, theta=0.3 + math.pi))
    assert Pose(x=0, y=0, theta=7.0).theta == 7.0


def test_working_mode_parsing():
    mode = WorkingMode.from_string("+-+")
    assert mode.signs == (1, -1, 1)
    assert str(mode) == "+-+"
    assert str(mode.negated()) == "-+-"
    assert str(WorkingMode.from_string("-++").rotated()) == "+-+"
    with pytest.raises(ValueError):
        WorkingMode.from_string("++")
    with pytest.raises(ValueError):
        WorkingMode.from_string("+0+")
    with pytest.raises(ValidationError):
        WorkingMode(signs=(1, 0, 1))


def test_mode_catalog_classes():
    catalog = mode_catalog()
    assert len(catalog.modes) == 8
    assert sorted(len(members) for members in catalog.classes) == [2, 6]
    assert [str(m) for m in catalog.representatives] == ["+++", "-++"]
    assert [str(m) for m in canonical_modes()] == ["+++", "-++"]
    assert set(str(m) for m in catalog.class_of(WorkingMode.from_string("---"))) == {"+++", "---"}


def test_rotate_pose_three_times_is_identity():
    pose = Pose(x=37.0, y=-12.0, theta=0.2)
    turned = pose
    for _ in range(3):
        turned = rotate_pose(turned, 2 * math.pi / 3)
    assert turned.equivalent(pose, tol=1e-12)


def test_k_invariant_under_scene_rotation():
    params = default_params()
    pose = Pose(x=20.0, y=-15.0, theta=0.25)
    mode = WorkingMode.from_string("+-+")
    limbs = inverse_kinematics(params, pose, mode)
    for angle in (0.3, 1.7, -2.2):
        rotated_params, rotated_pose = rotate_scene(params, pose, angle)
        rotated = inverse_kinematics(rotated_params, rotated_pose, mode)
        for a, b in zip(limbs, rotated):
            assert b.k == pytest.approx(a.k, rel=1e-9)
            assert b.rho == pytest.approx(a.rho, rel=1e-9, abs=1e-9)


def test_params_json_roundtrip(tmp_path):
    params = DesignParams(R=180.0, l=210.0, r=90.0)
    path = tmp_path / "params.json"
    path.write_text(dump_params(params), encoding="utf-8")
    loaded = load_params(path)
    assert (loaded.R, loaded.l, loaded.r) == (180.0, 210.0, 90.0)
    assert loaded.rail_angles == pytest.approx(params.rail_angles)
    assert '"R_mm"' in dump_params(params)
    assert load_params(None).R == 200.0
