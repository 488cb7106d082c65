#!/usr/bin/env python3
"""
직렬 / 병렬 특이 검출 테스트
"""

import itertools
import math
import os
import sys

import numpy as np
import pytest
from scipy.optimize import brentq

# src 디렉토리를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from manipulator.exceptions import ParallelSingularException, UnreachableException
from manipulator.geometry import base_anchor, default_params, mode_catalog, rail_direction, rotate90, unit
from manipulator.kinematics import (
    PARALLEL_TOLERANCE, assemble_matrices, inverse_kinematics, solve_limbs, twist_from_rates
)
from manipulator.singularity import (
    LINES_PARALLEL, classify, find_parallel_singularities, line_concurrency_residual,
    locate_parallel_singularity
)
from manipulator.state import LimbState, SingularityClass
from schemas.manipulator_schemas import Pose, WorkingMode

PARAMS = default_params()
L_DEFAULT = math.sqrt(2.0) * 100.0
PLUS = WorkingMode.from_string("+++")


def _limb(limb, b, direction):
    b = np.asarray(b, dtype=float)
    l_vec = np.asarray(direction, dtype=float)
    return LimbState(limb=limb, rho=0.0, b=b, c=b + l_vec, l_vec=l_vec, k=0.0, m=1.0, gamma=1.0)


@pytest.fixture(scope="module")
def parallel_poses():
    """모든 작업 모드에서 x 방향 직선 스캔으로 찾은 병렬 특이 자세"""
    found = []
    for mode in mode_catalog().modes:
        for y in np.linspace(-150.0, 150.0, 7):
            for k in range(8):
                theta = 2.0 * math.pi * k / 8
                poses = find_parallel_singularities(PARAMS, mode, float(y), theta, (-300.0, 300.0))
                found.extend((mode, pose) for pose in poses)
    return found


def test_serial_singular_example():
    report = classify(PARAMS, Pose(x=-50, y=-100, theta=0), PLUS, L_DEFAULT)
    assert report.classification in (SingularityClass.SERIAL, SingularityClass.BOTH)
    assert report.serial_limbs[0] == 1
    assert report.serial_measure < 1e-12


def test_isotropic_pose_is_regular():
    report = classify(PARAMS, Pose(x=0, y=0, theta=0), PLUS, L_DEFAULT)
    assert report.classification is SingularityClass.REGULAR
    assert report.serial_limbs == ()
    assert report.parallel_measure > 0.1
    assert report.serial_measure == pytest.approx(math.sqrt(3) / 2, rel=1e-12)


def test_concurrent_lines():
    target = np.array([5.0, 5.0])
    starts = [(100.0, -20.0), (-80.0, 40.0), (10.0, 150.0)]
    limbs = [_limb(i + 1, b, 0.5 * (target - np.array(b))) for i, b in enumerate(starts)]
    assert line_concurrency_residual(limbs) < 1e-9


def test_generic_lines_are_not_concurrent():
    pose = Pose(x=20, y=30, theta=0.4)
    limbs = inverse_kinematics(PARAMS, pose, PLUS)
    assert line_concurrency_residual(limbs) > 1.0
    assert classify(PARAMS, pose, PLUS, L_DEFAULT).classification is SingularityClass.REGULAR


def test_parallel_lines():
    limbs = [_limb(i + 1, (0.0, float(i)), (1.0, 0.0)) for i in range(3)]
    assert line_concurrency_residual(limbs) == LINES_PARALLEL


def test_constructed_serial_singularities():
    """limb 1 의 B_1C_1 을 레일에 수직으로 두고 나머지 자세를 역산합니다."""
    rng = np.random.default_rng(20)
    A1, alpha1 = base_anchor(PARAMS, 1), rail_direction(PARAMS, 1)
    checked = 0
    for _ in range(2000):
        rho = rng.uniform(-250.0, 250.0)
        side = rng.choice([-1.0, 1.0])
        theta = rng.uniform(0.0, 2.0 * math.pi)
        c1 = A1 + rho * alpha1 + side * PARAMS.l * rotate90(alpha1)
        p = c1 - PARAMS.r * unit(PARAMS.platform_offsets[0] + theta)
        pose = Pose(x=float(p[0]), y=float(p[1]), theta=theta)
        mode = WorkingMode(signs=(1, int(rng.choice([-1, 1])), int(rng.choice([-1, 1]))))
        try:
            report = classify(PARAMS, pose, mode, L_DEFAULT)
        except UnreachableException:
            continue
        assert 1 in report.serial_limbs
        assert report.serial_measure < 1e-9
        assert report.classification in (SingularityClass.SERIAL, SingularityClass.BOTH)
        checked += 1
        if checked == 20:
            break
    assert checked == 20


def test_parallel_singularities_are_found(parallel_poses):
    assert len(parallel_poses) >= 20
    for mode, pose in parallel_poses:
        limbs = inverse_kinematics(PARAMS, pose, mode, strict=False)
        mats = assemble_matrices(PARAMS, pose, limbs, L_DEFAULT)
        assert mats.parallel_singular
        assert mats.J is None
        report = classify(PARAMS, pose, mode, L_DEFAULT)
        assert report.classification in (SingularityClass.PARALLEL, SingularityClass.BOTH)


def _homogeneous_lines(limbs):
    """직선 B_iC_i 의 동차 좌표 [n, −n·B/l] (n 은 단위 법선)"""
    rows = []
    for limb in limbs:
        n = rotate90(limb.l_vec) / np.linalg.norm(limb.l_vec)
        rows.append([n[0], n[1], -float(n @ limb.b) / PARAMS.l])
    return np.array(rows)


def _pairwise_sines(limbs):
    units = [limb.l_vec / np.linalg.norm(limb.l_vec) for limb in limbs]
    return [abs(u[0] * v[1] - u[1] * v[0]) for u, v in itertools.combinations(units, 2)]


def test_parallel_singularities_have_concurrent_lines(parallel_poses):
    separated = 0
    for mode, pose in parallel_poses:
        limbs = inverse_kinematics(PARAMS, pose, mode, strict=False)
        # 세 직선이 한 점(무한원점 포함)에서 만나면 동차 좌표 행렬식이 0 입니다
        assert abs(np.linalg.det(_homogeneous_lines(limbs))) < 1e-7
        residual = line_concurrency_residual(limbs)
        sines = _pairwise_sines(limbs)
        if residual == LINES_PARALLEL:
            assert max(sines) < 1e-6
        elif min(sines) >= 0.05:
            assert residual < 1e-3
            separated += 1
    assert separated >= 20


def _assembly_gap(x, y, theta, signs, branch):
    """
    다리 1, 2 의 직선 교점 Q 를 향하도록 B_3 = C_3 ± l·(Q − C_3)/|Q − C_3| 를 두었을 때
    B_3 가 레일 3 에서 벗어난 거리. 0 이면 세 직선이 Q 에서 만나는 조립이 존재합니다.
    """
    batch = solve_limbs(PARAMS, x, y, theta, (signs[0], signs[1], 1.0))
    if np.any(batch.disc[0, :2] < 0.0):
        return None
    b1, b2 = batch.b[0, 0], batch.b[0, 1]
    d1, d2 = batch.l_vec[0, 0], batch.l_vec[0, 1]
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) < 1e-6 * PARAMS.l ** 2:
        return None
    gap = b2 - b1
    q = b1 + (gap[0] * d2[1] - gap[1] * d2[0]) / cross * d1
    c3 = batch.c[0, 2]
    w = q - c3
    b3 = c3 + branch * PARAMS.l * w / np.linalg.norm(w)
    A3, alpha3 = base_anchor(PARAMS, 3), rail_direction(PARAMS, 3)
    v = b3 - A3
    return float(alpha3[0] * v[1] - alpha3[1] * v[0]), b3, c3


def _gap_value(x, y, theta, signs, branch):
    result = _assembly_gap(x, y, theta, signs, branch)
    return math.nan if result is None else result[0]


def test_constructed_parallel_singularities():
    """세 직선이 한 점에서 만나도록 조립한 자세는 병렬 특이로 분류됩니다."""
    checked = 0
    xs = np.linspace(-250.0, 250.0, 501)
    for y, theta, signs, branch in itertools.product(
        (-60.0, 0.0, 60.0),
        (0.3, 1.9, 3.5, 5.1),
        itertools.product((1.0, -1.0), repeat=2),
        (1.0, -1.0),
    ):
        gaps = np.array([_gap_value(x, y, theta, signs, branch) for x in xs])
        for i in range(len(xs) - 1):
            g0, g1 = gaps[i], gaps[i + 1]
            if not (np.isfinite(g0) and np.isfinite(g1)) or g0 * g1 > 0.0:
                continue
            try:
                root = brentq(_gap_value, xs[i], xs[i + 1], args=(y, theta, signs, branch), xtol=1e-13)
            except (ValueError, RuntimeError):
                continue
            result = _assembly_gap(root, y, theta, signs, branch)
            # 교점이 무한원점을 지나며 생긴 부호 변화는 근이 아닙니다
            if result is None or not abs(result[0]) <= 1e-9 * PARAMS.l:
                continue
            _, b3, c3 = result
            m3 = float((c3 - b3) @ rail_direction(PARAMS, 3))
            if abs(m3) < 1e-2 * PARAMS.l:
                continue
            mode = WorkingMode(signs=(int(signs[0]), int(signs[1]), 1 if m3 > 0 else -1))
            pose = Pose(x=float(root), y=y, theta=theta)
            limbs = inverse_kinematics(PARAMS, pose, mode, strict=False)
            np.testing.assert_allclose(limbs[2].b, b3, atol=1e-6)
            assert abs(np.linalg.det(_homogeneous_lines(limbs))) < 1e-9
            mats = assemble_matrices(PARAMS, pose, limbs, L_DEFAULT)
            assert mats.parallel_measure < PARALLEL_TOLERANCE
            report = classify(PARAMS, pose, mode, L_DEFAULT)
            assert report.classification in (SingularityClass.PARALLEL, SingularityClass.BOTH)
            checked += 1
    assert checked >= 10


def test_parallel_measure_vanishes_continuously():
    theta = 7.0 * math.pi / 4.0
    singular = find_parallel_singularities(PARAMS, PLUS, 0.0, theta, (-100.0, -40.0))
    x_star = min(singular, key=lambda pose: abs(pose.x + 68.974)).x

    def measure(offset):
        pose = Pose(x=x_star + offset, y=0.0, theta=theta)
        limbs = inverse_kinematics(PARAMS, pose, PLUS, strict=False)
        return assemble_matrices(PARAMS, pose, limbs, L_DEFAULT).parallel_measure

    for side in (1.0, -1.0):
        near, mid, far = measure(side * 1e-6), measure(side * 1e-4), measure(side * 1e-3)
        assert near < mid < far
        assert near < 1e-2 * far
    assert measure(0.0) < 1e-9



def test_twist_unavailable_at_parallel_singularity(parallel_poses):
    mode, pose = parallel_poses[0]
    limbs = inverse_kinematics(PARAMS, pose, mode, strict=False)
    mats = assemble_matrices(PARAMS, pose, limbs, L_DEFAULT)
    with pytest.raises(ParallelSingularException):
        twist_from_rates(mats, [1.0, 0.0, 0.0])


def test_locate_requires_sign_change():
    pose = Pose(x=0, y=0, theta=0)
    with pytest.raises(ValueError):
        locate_parallel_singularity(PARAMS, PLUS, pose, pose)
