# src/manipulator/singularity.py

"""
직렬 특이 (det B = 0, 어떤 다리의 B_iC_i 가 레일에 수직) 와
병렬 특이 (det Ā = 0, 세 직선 B_iC_i 가 한 점에서 만남) 의 검출과 정량화.
"""

import itertools
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from schemas.manipulator_schemas import DesignParams, Pose, WorkingMode
from .kinematics import (
    PARALLEL_TOLERANCE,
    SERIAL_TOLERANCE,
    assemble_matrices,
    direct_matrix_batch,
    inverse_kinematics,
    solve_limbs,
)
from .exceptions import ManipulatorException
from .state import LimbState, SingularityClass, SingularityReport

logger = logging.getLogger(__name__)

PARALLEL_LINES_TOLERANCE = 1e-12
# 두 직선이 평행하면 교점 잔차 대신 이 값을 돌려줍니다
LINES_PARALLEL = math.inf


def classify(
    params: DesignParams,
    pose: Pose,
    mode: WorkingMode,
    L: float,
    parallel_threshold: float = PARALLEL_TOLERANCE,
    serial_threshold: float = SERIAL_TOLERANCE,
) -> SingularityReport:
    """두 특이 지표를 계산하고 Regular / SerialSingular / ParallelSingular / Both 로 분류합니다."""
    limbs = inverse_kinematics(params, pose, mode, strict=False)
    mats = assemble_matrices(params, pose, limbs, L, parallel_threshold, serial_threshold)

    ratios = [min(1.0, abs(limb.m) / params.l) for limb in limbs]
    serial_measure = min(ratios)
    serial_limbs = tuple(limb.limb for limb, ratio in zip(limbs, ratios) if ratio < serial_threshold)
    parallel = mats.parallel_measure < parallel_threshold

    if parallel and serial_limbs:
        classification = SingularityClass.BOTH
    elif parallel:
        classification = SingularityClass.PARALLEL
    elif serial_limbs:
        classification = SingularityClass.SERIAL
    else:
        classification = SingularityClass.REGULAR

    return SingularityReport(
        parallel_measure=mats.parallel_measure,
        serial_measure=serial_measure,
        classification=classification,
        serial_limbs=serial_limbs,
    )


def _intersection(b1: np.ndarray, d1: np.ndarray, b2: np.ndarray, d2: np.ndarray):
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    sine = cross / (np.linalg.norm(d1) * np.linalg.norm(d2))
    if abs(sine) < PARALLEL_LINES_TOLERANCE:
        return None
    w = b2 - b1
    s = (w[0] * d2[1] - w[1] * d2[0]) / cross
    return b1 + s * d1


def line_concurrency_residual(limbs: Sequence[LimbState]) -> float:
    """
    세 직선 B_iC_i 의 두 개씩 교점 사이 최대 거리 (mm). 한 점에서 만나면 0 입니다.
    어느 두 직선이 평행하면 LINES_PARALLEL 을 반환합니다.
    """
    points = []
    for first, second in itertools.combinations(limbs, 2):
        point = _intersection(first.b, first.l_vec, second.b, second.l_vec)
        if point is None:
            return LINES_PARALLEL
        points.append(point)
    return max(float(np.linalg.norm(p - q)) for p, q in itertools.combinations(points, 2))


def _signed_determinant(params: DesignParams, mode: WorkingMode, pose: Pose) -> float:
    limbs = inverse_kinematics(params, pose, mode, strict=False)
    A = np.array([[*limb.l_vec, -limb.k] for limb in limbs])
    return float(np.linalg.det(A))


def _lerp(start: Pose, end: Pose, t: float) -> Pose:
    return Pose(
        x=start.x + t * (end.x - start.x),
        y=start.y + t * (end.y - start.y),
        theta=start.theta + t * (end.theta - start.theta),
    )


def locate_parallel_singularity(
    params: DesignParams,
    mode: WorkingMode,
    start: Pose,
    end: Pose,
    tolerance_mm: float = 1e-12,
) -> Pose:
    """
    직선 경로 start → end 위에서 det Ā 의 부호 변화를 이분법으로 좁혀 병렬 특이 자세를 찾습니다.
    det Ā 의 부호는 L 과 무관하므로 L 은 필요하지 않습니다.
    """
    f0 = _signed_determinant(params, mode, start)
    f1 = _signed_determinant(params, mode, end)
    if f0 == 0.0:
        return start
    if f1 == 0.0:
        return end
    if (f0 > 0.0) == (f1 > 0.0):
        raise ValueError("경로 양 끝에서 det Ā 의 부호가 같습니다")

    length = math.hypot(end.x - start.x, end.y - start.y) + params.l * abs(end.theta - start.theta)
    xtol = max(tolerance_mm / max(length, 1e-300), 4.0 * np.finfo(float).eps)
    t = bisect(lambda s: _signed_determinant(params, mode, _lerp(start, end, s)), 0.0, 1.0, xtol=xtol, maxiter=200)
    return _lerp(start, end, t)


def find_parallel_singularities(
    params: DesignParams,
    mode: WorkingMode,
    y: float,
    theta: float,
    x_range: Tuple[float, float],
    samples: int = 241,
    L: float = math.sqrt(2.0) * 100.0,
    parallel_threshold: float = PARALLEL_TOLERANCE,
) -> List[Pose]:
    """
    고정된 y, θ 의 x 방향 직선을 훑어 부호 변화 구간마다 병렬 특이 자세를 찾습니다.
    정규화된 |det Ā| 가 임계값 아래인 자세만 남깁니다 (직렬 특이를 지나며 생긴 부호 변화는 제외).
    """
    xs = np.linspace(x_range[0], x_range[1], samples)
    batch = solve_limbs(params, xs, y, theta, mode.signs)
    det = np.linalg.det(direct_matrix_batch(batch))
    reachable = batch.reachable

    found = []
    for j in range(samples - 1):
        if not (reachable[j] and reachable[j + 1]):
            continue
        if det[j] == 0.0 or (det[j] > 0.0) == (det[j + 1] > 0.0):
            continue
        start = Pose(x=float(xs[j]), y=y, theta=theta)
        end = Pose(x=float(xs[j + 1]), y=y, theta=theta)
        try:
            pose = locate_parallel_singularity(params, mode, start, end)
            limbs = inverse_kinematics(params, pose, mode, strict=False)
            mats = assemble_matrices(params, pose, limbs, L, parallel_threshold)
        except ManipulatorException as e:
            logger.debug(f"구간 [{xs[j]:.3f}, {xs[j + 1]:.3f}] 이분법 실패: {e}")
            continue
        if mats.parallel_singular:
            found.append(pose)
        else:
            logger.debug(f"구간 [{xs[j]:.3f}, {xs[j + 1]:.3f}] 의 부호 변화는 병렬 특이가 아닙니다")
    return found
