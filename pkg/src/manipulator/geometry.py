# src/manipulator/geometry.py

"""
고정 형상, 자세, 작업 모드와 평면 벡터 연산.
좌표계: O 원점, x 오른쪽, y 위, 각도는 +x 에서 반시계 방향. 길이는 mm, 각도는 rad.
"""

import itertools
import json
import logging
import math
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from schemas.manipulator_schemas import DesignParams, Pose, WorkingMode
from .exceptions import LimbIndexException

logger = logging.getLogger(__name__)

# 반시계 90° 회전 행렬 E
E = np.array([[0.0, -1.0], [1.0, 0.0]])

ROTATION_STEP = 2.0 * math.pi / 3.0


def default_params() -> DesignParams:
    """R = 200 mm, l = 200 mm, r = 100 mm 의 기본 형상을 반환합니다."""
    return DesignParams(R=200.0, l=200.0, r=100.0)


def rotate90(v) -> np.ndarray:
    """E·v = (-v_y, v_x). 마지막 축이 2 인 배열이면 일괄 적용됩니다."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def unit(angle) -> np.ndarray:
    angle = np.asarray(angle, dtype=float)
    return np.stack([np.cos(angle), np.sin(angle)], axis=-1)


def _limb_slot(i: int) -> int:
    if i not in (1, 2, 3):
        raise LimbIndexException(i)
    return i - 1


def base_anchor(params: DesignParams, i: int) -> np.ndarray:
    """A_i = R·u(base_angles[i])"""
    return params.anchors[_limb_slot(i)].copy()


def rail_direction(params: DesignParams, i: int) -> np.ndarray:
    """α_i 단위벡터"""
    return params.rails[_limb_slot(i)].copy()


def platform_attach(params: DesignParams, pose: Pose, i: int) -> np.ndarray:
    """c_i = p + r·u(platform_angles[i] + θ)"""
    slot = _limb_slot(i)
    return pose.position + params.r * unit(params.platform_offsets[slot] + pose.theta)


def platform_points(params: DesignParams, x, y, theta) -> np.ndarray:
    """
    자세 배열에 대한 c_i 일괄 계산.
    x, y, theta 는 같은 모양 S 로 브로드캐스트되며 결과는 (*S, 3, 2) 입니다.
    """
    x, y, theta = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(theta, float))
    p = np.stack([x, y], axis=-1)[..., None, :]
    return p + params.r * unit(theta[..., None] + params.platform_offsets)


def rotate_pose(pose: Pose, angle: float) -> Pose:
    """원점 O 를 중심으로 위치만 회전합니다. θ 는 바뀌지 않습니다 (limb 재번호로 흡수)."""
    c, s = math.cos(angle), math.sin(angle)
    return Pose(x=c * pose.x - s * pose.y, y=s * pose.x + c * pose.y, theta=pose.theta)


def rotate_scene(params: DesignParams, pose: Pose, angle: float) -> Tuple[DesignParams, Pose]:
    """베이스, 레일, 플랫폼을 모두 O 중심으로 angle 만큼 회전한 형상과 자세"""
    rotated = DesignParams(
        R=params.R,
        l=params.l,
        r=params.r,
        base_angles=tuple(a + angle for a in params.base_angles),
        platform_angles=params.platform_angles,
        rail_angles=tuple(a + angle for a in params.rail_angles),
    )
    moved = rotate_pose(pose, angle)
    return rotated, Pose(x=moved.x, y=moved.y, theta=pose.theta + angle)


class ModeCatalog(BaseModel):
    model_config = ConfigDict(frozen=True)

    modes: List[WorkingMode]
    classes: List[List[WorkingMode]]
    representatives: List[WorkingMode]

    def class_of(self, mode: WorkingMode) -> List[WorkingMode]:
        for members in self.classes:
            if mode in members:
                return members
        raise ValueError(f"카탈로그에 없는 작업 모드: {mode}")


def _orbit(mode: WorkingMode) -> set:
    orbit = set()
    current = mode
    for _ in range(3):
        orbit.add(current)
        orbit.add(current.negated())
        current = current.rotated()
    return orbit


def mode_catalog() -> ModeCatalog:
    """
    8 개 부호 조합을 부호 반전과 120°/240° 순환 회전으로 묶은 대칭 클래스.
    대표는 (+,+,+) 와 (-,+,+) 입니다.
    """
    modes = [WorkingMode(signs=signs) for signs in itertools.product((1, -1), repeat=3)]
    classes: List[List[WorkingMode]] = []
    seen = set()
    for mode in modes:
        if mode in seen:
            continue
        members = [m for m in modes if m in _orbit(mode)]
        seen.update(members)
        classes.append(members)
    representatives = [min(members, key=lambda m: (-m.signs.count(1), m.signs)) for members in classes]
    return ModeCatalog(modes=modes, classes=classes, representatives=representatives)


def canonical_modes() -> List[WorkingMode]:
    return mode_catalog().representatives


def load_params(path: Union[str, Path, None]) -> DesignParams:
    """JSON 문서에서 형상 파라미터를 읽습니다. 경로가 없으면 기본 형상을 사용합니다."""
    if path is None:
        return default_params()
    text = Path(path).read_text(encoding="utf-8")
    params = DesignParams.model_validate(json.loads(text))
    logger.info(f"형상 파라미터 로드 완료: {path} (R={params.R}, l={params.l}, r={params.r})")
    return params


def dump_params(params: DesignParams) -> str:
    return json.dumps(params.model_dump(mode="json", by_alias=True), indent=2)
