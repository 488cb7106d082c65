# src/schemas/manipulator_schemas.py

import math
from enum import Enum
from functools import cached_property
from typing import Any, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi

# 정삼각형 꼭짓점 방향 (A_1 이 +y 축 위)
DEFAULT_ANGLES: Tuple[float, float, float] = (
    math.pi / 2,
    math.pi / 2 + TWO_PI / 3,
    math.pi / 2 + 2 * TWO_PI / 3,
)

Triple = Tuple[float, float, float]


def _unit(angles) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


class DesignParams(BaseModel):
    """
    3-PRR 매니퓰레이터의 고정 형상 파라미터 (길이 mm, 각도 rad).
    JSON 키는 R_mm, l_mm, r_mm, base_angles_rad, platform_angles_rad, rail_angles_rad 입니다.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True, allow_inf_nan=False)

    R: float = Field(..., gt=0, alias="R_mm", description="베이스 외접원 반지름 (A_i O 길이)")
    l: float = Field(..., gt=0, alias="l_mm", description="다리 길이 (B_i C_i 길이)")
    r: float = Field(..., gt=0, alias="r_mm", description="플랫폼 외접원 반지름 (C_i P 길이)")
    base_angles: Triple = Field(DEFAULT_ANGLES, alias="base_angles_rad")
    platform_angles: Triple = Field(DEFAULT_ANGLES, alias="platform_angles_rad")
    rail_angles: Triple = Field(..., alias="rail_angles_rad", description="프리즘 축 방향 α_i")

    @model_validator(mode="before")
    @classmethod
    def _default_rails(cls, data: Any) -> Any:
        """레일 방향이 없으면 베이스 각도 + π/2 (삼각형 변 방향)로 채웁니다."""
        if not isinstance(data, dict):
            return data
        if "rail_angles" in data or "rail_angles_rad" in data:
            return data
        base = data.get("base_angles", data.get("base_angles_rad", DEFAULT_ANGLES))
        data = dict(data)
        data["rail_angles"] = tuple(float(a) + math.pi / 2 for a in base)
        return data

    @cached_property
    def anchors(self) -> np.ndarray:
        """베이스 점 A_i, shape (3, 2)"""
        return self.R * _unit(self.base_angles)

    @cached_property
    def rails(self) -> np.ndarray:
        """레일 단위벡터 α_i, shape (3, 2)"""
        return _unit(self.rail_angles)

    @cached_property
    def platform_offsets(self) -> np.ndarray:
        """θ = 0 에서의 플랫폼 각도, shape (3,)"""
        return np.asarray(self.platform_angles, dtype=float)

    def scaled(self, factor: float) -> "DesignParams":
        """모든 길이를 factor 배 한 형상을 반환합니다."""
        # model_copy 는 캐시된 anchors 까지 복사하므로 새로 만듭니다
        return DesignParams(
            R=self.R * factor,
            l=self.l * factor,
            r=self.r * factor,
            base_angles=self.base_angles,
            platform_angles=self.platform_angles,
            rail_angles=self.rail_angles,
        )


class Pose(BaseModel):
    """엔드이펙터 자세: 위치 (x, y) mm, 방향 theta rad (정규화하지 않고 저장)"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    x: float
    y: float
    theta: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta], dtype=float)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def equivalent(self, other: "Pose", tol: float = 1e-9) -> bool:
        """θ 를 2π 로 나눈 나머지로 비교합니다."""
        dtheta = math.remainder(self.theta - other.theta, TWO_PI)
        return abs(self.x - other.x) <= tol and abs(self.y - other.y) <= tol and abs(dtheta) <= tol


class WorkingMode(BaseModel):
    """작업 모드: (m_1, m_2, m_3) 의 부호 세 개"""
    model_config = ConfigDict(frozen=True)

    signs: Tuple[int, int, int]

    @field_validator("signs")
    @classmethod
    def _check_signs(cls, value: Tuple[int, int, int]) -> Tuple[int, int, int]:
        if any(s not in (1, -1) for s in value):
            raise ValueError(f"부호는 +1 또는 -1 이어야 합니다: {value}")
        return value

    @classmethod
    def from_string(cls, text: str) -> "WorkingMode":
        """'+-+' 형태의 문자열을 파싱합니다."""
        text = text.strip()
        if len(text) != 3 or any(ch not in "+-" for ch in text):
            raise ValueError(f"작업 모드는 '+'/'-' 세 글자여야 합니다: '{text}'")
        return cls(signs=tuple(1 if ch == "+" else -1 for ch in text))

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def negated(self) -> "WorkingMode":
        return WorkingMode(signs=tuple(-s for s in self.signs))

    def rotated(self) -> "WorkingMode":
        """120° 회전 시 limb i 가 limb i+1 로 옮겨가므로 (s3, s1, s2) 를 반환합니다."""
        s1, s2, s3 = self.signs
        return WorkingMode(signs=(s3, s1, s2))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.signs, dtype=float)


class MatrixKind(str, Enum):
    A_BAR = "A_bar"
    B = "B"
    K_BAR = "K_bar"

    @classmethod
    def parse(cls, text: str) -> "MatrixKind":
        aliases = {"a": cls.A_BAR, "a_bar": cls.A_BAR, "b": cls.B, "k": cls.K_BAR, "k_bar": cls.K_BAR}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"알 수 없는 행렬 종류: '{text}' (A, B, K 중 하나)")


class KappaVariant(str, Enum):
    RATIO = "ratio"
    SQRT_RATIO = "sqrt_ratio"


class SweepSpec(BaseModel):
    """작업공간 격자 스윕 설정"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    x_range: Tuple[float, float] = (-300.0, 300.0)
    y_range: Tuple[float, float] = (-300.0, 300.0)
    nx: int = Field(101, ge=2)
    ny: int = Field(101, ge=2)
    n_theta: int = Field(120, ge=4)
    matrix_kind: MatrixKind = MatrixKind.A_BAR
    mode: WorkingMode = WorkingMode(signs=(1, 1, 1))
    L: float = Field(math.sqrt(2.0) * 100.0, gt=0)
    kappa_b_variant: KappaVariant = KappaVariant.RATIO
    refine_theta: bool = False

    @field_validator("x_range", "y_range")
    @classmethod
    def _check_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if not value[0] < value[1]:
            raise ValueError(f"구간의 하한은 상한보다 작아야 합니다: {value}")
        return value

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_range[0], self.y_range[1], self.ny)

    @property
    def thetas(self) -> np.ndarray:
        # k/n 을 먼저 계산해야 n_theta 를 두 배로 늘렸을 때 같은 각도가 비트 단위로 재현됩니다
        return TWO_PI * (np.arange(self.n_theta) / self.n_theta)
