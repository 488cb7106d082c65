# src/manipulator/state.py

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from schemas.manipulator_schemas import KappaVariant, MatrixKind, Pose, SweepSpec, WorkingMode

_ARRAY_CONFIG = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _rows(matrix: Optional[np.ndarray]) -> Optional[List[List[float]]]:
    return None if matrix is None else [[float(v) for v in row] for row in matrix]


class LimbState(BaseModel):
    """역기구학으로 구한 한 다리의 상태 (길이 mm, 각도 rad)"""
    model_config = _ARRAY_CONFIG

    limb: int
    rho: float
    b: np.ndarray
    c: np.ndarray
    l_vec: np.ndarray
    k: float
    m: float
    gamma: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "limb": self.limb,
            "rho_mm": self.rho,
            "b_mm": self.b.tolist(),
            "c_mm": self.c.tolist(),
            "l_mm": self.l_vec.tolist(),
            "k_mm2": self.k,
            "m_mm": self.m,
            "gamma_rad": self.gamma,
        }


class KinematicMatrices(BaseModel):
    """
    자세 하나에서의 A, B, Ā, K̄, J 행렬.
    특이 자세에서는 K̄ (직렬 특이) 또는 J (병렬 특이) 가 None 으로 남습니다.
    """
    model_config = _ARRAY_CONFIG

    A: np.ndarray
    B: np.ndarray
    A_bar: np.ndarray
    K_bar: Optional[np.ndarray] = None
    J: Optional[np.ndarray] = None
    L: float
    parallel_measure: float
    parallel_singular: bool
    serial_singular: bool

    def to_dict(self) -> Dict[str, Any]:
        """디버깅용 row-major JSON 배열"""
        return {
            "L_mm": self.L,
            "A": _rows(self.A),
            "B": _rows(self.B),
            "A_bar": _rows(self.A_bar),
            "K_bar": _rows(self.K_bar),
            "J": _rows(self.J),
            "parallel_singular": self.parallel_singular,
            "serial_singular": self.serial_singular,
        }


class Twist(BaseModel):
    """플랫폼 twist. normalized = (ṗ, L·θ̇), raw = (ṗ, θ̇)"""
    model_config = _ARRAY_CONFIG

    normalized: np.ndarray
    L: float

    @property
    def raw(self) -> np.ndarray:
        return np.array([self.normalized[0], self.normalized[1], self.normalized[2] / self.L])


class ConditioningReport(BaseModel):
    """특이값(내림차순), 조건수 κ, 역조건수 index = 1/κ"""
    model_config = ConfigDict(frozen=True)

    singular_values: Tuple[float, float, float]
    kappa: float
    index: float

    @property
    def singular(self) -> bool:
        return math.isinf(self.kappa)


class SingularityClass(str, Enum):
    REGULAR = "Regular"
    SERIAL = "SerialSingular"
    PARALLEL = "ParallelSingular"
    BOTH = "Both"


class SingularityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    parallel_measure: float
    serial_measure: float
    classification: SingularityClass
    serial_limbs: Tuple[int, ...] = ()


class IsotropyResidual(BaseModel):
    """K̄K̄ᵀ = τ²I 로부터의 정규화된 편차. tau 필드는 τ² 값입니다."""
    model_config = ConfigDict(frozen=True)

    diag_spread: float
    off_diag: float
    tau: float

    def passes(self, tol: float) -> bool:
        return self.diag_spread < tol and self.off_diag < tol


class LengthSource(str, Enum):
    CLOSED_FORM = "closed_form"
    OPTIMIZED = "optimized"


class CharacteristicLength(BaseModel):
    model_config = ConfigDict(frozen=True)

    L: float
    gamma: float
    source: LengthSource


class StructureReport(BaseModel):
    """등방성 구조 조건 점검 결과"""
    model_config = ConfigDict(frozen=True)

    equilateral_base: bool
    equilateral_platform: bool
    rails_along_sides: bool
    half_radius: bool

    @property
    def violations(self) -> List[str]:
        names = {
            "equilateral_base": "베이스 A_i 가 정삼각형이 아님",
            "equilateral_platform": "플랫폼 C_i 가 정삼각형이 아님",
            "rails_along_sides": "레일이 베이스 삼각형의 변 방향이 아님",
            "half_radius": "r = R/2 조건 불만족 (직렬 특이에서 가장 먼 등방 자세 아님)",
        }
        return [text for key, text in names.items() if not getattr(self, key)]


class IsotropyResult(BaseModel):
    """
    등방 자세 탐색 결과. iterations 는 채택된 시드에서 등방 판정 임계값에
    처음 도달할 때까지의 simplex 반복 수입니다 (도달하지 못하면 전체 반복 수).
    """
    model_config = ConfigDict(frozen=True)

    pose: Pose
    mode: WorkingMode
    characteristic_length: CharacteristicLength
    index: float
    isotropic: bool
    target: MatrixKind
    restarts: int
    iterations: int
    structure: StructureReport


class SweepGrid(BaseModel):
    """
    격자 스윕 결과. 배열은 (ny, nx) 모양이며 행이 y, 열이 x 입니다.
    도달 불가능한 노드의 values / best_theta 는 NaN 입니다.
    """
    model_config = _ARRAY_CONFIG

    spec: SweepSpec
    values: np.ndarray
    reachable: np.ndarray
    best_theta: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return self.spec.xs

    @property
    def ys(self) -> np.ndarray:
        return self.spec.ys


class IsoLoci(BaseModel):
    """레벨별 등조건 곡선. polylines[i] 는 levels[i] 의 (N, 2) 꼭짓점 배열 목록입니다."""
    model_config = _ARRAY_CONFIG

    levels: List[float]
    polylines: List[List[np.ndarray]]
    closed: List[List[bool]]


class ModeComparison(BaseModel):
    """작업 모드 (행) x 행렬 종류 (열) 의 전역 지표 표"""
    model_config = _ARRAY_CONFIG

    modes: List[WorkingMode]
    kinds: List[MatrixKind]
    table: np.ndarray
    kappa_b_variant: KappaVariant

    def value(self, mode: WorkingMode, kind: MatrixKind) -> float:
        return float(self.table[self.modes.index(mode), self.kinds.index(kind)])

    def separation(self) -> Dict[MatrixKind, float]:
        """두 번째 모드에서 첫 번째 모드를 뺀 값 (분리 방향 보고용)"""
        return {kind: float(self.table[1, j] - self.table[0, j]) for j, kind in enumerate(self.kinds)}
