# src/schemas/api/analysis_schemas.py

from pydantic import BaseModel, BeforeValidator, Field
from typing import Annotated, Any, Dict, List, Optional, Tuple

from schemas.manipulator_schemas import DesignParams, KappaVariant, MatrixKind, Pose, WorkingMode


def _parse_mode(value: Any) -> Any:
    if isinstance(value, str):
        return WorkingMode.from_string(value)
    return value


# "+-+" 문자열 또는 {"signs": [1, -1, 1]}
ModeField = Annotated[WorkingMode, BeforeValidator(_parse_mode)]


class PoseRequest(BaseModel):
    """자세 하나에 대한 요청. params 를 생략하면 기본 형상을 씁니다."""
    params: Optional[DesignParams] = None
    pose: Pose
    mode: ModeField = WorkingMode(signs=(1, 1, 1))
    L: Optional[float] = Field(None, gt=0, description="특성 길이 (mm), 생략 시 설정값")


class DirectRequest(BaseModel):
    params: Optional[DesignParams] = None
    rho: Tuple[float, float, float]
    seed: Pose


class LimbResponse(BaseModel):
    limb: int
    rho_mm: float
    b_mm: List[float]
    c_mm: List[float]
    l_mm: List[float]
    k_mm2: float
    m_mm: float
    gamma_rad: float


class InverseResponse(BaseModel):
    mode: str
    limbs: List[LimbResponse]


class ConditioningResponse(BaseModel):
    singular_values: Tuple[float, float, float]
    kappa: Optional[float] = Field(None, description="특이하면 null")
    index: float


class JacobiansResponse(BaseModel):
    matrices: Dict[str, Any]
    conditioning: Dict[str, Optional[ConditioningResponse]]


class ClassifyResponse(BaseModel):
    parallel_measure: float
    serial_measure: float
    classification: str
    serial_limbs: List[int]
    line_concurrency_residual_mm: Optional[float] = Field(None, description="두 직선이 평행하면 null")


class CharLenRequest(BaseModel):
    params: Optional[DesignParams] = None
    gamma: Optional[float] = Field(None, description="생략하면 등방 탐색으로 L 을 구합니다")
    mode: ModeField = WorkingMode(signs=(1, 1, 1))


class CharLenResponse(BaseModel):
    L_mm: float
    gamma_rad: float
    source: str
    index: Optional[float] = None
    pose: Optional[Pose] = None


class IsotropyRequest(BaseModel):
    params: Optional[DesignParams] = None
    mode: ModeField = WorkingMode(signs=(1, 1, 1))
    L_init: Optional[float] = Field(None, gt=0)
    target: MatrixKind = MatrixKind.K_BAR
    seeds: Optional[List[Pose]] = None


class IsotropyResponse(BaseModel):
    pose: Pose
    mode: str
    L_mm: float
    gamma_rad: float
    index: float
    isotropic: bool
    target: str
    restarts: int
    iterations: int
    structure_violations: List[str]
    equalities: Dict[str, float]
    pairwise_L: Dict[str, Optional[float]]


class SweepRequest(BaseModel):
    """스윕 요청. 생략한 항목은 설정 기본값을 씁니다."""
    params: Optional[DesignParams] = None
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None
    nx: Optional[int] = Field(None, ge=2)
    ny: Optional[int] = Field(None, ge=2)
    n_theta: Optional[int] = Field(None, ge=4)
    matrix_kind: MatrixKind = MatrixKind.A_BAR
    mode: ModeField = WorkingMode(signs=(1, 1, 1))
    L: Optional[float] = Field(None, gt=0)
    kappa_b_variant: KappaVariant = KappaVariant.RATIO
    refine_theta: bool = False
    levels: Optional[List[float]] = None


class SweepResponse(BaseModel):
    global_index: float
    grid: Dict[str, Any]
    loci: Optional[Dict[str, Any]] = None


class CompareRequest(BaseModel):
    params: Optional[DesignParams] = None
    nx: Optional[int] = Field(None, ge=2)
    ny: Optional[int] = Field(None, ge=2)
    n_theta: Optional[int] = Field(None, ge=4)
    L: Optional[float] = Field(None, gt=0)
    kappa_b_variant: KappaVariant = KappaVariant.RATIO
    modes: Optional[List[ModeField]] = None


class CompareResponse(BaseModel):
    modes: List[str]
    kinds: List[str]
    table: List[List[float]]
    separation: Dict[str, float]
