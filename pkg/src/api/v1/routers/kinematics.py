# src/api/v1/routers/kinematics.py

from fastapi import APIRouter, HTTPException, Depends

from manipulator.exceptions import ManipulatorException
from manipulator.geometry import default_params
from manipulator.singularity import line_concurrency_residual
from schemas.api.analysis_schemas import (
    ClassifyResponse, ConditioningResponse, DirectRequest, InverseResponse,
    JacobiansResponse, LimbResponse, PoseRequest
)
from schemas.manipulator_schemas import Pose
from services.analysis.analysis_service import AnalysisService, get_analysis_service
import logging
import math

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/kinematics")


def domain_error(e: ManipulatorException) -> HTTPException:
    """도메인 예외를 422 로 변환합니다."""
    logger.warning(f"⚠️ {type(e).__name__}: {e}")
    return HTTPException(status_code=422, detail={"error": type(e).__name__, "message": str(e)})


def conditioning_response(report) -> ConditioningResponse:
    return ConditioningResponse(
        singular_values=report.singular_values,
        kappa=None if math.isinf(report.kappa) else report.kappa,
        index=report.index,
    )


@router.post("/ik", response_model=InverseResponse)
def inverse_kinematics(
    request: PoseRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> InverseResponse:
    """자세와 작업 모드로 세 다리의 관절 변수를 구합니다."""
    try:
        limbs = service.inverse(request.params or default_params(), request.pose, request.mode)
        return InverseResponse(
            mode=str(request.mode),
            limbs=[LimbResponse(**limb.to_dict()) for limb in limbs]
        )
    except ManipulatorException as e:
        raise domain_error(e)


@router.post("/dk", response_model=Pose)
def direct_kinematics(
    request: DirectRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> Pose:
    """관절 변수 ρ 와 초기 자세로 순기구학을 풉니다."""
    try:
        return service.direct(request.params or default_params(), request.rho, request.seed)
    except ManipulatorException as e:
        raise domain_error(e)


@router.post("/jacobians", response_model=JacobiansResponse)
def jacobians(
    request: PoseRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> JacobiansResponse:
    """A, B, Ā, K̄, J 와 조건수 보고서"""
    try:
        report = service.jacobian_report(request.params or default_params(), request.pose, request.mode, request.L)
        return JacobiansResponse(
            matrices=report["matrices"].to_dict(),
            conditioning={
                kind: None if value is None else conditioning_response(value)
                for kind, value in report["conditioning"].items()
            }
        )
    except ManipulatorException as e:
        raise domain_error(e)


@router.post("/classify", response_model=ClassifyResponse)
def classify(
    request: PoseRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> ClassifyResponse:
    """직렬/병렬 특이 판정과 세 직선의 공점 잔차"""
    try:
        params = request.params or default_params()
        report = service.classify(params, request.pose, request.mode, request.L)
        limbs, _ = service.matrices(params, request.pose, request.mode, request.L)
        residual = line_concurrency_residual(limbs)
        return ClassifyResponse(
            parallel_measure=report.parallel_measure,
            serial_measure=report.serial_measure,
            classification=report.classification.value,
            serial_limbs=list(report.serial_limbs),
            line_concurrency_residual_mm=None if math.isinf(residual) else residual
        )
    except ManipulatorException as e:
        raise domain_error(e)
