# src/api/v1/routers/analysis.py

from fastapi import APIRouter, HTTPException, Depends

from api.v1.routers.kinematics import domain_error
from manipulator.exceptions import ManipulatorException
from manipulator.geometry import default_params
from schemas.api.analysis_schemas import (
    CharLenRequest, CharLenResponse, CompareRequest, CompareResponse,
    IsotropyRequest, IsotropyResponse, SweepRequest, SweepResponse
)
from services.analysis.analysis_service import AnalysisService, get_analysis_service
from services.export.export_service import ExportService, get_export_service
import logging
import math

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analysis")


@router.post("/charlen", response_model=CharLenResponse)
def characteristic_length(
    request: CharLenRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> CharLenResponse:
    """γ 가 있으면 L = √2·r·sin γ, 없으면 등방 탐색 결과의 L"""
    try:
        length, result = service.characteristic_length(
            request.params or default_params(), request.gamma, request.mode
        )
        return CharLenResponse(
            L_mm=length.L,
            gamma_rad=length.gamma,
            source=length.source.value,
            index=None if result is None else result.index,
            pose=None if result is None else result.pose
        )
    except ManipulatorException as e:
        raise domain_error(e)


@router.post("/isotropy", response_model=IsotropyResponse)
def isotropy(
    request: IsotropyRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> IsotropyResponse:
    """등방 자세 탐색. 찾지 못해도 isotropic=false 로 응답합니다."""
    try:
        params = request.params or default_params()
        result = service.find_isotropic(params, request.mode, request.L_init, request.target, request.seeds)
        report = service.isotropy_report(params, result)
        return IsotropyResponse(
            pose=result.pose,
            mode=str(result.mode),
            L_mm=result.characteristic_length.L,
            gamma_rad=result.characteristic_length.gamma,
            index=result.index,
            isotropic=result.isotropic,
            target=result.target.value,
            restarts=result.restarts,
            iterations=result.iterations,
            structure_violations=result.structure.violations,
            equalities=report["equalities"],
            pairwise_L={k: None if math.isnan(v) else v for k, v in report["pairwise_L"].items()}
        )
    except ManipulatorException as e:
        raise domain_error(e)


@router.post("/sweep", response_model=SweepResponse)
def sweep(
    request: SweepRequest,
    service: AnalysisService = Depends(get_analysis_service),
    exporter: ExportService = Depends(get_export_service)
) -> SweepResponse:
    """격자 스윕, 선택적 등조건 곡선, 전역 지표"""
    try:
        spec = service.default_spec(
            x_range=request.x_range,
            y_range=request.y_range,
            nx=request.nx,
            ny=request.ny,
            n_theta=request.n_theta,
            matrix_kind=request.matrix_kind,
            mode=request.mode,
            L=request.L,
            kappa_b_variant=request.kappa_b_variant,
            refine_theta=request.refine_theta
        )
        grid, loci, value = service.sweep(request.params or default_params(), spec, request.levels)
        return SweepResponse(
            global_index=value,
            grid=exporter.grid_to_dict(grid),
            loci=None if loci is None else exporter.loci_to_dict(loci)
        )
    except ManipulatorException as e:
        raise domain_error(e)
    except ValueError as e:
        raise HTTPException(status_code=422, detail={"error": type(e).__name__, "message": str(e)})


@router.post("/compare", response_model=CompareResponse)
def compare(
    request: CompareRequest,
    service: AnalysisService = Depends(get_analysis_service)
) -> CompareResponse:
    """작업 모드별 전역 지표 표 (행: 모드, 열: 행렬 종류)"""
    try:
        template = service.default_spec(
            nx=request.nx,
            ny=request.ny,
            n_theta=request.n_theta,
            L=request.L,
            kappa_b_variant=request.kappa_b_variant
        )
        comparison = service.compare(request.params or default_params(), template, request.modes)
        return CompareResponse(
            modes=[str(mode) for mode in comparison.modes],
            kinds=[kind.value for kind in comparison.kinds],
            table=comparison.table.tolist(),
            separation={kind.value: value for kind, value in comparison.separation().items()} if len(comparison.modes) > 1 else {}
        )
    except ManipulatorException as e:
        raise domain_error(e)
