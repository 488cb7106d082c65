# src/api/v1/routers/health.py

from fastapi import APIRouter, Depends
from typing import Dict, Any

from core.config import AnalysisSettings, get_settings
from manipulator.geometry import default_params
import logging

logger = logging.getLogger(__name__)

router = APIRouter()

@router.get("/health")
async def health_check(settings: AnalysisSettings = Depends(get_settings)) -> Dict[str, Any]:
    """
    서버 상태와 현재 분석 기본값을 반환합니다.

    Returns:
        Dict: 상태 정보
    """
    logger.debug("✅ 헬스체크 요청")
    return {
        "status": "healthy",
        "message": "IsoCond 3-PRR kinetostatic analysis",
        "version": "1.0.0",
        "defaults": {
            "params": default_params().model_dump(mode="json", by_alias=True),
            "characteristic_length_mm": settings.characteristic_length_mm,
            "parallel_threshold": settings.parallel_threshold,
            "serial_threshold": settings.serial_threshold,
        },
        "timestamp": __import__("datetime").datetime.now().isoformat()
    }
