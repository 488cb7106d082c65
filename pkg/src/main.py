# src/main.py

import logging
from contextlib import asynccontextmanager
from fastapi import FastAPI

from api.v1.routers import analysis, health, kinematics
from core.config import get_settings
from core.logging_config import configure_logging

# 로깅 설정
configure_logging(get_settings().log_level)
logger = logging.getLogger(__name__)

@asynccontextmanager
async def lifespan(app: FastAPI):
    """애플리케이션 라이프사이클 관리"""
    settings = get_settings()
    logger.info("IsoCond 분석 서버 시작 중...")
    logger.info(
        f"기본값: L = {settings.characteristic_length_mm:.6f} mm, "
        f"격자 {settings.sweep_nx}x{settings.sweep_ny}x{settings.sweep_n_theta}"
    )
    try:
        logger.info("애플리케이션 초기화 완료")
        yield
    finally:
        logger.info("애플리케이션 종료 완료")

# FastAPI 앱 인스턴스 생성
app = FastAPI(
    title="IsoCond - 3-PRR Kinetostatic Analysis",
    description="평면 3-PRR 병렬 매니퓰레이터의 기구학, 특이성, 등방성, 등조건 곡선 분석",
    version="1.0.0",
    lifespan=lifespan
)

# 라우터 등록
app.include_router(
    health.router,
    prefix="/api/v1",
    tags=["Health"]
)

app.include_router(
    kinematics.router,
    prefix="/api/v1",
    tags=["Kinematics"]
)

app.include_router(
    analysis.router,
    prefix="/api/v1",
    tags=["Analysis"]
)

# 루트 엔드포인트
@app.get("/")
async def root():
    """루트 엔드포인트 - 기본 상태와 엔드포인트 목록"""
    return {
        "status": "healthy",
        "message": "Welcome to IsoCond!",
        "version": "1.0.0",
        "endpoints": {
            "health": "/api/v1/health",
            "ik": "/api/v1/kinematics/ik",
            "dk": "/api/v1/kinematics/dk",
            "jacobians": "/api/v1/kinematics/jacobians",
            "classify": "/api/v1/kinematics/classify",
            "charlen": "/api/v1/analysis/charlen",
            "isotropy": "/api/v1/analysis/isotropy",
            "sweep": "/api/v1/analysis/sweep",
            "compare": "/api/v1/analysis/compare"
        },
        "timestamp": __import__("datetime").datetime.now().isoformat()
    }

if __name__ == "__main__":
    import uvicorn

    settings = get_settings()

    # 런처가 읽는 형식으로 포트 번호 출력
    print(f"PYTHON_SERVER_PORT:{settings.api_port}")

    # FastAPI 서버 실행
    uvicorn.run(
        app,
        host=settings.api_host,
        port=settings.api_port,
        reload=False,
        log_level=settings.log_level.lower()
    )
