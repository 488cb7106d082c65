# src/core/config.py

"""
분석 기본값 설정. 환경변수 (ISOCOND_ 접두사) 또는 .env 파일로 덮어쓸 수 있습니다.
"""

import math
from functools import lru_cache
from typing import Optional, Tuple

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class AnalysisSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ISOCOND_", env_file=".env", extra="ignore")

    log_level: str = "INFO"
    params_path: Optional[str] = None

    # 특이 판정
    parallel_threshold: float = Field(1e-8, gt=0)
    serial_threshold: float = Field(1e-9, gt=0)

    # 스윕
    characteristic_length_mm: float = Field(math.sqrt(2.0) * 100.0, gt=0)
    sweep_x_range: Tuple[float, float] = (-300.0, 300.0)
    sweep_y_range: Tuple[float, float] = (-300.0, 300.0)
    sweep_nx: int = Field(101, ge=2)
    sweep_ny: int = Field(101, ge=2)
    sweep_n_theta: int = Field(120, ge=4)
    sweep_workers: int = Field(0, ge=0)

    # 등방 자세 탐색
    isotropy_tolerance: float = Field(1e-4, gt=0)
    optimizer_max_iterations: int = Field(4000, ge=1)
    optimizer_polish_rounds: int = Field(3, ge=0)
    optimizer_max_seeds: int = Field(8, ge=1)
    isotropy_early_stop: bool = True

    # HTTP 서버
    api_host: str = "127.0.0.1"
    api_port: int = 35816


@lru_cache
def get_settings() -> AnalysisSettings:
    return AnalysisSettings()
