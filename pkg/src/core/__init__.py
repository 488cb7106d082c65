# src/core/__init__.py

"""
코어 모듈 - 설정과 로깅
"""

from .config import AnalysisSettings, get_settings
from .logging_config import configure_logging

__all__ = [
    'AnalysisSettings',
    'get_settings',
    'configure_logging'
]
