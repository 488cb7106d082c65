# src/services/__init__.py

"""
서비스 계층 - 분석과 내보내기
"""

from .analysis.analysis_service import AnalysisService, get_analysis_service
from .export.export_service import ExportService, get_export_service

__all__ = [
    'AnalysisService',
    'get_analysis_service',
    'ExportService',
    'get_export_service'
]
