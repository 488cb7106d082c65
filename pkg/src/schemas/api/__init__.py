"""
HTTP 요청/응답 모델 (기구학, 분석)
"""
