"""
값 타입과 HTTP 요청/응답 스키마
"""
