"""
HTTP API 패키지
"""
