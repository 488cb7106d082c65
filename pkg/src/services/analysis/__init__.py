"""
분석 서비스 패키지
"""
