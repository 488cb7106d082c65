"""
결과 파일 출력 서비스 패키지
"""
