"""
평면 3-PRR 병렬 매니퓰레이터의 기구학, 특이성, 조건수 분석 패키지
"""
