"""
API v1: /health, /kinematics, /analysis
"""
