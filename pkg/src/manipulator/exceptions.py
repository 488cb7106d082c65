# src/manipulator/exceptions.py

from typing import Iterable, Optional


class ManipulatorException(Exception):
    """3-PRR 해석 관련 기본 예외 클래스"""
    pass


class LimbException(ManipulatorException):
    """특정 다리(limb)에서 발생한 예외, limb 번호는 1부터 시작"""
    def __init__(self, message: str, limb: int):
        super().__init__(f"{message} (limb {limb})")
        self.limb = limb


class UnreachableException(LimbException):
    """역기구학 판별식이 음수인 경우, 해당 자세에 도달할 수 없음"""
    pass


class ModeUnavailableException(LimbException):
    """요청한 작업 모드(working mode)의 분기가 존재하지 않는 경우 (m_i = 0 포함)"""
    pass


class LimbIndexException(ManipulatorException, IndexError):
    """limb 번호가 1~3 범위를 벗어난 경우"""
    def __init__(self, limb: int):
        super().__init__(f"limb 번호는 1, 2, 3 중 하나여야 합니다: {limb}")
        self.limb = limb


class NoConvergenceException(ManipulatorException):
    """순기구학 Newton 반복이 수렴하지 않은 경우"""
    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (반복 {iterations}회, 잔차 {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class SingularSystemException(ManipulatorException):
    """Newton 선형계의 조건수가 한계를 넘은 경우"""
    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (조건수 {condition:.3e})")
        self.condition = condition


class ParallelSingularException(ManipulatorException):
    """정규화된 직접기구학 행렬 Ā 가 특이한 경우"""
    pass


class SerialSingularException(ManipulatorException):
    """역기구학 행렬 B 의 대각 성분이 0 인 경우"""
    def __init__(self, message: str, limbs: Optional[Iterable[int]] = None):
        self.limbs = tuple(limbs or ())
        if self.limbs:
            message = f"{message} (limb {', '.join(str(i) for i in self.limbs)})"
        super().__init__(message)


class NonFiniteException(ManipulatorException):
    """입력 행렬에 NaN 또는 inf 가 포함된 경우"""
    pass


class NonPositiveException(ManipulatorException):
    """특성 길이가 양수가 아닌 경우 (sin γ <= 0)"""
    pass


class InvalidRadicandException(ManipulatorException):
    """특성 길이 공식의 근호 안이 음수이거나 정의되지 않는 경우"""
    pass


class EmptyWorkspaceException(ManipulatorException):
    """스윕 격자에 도달 가능한 노드가 하나도 없는 경우"""
    pass


class InvalidLevelException(ManipulatorException, ValueError):
    """등조건 곡선 레벨이 (0, 1) 범위를 벗어난 경우"""
    pass
