# src/manipulator/conditioning.py

"""
특이값과 조건수 κ = σ_max / σ_min, 역조건수 index = 1/κ ∈ [0, 1].
특이값은 M·Mᵀ 의 고유값을 순환 Jacobi 회전으로 구한 뒤 제곱근을 취합니다.
M·Mᵀ 의 가장 작은 고유값은 절대오차가 eps·σ_max² 이므로 σ_min 은 |det M| / (σ_1 σ_2) 로 구합니다.
모든 함수는 (..., 3, 3) 배열에 일괄 적용할 수 있습니다.
"""

import logging
import math
from typing import Tuple

import numpy as np

from schemas.manipulator_schemas import KappaVariant
from .exceptions import NonFiniteException
from .state import ConditioningReport

logger = logging.getLogger(__name__)

OFF_DIAGONAL_TOLERANCE = 1e-14
MAX_SWEEPS = 50

_PAIRS = ((0, 1), (0, 2), (1, 2))


def _require_finite(matrix: np.ndarray) -> None:
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteException("행렬에 유한하지 않은 값이 있습니다")


def symmetric_eigenvalues(S: np.ndarray) -> np.ndarray:
    """대칭 3x3 (일괄) 행렬의 고유값. 정렬하지 않은 대각 성분을 반환합니다."""
    S = np.array(S, dtype=float, copy=True)
    shape = S.shape[:-2]
    S = S.reshape(-1, 3, 3)
    scale = np.sqrt(np.sum(S * S, axis=(1, 2)))

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for sweep in range(MAX_SWEEPS):
            off = np.sqrt(2.0 * (S[:, 0, 1] ** 2 + S[:, 0, 2] ** 2 + S[:, 1, 2] ** 2))
            # 수렴한 행렬은 고정해 두어야 일괄 처리 구성과 무관하게 같은 비트가 나옵니다
            active = off > OFF_DIAGONAL_TOLERANCE * scale
            if not np.any(active):
                break
            for p, q in _PAIRS:
                r = 3 - p - q
                apq = S[:, p, q]
                app = S[:, p, p]
                aqq = S[:, q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(active & (apq != 0.0), t, 0.0)
                t = np.where(np.isfinite(t), t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                arp = S[:, r, p].copy()
                arq = S[:, r, q].copy()
                S[:, p, p] = app - t * apq
                S[:, q, q] = aqq + t * apq
                S[:, p, q] = S[:, q, p] = np.where(active, 0.0, apq)
                S[:, r, p] = S[:, p, r] = c * arp - s * arq
                S[:, r, q] = S[:, q, r] = s * arp + c * arq
        else:
            logger.debug(f"Jacobi 반복이 {MAX_SWEEPS} sweep 안에 허용오차에 도달하지 못했습니다")

    eigenvalues = np.stack([S[:, 0, 0], S[:, 1, 1], S[:, 2, 2]], axis=-1)
    return eigenvalues.reshape(*shape, 3)


def determinant_batch(M: np.ndarray) -> np.ndarray:
    """첫 행 여인수 전개. 정수 계수의 특이 행렬은 정확히 0 이 됩니다."""
    M = np.asarray(M, dtype=float)
    minor0 = M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1]
    minor1 = M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0]
    minor2 = M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0]
    return M[..., 0, 0] * minor0 - M[..., 0, 1] * minor1 + M[..., 0, 2] * minor2


def singular_values_batch(M: np.ndarray) -> np.ndarray:
    """(..., 3, 3) 행렬들의 특이값을 내림차순으로 반환합니다."""
    M = np.asarray(M, dtype=float)
    _require_finite(M)
    # matmul 대신 원소별 합: 일괄 크기와 무관하게 같은 비트
    gram = sum(M[..., :, None, j] * M[..., None, :, j] for j in range(3))
    # 반올림으로 생긴 음의 고유값만 0 으로 자릅니다
    lam = np.maximum(symmetric_eigenvalues(gram), 0.0)
    sv = -np.sort(-np.sqrt(lam), axis=-1)
    top = sv[..., 0] * sv[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        smallest = np.where(top > 0.0, np.abs(determinant_batch(M)) / top, 0.0)
    sv[..., 2] = np.minimum(smallest, sv[..., 1])
    return sv


def singular_values_3(M) -> Tuple[float, float, float]:
    sv = singular_values_batch(np.asarray(M, dtype=float).reshape(3, 3))
    return float(sv[0]), float(sv[1]), float(sv[2])


def index_from_singular_values(sv: np.ndarray) -> np.ndarray:
    """σ_min / σ_max, 특이하면 0"""
    largest = sv[..., 0]
    smallest = sv[..., -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        index = np.where((smallest > 0.0) & (largest > 0.0), smallest / largest, 0.0)
    return np.clip(index, 0.0, 1.0)


def _report(sv: Tuple[float, float, float]) -> ConditioningReport:
    largest, smallest = sv[0], sv[-1]
    if smallest <= 0.0 or largest <= 0.0:
        return ConditioningReport(singular_values=sv, kappa=math.inf, index=0.0)
    kappa = largest / smallest
    return ConditioningReport(singular_values=sv, kappa=kappa, index=min(1.0, 1.0 / kappa))


def condition_report(M) -> ConditioningReport:
    """κ(M) 과 index = 1/κ. 같은 입력 비트에 대해 결정적입니다."""
    return _report(singular_values_3(M))


def diag_singular_values(diagonal: np.ndarray) -> np.ndarray:
    """대각 행렬의 특이값 |m_i|, 내림차순"""
    return -np.sort(-np.abs(np.asarray(diagonal, dtype=float)), axis=-1)


def diag_index_batch(diagonal: np.ndarray, variant: KappaVariant = KappaVariant.RATIO) -> np.ndarray:
    """B = diag(m) 의 역조건수. sqrt_ratio 는 √(β_max/β_min) 을 조건수로 씁니다."""
    index = index_from_singular_values(diag_singular_values(diagonal))
    if KappaVariant(variant) is KappaVariant.SQRT_RATIO:
        index = np.sqrt(index)
    return index


def diag_condition(B, variant: KappaVariant = KappaVariant.RATIO) -> ConditioningReport:
    """대각 행렬 B 의 조건수 (반복 계산 없음)"""
    B = np.asarray(B, dtype=float)
    _require_finite(B)
    betas = diag_singular_values(np.diag(B))
    sv = (float(betas[0]), float(betas[1]), float(betas[2]))
    if sv[2] <= 0.0:
        return ConditioningReport(singular_values=sv, kappa=math.inf, index=0.0)
    kappa = sv[0] / sv[2]
    if KappaVariant(variant) is KappaVariant.SQRT_RATIO:
        kappa = math.sqrt(kappa)
    return ConditioningReport(singular_values=sv, kappa=kappa, index=1.0 / kappa)
