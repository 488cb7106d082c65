# src/manipulator/kinematics.py

"""
역/순기구학과 A, B, Ā, K̄, J 행렬 조립.

각 다리의 폐루프 조건 ‖c_i − A_i − ρ_i α_i‖ = l 은 ρ_i 에 대한 2차식이고,
d = c_i − A_i 라 두면 두 근은 ρ = d·α ∓ √D 이며 이때 m_i = l_iᵀα_i = ±√D 입니다.
따라서 |m_i| 는 분기와 무관하고 작업 모드의 부호가 근을 고릅니다.
"""

import logging
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from schemas.manipulator_schemas import DesignParams, Pose, WorkingMode
from .conditioning import condition_report
from .exceptions import (
    ModeUnavailableException,
    NoConvergenceException,
    NonPositiveException,
    ParallelSingularException,
    SingularSystemException,
    UnreachableException,
)
from .geometry import platform_points, rotate90
from .state import KinematicMatrices, LimbState, Twist

logger = logging.getLogger(__name__)

SERIAL_TOLERANCE = 1e-9
PARALLEL_TOLERANCE = 1e-8
# 판별식이 자체 반올림 한계 안에 있으면 정확한 접촉(m = 0)으로 봅니다
TANGENCY_ROUNDOFF = 64.0 * np.finfo(float).eps

NEWTON_MAX_ITERATIONS = 50
NEWTON_TOLERANCE = 1e-10
NEWTON_STEP = 1e-7
NEWTON_CONDITION_LIMIT = 1e12


class LimbBatch(NamedTuple):
    """자세 N 개에 대한 다리 상태 배열. 다리 축은 항상 뒤에서 두 번째(또는 마지막)입니다."""
    p: np.ndarray        # (N, 2)
    c: np.ndarray        # (N, 3, 2)
    b: np.ndarray        # (N, 3, 2)
    l_vec: np.ndarray    # (N, 3, 2)
    rho: np.ndarray      # (N, 3)
    k: np.ndarray        # (N, 3)
    m: np.ndarray        # (N, 3)
    disc: np.ndarray     # (N, 3)

    @property
    def reachable(self) -> np.ndarray:
        return np.all(self.disc >= 0.0, axis=-1)

    def available(self, l: float, serial_tolerance: float = SERIAL_TOLERANCE) -> np.ndarray:
        """도달 가능하고 모든 |m_i| 가 직렬 특이 허용오차 이상인 자세"""
        return self.reachable & np.all(np.abs(self.m) >= serial_tolerance * l, axis=-1)


def solve_limbs(params: DesignParams, x, y, theta, signs) -> LimbBatch:
    """
    자세 배열 (x, y, theta) 와 부호 배열 signs (3,) 또는 (N, 3) 에 대한 일괄 역기구학.
    도달 불가능한 다리는 disc < 0 이며 나머지 값은 의미가 없습니다.
    """
    x, y, theta = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (x, y, theta))
    x, y, theta = np.broadcast_arrays(x, y, theta)
    signs = np.asarray(signs, dtype=float)

    c = platform_points(params, x, y, theta)
    d = c - params.anchors
    da = np.sum(d * params.rails, axis=-1)
    dd = np.sum(d * d, axis=-1)
    l2 = params.l * params.l
    disc = da * da - dd + l2
    noise = TANGENCY_ROUNDOFF * np.maximum(np.maximum(dd, l2), da * da)
    disc = np.where(np.abs(disc) <= noise, 0.0, disc)

    m = signs * np.sqrt(np.maximum(disc, 0.0))
    rho = da - m
    b = params.anchors + rho[..., None] * params.rails
    l_vec = c - b
    p = np.stack([x, y], axis=-1)
    k = np.sum(l_vec * rotate90(p[..., None, :] - c), axis=-1)
    return LimbBatch(p=p, c=c, b=b, l_vec=l_vec, rho=rho, k=k, m=m, disc=disc)


def limb_angles(batch: LimbBatch) -> np.ndarray:
    """γ_i = ∠B_i C_i P ∈ [0, π]"""
    u = batch.b - batch.c
    v = batch.p[..., None, :] - batch.c
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    dot = np.sum(u * v, axis=-1)
    return np.arctan2(np.abs(cross), dot)


def inverse_kinematics(
    params: DesignParams,
    pose: Pose,
    mode: WorkingMode,
    strict: bool = True,
    serial_tolerance: float = SERIAL_TOLERANCE,
) -> Tuple[LimbState, LimbState, LimbState]:
    """
    작업 모드 부호와 일치하는 근으로 세 다리를 풉니다.
    strict=False 이면 m_i = 0 (직렬 특이) 자세도 예외 없이 반환합니다.
    """
    batch = solve_limbs(params, pose.x, pose.y, pose.theta, mode.signs)
    for slot in range(3):
        if batch.disc[0, slot] < 0.0:
            raise UnreachableException("도달 불가능한 자세입니다 (판별식 < 0)", limb=slot + 1)
    if strict:
        for slot in range(3):
            if abs(batch.m[0, slot]) < serial_tolerance * params.l:
                raise ModeUnavailableException(
                    f"작업 모드 {mode} 의 분기가 없습니다 (m_i = 0, 직렬 특이)", limb=slot + 1
                )

    gamma = limb_angles(batch)
    return tuple(
        LimbState(
            limb=slot + 1,
            rho=float(batch.rho[0, slot]),
            b=batch.b[0, slot].copy(),
            c=batch.c[0, slot].copy(),
            l_vec=batch.l_vec[0, slot].copy(),
            k=float(batch.k[0, slot]),
            m=float(batch.m[0, slot]),
            gamma=float(gamma[0, slot]),
        )
        for slot in range(3)
    )


def closure_residuals(params: DesignParams, rho: np.ndarray, pose_array: np.ndarray) -> np.ndarray:
    """‖c_i(pose) − A_i − ρ_i α_i‖ − l"""
    c = platform_points(params, pose_array[0], pose_array[1], pose_array[2])
    b = params.anchors + np.asarray(rho, dtype=float)[:, None] * params.rails
    return np.linalg.norm(c - b, axis=-1) - params.l


def direct_kinematics(
    params: DesignParams,
    rho: Sequence[float],
    seed: Pose,
    max_iterations: int = NEWTON_MAX_ITERATIONS,
    tolerance: float = NEWTON_TOLERANCE,
) -> Pose:
    """
    폐루프 잔차 3 개에 대한 Newton 반복. 야코비안은 중앙차분(간격 1e-7·l)으로 구하며
    각도는 l 을 곱한 길이 단위로 스케일합니다.
    """
    rho = np.asarray(rho, dtype=float)
    scale = params.l
    step = NEWTON_STEP * scale
    z = np.array([seed.x, seed.y, seed.theta * scale])

    def residual(zz: np.ndarray) -> np.ndarray:
        return closure_residuals(params, rho, np.array([zz[0], zz[1], zz[2] / scale]))

    polished = False
    residual_norm = float("inf")
    for iteration in range(max_iterations):
        f = residual(z)
        residual_norm = float(np.max(np.abs(f)))
        if not np.isfinite(residual_norm):
            break
        if residual_norm <= tolerance * scale:
            if polished or residual_norm <= 1e-3 * tolerance * scale:
                logger.debug(f"순기구학 수렴: {iteration}회, 잔차 {residual_norm:.3e}")
                return Pose(x=float(z[0]), y=float(z[1]), theta=float(z[2] / scale))
            polished = True

        jac = np.empty((3, 3))
        for j in range(3):
            dz = np.zeros(3)
            dz[j] = step
            jac[:, j] = (residual(z + dz) - residual(z - dz)) / (2.0 * step)
        if not np.all(np.isfinite(jac)):
            break
        kappa = condition_report(jac).kappa
        if kappa > NEWTON_CONDITION_LIMIT:
            raise SingularSystemException("Newton 선형계가 특이합니다", condition=kappa)
        z = z + np.linalg.solve(jac, -f)

    raise NoConvergenceException(
        "순기구학이 수렴하지 않았습니다", iterations=max_iterations, residual=residual_norm
    )


def normalized_determinant(M: np.ndarray) -> np.ndarray:
    """|det M| / (행 노름의 곱) ∈ [0, 1] (Hadamard 부등식)"""
    M = np.asarray(M, dtype=float)
    norms = np.prod(np.linalg.norm(M, axis=-1), axis=-1)
    det = np.abs(np.linalg.det(M))
    with np.errstate(divide="ignore", invalid="ignore"):
        measure = np.where(norms > 0.0, det / norms, 0.0)
    return np.clip(measure, 0.0, 1.0)


def direct_matrix_batch(batch: LimbBatch, L: float = 1.0) -> np.ndarray:
    """행 i = [l_iᵀ, −k_i / L], shape (N, 3, 3). L = 1 이면 정규화하지 않은 A 입니다."""
    return np.concatenate([batch.l_vec, (-batch.k / L)[..., None]], axis=-1)


def inverse_direct_batch(A_bar: np.ndarray, m: np.ndarray) -> np.ndarray:
    """K̄ = B⁻¹Ā (행을 m_i 로 나눔)"""
    return A_bar / m[..., None]


def assemble_matrices(
    params: DesignParams,
    pose: Pose,
    limbs: Sequence[LimbState],
    L: float,
    parallel_tolerance: float = PARALLEL_TOLERANCE,
    serial_tolerance: float = SERIAL_TOLERANCE,
) -> KinematicMatrices:
    """
    A, B, Ā = A (3열 / L), K̄ = B⁻¹Ā, J = Ā⁻¹B 를 조립합니다.
    특이 자세에서는 해당 행렬을 채우지 않고 플래그만 세웁니다.
    """
    if not L > 0.0:
        raise NonPositiveException(f"특성 길이는 양수여야 합니다: {L}")

    p = pose.position
    A = np.array([[*limb.l_vec, -float(limb.l_vec @ rotate90(p - limb.c))] for limb in limbs])
    m = np.array([limb.m for limb in limbs])
    B = np.diag(m)
    A_bar = A.copy()
    A_bar[:, 2] /= L

    measure = float(normalized_determinant(A_bar))
    parallel_singular = measure < parallel_tolerance
    serial_singular = bool(np.min(np.abs(m)) < serial_tolerance * params.l)

    K_bar = None if serial_singular else inverse_direct_batch(A_bar, m)
    J = None if parallel_singular else np.linalg.solve(A_bar, B)
    return KinematicMatrices(
        A=A,
        B=B,
        A_bar=A_bar,
        K_bar=K_bar,
        J=J,
        L=float(L),
        parallel_measure=measure,
        parallel_singular=parallel_singular,
        serial_singular=serial_singular,
    )


def twist_from_rates(mats: KinematicMatrices, rho_dot: Sequence[float]) -> Twist:
    """t = J·ρ̇ (정규화 좌표 (ṗ, L·θ̇))"""
    if mats.J is None:
        raise ParallelSingularException("Ā 가 특이하여 twist 를 구할 수 없습니다")
    rho_dot = np.asarray(rho_dot, dtype=float)
    return Twist(normalized=mats.J @ rho_dot, L=mats.L)


def solve_pose(
    params: DesignParams, pose: Pose, mode: WorkingMode, L: float, strict: bool = True
) -> Tuple[Tuple[LimbState, LimbState, LimbState], KinematicMatrices]:
    """역기구학 후 행렬 조립까지 한 번에 수행합니다."""
    limbs = inverse_kinematics(params, pose, mode, strict=strict)
    return limbs, assemble_matrices(params, pose, limbs, L)
