# src/manipulator/isotropy.py

"""
등방성 조건 K̄K̄ᵀ = τ²I 의 잔차, 특성 길이 L, 등방 자세 탐색.

플랫폼 중심이 O 에 있고 세 다리가 120° 대칭이면 모든 θ 에서
L = √2·r·sin(γ) 로 등방 자세가 됩니다 (γ = ∠B_iC_iP).
"""

import itertools
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from schemas.manipulator_schemas import TWO_PI, DesignParams, MatrixKind, Pose, WorkingMode
from .conditioning import index_from_singular_values, singular_values_batch
from .exceptions import (
    EmptyWorkspaceException,
    InvalidRadicandException,
    NonPositiveException,
    SerialSingularException,
)
from .geometry import unit
from .kinematics import SERIAL_TOLERANCE, direct_matrix_batch, inverse_kinematics, solve_limbs
from .state import (
    CharacteristicLength,
    IsotropyResidual,
    IsotropyResult,
    KinematicMatrices,
    LengthSource,
    LimbState,
    StructureReport,
)

logger = logging.getLogger(__name__)

ISOTROPY_TOLERANCE = 1e-4
STRUCTURE_TOLERANCE = 1e-9
SEED_GRID = (5, 5, 8)
SIMPLEX_STEP = 0.05
SIMPLEX_XATOL = 1e-10
SIMPLEX_FATOL = 1e-15
MAX_ITERATIONS = 4000
POLISH_ROUNDS = 3
MAX_SEEDS = 8
# 도달 불가능 / 직렬 특이 / L ≤ 0 에서의 목적함수 값
PENALTY = 1.0
# sin(π) 의 반올림 값 (1.2e-16) 도 0 으로 봅니다
SINE_FLOOR = 1e-12


def characteristic_length_closed(r: float, gamma: float) -> CharacteristicLength:
    """L = √2·r·sin(γ)"""
    s = math.sin(gamma)
    if not s > SINE_FLOOR or not r > 0.0:
        raise NonPositiveException(f"특성 길이가 양수가 아닙니다 (r={r}, sin γ={s:.3e})")
    return CharacteristicLength(L=math.sqrt(2.0) * r * s, gamma=gamma, source=LengthSource.CLOSED_FORM)


def characteristic_length_pairwise(limbs: Sequence[LimbState], pair: Tuple[int, int] = (1, 2)) -> float:
    """L = √(−k_i k_j / l_iᵀl_j), pair 는 1부터 시작하는 다리 번호"""
    first, second = limbs[pair[0] - 1], limbs[pair[1] - 1]
    dot = float(first.l_vec @ second.l_vec)
    if dot == 0.0:
        raise InvalidRadicandException(f"l_{pair[0]}ᵀl_{pair[1]} = 0 입니다")
    radicand = -first.k * second.k / dot
    if radicand < 0.0:
        raise InvalidRadicandException(f"근호 안이 음수입니다: {radicand:.6e}")
    # −k_i k_j 가 −0.0 이면 sqrt 도 −0.0 입니다
    return math.sqrt(radicand) + 0.0


def isotropy_residual_of(k_bar: np.ndarray) -> IsotropyResidual:
    gram = k_bar @ k_bar.T
    diagonal = np.diag(gram)
    mean = float(np.mean(diagonal))
    off = max(abs(gram[i, j]) for i, j in itertools.combinations(range(3), 2))
    return IsotropyResidual(
        diag_spread=float(np.max(diagonal) - np.min(diagonal)) / mean,
        off_diag=float(off) / mean,
        tau=mean,
    )


def isotropy_residual(mats: KinematicMatrices) -> IsotropyResidual:
    if mats.K_bar is None:
        limb = int(np.argmin(np.abs(np.diag(mats.B)))) + 1
        raise SerialSingularException("B 가 특이하여 K̄ 가 없습니다", limbs=(limb,))
    return isotropy_residual_of(mats.K_bar)


def check_isotropy_structure(params: DesignParams, tol: float = STRUCTURE_TOLERANCE) -> StructureReport:
    """등방 자세에 필요한 구조 조건 점검. 길이 허용오차는 R 에 대한 상대값입니다."""

    def equilateral(points: np.ndarray) -> bool:
        sides = [np.linalg.norm(points[i] - points[j]) for i, j in itertools.combinations(range(3), 2)]
        return max(sides) - min(sides) <= tol * max(params.R, params.r)

    offsets = np.asarray(params.rail_angles) - np.asarray(params.base_angles)
    rails_along_sides = all(abs(math.remainder(o - offsets[0], math.pi)) <= tol for o in offsets[1:])
    return StructureReport(
        equilateral_base=equilateral(params.anchors),
        equilateral_platform=equilateral(params.r * unit(params.platform_offsets)),
        rails_along_sides=rails_along_sides,
        half_radius=abs(params.r - params.R / 2.0) <= tol * params.R,
    )


def isotropic_family_pose(
    params: DesignParams, theta: float = 0.0, mode: WorkingMode = WorkingMode(signs=(1, 1, 1))
) -> Tuple[Pose, CharacteristicLength]:
    """p = O, 방향 θ 의 대칭 자세와 그 자세에서의 닫힌 형태 L"""
    pose = Pose(x=0.0, y=0.0, theta=theta)
    limbs = inverse_kinematics(params, pose, mode)
    return pose, characteristic_length_closed(params.r, limbs[0].gamma)


def _objective_batch(params: DesignParams, signs, z: np.ndarray, target: MatrixKind) -> np.ndarray:
    """
    z = (x/l, y/l, θ, L/l) 의 배열에 대해 1 − index 를 계산합니다.
    도달 불가능, 직렬 특이, L ≤ 0 이면 PENALTY 입니다.
    """
    z = np.atleast_2d(z)
    scale = params.l
    L = z[:, 3] * scale
    batch = solve_limbs(params, z[:, 0] * scale, z[:, 1] * scale, z[:, 2], signs)
    valid = batch.available(scale, SERIAL_TOLERANCE) & (L > 0.0)

    values = np.full(len(z), PENALTY)
    if not np.any(valid):
        return values
    A_bar = direct_matrix_batch(batch, 1.0)[valid]
    A_bar[..., 2] /= L[valid, None]
    if MatrixKind(target) is MatrixKind.K_BAR:
        A_bar = A_bar / batch.m[valid][..., None]
    index = index_from_singular_values(singular_values_batch(A_bar))
    values[valid] = 1.0 - index
    return values


def _seed_points(params: DesignParams, L_init: float, seeds: Optional[Sequence[Pose]]) -> np.ndarray:
    if seeds is not None:
        return np.array([[s.x / params.l, s.y / params.l, s.theta, L_init / params.l] for s in seeds])
    nx, ny, nt = SEED_GRID
    half = params.R / 2.0
    xs = np.linspace(-half, half, nx)
    ys = np.linspace(-half, half, ny)
    thetas = TWO_PI * (np.arange(nt) / nt)
    return np.array(
        [[x / params.l, y / params.l, t, L_init / params.l] for x in xs for y in ys for t in thetas]
    )


def _simplex_run(fun, z0: np.ndarray, max_iterations: int, tolerance: float):
    """Nelder-Mead 한 번. 반환: (scipy 결과, 임계값에 처음 도달한 반복 번호 또는 None)"""
    simplex = np.vstack([z0, z0 + SIMPLEX_STEP * np.eye(len(z0))])
    progress = {"iteration": 0, "first": None}
    if fun(z0) < tolerance:
        progress["first"] = 0

    def callback(zk):
        progress["iteration"] += 1
        if progress["first"] is None and fun(zk) < tolerance:
            progress["first"] = progress["iteration"]

    result = minimize(
        fun,
        z0,
        method="Nelder-Mead",
        callback=callback,
        options={
            "initial_simplex": simplex,
            "xatol": SIMPLEX_XATOL,
            "fatol": SIMPLEX_FATOL,
            "maxiter": max_iterations,
            "adaptive": False,
        },
    )
    return result, progress["first"]


def find_isotropic(
    params: DesignParams,
    mode: WorkingMode,
    L_init: float = math.sqrt(2.0) * 100.0,
    target: MatrixKind = MatrixKind.K_BAR,
    seeds: Optional[Sequence[Pose]] = None,
    tolerance: float = ISOTROPY_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
    polish_rounds: int = POLISH_ROUNDS,
    max_seeds: int = MAX_SEEDS,
    early_stop: bool = True,
) -> IsotropyResult:
    """
    (x, y, θ, L) 에 대해 κ 를 최소화하는 등방 자세 탐색.
    시드는 초기 목적함수 값 순으로 시도하고 (같으면 시드 번호 순), 가장 좋은 결과를 반환합니다.
    index > 1 − tolerance 이면 등방으로 판정합니다. 찾지 못하면 isotropic=False 로 보고합니다.
    """
    if not L_init > 0.0:
        raise NonPositiveException(f"초기 특성 길이는 양수여야 합니다: {L_init}")
    target = MatrixKind(target)
    if target is MatrixKind.B:
        raise ValueError("등방 탐색 대상은 A_bar 또는 K_bar 입니다")

    structure = check_isotropy_structure(params)
    if structure.violations:
        logger.warning(f"⚠️ 구조 조건 불만족: {', '.join(structure.violations)}")

    signs = mode.signs

    def fun(z: np.ndarray) -> float:
        return float(_objective_batch(params, signs, z, target)[0])

    starts = _seed_points(params, L_init, seeds)
    initial = _objective_batch(params, signs, starts, target)
    order = np.argsort(initial, kind="stable")[:max_seeds]

    best_z, best_f, best_first, restarts, total_iterations = None, math.inf, None, 0, 0
    for seed_index in order:
        if initial[seed_index] >= PENALTY:
            continue
        z = starts[seed_index]
        first = None
        iterations = 0
        f = initial[seed_index]
        for _ in range(polish_rounds + 1):
            result, reached = _simplex_run(fun, z, max_iterations, tolerance)
            if first is None and reached is not None:
                first = iterations + reached
            iterations += int(result.nit)
            improved = result.fun < f
            if improved:
                z, f = result.x, float(result.fun)
            if not improved:
                break
        restarts += 1
        total_iterations += iterations
        logger.debug(f"시드 {seed_index}: 1 − index = {f:.3e}, 반복 {iterations}회")

        if f < best_f:
            best_z, best_f, best_first = z, f, (first if first is not None else iterations)
        if early_stop and best_f < tolerance:
            break

    if best_z is None:
        raise EmptyWorkspaceException(f"작업 모드 {mode} 에서 도달 가능한 시드가 없습니다")

    index = 1.0 - best_f
    isotropic = index > 1.0 - tolerance
    pose = Pose(x=float(best_z[0] * params.l), y=float(best_z[1] * params.l), theta=float(best_z[2]))
    L = float(best_z[3] * params.l)
    limbs = inverse_kinematics(params, pose, mode)
    gamma = float(np.mean([limb.gamma for limb in limbs]))
    if not isotropic:
        logger.warning(f"⚠️ 작업 모드 {mode} 에서 등방 자세를 찾지 못했습니다 (최대 index {index:.6f})")

    return IsotropyResult(
        pose=pose,
        mode=mode,
        characteristic_length=CharacteristicLength(L=L, gamma=gamma, source=LengthSource.OPTIMIZED),
        index=index,
        isotropic=isotropic,
        target=target,
        restarts=restarts,
        iterations=best_first,
        structure=structure,
    )


def isotropy_equalities(limbs: Sequence[LimbState], pose: Pose) -> List[Tuple[str, float]]:
    """
    등방 자세의 같음 조건 네 가지에 대한 상대 편차 (max − min) / max|값|:
    ‖l_i‖, ‖p − c_i‖, l_iᵀl_j, m_i m_j
    """
    p = pose.position
    pairs = list(itertools.combinations(range(3), 2))
    groups = {
        "limb_norms": [np.linalg.norm(limb.l_vec) for limb in limbs],
        "platform_radii": [np.linalg.norm(p - limb.c) for limb in limbs],
        "limb_dots": [limbs[i].l_vec @ limbs[j].l_vec for i, j in pairs],
        "m_products": [limbs[i].m * limbs[j].m for i, j in pairs],
    }
    report = []
    for name, values in groups.items():
        values = np.asarray(values, dtype=float)
        peak = np.max(np.abs(values))
        report.append((name, float((np.max(values) - np.min(values)) / peak) if peak > 0.0 else 0.0))
    return report
