# src/manipulator/sweep.py

"""
작업공간 격자 스윕: 각 노드 (x, y) 에서 θ 에 대해 최적인 역조건수와 그때의 θ,
그리고 도달 가능한 노드에 대한 평균 (전역 성능 지표).
"""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from schemas.manipulator_schemas import DesignParams, KappaVariant, MatrixKind, SweepSpec, WorkingMode
from .conditioning import diag_index_batch, index_from_singular_values, singular_values_batch
from .exceptions import EmptyWorkspaceException
from .geometry import canonical_modes
from .kinematics import SERIAL_TOLERANCE, direct_matrix_batch, solve_limbs
from .state import ModeComparison, SweepGrid

logger = logging.getLogger(__name__)

ALL_KINDS = (MatrixKind.A_BAR, MatrixKind.B, MatrixKind.K_BAR)
REFINE_TOLERANCE = 1e-8


def index_batch(
    params: DesignParams,
    x,
    y,
    theta,
    signs,
    kinds: Sequence[MatrixKind],
    L: float,
    kappa_b_variant: KappaVariant = KappaVariant.RATIO,
) -> Tuple[Dict[MatrixKind, np.ndarray], np.ndarray]:
    """
    자세 배열에 대한 행렬 종류별 역조건수. 역기구학은 한 번만 풉니다.
    반환: ({kind: index 배열}, 사용 가능 마스크). 사용 불가능한 자세의 index 는 NaN 입니다.
    """
    batch = solve_limbs(params, x, y, theta, signs)
    available = batch.available(params.l, SERIAL_TOLERANCE)
    shape = available.shape

    result = {}
    need_direct = any(MatrixKind(k) is not MatrixKind.B for k in kinds)
    if need_direct:
        A_bar = direct_matrix_batch(batch, L)[available]
        m = batch.m[available]
    for kind in kinds:
        kind = MatrixKind(kind)
        values = np.full(shape, np.nan)
        if kind is MatrixKind.B:
            values[available] = diag_index_batch(batch.m[available], kappa_b_variant)
        elif kind is MatrixKind.A_BAR:
            values[available] = index_from_singular_values(singular_values_batch(A_bar))
        else:
            values[available] = index_from_singular_values(singular_values_batch(A_bar / m[..., None]))
        result[kind] = values
    return result, available


def _best_over_theta(values: np.ndarray, thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """마지막 축 (θ) 에 대한 최대값과 argmax θ. 동률이면 가장 작은 θ 표본을 고릅니다."""
    reachable = np.any(~np.isnan(values), axis=-1)
    filled = np.where(np.isnan(values), -np.inf, values)
    arg = np.argmax(filled, axis=-1)
    best = np.take_along_axis(filled, arg[..., None], axis=-1)[..., 0]
    best = np.where(reachable, best, np.nan)
    best_theta = np.where(reachable, thetas[arg], np.nan)
    return best, best_theta


def _refine_node(
    params: DesignParams, x: float, y: float, theta: float, step: float, signs, kind: MatrixKind, L: float, variant
) -> Tuple[float, float]:
    """격자 argmax 주변 [θ − step, θ + step] 에서 황금분할 탐색"""

    def negative(t: float) -> float:
        values, _ = index_batch(params, x, y, t, signs, (kind,), L, variant)
        value = values[kind][0]
        return 0.0 if np.isnan(value) else -float(value)

    try:
        found = minimize_scalar(
            negative,
            bracket=(theta - step, theta, theta + step),
            method="golden",
            options={"xtol": REFINE_TOLERANCE},
        )
    except ValueError:
        return -negative(theta), theta
    return -float(found.fun), float(found.x)


def _evaluate(
    params: DesignParams,
    xs: np.ndarray,
    ys: np.ndarray,
    thetas: np.ndarray,
    mode: WorkingMode,
    kinds: Sequence[MatrixKind],
    L: float,
    variant: KappaVariant,
    refine: bool,
) -> Tuple[Dict[MatrixKind, Tuple[np.ndarray, np.ndarray]], np.ndarray]:
    """점 목록 (xs, ys) 에 대한 θ 최적값. 반환: ({kind: (values, best_theta)}, reachable)"""
    X = np.repeat(xs[:, None], len(thetas), axis=1)
    Y = np.repeat(ys[:, None], len(thetas), axis=1)
    T = np.broadcast_to(thetas, X.shape)
    per_kind, available = index_batch(params, X, Y, T, mode.signs, kinds, L, variant)
    reachable = np.any(available, axis=-1)

    out = {}
    step = thetas[1] - thetas[0] if len(thetas) > 1 else math.pi
    for kind, values in per_kind.items():
        best, best_theta = _best_over_theta(values, thetas)
        if refine:
            for n in np.flatnonzero(reachable):
                refined, theta = _refine_node(
                    params, float(xs[n]), float(ys[n]), float(best_theta[n]), step, mode.signs, kind, L, variant
                )
                if refined > best[n]:
                    best[n], best_theta[n] = refined, theta
        out[kind] = (best, best_theta)
    return out, reachable


def evaluate_points(params: DesignParams, points, spec: SweepSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    임의의 점 (N, 2) 에서 spec 의 θ 표본, 작업 모드, 행렬 종류로 최적 index 를 구합니다.
    반환: (values, best_theta, reachable), 도달 불가능한 점은 NaN
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    out, reachable = _evaluate(
        params,
        points[:, 0],
        points[:, 1],
        spec.thetas,
        spec.mode,
        (spec.matrix_kind,),
        spec.L,
        spec.kappa_b_variant,
        spec.refine_theta,
    )
    values, best_theta = out[spec.matrix_kind]
    return values, best_theta, reachable


def sweep_kinds(
    params: DesignParams, spec: SweepSpec, kinds: Iterable[MatrixKind] = ALL_KINDS, workers: int = 0
) -> Dict[MatrixKind, SweepGrid]:
    """
    여러 행렬 종류를 한 번의 역기구학으로 스윕합니다 (spec.matrix_kind 는 무시).
    행 단위로 병렬 계산한 뒤 인덱스 순서로 조립하므로 결과는 실행 순서와 무관합니다.
    """
    kinds = tuple(MatrixKind(k) for k in kinds)
    xs, ys, thetas = spec.xs, spec.ys, spec.thetas
    started = time.perf_counter()

    def row(j: int):
        return _evaluate(
            params,
            xs,
            np.full(spec.nx, ys[j]),
            thetas,
            spec.mode,
            kinds,
            spec.L,
            spec.kappa_b_variant,
            spec.refine_theta,
        )

    max_workers = workers if workers > 0 else (os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(row, range(spec.ny)))

    reachable = np.stack([r[1] for r in rows])
    grids = {}
    for kind in kinds:
        values = np.stack([r[0][kind][0] for r in rows])
        best_theta = np.stack([r[0][kind][1] for r in rows])
        grids[kind] = SweepGrid(
            spec=spec.model_copy(update={"matrix_kind": kind}),
            values=values,
            reachable=reachable,
            best_theta=best_theta,
        )

    logger.debug(
        f"스윕 완료: 모드 {spec.mode}, {spec.nx}x{spec.ny}x{spec.n_theta}, "
        f"도달 노드 {int(np.count_nonzero(reachable))}, {time.perf_counter() - started:.2f}s"
    )
    return grids


def sweep(params: DesignParams, spec: SweepSpec, workers: int = 0) -> SweepGrid:
    return sweep_kinds(params, spec, (spec.matrix_kind,), workers)[spec.matrix_kind]


def global_index(grid: SweepGrid) -> float:
    """도달 가능한 노드 값의 산술 평균"""
    if not np.any(grid.reachable):
        raise EmptyWorkspaceException("도달 가능한 노드가 없습니다")
    return float(np.mean(grid.values[grid.reachable]))


def compare_modes(
    params: DesignParams,
    template: SweepSpec,
    modes: Optional[List[WorkingMode]] = None,
    workers: int = 0,
) -> ModeComparison:
    """작업 모드 (기본: 두 대표 모드) x 세 행렬 종류의 전역 지표 표"""
    modes = list(modes) if modes is not None else canonical_modes()
    table = np.empty((len(modes), len(ALL_KINDS)))
    for i, mode in enumerate(modes):
        grids = sweep_kinds(params, template.model_copy(update={"mode": mode}), ALL_KINDS, workers)
        for j, kind in enumerate(ALL_KINDS):
            table[i, j] = global_index(grids[kind])
    return ModeComparison(
        modes=modes,
        kinds=list(ALL_KINDS),
        table=table,
        kappa_b_variant=template.kappa_b_variant,
    )
