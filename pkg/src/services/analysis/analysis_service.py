# src/services/analysis/analysis_service.py

import logging
import math
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

from core.config import AnalysisSettings, get_settings
from manipulator import conditioning, isoloci, isotropy, kinematics, singularity, sweep
from manipulator.exceptions import ManipulatorException
from manipulator.geometry import canonical_modes, load_params
from manipulator.state import (
    CharacteristicLength,
    ConditioningReport,
    IsoLoci,
    IsotropyResult,
    KinematicMatrices,
    LimbState,
    ModeComparison,
    SingularityReport,
    SweepGrid,
)
from schemas.manipulator_schemas import DesignParams, KappaVariant, MatrixKind, Pose, SweepSpec, WorkingMode

logger = logging.getLogger(__name__)

PAIRS = ((1, 2), (1, 3), (2, 3))


class AnalysisService:
    """CLI 와 HTTP API 가 함께 쓰는 기구학/조건수 분석 로직"""

    def __init__(self, settings: Optional[AnalysisSettings] = None):
        self.settings = settings or get_settings()

    def load_params(self, path: Optional[str] = None) -> DesignParams:
        return load_params(path or self.settings.params_path)

    def default_spec(self, **overrides: Any) -> SweepSpec:
        """설정값으로 채운 SweepSpec. None 인 항목은 무시합니다."""
        s = self.settings
        values = {
            "x_range": s.sweep_x_range,
            "y_range": s.sweep_y_range,
            "nx": s.sweep_nx,
            "ny": s.sweep_ny,
            "n_theta": s.sweep_n_theta,
            "L": s.characteristic_length_mm,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return SweepSpec(**values)

    # 기구학

    def inverse(self, params: DesignParams, pose: Pose, mode: WorkingMode) -> Tuple[LimbState, ...]:
        return kinematics.inverse_kinematics(params, pose, mode, serial_tolerance=self.settings.serial_threshold)

    def direct(self, params: DesignParams, rho: Sequence[float], seed: Pose) -> Pose:
        return kinematics.direct_kinematics(params, rho, seed)

    def matrices(
        self, params: DesignParams, pose: Pose, mode: WorkingMode, L: Optional[float] = None
    ) -> Tuple[Tuple[LimbState, ...], KinematicMatrices]:
        L = L if L is not None else self.settings.characteristic_length_mm
        limbs = kinematics.inverse_kinematics(params, pose, mode, strict=False)
        mats = kinematics.assemble_matrices(
            params, pose, limbs, L, self.settings.parallel_threshold, self.settings.serial_threshold
        )
        return limbs, mats

    def jacobian_report(
        self,
        params: DesignParams,
        pose: Pose,
        mode: WorkingMode,
        L: Optional[float] = None,
        variant: KappaVariant = KappaVariant.RATIO,
    ) -> Dict[str, Any]:
        """행렬들과 Ā, B, K̄ 의 조건수 보고서"""
        limbs, mats = self.matrices(params, pose, mode, L)
        reports: Dict[str, Optional[ConditioningReport]] = {
            MatrixKind.A_BAR.value: conditioning.condition_report(mats.A_bar),
            MatrixKind.B.value: conditioning.diag_condition(mats.B, variant),
            MatrixKind.K_BAR.value: None if mats.K_bar is None else conditioning.condition_report(mats.K_bar),
        }
        return {"limbs": limbs, "matrices": mats, "conditioning": reports}

    def classify(
        self, params: DesignParams, pose: Pose, mode: WorkingMode, L: Optional[float] = None
    ) -> SingularityReport:
        return singularity.classify(
            params,
            pose,
            mode,
            L if L is not None else self.settings.characteristic_length_mm,
            self.settings.parallel_threshold,
            self.settings.serial_threshold,
        )

    # 등방성

    def find_isotropic(
        self,
        params: DesignParams,
        mode: WorkingMode,
        L_init: Optional[float] = None,
        target: MatrixKind = MatrixKind.K_BAR,
        seeds: Optional[List[Pose]] = None,
    ) -> IsotropyResult:
        s = self.settings
        started = time.perf_counter()
        result = isotropy.find_isotropic(
            params,
            mode,
            L_init if L_init is not None else s.characteristic_length_mm,
            target=target,
            seeds=seeds,
            tolerance=s.isotropy_tolerance,
            max_iterations=s.optimizer_max_iterations,
            polish_rounds=s.optimizer_polish_rounds,
            max_seeds=s.optimizer_max_seeds,
            early_stop=s.isotropy_early_stop,
        )
        logger.info(
            f"🔍 등방 탐색 완료: 모드 {mode}, index {result.index:.8f}, "
            f"L {result.characteristic_length.L:.6f} mm, {time.perf_counter() - started:.2f}s"
        )
        return result

    def characteristic_length(
        self, params: DesignParams, gamma: Optional[float] = None, mode: Optional[WorkingMode] = None
    ) -> Tuple[CharacteristicLength, Optional[IsotropyResult]]:
        """γ 가 주어지면 닫힌 형태, 아니면 등방 탐색으로 L 을 구합니다."""
        if gamma is not None:
            return isotropy.characteristic_length_closed(params.r, gamma), None
        result = self.find_isotropic(params, mode or WorkingMode(signs=(1, 1, 1)))
        return result.characteristic_length, result

    def isotropy_report(self, params: DesignParams, result: IsotropyResult) -> Dict[str, Any]:
        """찾은 자세에서의 같음 조건 편차, 쌍별 L, 닫힌 형태 L"""
        limbs = kinematics.inverse_kinematics(params, result.pose, result.mode, strict=False)
        pairwise = {}
        for pair in PAIRS:
            try:
                pairwise[f"{pair[0]}{pair[1]}"] = isotropy.characteristic_length_pairwise(limbs, pair)
            except ManipulatorException as e:
                logger.warning(f"⚠️ 쌍 {pair} 의 특성 길이 계산 실패: {e}")
                pairwise[f"{pair[0]}{pair[1]}"] = math.nan
        closed = math.sqrt(2.0) * params.r * math.sin(result.characteristic_length.gamma)
        return {
            "equalities": dict(isotropy.isotropy_equalities(limbs, result.pose)),
            "pairwise_L": pairwise,
            "closed_form_L": closed,
        }

    # 스윕

    def sweep(
        self, params: DesignParams, spec: SweepSpec, levels: Optional[Sequence[float]] = None
    ) -> Tuple[SweepGrid, Optional[IsoLoci], float]:
        started = time.perf_counter()
        logger.info(f"🚀 스윕 시작: {spec.matrix_kind.value}, 모드 {spec.mode}, {spec.nx}x{spec.ny}x{spec.n_theta}")
        grid = sweep.sweep(params, spec, self.settings.sweep_workers)
        loci = isoloci.extract_isoloci(grid, levels) if levels else None
        value = sweep.global_index(grid)
        logger.info(
            f"✅ 스윕 완료: 도달 노드 {int(grid.reachable.sum())}/{grid.reachable.size}, "
            f"전역 index {value:.6f}, {time.perf_counter() - started:.2f}s"
        )
        return grid, loci, value

    def compare(
        self, params: DesignParams, template: SweepSpec, modes: Optional[List[WorkingMode]] = None
    ) -> ModeComparison:
        started = time.perf_counter()
        comparison = sweep.compare_modes(params, template, modes or canonical_modes(), self.settings.sweep_workers)
        logger.info(f"✅ 작업 모드 비교 완료: {time.perf_counter() - started:.2f}s")
        return comparison


# 싱글톤 인스턴스
_analysis_service = AnalysisService()


def get_analysis_service() -> AnalysisService:
    """Analysis Service 인스턴스를 반환합니다."""
    return _analysis_service
