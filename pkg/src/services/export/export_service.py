# src/services/export/export_service.py

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from manipulator.state import IsoLoci, SweepGrid

logger = logging.getLogger(__name__)

CSV_HEADER = ("x_mm", "y_mm", "reachable", "index", "best_theta_rad")
DEFAULT_PRECISION = 6


def format_number(value: float, precision: int = DEFAULT_PRECISION) -> str:
    """유효숫자 precision 자리의 고정소수점 표기"""
    if not math.isfinite(value):
        return str(value)
    if value == 0.0:
        return "0"
    return np.format_float_positional(float(value), precision=precision, unique=False, fractional=False, trim="-")


def _array(values: np.ndarray):
    """NaN 은 null 로 바꾼 중첩 리스트"""
    return [[None if np.isnan(v) else float(v) for v in row] for row in values]


class ExportService:
    """스윕 격자와 등조건 곡선을 CSV / JSON / gnuplot 텍스트로 직렬화합니다."""

    def __init__(self, precision: int = DEFAULT_PRECISION):
        self.precision = precision

    def _fmt(self, value: float) -> str:
        return format_number(value, self.precision)

    def grid_to_csv(self, grid: SweepGrid) -> str:
        """행 우선, y 가 바깥 루프. 도달 불가능한 노드는 index / θ 가 빈 칸입니다."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for j, y in enumerate(grid.ys):
            for i, x in enumerate(grid.xs):
                reachable = bool(grid.reachable[j, i])
                writer.writerow(
                    [
                        self._fmt(x),
                        self._fmt(y),
                        int(reachable),
                        self._fmt(grid.values[j, i]) if reachable else "",
                        self._fmt(grid.best_theta[j, i]) if reachable else "",
                    ]
                )
        return buffer.getvalue()

    def grid_to_dict(self, grid: SweepGrid) -> Dict[str, Any]:
        return {
            "spec": grid.spec.model_dump(mode="json"),
            "xs": [float(x) for x in grid.xs],
            "ys": [float(y) for y in grid.ys],
            "reachable": grid.reachable.astype(bool).tolist(),
            "values": _array(grid.values),
            "best_theta": _array(grid.best_theta),
        }

    def grid_to_json(self, grid: SweepGrid) -> str:
        return json.dumps(self.grid_to_dict(grid), indent=2)

    def loci_to_dict(self, loci: IsoLoci) -> Dict[str, Any]:
        return {
            "levels": loci.levels,
            "polylines": [
                [{"closed": closed, "points": line.tolist()} for line, closed in zip(lines, flags)]
                for lines, flags in zip(loci.polylines, loci.closed)
            ],
        }

    def loci_to_json(self, loci: IsoLoci) -> str:
        return json.dumps(self.loci_to_dict(loci), indent=2)

    def loci_to_gnuplot(self, loci: IsoLoci) -> str:
        """polyline 사이는 빈 줄 하나, 레벨 사이는 빈 줄 두 개 (gnuplot index 블록)"""
        blocks = []
        for level, lines in zip(loci.levels, loci.polylines):
            body = [f"# level {self._fmt(level)}"]
            for n, line in enumerate(lines):
                if n > 0:
                    body.append("")
                body.extend(f"{self._fmt(x)} {self._fmt(y)}" for x, y in line)
            blocks.append("\n".join(body))
        return "\n\n\n".join(blocks) + "\n"

    def write(self, path: Union[str, Path], text: str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"💾 {path} 저장 완료 ({len(text)} bytes)")
        return path


# 싱글톤 인스턴스
_export_service = ExportService()


def get_export_service() -> ExportService:
    """Export Service 인스턴스를 반환합니다."""
    return _export_service
