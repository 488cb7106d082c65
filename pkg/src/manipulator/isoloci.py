# src/manipulator/isoloci.py

"""
Marching squares 로 스윕 격자에서 등조건 곡선을 추출합니다.
네 꼭짓점이 모두 도달 가능한 셀만 처리하고, 안장 셀은 셀 평균으로 구분합니다.
"""

import logging
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .exceptions import InvalidLevelException
from .state import IsoLoci, SweepGrid

logger = logging.getLogger(__name__)

# 셀 꼭짓점 순서: 0 (j, i), 1 (j, i+1), 2 (j+1, i+1), 3 (j+1, i)
_CORNERS = ((0, 0), (0, 1), (1, 1), (1, 0))
# 변 k 는 꼭짓점 k 와 k+1 을 잇습니다
_EDGES = tuple((k, (k + 1) % 4) for k in range(4))

EdgeKey = Tuple[int, int, int, int]


def _edge_key(j: int, i: int, edge: int) -> EdgeKey:
    """인접한 두 셀이 같은 격자 변을 같은 키로 부르도록 정규화합니다."""
    (dj0, di0), (dj1, di1) = (_CORNERS[k] for k in _EDGES[edge])
    a = (j + dj0, i + di0)
    b = (j + dj1, i + di1)
    return min(a, b) + max(a, b)


def _cell_segments(corner_values: np.ndarray, level: float) -> List[Tuple[int, int]]:
    """한 셀에서 이어야 할 변 쌍 목록"""
    above = corner_values > level
    crossed = [k for k, (a, b) in enumerate(_EDGES) if above[a] != above[b]]
    if len(crossed) == 2:
        return [tuple(crossed)]
    if len(crossed) == 4:
        center = float(np.mean(corner_values)) > level
        # 중심과 상태가 다른 꼭짓점을 따로 떼어냅니다
        return [((k - 1) % 4, k) for k in range(4) if above[k] != center]
    return []


def _interpolate(grid: SweepGrid, key: EdgeKey, level: float) -> np.ndarray:
    j0, i0, j1, i1 = key
    v0 = grid.values[j0, i0]
    v1 = grid.values[j1, i1]
    t = (level - v0) / (v1 - v0)
    p0 = np.array([grid.xs[i0], grid.ys[j0]])
    p1 = np.array([grid.xs[i1], grid.ys[j1]])
    return p0 + t * (p1 - p0)


def _chain(adjacency: Dict[EdgeKey, List[EdgeKey]]) -> List[Tuple[List[EdgeKey], bool]]:
    """선분 그래프를 열린/닫힌 polyline 으로 잇습니다. 열린 것부터, 키 순서대로 시작합니다."""
    visited = set()
    chains = []

    def walk(start: EdgeKey) -> List[EdgeKey]:
        path = [start]
        visited.add(start)
        current = start
        while True:
            nxt = next((n for n in adjacency[current] if n not in visited), None)
            if nxt is None:
                return path
            visited.add(nxt)
            path.append(nxt)
            current = nxt

    for key in sorted(k for k, v in adjacency.items() if len(v) == 1):
        if key not in visited:
            chains.append((walk(key), False))
    for key in sorted(adjacency):
        if key not in visited:
            path = walk(key)
            chains.append((path + [path[0]], True))
    return chains


def _contour_level(grid: SweepGrid, level: float) -> Tuple[List[np.ndarray], List[bool]]:
    values = grid.values
    mask = grid.reachable
    ny, nx = values.shape
    cells = mask[:-1, :-1] & mask[:-1, 1:] & mask[1:, 1:] & mask[1:, :-1]

    adjacency = defaultdict(list)
    for j, i in zip(*np.nonzero(cells)):
        corner_values = np.array([values[j + dj, i + di] for dj, di in _CORNERS])
        for first, second in _cell_segments(corner_values, level):
            a = _edge_key(j, i, first)
            b = _edge_key(j, i, second)
            adjacency[a].append(b)
            adjacency[b].append(a)

    points = {key: _interpolate(grid, key, level) for key in adjacency}
    polylines, closed = [], []
    for path, is_closed in _chain(adjacency):
        polylines.append(np.array([points[key] for key in path]))
        closed.append(is_closed)
    return polylines, closed


def validate_levels(levels: Sequence[float]) -> List[float]:
    """레벨은 모두 유한한 (0, 1) 구간 값이어야 합니다."""
    levels = [float(level) for level in levels]
    for level in levels:
        if not 0.0 < level < 1.0:
            raise InvalidLevelException(f"레벨은 (0, 1) 구간이어야 합니다: {level}")
    return levels


def extract_isoloci(grid: SweepGrid, levels: Sequence[float]) -> IsoLoci:
    """레벨별 polyline (mm 좌표). 닫힌 곡선은 첫 꼭짓점을 끝에 한 번 더 넣습니다."""
    levels = validate_levels(levels)

    polylines, closed = [], []
    for level in levels:
        lines, flags = _contour_level(grid, level)
        logger.debug(f"레벨 {level}: polyline {len(lines)}개")
        polylines.append(lines)
        closed.append(flags)
    return IsoLoci(levels=levels, polylines=polylines, closed=closed)
