#!/usr/bin/env python3
"""
등조건 곡선 추출 (marching squares) 테스트
"""

import os
import sys

import numpy as np
import pytest

# src 디렉토리를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from manipulator.exceptions import InvalidLevelException
from manipulator.isoloci import extract_isoloci
from manipulator.state import SweepGrid
from schemas.manipulator_schemas import SweepSpec


def _grid(values, reachable=None, x_range=(-300.0, 300.0), y_range=(-300.0, 300.0)):
    values = np.asarray(values, dtype=float)
    ny, nx = values.shape
    spec = SweepSpec(x_range=x_range, y_range=y_range, nx=nx, ny=ny)
    if reachable is None:
        reachable = np.ones_like(values, dtype=bool)
    return SweepGrid(spec=spec, values=values, reachable=reachable, best_theta=np.zeros_like(values))


def _circle_grid(n=201):
    xs = np.linspace(-300.0, 300.0, n)
    X, Y = np.meshgrid(xs, xs)
    return _grid(np.maximum(0.0, 1.0 - np.hypot(X, Y) / 300.0))


def test_circle_level_is_single_closed_loop():
    grid = _circle_grid()
    loci = extract_isoloci(grid, [0.5])
    assert loci.levels == [0.5]
    assert len(loci.polylines[0]) == 1
    assert loci.closed[0] == [True]

    line = loci.polylines[0][0]
    np.testing.assert_array_equal(line[0], line[-1])
    diagonal = np.hypot(3.0, 3.0)
    radii = np.hypot(line[:, 0], line[:, 1])
    assert np.all(np.abs(radii - 150.0) <= 1.5 * diagonal)
    assert len(line) > 100


def test_constant_grid_has_no_loci():
    loci = extract_isoloci(_grid(np.full((11, 11), 0.7)), [0.5])
    assert loci.polylines == [[]]
    assert loci.closed == [[]]


@pytest.mark.parametrize("levels", [[0.0], [1.0], [0.5, 1.2], [-0.1]])
def test_levels_outside_open_interval(levels):
    with pytest.raises(InvalidLevelException):
        extract_isoloci(_circle_grid(21), levels)
    with pytest.raises(ValueError):
        extract_isoloci(_circle_grid(21), levels)


def test_linear_field_gives_straight_line():
    xs = np.linspace(-300.0, 300.0, 31)
    X, _ = np.meshgrid(xs, np.linspace(-300.0, 300.0, 21))
    grid = _grid(0.2 + 0.6 * (X + 300.0) / 600.0)
    loci = extract_isoloci(grid, [0.5])
    assert len(loci.polylines[0]) == 1
    assert loci.closed[0] == [False]
    line = loci.polylines[0][0]
    assert len(line) == 21
    np.testing.assert_allclose(line[:, 0], 0.0, atol=1e-9)
    np.testing.assert_allclose(sorted(line[:, 1]), np.linspace(-300.0, 300.0, 21), atol=1e-9)


def test_saddle_cell_is_split_by_cell_average():
    # 평균 0.55 > 0.5: 중심이 위쪽이므로 아래쪽 두 꼭짓점을 떼어냅니다
    loci = extract_isoloci(_grid([[0.9, 0.1], [0.3, 0.9]]), [0.5])
    assert len(loci.polylines[0]) == 2
    assert loci.closed[0] == [False, False]
    for line in loci.polylines[0]:
        assert len(line) == 2


def test_masked_cells_are_skipped():
    grid = _circle_grid(101)
    mask = np.ones_like(grid.reachable)
    mask[:, 60:] = False
    masked = grid.model_copy(update={"reachable": mask})
    loci = extract_isoloci(masked, [0.5])
    assert all(not flag for flag in loci.closed[0])
    boundary = grid.xs[59]
    for line in loci.polylines[0]:
        assert np.all(line[:, 0] <= boundary + 1e-9)


def test_vertices_stay_on_straddling_edges():
    xs = np.linspace(-300.0, 300.0, 41)
    X, Y = np.meshgrid(xs, xs)
    values = 0.5 + 0.4 * np.sin(X / 90.0) * np.cos(Y / 70.0)
    grid = _grid(values)
    loci = extract_isoloci(grid, [0.3, 0.5, 0.7])
    assert len(loci.polylines) == 3
    step = xs[1] - xs[0]
    for level, lines in zip(loci.levels, loci.polylines):
        assert lines
        for line in lines:
            assert np.all((line[:, 0] >= -300.0) & (line[:, 0] <= 300.0))
            assert np.all((line[:, 1] >= -300.0) & (line[:, 1] <= 300.0))
            for x, y in line:
                i = int(np.clip(np.floor((x + 300.0) / step + 1e-9), 0, 39))
                j = int(np.clip(np.floor((y + 300.0) / step + 1e-9), 0, 39))
                corners = values[j:j + 2, i:i + 2]
                assert corners.min() <= level + 1e-12
                assert corners.max() >= level - 1e-12
