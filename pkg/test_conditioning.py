#!/usr/bin/env python3
"""
특이값 / 조건수 계산 테스트
"""

import itertools
import math
import os
import sys

import numpy as np
import pytest

# src 디렉토리를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from manipulator.conditioning import (
    condition_report, diag_condition, diag_index_batch, index_from_singular_values,
    singular_values_3, singular_values_batch
)
from manipulator.exceptions import NonFiniteException
from schemas.manipulator_schemas import KappaVariant


def _random_orthogonal(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.diag(r))


def test_singular_values_match_reference():
    rng = np.random.default_rng(10)
    for _ in range(200):
        M = rng.normal(scale=rng.uniform(0.1, 100.0), size=(3, 3))
        expected = np.linalg.svd(M, compute_uv=False)
        found = np.array(singular_values_3(M))
        assert np.all(np.diff(found) <= 0.0)
        np.testing.assert_allclose(found, expected, rtol=0, atol=1e-9 * expected[0])


def test_identity_is_perfectly_conditioned():
    report = condition_report(np.eye(3))
    assert report.singular_values == (1.0, 1.0, 1.0)
    assert report.kappa == 1.0
    assert report.index == 1.0
    assert not report.singular


def test_known_diagonal():
    report = condition_report(np.diag([3.0, -0.5, 2.0]))
    assert report.singular_values == pytest.approx((3.0, 2.0, 0.5), rel=1e-14)
    assert report.kappa == pytest.approx(6.0, rel=1e-14)
    assert report.index == pytest.approx(1.0 / 6.0, rel=1e-14)


def test_rank_deficient_matrices():
    zero_row = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [4.0, 5.0, 6.0]])
    report = condition_report(zero_row)
    assert report.index == 0.0
    assert math.isinf(report.kappa)
    assert report.singular

    proportional = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 0.0]])
    assert condition_report(proportional).index == 0.0
    assert math.isinf(condition_report(proportional).kappa)
    assert condition_report(np.zeros((3, 3))).index == 0.0


def test_scale_and_rotation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(100):
        M = rng.normal(size=(3, 3))
        base = condition_report(M).index
        for factor in (1e-3, 7.5, 1e4):
            assert condition_report(factor * M).index == pytest.approx(base, abs=1e-10)
        Q1, Q2 = _random_orthogonal(rng), _random_orthogonal(rng)
        assert condition_report(Q1 @ M @ Q2).index == pytest.approx(base, abs=1e-10)


def test_index_is_bounded():
    rng = np.random.default_rng(12)
    sv = singular_values_batch(rng.normal(size=(500, 3, 3)))
    index = index_from_singular_values(sv)
    assert np.all((index >= 0.0) & (index <= 1.0))


def test_non_finite_rejected():
    M = np.eye(3)
    M[1, 2] = np.nan
    with pytest.raises(NonFiniteException):
        condition_report(M)
    M[1, 2] = np.inf
    with pytest.raises(NonFiniteException):
        singular_values_batch(M[None])
    with pytest.raises(NonFiniteException):
        diag_condition(np.diag([1.0, np.nan, 2.0]))


def test_diagonal_variants():
    B = np.diag([2.0, -4.0, 1.0])
    ratio = diag_condition(B)
    assert ratio.kappa == 4.0
    assert ratio.index == 0.25
    assert ratio.singular_values == (4.0, 2.0, 1.0)

    sqrt_ratio = diag_condition(B, KappaVariant.SQRT_RATIO)
    assert sqrt_ratio.kappa == 2.0
    assert sqrt_ratio.index == 0.5

    np.testing.assert_array_equal(
        diag_index_batch(np.array([[2.0, -4.0, 1.0], [1.0, 1.0, 1.0]]), KappaVariant.SQRT_RATIO), [0.5, 1.0]
    )
    assert diag_condition(np.diag([1.0, 0.0, 3.0])).index == 0.0


def test_diagonal_matches_general_routine():
    rng = np.random.default_rng(13)
    for _ in range(50):
        d = rng.uniform(-10, 10, size=3)
        assert diag_condition(np.diag(d)).index == pytest.approx(condition_report(np.diag(d)).index, rel=1e-12)


def test_batch_is_bitwise_identical_to_single():
    rng = np.random.default_rng(14)
    stack = rng.normal(size=(64, 3, 3))
    batched = singular_values_batch(stack)
    for n in (0, 17, 63):
        single = singular_values_batch(stack[n])
        assert np.array_equal(batched[n], single)
        assert tuple(batched[n]) == singular_values_3(stack[n])
    # 구성이 다른 일괄에서도 같은 비트
    assert np.array_equal(singular_values_batch(stack[::2])[5], batched[10])


def test_condition_report_is_deterministic():
    M = np.array([[0.3, -1.2, 5.0], [2.2, 0.1, -0.7], [1.0, 1.0, 1.0]])
    assert condition_report(M) == condition_report(M.copy())


def test_singular_value_product_is_determinant():
    rng = np.random.default_rng(15)
    for _ in range(1000):
        M = rng.normal(size=(3, 3))
        sv = singular_values_3(M)
        assert sv[0] * sv[1] * sv[2] == pytest.approx(abs(np.linalg.det(M)), rel=1e-9, abs=1e-12)


def test_orthogonal_matrix_has_unit_singular_values():
    rng = np.random.default_rng(16)
    for _ in range(20):
        np.testing.assert_allclose(singular_values_3(_random_orthogonal(rng)), (1.0, 1.0, 1.0), atol=1e-14)


def test_reference_diagonals():
    assert singular_values_3(np.diag([3.0, 2.0, 1.0])) == (3.0, 2.0, 1.0)
    report = condition_report(np.diag([4.0, 2.0, 2.0]))
    assert report.kappa == 2.0
    assert report.index == 0.5
    assert diag_condition(np.diag([2.0, 2.0, 2.0])).kappa == 1.0
    assert diag_condition(np.diag([4.0, 1.0, 2.0]), KappaVariant.SQRT_RATIO).kappa == 2.0
    assert diag_condition(np.diag([4.0, 1.0, 2.0]), KappaVariant.RATIO).kappa == 4.0


def test_kappa_scale_invariance():
    rng = np.random.default_rng(17)
    eps = np.finfo(float).eps
    for _ in range(100):
        M = rng.normal(size=(3, 3))
        kappa = condition_report(M).kappa
        # c·M 의 원소 반올림만으로도 κ 는 약 eps·κ 만큼 흔들립니다
        tolerance = max(1e-12, 8.0 * eps * kappa)
        for factor in (1e-6, 3.0, 1e6):
            assert condition_report(factor * M).kappa == pytest.approx(kappa, rel=tolerance)


def test_rank_deficient_sum_of_rows():
    M = np.array([[1.0, 2.0, 0.5], [-0.5, 1.0, 2.0], [0.5, 3.0, 2.5]])
    report = condition_report(M)
    assert report.index == 0.0
    assert math.isinf(report.kappa)
    assert report.singular_values[2] == 0.0


def test_small_singular_value_keeps_relative_accuracy():
    assert singular_values_3(np.diag([1.0, 1.0, 1e-8])) == (1.0, 1.0, 1e-8)

    report = condition_report(np.diag([1.0, 1.0, 5e-8]))
    assert report.kappa == pytest.approx(2e7, rel=1e-13)
    assert report.index == pytest.approx(5e-8, rel=1e-13)
    assert not report.singular

    for exponent in range(1, 16):
        d = np.array([2.0, -0.75, 3.0 * 10.0 ** -exponent])
        expected = np.sort(np.abs(d))[::-1]
        np.testing.assert_allclose(singular_values_3(np.diag(d)), expected, rtol=1e-13, atol=0)


def test_ill_conditioned_rotated_matrix():
    rng = np.random.default_rng(18)
    for sigma_min in (1e-6, 1e-8, 1e-10):
        Q1, Q2 = _random_orthogonal(rng), _random_orthogonal(rng)
        M = Q1 @ np.diag([1.0, 0.5, sigma_min]) @ Q2
        report = condition_report(M)
        assert math.isfinite(report.kappa)
        assert report.kappa == pytest.approx(1.0 / sigma_min, rel=1e-4)


def _cauchy_binet_minors(M):
    """M 의 2x2 소행렬식 제곱합 = M·Mᵀ 특성다항식의 1차 계수"""
    total = 0.0
    for rows in itertools.combinations(range(3), 2):
        for cols in itertools.combinations(range(3), 2):
            sub = M[np.ix_(rows, cols)]
            total += (sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0]) ** 2
    return total


def _bisect_root(p, lo, hi):
    f_lo = p(lo)
    for _ in range(4000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = p(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _characteristic_polynomial_singular_values(M):
    """λ³ − c2 λ² + c1 λ − c0 의 세 근을 극값 사이 구간에서 이분법으로 구합니다."""
    c2 = float(np.sum(M * M))
    c1 = _cauchy_binet_minors(M)
    c0 = float(np.linalg.det(M)) ** 2

    def p(lam):
        return ((lam - c2) * lam + c1) * lam - c0

    spread = math.sqrt(max(c2 * c2 - 3.0 * c1, 0.0))
    d1, d2 = (c2 - spread) / 3.0, (c2 + spread) / 3.0
    roots = [_bisect_root(p, 0.0, d1), _bisect_root(p, d1, d2), _bisect_root(p, d2, c2)]
    return np.sqrt(np.maximum(roots, 0.0))[::-1]


def test_singular_values_match_characteristic_polynomial():
    rng = np.random.default_rng(19)
    for _ in range(1000):
        M = rng.normal(scale=rng.uniform(0.1, 100.0), size=(3, 3))
        expected = _characteristic_polynomial_singular_values(M)
        found = np.array(singular_values_3(M))
        # 가장 작은 값도 자기 자신 기준의 상대오차로 비교합니다
        np.testing.assert_allclose(found, expected, rtol=1e-9, atol=0)
