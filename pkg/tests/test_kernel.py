from fractions import Fraction as Fr
from itertools import permutations as iperm

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shl_lab.kernel import (
    CapExceededError,
    ContourSpec,
    MixedModeError,
    Mode,
    NonFiniteError,
    SquareMatrix,
    common_mode,
    contour_integral,
    det_exact,
    mode_of,
    parse_scalar,
    permutations,
    qpoch,
    vandermonde,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def cofactor_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * cofactor_det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def test_qpoch_examples():
    assert qpoch(Fr(7, 3), Fr(1, 2), 0) == 1
    assert qpoch(Fr(0), Fr(1, 3), 5) == 1
    assert qpoch(Fr(1, 2), Fr(1, 3), 2) == Fr(5, 12)


def test_qpoch_rejects_negative_length():
    with pytest.raises(ValueError):
        qpoch(Fr(1, 2), Fr(1, 2), -1)


@given(rationals, rationals, st.integers(0, 8))
def test_qpoch_recurrence(a, q, k):
    assert qpoch(a, q, k + 1) == qpoch(a, q, k) * (1 - a * q**k)


def test_mixed_modes_raise():
    with pytest.raises(MixedModeError):
        qpoch(Fr(1, 2), 0.5, 3)
    with pytest.raises(MixedModeError):
        SquareMatrix([[Fr(1), 0.5], [Fr(0), Fr(1)]])
    assert common_mode(Fr(1), 2) is Mode.EXACT
    assert mode_of(1j) is Mode.FLOAT


@given(rationals, rationals, rationals)
def test_field_distributivity(a, b, c):
    assert (a + b) * c == a * c + b * c


def test_parse_scalar():
    assert parse_scalar("22/7") == Fr(22, 7)
    assert parse_scalar("-3") == Fr(-3)
    assert parse_scalar("1+2i") == 1 + 2j
    assert parse_scalar("0.25") == Fr(1, 4)


def test_det_examples():
    eye = [[Fr(int(i == j)) for j in range(3)] for i in range(3)]
    assert det_exact(eye) == 1
    a, b, c, d = Fr(2, 3), Fr(-1, 5), Fr(7), Fr(1, 9)
    assert det_exact([[a, b], [c, d]]) == a * d - b * c
    x, y = (1, 2), (3, 5)
    assert det_exact([[Fr(1, xi + yj) for yj in y] for xi in x]) == Fr(1, 420)


def test_det_singular_is_zero():
    assert det_exact([[Fr(1), Fr(2)], [Fr(2), Fr(4)]]) == 0


@settings(max_examples=30)
@given(st.lists(rationals, min_size=25, max_size=25))
def test_det_matches_cofactor_expansion(entries):
    m = [entries[5 * i:5 * i + 5] for i in range(5)]
    assert det_exact(m) == cofactor_det(m)


@settings(max_examples=30)
@given(st.lists(rationals, min_size=16, max_size=16), st.integers(0, 3), st.integers(0, 3))
def test_det_alternates_under_row_swap(entries, i, j):
    m = [entries[4 * k:4 * k + 4] for k in range(4)]
    swapped = [row[:] for row in m]
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert det_exact(swapped) == (det_exact(m) if i == j else -det_exact(m))


def test_det_float_mode_matches_numpy():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert abs(det_exact(m.tolist()) - np.linalg.det(m)) < 1e-12 * abs(np.linalg.det(m))


def test_permutations():
    assert list(permutations(1)) == [(0,)]
    three = list(permutations(3))
    assert len(three) == 6 == len(set(three))
    four = list(permutations(4))
    assert len(four) == 24 and all(sorted(p) == [0, 1, 2, 3] for p in four)
    with pytest.raises(CapExceededError):
        permutations(10)


def test_vandermonde():
    xs = [Fr(1), Fr(3), Fr(7)]
    assert vandermonde(xs) == (1 - 3) * (1 - 7) * (3 - 7)


def test_contour_examples():
    c = ContourSpec(0, 1.0, 64)
    assert abs(contour_integral(lambda z: 1 / z, c) - 1) < 1e-12
    assert abs(contour_integral(lambda z: 1.0, c)) < 1e-12
    assert abs(contour_integral(lambda z: 1 / (z - 1) ** 2, ContourSpec(1, 0.5, 64))) < 1e-10


@pytest.mark.parametrize("n", range(-3, 4))
def test_contour_monomials(n):
    value = contour_integral(lambda z: z**n, ContourSpec(0, 0.7, 64))
    assert abs(value - (1 if n == -1 else 0)) < 1e-10


def test_contour_doubling_nodes():
    def f(z):
        return np.exp(z) / (z - 0.3) + 1 / (z + 0.2) ** 2

    a = contour_integral(f, ContourSpec(0, 1.0, 64))
    b = contour_integral(f, ContourSpec(0, 1.0, 128))
    assert abs(a - b) < 1e-12
    assert abs(a - np.exp(0.3)) < 1e-12


def test_contour_validation():
    with pytest.raises(ValueError):
        ContourSpec(0, 1.0, 4)
    with pytest.raises(ValueError):
        ContourSpec(0, 0.0, 16)
    with pytest.raises(NonFiniteError):
        contour_integral(lambda z: float("inf"), ContourSpec(0, 1.0, 16))


def test_permutation_stream_is_complete():
    assert set(permutations(4)) == set(iperm(range(4)))
