import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rado_lab.exact import ExactLogValue, RationalPower, format_fraction, rational_log
from rado_lab.linalg import (
    bareiss_rank,
    elementary_divisors,
    image_size_mod,
    in_image_mod,
    rank_mod_prime,
    smith_normal_form,
    solve_mod,
    solve_rational,
)

from oracles import rank_Q

small_int = st.integers(-6, 6)


def matrices(max_rows=3, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda l: st.integers(1, max_cols).flatmap(
            lambda k: st.lists(st.lists(small_int, min_size=k, max_size=k), min_size=l, max_size=l)
        )
    )


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def test_rational_log_exact_cases():
    assert rational_log(8, 2) == 3
    assert rational_log(128, 2 ** 7) == 1
    assert rational_log(Fraction(1, 8), 2) == -3
    assert rational_log(4, 8) == Fraction(2, 3)
    assert rational_log(6, 2) is None
    assert rational_log(1, 5) == 0


def test_exact_log_value_equality_by_dependence():
    # log_4(8) = 3/2 = log_16(64)
    assert ExactLogValue(8, 4) == ExactLogValue(64, 16)
    assert ExactLogValue(6, 2) != ExactLogValue(3, 2)
    assert ExactLogValue(6, 2).as_fraction() is None
    assert ExactLogValue(3, 2) < ExactLogValue(6, 2)
    assert float(ExactLogValue(6, 2)) == pytest.approx(math.log2(6))


def test_rational_power_folding_and_order():
    x = RationalPower(1, 8, Fraction(-1, 2))
    assert not x.is_rational()
    assert RationalPower(1, Fraction(1, 8), Fraction(1, 2)).render() == "(1/8)^(1/2)"
    assert x == RationalPower(1, Fraction(1, 8), Fraction(1, 2))
    assert RationalPower(1, 4, Fraction(1, 2)).as_fraction() == 2
    assert RationalPower(1, 2, Fraction(1, 3)) < RationalPower(1, 3, Fraction(1, 3))
    assert format_fraction(Fraction(3, 4)) == "3/4"


@given(st.integers(2, 50), st.integers(2, 50), st.integers(1, 4), st.integers(1, 4))
def test_rational_power_order_matches_floats(a, b, p, q):
    x = RationalPower(1, a, Fraction(1, p))
    y = RationalPower(1, b, Fraction(1, q))
    fx, fy = a ** (1 / p), b ** (1 / q)
    if abs(fx - fy) > 1e-9 * max(fx, fy):
        assert (x < y) == (fx < fy)
    else:
        assert x == y


@given(matrices())
def test_bareiss_matches_fraction_elimination(rows):
    assert bareiss_rank(rows) == rank_Q(rows)


@given(matrices(), st.sampled_from([2, 3, 5, 7]))
def test_rank_mod_prime_matches_reduced_rank(rows, p):
    red = [[v % p for v in r] for r in rows]
    # Over a field the rank equals the size of the row space's basis; count the span directly.
    k = len(rows[0])
    span = {tuple((sum(c * r[j] for c, r in zip(cs, red))) % p for j in range(k))
            for cs in itertools.product(range(p), repeat=len(red))}
    assert p ** rank_mod_prime(rows, p) == len(span)


@given(matrices())
def test_smith_normal_form_invariants(rows):
    diag, U, V = smith_normal_form(rows, with_transforms=True)
    prod = matmul(matmul(U, rows), V)
    for i, r in enumerate(prod):
        for j, v in enumerate(r):
            assert v == (diag[i] if i == j and i < len(diag) else 0)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag.index(0) >= len(nz) if 0 in diag else True
    assert elementary_divisors(rows) == nz or elementary_divisors(rows) == diag


@given(matrices(max_rows=2, max_cols=3), st.sampled_from([2, 4, 6]))
def test_image_size_mod_matches_enumeration(rows, m):
    diag, _, _ = smith_normal_form(rows)
    k = len(rows[0])
    image = {tuple(sum(r[j] * x[j] for j in range(k)) % m for r in rows)
             for x in itertools.product(range(m), repeat=k)}
    assert image_size_mod(diag, m) == len(image)


def test_solve_rational_and_mod():
    cols = [[1, 0], [0, 2]]
    x = solve_rational(cols, [3, 1])
    assert x == [3, Fraction(1, 2)]
    assert solve_rational([[1, 1]], [1, 2]) is None
    y = solve_mod([[2], [4]], [2], 6)
    assert y is not None and (2 * y[0] + 4 * y[1]) % 6 == 2
    assert not in_image_mod([[2]], [1], 4)
    assert in_image_mod([[2], [3]], [1], 4)
