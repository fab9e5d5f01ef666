import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rado_lab.exact import ExactLogValue
from rado_lab.groups import FiniteAbelianGroup
from rado_lab.matrices import (
    IntegerMatrix,
    UndefinedParameterError,
    ap_matrix,
    columns_condition,
    group_image_size,
    is_abundant,
    is_irredundant,
    is_partition_regular,
    is_translation_invariant,
    m_parameter,
    rank_group,
    rank_mod_p,
    rank_rational,
)

from oracles import image_size, rank_Q


def row_matrices(max_k=4, lo=-5, hi=5):
    return st.integers(2, max_k).flatmap(
        lambda k: st.lists(st.integers(lo, hi), min_size=k, max_size=k).filter(any)
    ).map(lambda r: IntegerMatrix.row(*r))


def test_parse_and_load(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("1 1 -1\n# comment\n0 2 3\n")
    A = IntegerMatrix.load(f)
    assert A.rows == ((1, 1, -1), (0, 2, 3))
    assert A.k == 3 and A.ell == 2
    assert A.complement((1, 3)) == (2,)
    with pytest.raises(ValueError):
        IntegerMatrix.parse("1 2\n3")


@given(row_matrices(), st.sampled_from([(2,), (3,), (4,), (6,), (2, 2), (2, 4)]))
def test_rank_group_equals_image_count(A, moduli):
    G = FiniteAbelianGroup(moduli)
    full = tuple(range(1, A.k + 1))
    brute = image_size(A, moduli, full)
    assert group_image_size(A, G, full) == brute
    assert rank_group(A, G) == ExactLogValue(brute, G.order)
    for W in itertools.combinations(full, 2):
        comp = A.complement(W)
        assert group_image_size(A, G, comp) == image_size(A, moduli, comp)


@given(row_matrices(max_k=4), st.sampled_from([2, 3, 5]))
def test_rank_mod_p_matches_group_rank(A, p):
    G = FiniteAbelianGroup.cyclic(p)
    assert rank_group(A, G).as_fraction() == rank_mod_p(A, p)


def test_rank_rational_subsets():
    A = IntegerMatrix.of([[1, 2, 3], [2, 4, 6]])
    assert rank_rational(A) == 1 == rank_Q(A.rows)
    assert rank_rational(A, ()) == 0


def _columns_condition_brute(A: IntegerMatrix) -> bool:
    k = A.k
    cols = [A.column(j) for j in range(1, k + 1)]

    def rank_of(vecs):
        return rank_Q([list(v) for v in zip(*vecs)]) if vecs else 0

    for labels in itertools.product(range(k), repeat=k):
        used = sorted(set(labels))
        if used != list(range(len(used))):
            continue
        parts = [[j for j in range(k) if labels[j] == i] for i in used]
        s = [tuple(sum(cols[j][r] for j in part) for r in range(A.ell)) for part in parts]
        if any(s[0]):
            continue
        ok = True
        for i in range(1, len(parts)):
            earlier = [cols[j] for part in parts[:i] for j in part]
            if rank_of(earlier + [s[i]]) != rank_of(earlier):
                ok = False
                break
        if ok:
            return True
    return False


@given(row_matrices(max_k=4, lo=-4, hi=4))
def test_columns_condition_matches_brute_partition_search(A):
    cert = columns_condition(A)
    assert (cert is not None) == _columns_condition_brute(A)
    if cert is not None:
        assert cert.verify(A)


def test_known_partition_regularity():
    assert is_partition_regular(IntegerMatrix.row(1, 1, -1))
    assert is_partition_regular(IntegerMatrix.row(1, 2, -3))
    assert not is_partition_regular(IntegerMatrix.row(1, 1, -3))
    assert is_partition_regular(ap_matrix(4))
    assert ap_matrix(3).rows == ((1, -2, 1),)


def test_modular_columns_condition_certificate_verifies():
    A = IntegerMatrix.row(2, 2, 1, 1)
    cert = columns_condition(A, 6)
    assert cert is not None and cert.verify(A)
    assert "ring 6" in cert.render()


def _m_brute(A: IntegerMatrix, moduli) -> float:
    N = math.prod(moduli)
    full = tuple(range(1, A.k + 1))
    r = math.log(image_size(A, moduli, full), N)
    best = -1.0
    for size in range(2, A.k + 1):
        for W in itertools.combinations(full, size):
            rW = math.log(image_size(A, moduli, A.complement(W)), N)
            best = max(best, (size - 1) / (size - 1 + rW - r))
    return best


@given(row_matrices(max_k=3, lo=-4, hi=4).filter(lambda A: all(A.rows[0])), st.sampled_from([(3,), (4,), (5,), (6,)]))
def test_m_parameter_matches_brute_force(A, moduli):
    G = FiniteAbelianGroup(moduli)
    try:
        m = m_parameter(A, G)
    except UndefinedParameterError:
        return
    assert float(m) == pytest.approx(_m_brute(A, moduli), rel=1e-12)


def test_m_parameter_schur_over_Q():
    m = m_parameter(IntegerMatrix.row(1, 1, -1))
    assert m.as_fraction() == 2
    assert m.strictly_balanced


def test_predicates():
    A = IntegerMatrix.row(2, 2, -2)
    assert not is_translation_invariant(A, FiniteAbelianGroup.cyclic(4))
    assert is_translation_invariant(A, FiniteAbelianGroup.cyclic(2))
    assert is_translation_invariant(ap_matrix(3), FiniteAbelianGroup.cyclic(7))
    assert is_abundant(A, FiniteAbelianGroup.cyclic(4))
    assert is_irredundant(IntegerMatrix.row(1, 1, -1), FiniteAbelianGroup.cyclic(5))
    # x + y = 2z over Z_2 forces x = y
    assert not is_irredundant(IntegerMatrix.row(1, 1, -2), FiniteAbelianGroup.cyclic(2))
