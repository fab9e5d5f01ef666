import numpy as np
import pytest
from hypothesis import given, strategies as st

from rado_lab.coloring import (
    Coloring,
    find_proper_coloring,
    is_A_r_rado,
    is_proper,
    is_ramsey_bruteforce,
    min_monochromatic,
    monochromatic_count,
)
from rado_lab.groundsets import GroundSet
from rado_lab.hypergraph import OrderedHypergraph, fano_plane, from_solutions, pasch_configuration
from rado_lab.matrices import IntegerMatrix, ap_matrix
from rado_lab.solutions import list_solutions

from oracles import is_ramsey, schur_good_colorings

SCHUR = IntegerMatrix.row(1, 1, -1)


def hypergraphs(max_v=7, max_e=12):
    return st.integers(3, max_v).flatmap(
        lambda v: st.lists(
            st.lists(st.integers(0, v - 1), min_size=3, max_size=3, unique=True).map(tuple),
            max_size=max_e,
        ).map(lambda es: OrderedHypergraph(3, v, es))
    )


@given(hypergraphs(), st.integers(2, 3))
def test_search_agrees_with_exhaustion(H, r):
    verdict = find_proper_coloring(H, r)
    assert verdict.is_ramsey == is_ramsey(H.edge_tuples(), H.v, r)
    if verdict.certificate is not None:
        assert is_proper(H.edge_tuples(), verdict.certificate.colors)
        assert max(verdict.certificate.colors, default=0) < r


def test_pasch_and_fano():
    pasch = find_proper_coloring(pasch_configuration(), 2)
    assert pasch.verdict == "not_rado"
    assert is_proper(pasch_configuration().edge_tuples(), pasch.certificate.colors)
    assert find_proper_coloring(fano_plane(), 2).verdict == "rado"
    assert is_ramsey_bruteforce(fano_plane(), 2)
    assert find_proper_coloring(fano_plane(), 3).verdict == "not_rado"


@pytest.mark.parametrize("n", range(1, 13))
def test_schur_verdict_matches_enumeration(n):
    verdict = is_A_r_rado(SCHUR, GroundSet.interval(n), 2)
    assert verdict.is_ramsey == (schur_good_colorings(n) == 0)


def test_budget_exhaustion_reports_unknown():
    H = from_solutions(SCHUR, GroundSet.interval(14))
    verdict = find_proper_coloring(H, 2, budget_nodes=1)
    assert verdict.verdict == "unknown"


def test_coloring_text_round_trip():
    c = Coloring((0, 1, 1, 0), 2)
    assert Coloring.from_text(c.to_text(), 2) == c
    assert c.classes() == [[0, 3], [1, 2]]
    with pytest.raises(ValueError):
        Coloring((0, 2), 2)


def test_monochromatic_count_by_hand():
    S = GroundSet.interval(4)
    # all one color: every 3-distinct Schur solution is monochromatic
    assert monochromatic_count(SCHUR, S, [0, 0, 0, 0]) == 4
    assert monochromatic_count(SCHUR, S, {1: 0, 2: 1, 3: 1, 4: 0}) == 0


@given(st.integers(4, 8), st.integers(0, 2**8 - 1))
def test_monochromatic_count_matches_listing(n, mask):
    S = GroundSet.interval(n)
    colors = [(mask >> i) & 1 for i in range(n)]
    rows = list_solutions(SCHUR, S, distinct=True)
    expected = sum(1 for r in rows.tolist() if len({colors[i] for i in r}) == 1)
    assert monochromatic_count(SCHUR, S, colors) == expected


def test_min_monochromatic():
    assert min_monochromatic(SCHUR, GroundSet.interval(8), 2).value == 0
    exact = min_monochromatic(SCHUR, GroundSet.interval(9), 2)
    assert exact.exact and exact.value == 2
    sampled = min_monochromatic(SCHUR, GroundSet.interval(9), 2, mode="sampled", samples=50, seed=1)
    assert sampled.value >= exact.value
    assert min_monochromatic(ap_matrix(3), GroundSet.interval(8), 2).value == 0


@given(st.integers(0, 10**6), st.integers(8, 16), st.integers(4, 40))
def test_two_color_search_matches_general_search(seed, nv, ne):
    from rado_lab.coloring import _search, _search_two
    from rado_lab.hypergraph import random_hypergraph

    H = random_hypergraph(3, nv, ne, np.random.default_rng(seed))
    edges = [list(e) for e in H.edge_tuples()]
    general = _search(H.v, edges, 2, 10**6)
    special = _search_two(H.v, edges, 10**6)
    assert (general[0] is None) == (special[0] is None)
    assert general[2] == special[2]
    if special[0] is not None:
        assert is_proper(edges, special[0])
