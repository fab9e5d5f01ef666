import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rado_lab.coloring import find_proper_coloring
from rado_lab.groundsets import GroundSet
from rado_lab.hypergraph import (
    OrderedHypergraph,
    fano_plane,
    from_solutions,
    pasch_configuration,
    rado_minimal_reduce,
    random_hypergraph,
)
from rado_lab.matrices import IntegerMatrix
from rado_lab.structures import (
    KINDS,
    StructureWitness,
    detect_structure,
    find_lemma_structure,
    is_bad_tight_path,
    is_bad_triple,
    is_fairly_simple_cycle,
    is_faulty_path,
    is_handle,
    is_pasch,
    is_simple_path,
    is_spoiled_path,
)

fs = frozenset


def hypergraphs(max_v=8, max_e=12):
    return st.integers(3, max_v).flatmap(
        lambda v: st.lists(
            st.lists(st.integers(0, v - 1), min_size=3, max_size=3, unique=True).map(tuple),
            max_size=max_e,
        ).map(lambda es: OrderedHypergraph(3, v, es))
    )


# Independent formulations of the three small configurations.

def brute_bad_triple(edges):
    for e1, ex, ey in itertools.permutations(edges, 3):
        a, b = e1 & ex, e1 & ey
        if len(a) == 1 and len(b) == 1 and a != b and len(ex & ey) >= 2:
            return True
    return False


def brute_bad_tight_path(edges):
    return any(
        len(a & b) == 2 and len(a & c) == 1 and len(b & c) == 2
        for a, b, c in itertools.permutations([e for e in edges if len(e) == 3], 3)
    )


def brute_pasch(edges):
    for quad in itertools.combinations(edges, 4):
        meets = [a & b for a, b in itertools.combinations(quad, 2)]
        if all(len(m) == 1 for m in meets) and len(set().union(*meets)) == 6:
            return True
    return False


def test_pattern_predicates_by_hand():
    assert is_simple_path([fs({0, 1, 2}), fs({2, 3, 4}), fs({4, 5, 6})])
    assert not is_simple_path([fs({0, 1, 2}), fs({2, 3, 4}), fs({0, 5, 6})])
    path = [fs({0, 1, 2}), fs({2, 3, 4})]
    assert is_fairly_simple_cycle(fs({0, 4, 5}), path, simple=True)
    assert is_fairly_simple_cycle(fs({0, 3, 4}), path)
    assert not is_fairly_simple_cycle(fs({0, 3, 4}), path, simple=True)
    assert is_handle(path, fs({1, 3, 9}))
    assert not is_handle(path, fs({1, 3, 4}))
    assert is_spoiled_path(path, fs({0, 3, 4}))
    assert not is_spoiled_path(path, fs({2, 3, 4}))
    long = [fs({0, 1, 2}), fs({2, 3, 4}), fs({4, 5, 6})]
    assert is_faulty_path(long, fs({1, 3, 7}), fs({3, 6, 8}))
    assert not is_faulty_path(long, fs({1, 3, 7}), fs({1, 6, 8}))
    assert is_bad_triple(fs({0, 1, 2}), fs({0, 3, 4}), fs({1, 3, 4}))
    assert is_bad_tight_path(fs({0, 1, 2}), fs({1, 2, 3}), fs({2, 3, 4}))
    assert is_pasch(pasch_configuration().unordered_edges())


def test_spec_examples():
    w = detect_structure(pasch_configuration(), "pasch")
    assert w is not None and w.verify(pasch_configuration()) and len(w.edges) == 4
    H = OrderedHypergraph(3, 5, [(0, 1, 2), (0, 3, 4), (1, 3, 4)])
    w = detect_structure(H, "bad_triple")
    assert w is not None and w.kind == "bad_triple"
    S = from_solutions(IntegerMatrix.row(1, 1, -1), GroundSet.interval(4))
    sets = S.unordered_edges()
    pair_exists = any(len(a & b) == 1 for a, b in itertools.combinations(sets, 2))
    assert (detect_structure(S, "simple_path", 2) is not None) == pair_exists


def test_unknown_kind_and_budget():
    with pytest.raises(ValueError):
        detect_structure(fano_plane(), "triangle")
    from rado_lab.coloring import SearchBudgetExceeded

    with pytest.raises(SearchBudgetExceeded):
        detect_structure(fano_plane(), "simple_path", 7, budget_nodes=2)


@given(hypergraphs())
def test_small_configurations_agree_with_subset_enumeration(H):
    edges = H.unordered_edges()
    assert (detect_structure(H, "bad_triple") is not None) == brute_bad_triple(edges)
    assert (detect_structure(H, "bad_tight_path") is not None) == brute_bad_tight_path(edges)
    assert (detect_structure(H, "pasch") is not None) == brute_pasch(edges)


def _brute_path_kind(edges, kind, L):
    for t in range(1, L + 1):
        for path in itertools.permutations(edges, t):
            if not is_simple_path(path):
                continue
            rest = [e for e in edges if e not in path]
            if kind == "simple_path" and t == L:
                return True
            if kind == "spoiled_path" and any(is_spoiled_path(path, e) for e in rest):
                return True
            if kind in ("fairly_simple_cycle", "simple_cycle", "handle"):
                for e0 in rest:
                    if is_fairly_simple_cycle(e0, path, simple=(kind == "simple_cycle")):
                        if kind != "handle" or any(is_handle(list(path) + [e0], e) for e in edges):
                            return True
            if kind == "faulty_path":
                for ex, ez in itertools.product(rest, repeat=2):
                    if is_faulty_path(path, ex, ez):
                        return True
    return False


@given(hypergraphs(max_v=7, max_e=7), st.sampled_from(["simple_path", "spoiled_path", "simple_cycle",
                                                        "fairly_simple_cycle", "handle", "faulty_path"]),
       st.integers(1, 3))
def test_path_kinds_agree_with_enumeration(H, kind, L):
    w = detect_structure(H, kind, L)
    assert (w is not None) == _brute_path_kind(H.unordered_edges(), kind, L)
    if w is not None:
        assert w.verify(H)
        assert w.length <= L


@given(hypergraphs(), st.sampled_from(KINDS))
def test_witnesses_reverify(H, kind):
    w = detect_structure(H, kind, 4)
    if w is not None:
        assert isinstance(w, StructureWitness)
        assert w.verify(H)
        assert w.kind == kind
        assert w.render(H).startswith(kind)


def test_minimal_cores_contain_a_lemma_structure():
    rng = np.random.default_rng(5)
    found = 0
    for _ in range(200):
        H = random_hypergraph(3, 7, 14, rng)
        core = rado_minimal_reduce(H)
        if core.e == 0:
            continue
        found += 1
        assert find_lemma_structure(core) is not None
    assert found > 0
    assert find_lemma_structure(rado_minimal_reduce(fano_plane())) is not None


@given(st.integers(0, 10**6))
def test_structure_free_hypergraphs_are_two_colorable(seed):
    rng = np.random.default_rng(seed)
    nv = int(rng.integers(6, 40))
    H = random_hypergraph(3, nv, int(rng.integers(1, 30)), rng)
    if find_lemma_structure(H) is None:
        assert find_proper_coloring(H, 2).verdict == "not_rado"
