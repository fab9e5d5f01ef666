import pytest

from rado_lab.groundsets import GroundSet, parse_ground, read_elements
from rado_lab.groups import EnumerationLimitError, FiniteAbelianGroup, parse_group


def test_parse_group_forms():
    assert parse_group("Z6").order == 6
    assert parse_group("Z2xZ3").moduli == (2, 3)
    G = parse_group("Z4^3")
    assert G.order == 64 and G.exponent() == 4
    assert parse_group("(Z2xZ3)^2").order == 36
    with pytest.raises(ValueError):
        parse_group("Z0")


def test_group_power_and_exponent():
    G = FiniteAbelianGroup.cyclic(4) ** 2
    assert G.moduli == (4, 4) and G.order == 16


@pytest.mark.parametrize(
    "spec, size",
    [("interval:10", 10), ("lattice:3:2", 9), ("cyclic:36", 36), ("cyclic:36-0", 35),
     ("power:Z4:3", 64), ("primes:20", 8), ("explicit:1,2,5", 3)],
)
def test_parse_ground_sizes(spec, size):
    S = parse_ground(spec)
    assert S.size == size
    assert len(S.elements()) == size


@pytest.mark.parametrize("spec", ["cyclic:0", "interval:-3", "lattice:3", "bogus:3", "primes:1", "power:Z4"])
def test_parse_ground_rejects_malformed(spec):
    with pytest.raises(ValueError):
        parse_ground(spec)


def test_explicit_from_file(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("# comment\n1 2\n3 4\n")
    assert read_elements(str(f)) == [(1, 2), (3, 4)]
    S = parse_ground(f"explicit:@{f}")
    assert S.dim == 2 and S.size == 2
    with pytest.raises(FileNotFoundError):
        parse_ground("explicit:@/nonexistent/file")


def test_elements_order_and_identity_exclusion():
    S = GroundSet.cyclic(5, exclude_identity=True)
    assert [e[0] for e in S.elements()] == [1, 2, 3, 4]
    assert 0 not in S and 3 in S
    assert GroundSet.interval(3).elements() == [(1,), (2,), (3,)]
    assert S.is_full_group is False
    assert GroundSet.cyclic(5).is_full_group


def test_explicit_group_elements_reduced_and_deduplicated():
    with pytest.raises(ValueError):
        GroundSet.explicit([1, 6], group=FiniteAbelianGroup.cyclic(5))
    S = GroundSet.explicit([7, 3], group=FiniteAbelianGroup.cyclic(5))
    assert S.elements() == [(2,), (3,)]


def test_enumeration_limit():
    S = GroundSet.group_power(FiniteAbelianGroup.cyclic(4), 12)
    with pytest.raises(EnumerationLimitError):
        S.elements(limit=1000)


def test_subset_and_labels():
    S = GroundSet.lattice(2, 2)
    assert S.label(0) == "(1,1)"
    sub = S.subset([1, 3])
    assert sub.elements() == [(1, 2), (2, 2)]
