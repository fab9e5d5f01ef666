"""Detectors for the path, cycle and small configurations used in the
deterministic lemma for Rado-minimal 3-uniform hypergraphs.

Edges are treated as unordered vertex sets throughout. Every detector returns
a witness whose defining intersection pattern is re-checked before it is
returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple

from .coloring import SearchBudgetExceeded
from .hypergraph import OrderedHypergraph

Edge = FrozenSet[int]

KINDS = (
    "simple_path",
    "simple_cycle",
    "fairly_simple_cycle",
    "spoiled_path",
    "handle",
    "faulty_path",
    "bad_triple",
    "bad_tight_path",
    "pasch",
)

# The six structures whose absence forces 2-colorability.
LEMMA_KINDS = ("simple_path", "spoiled_path", "handle", "faulty_path", "bad_triple", "bad_tight_path")

DEFAULT_SEARCH_NODES = 10**6


# ---------------------------------------------------------------------------
# Intersection patterns


def is_simple_path(path: Sequence[Edge]) -> bool:
    t = len(path)
    if t == 0:
        return False
    for i in range(t):
        for j in range(i + 1, t):
            size = len(path[i] & path[j])
            if size != (1 if j == i + 1 else 0):
                return False
    return True


def is_fairly_simple_cycle(e0: Edge, path: Sequence[Edge], simple: bool = False) -> bool:
    t = len(path)
    if t < 2 or e0 in path or not is_simple_path(path):
        return False
    if len(e0 & path[0]) != 1:
        return False
    if any(e0 & path[i] for i in range(1, t - 1)):
        return False
    s = len(e0 & path[-1])
    return s == 1 if simple else s >= 1


def is_handle(edges: Sequence[Edge], e_star: Edge) -> bool:
    covered = len(e_star & frozenset().union(*edges))
    return len(e_star) > covered >= 2


def is_spoiled_path(path: Sequence[Edge], e_star: Edge) -> bool:
    if not is_simple_path(path) or e_star in path:
        return False
    if not e_star <= frozenset().union(*path):
        return False
    meet = e_star & path[0]
    if len(meet) != 1:
        return False
    return len(path) == 1 or not meet <= path[1]


def is_faulty_path(path: Sequence[Edge], ex: Edge, ez: Edge) -> bool:
    t = len(path)
    if t < 3 or not is_simple_path(path):
        return False
    if any(len(e) != 3 for e in list(path) + [ex, ez]):
        return False
    if not is_fairly_simple_cycle(ex, path[:2], simple=True):
        return False
    if any(ex & path[i] for i in range(2, t)):
        return False
    if not is_fairly_simple_cycle(ez, path[t - 2 :], simple=True):
        return False
    return not any(ez & path[i] for i in range(t - 2))


def is_bad_triple(e1: Edge, ex: Edge, ey: Edge) -> bool:
    mx, my = e1 & ex, e1 & ey
    return len(mx) == 1 and len(my) == 1 and mx != my and len(ex & ey) >= 2


def is_bad_tight_path(e1: Edge, e2: Edge, e3: Edge) -> bool:
    if any(len(e) != 3 for e in (e1, e2, e3)):
        return False
    return len(e1 & e2) == 2 and len(e1 & e3) == 1 and len(e2 & e3) == 2


def is_pasch(edges: Sequence[Edge]) -> bool:
    if len(edges) != 4 or any(len(e) != 3 for e in edges):
        return False
    meets = []
    for a, b in itertools.combinations(edges, 2):
        m = a & b
        if len(m) != 1:
            return False
        meets.append(next(iter(m)))
    return len(set(meets)) == 6


# ---------------------------------------------------------------------------
# Witnesses


@dataclass(frozen=True)
class StructureWitness:
    """``edges`` lists the edges in their roles:

    simple_path: e_1..e_t; simple/fairly_simple_cycle: e_0, e_1..e_t;
    spoiled_path: e_1..e_t, e*; handle: e_0, e_1..e_t, e*;
    faulty_path: e_1..e_t, e_x, e_z; bad_triple: e_1, e_x, e_y;
    bad_tight_path: e_1, e_2, e_3; pasch: e_1..e_4.
    """

    kind: str
    edges: Tuple[Edge, ...]

    @property
    def length(self) -> int:
        extra = {"simple_path": 0, "simple_cycle": 1, "fairly_simple_cycle": 1, "spoiled_path": 1, "handle": 2, "faulty_path": 2}
        return len(self.edges) - extra.get(self.kind, 0)

    def shared_vertices(self) -> List[Tuple[int, int, Tuple[int, ...]]]:
        out = []
        for (i, a), (j, b) in itertools.combinations(enumerate(self.edges), 2):
            if a & b:
                out.append((i, j, tuple(sorted(a & b))))
        return out

    def verify(self, H: Optional[OrderedHypergraph] = None) -> bool:
        if H is not None:
            present = set(H.unordered_edges())
            if not all(e in present for e in self.edges):
                return False
        es = self.edges
        if self.kind == "simple_path":
            return is_simple_path(es)
        if self.kind == "simple_cycle":
            return is_fairly_simple_cycle(es[0], es[1:], simple=True)
        if self.kind == "fairly_simple_cycle":
            return is_fairly_simple_cycle(es[0], es[1:])
        if self.kind == "spoiled_path":
            return is_spoiled_path(es[:-1], es[-1])
        if self.kind == "handle":
            return is_fairly_simple_cycle(es[0], es[1:-1]) and is_handle(es[:-1], es[-1])
        if self.kind == "faulty_path":
            return is_faulty_path(es[:-2], es[-2], es[-1])
        if self.kind == "bad_triple":
            return is_bad_triple(*es)
        if self.kind == "bad_tight_path":
            return is_bad_tight_path(*es)
        if self.kind == "pasch":
            return is_pasch(es)
        raise ValueError(f"unknown structure kind {self.kind!r}")

    def render(self, H: Optional[OrderedHypergraph] = None) -> str:
        name = (lambda u: H.label(u)) if H is not None else str
        parts = ["{" + ",".join(name(u) for u in sorted(e)) + "}" for e in self.edges]
        return f"{self.kind}: " + " ".join(parts)


# ---------------------------------------------------------------------------
# Search


class _Index:
    """Edge bitmasks and pairwise intersection sizes."""

    def __init__(self, H: OrderedHypergraph):
        self.sets = H.unordered_edges()
        self.masks = [sum(1 << v for v in e) for e in self.sets]
        m = len(self.sets)
        self.m = m
        self.sizes = [len(e) for e in self.sets]
        self.inter = [[bin(a & b).count("1") for b in self.masks] for a in self.masks]
        self.one = [[j for j in range(m) if self.inter[i][j] == 1] for i in range(m)]

    def witness(self, kind: str, idx: Sequence[int]) -> StructureWitness:
        w = StructureWitness(kind, tuple(self.sets[i] for i in idx))
        if not w.verify():
            raise AssertionError(f"detector produced an invalid {kind} witness")
        return w


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _find_bad_triple(ix: _Index) -> Optional[StructureWitness]:
    for a in range(ix.m):
        for b in range(a + 1, ix.m):
            if ix.inter[a][b] < 2:
                continue
            for e1 in ix.one[a]:
                if ix.inter[e1][b] == 1 and (ix.masks[e1] & ix.masks[a]) != (ix.masks[e1] & ix.masks[b]):
                    return ix.witness("bad_triple", (e1, a, b))
    return None


def _find_bad_tight_path(ix: _Index) -> Optional[StructureWitness]:
    for mid in range(ix.m):
        if ix.sizes[mid] != 3:
            continue
        twos = [j for j in range(ix.m) if ix.inter[mid][j] == 2 and ix.sizes[j] == 3]
        for a, b in itertools.permutations(twos, 2):
            if ix.inter[a][b] == 1:
                return ix.witness("bad_tight_path", (a, mid, b))
    return None


def _find_pasch(ix: _Index) -> Optional[StructureWitness]:
    three = [i for i in range(ix.m) if ix.sizes[i] == 3]
    ok = set(three)
    for e1 in three:
        n1 = [j for j in ix.one[e1] if j > e1 and j in ok]
        for e2 in n1:
            v12 = ix.masks[e1] & ix.masks[e2]
            for e3 in n1:
                if e3 <= e2 or ix.inter[e2][e3] != 1:
                    continue
                v13 = ix.masks[e1] & ix.masks[e3]
                v23 = ix.masks[e2] & ix.masks[e3]
                if len({v12, v13, v23}) != 3:
                    continue
                for e4 in n1:
                    if e4 <= e3 or ix.inter[e2][e4] != 1 or ix.inter[e3][e4] != 1:
                        continue
                    meets = {v12, v13, v23}
                    meets |= {ix.masks[e] & ix.masks[e4] for e in (e1, e2, e3)}
                    if len(meets) == 6:
                        return ix.witness("pasch", (e1, e2, e3, e4))
    return None


PathCheck = Callable[[List[int], int], Optional[StructureWitness]]


def _walk_paths(ix: _Index, max_length: int, check: PathCheck, budget: int) -> Optional[StructureWitness]:
    """Depth-first enumeration of simple paths of length <= max_length.

    ``check(path, union_mask)`` runs on every path and may return a witness.
    """
    nodes = 0
    for start in range(ix.m):
        stack: List[Tuple[List[int], int, int]] = [([start], 0, ix.masks[start])]
        while stack:
            path, before, union = stack.pop()
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(f"structure search exceeded {budget} nodes")
            found = check(path, union)
            if found is not None:
                return found
            if len(path) >= max_length:
                continue
            last = path[-1]
            # New edges meet the last edge once and avoid all earlier edges.
            for j in ix.one[last]:
                if ix.masks[j] & before:
                    continue
                stack.append((path + [j], before | ix.masks[last], union | ix.masks[j]))
    return None


def _spoiled_check(ix: _Index) -> PathCheck:
    def check(path: List[int], union: int) -> Optional[StructureWitness]:
        first = ix.masks[path[0]]
        second = ix.masks[path[1]] if len(path) > 1 else 0
        on_path = set(path)
        for j in range(ix.m):
            if j in on_path:
                continue
            mj = ix.masks[j]
            if mj & ~union:
                continue
            meet = mj & first
            if _popcount(meet) == 1 and not meet & second:
                return ix.witness("spoiled_path", path + [j])
        return None

    return check


def _cycle_edges(ix: _Index, path: List[int], simple: bool) -> List[int]:
    """All e_0 closing the simple path into a (fairly) simple cycle."""
    if len(path) < 2:
        return []
    middle = 0
    for i in path[1:-1]:
        middle |= ix.masks[i]
    first, last = path[0], path[-1]
    on_path = set(path)
    out = []
    for j in ix.one[first]:
        if j in on_path or ix.masks[j] & middle:
            continue
        s = ix.inter[j][last]
        if (s == 1) if simple else (s >= 1):
            out.append(j)
    return out


def _cycle_check(ix: _Index, simple: bool) -> PathCheck:
    kind = "simple_cycle" if simple else "fairly_simple_cycle"

    def check(path: List[int], union: int) -> Optional[StructureWitness]:
        for e0 in _cycle_edges(ix, path, simple):
            return ix.witness(kind, [e0] + path)
        return None

    return check


def _handle_check(ix: _Index) -> PathCheck:
    def check(path: List[int], union: int) -> Optional[StructureWitness]:
        for e0 in _cycle_edges(ix, path, simple=False):
            cover = union | ix.masks[e0]
            for j in range(ix.m):
                c = _popcount(ix.masks[j] & cover)
                if 2 <= c < ix.sizes[j]:
                    return ix.witness("handle", [e0] + path + [j])
        return None

    return check


def _faulty_check(ix: _Index) -> PathCheck:
    def check(path: List[int], union: int) -> Optional[StructureWitness]:
        t = len(path)
        if t < 3 or any(ix.sizes[i] != 3 for i in path):
            return None
        tail = 0
        for i in path[2:]:
            tail |= ix.masks[i]
        head = 0
        for i in path[: t - 2]:
            head |= ix.masks[i]
        e1, e2, ep, et = path[0], path[1], path[-2], path[-1]
        on_path = set(path)
        xs = [j for j in ix.one[e1] if j not in on_path and ix.sizes[j] == 3 and ix.inter[j][e2] == 1 and not ix.masks[j] & tail]
        if not xs:
            return None
        zs = [j for j in ix.one[et] if j not in on_path and ix.sizes[j] == 3 and ix.inter[j][ep] == 1 and not ix.masks[j] & head]
        if not zs:
            return None
        return ix.witness("faulty_path", path + [xs[0], zs[0]])

    return check


def _path_check(ix: _Index, length: int) -> PathCheck:
    def check(path: List[int], union: int) -> Optional[StructureWitness]:
        if len(path) == length:
            return ix.witness("simple_path", path)
        return None

    return check


def detect_structure(
    H: OrderedHypergraph, kind: str, max_length: Optional[int] = None, budget_nodes: int = DEFAULT_SEARCH_NODES
) -> Optional[StructureWitness]:
    """A verified witness of the given kind, or None when none exists.

    For "simple_path" the search looks for a path of length exactly
    ``max_length`` (equivalently, of length at least ``max_length``). For the
    other path and cycle kinds ``max_length`` bounds the path length t;
    it defaults to the number of edges. Raises SearchBudgetExceeded when
    the path search visits more than ``budget_nodes`` partial paths.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown structure kind {kind!r}; expected one of {', '.join(KINDS)}")
    ix = _Index(H)
    if ix.m == 0:
        return None
    L = ix.m if max_length is None else max_length
    if L < 1:
        return None
    if kind == "bad_triple":
        return _find_bad_triple(ix)
    if kind == "bad_tight_path":
        return _find_bad_tight_path(ix)
    if kind == "pasch":
        return _find_pasch(ix)
    check = {
        "simple_path": lambda: _path_check(ix, L),
        "simple_cycle": lambda: _cycle_check(ix, True),
        "fairly_simple_cycle": lambda: _cycle_check(ix, False),
        "spoiled_path": lambda: _spoiled_check(ix),
        "handle": lambda: _handle_check(ix),
        "faulty_path": lambda: _faulty_check(ix),
    }[kind]()
    return _walk_paths(ix, L, check, budget_nodes)


def find_lemma_structure(
    H: OrderedHypergraph, max_length: Optional[int] = None, budget_nodes: int = DEFAULT_SEARCH_NODES
) -> Optional[StructureWitness]:
    """First of the six structures found, or None if H contains none of them.

    The path bound L defaults to the number of edges; the structures are a
    simple path of length >= L, and a spoiled simple path, a fairly simple
    cycle with a handle or a faulty simple path of length <= L, a bad
    triple, or a bad tight path.
    """
    ix = _Index(H)
    if ix.m == 0:
        return None
    L = ix.m if max_length is None else max_length
    found = _find_bad_triple(ix) or _find_bad_tight_path(ix)
    if found is not None:
        return found
    checks = [_path_check(ix, L), _spoiled_check(ix), _handle_check(ix), _faulty_check(ix)]

    def combined(path: List[int], union: int) -> Optional[StructureWitness]:
        for c in checks:
            w = c(path, union)
            if w is not None:
                return w
        return None

    return _walk_paths(ix, L, combined, budget_nodes)
