"""Ordered hypergraphs: restrictions, degrees, the threshold p-hat, the
(P1)-(P5) diagnostics, graph-copy hypergraphs and Rado-minimal cores."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import RationalPower
from .matrices import IntegerMatrix

Cols = Tuple[int, ...]


class OrderedHypergraph:
    """A k-uniform ordered hypergraph on vertices 0..v-1.

    Edges are ordered k-tuples of pairwise distinct vertices, stored once each
    in first-occurrence order. ``labels`` optionally names the vertices.
    """

    def __init__(self, k: int, n_vertices: int, edges, labels: Optional[Sequence[str]] = None):
        if k < 1:
            raise ValueError("uniformity must be >= 1")
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, k), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != k:
            raise ValueError(f"edges must be {k}-tuples")
        if arr.size and (arr.min() < 0 or arr.max() >= n_vertices):
            raise ValueError("edge vertex outside the vertex range")
        for i in range(k):
            for j in range(i + 1, k):
                if np.any(arr[:, i] == arr[:, j]):
                    raise ValueError("an edge repeats a vertex")
        if arr.shape[0]:
            _, first = np.unique(arr, axis=0, return_index=True)
            arr = arr[np.sort(first)]
        if labels is not None and len(labels) != n_vertices:
            raise ValueError("one label per vertex required")
        self.k = k
        self.n_vertices = int(n_vertices)
        self.edges = arr
        self.labels = list(labels) if labels is not None else None
        self._sets: Optional[List[FrozenSet[int]]] = None

    # -- basic -----------------------------------------------------------------

    @property
    def v(self) -> int:
        return self.n_vertices

    @property
    def e(self) -> int:
        return int(self.edges.shape[0])

    def __repr__(self) -> str:
        return f"OrderedHypergraph(k={self.k}, v={self.v}, e={self.e})"

    def edge_tuples(self) -> List[Tuple[int, ...]]:
        return [tuple(r) for r in self.edges.tolist()]

    def unordered_edges(self) -> List[FrozenSet[int]]:
        """Edges as vertex sets, deduplicated in first-occurrence order."""
        if self._sets is None:
            seen: Dict[FrozenSet[int], None] = {}
            for row in self.edges.tolist():
                seen.setdefault(frozenset(row), None)
            self._sets = list(seen)
        return self._sets

    def sub(self, edge_indices: Iterable[int]) -> "OrderedHypergraph":
        idx = np.asarray(list(edge_indices), dtype=np.int64)
        return OrderedHypergraph(self.k, self.v, self.edges[idx] if idx.size else np.zeros((0, self.k)), self.labels)

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)

    # -- text format -------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.k} {self.v} {self.e}"]
        lines += [" ".join(map(str, row)) for row in self.edges.tolist()]
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text: str, source: str = "<text>") -> "OrderedHypergraph":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
        if not numbered:
            raise ValueError(f"{source}: empty hypergraph file")
        lineno, header = numbered[0]
        try:
            k, v, e = (int(t) for t in header.split())
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: header must be 'k v e'") from exc
        rows = []
        for lineno, ln in numbered[1:]:
            try:
                row = [int(t) for t in ln.split()]
            except ValueError as exc:
                raise ValueError(f"{source}:{lineno}: bad edge {ln!r}") from exc
            if len(row) != k:
                raise ValueError(f"{source}:{lineno}: expected {k} vertices, got {len(row)}")
            rows.append(row)
        if len(rows) != e:
            raise ValueError(f"{source}: header announces {e} edges, found {len(rows)}")
        return cls(k, v, rows)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "OrderedHypergraph":
        return cls.from_text(Path(path).read_text(), str(path))


# ---------------------------------------------------------------------------
# Restrictions and degrees


def _positions(H: OrderedHypergraph, W: Iterable[int]) -> Cols:
    W = tuple(sorted(set(int(w) for w in W)))
    if not W:
        raise ValueError("W must be nonempty")
    if W[0] < 1 or W[-1] > H.k:
        raise ValueError(f"W must lie in [1, {H.k}]")
    return W


def restriction(H: OrderedHypergraph, W: Iterable[int]) -> OrderedHypergraph:
    """H_W: the deduplicated projections of the edges onto the positions in W."""
    W = _positions(H, W)
    if W == tuple(range(1, H.k + 1)):
        return H
    proj = H.edges[:, [w - 1 for w in W]]
    return OrderedHypergraph(len(W), H.v, proj, H.labels)


def delta(H: OrderedHypergraph, W: Iterable[int], Y: Iterable[int]) -> int:
    """Delta_W(H_Y): the most Y-edges restricting to one W-edge."""
    W, Y = _positions(H, W), _positions(H, Y)
    if not set(W) <= set(Y):
        raise ValueError("W must be a subset of Y")
    HY = restriction(H, Y)
    if HY.e == 0:
        return 0
    proj = HY.edges[:, [Y.index(w) for w in W]]
    _, counts = np.unique(proj, axis=0, return_counts=True)
    return int(counts.max())


def unordered_degree(H: OrderedHypergraph, i: int) -> int:
    """Delta_i of the unordered restriction: most edges containing one i-set."""
    counts: Dict[FrozenSet[int], int] = {}
    for edge in H.unordered_edges():
        for sub in itertools.combinations(sorted(edge), i):
            key = frozenset(sub)
            counts[key] = counts.get(key, 0) + 1
    return max(counts.values(), default=0)


# ---------------------------------------------------------------------------
# Threshold


@dataclass(frozen=True)
class HyperThresholdEntry:
    W: Cols
    edges: int  # e(H_W)
    f: Optional[RationalPower]  # None when e(H_W) = 0


@dataclass(frozen=True)
class HyperThresholdTable:
    v: int
    entries: Tuple[HyperThresholdEntry, ...]
    p_hat: RationalPower
    witnesses: Tuple[Cols, ...]

    def f(self, W: Sequence[int]) -> Optional[RationalPower]:
        W = tuple(sorted(W))
        for e in self.entries:
            if e.W == W:
                return e.f
        raise KeyError(W)


def hat_p_hypergraph(H: OrderedHypergraph) -> HyperThresholdTable:
    """f_W = (e(H_W)/v(H))^(-1/(|W|-1)) for |W| >= 2 and their maximum."""
    if H.k < 2:
        raise ValueError("p-hat needs uniformity >= 2")
    entries = []
    for size in range(2, H.k + 1):
        for W in itertools.combinations(range(1, H.k + 1), size):
            eW = restriction(H, W).e
            f = RationalPower(1, Fraction(H.v, eW), Fraction(1, size - 1)) if eW else None
            entries.append(HyperThresholdEntry(W, eW, f))
    finite = [e for e in entries if e.f is not None]
    if not finite:
        raise ValueError("all restrictions are empty")
    p_hat = max(e.f for e in finite)  # type: ignore[type-var]
    return HyperThresholdTable(H.v, tuple(entries), p_hat, tuple(e.W for e in finite if e.f == p_hat))


# ---------------------------------------------------------------------------
# Constructions


def from_solutions(A: IntegerMatrix, S, visit_cap: Optional[int] = None) -> OrderedHypergraph:
    """Vertices: the elements of S. Edges: the k-distinct solutions of Ax = 0."""
    from .solutions import DEFAULT_VISIT_CAP, as_ground_set, list_solutions

    S = as_ground_set(S)
    rows = list_solutions(A, S, distinct=True, visit_cap=visit_cap or DEFAULT_VISIT_CAP)
    labels = [S.label(i) for i in range(S.size)]
    return OrderedHypergraph(A.k, S.size, rows, labels)


Graph = Sequence[Tuple[object, object]]


def _graph_vertices(F: Graph) -> List[object]:
    seen: Dict[object, None] = {}
    for a, b in F:
        if a == b:
            raise ValueError("graphs may not have loops")
        seen.setdefault(a, None)
        seen.setdefault(b, None)
    return list(seen)


def complete_graph(n: int) -> List[Tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def from_graph_copies(F: Graph, n: int) -> OrderedHypergraph:
    """Vertices: edges of K_n. Edges: ordered e(F)-tuples (phi(f_1), ..., phi(f_e))
    for injective phi: V(F) -> [n], deduplicated."""
    F = [tuple(e) for e in F]
    if not F:
        raise ValueError("F must have at least one edge")
    verts = _graph_vertices(F)
    if len({frozenset(e) for e in F}) != len(F):
        raise ValueError("F has a repeated edge")
    if n < len(verts):
        raise ValueError(f"n = {n} is smaller than v(F) = {len(verts)}")
    pairs = complete_graph(n)
    index = np.full((n, n), -1, dtype=np.int64)
    for i, (a, b) in enumerate(pairs):
        index[a, b] = index[b, a] = i
    pos = {u: i for i, u in enumerate(verts)}
    ends = np.array([(pos[a], pos[b]) for a, b in F], dtype=np.int64)
    maps = np.array(list(itertools.permutations(range(n), len(verts))), dtype=np.int64)
    edges = index[maps[:, ends[:, 0]], maps[:, ends[:, 1]]]
    labels = [f"{a + 1}{b + 1}" if n < 10 else f"{a + 1}-{b + 1}" for a, b in pairs]
    return OrderedHypergraph(len(F), len(pairs), edges, labels)


def m2_density(F: Graph) -> Fraction:
    """max over subgraphs of d_2: 0 without edges, 1/2 for one edge, else (e-1)/(v-2)."""
    F = [tuple(e) for e in F]
    best = Fraction(0)
    for size in range(1, len(F) + 1):
        for sub in itertools.combinations(F, size):
            v = len({u for e in sub for u in e})
            d = Fraction(1, 2) if size == 1 else Fraction(size - 1, v - 2)
            best = max(best, d)
    return best


# ---------------------------------------------------------------------------
# (P1)-(P5) diagnostics


def heuristic_X(table: HyperThresholdTable) -> Optional[Cols]:
    cands = [e for e in table.entries if len(e.W) >= 3 and e.f is not None]
    if not cands:
        return None
    top = max(e.f for e in cands)  # type: ignore[type-var]
    return min((e.W for e in cands if e.f == top), key=lambda W: (len(W), W))


@dataclass(frozen=True)
class PConditionsRow:
    v: int
    e: int
    p_hat: Optional[RationalPower]
    p_hat_v: Optional[RationalPower]
    p3_max: Optional[Fraction]  # candidate b for bounded degree
    p3_witness: Optional[Tuple[Cols, Cols]]
    p4_max: Optional[Fraction]
    p4_witness: Optional[Tuple[Cols, Cols]]
    X: Optional[Cols]
    x_source: str
    f_X_over_p_hat: Optional[RationalPower]
    p5: Dict[Tuple[Cols, Cols], RationalPower]
    p5_max: Optional[RationalPower]
    undefined: Tuple[str, ...]


@dataclass(frozen=True)
class PConditionsReport:
    rows: Tuple[PConditionsRow, ...]
    trends: Dict[str, str]


def _subsets(cols: Sequence[int], min_size: int = 1) -> List[Cols]:
    return [W for size in range(min_size, len(cols) + 1) for W in itertools.combinations(cols, size)]


def _p_row(H: OrderedHypergraph, X_choice: Optional[Cols]) -> PConditionsRow:
    undefined: List[str] = []
    full = tuple(range(1, H.k + 1))
    e_of = {W: restriction(H, W).e for W in _subsets(full)}
    try:
        table = hat_p_hypergraph(H)
        p_hat: Optional[RationalPower] = table.p_hat
    except ValueError:
        table, p_hat = None, None
        undefined.append("p_hat")
    p3_max = p4_max = None
    p3_w = p4_w = None
    for Y in _subsets(full):
        if e_of[Y] == 0:
            continue
        for W in _subsets(Y):
            d = delta(H, W, Y)
            ratio = Fraction(d * e_of[W], e_of[Y])
            if p3_max is None or ratio > p3_max:
                p3_max, p3_w = ratio, (W, Y)
            if len(W) == 1 and W != Y:
                r4 = Fraction(d * H.v, e_of[Y])
                if p4_max is None or r4 > p4_max:
                    p4_max, p4_w = r4, (W, Y)
    if p3_max is None:
        undefined.append("P3")
    if p4_max is None:
        undefined.append("P4")
    X, source = X_choice, "user"
    if X is None and table is not None:
        X, source = heuristic_X(table), "heuristic"
    p5: Dict[Tuple[Cols, Cols], RationalPower] = {}
    fx = None
    if X is not None and p_hat is not None and e_of.get(X, 0) > 0:
        fX = table.f(X) if table is not None else None
        fx = fX / p_hat if fX is not None else None
        for W in itertools.combinations(X, 2):
            dW = delta(H, W, X)
            for W2 in _subsets(X, 2):
                if W2 == X:
                    continue
                dW2 = delta(H, W2, X)
                value = (p_hat ** (3 * len(X) - 2 - len(W2))) * (dW * dW2 * e_of[X])
                p5[(W, W2)] = value
    else:
        undefined.append("P5")
    p5_max = max(p5.values()) if p5 else None
    return PConditionsRow(
        v=H.v,
        e=H.e,
        p_hat=p_hat,
        p_hat_v=p_hat * H.v if p_hat is not None else None,
        p3_max=p3_max,
        p3_witness=p3_w,
        p4_max=p4_max,
        p4_witness=p4_w,
        X=X,
        x_source=source,
        f_X_over_p_hat=fx,
        p5=p5,
        p5_max=p5_max,
        undefined=tuple(undefined),
    )


def p_conditions_report(family: Sequence[OrderedHypergraph], X_choice: Optional[Sequence[int]] = None) -> PConditionsReport:
    """Finite-n values behind (P1), (P3), (P4) and (P5) with trend flags."""
    from .solutions import trend

    X = tuple(sorted(X_choice)) if X_choice is not None else None
    rows = tuple(_p_row(H, X) for H in family)
    trends: Dict[str, str] = {}
    for name in ("p_hat", "p_hat_v", "p3_max", "p4_max", "p5_max"):
        values = [getattr(r, name) for r in rows]
        trends[name] = "undefined" if any(v is None for v in values) else trend(values)
    return PConditionsReport(rows, trends)


# ---------------------------------------------------------------------------
# Rado-minimal cores


def rado_minimal_reduce(H: OrderedHypergraph, r: int = 2, budget_nodes: Optional[int] = None) -> OrderedHypergraph:
    """Greedy edge deletion (in edge order) keeping the hypergraph r-Ramsey.

    One pass suffices: a later deletion only shrinks the hypergraph, and a
    subhypergraph of a non-Ramsey hypergraph is non-Ramsey.
    """
    from .coloring import DEFAULT_BUDGET_NODES, SearchBudgetExceeded, find_proper_coloring

    budget = budget_nodes or DEFAULT_BUDGET_NODES

    def ramsey(G: OrderedHypergraph) -> bool:
        verdict = find_proper_coloring(G, r, budget)
        if verdict.is_ramsey is None:
            raise SearchBudgetExceeded(f"coloring search exceeded {verdict.nodes} nodes")
        return verdict.is_ramsey

    empty = H.sub([])
    if H.e == 0 or not ramsey(H):
        return empty
    keep = list(range(H.e))
    for i in range(H.e):
        trial = [j for j in keep if j != i]
        if ramsey(H.sub(trial)):
            keep = trial
    return H.sub(keep)


def has_private_intersections(H: OrderedHypergraph) -> bool:
    """For every edge a and every v in a there is an edge b with a ∩ b = {v}."""
    sets = H.unordered_edges()
    for a in sets:
        for v in a:
            if not any(a & b == {v} for b in sets):
                return False
    return True


def fano_plane() -> OrderedHypergraph:
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return OrderedHypergraph(3, 7, lines)


def pasch_configuration() -> OrderedHypergraph:
    """Edges e_i with e_i ∩ e_j = {v_ij}; vertices v12, v13, v14, v23, v24, v34."""
    v = {p: i for i, p in enumerate(itertools.combinations(range(4), 2))}
    edges = [tuple(v[tuple(sorted((i, j)))] for j in range(4) if j != i) for i in range(4)]
    return OrderedHypergraph(3, 6, edges)


def random_hypergraph(k: int, n_vertices: int, n_edges: int, rng: np.random.Generator) -> OrderedHypergraph:
    """n_edges uniformly random k-sets (distinct as sets when possible), random order."""
    total = math.comb(n_vertices, k)
    n_edges = min(n_edges, total)
    chosen: Dict[FrozenSet[int], Tuple[int, ...]] = {}
    while len(chosen) < n_edges:
        e = tuple(int(x) for x in rng.choice(n_vertices, size=k, replace=False))
        chosen.setdefault(frozenset(e), e)
    return OrderedHypergraph(k, n_vertices, list(chosen.values()))
