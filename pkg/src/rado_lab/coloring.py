"""Exact proper-coloring search for hypergraphs, (A, r)-Rado verdicts and
monochromatic solution counts."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .hypergraph import OrderedHypergraph, from_solutions
from .matrices import IntegerMatrix

DEFAULT_BUDGET_NODES = 10**8


class SearchBudgetExceeded(RuntimeError):
    """A coloring search gave up before reaching a verdict."""


@dataclass(frozen=True)
class Coloring:
    """colors[v] in {0, ..., r-1} for every vertex v."""

    colors: Tuple[int, ...]
    r: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if any(not 0 <= c < self.r for c in self.colors):
            raise ValueError("colors must lie in [0, r)")

    def __getitem__(self, v: int) -> int:
        return self.colors[v]

    def __len__(self) -> int:
        return len(self.colors)

    def classes(self) -> List[List[int]]:
        out: List[List[int]] = [[] for _ in range(self.r)]
        for v, c in enumerate(self.colors):
            out[c].append(v)
        return out

    def to_text(self, labels: Optional[Sequence[str]] = None) -> str:
        return "".join(f"{labels[v] if labels else v} {c}\n" for v, c in enumerate(self.colors))

    def save(self, path: Union[str, Path], labels: Optional[Sequence[str]] = None) -> None:
        Path(path).write_text(self.to_text(labels))

    @classmethod
    def from_text(cls, text: str, r: int) -> "Coloring":
        colors = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'vertex color'")
            colors.append(int(parts[1]))
        return cls(tuple(colors), r)


@dataclass(frozen=True)
class RamseyVerdict:
    """is_ramsey is None when the search budget ran out."""

    is_ramsey: Optional[bool]
    certificate: Optional[Coloring]
    nodes: int
    millis: float
    r: int = 2
    notes: Tuple[str, ...] = field(default=())

    @property
    def verdict(self) -> str:
        if self.is_ramsey is None:
            return "unknown"
        return "rado" if self.is_ramsey else "not_rado"

    def to_json(self) -> Dict[str, object]:
        return {
            "verdict": self.verdict,
            "nodes": self.nodes,
            "millis": round(self.millis, 3),
            "certificate": list(self.certificate.colors) if self.certificate else None,
        }


def is_proper(edges: Sequence[Sequence[int]], colors: Sequence[int]) -> bool:
    """No edge is monochromatic."""
    return all(len({colors[v] for v in e}) > 1 for e in edges)


def _search(n: int, edges: List[List[int]], r: int, budget: int) -> Tuple[Optional[List[int]], int, bool]:
    """DPLL over vertex colors. Returns (coloring or None, nodes, exhausted)."""
    adj: List[List[int]] = [[] for _ in range(n)]
    for i, e in enumerate(edges):
        for v in e:
            adj[v].append(i)
    size = [len(e) for e in edges]
    if any(s <= 1 for s in size):
        return None, 0, True
    cnt = [[0] * r for _ in edges]
    free = list(size)
    color = [-1] * n
    full = (1 << r) - 1
    dom = [full] * n
    usage = [0] * r
    trail: List[Tuple[int, int, int]] = []  # (0, v, c) assignment; (1, v, c) domain removal
    order = sorted((v for v in range(n) if adj[v]), key=lambda v: (-len(adj[v]), v))
    for v in range(n):
        if not adj[v]:
            color[v] = 0
    # branching score: live edges at a vertex, weight 1 untouched, 3 touched
    # but still monochromatic, 0 once two colors meet
    weight = [1] * len(edges)
    score = [len(adj[v]) for v in range(n)]

    def reweigh(e: int) -> None:
        colored = size[e] - free[e]
        w = 1 if colored == 0 else (3 if max(cnt[e]) == colored else 0)
        d = w - weight[e]
        if d:
            weight[e] = w
            for u in edges[e]:
                score[u] += d

    def assign(v: int, c: int, queue: List[int]) -> bool:
        color[v] = c
        usage[c] += 1
        trail.append((0, v, c))
        for e in adj[v]:
            cnt[e][c] += 1
            free[e] -= 1
            reweigh(e)
        ok = True
        for e in adj[v]:
            ce = cnt[e][c]
            if ce == size[e]:
                ok = False
            elif free[e] == 1 and ce == size[e] - 1:
                for u in edges[e]:
                    if color[u] < 0:
                        break
                bit = 1 << c
                if dom[u] & bit:
                    dom[u] &= ~bit
                    trail.append((1, u, c))
                    if dom[u] == 0:
                        ok = False
                    elif dom[u] & (dom[u] - 1) == 0:
                        queue.append(u)
        return ok

    def undo(length: int) -> None:
        while len(trail) > length:
            kind, v, c = trail.pop()
            if kind == 0:
                color[v] = -1
                usage[c] -= 1
                for e in adj[v]:
                    cnt[e][c] -= 1
                    free[e] += 1
                    reweigh(e)
            else:
                dom[v] |= 1 << c

    def propagate(queue: List[int]) -> bool:
        while queue:
            u = queue.pop()
            if color[u] >= 0:
                continue
            d = dom[u]
            if d == 0:
                return False
            if not assign(u, d.bit_length() - 1, queue):
                return False
        return True

    def pick() -> Optional[int]:
        # highest score; static degree order breaks ties
        best, best_score = None, -1
        for u in order:
            if color[u] < 0 and score[u] > best_score:
                best, best_score = u, score[u]
        return best

    nodes = 0
    frames: List[List] = []  # [vertex, remaining candidate colors, trail length]
    queue: List[int] = []
    ok = True
    while True:
        if ok:
            ok = propagate(queue)
        if ok:
            v = pick()
            if v is None:
                return [max(c, 0) for c in color], nodes, False
            top = max((c for c in range(r) if usage[c]), default=-1)
            cands = [c for c in range(min(r, top + 2)) if dom[v] >> c & 1]
            cands.sort(key=lambda c: (usage[c], c))
            frames.append([v, cands, len(trail)])
        while frames:
            v, cands, length = frames[-1]
            undo(length)
            queue = []
            if cands:
                c = cands.pop(0)
                nodes += 1
                if nodes > budget:
                    return None, nodes, False
                ok = assign(v, c, queue)
                break
            frames.pop()
        else:
            return None, nodes, True


LOOKAHEAD_WIDTH = 20


def _search_two(n: int, edges: List[List[int]], budget: int,
                width: int = LOOKAHEAD_WIDTH) -> Tuple[Optional[List[int]], int, bool]:
    """Two-color DPLL with failed-literal lookahead.

    At each node the ``width`` highest-scoring free vertices are probed with
    both colors. A color whose propagation fails forces the other one, and a
    color implied by both probes is forced outright. Otherwise the search
    branches on the vertex whose two probes constrain the most, trying the
    less constraining color first. Probes and branches both count as nodes.
    """
    adj: List[List[int]] = [[] for _ in range(n)]
    for i, e in enumerate(edges):
        for v in e:
            adj[v].append(i)
    size = [len(e) for e in edges]
    if any(s <= 1 for s in size):
        return None, 0, True
    c0 = [0] * len(edges)
    c1 = [0] * len(edges)
    color = [-1] * n
    trail: List[int] = []
    order = sorted((v for v in range(n) if adj[v]), key=lambda v: (-len(adj[v]), v))
    for v in range(n):
        if not adj[v]:
            color[v] = 0
    gained = [0]  # edges turned from untouched to touched, for probe ranking

    def assign(v: int, c: int, queue: List[Tuple[int, int]]) -> bool:
        color[v] = c
        trail.append(v)
        ok = True
        mine, theirs = (c1, c0) if c else (c0, c1)
        for e in adj[v]:
            k = mine[e] + 1
            mine[e] = k
            if not theirs[e]:
                if k == 1:
                    gained[0] += 1
                sz = size[e]
                if k == sz:
                    ok = False
                elif k == sz - 1:
                    for u in edges[e]:
                        if color[u] < 0:
                            queue.append((u, 1 - c))
                            break
        return ok

    def undo(length: int) -> None:
        while len(trail) > length:
            v = trail.pop()
            c = color[v]
            color[v] = -1
            mine = c1 if c else c0
            for e in adj[v]:
                mine[e] -= 1

    def propagate(queue: List[Tuple[int, int]]) -> bool:
        while queue:
            u, c = queue.pop()
            cu = color[u]
            if cu >= 0:
                if cu != c:
                    return False
                continue
            if not assign(u, c, queue):
                return False
        return True

    def probe(v: int, c: int) -> Tuple[bool, int, Dict[int, int]]:
        length = len(trail)
        gained[0] = 0
        ok = assign(v, c, queue_probe) and propagate(queue_probe)
        queue_probe.clear()
        gain = gained[0] + len(trail) - length
        implied = {u: color[u] for u in trail[length + 1:]} if ok else {}
        undo(length)
        return ok, gain, implied

    def score(v: int) -> int:
        # live edges, weight 1 untouched, 3 touched but monochromatic, 0 once both colors meet
        total = 0
        for e in adj[v]:
            a, b = c0[e], c1[e]
            if not (a and b):
                total += 3 if a or b else 1
        return total

    queue_probe: List[Tuple[int, int]] = []
    nodes = 0

    def examine() -> Tuple[str, int, List[int]]:
        """'sat', 'conflict', 'budget' or 'branch' with a vertex and color order."""
        nonlocal nodes
        while True:
            free = [u for u in order if color[u] < 0]
            if not free:
                return "sat", -1, []
            scores = {u: score(u) for u in free}
            free.sort(key=scores.__getitem__, reverse=True)
            if scores[free[0]] == 0:
                # every edge at a free vertex already has both colors
                return "sat", -1, []
            if len(free) == len(order):
                return "branch", free[0], [0]  # first color fixed by symmetry
            best, best_key, best_order = -1, -1, [0, 1]
            forced = False
            for v in free[:width]:
                if color[v] >= 0:
                    continue
                nodes += 2
                if nodes > budget:
                    return "budget", -1, []
                ok0, g0, imp0 = probe(v, 0)
                ok1, g1, imp1 = probe(v, 1)
                if not ok0 and not ok1:
                    return "conflict", -1, []
                if not (ok0 and ok1):
                    queue = [(v, 0 if ok0 else 1)]
                    if not propagate(queue):
                        return "conflict", -1, []
                    forced = True
                    continue
                both = [(u, c) for u, c in imp0.items() if imp1.get(u) == c]
                if both:
                    if not propagate(both):
                        return "conflict", -1, []
                    forced = True
                    continue
                key = g0 * g1 * 1024 + g0 + g1
                if key > best_key:
                    best, best_key, best_order = v, key, ([0, 1] if g0 <= g1 else [1, 0])
            if forced:
                continue
            return "branch", best, best_order

    frames: List[List] = []  # [vertex, remaining colors, trail length]
    queue: List[Tuple[int, int]] = []
    ok = True
    while True:
        if ok:
            ok = propagate(queue)
        if ok:
            status, v, cands = examine()
            if status == "sat":
                return [max(c, 0) for c in color], nodes, False
            if status == "budget":
                return None, nodes, False
            if status == "conflict":
                ok = False
            else:
                frames.append([v, cands, len(trail)])
        while frames:
            v, cands, length = frames[-1]
            undo(length)
            queue = []
            if cands:
                c = cands.pop(0)
                nodes += 1
                if nodes > budget:
                    return None, nodes, False
                ok = assign(v, c, queue)
                break
            frames.pop()
        else:
            return None, nodes, True


def _peel(n: int, edges: List[List[int]], r: int) -> Tuple[List[int], List[Tuple[int, List[int]]]]:
    """Drop vertices lying in fewer than r live edges, with their edges.

    Such a vertex can always be colored last: each of its edges forbids at
    most one color. Returns the surviving edge indices and the removal log.
    """
    adj: List[List[int]] = [[] for _ in range(n)]
    for i, e in enumerate(edges):
        for v in e:
            adj[v].append(i)
    alive = [True] * len(edges)
    deg = [len(a) for a in adj]
    queue = [v for v in range(n) if 0 < deg[v] < r]
    removed = [False] * n
    log: List[Tuple[int, List[int]]] = []
    while queue:
        v = queue.pop()
        if removed[v] or deg[v] >= r or deg[v] == 0:
            continue
        removed[v] = True
        gone = [i for i in adj[v] if alive[i]]
        for i in gone:
            alive[i] = False
            for u in edges[i]:
                deg[u] -= 1
                if u != v and not removed[u] and 0 < deg[u] < r:
                    queue.append(u)
        log.append((v, gone))
    return [i for i in range(len(edges)) if alive[i]], log


def _components(edges: List[List[int]], keep: List[int]) -> List[List[int]]:
    parent: Dict[int, int] = {}

    def find(x: int) -> int:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in keep:
        e = edges[i]
        for u in e[1:]:
            parent[find(u)] = find(e[0])
    groups: Dict[int, List[int]] = {}
    for i in keep:
        groups.setdefault(find(edges[i][0]), []).append(i)
    return sorted(groups.values(), key=len)


def _color_reduced(n: int, edges: List[List[int]], r: int, budget: int) -> Tuple[Optional[List[int]], int, bool]:
    """Peel, split into components, and search each component separately."""
    if any(len(e) <= 1 for e in edges):
        return None, 0, True
    keep, log = _peel(n, edges, r)
    color = [0] * n
    nodes = 0
    for comp in _components(edges, keep):
        verts = sorted({v for i in comp for v in edges[i]})
        local = {v: j for j, v in enumerate(verts)}
        sub = [[local[v] for v in edges[i]] for i in comp]
        if r == 2:
            colors, used, exhausted = _search_two(len(verts), sub, budget - nodes)
        else:
            colors, used, exhausted = _search(len(verts), sub, r, budget - nodes)
        nodes += used
        if colors is None:
            return None, nodes, exhausted
        for v, c in zip(verts, colors):
            color[v] = c
    for v, gone in reversed(log):
        banned = set()
        for i in gone:
            others = {color[u] for u in edges[i] if u != v}
            if len(others) == 1:
                banned |= others
        color[v] = min(c for c in range(r) if c not in banned)
    return color, nodes, False


def find_proper_coloring(H: OrderedHypergraph, r: int, budget_nodes: int = DEFAULT_BUDGET_NODES) -> RamseyVerdict:
    """Exact search for a proper r-coloring of the unordered restriction of H."""
    if r < 1:
        raise ValueError("r must be >= 1")
    start = time.perf_counter()
    edges = [sorted(e) for e in H.unordered_edges()]
    colors, nodes, exhausted = _color_reduced(H.v, edges, r, budget_nodes)
    millis = (time.perf_counter() - start) * 1000
    if colors is not None:
        if not is_proper(edges, colors):
            raise AssertionError("coloring search returned an improper coloring")
        return RamseyVerdict(False, Coloring(tuple(colors), r), nodes, millis, r)
    if exhausted:
        return RamseyVerdict(True, None, nodes, millis, r, ("exhausted",))
    return RamseyVerdict(None, None, nodes, millis, r, ("budget exceeded",))


def is_ramsey_bruteforce(H: OrderedHypergraph, r: int) -> bool:
    """Plain enumeration of all r^v colorings."""
    edges = [sorted(e) for e in H.unordered_edges()]
    if not edges:
        return False
    n = H.v
    E = np.array(edges, dtype=np.int64)
    total = r**n
    batch = max(1, min(total, (1 << 22) // max(1, E.size)))
    for start in range(0, total, batch):
        codes = np.arange(start, min(total, start + batch), dtype=np.int64)
        digits = (codes[:, None] // (r ** np.arange(n, dtype=np.int64))[None, :]) % r
        ec = digits[:, E]  # (batch, e, k)
        mono = np.all(ec == ec[:, :, :1], axis=2).any(axis=1)
        if not mono.all():
            return False
    return True


def is_A_r_rado(A: IntegerMatrix, S, r: int, budget_nodes: int = DEFAULT_BUDGET_NODES) -> RamseyVerdict:
    """Whether every r-coloring of S has a monochromatic k-distinct solution."""
    H = from_solutions(A, S)
    return find_proper_coloring(H, r, budget_nodes)


def _colors_array(S, c: Union[Coloring, Sequence[int], Mapping]) -> np.ndarray:
    from .solutions import as_ground_set

    S = as_ground_set(S)
    if isinstance(c, Coloring):
        arr = np.array(c.colors, dtype=np.int64)
    elif isinstance(c, Mapping):
        arr = np.empty(S.size, dtype=np.int64)
        for i, e in enumerate(S.elements()):
            key = e[0] if len(e) == 1 and e[0] in c else e
            if key not in c:
                raise ValueError(f"coloring is not defined on {e}")
            arr[i] = c[key]
    else:
        arr = np.asarray(c, dtype=np.int64)
    if arr.shape != (S.size,):
        raise ValueError("coloring must be total on S")
    return arr


def monochromatic_count(A: IntegerMatrix, S, c, distinct: bool = True) -> int:
    """Number of (k-distinct by default) solutions whose entries share one color."""
    from .solutions import iter_solution_chunks

    colors = _colors_array(S, c)
    total = 0
    for rows in iter_solution_chunks(A, S, distinct=distinct):
        col = colors[rows]
        total += int(np.all(col == col[:, :1], axis=1).sum())
    return total


@dataclass(frozen=True)
class MinMonochromatic:
    value: int
    coloring: Coloring
    exact: bool  # False: sampled upper bound on the true minimum


def min_monochromatic(
    A: IntegerMatrix,
    S,
    r: int,
    mode: str = "exhaustive",
    distinct: bool = True,
    budget: int = 1 << 24,
    samples: int = 200,
    seed: int = 0,
) -> MinMonochromatic:
    """Minimum number of monochromatic solutions over r-colorings of S."""
    from .solutions import as_ground_set, list_solutions

    S = as_ground_set(S)
    if r < 1:
        raise ValueError("r must be >= 1")
    rows = list_solutions(A, S, distinct=distinct)
    n = S.size
    if r == 1 or n == 0:
        return MinMonochromatic(int(rows.shape[0]), Coloring((0,) * n, r), True)
    if mode == "exhaustive":
        # Color permutations preserve the count, so vertex 0 keeps color 0.
        total = r ** (n - 1)
        if total > budget:
            raise SearchBudgetExceeded(f"{r}^{n - 1} colorings exceed the budget {budget}")
        best_val, best_code = None, 0
        batch = max(1, min(total, (1 << 23) // max(1, rows.size)))
        powers = r ** np.arange(n - 1, dtype=np.int64)
        for start in range(0, total, batch):
            codes = np.arange(start, min(total, start + batch), dtype=np.int64)
            digits = np.zeros((codes.size, n), dtype=np.int64)
            digits[:, 1:] = (codes[:, None] // powers[None, :]) % r
            if rows.shape[0]:
                col = digits[:, rows]
                counts = np.all(col == col[:, :, :1], axis=2).sum(axis=1)
            else:
                counts = np.zeros(codes.size, dtype=np.int64)
            i = int(np.argmin(counts))
            if best_val is None or counts[i] < best_val:
                best_val, best_code = int(counts[i]), int(codes[i])
        colors = [0] + [(best_code // r**j) % r for j in range(n - 1)]
        return MinMonochromatic(int(best_val), Coloring(tuple(colors), r), True)
    if mode != "sampled":
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    rng = np.random.default_rng(seed)
    incidence: List[List[int]] = [[] for _ in range(n)]
    for i, row in enumerate(rows.tolist()):
        for v in set(row):
            incidence[v].append(i)

    def mono_of(colors: np.ndarray) -> np.ndarray:
        col = colors[rows]
        return np.all(col == col[:, :1], axis=1)

    best: Optional[Tuple[int, np.ndarray]] = None
    for _ in range(samples):
        colors = rng.integers(r, size=n)
        mono = mono_of(colors)
        improved = True
        while improved:
            improved = False
            for v in range(n):
                rel = incidence[v]
                if not rel:
                    continue
                sub = rows[rel]
                current = int(mono[rel].sum())
                for c in range(r):
                    if c == colors[v]:
                        continue
                    old = colors[v]
                    colors[v] = c
                    col = colors[sub]
                    new_mono = np.all(col == col[:, :1], axis=1)
                    if int(new_mono.sum()) < current:
                        mono[rel] = new_mono
                        improved = True
                        break
                    colors[v] = old
        value = int(mono.sum())
        if best is None or value < best[0]:
            best = (value, colors.copy())
    assert best is not None
    return MinMonochromatic(best[0], Coloring(tuple(int(c) for c in best[1]), r), False)
