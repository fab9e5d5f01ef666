"""Solutions of Ax = 0 in a ground set: counting, projections, thresholds,
richness, extendability, compatibility and the key counting bounds."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import RationalPower, format_fraction
from .groundsets import GroundSet
from .groups import EnumerationLimitError, FiniteAbelianGroup
from .linalg import in_image_mod
from .matrices import IntegerMatrix, group_image_size, rank_group, rank_rational

log = logging.getLogger(__name__)

DEFAULT_VISIT_CAP = 10**8
DEFAULT_MATERIALIZE_LIMIT = 10**7
_CHUNK = 1 << 20
_INT64_SAFE = 1 << 62

Cols = Tuple[int, ...]  # 1-based column labels


def as_ground_set(S: Union[GroundSet, FiniteAbelianGroup]) -> GroundSet:
    if isinstance(S, GroundSet):
        return S
    if isinstance(S, FiniteAbelianGroup):
        return GroundSet.of_group(S)
    raise TypeError(f"expected a GroundSet or FiniteAbelianGroup, got {type(S).__name__}")


def _cols(cols) -> Cols:
    return tuple(sorted(set(int(c) for c in cols)))


def _check_cols(A: IntegerMatrix, cols: Cols) -> None:
    for c in cols:
        if not 1 <= c <= A.k:
            raise ValueError(f"column {c} outside [1, {A.k}]")


def _nonempty_subsets(cols: Sequence[int], min_size: int = 1) -> Iterator[Cols]:
    for size in range(min_size, len(cols) + 1):
        yield from itertools.combinations(cols, size)


# ---------------------------------------------------------------------------
# Enumeration engine


class _SortedKeys:
    """Sorted lookup table of encoded sum vectors, optionally carrying tuples."""

    def __init__(self, keys: np.ndarray, rows: Optional[np.ndarray] = None):
        order = np.argsort(keys, kind="stable")
        self.keys = keys[order]
        self.rows = rows[order] if rows is not None else None

    def ranges(self, queries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.searchsorted(self.keys, queries, side="left")
        hi = np.searchsorted(self.keys, queries, side="right")
        return lo, hi

    def contains(self, queries: np.ndarray) -> np.ndarray:
        lo, hi = self.ranges(queries)
        return hi > lo


class SolutionEngine:
    """Enumerates tuples of S by column blocks and matches their sums.

    Element tuples are handled as index arrays into ``S.elements()``. A sum
    over a column block is the (l*d)-vector sum_j a_j x_j reduced modulo the
    ambient moduli; sums are encoded as int64 keys when a mixed radix fits,
    otherwise as Python tuples in object arrays.
    """

    def __init__(self, A: IntegerMatrix, S: Union[GroundSet, FiniteAbelianGroup], visit_cap: int = DEFAULT_VISIT_CAP):
        self.A = A
        self.S = as_ground_set(S)
        self.visit_cap = visit_cap
        self.N = self.S.size
        self.k = A.k
        S_ = self.S
        d = S_.dim
        self.mod = np.array([S_.moduli[c] for _ in range(A.ell) for c in range(d)], dtype=np.int64)
        self.mod_mask = self.mod > 0
        E = S_.array() if self.N else np.zeros((0, d), dtype=np.int64)
        max_elem = int(max((abs(int(v)) for v in E.flat), default=0))
        max_coef = max(abs(a) for r in A.rows for a in r)
        max_mod = int(self.mod.max(initial=0))
        bound = (self.k + 1) * max(max_elem * max_coef, max_mod) + 1
        self.dtype = np.int64 if bound < _INT64_SAFE and E.dtype != object else object
        Eo = E.astype(self.dtype)
        self.contrib: List[np.ndarray] = []
        for j in range(self.k):
            col = np.concatenate([A.rows[r][j] * Eo for r in range(A.ell)], axis=1) if self.N else np.zeros((0, A.ell * d), dtype=self.dtype)
            self.contrib.append(self._reduce(col))
        self._setup_radix()

    # -- sums and keys -----------------------------------------------------

    def _reduce(self, x: np.ndarray) -> np.ndarray:
        if self.mod_mask.any():
            x = x.copy()
            x[:, self.mod_mask] %= self.mod[self.mod_mask]
        return x

    def _setup_radix(self) -> None:
        D = self.mod.size
        bounds = np.zeros(D, dtype=object)
        for c in self.contrib:
            if c.shape[0]:
                bounds = bounds + np.abs(c).max(axis=0).astype(object)
        sizes = [int(self.mod[i]) if self.mod[i] else 2 * int(bounds[i]) + 1 for i in range(D)]
        total = math.prod(sizes)
        if self.dtype is np.int64 and total < _INT64_SAFE:
            radix = [1]
            for s in sizes[:-1]:
                radix.append(radix[-1] * s)
            self._radix = np.array(radix, dtype=np.int64)
            self._shift = np.array([0 if self.mod[i] else int(bounds[i]) for i in range(D)], dtype=np.int64)
        else:
            self._radix = None

    def encode(self, sums: np.ndarray) -> np.ndarray:
        if self._radix is not None:
            return ((sums + self._shift) * self._radix).sum(axis=1)
        keys = np.empty(sums.shape[0], dtype=object)
        for i, row in enumerate(sums.tolist()):
            keys[i] = tuple(row)
        return keys

    def fixed_sum(self, fixed: Dict[int, int]) -> np.ndarray:
        """Sum of the contributions of fixed columns (0-based column -> element index)."""
        total = np.zeros(self.mod.size, dtype=self.dtype)
        for j, i in fixed.items():
            total = total + self.contrib[j][i]
        return total

    def charge(self, *block_sizes: int) -> None:
        visits = sum(self.N**m for m in block_sizes)
        if visits > self.visit_cap:
            raise EnumerationLimitError(
                f"enumeration would visit {visits} tuples (cap {self.visit_cap}); |S| = {self.N}"
            )

    def tuples(self, cols: Sequence[int], base: Optional[np.ndarray] = None) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Chunks (idx, sums) over S^cols in lexicographic order; cols are 0-based."""
        m = len(cols)
        D = self.mod.size
        if base is None:
            base = np.zeros(D, dtype=self.dtype)
        if m == 0:
            yield np.zeros((1, 0), dtype=np.int64), self._reduce(base[None, :].copy())
            return
        N = self.N
        if N == 0:
            return
        t = 1
        while t < m and N ** (t + 1) <= _CHUNK:
            t += 1
        tail = cols[m - t :]
        grid = np.indices((N,) * t, dtype=np.int64).reshape(t, -1).T
        tail_sum = np.zeros((grid.shape[0], D), dtype=self.dtype)
        for i, c in enumerate(tail):
            tail_sum = tail_sum + self.contrib[c][grid[:, i]]
        for head in itertools.product(range(N), repeat=m - t):
            s = base
            for c, h in zip(cols[: m - t], head):
                s = s + self.contrib[c][h]
            sums = self._reduce(tail_sum + s)
            if head:
                idx = np.hstack([np.broadcast_to(np.array(head, dtype=np.int64), (grid.shape[0], m - t)), grid])
            else:
                idx = grid
            yield idx, sums

    def sumset(self, cols: Sequence[int]) -> _SortedKeys:
        keys = [self.encode(s) for _, s in self.tuples(cols)]
        allkeys = np.concatenate(keys) if keys else np.zeros(0, dtype=np.int64)
        return _SortedKeys(np.unique(allkeys))

    # -- projected solutions -------------------------------------------------

    def _split(self, free: Sequence[int]) -> Tuple[List[int], List[int]]:
        r = len(free) // 2
        return list(free[: len(free) - r]), list(free[len(free) - r :])

    def iter_projected(
        self, W: Cols, w0: Sequence[int], Y: Cols, count_only: bool = False
    ) -> Iterator[Union[int, np.ndarray]]:
        """Chunks of Sol(w0, W, Y) as index rows over sorted Y (or chunk counts).

        W, Y are 1-based; w0 holds element indices aligned with sorted W.
        """
        k = self.k
        Y0 = [c - 1 for c in Y]
        fixed = {c - 1: int(i) for c, i in zip(W, w0)}
        base = self.fixed_sum(fixed)
        free = [c for c in Y0 if c not in fixed]
        pos = {c: p for p, c in enumerate(Y0)}
        if len(Y0) == k:
            left, right = self._split(free)
            self.charge(len(left), len(right))
            table_keys, table_rows = [], []
            for idx, sums in self.tuples(right):
                table_keys.append(self.encode(sums))
                table_rows.append(idx)
            table = _SortedKeys(np.concatenate(table_keys), np.concatenate(table_rows))
            for idx, sums in self.tuples(left, base):
                q = self.encode(self._reduce(-sums))
                lo, hi = table.ranges(q)
                cnt = hi - lo
                total = int(cnt.sum())
                if count_only:
                    yield total
                    continue
                if total == 0:
                    continue
                starts = np.repeat(lo - (np.cumsum(cnt) - cnt), cnt) + np.arange(total)
                rows = np.empty((total, len(Y0)), dtype=np.int64)
                left_rows = np.repeat(idx, cnt, axis=0)
                for p, c in enumerate(left):
                    rows[:, pos[c]] = left_rows[:, p]
                right_rows = table.rows[starts]
                for p, c in enumerate(right):
                    rows[:, pos[c]] = right_rows[:, p]
                for c, i in fixed.items():
                    rows[:, pos[c]] = i
                yield rows
            return
        comp = [c for c in range(k) if c not in pos]
        self.charge(len(free), len(comp))
        T = self.sumset(comp)
        for idx, sums in self.tuples(free, base):
            mask = T.contains(self.encode(self._reduce(-sums)))
            if count_only:
                yield int(mask.sum())
                continue
            if not mask.any():
                continue
            sel = idx[mask]
            rows = np.empty((sel.shape[0], len(Y0)), dtype=np.int64)
            for p, c in enumerate(free):
                rows[:, pos[c]] = sel[:, p]
            for c, i in fixed.items():
                rows[:, pos[c]] = i
            yield rows

    def count(self, W: Cols = (), w0: Sequence[int] = (), Y: Optional[Cols] = None) -> int:
        Y = tuple(range(1, self.k + 1)) if Y is None else Y
        return sum(self.iter_projected(W, w0, Y, count_only=True))  # type: ignore[arg-type]

    def listing(
        self, W: Cols = (), w0: Sequence[int] = (), Y: Optional[Cols] = None, limit: int = DEFAULT_MATERIALIZE_LIMIT
    ) -> np.ndarray:
        Y = tuple(range(1, self.k + 1)) if Y is None else Y
        chunks, total = [], 0
        for rows in self.iter_projected(W, w0, Y):
            total += rows.shape[0]  # type: ignore[union-attr]
            if total > limit:
                raise EnumerationLimitError(f"more than {limit} projected solutions to materialize")
            chunks.append(rows)
        if not chunks:
            return np.zeros((0, len(Y)), dtype=np.int64)
        return np.concatenate(chunks)


# ---------------------------------------------------------------------------
# Closed forms for full finite abelian groups


def _image(A: IntegerMatrix, G: FiniteAbelianGroup, cols: Cols) -> int:
    return group_image_size(A, G, cols) if cols else 1


def _group_count_Y(A: IntegerMatrix, S: GroundSet, Y: Cols) -> int:
    """|Sol(Y)| = N^|Y| * I(A_Ybar) / I(A) for a full group."""
    G = S.group
    assert G is not None
    full = tuple(range(1, A.k + 1))
    num = S.size ** len(Y) * _image(A, G, A.complement(Y))
    return num // _image(A, G, full)


def _extends(A: IntegerMatrix, S: GroundSet, W: Cols, w0: Sequence[Tuple[int, ...]]) -> bool:
    """Whether A_Wbar x = -A_W w0 is solvable in the ambient group."""
    G = S.group
    assert G is not None
    comp = A.complement(W)
    columns = [A.column(j) for j in comp]
    for c, m in enumerate(G.moduli):
        target = [-sum(A.rows[r][j - 1] * w0[p][c] for p, j in enumerate(W)) for r in range(A.ell)]
        if not columns:
            if any(t % m for t in target):
                return False
        elif not in_image_mod(columns, target, m):
            return False
    return True


def _group_projected_count(A: IntegerMatrix, S: GroundSet, W: Cols, w0: Sequence[Tuple[int, ...]], Y: Cols) -> int:
    if not _extends(A, S, W, w0):
        return 0
    G = S.group
    assert G is not None
    num = S.size ** (len(Y) - len(W)) * _image(A, G, A.complement(Y))
    return num // _image(A, G, A.complement(W))


# ---------------------------------------------------------------------------
# Public operations


@dataclass(frozen=True)
class ProjectedSolutionQuery:
    """W ⊆ Y ⊆ [k] (1-based) and w0 ∈ S^|W| aligned with sorted W."""

    W: Cols
    Y: Cols
    w0: Tuple = ()

    def __post_init__(self) -> None:
        W, Y = _cols(self.W), _cols(self.Y)
        if not set(W) <= set(Y):
            raise ValueError(f"W = {W} is not a subset of Y = {Y}")
        if len(self.w0) != len(W):
            raise ValueError(f"|w0| = {len(self.w0)} but |W| = {len(W)}")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "w0", tuple(self.w0))


@dataclass(frozen=True)
class ProjectedResult:
    count: int
    rows: Optional[List[Tuple]] = None  # Y-tuples of elements, sorted-Y order


def _element(S: GroundSet, e) -> Tuple[int, ...]:
    return tuple(e) if isinstance(e, (tuple, list)) else (int(e),)


def _w0_indices(S: GroundSet, w0: Sequence) -> Optional[List[int]]:
    out = []
    for e in w0:
        e = _element(S, e)
        if e not in S:
            return None
        out.append(S.index_of(e))
    return out


def _as_elements(S: GroundSet, rows: np.ndarray) -> List[Tuple]:
    elems = S.elements()
    flat = S.dim == 1
    return [tuple(elems[i][0] if flat else elems[i] for i in row) for row in rows.tolist()]


def count_solutions(A: IntegerMatrix, S, visit_cap: int = DEFAULT_VISIT_CAP) -> int:
    """|Sol_S^A([k])|: closed form on full groups, meet-in-the-middle otherwise."""
    S = as_ground_set(S)
    if S.is_full_group:
        return _group_count_Y(A, S, tuple(range(1, A.k + 1)))
    return SolutionEngine(A, S, visit_cap).count()


def projected_count(A: IntegerMatrix, S, W: Sequence[int], Y: Sequence[int], w0: Sequence = (), visit_cap: int = DEFAULT_VISIT_CAP) -> int:
    return projected_solutions(A, S, ProjectedSolutionQuery(tuple(W), tuple(Y), tuple(w0)), visit_cap=visit_cap).count


def projected_solutions(
    A: IntegerMatrix,
    S,
    q: ProjectedSolutionQuery,
    listing: bool = False,
    limit: int = DEFAULT_MATERIALIZE_LIMIT,
    visit_cap: int = DEFAULT_VISIT_CAP,
) -> ProjectedResult:
    S = as_ground_set(S)
    _check_cols(A, q.Y)
    idx = _w0_indices(S, q.w0)
    if idx is None:
        return ProjectedResult(0, [] if listing else None)
    if not q.Y:
        return ProjectedResult(1, [()] if listing else None)
    if S.is_full_group and not listing:
        w0 = [S.elements()[i] for i in idx] if idx else []
        return ProjectedResult(_group_projected_count(A, S, q.W, w0, q.Y))
    engine = SolutionEngine(A, S, visit_cap)
    if not listing:
        return ProjectedResult(engine.count(q.W, idx, q.Y))
    rows = engine.listing(q.W, idx, q.Y, limit)
    if rows.shape[0] > limit:
        return ProjectedResult(int(rows.shape[0]))
    return ProjectedResult(int(rows.shape[0]), _as_elements(S, rows))


def solution_count_Y(A: IntegerMatrix, S, Y: Sequence[int], visit_cap: int = DEFAULT_VISIT_CAP) -> int:
    """|Sol_S^A(Y)|."""
    S = as_ground_set(S)
    Y = _cols(Y)
    if not Y:
        return 1
    if S.is_full_group:
        return _group_count_Y(A, S, Y)
    return SolutionEngine(A, S, visit_cap).count((), (), Y)


def _distinct_mask(rows: np.ndarray) -> np.ndarray:
    k = rows.shape[1]
    mask = np.ones(rows.shape[0], dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            mask &= rows[:, i] != rows[:, j]
    return mask


def iter_solution_chunks(A: IntegerMatrix, S, distinct: bool = False, visit_cap: int = DEFAULT_VISIT_CAP) -> Iterator[np.ndarray]:
    """Index rows (into S.elements()) of all solutions, lexicographic order."""
    engine = SolutionEngine(A, S, visit_cap)
    for rows in engine.iter_projected((), (), tuple(range(1, A.k + 1))):
        if distinct:
            rows = rows[_distinct_mask(rows)]  # type: ignore[index]
        if rows.shape[0]:  # type: ignore[union-attr]
            yield rows  # type: ignore[misc]


def list_solutions(
    A: IntegerMatrix, S, distinct: bool = False, limit: int = DEFAULT_MATERIALIZE_LIMIT, visit_cap: int = DEFAULT_VISIT_CAP
) -> np.ndarray:
    chunks, total = [], 0
    for rows in iter_solution_chunks(A, S, distinct, visit_cap):
        total += rows.shape[0]
        if total > limit:
            raise EnumerationLimitError(f"more than {limit} solutions to materialize")
        chunks.append(rows)
    if not chunks:
        return np.zeros((0, A.k), dtype=np.int64)
    return np.concatenate(chunks)


def find_distinct_solution(A: IntegerMatrix, S, visit_cap: int = DEFAULT_VISIT_CAP) -> Optional[Tuple]:
    S = as_ground_set(S)
    for rows in iter_solution_chunks(A, S, distinct=True, visit_cap=visit_cap):
        return _as_elements(S, rows[:1])[0]
    return None


def has_distinct_solution(A: IntegerMatrix, S, visit_cap: int = DEFAULT_VISIT_CAP) -> bool:
    return find_distinct_solution(A, S, visit_cap) is not None


def _unique_rows(rows: np.ndarray, N: int, return_counts: bool = False):
    if rows.shape[1] == 0:
        n = 1 if rows.shape[0] else 0
        uniq = np.zeros((n, 0), dtype=np.int64)
        return (uniq, np.array([rows.shape[0]] * n, dtype=np.int64)) if return_counts else uniq
    return np.unique(rows, axis=0, return_counts=return_counts)


@dataclass(frozen=True)
class KDistinctStats:
    distinct: int
    total: int
    ratio: Fraction


def k_distinct_stats(A: IntegerMatrix, S, Y: Optional[Sequence[int]] = None, visit_cap: int = DEFAULT_VISIT_CAP) -> KDistinctStats:
    """(|k-Sol(Y)|, |Sol(Y)|, ratio); the ratio is 1 when there are no solutions."""
    S = as_ground_set(S)
    Y = _cols(range(1, A.k + 1) if Y is None else Y)
    _check_cols(A, Y)
    sel = [c - 1 for c in Y]
    projected = [rows[:, sel] for rows in iter_solution_chunks(A, S, distinct=True, visit_cap=visit_cap)]
    if projected:
        distinct = int(_unique_rows(np.concatenate(projected), S.size).shape[0])
    else:
        distinct = 0
    total = solution_count_Y(A, S, Y, visit_cap)
    ratio = Fraction(distinct, total) if total else Fraction(1)
    return KDistinctStats(distinct, total, ratio)


# ---------------------------------------------------------------------------
# Thresholds


@dataclass(frozen=True)
class ThresholdEntry:
    W: Cols
    count: int
    p: Optional[RationalPower]  # None marks an infinite p_W (zero count)

    def render(self) -> str:
        return "inf" if self.p is None else self.p.render()


@dataclass(frozen=True)
class ThresholdTable:
    size: int
    entries: Tuple[ThresholdEntry, ...]
    p_hat: RationalPower
    maximizers: Tuple[Cols, ...]
    warnings: Tuple[str, ...] = ()

    def entry(self, W: Sequence[int]) -> ThresholdEntry:
        W = _cols(W)
        for e in self.entries:
            if e.W == W:
                return e
        raise KeyError(W)

    def p(self, W: Sequence[int]) -> Optional[RationalPower]:
        return self.entry(W).p


def p_value(size: int, count: int, w: int) -> RationalPower:
    """p_W = (|Sol(W)| / |S|)^(-1/(|W|-1))."""
    return RationalPower(1, Fraction(size, count), Fraction(1, w - 1))


def solution_counts(A: IntegerMatrix, S, min_size: int = 1, visit_cap: int = DEFAULT_VISIT_CAP) -> Dict[Cols, int]:
    """|Sol(W)| for every W ⊆ [k] with |W| >= min_size."""
    S = as_ground_set(S)
    full = tuple(range(1, A.k + 1))
    if S.is_full_group:
        return {W: _group_count_Y(A, S, W) for W in _nonempty_subsets(full, min_size)}
    engine = SolutionEngine(A, S, visit_cap)
    return {W: engine.count((), (), W) for W in _nonempty_subsets(full, min_size)}


def threshold_table(A: IntegerMatrix, S, visit_cap: int = DEFAULT_VISIT_CAP) -> ThresholdTable:
    S = as_ground_set(S)
    if A.k < 2:
        raise ValueError("thresholds need k >= 2")
    counts = solution_counts(A, S, 2, visit_cap)
    entries = []
    warnings = []
    for W, c in counts.items():
        if c == 0:
            warnings.append(f"|Sol(W)| = 0 for W = {set(W)}; p_W is infinite and excluded")
            entries.append(ThresholdEntry(W, 0, None))
        else:
            entries.append(ThresholdEntry(W, c, p_value(S.size, c, len(W))))
    finite = [e for e in entries if e.p is not None]
    if not finite:
        raise ValueError("all projected solution counts are zero")
    for w in warnings:
        log.warning(w)
    p_hat = max(e.p for e in finite)  # type: ignore[type-var]
    maximizers = tuple(e.W for e in finite if e.p == p_hat)
    return ThresholdTable(S.size, tuple(entries), p_hat, maximizers, tuple(warnings))


# ---------------------------------------------------------------------------
# Richness, extendability


def _rank_exponent(A: IntegerMatrix, S: GroundSet, cols: Cols) -> Fraction:
    """rank_S(A_cols) when it is rational (ranks over Q for integer ground sets)."""
    if S.group is None:
        return Fraction(rank_rational(A, cols) if cols else 0)
    r = rank_group(A, S.group, cols).as_fraction() if cols else Fraction(0)
    if r is None:
        raise ValueError("rank is irrational")
    return r


def richness(A: IntegerMatrix, S, visit_cap: int = DEFAULT_VISIT_CAP) -> Union[Fraction, float]:
    """ε = |Sol([k])| / |S|^(k - rank_S(A)); exact whenever the power is rational."""
    S = as_ground_set(S)
    full = tuple(range(1, A.k + 1))
    count = count_solutions(A, S, visit_cap)
    N = S.size
    if S.is_full_group:
        assert S.group is not None
        return Fraction(count * group_image_size(A, S.group, full), N**A.k)
    if count == 0:
        return Fraction(0)
    if S.group is None:
        return Fraction(count, N ** (A.k - rank_rational(A, full)))
    rank = rank_group(A, S.group, full)
    r = rank.as_fraction()
    if r is not None:
        value = RationalPower(count, N, -(A.k - r))
        if value.is_rational():
            return value.as_fraction()  # type: ignore[return-value]
        return float(value)
    return math.exp(math.log(count) - (A.k - float(rank)) * math.log(N))


@dataclass(frozen=True)
class Extendability:
    B: Fraction
    W: Cols
    Y: Cols
    w0: Tuple
    method: str  # "closed-form" or "enumeration"


def extendability(A: IntegerMatrix, S, force_enumeration: bool = False, visit_cap: int = DEFAULT_VISIT_CAP) -> Extendability:
    """Least B with |Sol(w0,W,Y)| <= B |Sol(Y)| / |Sol(W)| for all nonempty W ⊆ Y."""
    S = as_ground_set(S)
    full = tuple(range(1, A.k + 1))
    if S.is_full_group and not force_enumeration:
        # Each ratio equals 1 for w0 in Sol(W) and 0 otherwise.
        if count_solutions(A, S) == 0:
            raise ValueError("no solutions")
        zero = 0 if S.dim == 1 else (0,) * S.dim
        return Extendability(Fraction(1), (1,), (1,), (zero,), "closed-form")
    sols = list_solutions(A, S, visit_cap=visit_cap)
    if sols.shape[0] == 0:
        raise ValueError("no solutions")
    best: Optional[Tuple[Fraction, Cols, Cols, Tuple[int, ...]]] = None
    for Y in _nonempty_subsets(full):
        ysel = [c - 1 for c in Y]
        sol_Y = _unique_rows(sols[:, ysel], S.size)
        n_Y = sol_Y.shape[0]
        for W in _nonempty_subsets(Y):
            wsel = [Y.index(c) for c in W]
            uniq, counts = _unique_rows(sol_Y[:, wsel], S.size, return_counts=True)
            i = int(np.argmax(counts))
            value = Fraction(int(counts[i]) * uniq.shape[0], n_Y)
            if best is None or value > best[0]:
                best = (value, W, Y, tuple(int(v) for v in uniq[i]))
    assert best is not None
    value, W, Y, w_idx = best
    w0 = tuple(_as_elements(S, np.array([w_idx], dtype=np.int64))[0])
    return Extendability(value, W, Y, w0, "enumeration")


# ---------------------------------------------------------------------------
# Compatibility diagnostics


def heuristic_X(table: ThresholdTable) -> Optional[Cols]:
    """Among |W| >= 3 with maximal p_W, the smallest (then lexicographically first)."""
    cands = [e for e in table.entries if len(e.W) >= 3 and e.p is not None]
    if not cands:
        return None
    top = max(e.p for e in cands)  # type: ignore[type-var]
    return min((e.W for e in cands if e.p == top), key=lambda W: (len(W), W))


def compatibility_value(size: int, counts: Dict[Cols, int], W: Cols, W2: Cols, X: Cols) -> RationalPower:
    """(|S|^2/|Sol(W)|) * (p_W'/p_X)^(|W'|-1), computed exactly.

    With q_Z = |Sol(Z)|/|S| this is (|S|^2/|Sol(W)|) * q_X^((|W'|-1)/(|X|-1)) / q_W'.
    """
    q_X = Fraction(counts[X], size)
    q_W2 = Fraction(counts[W2], size)
    coeff = Fraction(size * size, counts[W]) / q_W2
    return RationalPower(coeff, q_X, Fraction(len(W2) - 1, len(X) - 1))


@dataclass(frozen=True)
class CompatibilityEntry:
    x_source: str  # "user" or "heuristic"
    X: Cols
    W: Cols
    W2: Cols
    value: RationalPower


@dataclass(frozen=True)
class CompatibilityRow:
    spec: str
    size: int
    strong: Dict[Cols, Fraction]  # |S|^2 / |Sol(W)| for |W| = 2
    weak: Dict[Cols, Fraction]  # |S| / |Sol(W)| for |W| = 2
    heuristic_X: Optional[Cols]
    entries: Tuple[CompatibilityEntry, ...]


@dataclass(frozen=True)
class CompatibilityReport:
    rows: Tuple[CompatibilityRow, ...]
    strong_trend: Dict[Cols, str]
    weak_trend: Dict[Cols, str]
    entry_trend: Dict[Tuple[str, Cols, Cols, Cols], str]

    def values(self, x_source: str, X: Cols, W: Cols, W2: Cols) -> List[RationalPower]:
        out = []
        for row in self.rows:
            for e in row.entries:
                if (e.x_source, e.X, e.W, e.W2) == (x_source, X, W, W2):
                    out.append(e.value)
        return out


def trend(values: Sequence) -> str:
    """"increasing", "decreasing", "constant" or "mixed" (strict, exact comparisons)."""
    if len(values) < 2:
        return "constant"
    pairs = list(zip(values, values[1:]))
    if all(a < b for a, b in pairs):
        return "increasing"
    if all(b < a for a, b in pairs):
        return "decreasing"
    if all(a == b for a, b in pairs):
        return "constant"
    return "mixed"


def _proper_subsets(X: Cols, min_size: int) -> Iterator[Cols]:
    for size in range(min_size, len(X)):
        yield from itertools.combinations(X, size)


def compatibility_report(
    A: IntegerMatrix,
    family: Sequence,
    X_choice: Optional[Sequence[int]] = None,
    visit_cap: int = DEFAULT_VISIT_CAP,
) -> CompatibilityReport:
    """Finite-n values of the compatibility quantities over a family S_1, S_2, ...

    Only values and monotonicity flags are reported; no limit is asserted.
    """
    if not family:
        raise ValueError("empty family")
    user_X = _cols(X_choice) if X_choice is not None else None
    if user_X is not None:
        _check_cols(A, user_X)
        if len(user_X) < 3:
            raise ValueError("X must have at least 3 columns")
    rows = []
    for S in family:
        S = as_ground_set(S)
        counts = solution_counts(A, S, 2, visit_cap)
        N = S.size
        pairs = [W for W in counts if len(W) == 2]
        strong = {W: Fraction(N * N, counts[W]) for W in pairs if counts[W]}
        weak = {W: Fraction(N, counts[W]) for W in pairs if counts[W]}
        hx = None
        if A.k >= 3 and any(counts.values()):
            table = threshold_table(A, S, visit_cap)
            hx = heuristic_X(table)
        entries = []
        for source, X in (("user", user_X), ("heuristic", hx)):
            if X is None or counts.get(X, 0) == 0:
                continue
            for W in _proper_subsets(X, 2):
                if len(W) != 2 or counts[W] == 0:
                    continue
                for W2 in _proper_subsets(X, 2):
                    if counts[W2] == 0:
                        continue
                    entries.append(CompatibilityEntry(source, X, W, W2, compatibility_value(N, counts, W, W2, X)))
        rows.append(CompatibilityRow(S.spec, N, strong, weak, hx, tuple(entries)))

    def series(getter) -> Dict:
        keys = None
        for row in rows:
            ks = set(getter(row))
            keys = ks if keys is None else keys & ks
        return {key: trend([getter(row)[key] for row in rows]) for key in sorted(keys or ())}

    strong_trend = series(lambda r: r.strong)
    weak_trend = series(lambda r: r.weak)
    entry_trend = series(lambda r: {(e.x_source, e.X, e.W, e.W2): e.value for e in r.entries})
    return CompatibilityReport(tuple(rows), strong_trend, weak_trend, entry_trend)


# ---------------------------------------------------------------------------
# Key counting bounds


@dataclass(frozen=True)
class BoundViolation:
    kind: str  # "upper", "lower", "equality"
    W: Cols
    Y: Cols
    w0: Tuple
    count: int
    bound: Fraction


@dataclass
class KeyBoundsReport:
    applicable: bool
    reason: str = ""
    epsilon: Optional[Fraction] = None
    checked: int = 0
    equality_checked: int = 0
    violations: List[BoundViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.applicable and not self.violations

    def render(self) -> str:
        if not self.applicable:
            return f"not applicable: {self.reason}"
        status = "pass" if self.passed else f"FAIL ({len(self.violations)} violations)"
        eps = format_fraction(self.epsilon) if self.epsilon is not None else "?"
        return f"{status}: {self.checked} projected counts checked, {self.equality_checked} equalities, eps = {eps}"


def key_bound(A: IntegerMatrix, S: GroundSet, W: Cols, Y: Cols) -> Fraction:
    """|S|^(|Y|-|W|-rank_S(A_Wbar)+rank_S(A_Ybar)) as an exact rational."""
    N = S.size
    if S.group is not None:
        G = S.group
        return Fraction(N ** (len(Y) - len(W)) * _image(A, G, A.complement(Y)), _image(A, G, A.complement(W)))
    e = len(Y) - len(W) - rank_rational(A, A.complement(W)) + rank_rational(A, A.complement(Y))
    return Fraction(N) ** e


def key_bounds_check(
    A: IntegerMatrix,
    S,
    samples: Optional[int] = None,
    seed: int = 0,
    visit_cap: int = DEFAULT_VISIT_CAP,
) -> KeyBoundsReport:
    """Check the projected-solution upper bound and the two-sided richness bounds.

    With ``samples`` None every W ⊆ Y ⊆ [k] and every w0 ∈ Sol(W) is checked
    (w0 outside Sol(W) has count 0); otherwise that many random (W, Y, w0)
    triples are checked. On full groups the upper bound must hold with
    equality for every w0 ∈ Sol(W).
    """
    S = as_ground_set(S)
    if not (S.is_full_group or S.is_field_power):
        return KeyBoundsReport(False, "S is neither a finite abelian group nor a power of a subset of a field")
    full = tuple(range(1, A.k + 1))
    group = S.is_full_group
    report = KeyBoundsReport(True)
    eps = richness(A, S, visit_cap)
    report.epsilon = eps if isinstance(eps, Fraction) else None
    engine = SolutionEngine(A, S, visit_cap)
    sols = engine.listing()
    grouped: Dict[Tuple[Cols, Cols], Dict[Tuple[int, ...], int]] = {}

    def projected_counts(W: Cols, Y: Cols) -> Dict[Tuple[int, ...], int]:
        if (W, Y) not in grouped:
            sol_Y = _unique_rows(sols[:, [c - 1 for c in Y]], S.size)
            wsel = [Y.index(c) for c in W]
            uniq, counts = _unique_rows(sol_Y[:, wsel], S.size, return_counts=True)
            grouped[(W, Y)] = {tuple(int(v) for v in u): int(c) for u, c in zip(uniq, counts)}
        return grouped[(W, Y)]

    pairs = [(W, Y) for Y in _nonempty_subsets(full) for size in range(0, len(Y) + 1) for W in itertools.combinations(Y, size)]
    elems = S.elements()

    def check(W: Cols, Y: Cols, w_idx: Tuple[int, ...], count: int) -> None:
        bound = key_bound(A, S, W, Y)
        report.checked += 1
        w0 = tuple(elems[i] for i in w_idx)
        if count > bound:
            report.violations.append(BoundViolation("upper", W, Y, w0, count, bound))
        if group and count > 0:
            report.equality_checked += 1
            if count != bound:
                report.violations.append(BoundViolation("equality", W, Y, w0, count, bound))

    if samples is None:
        for W, Y in pairs:
            for w_idx, count in projected_counts(W, Y).items():
                check(W, Y, w_idx, count)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            W, Y = pairs[int(rng.integers(len(pairs)))]
            table = projected_counts(W, Y)
            if table and rng.random() < 0.5:
                keys = sorted(table)
                w_idx = keys[int(rng.integers(len(keys)))]
            else:
                w_idx = tuple(int(i) for i in rng.integers(S.size, size=len(W)))
            check(W, Y, w_idx, table.get(w_idx, 0))

    # Two-sided bounds on |Sol(Z)| for every nonempty Z.
    for Z in _nonempty_subsets(full):
        count = sum(projected_counts((), Z).values())
        upper = key_bound(A, S, (), Z)
        report.checked += 1
        if count > upper:
            report.violations.append(BoundViolation("upper", (), Z, (), count, upper))
        lower = eps * upper if isinstance(eps, Fraction) else float(eps) * float(upper)
        if count < lower:
            report.violations.append(BoundViolation("lower", (), Z, (), count, Fraction(lower)))
    return report
