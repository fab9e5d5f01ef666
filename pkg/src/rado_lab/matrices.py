"""Integer matrices, ranks over Q / Z_p / finite abelian groups, the columns
condition, and the m-parameters."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .exact import ExactLogValue, RationalPower, format_fraction
from .groups import FiniteAbelianGroup, exponent
from .linalg import (
    bareiss_rank,
    elementary_divisors,
    image_size_mod,
    is_prime,
    rank_mod_prime,
    solve_mod,
    solve_rational,
)

ColumnSet = FrozenSet[int]


class UndefinedParameterError(ValueError):
    """An m-parameter denominator is not strictly positive."""

    def __init__(self, W: ColumnSet, message: str):
        super().__init__(message)
        self.W = W


@dataclass(frozen=True)
class IntegerMatrix:
    """An l x k integer matrix. Column labels are 1-based, as in [k] = {1..k}."""

    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows:
            raise ValueError("a matrix needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("matrix rows have different lengths")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "IntegerMatrix":
        rows = [tuple(r) for r in rows]
        if rows and not isinstance(rows[0], tuple):
            rows = [tuple(rows)]
        return cls(tuple(rows))

    @classmethod
    def row(cls, *entries: int) -> "IntegerMatrix":
        return cls((tuple(entries),))

    @classmethod
    def parse(cls, text: str) -> "IntegerMatrix":
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append(tuple(int(tok) for tok in line.replace(",", " ").split()))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: not a row of integers: {line!r}") from exc
        if not rows:
            raise ValueError("matrix text contains no rows")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("matrix rows have different lengths")
        if len(rows[0]) == 0:
            raise ValueError("matrix has no columns")
        return cls(tuple(rows))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "IntegerMatrix":
        return cls.parse(Path(path).read_text())

    @property
    def ell(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.ell, self.k

    def column(self, j: int) -> Tuple[int, ...]:
        """Column j (1-based)."""
        return tuple(r[j - 1] for r in self.rows)

    def columns(self, cols: Iterable[int]) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in cols]

    def select(self, cols: Iterable[int]) -> List[List[int]]:
        """Row lists restricted to the given columns (possibly none)."""
        cols = sorted(cols)
        return [[r[j - 1] for j in cols] for r in self.rows]

    def complement(self, W: Iterable[int]) -> Tuple[int, ...]:
        W = set(W)
        return tuple(j for j in range(1, self.k + 1) if j not in W)

    def permute_columns(self, perm: Sequence[int]) -> "IntegerMatrix":
        """New matrix whose column i is old column perm[i-1]."""
        return IntegerMatrix(tuple(tuple(r[p - 1] for p in perm) for r in self.rows))

    def to_text(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows) + "\n"

    def __str__(self) -> str:
        return "; ".join(" ".join(str(x) for x in r) for r in self.rows)


def _all_columns(A: IntegerMatrix) -> Tuple[int, ...]:
    return tuple(range(1, A.k + 1))


def rank_rational(A: IntegerMatrix, cols: Optional[Iterable[int]] = None) -> int:
    cols = _all_columns(A) if cols is None else tuple(cols)
    if not cols:
        return 0
    return bareiss_rank(A.select(cols))


def rank_mod_p(A: IntegerMatrix, p: int, cols: Optional[Iterable[int]] = None) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    cols = _all_columns(A) if cols is None else tuple(cols)
    if not cols:
        return 0
    return rank_mod_prime(A.select(cols), p)


def group_image_size(A: IntegerMatrix, G: FiniteAbelianGroup, cols: Optional[Iterable[int]] = None) -> int:
    """|im(f_A)| for f_A: G^k -> G^l, x -> Ax, restricted to the given columns."""
    cols = _all_columns(A) if cols is None else tuple(cols)
    if not cols:
        return 1
    diag = elementary_divisors(A.select(cols))
    per_base = 1
    cache: Dict[int, int] = {}
    for m in G.base_moduli:
        if m not in cache:
            cache[m] = image_size_mod(diag, m)
        per_base *= cache[m]
    return per_base ** G.power


def rank_group(A: IntegerMatrix, G: FiniteAbelianGroup, cols: Optional[Iterable[int]] = None) -> ExactLogValue:
    """rank_G(A) = log_{|G|} |im(f_A)|, computed from the Smith normal form."""
    if G.order == 1:
        return ExactLogValue(1, 1)
    return ExactLogValue(group_image_size(A, G, cols), G.order)


# ---------------------------------------------------------------------------
# Rank providers: a uniform "image size with a common base" view of ranks.

_FORMAL_BASE = 2


@dataclass(frozen=True)
class RankProvider:
    """Encodes rank(A_C) as log_base(image_size(C)).

    Ranks over a field are integers and are encoded with a formal base: base p
    for Z_p (where p^rank is the true image size) and base 2 for Q.
    """

    kind: str  # "Q", "Zp" or "group"
    p: int = 0
    group: Optional[FiniteAbelianGroup] = None

    @property
    def base(self) -> int:
        if self.kind == "Q":
            return _FORMAL_BASE
        if self.kind == "Zp":
            return self.p
        assert self.group is not None
        return self.group.order

    def image_size(self, A: IntegerMatrix, cols: Iterable[int]) -> int:
        cols = tuple(cols)
        if self.kind == "Q":
            return _FORMAL_BASE ** rank_rational(A, cols)
        if self.kind == "Zp":
            return self.p ** rank_mod_p(A, self.p, cols)
        assert self.group is not None
        return group_image_size(A, self.group, cols)

    def rank(self, A: IntegerMatrix, cols: Optional[Iterable[int]] = None) -> ExactLogValue:
        cols = _all_columns(A) if cols is None else tuple(cols)
        if self.base == 1:
            return ExactLogValue(1, 1)
        return ExactLogValue(self.image_size(A, cols), self.base)

    def describe(self) -> str:
        if self.kind == "Q":
            return "Q"
        if self.kind == "Zp":
            return f"Z{self.p}"
        assert self.group is not None
        return self.group.spec()


def resolve_provider(over: object) -> RankProvider:
    """Accepts "Q", a prime p, a FiniteAbelianGroup, or a GroundSet."""
    if isinstance(over, RankProvider):
        return over
    if over is None or (isinstance(over, str) and over.upper() in ("Q", "QQ")):
        return RankProvider("Q")
    if isinstance(over, bool):
        raise TypeError("cannot use a boolean as a rank provider")
    if isinstance(over, int):
        if not is_prime(over):
            raise ValueError(f"{over} is not prime")
        return RankProvider("Zp", p=over)
    if isinstance(over, FiniteAbelianGroup):
        return RankProvider("group", group=over)
    rank_provider = getattr(over, "rank_provider", None)
    if callable(rank_provider):
        return rank_provider()
    raise TypeError(f"cannot derive ranks from {over!r}")


# ---------------------------------------------------------------------------
# Columns condition


@dataclass(frozen=True)
class ColumnsConditionCertificate:
    """Partition C_0..C_m of the 1-based columns and, for i >= 1, coefficients
    expressing s_i over the columns of C_0 u ... u C_{i-1}."""

    ring: Union[str, int]  # "Q" or the modulus s
    parts: Tuple[Tuple[int, ...], ...]
    coefficients: Tuple[Dict[int, Union[Fraction, int]], ...]

    def verify(self, A: IntegerMatrix) -> bool:
        cols = sorted(c for part in self.parts for c in part)
        if cols != list(range(1, A.k + 1)):
            return False
        if any(not part for part in self.parts):
            return False
        reduce = (lambda x: x) if self.ring == "Q" else (lambda x: x % int(self.ring))

        def block_sum(part: Sequence[int]) -> List[Union[int, Fraction]]:
            return [reduce(sum(A.rows[i][j - 1] for j in part)) for i in range(A.ell)]

        if any(v != 0 for v in block_sum(self.parts[0])):
            return False
        if len(self.coefficients) != len(self.parts) - 1:
            return False
        earlier = set(self.parts[0])
        for part, coeffs in zip(self.parts[1:], self.coefficients):
            if not set(coeffs) <= earlier:
                return False
            combo = [
                reduce(sum(Fraction(coeffs[j]) * A.rows[i][j - 1] for j in coeffs) if self.ring == "Q"
                       else sum(int(coeffs[j]) * A.rows[i][j - 1] for j in coeffs))
                for i in range(A.ell)
            ]
            if combo != block_sum(part):
                return False
            earlier |= set(part)
        return True

    def render(self) -> str:
        parts = " | ".join("{" + ",".join(f"c{j}" for j in part) + "}" for part in self.parts)
        lines = [f"ring {self.ring}: C0..C{len(self.parts) - 1} = {parts}"]
        for i, coeffs in enumerate(self.coefficients, start=1):
            combo = " + ".join(f"{format_fraction(Fraction(v))}*c{j}" for j, v in sorted(coeffs.items()) if v != 0)
            lines.append(f"  s{i} = {combo or '0'}")
        return "\n".join(lines)


def _ordered_subsets(items: Sequence[int]) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []
    for size in range(1, len(items) + 1):
        out.extend(itertools.combinations(items, size))
    return out


def columns_condition(A: IntegerMatrix, ring: Union[str, int] = "Q") -> Optional[ColumnsConditionCertificate]:
    """First certificate in a deterministic breadth-first search.

    Partitions are explored by increasing number of parts; inside a level,
    blocks are tried by size and then lexicographically. Exponential in k and
    intended for k <= 10.
    """
    if isinstance(ring, str):
        if ring.upper() not in ("Q", "QQ"):
            raise ValueError(f"unknown ring {ring!r}")
        ring = "Q"
        modulus = 0
    else:
        modulus = int(ring)
        if modulus < 2:
            raise ValueError("Z_s needs s >= 2")
    k = A.k
    full = tuple(range(1, k + 1))

    def block_sum(part: Sequence[int]) -> List[int]:
        vals = [sum(A.rows[i][j - 1] for j in part) for i in range(A.ell)]
        return [v % modulus for v in vals] if modulus else vals

    span_cache: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Optional[Dict[int, Union[Fraction, int]]]] = {}

    def express(target: List[int], earlier: Tuple[int, ...]) -> Optional[Dict[int, Union[Fraction, int]]]:
        key = (earlier, tuple(target))
        if key not in span_cache:
            cols = A.columns(earlier)
            sol = solve_rational(cols, target) if not modulus else solve_mod(cols, target, modulus)
            span_cache[key] = None if sol is None else dict(zip(earlier, sol))
        return span_cache[key]

    frontier: List[Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...], Tuple[Dict, ...]]] = []
    for c0 in _ordered_subsets(full):
        if all(v == 0 for v in block_sum(c0)):
            if len(c0) == k:
                return ColumnsConditionCertificate(ring, (c0,), ())
            frontier.append((c0, (c0,), ()))
    seen = {state[0] for state in frontier}
    while frontier:
        nxt = []
        for used, parts, coeffs in frontier:
            rest = tuple(j for j in full if j not in used)
            for block in _ordered_subsets(rest):
                new_used = tuple(sorted(used + block))
                if new_used in seen and len(new_used) < k:
                    continue
                sol = express(block_sum(block), used)
                if sol is None:
                    continue
                new_parts = parts + (block,)
                new_coeffs = coeffs + (sol,)
                if len(new_used) == k:
                    return ColumnsConditionCertificate(ring, new_parts, new_coeffs)
                seen.add(new_used)
                nxt.append((new_used, new_parts, new_coeffs))
        frontier = nxt
    return None


def is_partition_regular(A: IntegerMatrix) -> bool:
    return columns_condition(A, "Q") is not None


# ---------------------------------------------------------------------------
# m-parameters


@dataclass(frozen=True)
class MCandidate:
    W: ColumnSet
    ratio: Fraction  # image(A_{W-bar}) / image(A)
    key: RationalPower  # ratio^(1/(|W|-1)); smaller key means larger candidate
    value: ExactLogValue


@dataclass(frozen=True)
class MParameter:
    """max over |W| >= 2 of (|W|-1) / (|W|-1 + rank(A_{W-bar}) - rank(A)).

    ``value`` is the exact number log_X(Y) with Y = N^(w-1) and
    X = N^(w-1) * image(A_{W-bar}) / image(A) for a maximizing W.
    """

    value: ExactLogValue
    witnesses: Tuple[ColumnSet, ...]
    strictly_balanced: bool
    provider: str
    candidates: Tuple[MCandidate, ...]

    def as_fraction(self) -> Optional[Fraction]:
        return self.value.as_fraction()

    def __float__(self) -> float:
        return float(self.value)

    def render(self) -> str:
        return self.value.render()


def _candidate_value(w: int, ratio: Fraction, base: int) -> ExactLogValue:
    if ratio == 1:
        return ExactLogValue.from_fraction(Fraction(1))
    top = Fraction(base) ** (w - 1)
    return ExactLogValue(top, top * ratio)


def m_parameter(A: IntegerMatrix, over: object = "Q") -> MParameter:
    """Exact m(A), m_F(A) or m_G(A) depending on ``over``."""
    provider = resolve_provider(over)
    k = A.k
    if k < 2:
        raise ValueError("m-parameter needs at least two columns")
    full = tuple(range(1, k + 1))
    base = provider.base
    total = provider.image_size(A, full)
    candidates: List[MCandidate] = []
    for size in range(2, k + 1):
        for W in itertools.combinations(full, size):
            comp = A.complement(W)
            ratio = Fraction(provider.image_size(A, comp), total)
            w = size - 1
            if ratio != 1:
                # denominator (w) + log_N(ratio) > 0  <=>  N^w * ratio > 1
                if base <= 1 or Fraction(base) ** w * ratio <= 1:
                    raise UndefinedParameterError(
                        frozenset(W),
                        f"m-parameter undefined: denominator <= 0 for W = {set(W)}",
                    )
            key = RationalPower(1, ratio, Fraction(1, w))
            candidates.append(MCandidate(frozenset(W), ratio, key, _candidate_value(size, ratio, base)))
    best_key = min(c.key for c in candidates)
    winners = [c for c in candidates if c.key == best_key]
    witnesses = tuple(c.W for c in winners)
    return MParameter(
        value=winners[0].value,
        witnesses=witnesses,
        strictly_balanced=(witnesses == (frozenset(full),)),
        provider=provider.describe(),
        candidates=tuple(candidates),
    )


# ---------------------------------------------------------------------------
# Matrix predicates


def is_abundant(A: IntegerMatrix, S: object) -> bool:
    """rank_S(A) == rank_S(A_{W-bar}) for every |W| = 2."""
    provider = resolve_provider(S)
    full = tuple(range(1, A.k + 1))
    total = provider.image_size(A, full)
    for W in itertools.combinations(full, 2):
        if provider.image_size(A, A.complement(W)) != total:
            return False
    return True


def is_irredundant(A: IntegerMatrix, S: object) -> bool:
    """True iff some solution in S has pairwise distinct coordinates."""
    from .solutions import has_distinct_solution

    return has_distinct_solution(A, S)


def is_translation_invariant(A: IntegerMatrix, G: object) -> bool:
    """Every row sum annihilates G (row sums must vanish in torsion-free settings)."""
    if isinstance(G, FiniteAbelianGroup):
        s = exponent(G)
    else:
        s = getattr(G, "exponent", None)
        s = s() if callable(s) else s
        if s is None:
            raise TypeError(f"cannot determine the exponent of {G!r}")
    for row in A.rows:
        total = sum(row)
        if s == 0:
            if total != 0:
                return False
        elif total % s:
            return False
    return True


def ap_matrix(k: int) -> IntegerMatrix:
    """(k-2) x k matrix whose k-distinct solutions are the k-term APs."""
    if k < 3:
        raise ValueError("ap_matrix needs k >= 3")
    rows = []
    for i in range(k - 2):
        row = [0] * k
        row[i], row[i + 1], row[i + 2] = 1, -2, 1
        rows.append(tuple(row))
    return IntegerMatrix(tuple(rows))
