"""Ground sets: finite subsets of Z^d or of a finite abelian group."""

from __future__ import annotations

import itertools
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .groups import DEFAULT_ENUMERATION_LIMIT, EnumerationLimitError, FiniteAbelianGroup, parse_group
from .matrices import RankProvider

Element = Tuple[int, ...]

KINDS = ("interval", "lattice", "cyclic", "power", "primes", "explicit")

_INT64_SAFE = 1 << 62


class GroundSet:
    """A finite subset S of an ambient abelian group.

    Elements are tuples of integers, one entry per coordinate. ``moduli[i]`` is
    the modulus of coordinate i, with 0 meaning the coordinate lives in Z.
    Treat instances as immutable.
    """

    def __init__(
        self,
        kind: str,
        moduli: Tuple[int, ...],
        *,
        group: Optional[FiniteAbelianGroup] = None,
        exclude_identity: bool = False,
        elements: Optional[Sequence[Element]] = None,
        params: Optional[Dict[str, object]] = None,
        size: Optional[int] = None,
        spec: str = "",
    ):
        if kind not in KINDS:
            raise ValueError(f"unknown ground-set kind {kind!r}")
        self.kind = kind
        self.moduli = tuple(int(m) for m in moduli)
        self.group = group
        self.exclude_identity = exclude_identity
        self.params = dict(params or {})
        self._elements: Optional[List[Element]] = None
        self._array: Optional[np.ndarray] = None
        self._index: Optional[Dict[Element, int]] = None
        if elements is not None:
            elems = [self._reduce(tuple(int(v) for v in e)) for e in elements]
            if len(set(elems)) != len(elems):
                raise ValueError("explicit ground sets may not contain duplicates")
            if exclude_identity:
                elems = [e for e in elems if any(e)]
            self._elements = elems
            size = len(elems)
        if size is None:
            raise ValueError("size or elements required")
        self.size = int(size)
        self.spec = spec or self._default_spec()

    # -- construction ------------------------------------------------------

    @classmethod
    def interval(cls, n: int, exclude_identity: bool = False) -> "GroundSet":
        if n < 1:
            raise ValueError("interval needs n >= 1")
        return cls("interval", (0,), params={"n": n}, size=n, exclude_identity=exclude_identity)

    @classmethod
    def lattice(cls, n: int, d: int, exclude_identity: bool = False) -> "GroundSet":
        if n < 1 or d < 1:
            raise ValueError("lattice needs n >= 1 and d >= 1")
        return cls("lattice", (0,) * d, params={"n": n, "d": d}, size=n**d, exclude_identity=exclude_identity)

    @classmethod
    def cyclic(cls, n: int, exclude_identity: bool = False) -> "GroundSet":
        if n < 1:
            raise ValueError("cyclic group needs n >= 1")
        G = FiniteAbelianGroup.cyclic(n)
        return cls("cyclic", G.moduli, group=G, params={"n": n},
                   size=n - (1 if exclude_identity else 0), exclude_identity=exclude_identity)

    @classmethod
    def group_power(cls, base: FiniteAbelianGroup, n: int, exclude_identity: bool = False) -> "GroundSet":
        G = base ** n
        return cls("power", G.moduli, group=G, params={"base": base, "n": n},
                   size=G.order - (1 if exclude_identity else 0), exclude_identity=exclude_identity)

    @classmethod
    def of_group(cls, G: FiniteAbelianGroup, exclude_identity: bool = False) -> "GroundSet":
        base = FiniteAbelianGroup(G.base_moduli)
        return cls.group_power(base, G.power, exclude_identity)

    @classmethod
    def primes(cls, n: int) -> "GroundSet":
        from .primes import sieve_primes

        table = sieve_primes(n)
        gs = cls("primes", (0,), params={"n": n}, size=table.count)
        gs._elements = [(int(p),) for p in table.primes]
        return gs

    @classmethod
    def explicit(
        cls,
        elements: Sequence,
        moduli: Optional[Sequence[int]] = None,
        group: Optional[FiniteAbelianGroup] = None,
        exclude_identity: bool = False,
    ) -> "GroundSet":
        elems = [tuple(e) if isinstance(e, (tuple, list)) else (int(e),) for e in elements]
        if group is not None:
            moduli = group.moduli
        if moduli is None:
            dims = {len(e) for e in elems}
            if len(dims) > 1:
                raise ValueError("explicit elements have different dimensions")
            moduli = (0,) * (dims.pop() if dims else 1)
        if any(len(e) != len(moduli) for e in elems):
            raise ValueError("explicit element dimension does not match the ambient group")
        if group is None and any(m for m in moduli):
            group = FiniteAbelianGroup(tuple(m for m in moduli)) if all(moduli) else None
        return cls("explicit", tuple(moduli), group=group, elements=elems, exclude_identity=exclude_identity)

    # -- basic data ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.moduli)

    @property
    def is_group_kind(self) -> bool:
        return self.group is not None

    @property
    def is_full_group(self) -> bool:
        """S is an entire finite abelian group (closed forms apply)."""
        return self.group is not None and self.size == self.group.order

    @property
    def is_field_power(self) -> bool:
        """S = F'^d for a finite subset F' of Q."""
        if self.group is not None:
            return False
        if self.kind in ("interval", "primes", "lattice"):
            return True
        return self.dim == 1

    def exponent(self) -> int:
        """Exponent of the ambient group (0 for torsion-free ambients)."""
        if self.group is None:
            return 0
        return self.group.exponent()

    def rank_provider(self) -> RankProvider:
        if self.group is not None:
            return RankProvider("group", group=self.group)
        return RankProvider("Q")

    def _reduce(self, e: Element) -> Element:
        if len(e) != len(self.moduli):
            raise ValueError(f"element {e} does not match dimension {len(self.moduli)}")
        return tuple(v % m if m else v for v, m in zip(e, self.moduli))

    def _default_spec(self) -> str:
        suffix = "-0" if self.exclude_identity else ""
        p = self.params
        if self.kind == "interval":
            return f"interval:{p['n']}{suffix}"
        if self.kind == "lattice":
            return f"lattice:{p['n']}:{p['d']}{suffix}"
        if self.kind == "cyclic":
            return f"cyclic:{p['n']}{suffix}"
        if self.kind == "power":
            return f"power:{p['base'].spec()}:{p['n']}{suffix}"
        if self.kind == "primes":
            return f"primes:{p['n']}"
        return f"explicit[{self.size}]{suffix}"

    def __repr__(self) -> str:
        return f"GroundSet({self.spec}, size={self.size})"

    # -- enumeration ---------------------------------------------------------

    def elements(self, limit: int = DEFAULT_ENUMERATION_LIMIT) -> List[Element]:
        if self._elements is None:
            if self.size > limit:
                raise EnumerationLimitError(f"|S| = {self.size} exceeds the enumeration limit {limit}")
            if self.kind == "interval":
                elems = [(i,) for i in range(1, self.params["n"] + 1)]
            elif self.kind == "lattice":
                n, d = self.params["n"], self.params["d"]
                elems = list(itertools.product(range(1, n + 1), repeat=d))
            else:
                assert self.group is not None
                elems = list(itertools.product(*(range(m) for m in self.group.moduli)))
                if self.exclude_identity:
                    elems = elems[1:]
            self._elements = elems
        return self._elements

    def array(self) -> np.ndarray:
        """Elements as an (N, dim) array; int64 when safe, object otherwise."""
        if self._array is None:
            elems = self.elements()
            big = any(abs(v) >= _INT64_SAFE for e in elems for v in e)
            dtype = object if big else np.int64
            arr = np.array(elems, dtype=dtype).reshape(len(elems), self.dim)
            self._array = arr
        return self._array

    def index(self) -> Dict[Element, int]:
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.elements())}
        return self._index

    def index_of(self, e: Element) -> int:
        return self.index()[self._reduce(tuple(e))]

    def __contains__(self, e: object) -> bool:
        if isinstance(e, int):
            e = (e,)
        return self._reduce(tuple(e)) in self.index()  # type: ignore[arg-type]

    def __len__(self) -> int:
        return self.size

    def label(self, i: int) -> str:
        e = self.elements()[i]
        return str(e[0]) if len(e) == 1 else "(" + ",".join(map(str, e)) + ")"

    def subset(self, indices: Sequence[int]) -> "GroundSet":
        elems = self.elements()
        sub = GroundSet(
            "explicit",
            self.moduli,
            group=self.group,
            exclude_identity=self.exclude_identity,
            elements=[elems[i] for i in indices],
        )
        return sub


def _parse_int(text: str, what: str, minimum: int = 1) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise ValueError(f"{what} must be an integer, got {text!r}") from exc
    if value < minimum:
        raise ValueError(f"{what} must be >= {minimum}, got {value}")
    return value


def read_elements(path: str) -> List[Tuple[int, ...]]:
    elems = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            elems.append(tuple(int(t) for t in line.replace(",", " ").split()))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad element {line!r}") from exc
    return elems


def parse_ground(spec: str) -> GroundSet:
    """Parse ground-set spec strings such as "interval:100", "lattice:10:2",
    "cyclic:36", "power:Z4:3", "primes:100000", "explicit:@file" or
    "explicit:1,2,3"; a trailing "-0" excludes the identity."""
    text = spec.strip()
    exclude = False
    if text.endswith("-0"):
        exclude = True
        text = text[:-2]
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    parts = rest.split(":") if rest else []
    if kind == "interval":
        if len(parts) != 1:
            raise ValueError(f"interval spec needs one size: {spec!r}")
        return GroundSet.interval(_parse_int(parts[0], "interval size"), exclude)
    if kind == "lattice":
        if len(parts) != 2:
            raise ValueError(f"lattice spec needs size and dimension: {spec!r}")
        return GroundSet.lattice(_parse_int(parts[0], "lattice size"), _parse_int(parts[1], "lattice dimension"), exclude)
    if kind == "cyclic":
        if len(parts) != 1:
            raise ValueError(f"cyclic spec needs one modulus: {spec!r}")
        return GroundSet.cyclic(_parse_int(parts[0], "cyclic modulus"), exclude)
    if kind == "power":
        if len(parts) != 2:
            raise ValueError(f"power spec needs a group and an exponent: {spec!r}")
        return GroundSet.group_power(parse_group(parts[0]), _parse_int(parts[1], "power exponent"), exclude)
    if kind == "primes":
        if len(parts) != 1:
            raise ValueError(f"primes spec needs one bound: {spec!r}")
        if exclude:
            raise ValueError("the primes ground set has no identity to exclude")
        return GroundSet.primes(_parse_int(parts[0], "prime bound", 2))
    if kind == "explicit":
        if not parts:
            raise ValueError(f"explicit spec needs elements or @file: {spec!r}")
        source = parts[0]
        group = parse_group(parts[1]) if len(parts) > 1 else None
        if source.startswith("@"):
            path = source[1:]
            if not Path(path).exists():
                raise FileNotFoundError(f"element file not found: {path}")
            elems = read_elements(path)
        else:
            elems = [(int(t),) for t in source.split(",") if t.strip()]
        return GroundSet.explicit(elems, group=group, exclude_identity=exclude)
    raise ValueError(f"unknown ground-set kind in {spec!r}")
