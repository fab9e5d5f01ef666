"""Finite abelian groups as explicit products of cyclic groups."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple

DEFAULT_ENUMERATION_LIMIT = 10**7


class EnumerationLimitError(RuntimeError):
    """Raised when an operation would materialize more objects than allowed."""


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_{m1} x ... x Z_{mt}.

    ``base_moduli`` and ``power`` record a power construction G^n; ``moduli``
    always holds the full repeated list.
    """

    moduli: Tuple[int, ...]
    base_moduli: Tuple[int, ...] = field(default=(), compare=False)
    power: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        moduli = tuple(int(m) for m in self.moduli)
        if any(m < 1 for m in moduli):
            raise ValueError(f"moduli must be >= 1, got {moduli}")
        object.__setattr__(self, "moduli", moduli)
        base = tuple(int(m) for m in self.base_moduli) or moduli
        if self.power < 1:
            raise ValueError("power must be >= 1")
        if base * self.power != moduli:
            raise ValueError("moduli must equal base_moduli repeated power times")
        object.__setattr__(self, "base_moduli", base)

    @classmethod
    def cyclic(cls, m: int) -> "FiniteAbelianGroup":
        return cls((m,))

    @classmethod
    def product(cls, *moduli: int) -> "FiniteAbelianGroup":
        return cls(tuple(moduli))

    def __pow__(self, n: int) -> "FiniteAbelianGroup":
        if n < 1:
            raise ValueError("power must be >= 1")
        base = self.base_moduli
        return FiniteAbelianGroup(base * (self.power * n), base, self.power * n)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank_count(self) -> int:
        return len(self.moduli)

    def exponent(self) -> int:
        return exponent(self)

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * len(self.moduli))

    def element(self, residues: Sequence[int]) -> "GroupElement":
        if len(residues) != len(self.moduli):
            raise ValueError("residue count does not match the group")
        return GroupElement(self, tuple(int(r) % m for r, m in zip(residues, self.moduli)))

    def elements(self, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Iterator["GroupElement"]:
        return enumerate_elements(self, limit)

    def spec(self) -> str:
        if self.power > 1:
            base = "x".join(f"Z{m}" for m in self.base_moduli)
            if len(self.base_moduli) > 1:
                base = f"({base})"
            return f"{base}^{self.power}"
        return "x".join(f"Z{m}" for m in self.moduli) or "Z1"

    def __str__(self) -> str:
        return self.spec()


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    residues: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.residues) != len(self.group.moduli):
            raise ValueError("residue count does not match the group")
        for r, m in zip(self.residues, self.group.moduli):
            if not 0 <= r < m:
                raise ValueError(f"residue {r} not reduced modulo {m}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self, other)

    def __neg__(self) -> "GroupElement":
        return scalar_action(-1, self)

    def __rmul__(self, n: int) -> "GroupElement":
        return scalar_action(n, self)

    def is_zero(self) -> bool:
        return not any(self.residues)


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.group.moduli != h.group.moduli:
        raise ValueError("elements belong to groups of different shape")
    return GroupElement(
        g.group, tuple((a + b) % m for a, b, m in zip(g.residues, h.residues, g.group.moduli))
    )


def scalar_action(n: int, g: GroupElement) -> GroupElement:
    return GroupElement(g.group, tuple((n * a) % m for a, m in zip(g.residues, g.group.moduli)))


def exponent(G: FiniteAbelianGroup) -> int:
    return math.lcm(*G.moduli) if G.moduli else 1


def enumerate_elements(
    G: FiniteAbelianGroup, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> Iterator[GroupElement]:
    """All elements of G in lexicographic residue order."""
    if G.order > limit:
        raise EnumerationLimitError(f"|G| = {G.order} exceeds the enumeration limit {limit}")
    for residues in itertools.product(*(range(m) for m in G.moduli)):
        yield GroupElement(G, residues)


_FACTOR = re.compile(r"^Z(\d+)$")


def parse_group(spec: str) -> FiniteAbelianGroup:
    """Parse "Z6", "Z2xZ3", "Z4^3" or "(Z2xZ3)^2"."""
    text = spec.strip().replace(" ", "")
    power: Optional[int] = None
    if "^" in text:
        text, _, exp_text = text.rpartition("^")
        if not exp_text.isdigit() or int(exp_text) < 1:
            raise ValueError(f"bad power in group spec {spec!r}")
        power = int(exp_text)
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
    moduli = []
    for part in text.split("x"):
        match = _FACTOR.match(part)
        if not match:
            raise ValueError(f"bad cyclic factor {part!r} in group spec {spec!r}")
        m = int(match.group(1))
        if m < 1:
            raise ValueError(f"modulus must be >= 1 in group spec {spec!r}")
        moduli.append(m)
    group = FiniteAbelianGroup(tuple(moduli))
    return group ** power if power else group
