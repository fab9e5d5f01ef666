"""Brute-force reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np


def all_solutions(A, elements: Sequence[Tuple[int, ...]], moduli: Sequence[int]) -> List[Tuple[int, ...]]:
    """Index tuples x in S^k with A x = 0, by plain enumeration."""
    out = []
    k = A.k
    for idx in itertools.product(range(len(elements)), repeat=k):
        ok = True
        for row in A.rows:
            for c, m in enumerate(moduli):
                s = sum(a * elements[i][c] for a, i in zip(row, idx))
                if (s % m if m else s) != 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(idx)
    return out


def image_size(A, moduli: Sequence[int], cols: Sequence[int]) -> int:
    """|{sum_j x_j a_j : x in G^cols}| for G = prod Z_m, by enumeration."""
    if not cols:
        return 1
    G = list(itertools.product(*(range(m) for m in moduli)))
    seen = set()
    for xs in itertools.product(G, repeat=len(cols)):
        vec = []
        for row in A.rows:
            for c, m in enumerate(moduli):
                vec.append(sum(row[j - 1] * x[c] for j, x in zip(cols, xs)) % m)
        seen.add(tuple(vec))
    return len(seen)


def rank_Q(rows: Sequence[Sequence[int]]) -> int:
    M = [[Fraction(v) for v in r] for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def is_ramsey(edges: Sequence[Sequence[int]], n: int, r: int = 2) -> bool:
    for colors in itertools.product(range(r), repeat=n):
        if not any(len({colors[v] for v in e}) == 1 for e in edges):
            return False
    return True


def schur_good_colorings(n: int) -> int:
    """Number of 2-colorings of [n] with no monochromatic x + y = z, x, y, z distinct."""
    triples = [(x, y, x + y) for x in range(1, n + 1) for y in range(x + 1, n + 1) if x + y <= n]
    if not triples:
        return 2**n
    bits = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
    t = np.array(triples) - 1
    c = bits[:, t]
    mono = (c.min(axis=2) == c.max(axis=2)).any(axis=1)
    return int((~mono).sum())


def primes_naive(n: int) -> List[int]:
    return [q for q in range(2, n + 1) if all(q % d for d in range(2, int(q**0.5) + 1))]


def k_aps_naive(values: Sequence[int], k: int) -> List[Tuple[int, ...]]:
    s = set(values)
    out = []
    for a in values:
        for b in values:
            if b <= a:
                continue
            d = b - a
            ap = tuple(a + i * d for i in range(k))
            if all(x in s for x in ap):
                out.append(ap)
    return out


def subsets_with(edges, size: int, pred) -> List[Tuple]:
    return [c for c in itertools.combinations(edges, size) if pred(c)]


def image_counts(A, S_elements, moduli, W) -> Dict[Tuple, int]:
    sols = all_solutions(A, S_elements, moduli)
    proj: Dict[Tuple, int] = {}
    for s in sols:
        key = tuple(s[j - 1] for j in W)
        proj[key] = proj.get(key, 0) + 1
    return proj
