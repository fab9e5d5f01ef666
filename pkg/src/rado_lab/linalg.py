"""Exact integer linear algebra: Bareiss elimination, Smith normal form,
rank modulo a prime, and linear systems over Q and over Z_s."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[int]]


def _copy(rows: Sequence[Sequence[int]]) -> Matrix:
    return [list(map(int, r)) for r in rows]


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    m = _copy(rows)
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, n_rows):
            f = m[r][col]
            row_r, row_p = m[r], m[rank]
            for c in range(col, n_cols):
                # Exact division is the Bareiss invariant.
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
        prev = p
        rank += 1
    return rank


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24; strong probable prime beyond."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def rank_mod_prime(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(n_rows):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(
    rows: Sequence[Sequence[int]], with_transforms: bool = False
) -> Tuple[List[int], Optional[Matrix], Optional[Matrix]]:
    """Smith normal form over Z.

    Returns the diagonal (length min(l, k), zeros included, each entry
    dividing the next) and, when requested, unimodular U (l x l) and V (k x k)
    with U * A * V = diag.
    """
    a = _copy(rows)
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    U = _identity(n_rows) if with_transforms else None
    V = _identity(n_cols) if with_transforms else None

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for r in a:
            r[i], r[j] = r[j], r[i]
        if V is not None:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(src: int, dst: int, f: int) -> None:
        # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        if U is not None:
            U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(src: int, dst: int, f: int) -> None:
        for r in a:
            r[dst] += f * r[src]
        if V is not None:
            for r in V:
                r[dst] += f * r[src]

    def negate_row(i: int) -> None:
        a[i] = [-x for x in a[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]

    t = 0
    size = min(n_rows, n_cols)
    while t < size:
        # Pivot: smallest nonzero absolute value in the trailing block.
        best = None
        for i in range(t, n_rows):
            for j in range(t, n_cols):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, n_rows):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(t, i, -q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n_cols):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(t, j, -q)
                    if a[t][j]:
                        done = False
            if not done:
                # Move the smallest remaining entry of row/column t to the pivot.
                cand = [(abs(a[i][t]), i, t) for i in range(t, n_rows) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t, n_cols) if a[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # Divisibility: the pivot must divide the trailing block.
            bad = None
            for i in range(t + 1, n_rows):
                for j in range(t + 1, n_cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    diag = [a[i][i] if i < n_rows and i < n_cols else 0 for i in range(size)]
    return diag, U, V


def elementary_divisors(rows: Sequence[Sequence[int]]) -> List[int]:
    return smith_normal_form(rows)[0]


def image_size_mod(diag: Sequence[int], m: int) -> int:
    """|im(Z_m^k -> Z_m^l)| for a matrix with Smith diagonal ``diag``."""
    size = 1
    for d in diag:
        size *= m // math.gcd(d, m)
    return size


def solve_rational(columns: Sequence[Sequence[int]], target: Sequence[int]) -> Optional[List[Fraction]]:
    """Coefficients x with sum_j x_j * columns[j] = target over Q, free variables 0."""
    n = len(target)
    k = len(columns)
    if k == 0:
        return [] if all(t == 0 for t in target) else None
    aug = [[Fraction(columns[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    pivots: List[int] = []
    row = 0
    for col in range(k):
        piv = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    for r in range(row, n):
        if aug[r][k] != 0:
            return None
    x = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        x[col] = aug[r][k]
    return x


def solve_mod(columns: Sequence[Sequence[int]], target: Sequence[int], s: int) -> Optional[List[int]]:
    """Coefficients x in Z_s with sum_j x_j * columns[j] = target (mod s), or None."""
    n = len(target)
    k = len(columns)
    if k == 0:
        return [] if all(t % s == 0 for t in target) else None
    rows = [[columns[j][i] for j in range(k)] for i in range(n)]
    diag, U, V = smith_normal_form(rows, with_transforms=True)
    assert U is not None and V is not None
    c = [sum(U[i][r] * target[r] for r in range(n)) for i in range(n)]
    y = [0] * k
    for i in range(n):
        d = diag[i] if i < len(diag) else 0
        if i < k:
            g = math.gcd(d, s)
            if c[i] % g:
                return None
            if d % s == 0:
                if c[i] % s:
                    return None
                continue
            # d * y = c (mod s): divide through by g, invert the unit part.
            mod = s // g
            y[i] = (c[i] // g) * pow((d // g) % mod, -1, mod) % mod if mod > 1 else 0
        elif c[i] % s:
            return None
    x = [sum(V[j][i] * y[i] for i in range(k)) % s for j in range(k)]
    return x


def in_image_mod(columns: Sequence[Sequence[int]], target: Sequence[int], s: int) -> bool:
    return solve_mod(columns, target, s) is not None
