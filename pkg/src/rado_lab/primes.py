"""Prime sieve and arithmetic progressions in the primes."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Union

import numpy as np

DEFAULT_SIEVE_LIMIT = 10**8


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primality flags for 0..limit and the sorted prime list."""

    limit: int
    is_prime: np.ndarray  # bool, length limit + 1
    primes: np.ndarray  # int64

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def __contains__(self, q: int) -> bool:
        return 0 <= q <= self.limit and bool(self.is_prime[q])

    def save(self, path: Union[str, Path]) -> None:
        """Little-endian packed bits behind a 64-bit little-endian bit-length header."""
        bits = np.packbits(self.is_prime.astype(np.uint8), bitorder="little")
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", self.is_prime.size))
            fh.write(bits.tobytes())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PrimeTable":
        data = Path(path).read_bytes()
        if len(data) < 8:
            raise ValueError("sieve cache is truncated")
        (length,) = struct.unpack("<Q", data[:8])
        packed = np.frombuffer(data[8:], dtype=np.uint8)
        if packed.size * 8 < length:
            raise ValueError("sieve cache is truncated")
        flags = np.unpackbits(packed, bitorder="little")[:length].astype(bool)
        return cls(length - 1, flags, np.flatnonzero(flags).astype(np.int64))


def sieve_primes(
    n: int, limit: int = DEFAULT_SIEVE_LIMIT, cache: Optional[Union[str, Path]] = None
) -> PrimeTable:
    """Sieve of Eratosthenes on 0..n. With ``cache``, reuse or write a bitset file."""
    if n < 2:
        raise ValueError("sieve needs n >= 2")
    if n > limit:
        raise ValueError(f"n = {n} exceeds the sieve limit {limit}")
    if cache is not None and Path(cache).exists():
        table = PrimeTable.load(cache)
        if table.limit >= n:
            flags = table.is_prime[: n + 1].copy()
            return PrimeTable(n, flags, np.flatnonzero(flags).astype(np.int64))
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    table = PrimeTable(n, flags, np.flatnonzero(flags).astype(np.int64))
    if cache is not None:
        table.save(cache)
    return table


def _aps_from(P: PrimeTable, i: int, k: int) -> np.ndarray:
    """Common differences d of the increasing k-APs in P with first term primes[i]."""
    a = int(P.primes[i])
    d = P.primes[i + 1 :] - a
    if k > 2:
        d = d[a + (k - 1) * d <= P.limit]
        for j in range(2, k):
            if d.size == 0:
                break
            d = d[P.is_prime[a + j * d]]
    return d


def iter_k_aps(P: PrimeTable, k: int) -> Iterator[np.ndarray]:
    """Blocks of increasing k-APs as (count, k) arrays, grouped by first term."""
    if k < 3:
        raise ValueError("k must be >= 3")
    steps = np.arange(k, dtype=np.int64)
    for i in range(P.count):
        d = _aps_from(P, i, k)
        if d.size:
            yield int(P.primes[i]) + d[:, None] * steps[None, :]


def list_k_aps(P: PrimeTable, k: int) -> np.ndarray:
    blocks = list(iter_k_aps(P, k))
    if not blocks:
        return np.zeros((0, k), dtype=np.int64)
    return np.concatenate(blocks)


def count_k_aps(P: PrimeTable, k: int) -> int:
    """Number of increasing k-term APs (difference >= 1) inside P."""
    if k < 3:
        raise ValueError("k must be >= 3")
    return sum(int(_aps_from(P, i, k).size) for i in range(P.count))


def count_k_aps_through(P: PrimeTable, q: int, ell: int, k: int) -> int:
    """Number of increasing k-APs in P whose ell-th term (1-based) is q."""
    if k < 3:
        raise ValueError("k must be >= 3")
    if not 1 <= ell <= k:
        raise ValueError("position ell must lie in [1, k]")
    if q not in P:
        raise ValueError(f"{q} is not a prime <= {P.limit}")
    d_max = P.limit
    if ell > 1:
        d_max = min(d_max, (q - 2) // (ell - 1))
    if ell < k:
        d_max = min(d_max, (P.limit - q) // (k - ell))
    if d_max < 1:
        return 0
    d = np.arange(1, d_max + 1, dtype=np.int64)
    for j in range(1, k + 1):
        if j == ell:
            continue
        d = d[P.is_prime[q + (j - ell) * d]]
        if d.size == 0:
            return 0
    return int(d.size)


def through_counts(P: PrimeTable, k: int) -> np.ndarray:
    """counts[ell - 1, q] = number of increasing k-APs in P with ell-th term q."""
    counts = np.zeros((k, P.limit + 1), dtype=np.int64)
    for block in iter_k_aps(P, k):
        for pos in range(k):
            np.add.at(counts[pos], block[:, pos], 1)
    return counts


@dataclass(frozen=True)
class APDensityRow:
    n: int
    count: int
    count_ratio: float  # count * log^k n / n^2
    max_through: int
    through_ratio: float  # max_through * log^(k-1) n / n


def ap_density_report(k: int, n_values: Sequence[int]) -> List[APDensityRow]:
    rows = []
    for n in n_values:
        P = sieve_primes(int(n))
        total = count_k_aps(P, k)
        through = through_counts(P, k)
        max_through = int(through.max()) if through.size else 0
        log_n = math.log(n)
        rows.append(
            APDensityRow(
                n=int(n),
                count=total,
                count_ratio=total * log_n**k / n**2,
                max_through=max_through,
                through_ratio=max_through * log_n ** (k - 1) / n,
            )
        )
    return rows
