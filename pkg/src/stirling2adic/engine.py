"""Exact and truncated 2-adic computation of Stirling numbers of the second kind.

Two independent evaluation routes are kept deliberately separate so that one
can verify the other: the triangular recurrence

    S(n, k) = S(n-1, k-1) + k * S(n-1, k),    S(0, 0) = 1, S(n, 0) = 0 (n > 0)

iterated row by row, and the explicit alternating binomial sum

    S(n, k) = (1/k!) * sum_{i=0..k} (-1)**i * C(k, i) * (k - i)**n.

Modular rows are reduced mod 2**bits throughout; for bits <= 64 the rows run
on numpy uint64 (wraparound mod 2**64 is exact for any smaller power of two),
above that on Python integers with a mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .base2 import Valuation, nu2_int, s2
from .errors import DomainError, ResourceCapError

__all__ = [
    "Residue",
    "PrecisionPolicy",
    "DEFAULT_EXACT_CAP",
    "DEFAULT_ROW_CAP",
    "stirling_exact",
    "stirling_row_mod2",
    "stirling_rows_mod2",
    "stirling_mod2",
    "stirling_explicit_mod2",
    "val_stirling",
    "val_stirling_difference",
    "check_convolution",
    "check_symmetric_identity",
]

DEFAULT_EXACT_CAP = 2000
DEFAULT_ROW_CAP = 1 << 22  # row entries; memory is O(k * bits)

_U64 = np.uint64


@dataclass(frozen=True)
class Residue:
    """An integer residue mod 2**bits together with its precision."""

    value: int
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise DomainError(f"precision must be >= 1 bit, got {self.bits}")
        if not 0 <= self.value < (1 << self.bits):
            raise DomainError(f"residue {self.value} out of range for {self.bits} bits")

    def val(self) -> Valuation:
        """Valuation certified by this residue: exact if nonzero, else a bound."""
        if self.value:
            return Valuation.finite(nu2_int(self.value))
        return Valuation.at_least(self.bits)


@dataclass(frozen=True)
class PrecisionPolicy:
    """Adaptive precision: start at initial_bits, double up to max_bits."""

    initial_bits: int = 48
    max_bits: int = 4096

    def __post_init__(self) -> None:
        if not 1 <= self.initial_bits <= self.max_bits:
            raise DomainError(
                f"need 1 <= initial_bits <= max_bits, got {self.initial_bits}, {self.max_bits}"
            )

    def ladder(self) -> Iterator[int]:
        bits = self.initial_bits
        yield bits
        while bits < self.max_bits:
            bits = min(2 * bits, self.max_bits)
            yield bits

    @classmethod
    def for_predicted(
        cls, predicted: int | None = None, guard: int = 32, max_bits: int = 4096
    ) -> "PrecisionPolicy":
        """Policy sized from a predicted valuation plus guard bits."""
        base = predicted if predicted is not None else 16
        return cls(initial_bits=min(max(base, 0) + guard, max_bits), max_bits=max_bits)


# ---------------------------------------------------------------------------
# row engine (recurrence route)


def _rows_numpy(n_targets: list[int], k_max: int, bits: int) -> dict[int, list[int]]:
    # bits <= 64: uint64 wraparound is the working modulus, masked on capture
    mask = (1 << bits) - 1
    row = np.zeros(k_max + 1, dtype=_U64)
    row[0] = 1
    idx = np.arange(k_max + 1, dtype=_U64)
    buf = np.empty(k_max, dtype=_U64) if k_max else None
    want = set(n_targets)
    out: dict[int, list[int]] = {}
    if 0 in want:
        out[0] = [int(v) & mask for v in row]
    for step in range(1, max(want) + 1):
        if k_max:
            np.multiply(row[1:], idx[1:], out=buf)
            buf += row[:-1]
            row[1:] = buf
        row[0] = 0
        if step in want:
            out[step] = [int(v) & mask for v in row]
    return out


def _rows_python(n_targets: list[int], k_max: int, bits: int) -> dict[int, list[int]]:
    mask = (1 << bits) - 1
    row = [0] * (k_max + 1)
    row[0] = 1
    want = set(n_targets)
    out: dict[int, list[int]] = {}
    if 0 in want:
        out[0] = row.copy()
    for step in range(1, max(want) + 1):
        for j in range(k_max, 0, -1):
            row[j] = (row[j - 1] + j * row[j]) & mask
        row[0] = 0
        if step in want:
            out[step] = row.copy()
    return out


def stirling_rows_mod2(
    ns: Iterable[int], k_max: int, bits: int, row_cap: int = DEFAULT_ROW_CAP
) -> dict[int, list[int]]:
    """Rows S(n, 0..k_max) mod 2**bits for several n in one recurrence pass.

    Sharing the pass is exact because every requested row is an intermediate
    state of the longest one.
    """
    targets = sorted(set(ns))
    if not targets:
        return {}
    if targets[0] < 0:
        raise DomainError(f"need n >= 0, got {targets[0]}")
    if k_max < 0:
        raise DomainError(f"need k_max >= 0, got {k_max}")
    if bits < 1:
        raise DomainError(f"need bits >= 1, got {bits}")
    if k_max + 1 > row_cap:
        raise ResourceCapError(f"row of {k_max + 1} entries exceeds cap {row_cap}")
    if bits <= 64:
        return _rows_numpy(targets, k_max, bits)
    return _rows_python(targets, k_max, bits)


def stirling_row_mod2(n: int, k_max: int, bits: int, row_cap: int = DEFAULT_ROW_CAP) -> list[int]:
    """Row S(n, 0..k_max) mod 2**bits."""
    return stirling_rows_mod2((n,), k_max, bits, row_cap=row_cap)[n]


def stirling_mod2(n: int, k: int, bits: int) -> Residue:
    """S(n, k) mod 2**bits via the row recurrence; k > n yields 0."""
    if n < 0 or k < 0:
        raise DomainError(f"need n, k >= 0, got n={n}, k={k}")
    if k > n:
        return Residue(0, bits)
    return Residue(stirling_row_mod2(n, k, bits)[k], bits)


# ---------------------------------------------------------------------------
# exact engine

class _ExactTable:
    """Cached triangle of exact rows, grown on demand.

    Rows are stored at a shared width; widening rebuilds the triangle (the
    truncated entries cannot be recovered incrementally), extending in n
    appends rows.
    """

    def __init__(self) -> None:
        self._rows: list[list[int]] = [[1]]
        self._width = 0

    def _next_row(self, prev: list[int]) -> list[int]:
        w = self._width
        row = [0] * (w + 1)
        for j in range(1, w + 1):
            row[j] = prev[j - 1] + j * prev[j]
        return row

    def ensure(self, n: int, k: int) -> None:
        if k > self._width:
            self._width = max(k, 2 * self._width)
            height = len(self._rows)
            rows = [[1] + [0] * self._width]
            self._rows = rows
            for _ in range(1, height):
                rows.append(self._next_row(rows[-1]))
        while len(self._rows) <= n:
            self._rows.append(self._next_row(self._rows[-1]))

    def value(self, n: int, k: int) -> int:
        self.ensure(n, k)
        return self._rows[n][k]


_EXACT = _ExactTable()


def stirling_exact(n: int, k: int, cap: int = DEFAULT_EXACT_CAP) -> int:
    """Exact S(n, k) as a Python integer; 0 for k > n.

    Capped at n <= cap (entries grow like n*log2(k) bits).
    """
    if n < 0 or k < 0:
        raise DomainError(f"need n, k >= 0, got n={n}, k={k}")
    if n > cap:
        raise ResourceCapError(f"exact engine capped at n <= {cap}, got {n}")
    if k > n:
        return 0
    return _EXACT.value(n, k)


# ---------------------------------------------------------------------------
# explicit-formula engine (independent route)


def stirling_explicit_mod2(n: int, k: int, bits: int) -> Residue:
    """S(n, k) mod 2**bits via the explicit alternating binomial sum.

    The sum T = sum (-1)**i C(k,i) (k-i)**n is accumulated mod
    2**(bits + nu2(k!)) so that the exact division by k! survives: T is
    divided by 2**nu2(k!) and multiplied by the inverse of the odd part of
    k! mod 2**bits.  Binomials are carried as (odd part, power of two) to
    avoid dividing by even numbers in modular arithmetic.
    """
    if n < 0 or k < 0:
        raise DomainError(f"need n, k >= 0, got n={n}, k={k}")
    if bits < 1:
        raise DomainError(f"need bits >= 1, got {bits}")
    v2_fact = k - s2(k)
    work_bits = bits + v2_fact
    mod = 1 << work_bits
    total = 0
    c_odd = 1  # odd part of C(k, i) mod 2**work_bits
    c_exp = 0  # nu2(C(k, i))
    for i in range(k + 1):
        term = (c_odd << c_exp) * pow(k - i, n, mod)
        total = (total - term if i & 1 else total + term) % mod
        if i < k:
            up = k - i
            dn = i + 1
            c_exp += nu2_int(up) - nu2_int(dn)
            c_odd = c_odd * (up >> nu2_int(up)) % mod
            c_odd = c_odd * pow(dn >> nu2_int(dn), -1, mod) % mod
    if total & ((1 << v2_fact) - 1):
        raise RuntimeError(
            f"internal error: explicit sum for S({n},{k}) not divisible by 2**{v2_fact}"
        )
    fact_odd = 1
    out_mod = 1 << bits
    for i in range(2, k + 1):
        fact_odd = fact_odd * (i >> nu2_int(i)) % out_mod
    value = (total >> v2_fact) % out_mod * pow(fact_odd, -1, out_mod) % out_mod
    return Residue(value, bits)


# ---------------------------------------------------------------------------
# adaptive valuations


def val_stirling(n: int, k: int, policy: PrecisionPolicy | None = None) -> Valuation:
    """nu2(S(n, k)) with adaptive precision.

    Returns a finite valuation as soon as some residue is nonzero; S(n, k)
    is never 0 for 1 <= k <= n, so an at-least result only means the
    precision ladder was exhausted.
    """
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        return Valuation.finite(0) if n == 0 else Valuation.infinite()
    policy = policy or PrecisionPolicy()
    for bits in policy.ladder():
        r = stirling_mod2(n, k, bits)
        if r.value:
            return r.val()
    return Valuation.at_least(policy.max_bits)


def val_stirling_difference(
    n1: int, n2: int, k: int, policy: PrecisionPolicy | None = None
) -> Valuation:
    """nu2(S(n1, k) - S(n2, k)) with adaptive shared-precision residues.

    The result is infinite exactly when the difference is the integer zero;
    besides n1 = n2 that happens identically at k <= 1, where the column is
    constant.
    """
    if k < 0 or k > min(n1, n2):
        raise DomainError(f"need 0 <= k <= min(n1, n2), got n1={n1}, n2={n2}, k={k}")
    if k <= 1:
        column = (lambda n: int(n == 0)) if k == 0 else (lambda n: int(n >= 1))
        d = column(n1) - column(n2)
        return Valuation.infinite() if d == 0 else Valuation.finite(0)
    if n1 == n2:
        return Valuation.infinite()
    policy = policy or PrecisionPolicy()
    for bits in policy.ladder():
        rows = stirling_rows_mod2((n1, n2), k, bits)
        d = (rows[n1][k] - rows[n2][k]) & ((1 << bits) - 1)
        if d:
            return Valuation.finite(nu2_int(d))
    return Valuation.at_least(policy.max_bits)


# ---------------------------------------------------------------------------
# identity checks (exact)


def check_convolution(n: int, m: int, k: int, cap: int = DEFAULT_EXACT_CAP) -> bool:
    """Exact check of the two-argument splitting identity

        S(n+m, k) = sum_{j=1..k} sum_{i=0..j} C(j,i) (k-i)!/(k-j)! S(n, k-i) S(m, j).

    The identity needs m >= 1 (the inner sum starts at j = 1, so the right
    side vanishes for m = 0); the check evaluates whatever it is given.
    """
    if n < 0 or m < 0 or not 0 <= k <= n + m:
        raise DomainError(f"need n, m >= 0 and 0 <= k <= n+m, got {n}, {m}, {k}")
    lhs = stirling_exact(n + m, k, cap=cap)
    rhs = 0
    for j in range(1, k + 1):
        sm = stirling_exact(m, j, cap=cap)
        if sm == 0:
            continue
        for i in range(j + 1):
            sn = stirling_exact(n, k - i, cap=cap)
            if sn == 0:
                continue
            rhs += math.comb(j, i) * math.perm(k - i, j - i) * sn * sm
    return lhs == rhs


def check_symmetric_identity(k1: int, k2: int, r: int, cap: int = DEFAULT_EXACT_CAP) -> bool:
    """Exact check of the symmetric product identity, cleared of denominators:

        k1! k2! (r-1)! S(k1+k2+2, r)
            = (k1+k2+1)! sum_{i=1..r-1} (i-1)! (r-i-1)! S(k1+1, i) S(k2+1, r-i).
    """
    if k1 < 0 or k2 < 0:
        raise DomainError(f"need k1, k2 >= 0, got {k1}, {k2}")
    if r < max(k1, k2) + 2:
        raise DomainError(f"need r >= max(k1, k2) + 2, got r={r}")
    lhs = (
        math.factorial(k1)
        * math.factorial(k2)
        * math.factorial(r - 1)
        * stirling_exact(k1 + k2 + 2, r, cap=cap)
    )
    rhs = math.factorial(k1 + k2 + 1) * sum(
        math.factorial(i - 1)
        * math.factorial(r - i - 1)
        * stirling_exact(k1 + 1, i, cap=cap)
        * stirling_exact(k2 + 1, r - i, cap=cap)
        for i in range(1, r)
    )
    return lhs == rhs
