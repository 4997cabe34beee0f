"""Closed-form valuation predictions for Stirling numbers of the second kind.

Each predictor encodes one proved statement (or, for the Mersenne-shaped
case, the conjectured one) as a typed claim: an equality, a lower bound, or
a conjectural equality, tagged with the statement it came from.  Claims are
verified against the exact engine by :mod:`stirling2adic.verify`; predictors
never compute Stirling numbers themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .base2 import (
    ceil_log2,
    delta_conjecture,
    delta_theorem,
    is_power_of_two,
    nu2_int,
    s2,
    theta,
)
from .errors import DomainError

__all__ = [
    "EQUALITY",
    "LOWER_BOUND",
    "CONJECTURAL_EQUALITY",
    "NOT_APPLICABLE",
    "SRC_THM_LOWER_BOUND",
    "SRC_THM_DIAGONAL",
    "SRC_THM_DIFFERENCE",
    "SRC_THM_SHIFTED_TRIPLE",
    "SRC_LEM_LENGYEL_EQ",
    "SRC_LEM_LENGYEL_BD",
    "SRC_LEM_SHIFTED_POWER",
    "SRC_LEM_THETA",
    "SRC_CONJ_MERSENNE",
    "Prediction",
    "predict_val",
    "predict_val_shifted_power",
    "predict_val_shifted_triple",
    "predict_val_difference",
    "predict_val_theta",
    "f_conjectured",
]

EQUALITY = "equality"
LOWER_BOUND = "lower-bound"
CONJECTURAL_EQUALITY = "conjectural-equality"
NOT_APPLICABLE = "not-applicable"

SRC_THM_LOWER_BOUND = "Thm-LowerBound"
SRC_THM_DIAGONAL = "Thm-DiagonalEquality"
SRC_THM_DIFFERENCE = "Thm-Difference"
SRC_THM_SHIFTED_TRIPLE = "Thm-ShiftedTriple"
SRC_LEM_LENGYEL_EQ = "Lem-Lengyel-Eq"
SRC_LEM_LENGYEL_BD = "Lem-Lengyel-Bd"
SRC_LEM_SHIFTED_POWER = "Lem-ShiftedPower"
SRC_LEM_THETA = "Lem-Theta"
SRC_CONJ_MERSENNE = "Conj-Mersenne"


@dataclass(frozen=True)
class Prediction:
    """A sourced claim about a 2-adic valuation."""

    kind: str
    value: int | None
    source: str
    params: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind in (EQUALITY, LOWER_BOUND, CONJECTURAL_EQUALITY):
            if self.value is None or self.value < 0:
                raise DomainError(f"{self.kind} claim needs value >= 0, got {self.value}")
        elif self.kind == NOT_APPLICABLE:
            if self.value is not None:
                raise DomainError("not-applicable claim carries no value")
        else:
            raise DomainError(f"unknown claim kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == NOT_APPLICABLE:
            return "NotApplicable"
        label = {
            EQUALITY: "Equality",
            LOWER_BOUND: "LowerBound",
            CONJECTURAL_EQUALITY: "ConjecturalEquality",
        }[self.kind]
        return f"{label}({self.value}) [{self.source}]"


def predict_val(big_n: int, k: int) -> list[Prediction]:
    """All applicable closed-form claims about nu2(S(big_n, k)).

    Decomposes big_n = c * 2**n with n = nu2(big_n) maximal (c odd) and
    matches every statement whose parameter domain contains (c, n, k).
    Equality claims come first; a not-applicable placeholder is returned
    when nothing matches.
    """
    if big_n < 2:
        raise DomainError(f"need N >= 2, got {big_n}")
    if not 1 <= k <= big_n:
        raise DomainError(f"need 1 <= k <= N, got k={k}, N={big_n}")
    n = nu2_int(big_n)
    c = big_n >> n
    equalities: list[Prediction] = []
    bounds: list[Prediction] = []

    if k <= (1 << n):
        equalities.append(
            Prediction(EQUALITY, s2(k) - 1, SRC_LEM_LENGYEL_EQ, {"c": c, "n": n, "k": k})
        )
    if n >= 2 and (c - 1) << n < k:  # k = (c-1)*2**n + a with 1 <= a <= 2**n
        a = k - ((c - 1) << n)
        if a <= (1 << n):
            equalities.append(
                Prediction(EQUALITY, s2(a) - 1, SRC_THM_DIAGONAL, {"c": c, "n": n, "a": a})
            )
    if c >= 3:
        if k == (1 << (n + 1)) - 1:
            equalities.append(
                Prediction(EQUALITY, n, SRC_LEM_LENGYEL_BD, {"c": c, "n": n, "k": k})
            )
        elif (1 << n) < k < (1 << (n + 1)) - 1:
            bounds.append(
                Prediction(LOWER_BOUND, s2(k), SRC_LEM_LENGYEL_BD, {"c": c, "n": n, "k": k})
            )
    a = k & ((1 << (n + 1)) - 1)
    b = k >> (n + 1)
    if a > 0:
        bounds.append(
            Prediction(LOWER_BOUND, s2(a) - 1, SRC_THM_LOWER_BOUND, {"c": c, "n": n, "b": b, "a": a})
        )
    out = equalities + bounds
    return out or [Prediction(NOT_APPLICABLE, None, SRC_THM_LOWER_BOUND, {"c": c, "n": n})]


def predict_val_shifted_power(c: int, n: int, m: int) -> Prediction:
    """Claim: nu2(S(c*2**n + 2**m, 2**n)) = n - 1 - m, for 0 <= m < n, c odd."""
    if c < 1 or c % 2 == 0:
        raise DomainError(f"need odd c >= 1, got {c}")
    if not 0 <= m < n:
        raise DomainError(f"need 0 <= m < n, got m={m}, n={n}")
    return Prediction(
        EQUALITY, n - 1 - m, SRC_LEM_SHIFTED_POWER, {"c": c, "n": n, "m": m}
    )


def predict_val_shifted_triple(c: int, m: int, b: int, n: int, a: int) -> Prediction:
    """Claim about nu2(S(c*2**m + b*2**(n+1) + 2**n, b*2**(n+2) + a)).

    Equality n when a = 2**(n+1) - 1, otherwise a lower bound of s2(a).
    Needs c odd, b >= 1, n >= 1, 1 <= a < 2**(n+1) and m large enough
    (m >= n + 2 + floor(log2(b))).
    """
    if c < 1 or c % 2 == 0:
        raise DomainError(f"need odd c >= 1, got {c}")
    if b < 1:
        raise DomainError(f"need b >= 1, got {b}")
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not 1 <= a < (1 << (n + 1)):
        raise DomainError(f"need 1 <= a < 2**(n+1), got a={a}")
    m_min = n + 2 + (b.bit_length() - 1)
    if m < m_min:
        raise DomainError(f"need m >= n + 2 + floor(log2(b)) = {m_min}, got {m}")
    params = {"c": c, "m": m, "b": b, "n": n, "a": a}
    if a == (1 << (n + 1)) - 1:
        return Prediction(EQUALITY, n, SRC_THM_SHIFTED_TRIPLE, params)
    return Prediction(LOWER_BOUND, s2(a), SRC_THM_SHIFTED_TRIPLE, params)


def predict_val_difference(a: int, b: int, n: int, k: int) -> Prediction:
    """Claim about nu2(S(a*2**n, k) - S(b*2**n, k)) for a > b >= 1, 3 <= k <= 2**n.

    Away from k = 2**m - 1 this is the proved formula

        n + nu2(a-b) - ceil(log2 k) + s2(k) + delta(k);

    at k = 2**m - 1 the case is open and the claim is the conjectured
    n + 1 + nu2(a-b), tagged conjectural so verifiers report rather than
    assert it.
    """
    if b < 1 or a <= b:
        raise DomainError(f"need a > b >= 1, got a={a}, b={b}")
    if k < 3 or k > (1 << n):
        raise DomainError(f"need 3 <= k <= 2**n, got k={k}, n={n}")
    params = {"a": a, "b": b, "n": n, "k": k}
    if is_power_of_two(k + 1):
        return Prediction(
            CONJECTURAL_EQUALITY, n + 1 + nu2_int(a - b), SRC_CONJ_MERSENNE, params
        )
    value = n + nu2_int(a - b) - ceil_log2(k) + s2(k) + delta_theorem(k)
    return Prediction(EQUALITY, value, SRC_THM_DIFFERENCE, params)


def _distinguished_a(k: int) -> int:
    # the unique a for which the theta-lemma bound is attained
    m1 = k.bit_length() - 1
    th = theta(k)
    m_th = m1 - th + 1  # exponents at the top run are consecutive
    if th < s2(k):
        return (1 << (m_th - 1)) * ((1 << th) - 1)
    return (1 << m_th) * ((1 << (th - 1)) - 1)


def predict_val_theta(c: int, n: int, a: int, k: int) -> Prediction:
    """Claim about nu2(S(c*2**n - a, k - 2a)) from the top-run lemma.

    For k with s2(k) >= 2, k neither a power of two nor one less, and
    1 <= a <= ceil(k/2) - 1: equality s2(k) - ceil(log2 k) + nu2(a) exactly
    at the distinguished a determined by theta(k), and a strict inequality
    (reported as a lower bound one higher) everywhere else.
    """
    if c < 1 or c % 2 == 0:
        raise DomainError(f"need odd c >= 1, got {c}")
    if k < 3 or k > (1 << n):
        raise DomainError(f"need 3 <= k <= 2**n, got k={k}, n={n}")
    if s2(k) < 2:
        raise DomainError(f"need s2(k) >= 2, got k={k}")
    if is_power_of_two(k) or is_power_of_two(k + 1):
        raise DomainError(f"k may be neither a power of two nor one less, got {k}")
    a_max = -(-k // 2) - 1
    if not 1 <= a <= a_max:
        raise DomainError(f"need 1 <= a <= ceil(k/2) - 1 = {a_max}, got a={a}")
    base = s2(k) - ceil_log2(k) + nu2_int(a)
    params = {"c": c, "n": n, "a": a, "k": k}
    if a == _distinguished_a(k):
        return Prediction(EQUALITY, base, SRC_LEM_THETA, params)
    # strict inequality over integers, clamped: valuations are never negative
    return Prediction(LOWER_BOUND, max(0, base + 1), SRC_LEM_THETA, params)


def f_conjectured(k: int) -> int:
    """The conjectured difference-drop f(k) = 1 + ceil(log2 k) - s2(k) - delta(k),

    with the delta variant that also covers powers of two minus one."""
    if k < 3:
        raise DomainError(f"need k >= 3, got {k}")
    return 1 + ceil_log2(k) - s2(k) - delta_conjecture(k)
