"""Counting solutions of d^r = a (mod s).

The count is multiplicative over the prime-power factors of s (CRT).  Per
prime power p^e the count comes from an exhaustive histogram when p^e is
small, and from the structure of the unit group when p^e is large and a
is a unit: cyclic of order phi(p^e) for odd p, {+-1} x cyclic of order
2^(e-2) for 2^e with e >= 3.  Non-unit a above the histogram threshold
falls back to direct enumeration.

For units the count never exceeds 2 * r^omega(s); ``bound_sweep`` measures
the worst observed ratio against r^omega(s) exhaustively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from .sieve import Factorization, trial_factorize

BRUTE_FORCE_THRESHOLD = 10**6  # per prime power


@dataclass(frozen=True)
class ResidueCount:
    """Number of d in [0, s) with d^r = a (mod s), and the unit bound."""

    r: int
    a: int
    s: int
    count: int
    bound: float


def count_solutions_bruteforce(r: int, a: int, s: int) -> int:
    """Exhaustive count over d in [0, s); the oracle path."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if not 0 <= a < s:
        raise ValueError(f"need 0 <= a < s, got a={a}, s={s}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    return sum(1 for d in range(s) if pow(d, r, s) == a)


@lru_cache(maxsize=32)
def _prime_power_histogram(r: int, pe: int) -> np.ndarray:
    """counts[a] = #{ d in [0, pe) : d^r = a (mod pe) }, vectorised."""
    base = np.arange(pe, dtype=np.int64)
    result = np.ones(pe, dtype=np.int64)
    exp = r
    while exp:
        if exp & 1:
            result = result * base % pe
        base = base * base % pe
        exp >>= 1
    hist = np.bincount(result, minlength=pe).astype(np.int64)
    hist.setflags(write=False)
    return hist


def _count_prime_power(r: int, a: int, p: int, e: int, threshold: int) -> int:
    pe = p**e
    a %= pe
    if pe <= threshold:
        return int(_prime_power_histogram(r, pe)[a])
    if a % p == 0:
        # non-unit above threshold: only the slow exhaustive path is exact
        return sum(1 for d in range(pe) if pow(d, r, pe) == a)
    if p != 2:
        # cyclic unit group of order n
        n = pe // p * (p - 1)
        gd = math.gcd(r, n)
        return gd if pow(a, n // gd, pe) == 1 else 0
    # 2^e with e >= 3 here (smaller powers fall under any sane threshold):
    # units decompose as <-1> x <5>, orders 2 and 2^(e-2)
    if r % 2 == 1:
        return 1
    two_adic = (r & -r).bit_length() - 1
    m = min(two_adic, e - 2)
    if a % 4 == 1 and pow(a, 2 ** (e - 2 - m), pe) == 1:
        return 2 ** (m + 1)
    return 0


def count_solutions(
    r: int,
    a: int,
    s: int,
    fact: Factorization,
    *,
    brute_threshold: int = BRUTE_FORCE_THRESHOLD,
) -> ResidueCount:
    """CRT-multiplicative count of d^r = a (mod s); equals the oracle."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if not 0 <= a < s:
        raise ValueError(f"need 0 <= a < s, got a={a}, s={s}")
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    if fact.n != s:
        raise ValueError(f"factorization is of {fact.n}, not {s}")
    count = 1
    for p, e in fact.factors:
        count *= _count_prime_power(r, a, p, e, brute_threshold)
        if count == 0:
            break
    return ResidueCount(r=r, a=a, s=s, count=count, bound=2.0 * r**fact.omega)


def counts_vector(
    r: int,
    s: int,
    fact: Factorization | None = None,
    *,
    brute_threshold: int = BRUTE_FORCE_THRESHOLD,
) -> np.ndarray:
    """counts[a] for every a in [0, s) at once (prime powers must be small
    enough for the histogram path)."""
    if fact is None:
        fact = trial_factorize(s)
    if fact.n != s:
        raise ValueError(f"factorization is of {fact.n}, not {s}")
    out = np.ones(s, dtype=np.int64)
    idx = np.arange(s, dtype=np.int64)
    for p, e in fact.factors:
        pe = p**e
        if pe > brute_threshold:
            raise ValueError(f"prime power {pe} exceeds histogram threshold")
        out *= _prime_power_histogram(r, pe)[idx % pe]
    return out


class ModulusMaximum(NamedTuple):
    s: int
    a: int
    count: int
    ratio: float


class SweepResult(NamedTuple):
    r: int
    s_max: int
    max_ratio: float
    witness_a: int
    witness_s: int


def per_modulus_maxima(r: int, s_max: int) -> Iterator[ModulusMaximum]:
    """For each s <= s_max, the unit residue a maximizing count / r^omega(s)."""
    if s_max < 2:
        raise ValueError(f"s_max must be >= 2, got {s_max}")
    for s in range(1, s_max + 1):
        fact = trial_factorize(s)
        vec = counts_vector(r, s, fact)
        units = np.nonzero(np.gcd(np.arange(s, dtype=np.int64), s) == 1)[0]
        unit_counts = vec[units]
        best = int(np.argmax(unit_counts))  # first index wins ties: smallest a
        norm = float(r**fact.omega)
        yield ModulusMaximum(
            s=s,
            a=int(units[best]),
            count=int(unit_counts[best]),
            ratio=int(unit_counts[best]) / norm,
        )


def bound_sweep(r: int, s_max: int) -> SweepResult:
    """Worst observed count / r^omega(s) over all s <= s_max and unit a."""
    best_ratio = -1.0
    witness_a = witness_s = 0
    for row in per_modulus_maxima(r, s_max):
        if row.ratio > best_ratio:
            best_ratio = row.ratio
            witness_a, witness_s = row.a, row.s
    return SweepResult(
        r=r, s_max=s_max, max_ratio=best_ratio,
        witness_a=witness_a, witness_s=witness_s,
    )
