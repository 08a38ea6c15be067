"""Euler products and generalized divisor functions.

``f_value`` evaluates the density constant

    f_r(k) = prod over primes p not dividing k of (1 - p^{-r})
           = zeta(r)^{-1} * prod over p | k of (1 - p^{-r})^{-1},

which depends only on the radical of k.  ``tau_table`` sieves tau_r(n),
the number of ordered r-tuples of positive integers with product n, via
repeated divisor convolution; ``tau_value`` gives the same thing from a
factorization through tau_r(p^e) = C(e + r - 1, r - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .sieve import Factorization, SieveTable

_ZETA_TARGET = 1e-13
_FLOAT_ULP = 2.3e-16


def zeta(r: int, target_rel_error: float = 1e-12) -> float:
    """Riemann zeta at an integer r >= 2, to a requested relative error.

    Computed as the finite sum over n <= M plus the integral tail
    correction M^(1-r) / (r-1), with M chosen so the residual bound M^(-r)
    meets the target.
    """
    if r < 2:
        raise ValueError(f"r must be >= 2 (series diverges at r=1), got {r}")
    if not target_rel_error > 0:
        raise ValueError("target_rel_error must be positive")
    return _zeta_cached(int(r), float(target_rel_error))


@lru_cache(maxsize=128)
def _zeta_cached(r: int, target: float) -> float:
    m = max(10, math.ceil(target ** (-1.0 / r)))
    while float(m) ** (-r) > target:
        m *= 2
    total = 0.0
    # sum ascending chunks, each reduced small-to-large for accuracy
    chunk = 1 << 20
    for lo in range(1, m + 1, chunk):
        hi = min(lo + chunk - 1, m)
        total += float(np.sum(np.arange(hi, lo - 1, -1, dtype=np.float64) ** (-r)))
    return total + float(m) ** (1 - r) / (r - 1)


@dataclass(frozen=True)
class FValue:
    """Value of f_r(k) with an explicit relative-error budget."""

    r: int
    k: int
    value: float
    rel_error: float


def f_value(r: int, k: int, fact: Factorization) -> FValue:
    """Evaluate f_r(k) from the factorization of k.

    Only the distinct primes of k matter, so f_r(k) = f_r(rad(k)).
    """
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if fact.n != k:
        raise ValueError(f"factorization is of {fact.n}, not {k}")
    val = 1.0 / zeta(r, _ZETA_TARGET)
    for p, _ in fact.factors:
        val /= 1.0 - float(p) ** (-r)
    rel = _ZETA_TARGET + (len(fact.factors) + 2) * _FLOAT_ULP
    return FValue(r=r, k=k, value=val, rel_error=rel)


@dataclass(frozen=True)
class TauTable:
    """tau_r(n) for all n <= limit."""

    r: int
    limit: int
    tau: np.ndarray

    def __post_init__(self):
        self.tau.setflags(write=False)


def tau_table(r: int, limit: int) -> TauTable:
    """Sieve tau_r over [1, limit] by r-1 divisor-convolution passes.

    Values are held in 64-bit integers; a pass that could overflow them
    raises OverflowError up front instead of wrapping.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    tau = np.ones(limit + 1, dtype=np.int64)
    tau[0] = 0
    divisor_bound = 2 * math.isqrt(limit) + 1  # tau_2(n) <= 2*sqrt(n)
    for _ in range(r - 1):
        headroom = (2**63 - 1) // divisor_bound
        if int(tau.max()) > headroom:
            raise OverflowError(
                f"tau_{r} would overflow 64-bit integers below {limit}"
            )
        nxt = np.zeros(limit + 1, dtype=np.int64)
        for d in range(1, limit + 1):
            nxt[d::d] += tau[d]
        tau = nxt
    return TauTable(r=r, limit=limit, tau=tau)


def tau_value(r: int, fact: Factorization) -> int:
    """tau_r from the multiplicative formula, in exact integer arithmetic."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    out = 1
    for _, e in fact.factors:
        out *= math.comb(e + r - 1, r - 1)
    return out


class TauSumRow(NamedTuple):
    x: int
    total: int
    ratio: float


def tau_partial_sum_check(r: int, xs: Sequence[int]) -> list[TauSumRow]:
    """Partial sums of tau_r with their x * (log x)^(r-1) normalization.

    The returned ratio stays bounded and slowly varying in x; acceptance
    checks pin that down numerically.
    """
    xs = [int(x) for x in xs]
    for x in xs:
        if x < 3:
            raise ValueError(f"each x must be >= 3, got {x}")
    table = tau_table(r, max(xs))
    rows = []
    for x in xs:
        total = int(table.tau[1 : x + 1].sum(dtype=np.int64))
        if total < 0:
            raise OverflowError("tau partial sum overflowed int64")
        rows.append(TauSumRow(x, total, total / (x * math.log(x) ** (r - 1))))
    return rows


def omega_vs_tau_check(r: int, limit: int, table: SieveTable) -> bool:
    """True iff r^omega(k) <= tau_r(k) for every k <= limit."""
    if limit > table.limit:
        raise ValueError(f"limit {limit} exceeds sieve limit {table.limit}")
    taus = tau_table(r, limit).tau[1:]
    om = table.omega[1 : limit + 1].astype(np.int64)
    lhs = np.power(r, om)
    return bool(np.all(lhs <= taus))
