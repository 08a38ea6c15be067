"""Averaged worst-case progression errors over a sweep of moduli.

For each sample size x the experiment sums, over all moduli k up to

    K(x) = floor( x^(r/(r+1)) / (log x)^(A + r - 1) ),

the worst |error term| among residues l whose gcd with k is r-free:

    S(x) = sum_{k <= K(x)} max_l |E(x; k, l)|.

The reported trend statistic is S(x) * (log x)^A / x.  All residue classes
of one modulus are counted in a single pass over the r-free flag table, so
a modulus costs O(x + k) rather than O(x) per residue.  Work is split
across processes by modulus; the fold over k is in fixed ascending order,
which makes the CSV output byte-identical regardless of worker count.
"""

from __future__ import annotations

import math
import multiprocessing
import random
import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, SelfCheckError
from .multiplicative import f_value
from .progressions import decompose
from .sieve import SieveTable, is_r_free, totient_value, trial_factorize

CSV_HEADER = "x,r,A,K,S,normalized,wall_seconds"


def modulus_threshold(x: int, r: int, log_power: float) -> int:
    """Largest modulus included at sample size x.

    Natural logarithm throughout.  A threshold below 1 means the requested
    combination is vacuous and is rejected as a configuration error.
    """
    if x < 3:
        raise ValueError(f"x must be >= 3, got {x}")
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    value = x ** (r / (r + 1)) / math.log(x) ** (log_power + r - 1)
    k = math.floor(value)
    if k < 1:
        raise ConfigError(
            f"threshold {value:.3g} < 1 at x={x}, r={r}, A={log_power}; "
            "use a larger x or a smaller A"
        )
    return k


def class_counts(table: SieveTable, x: int, r: int, k: int) -> np.ndarray:
    """R(x; k, l) for every l in [0, k) in one pass over the flag table."""
    if r not in table.mu_r:
        raise ValueError(f"table was not built with r={r}")
    if not 1 <= x <= table.limit:
        raise ValueError(f"x={x} outside sieve range [1, {table.limit}]")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    flags = table.mu_r[r][1 : x + 1]
    pad = (-x) % k
    if pad:
        flags = np.concatenate([flags, np.zeros(pad, dtype=np.uint8)])
    col = flags.reshape(-1, k).sum(axis=0, dtype=np.int64)
    counts = np.empty(k, dtype=np.int64)
    counts[(np.arange(k) + 1) % k] = col  # column j holds n = j+1 (mod k)
    return counts


def max_error_for_modulus(
    table: SieveTable,
    x: int,
    r: int,
    k: int,
    *,
    residues: Iterable[int] | None = None,
    expected_total: int | None = None,
) -> tuple[int, float]:
    """(l*, max |E(x; k, l)|) over admissible residues of one modulus.

    Admissible means gcd(l, k) is r-free.  Ties go to the smallest l.
    ``residues`` restricts the scan (sampled, non-authoritative mode);
    ``expected_total`` enables the partition self-check: the class counts
    of one modulus must sum to the count for k = 1.
    """
    counts = class_counts(table, x, r, k)
    if expected_total is not None and int(counts.sum()) != expected_total:
        raise SelfCheckError(
            f"class counts for k={k} sum to {int(counts.sum())}, "
            f"expected {expected_total}"
        )
    fact_k = trial_factorize(k)
    fv = f_value(r, k, fact_k)
    phi_k = totient_value(fact_k)
    mains: dict[int, float] = {}
    for g in _divisors(fact_k):
        if is_r_free(g, r):
            s = k // g
            phi_s = totient_value(trial_factorize(s))
            mains[g] = (x / k) * (phi_k / (g * phi_s)) * fv.value
    best_l = -1
    best = -1.0
    if residues is None:
        ls: Iterable[int] = range(k)
    else:
        ls = sorted(set(residues))
        if ls and not 0 <= ls[0] <= ls[-1] < k:
            raise ValueError(f"residues must lie in [0, {k})")
    for l in ls:
        g = math.gcd(l, k)
        main = mains.get(g)
        if main is None:
            continue
        err = abs(float(counts[l]) - main)
        if err > best:
            best = err
            best_l = l
    if best_l < 0:
        raise SelfCheckError(f"no admissible residue for k={k}")  # unreachable
    return best_l, best


def _divisors(fact) -> list[int]:
    divs = [1]
    for p, e in fact.factors:
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


@dataclass
class ExperimentConfig:
    """Sweep settings: r, the log-power A, sample sizes, and worker count."""

    r: int
    log_power: float
    xs: tuple[int, ...]
    threads: int = 1
    sample_l: int | None = None  # residues per modulus; None = exhaustive
    seed: int = 0
    timing: str = "wall"  # "none" zeroes wall_seconds for reproducible bytes
    output_path: str | None = None

    def __post_init__(self):
        self.xs = tuple(int(x) for x in self.xs)

    def validate(self) -> None:
        if self.r < 2:
            raise ConfigError(f"r must be >= 2, got {self.r}")
        if not self.log_power > 0:
            raise ConfigError(f"A must be > 0, got {self.log_power}")
        if not self.xs:
            raise ConfigError("xs must be nonempty")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ConfigError(f"xs must be strictly increasing, got {self.xs}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.timing not in ("wall", "none"):
            raise ConfigError(f"timing must be 'wall' or 'none', got {self.timing}")
        if self.sample_l is not None and self.sample_l < 1:
            raise ConfigError(f"sample_l must be >= 1, got {self.sample_l}")
        for x in self.xs:
            if x < 3:
                raise ConfigError(f"each x must be >= 3, got {x}")
            modulus_threshold(x, self.r, self.log_power)  # raises if vacuous


class BvRow(NamedTuple):
    x: int
    r: int
    log_power: float
    modulus_bound: int
    error_sum: float
    normalized: float
    wall_seconds: float


# Worker state is installed before forking; children inherit it read-only.
_WORKER_STATE: dict = {}


def _modulus_task(k: int) -> float:
    st = _WORKER_STATE
    if st["sample_l"] is not None and k > st["sample_l"]:
        rng = random.Random(f"{st['seed']}:{st['x']}:{k}")
        # 1 mod k (0 for k = 1) is always admissible, so the sampled scan
        # can never come up empty
        ls = set(rng.sample(range(k), st["sample_l"])) | {1 % k}
    else:
        ls = None
    _, max_e = max_error_for_modulus(
        st["table"], st["x"], st["r"], k,
        residues=ls, expected_total=st["total"],
    )
    return max_e


def run_experiment(config: ExperimentConfig, table: SieveTable) -> list[BvRow]:
    """Run the sweep; one row per x, deterministic for a fixed config."""
    config.validate()
    if config.r not in table.mu_r:
        raise ConfigError(f"sieve was not built with r={config.r}")
    if table.limit < max(config.xs):
        raise ConfigError(
            f"sieve limit {table.limit} is below max(xs) = {max(config.xs)}"
        )
    rows = []
    for x in config.xs:
        start = time.perf_counter()
        bound = modulus_threshold(x, config.r, config.log_power)
        total = int(table.mu_r[config.r][1 : x + 1].sum(dtype=np.int64))
        _WORKER_STATE.update(
            table=table, x=x, r=config.r, total=total,
            sample_l=config.sample_l, seed=config.seed,
        )
        ks = range(1, bound + 1)
        if config.threads == 1:
            maxima = [_modulus_task(k) for k in ks]
        else:
            ctx = multiprocessing.get_context("fork")
            chunk = max(1, bound // (4 * config.threads))
            with ctx.Pool(config.threads) as pool:
                maxima = pool.map(_modulus_task, ks, chunksize=chunk)
        error_sum = 0.0
        for v in maxima:  # fixed ascending-k fold: deterministic float result
            error_sum += v
        normalized = error_sum * math.log(x) ** config.log_power / x
        wall = time.perf_counter() - start if config.timing == "wall" else 0.0
        rows.append(
            BvRow(
                x=x, r=config.r, log_power=config.log_power,
                modulus_bound=bound, error_sum=error_sum,
                normalized=normalized, wall_seconds=wall,
            )
        )
    if config.output_path:
        write_csv(rows, config.output_path)
    return rows


def rows_to_csv(rows: Sequence[BvRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.x},{row.r},{row.log_power!r},{row.modulus_bound},"
            f"{row.error_sum!r},{row.normalized!r},{row.wall_seconds:.6f}"
        )
    return "\n".join(lines) + "\n"


def write_csv(rows: Sequence[BvRow], path) -> None:
    with open(path, "w") as fh:
        fh.write(rows_to_csv(rows))


def write_plot(rows: Sequence[BvRow], path) -> None:
    """Normalized trend against x on a log axis, as an SVG file."""
    xs = [row.x for row in rows]
    ys = [row.normalized for row in rows]
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(xs, ys, "o-")
        ax.set_xscale("log")
        ax.set_xlabel("x")
        ax.set_ylabel("S(x) * (log x)^A / x")
        ax.set_title("Averaged progression error, normalized")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg")
        plt.close(fig)
    except ImportError:
        _write_svg_fallback(xs, ys, path)


def _write_svg_fallback(xs, ys, path) -> None:
    # minimal hand-rolled scatter+line on a log-x axis
    w, h, m = 640, 400, 60
    lx = [math.log10(x) for x in xs]
    x0, x1 = min(lx), max(lx) or 1.0
    y1 = max(ys) or 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    px = [m + (w - 2 * m) * (v - x0) / (x1 - x0) for v in lx]
    py = [h - m - (h - 2 * m) * (v / y1) for v in ys]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{m}" y1="{h-m}" x2="{w-m}" y2="{h-m}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{h-m}" stroke="black"/>',
        '<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="'
        + " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        + '"/>',
    ]
    for a, b, xv in zip(px, py, xs):
        parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="steelblue"/>')
        parts.append(
            f'<text x="{a:.2f}" y="{h-m+16}" font-size="10" text-anchor="middle">'
            f"{xv:g}</text>"
        )
    parts.append(
        f'<text x="{m-8}" y="{m}" font-size="10" text-anchor="end">{y1:.3g}</text>'
    )
    parts.append(
        f'<text x="{w//2}" y="{h-10}" font-size="12" text-anchor="middle">x '
        f"(log scale)</text>"
    )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


class ZProbeRow(NamedTuple):
    k: int
    l: int
    z: float
    small_sum: int
    large_sum: int
    small_abs_err: float
    large_abs: float
    bound_shape: float
    is_reference_split: bool


def z_sensitivity_probe(
    table: SieveTable,
    x: int,
    r: int,
    pairs: Sequence[tuple[int, int]],
    z_grid: Sequence[float],
) -> list[ZProbeRow]:
    """Decomposition residuals and the combined bound shape across cuts z.

    The reference cut z = x^(1/(r+1)) is always included and flagged.  The
    split identity is re-verified at every grid point.
    """
    reference = x ** (1.0 / (r + 1))
    zs = sorted(set(float(z) for z in z_grid) | {reference})
    rows = []
    for k, l in pairs:
        g = math.gcd(l, k) if l else k
        omega_k = trial_factorize(k).omega
        for z in zs:
            rep = decompose(table, x, r, k, l, z)
            if rep.small_sum + rep.large_sum != rep.count:
                raise SelfCheckError(
                    f"split identity failed at (x={x}, k={k}, l={l}, z={z})"
                )
            shape = 2**omega_k * z + r**omega_k * (
                x / (k * z ** (r - 1)) + x / (g * z**r)
            )
            rows.append(
                ZProbeRow(
                    k=k, l=l, z=z,
                    small_sum=rep.small_sum, large_sum=rep.large_sum,
                    small_abs_err=abs(rep.small_err),
                    large_abs=abs(float(rep.large_sum)),
                    bound_shape=shape,
                    is_reference_split=(z == reference),
                )
            )
    return rows


def z_probe_csv(rows: Sequence[ZProbeRow]) -> str:
    lines = ["k,l,z,small_sum,large_sum,small_abs_err,large_abs,bound_shape,is_reference_split"]
    for row in rows:
        lines.append(
            f"{row.k},{row.l},{row.z!r},{row.small_sum},{row.large_sum},"
            f"{row.small_abs_err!r},{row.large_abs!r},{row.bound_shape!r},"
            f"{int(row.is_reference_split)}"
        )
    return "\n".join(lines) + "\n"
