"""Command-line front end.

Subcommands: sieve, tau-sum, f, error, verify-lemmas, residues, bv-sum.
Exit codes: 0 success, 2 configuration error, 3 exact-identity failure.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from pathlib import Path

from .errors import ConfigError, SelfCheckError
from .harness import (
    ExperimentConfig,
    modulus_threshold,
    rows_to_csv,
    run_experiment,
    write_csv,
    write_plot,
)
from .multiplicative import f_value, tau_partial_sum_check
from .progressions import (
    count_r_free_in_progression,
    decompose,
    error_term,
    lemma_bound_probe,
)
from .residues import bound_sweep, per_modulus_maxima
from .sieve import build_sieve, is_r_free, load_cache, save_cache, trial_factorize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IDENTITY = 3


def _parse_int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            out.append(int(float(part)))
    return out


def _sieve_for(limit: int, rs, cache: str | None):
    if cache and Path(cache).exists():
        table = load_cache(cache)
        if table.limit < limit or any(r not in table.mu_r for r in rs):
            raise ConfigError(
                f"cache {cache} holds limit={table.limit}, rs={table.rs}; "
                f"need limit>={limit}, rs={sorted(rs)} (delete it to rebuild)"
            )
        return table
    table = build_sieve(limit, rs)
    if cache:
        save_cache(table, cache)
    return table


def _cmd_sieve(args) -> int:
    rs = _parse_int_list(args.r)
    start = time.perf_counter()
    table = _sieve_for(args.limit, rs, args.cache)
    elapsed = time.perf_counter() - start
    for r in sorted(rs):
        total = int(table.mu_r[r][1 : args.limit + 1].sum(dtype="int64"))
        print(f"r={r}: {total} r-free integers <= {args.limit}")
    print(f"built/loaded in {elapsed:.3f}s (limit {table.limit}, rs {table.rs})")
    return EXIT_OK


def _cmd_tau_sum(args) -> int:
    rows = tau_partial_sum_check(args.r, _parse_int_list(args.x))
    print("x,sum,ratio")
    for row in rows:
        print(f"{row.x},{row.total},{row.ratio!r}")
    return EXIT_OK


def _cmd_f(args) -> int:
    fv = f_value(args.r, args.k, trial_factorize(args.k))
    print(f"{fv.value:.12f}")
    return EXIT_OK


def _cmd_error(args) -> int:
    table = _sieve_for(args.x, {args.r}, args.cache)
    rep = error_term(table, args.x, args.r, args.k, args.l)
    payload = {
        "x": rep.x, "r": rep.r, "k": rep.k, "l": rep.l,
        "g": rep.g, "s": rep.s, "t": rep.t,
        "g_is_r_free": rep.g_is_r_free,
        "R": rep.count, "main_term": rep.main_term,
        "error_term": rep.error_term,
    }
    if args.z is not None and rep.g_is_r_free:
        dec = decompose(table, args.x, args.r, args.k, args.l, args.z)
        payload.update(
            z=dec.z, small_sum=dec.small_sum, large_sum=dec.large_sum,
            split_exact=(dec.small_sum + dec.large_sum == dec.count),
        )
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(",".join(payload.keys()))
        print(",".join(_csv_cell(v) for v in payload.values()))
    if "split_exact" in payload and not payload["split_exact"]:
        return EXIT_IDENTITY
    return EXIT_OK


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _cmd_verify_lemmas(args) -> int:
    table = _sieve_for(args.x, {args.r}, None)
    rng = random.Random(args.seed)
    failures = 0
    worst_small = worst_large = 0.0
    done = 0
    while done < args.trials:
        k = rng.randint(1, min(200, args.x))
        l = rng.randrange(k)
        g = math.gcd(l, k) if l else k
        if not is_r_free(g, args.r):
            continue
        done += 1
        z_top = max(1.0, (args.x / g) ** (1.0 / args.r))
        z = rng.uniform(1.0, z_top)
        rep = decompose(table, args.x, args.r, k, l, z)
        if rep.small_sum + rep.large_sum != rep.count:
            failures += 1
            print(
                f"IDENTITY FAILURE at k={k} l={l} z={z!r}: "
                f"{rep.small_sum}+{rep.large_sum} != {rep.count}",
                file=sys.stderr,
            )
            continue
        probe = lemma_bound_probe(table, args.x, args.r, k, l, z)
        worst_small = max(worst_small, probe.small_residual)
        worst_large = max(worst_large, probe.large_ratio)
    print(
        f"trials={args.trials} failures={failures} "
        f"max_small_residual={worst_small!r} max_large_ratio={worst_large!r}"
    )
    return EXIT_IDENTITY if failures else EXIT_OK


def _cmd_residues(args) -> int:
    print("s,a,count,ratio")
    for row in per_modulus_maxima(args.r, args.s_max):
        print(f"{row.s},{row.a},{row.count},{row.ratio!r}")
    result = bound_sweep(args.r, args.s_max)
    print(
        f"# max ratio {result.max_ratio!r} at a={result.witness_a} "
        f"s={result.witness_s} (r={result.r})"
    )
    return EXIT_OK


def _cmd_bv_sum(args) -> int:
    xs = _parse_int_list(args.x)
    config = ExperimentConfig(
        r=args.r, log_power=args.A, xs=tuple(xs), threads=args.threads,
        sample_l=args.sample_l, seed=args.seed, timing=args.timing,
    )
    config.validate()
    table = _sieve_for(max(xs), {args.r}, args.cache)
    rows = run_experiment(config, table)
    if args.csv:
        write_csv(rows, args.csv)
    else:
        sys.stdout.write(rows_to_csv(rows))
    if args.plot:
        write_plot(rows, args.plot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfree",
        description="r-free numbers in arithmetic progressions: exact counts, "
        "error terms, and averaged-error experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="build (or load) the flag tables")
    p.add_argument("--limit", type=lambda s: int(float(s)), required=True)
    p.add_argument("--r", required=True, help="comma-separated r values")
    p.add_argument("--cache", default=None)
    p.set_defaults(func=_cmd_sieve)

    p = sub.add_parser("tau-sum", help="partial sums of tau_r as CSV")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--x", required=True, help="comma-separated x values")
    p.set_defaults(func=_cmd_tau_sum)

    p = sub.add_parser("f", help="print f_r(k) to 12 decimals")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_f)

    p = sub.add_parser("error", help="one progression report (CSV or JSON)")
    p.add_argument("--x", type=lambda s: int(float(s)), required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--z", type=float, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--cache", default=None)
    p.set_defaults(func=_cmd_error)

    p = sub.add_parser(
        "verify-lemmas", help="randomized split-identity and bound sweeps"
    )
    p.add_argument("--x", type=lambda s: int(float(s)), required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify_lemmas)

    p = sub.add_parser("residues", help="power-residue count maxima as CSV")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s-max", dest="s_max", type=int, required=True)
    p.set_defaults(func=_cmd_residues)

    p = sub.add_parser("bv-sum", help="averaged worst-case error experiment")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--x", required=True, help="comma-separated x values")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv", default=None)
    p.add_argument("--plot", default=None)
    p.add_argument("--cache", default=None)
    p.add_argument("--timing", choices=("wall", "none"), default="wall")
    p.add_argument("--sample-l", dest="sample_l", type=int, default=None,
                   help="sample this many residues per modulus (non-authoritative)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bv_sum)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SelfCheckError as exc:
        print(f"exact-identity self-check failed: {exc}", file=sys.stderr)
        return EXIT_IDENTITY


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
