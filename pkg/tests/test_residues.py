import math
import random

import numpy as np
import pytest

from rfree import (
    bound_sweep,
    count_solutions,
    count_solutions_bruteforce,
    counts_vector,
    per_modulus_maxima,
    trial_factorize,
)


def _brute_histogram(r, s):
    hist = [0] * s
    for d in range(s):
        hist[pow(d, r, s)] += 1
    return hist


def test_bruteforce_examples():
    assert count_solutions_bruteforce(2, 1, 8) == 4
    assert count_solutions_bruteforce(2, 2, 3) == 0
    assert count_solutions_bruteforce(5, 0, 1) == 1
    assert count_solutions_bruteforce(3, 0, 1) == 1


def test_bruteforce_validation():
    with pytest.raises(ValueError):
        count_solutions_bruteforce(2, 1, 0)
    with pytest.raises(ValueError):
        count_solutions_bruteforce(2, 5, 3)


def test_crt_counter_examples():
    assert count_solutions(3, 1, 9, trial_factorize(9)).count == 3
    assert count_solutions(2, 1, 24, trial_factorize(24)).count == 8
    assert count_solutions(2, 0, 4, trial_factorize(4)).count == 2


def test_crt_counter_bound_field():
    rc = count_solutions(2, 1, 24, trial_factorize(24))
    assert rc.bound == 2.0 * 2 ** trial_factorize(24).omega
    assert rc.count <= rc.bound


def test_crt_counter_validation():
    with pytest.raises(ValueError):
        count_solutions(2, 1, 12, trial_factorize(6))
    with pytest.raises(ValueError):
        count_solutions(1, 0, 5, trial_factorize(5))


@pytest.mark.parametrize("r", [2, 3, 4])
def test_oracle_equivalence_small_moduli(r):
    for s in range(1, 300):
        vec = counts_vector(r, s)
        assert list(vec) == _brute_histogram(r, s), (r, s)


def test_scalar_matches_vector():
    rng = random.Random(40)
    for _ in range(200):
        s = rng.randint(1, 1500)
        a = rng.randrange(s)
        r = rng.choice([2, 3, 4])
        fact = trial_factorize(s)
        assert count_solutions(r, a, s, fact).count == int(counts_vector(r, s, fact)[a])


@pytest.mark.parametrize(
    "pe,p", [(2**5, 2), (2**7, 2), (2**9, 2), (3**5, 3), (5**4, 5), (7**3, 7)]
)
@pytest.mark.parametrize("r", [2, 3, 4, 6, 8, 12])
def test_unit_group_path_matches_bruteforce(pe, p, r):
    # force the structural path by dropping the histogram threshold
    fact = trial_factorize(pe)
    for a in range(1, min(pe, 80)):
        if a % p == 0:
            continue
        fast = count_solutions(r, a, pe, fact, brute_threshold=4).count
        slow = count_solutions_bruteforce(r, a, pe)
        assert fast == slow, (r, a, pe)


def test_nonunit_fallback_above_threshold():
    fact = trial_factorize(128)
    for a in (0, 2, 4, 8, 32, 64):
        fast = count_solutions(2, a, 128, fact, brute_threshold=4).count
        assert fast == count_solutions_bruteforce(2, a, 128)


def test_crt_multiplicativity():
    rng = random.Random(41)
    found = 0
    while found < 500:
        s1 = rng.randint(2, 100)
        s2 = rng.randint(2, 10_000 // s1)
        if math.gcd(s1, s2) != 1:
            continue
        found += 1
        s = s1 * s2
        a = rng.randrange(s)
        r = rng.choice([2, 3])
        whole = count_solutions(r, a, s, trial_factorize(s)).count
        part1 = count_solutions(r, a % s1, s1, trial_factorize(s1)).count
        part2 = count_solutions(r, a % s2, s2, trial_factorize(s2)).count
        assert whole == part1 * part2


@pytest.mark.parametrize("r", [2, 3, 4])
def test_unit_bound_small_moduli(r):
    for s in range(1, 300):
        fact = trial_factorize(s)
        vec = counts_vector(r, s, fact)
        units = np.gcd(np.arange(s, dtype=np.int64), s) == 1
        assert int(vec[units].max()) <= 2 * r**fact.omega, (r, s)


def test_bound_sweep_r2_example():
    result = bound_sweep(2, 8)
    assert result.max_ratio == 2.0
    assert (result.witness_a, result.witness_s) == (1, 8)


def test_bound_sweep_r3_stays_small():
    result = bound_sweep(3, 100)
    assert result.max_ratio <= 3.0


def test_bound_sweep_validation():
    with pytest.raises(ValueError):
        bound_sweep(2, 1)


def test_prime_quadratic_residue_count():
    # cyclic group of even order: every QR has exactly two square roots
    for p in (5, 13, 97, 241):
        fact = trial_factorize(p)
        for a in range(1, p):
            c = count_solutions(2, a, p, fact).count
            assert c in (0, 2)
            if c:
                assert c / 2 ** fact.omega == 1.0


def test_per_modulus_maxima_rows():
    rows = list(per_modulus_maxima(2, 8))
    assert rows[-1].s == 8 and rows[-1].a == 1
    assert rows[-1].count == 4 and rows[-1].ratio == 2.0
    assert len(rows) == 8


def test_nonunit_fallback_odd_prime_power():
    fact = trial_factorize(243)
    for a in (0, 3, 9, 81, 162):
        fast = count_solutions(3, a, 243, fact, brute_threshold=8).count
        assert fast == count_solutions_bruteforce(3, a, 243)


def test_counts_vector_threshold_guard():
    with pytest.raises(ValueError, match="threshold"):
        counts_vector(2, 2**21, trial_factorize(2**21), brute_threshold=10**6)
