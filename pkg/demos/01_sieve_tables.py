"""Build the arithmetic-function tables and poke at what they hold.

The sieve produces, for every n up to a limit: the Mobius function mu(n),
the smallest prime factor, the number of distinct prime factors omega(n),
the Euler totient phi(n), and -- for each requested r -- a 0/1 flag that
is 1 exactly when no r-th power of a prime divides n.
"""

import numpy as np

from rfree import build_sieve, factorize, mu_r_direct, zeta

LIMIT = 1_000_000

table = build_sieve(LIMIT, {2, 3})
print(f"built tables up to {LIMIT:,} for r in {table.rs}")

print("\nn, mu, spf, omega, phi, squarefree, cubefree for n = 1..20:")
for n in range(1, 21):
    print(
        f"  {n:3d}  mu={table.mu[n]:+d}  spf={table.spf[n]:2d}  "
        f"omega={table.omega[n]}  phi={table.phi[n]:2d}  "
        f"sf={table.mu_r[2][n]}  cf={table.mu_r[3][n]}"
    )

# the flag table agrees with the literal divisor-sum definition
for n in (360, 1024, 999_983):
    assert int(table.mu_r[2][n]) == mu_r_direct(n, 2)
print("\nflag table agrees with the direct Mobius divisor sum on spot checks")

# factorizations come straight off the smallest-prime-factor chain
for n in (9_699_690 // 11, 2**19, 999_983):
    fact = factorize(table, n)
    pretty = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in fact.factors)
    print(f"  {n} = {pretty}")

# squarefree density drifts toward 1/zeta(2) = 6/pi^2 = 0.6079...
counts = np.cumsum(table.mu_r[2][1:])
for exp in range(2, 7):
    x = 10**exp
    print(f"  squarefree density at 1e{exp}: {counts[x - 1] / x:.6f}")
print(f"  1/zeta(2)              : {1 / zeta(2, 1e-12):.6f}")
