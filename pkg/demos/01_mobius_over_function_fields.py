"""
Moebius function and partial sums over F_p[t]
=============================================

Exact arithmetic in F_p[t], the squarefree sign mu, and its partial
sums over the two natural strata: monic polynomials of degree n and
all polynomials of degree below n.
"""

from mobiusphase import mobius, mobius_sum
from mobiusphase.ffpoly import one, variable

# Polynomials are immutable little-endian coefficient tuples.
p = 3
t = variable(p)
f = t * t + one(p)            # t^2 + 1, irreducible over F_3
g = (t + one(p)) * (t + one(p))   # (t + 1)^2, not squarefree

print("f =", f, " mu(f) =", mobius(f))
print("g =", g, " mu(g) =", mobius(g))

# mu is multiplicative with mu(irreducible) = -1, so a product of two
# distinct irreducibles has sign +1.
h = f * (t + one(p))
print("h =", h, " mu(h) =", mobius(h))

# The zeta function of F_p[t] is rational and forces the monic sums
# to collapse: sum over monic degree 1 is -p, every higher degree gives 0.
for n in range(1, 6):
    print(f"sum of mu over monic degree {n}:", mobius_sum(p, n, monic_only=True))

# Over the full box G_n (all polynomials of degree < n) the constants
# contribute p - 1 extra +1 terms, and scaling invariance multiplies the
# monic telescope by p - 1 as well.
for n in range(1, 6):
    print(f"sum of mu over degree < {n}: ", mobius_sum(p, n, monic_only=False))
