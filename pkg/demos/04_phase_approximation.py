"""
Approximating biased phases by simpler ones
===========================================

A multilinear phase with noticeable bias is close in L2 to a short
linear combination of phases whose top multilinear part vanishes, with
an explicit bound on the combination's L1 weight.  Chaining the same
construction through the derived symmetric form approximates a degree-k
polynomial phase by degree-(k-1) phases, and picking the single best
term yields an inverse theorem witness for the uniformity norm.
"""

from fractions import Fraction

from mobiusphase import (
    MultilinearForm,
    PolynomialFn,
    approximate_multilinear_phase,
    approximate_polynomial_phase,
    gowers_inverse_polynomial,
    gowers_norm_exact,
    l2_distance,
    unit_phases,
)
from mobiusphase.forms import product_point_grids
from mobiusphase.phaseapprox import FunctionTable

# chi(alpha) for the 2x2 inner product over F_3, bias 1/9.
p = 3
alpha = MultilinearForm.from_entries(p, (2, 2), [(0, 0, 1), (1, 1, 1)])
print("bias:", alpha.bias())

comb = approximate_multilinear_phase(alpha, eps=0.25, seed=65_537)
print("terms:", comb.m, " exact L1:", comb.exact_l1,
      " measured L1:", round(comb.coefficient_l1, 6))

# Exact L1 control: the weight never exceeds 1/bias, and every term's
# own top multilinear component is identically zero.
assert comb.exact_l1 <= 1 / alpha.bias()
assert all(term.source.multilinear_part().is_zero() for term in comb.terms)

# Recompute the L2 error against the exact phase table.
spaces = alpha.spaces()
grids = product_point_grids(spaces)
table = FunctionTable(spaces, unit_phases(p)[alpha.evaluate_on_grids(grids)])
err = l2_distance(table, comb)
print("measured L2 error:", round(err, 6), " recorded:",
      round(comb.l2_error, 6), " target eps: 0.25")
assert err <= 0.25 + 1e-12

# The same machine one level up: a degree-2 polynomial phase on F_3^2
# becomes a combination of degree-1 phases.
q = PolynomialFn(p, 2, {(2, 0): 1, (1, 1): 1})
poly_comb = approximate_polynomial_phase(q, eps=0.5, seed=1, k=2)
print("degree-1 phases used:", poly_comb.m,
      " max witness degree:",
      max(term.source.degree for term in poly_comb.terms))
assert all(term.source.degree <= 1 for term in poly_comb.terms)

# The uniformity norm of the pure square phase is exactly (1/3)^(1/4),
# and the inverse construction produces a lower-degree witness whose
# correlation is at least 1/(2m).
square = PolynomialFn(3, 1, {(2,): 1})
norm_fourth = gowers_norm_exact(square, 2)
print("U^2 norm fourth power:", norm_fourth)
assert norm_fourth == Fraction(1, 3)

witness, corr = gowers_inverse_polynomial(square, 2, seed=5)
print("witness degree:", witness.degree, " |correlation|:", round(abs(corr), 6))
assert witness.degree <= 1
m_bound = approximate_polynomial_phase(square, 0.5, seed=5, k=2).m
assert abs(corr) >= 1 / (2 * m_bound)
