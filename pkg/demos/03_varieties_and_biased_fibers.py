"""
Multilinear varieties and biased fibers
=======================================

A multilinear variety is the common zero set of multilinear forms, each
acting on a subset of the slots of a product space.  Its density never
falls below p^-codimension, intersections obey an exact counting
inequality, and around any form of noticeable bias one can certify a
variety of front points whose slice biases all stay large.
"""

from fractions import Fraction

from mobiusphase import (
    MultilinearForm,
    MultilinearVariety,
    biased_fiber_variety,
    directional_convolution_positive,
)

# The zero set of the 2x2 inner product inside F_2^2 x F_2^2.
p = 2
dot = MultilinearForm.from_entries(p, (2, 2), [(0, 0, 1), (1, 1, 1)])
v = MultilinearVariety(p, (2, 2), (((0, 1), dot),))
print("points:", v.point_count(), "of", v.ambient_size,
      " density:", v.density())

# One constraint means codimension 1, so the density floor is 1/p.
assert v.density() >= Fraction(1, p) ** v.codimension

# Intersecting with a second variety obeys
# |V n W| * |ambient| >= |V| * |W|  whenever the constraints are
# strictly multilinear (every subset has at least two slots).
first_only = MultilinearForm.from_entries(p, (2, 2), [(0, 0, 1)])
w = MultilinearVariety(p, (2, 2), (((0, 1), first_only),))
inter = v.intersected(w)
print("intersection:", inter.point_count(), "points,",
      "floor", v.point_count() * w.point_count() / v.ambient_size)
assert inter.point_count() * v.ambient_size >= v.point_count() * w.point_count()

# Indicator convolutions along a variety stay positive even after an
# adversary removes a small set of directions.
check = directional_convolution_positive(v)
print("convolution positive:", check.positive,
      " minimum value:", check.min_value)

# Around a biased form, dependent random choice certifies a variety of
# front points whose slices all keep bias >= measured c-tilde.
alpha = MultilinearForm.from_entries(p, (2, 2, 2),
                                     [(0, 0, 0, 1), (1, 1, 1, 1)])
print("bias of alpha:", alpha.bias())
report = biased_fiber_variety(alpha, k=1, c=Fraction(1, 8), seed=3, draws=16)
print("status:", report.status)
print("certified slice bias floor:", report.c_tilde_measured,
      " target floor:", report.target_floor)
for point, bias in report.verification[:4]:
    print("  front point", point, "slice bias", bias)
assert report.c_tilde_measured >= report.target_floor
