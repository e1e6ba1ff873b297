"""
Exact bias of multilinear forms
===============================

The bias of a multilinear form alpha is the density of argument tuples
on which alpha vanishes, shifted and rescaled so that the zero form has
bias 1 and a generic form has bias near 0.  Everything here is an exact
Fraction obtained by counting, never a float.
"""

from fractions import Fraction

from mobiusphase import MultilinearForm, rank_mod_p, rearrangement_sums

# alpha(x, y) = x . y on F_2^3 x F_2^3, the full-rank inner product.
p = 2
alpha = MultilinearForm.from_entries(p, (3, 3),
                                     [(0, 0, 1), (1, 1, 1), (2, 2, 1)])
print("bias of rank-3 inner product:", alpha.bias())

# Dropping diagonal entries lowers the rank and raises the bias by
# exactly a factor p per dropped dimension.
for r in range(3, 0, -1):
    entries = [(i, i, 1) for i in range(r)]
    beta = MultilinearForm.from_entries(p, (3, 3), entries)
    matrix = [[beta.evaluate([[int(i == a) for a in range(3)],
                              [int(j == b) for b in range(3)]])
               for j in range(3)] for i in range(3)]
    print(f"rank {rank_mod_p(matrix, p)} bias:", beta.bias())

# Bias is supermultiplicative under slot restriction: restricting y to a
# subspace can only concentrate the zero set.  Each slot gets a basis
# matrix; the identity keeps the slot as is.
identity = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
sub = [(1, 0, 0), (0, 1, 0)]             # a 2-dimensional subspace basis
restricted = alpha.restricted([identity, sub])
print("restricted bias:", restricted.bias(), ">= original", alpha.bias())
assert restricted.bias() >= alpha.bias()

# The rearrangement inequality behind the counting arguments: summing
# (x_j + y_j)^2 with aligned sorted lists strictly beats any pairing
# that moves an x-value.  Both lists must be nondecreasing and equal
# y-values must pair with equal x-values.
xs, ys = (0, 0, 1, 2), (1, 1, 2, 3)
sigma = (2, 0, 3, 1)
aligned, permuted = rearrangement_sums(xs, ys, sigma)
print(f"sum (x_j + y_j)^2 = {aligned}  vs  permuted = {permuted}")
assert aligned > permuted

# Joining two forms on disjoint coordinate blocks multiplies the biases
# exactly: the rank-4 inner product is the join of rank 1 and rank 3.
gamma = MultilinearForm.from_entries(p, (1, 1), [(0, 0, 1)])
join = MultilinearForm.from_entries(p, (4, 4),
                                    [(i, i, 1) for i in range(4)])
print("bias join =", join.bias(), "= product", gamma.bias() * alpha.bias())
assert join.bias() == gamma.bias() * alpha.bias() == Fraction(1, 16)
