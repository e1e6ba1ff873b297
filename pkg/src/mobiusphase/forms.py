"""Multilinear and multiaffine forms over products of F_p vector spaces.

A k-linear form on V_1 x ... x V_k (V_i = F_p^{dims[i]}) is stored as a dense
integer coefficient tensor of shape dims, entries reduced mod p.  The bias of
a form is the averaged additive character of its values; it is computed
exactly as a rational number by counting the kernel of the last-slot linear
map, with a full character-sum oracle kept alongside as the only floating
path.

The module also provides polynomial functions F_p^n -> F_p, the normalized
k-fold finite-difference form of a degree-k polynomial, restriction of forms
to subspaces, slot permutation, multiaffine forms (one multilinear component
per slot subset), and forms composed with polynomial multiplication maps.
"""

import itertools
import math
import string
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .budget import check_budget
from .ffpoly import PolyFp, _is_prime


@lru_cache(maxsize=None)
def space_points(p: int, dim: int) -> np.ndarray:
    """All points of F_p^dim, shape (p**dim, dim); coordinate 0 varies fastest."""
    n = p**dim
    idx = np.arange(n)
    pts = np.empty((n, dim), dtype=np.int64)
    for j in range(dim):
        pts[:, j] = (idx // p**j) % p
    pts.setflags(write=False)
    return pts


@lru_cache(maxsize=None)
def unit_phases(p: int) -> np.ndarray:
    """The p-th roots of unity exp(2*pi*i*a/p) for a = 0..p-1."""
    roots = np.exp(2j * np.pi * np.arange(p) / p)
    roots.setflags(write=False)
    return roots


class FiniteSpace:
    """F_p^dim with a fixed point enumeration."""

    __slots__ = ("p", "dim")

    def __init__(self, p: int, dim: int):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if dim < 0:
            raise ValueError("dim must be nonnegative")
        self.p = p
        self.dim = dim

    @property
    def size(self) -> int:
        return self.p**self.dim

    def points(self, budget: int | None = None) -> np.ndarray:
        check_budget(self.size, budget, what=f"enumeration of F_{self.p}^{self.dim}")
        return space_points(self.p, self.dim)

    def index_of(self, point) -> int:
        return int(sum(int(c) % self.p * self.p**j for j, c in enumerate(point)))

    def __eq__(self, other):
        return isinstance(other, FiniteSpace) and (self.p, self.dim) == (other.p, other.dim)

    def __hash__(self):
        return hash((self.p, self.dim))

    def __repr__(self):
        return f"FiniteSpace({self.p}, {self.dim})"


def product_size(spaces) -> int:
    out = 1
    for s in spaces:
        out *= s.size
    return out


def product_point_grids(spaces, budget: int | None = None) -> list[np.ndarray]:
    """Per-slot coordinate arrays of the full product enumeration.

    Returns one array of shape (N, dim_i) per slot, where N is the product of
    the slot sizes and slot 0 varies fastest.
    """
    total = product_size(spaces)
    check_budget(total, budget, what="product enumeration")
    grids = []
    stride = 1
    flat = np.arange(total)
    for sp in spaces:
        idx = (flat // stride) % sp.size
        grids.append(space_points(sp.p, sp.dim)[idx])
        stride *= sp.size
    return grids


_LETTERS = string.ascii_lowercase
_BIG = string.ascii_uppercase


def _grid_contract(tensor: np.ndarray, grids: list[np.ndarray], p: int) -> np.ndarray:
    """Contract leading tensor axes with point arrays, mod p.

    grids[i] has shape (N, d_i) and is matched against tensor axis i; the
    result keeps one shared row axis N followed by the uncontracted axes.
    """
    k = len(grids)
    subs_t = _LETTERS[: tensor.ndim]
    operands = [tensor]
    subs = [subs_t]
    for i in range(k):
        operands.append(grids[i])
        subs.append("Z" + subs_t[i])
    out = "Z" + subs_t[k:]
    expr = ",".join(subs) + "->" + out
    return np.einsum(expr, *operands, optimize=True) % p


class MultilinearForm:
    """A k-linear form given by its dense coefficient tensor mod p."""

    __slots__ = ("p", "dims", "tensor")

    def __init__(self, p: int, dims, tensor):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        dims = tuple(int(d) for d in dims)
        arr = np.asarray(tensor, dtype=np.int64) % p
        if arr.shape != dims:
            raise ValueError(f"tensor shape {arr.shape} does not match dims {dims}")
        self.p = p
        self.dims = dims
        self.tensor = arr

    @classmethod
    def zero(cls, p: int, dims) -> "MultilinearForm":
        return cls(p, dims, np.zeros(tuple(dims), dtype=np.int64))

    @classmethod
    def from_entries(cls, p: int, dims, entries) -> "MultilinearForm":
        arr = np.zeros(tuple(dims), dtype=np.int64)
        for *idx, c in entries:
            if len(idx) != len(arr.shape):
                raise ValueError(f"entry {tuple(idx) + (c,)} has {len(idx)} "
                                 f"indices, expected {len(arr.shape)}")
            arr[tuple(idx)] = c % p
        return cls(p, dims, arr)

    @property
    def k(self) -> int:
        return len(self.dims)

    def spaces(self) -> list[FiniteSpace]:
        return [FiniteSpace(self.p, d) for d in self.dims]

    def is_zero(self) -> bool:
        return not self.tensor.any()

    def evaluate(self, vectors) -> int:
        """Value at one point, given one coordinate vector per slot."""
        if len(vectors) != self.k:
            raise ValueError(f"expected {self.k} vectors, got {len(vectors)}")
        cur = self.tensor
        for v in reversed(vectors):
            cur = cur @ (np.asarray(v, dtype=np.int64) % self.p)
            cur %= self.p
        return int(cur)

    def evaluate_on_grids(self, grids) -> np.ndarray:
        """Values on a shared row enumeration, one (N, d_i) array per slot."""
        if self.k == 0:
            n = len(grids[0]) if grids else 1
            return np.full(n, int(self.tensor) % self.p, dtype=np.int64)
        return _grid_contract(self.tensor, list(grids), self.p)

    def last_slot_values(self, budget: int | None = None) -> np.ndarray:
        """Matrix of the last-slot linear map over all prefix points.

        Row x of the result is the coefficient vector of the linear functional
        y -> form(x_1, ..., x_{k-1}, y) on V_k, for the prefix enumeration with
        slot 0 fastest.
        """
        if self.k == 0:
            raise ValueError("no slots")
        prefix = self.spaces()[:-1]
        check_budget(product_size(prefix), budget, what="bias kernel count")
        grids = product_point_grids(prefix, budget=None) if prefix else []
        if not grids:
            return self.tensor.reshape(1, self.dims[-1])
        return _grid_contract(self.tensor, grids, self.p).reshape(-1, self.dims[-1])

    def bias(self, budget: int | None = None) -> Fraction:
        """Exact bias: the density of prefix points killing the last slot.

        The averaged character of a k-linear form equals the proportion of
        (k-1)-tuples whose induced linear functional on the last slot is
        identically zero; that count is exact integer arithmetic.
        """
        vals = self.last_slot_values(budget)
        zero_rows = int(np.count_nonzero(~vals.any(axis=1)))
        return Fraction(zero_rows, vals.shape[0])

    def bias_oracle(self, budget: int | None = None) -> complex:
        """Floating character-sum bias: mean of exp(2*pi*i*value/p) over all points."""
        spaces = self.spaces()
        check_budget(product_size(spaces), budget, what="full character sum")
        grids = product_point_grids(spaces, budget=None)
        vals = self.evaluate_on_grids(grids)
        return complex(unit_phases(self.p)[vals].mean())

    def _check_compatible(self, other: "MultilinearForm") -> None:
        if not isinstance(other, MultilinearForm):
            raise TypeError(f"expected a MultilinearForm, got {type(other).__name__}")
        if self.p != other.p or self.dims != other.dims:
            raise ValueError(
                f"incompatible forms: p={self.p} dims={self.dims} vs "
                f"p={other.p} dims={other.dims}"
            )

    def __add__(self, other: "MultilinearForm") -> "MultilinearForm":
        self._check_compatible(other)
        return MultilinearForm(self.p, self.dims, self.tensor + other.tensor)

    def __sub__(self, other: "MultilinearForm") -> "MultilinearForm":
        self._check_compatible(other)
        return MultilinearForm(self.p, self.dims, self.tensor - other.tensor)

    def __neg__(self) -> "MultilinearForm":
        return MultilinearForm(self.p, self.dims, -self.tensor)

    def scaled(self, c: int) -> "MultilinearForm":
        return MultilinearForm(self.p, self.dims, self.tensor * (c % self.p))

    def permuted(self, sigma) -> "MultilinearForm":
        """The form (x_1, ..., x_k) -> self(x_{sigma[0]+1...}), sigma 0-based.

        Slot m of the result is fed to slot position sigma[m] of self, so the
        result's slot m carries the space self.dims[...] compatible with that
        routing; dims must match accordingly.
        """
        sigma = tuple(sigma)
        if sorted(sigma) != list(range(self.k)):
            raise ValueError(f"not a permutation of 0..{self.k - 1}: {sigma}")
        axes = tuple(int(a) for a in np.argsort(sigma))
        return MultilinearForm(self.p, tuple(self.dims[a] for a in axes),
                               np.transpose(self.tensor, axes))

    def restricted(self, bases) -> "MultilinearForm":
        """Restrict to per-slot subspaces, re-expressed in the given bases.

        bases[i] is an (r_i, dims[i]) integer matrix whose rows are linearly
        independent mod p; the result is the r-dimensional form with tensor
        entries self(rows...).
        """
        if len(bases) != self.k:
            raise ValueError(f"expected {self.k} basis matrices")
        mats = []
        for i, b in enumerate(bases):
            m = np.asarray(b, dtype=np.int64) % self.p
            if m.ndim != 2 or m.shape[1] != self.dims[i]:
                raise ValueError(f"basis {i} must be (r, {self.dims[i]}), got {m.shape}")
            if rank_mod_p(m, self.p) != m.shape[0]:
                raise ValueError(f"basis {i} rows are dependent mod {self.p}")
            mats.append(m)
        cur = self.tensor
        for m in mats:
            cur = np.tensordot(cur, m.T, axes=([0], [0])) % self.p
        return MultilinearForm(self.p, tuple(m.shape[0] for m in mats), cur)

    def __eq__(self, other):
        return (
            isinstance(other, MultilinearForm)
            and self.p == other.p
            and self.dims == other.dims
            and np.array_equal(self.tensor, other.tensor)
        )

    def __repr__(self):
        return f"MultilinearForm(p={self.p}, dims={self.dims})"


def rank_mod_p(mat: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    m = (np.array(mat, dtype=np.int64) % p).copy()
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, col]), -1, p)) % p
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] = (m[r] - m[r, col] * m[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


class MultiaffineForm:
    """A sum of one multilinear component per slot subset.

    components maps a frozenset of 0-based slot indices I to a multilinear
    form on the slots of I (the empty set gives a constant, stored as a
    0-slot form).  The value at x is the sum of the component values at the
    corresponding sub-tuples.
    """

    __slots__ = ("p", "dims", "components")

    def __init__(self, p: int, dims, components: dict):
        self.p = p
        self.dims = tuple(int(d) for d in dims)
        comps = {}
        for subset, form in components.items():
            subset = frozenset(int(i) for i in subset)
            if subset and (min(subset) < 0 or max(subset) >= len(self.dims)):
                raise ValueError(f"subset {sorted(subset)} out of range")
            expected = tuple(self.dims[i] for i in sorted(subset))
            if form.p != p or form.dims != expected:
                raise ValueError(f"component on {sorted(subset)} has wrong shape")
            if not form.is_zero():
                comps[subset] = form
        self.components = comps

    @property
    def k(self) -> int:
        return len(self.dims)

    def spaces(self) -> list[FiniteSpace]:
        return [FiniteSpace(self.p, d) for d in self.dims]

    def evaluate(self, vectors) -> int:
        if len(vectors) != self.k:
            raise ValueError(f"expected {self.k} vectors")
        total = 0
        for subset, form in self.components.items():
            total += form.evaluate([vectors[i] for i in sorted(subset)])
        return total % self.p

    def evaluate_on_grids(self, grids) -> np.ndarray:
        n = len(grids[0]) if grids else 1
        total = np.zeros(n, dtype=np.int64)
        for subset, form in self.components.items():
            total += form.evaluate_on_grids([grids[i] for i in sorted(subset)])
        return total % self.p

    def full_component(self) -> MultilinearForm:
        """The stored top component (the one on all k slots)."""
        return self.components.get(frozenset(range(self.k)),
                                   MultilinearForm.zero(self.p, self.dims))

    def multilinear_part(self) -> MultilinearForm:
        """Top multilinear component recovered by alternating differences.

        Computed from values only: the alternating sum over subsets I of the
        value at (d on I, 0 off I), taken at basis-vector tuples d, recovers
        the coefficient tensor of the top component independently of how the
        form was assembled.
        """
        k = self.k
        tensor = np.zeros(self.dims, dtype=np.int64)
        basis = [np.eye(d, dtype=np.int64) for d in self.dims]
        zeros = [np.zeros(d, dtype=np.int64) for d in self.dims]
        for idx in itertools.product(*(range(d) for d in self.dims)):
            total = 0
            for r in range(k + 1):
                for subset in itertools.combinations(range(k), r):
                    args = [basis[i][idx[i]] if i in subset else zeros[i] for i in range(k)]
                    sign = -1 if (k - r) % 2 else 1
                    total += sign * self.evaluate(args)
            tensor[idx] = total % self.p
        return MultilinearForm(self.p, self.dims, tensor)

    def has_vanishing_multilinear_part(self) -> bool:
        return self.full_component().is_zero()

    def shifted_argument(self, offsets) -> "MultiaffineForm":
        """The form x -> self(x_1 + offsets[0], ..., x_k + offsets[k-1])."""
        offs = [np.asarray(o, dtype=np.int64) % self.p for o in offsets]
        out: dict[frozenset, np.ndarray] = {}
        for subset, form in self.components.items():
            slots = sorted(subset)
            for keep in _subsets(slots):
                partial = _contract_complement(form, slots, keep, offs)
                key = frozenset(keep)
                if key in out:
                    out[key] = (out[key] + partial) % self.p
                else:
                    out[key] = partial
        comps = {
            key: MultilinearForm(self.p, tuple(self.dims[i] for i in sorted(key)), arr)
            for key, arr in out.items()
        }
        return MultiaffineForm(self.p, self.dims, comps)

    def __eq__(self, other):
        if not isinstance(other, MultiaffineForm):
            return NotImplemented
        return (self.p, self.dims) == (other.p, other.dims) and self.components == other.components

    def __repr__(self):
        subs = sorted(tuple(sorted(s)) for s in self.components)
        return f"MultiaffineForm(p={self.p}, dims={self.dims}, subsets={subs})"


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _contract_complement(form: MultilinearForm, slots, keep, offsets) -> np.ndarray:
    """Tensor of form with slots outside `keep` evaluated at the offsets."""
    cur = form.tensor
    pos_of = {s: i for i, s in enumerate(slots)}
    for s in reversed(slots):
        axis = pos_of[s]
        if s in keep:
            continue
        cur = np.tensordot(cur, offsets[s], axes=([axis], [0])) % form.p
    return cur % form.p


class PolynomialFn:
    """A polynomial function F_p^n -> F_p, stored as exponent-tuple -> coefficient.

    Exponents are reduced below p per variable (x^p = x as a function), and
    zero-coefficient terms are dropped, so equal functions built from reduced
    representatives compare equal.
    """

    __slots__ = ("p", "n", "terms")

    def __init__(self, p: int, n: int, terms: dict):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p
        self.n = n
        reduced: dict[tuple[int, ...], int] = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps}")
            exps = tuple(e if e < p else ((e - 1) % (p - 1)) + 1 for e in exps)
            c = int(c) % p
            if c:
                reduced[exps] = (reduced.get(exps, 0) + c) % p
        self.terms = {e: c for e, c in reduced.items() if c}

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point) -> int:
        pt = [int(x) % self.p for x in point]
        total = 0
        for exps, c in self.terms.items():
            v = c
            for x, e in zip(pt, exps):
                if e:
                    v = v * pow(x, e, self.p)
            total += v
        return total % self.p

    def evaluate_table(self, budget: int | None = None) -> np.ndarray:
        """Values over all of F_p^n in point-enumeration order."""
        space = FiniteSpace(self.p, self.n)
        pts = space.points(budget)
        powers = np.array([[pow(r, e, self.p) for e in range(self.p)] for r in range(self.p)],
                          dtype=np.int64)
        out = np.zeros(len(pts), dtype=np.int64)
        for exps, c in self.terms.items():
            term = np.full(len(pts), c, dtype=np.int64)
            for i, e in enumerate(exps):
                if e:
                    term = term * powers[pts[:, i], e] % self.p
            out += term
        return out % self.p

    def homogeneous_part(self, d: int) -> "PolynomialFn":
        return PolynomialFn(self.p, self.n, {e: c for e, c in self.terms.items() if sum(e) == d})

    def lower_part(self, d: int) -> "PolynomialFn":
        """Terms of total degree strictly below d."""
        return PolynomialFn(self.p, self.n, {e: c for e, c in self.terms.items() if sum(e) < d})

    def __add__(self, other: "PolynomialFn") -> "PolynomialFn":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return PolynomialFn(self.p, self.n, out)

    def __sub__(self, other: "PolynomialFn") -> "PolynomialFn":
        return self + other.scaled(-1)

    def scaled(self, c: int) -> "PolynomialFn":
        return PolynomialFn(self.p, self.n, {e: v * c for e, v in self.terms.items()})

    def _check(self, other):
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("mixed polynomial domains")

    def __eq__(self, other):
        if not isinstance(other, PolynomialFn):
            return NotImplemented
        return (self.p, self.n, self.terms) == (other.p, other.n, other.terms)

    def __hash__(self):
        return hash((self.p, self.n, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"PolynomialFn(p={self.p}, n={self.n}, terms={self.terms})"


def derived_symmetric_form(q: PolynomialFn, k: int) -> MultilinearForm:
    """The normalized k-fold difference form of a degree-k polynomial.

    Entry (i_1, ..., i_k) is (k!)^{-1} times the alternating sum over subsets
    S of {1..k} of q evaluated at the sum of the chosen basis vectors; this
    needs k < p, is symmetric, is independent of the basepoint, and its
    diagonal reproduces the degree-k homogeneous part of q.
    """
    p, n = q.p, q.n
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= p:
        raise ValueError(f"need k < p, got k = {k}, p = {p}")
    if q.degree > k:
        raise ValueError(f"polynomial degree {q.degree} exceeds k = {k}")
    inv_fact = pow(math.factorial(k), -1, p)
    tensor = np.zeros((n,) * k, dtype=np.int64)
    for idx in itertools.product(range(n), repeat=k):
        total = 0
        for r in range(k + 1):
            sign = -1 if (k - r) % 2 else 1
            for subset in itertools.combinations(range(k), r):
                point = [0] * n
                for j in subset:
                    point[idx[j]] += 1
                total += sign * q.evaluate(point)
        tensor[idx] = inv_fact * total % p
    return MultilinearForm(p, (n,) * k, tensor)


def multiplication_matrix(a: PolyFp, out_dim: int, in_dim: int) -> np.ndarray:
    """Matrix of y -> a*y from degree-< in_dim to degree-< out_dim polynomials."""
    if a.degree + in_dim > out_dim:
        raise ValueError(
            f"product of deg {a.degree} and deg < {in_dim} does not fit in deg < {out_dim}"
        )
    mat = np.zeros((out_dim, in_dim), dtype=np.int64)
    for j in range(in_dim):
        prod = a.shifted(j)
        for i in range(out_dim):
            mat[i, j] = prod.coeff(i)
    return mat


def symmetrized_multiplication_form(form: MultilinearForm, a_polys, m: int, n: int) -> MultilinearForm:
    """Sum over permutations pi of form(a_1 * x_{pi(1)}, ..., a_k * x_{pi(k)}).

    form is k-linear on (G_n)^k in the monomial coordinate basis, the a_i
    have degree < m, and the result is k-linear on (G_{n-m})^k.  Realized by
    contracting with precomputed multiplication matrices, then symmetrizing.
    """
    k = form.k
    if form.dims != (n,) * k:
        raise ValueError(f"form dims {form.dims} do not match n = {n}")
    if len(a_polys) != k:
        raise ValueError(f"expected {k} multiplier polynomials")
    for a in a_polys:
        if a.degree >= m:
            raise ValueError(f"multiplier degree {a.degree} not below m = {m}")
    mats = [multiplication_matrix(a, n, n - m) for a in a_polys]
    cur = form.tensor
    for mat in mats:
        cur = np.tensordot(cur, mat, axes=([0], [0])) % form.p
    base = MultilinearForm(form.p, (n - m,) * k, cur)
    total = MultilinearForm.zero(form.p, (n - m,) * k)
    for pi in itertools.permutations(range(k)):
        total = total + base.permuted(pi)
    return total


def big_symmetrized_form(form: MultilinearForm, m: int, n: int) -> MultilinearForm:
    """The 2k-slot form alpha(a_1..a_k, x_1..x_k) = sum_pi form(a_1 x_{pi(1)}, ...).

    Multiplier slots carry coefficient vectors of degree-< m polynomials and
    the x slots degree-< (n-m) polynomials; multiplication enters through the
    structure tensor [u + v == i] of monomial products.
    """
    k = form.k
    if form.dims != (n,) * k:
        raise ValueError(f"form dims {form.dims} do not match n = {n}")
    struct = np.zeros((n, m, n - m), dtype=np.int64)
    for u in range(m):
        for v in range(n - m):
            struct[u + v, u, v] = 1
    subs_t = _LETTERS[:k]
    operands = [form.tensor]
    subs = [subs_t]
    out_u = ""
    out_v = ""
    for i in range(k):
        operands.append(struct)
        u = _BIG[i]
        v = _BIG[k + i]
        subs.append(subs_t[i] + u + v)
        out_u += u
        out_v += v
    expr = ",".join(subs) + "->" + out_u + out_v
    t0 = np.einsum(expr, *operands, optimize=True) % form.p
    base = MultilinearForm(form.p, (m,) * k + (n - m,) * k, t0)
    total = MultilinearForm.zero(form.p, (m,) * k + (n - m,) * k)
    for pi in itertools.permutations(range(k)):
        sigma = tuple(range(k)) + tuple(k + j for j in pi)
        total = total + base.permuted(sigma)
    return total


def slice_big_form(big: MultilinearForm, a_polys, m: int) -> MultilinearForm:
    """Fix the k multiplier slots of a big symmetrized form at given polynomials."""
    k = len(a_polys)
    if big.k != 2 * k:
        raise ValueError(f"form has {big.k} slots, expected {2 * k}")
    cur = big.tensor
    for a in a_polys:
        vec = np.array(a.coeff_vector(m), dtype=np.int64)
        cur = np.tensordot(cur, vec, axes=([0], [0])) % big.p
    return MultilinearForm(big.p, big.dims[k:], cur)


class RearrangementPreconditionError(ValueError):
    """Violated hypothesis of the strict rearrangement comparison."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


def rearrangement_sums(xs, ys, sigma) -> tuple[int, int]:
    """Aligned and permuted sums of squares for the strict rearrangement comparison.

    Requires xs and ys nondecreasing, equal y-values only at positions with
    equal x-values, and sigma moving at least one x-value; under these the
    aligned sum sum (x_j + y_j)^2 strictly exceeds sum (x_j + y_{sigma(j)})^2.
    """
    xs = list(xs)
    ys = list(ys)
    sigma = list(sigma)
    if len(xs) != len(ys) or len(xs) != len(sigma):
        raise ValueError("xs, ys, sigma must have equal length")
    if sorted(sigma) != list(range(len(xs))):
        raise ValueError(f"sigma is not a permutation: {sigma}")
    if any(xs[i] > xs[i + 1] for i in range(len(xs) - 1)):
        raise RearrangementPreconditionError("unsorted", "xs must be nondecreasing")
    if any(ys[i] > ys[i + 1] for i in range(len(ys) - 1)):
        raise RearrangementPreconditionError("unsorted", "ys must be nondecreasing")
    for i in range(len(xs)):
        for j in range(len(xs)):
            if ys[i] == ys[j] and xs[i] != xs[j]:
                raise RearrangementPreconditionError(
                    "pairing", f"y[{i}] == y[{j}] but x[{i}] != x[{j}]"
                )
    if all(xs[sigma[j]] == xs[j] for j in range(len(xs))):
        raise RearrangementPreconditionError("fixes-x", "sigma moves no x-value")
    aligned = sum((x + y) ** 2 for x, y in zip(xs, ys))
    permuted = sum((xs[j] + ys[sigma[j]]) ** 2 for j in range(len(xs)))
    return aligned, permuted


def rearrangement_dominates(xs, ys, sigma) -> bool:
    """Whether the aligned squared sum strictly dominates the permuted one."""
    aligned, permuted = rearrangement_sums(xs, ys, sigma)
    return aligned > permuted
