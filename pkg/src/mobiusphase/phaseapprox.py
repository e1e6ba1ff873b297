"""Constructive approximation of biased phases by lower-order phases.

The main routine rewrites the character of a biased multilinear form as a
short positive combination of characters of multiaffine forms whose top
multilinear component vanishes; the polynomial wrapper turns that into an
approximation of a degree-k polynomial phase by degree-(k-1) phases, which
in turn yields an inverse theorem for uniformity norms of polynomial
phases.  Sampling is seeded and all certified quantities are re-measured
on full tables before returning.
"""

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .budget import HypothesisError, check_budget
from .forms import (
    FiniteSpace,
    MultiaffineForm,
    MultilinearForm,
    PolynomialFn,
    derived_symmetric_form,
    product_point_grids,
    product_size,
    space_points,
    unit_phases,
)
from .varieties import MultilinearVariety, add_index_table, external_approximation

PhaseSource = Union[MultiaffineForm, PolynomialFn]


# ------------------------------------------------------------ tables

class FunctionTable:
    """Complex values over a product of F_p coordinate spaces.

    Values are stored flat in the product-grid order (slot 0 fastest);
    norms use the uniform probability measure.
    """

    def __init__(self, spaces: Sequence[FiniteSpace], values):
        self.spaces = tuple(spaces)
        self.values = np.asarray(values, dtype=complex)
        if self.values.shape != (product_size(self.spaces),):
            raise ValueError(
                f"expected {product_size(self.spaces)} values, got {self.values.shape}")

    @classmethod
    def from_form(cls, form: MultilinearForm, budget: Optional[int] = None):
        spaces = form.spaces()
        check_budget(product_size(spaces), budget, what="phase table")
        grids = product_point_grids(spaces, budget=None)
        return cls(spaces, unit_phases(form.p)[form.evaluate_on_grids(grids)])

    @classmethod
    def from_multiaffine(cls, form: MultiaffineForm, budget: Optional[int] = None):
        spaces = form.spaces()
        check_budget(product_size(spaces), budget, what="phase table")
        grids = product_point_grids(spaces, budget=None)
        return cls(spaces, unit_phases(form.p)[form.evaluate_on_grids(grids)])

    @classmethod
    def from_polynomial(cls, q: PolynomialFn, budget: Optional[int] = None):
        check_budget(q.p**q.n, budget, what="phase table")
        return cls([FiniteSpace(q.p, q.n)], unit_phases(q.p)[q.evaluate_table()])

    def l2_norm(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.values) ** 2)))

    def _check_domain(self, other: "FunctionTable"):
        if self.spaces != other.spaces:
            raise ValueError(f"domain mismatch: {self.spaces} vs {other.spaces}")

    def distance(self, other: "FunctionTable") -> float:
        self._check_domain(other)
        return float(np.sqrt(np.mean(np.abs(self.values - other.values) ** 2)))


# ------------------------------------------------------ combinations

@dataclass(frozen=True)
class PhaseTerm:
    coefficient: complex
    source: PhaseSource

    @property
    def kind(self) -> str:
        return "poly" if isinstance(self.source, PolynomialFn) else "multiaffine"


@dataclass
class PhaseCombination:
    terms: tuple[PhaseTerm, ...]
    l2_error: float
    exact_l1: Optional[Fraction] = None

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def coefficient_l1(self) -> float:
        return float(sum(abs(t.coefficient) for t in self.terms))


def combination_table(comb: PhaseCombination, spaces: Sequence[FiniteSpace],
                      budget: Optional[int] = None) -> FunctionTable:
    """Pointwise values of the combination on the given domain."""
    spaces = tuple(spaces)
    n = product_size(spaces)
    check_budget(n, budget, what="combination table")
    values = np.zeros(n, dtype=complex)
    if not comb.terms:
        return FunctionTable(spaces, values)
    p = spaces[0].p
    phases = unit_phases(p)
    grids = product_point_grids(spaces, budget=None)
    pts = space_points(p, spaces[0].dim) if len(spaces) == 1 else None
    for term in comb.terms:
        if isinstance(term.source, PolynomialFn):
            if len(spaces) != 1 or term.source.n != spaces[0].dim or term.source.p != p:
                raise ValueError("polynomial term does not match the domain")
            vals = term.source.evaluate_table()
        else:
            if term.source.dims != tuple(s.dim for s in spaces) or term.source.p != p:
                raise ValueError("multiaffine term does not match the domain")
            vals = term.source.evaluate_on_grids(grids)
        values += term.coefficient * phases[vals]
    return FunctionTable(spaces, values)


def l2_distance(f: FunctionTable, approx, budget: Optional[int] = None) -> float:
    """Uniform-measure L2 distance from a table to a combination or table."""
    if isinstance(approx, FunctionTable):
        return f.distance(approx)
    return f.distance(combination_table(approx, f.spaces, budget))


# ----------------------------------------------- kernel and translates

def last_slot_forms(alpha: MultilinearForm) -> list[MultilinearForm]:
    """Coordinate forms of the last-slot map: x -> alpha(x, e_j), one per j."""
    if alpha.k < 2:
        raise ValueError("need at least two slots")
    return [MultilinearForm(alpha.p, alpha.dims[:-1], alpha.tensor[..., j])
            for j in range(alpha.dims[-1])]


def kernel_variety(alpha: MultilinearForm) -> MultilinearVariety:
    """Zero set of the last-slot map as a strictly-multilinear variety."""
    coords = last_slot_forms(alpha)
    subset = tuple(range(alpha.k - 1))
    return MultilinearVariety(alpha.p, alpha.dims[:-1],
                              [(subset, f) for f in coords])


def _contract_at(tensor: np.ndarray, p: int, positions, vectors) -> np.ndarray:
    """Contract the given axis positions with vectors, highest axis first."""
    pairs = sorted(zip(positions, vectors), reverse=True)
    for axis, vec in pairs:
        tensor = np.tensordot(tensor, np.asarray(vec, dtype=np.int64) % p,
                              axes=([axis], [0]))
    return tensor % p


def translate_map(alpha: MultilinearForm, t_vecs) -> list[MultiaffineForm]:
    """Per-coordinate multiaffine substitutes for the last-slot map at t.

    Coordinate j is the alternating sum over proper prefix subsets I of
    alpha(x_I, t off I, e_j); its top multilinear part vanishes because the
    full subset is excluded, yet it agrees with the last-slot map on the
    translate of the kernel by t.
    """
    p, k = alpha.p, alpha.k
    if len(t_vecs) != k - 1:
        raise ValueError(f"expected {k - 1} translate vectors")
    out = []
    for j in range(alpha.dims[-1]):
        base = alpha.tensor[..., j]
        comps: dict[frozenset, MultilinearForm] = {}
        for r in range(k - 1):
            for subset in itertools.combinations(range(k - 1), r):
                sign = (-1) ** (k - r) % p
                rest = [i for i in range(k - 1) if i not in subset]
                tensor = _contract_at(base, p, rest, [t_vecs[i] for i in rest])
                form = MultilinearForm(p, tuple(alpha.dims[i] for i in subset),
                                       sign * tensor % p)
                if not form.is_zero():
                    comps[frozenset(subset)] = form
        out.append(MultiaffineForm(p, alpha.dims[:-1], comps))
    return out


def phase_form(alpha: MultilinearForm, t_vecs, tau, beta_forms) -> MultiaffineForm:
    """One approximation phase: tau.beta(x - t) plus the translate map paired
    with the last slot.  The result is multiaffine on all k slots with
    vanishing top multilinear component."""
    p, k, dims = alpha.p, alpha.k, alpha.dims
    comps: dict[frozenset, MultilinearForm] = {}

    gamma_tensor = np.zeros(dims[:-1], dtype=np.int64)
    for t_coef, bf in zip(tau, beta_forms):
        gamma_tensor = (gamma_tensor + int(t_coef) * bf.tensor) % p
    gamma = MultilinearForm(p, dims[:-1], gamma_tensor)
    if not gamma.is_zero():
        neg_t = [(-np.asarray(v, dtype=np.int64)) % p for v in t_vecs]
        shifted = MultiaffineForm(p, dims[:-1],
                                  {frozenset(range(k - 1)): gamma}).shifted_argument(neg_t)
        for subset, form in shifted.components.items():
            comps[subset] = form

    for r in range(k - 1):
        for subset in itertools.combinations(range(k - 1), r):
            sign = (-1) ** (k - r) % p
            rest = [i for i in range(k - 1) if i not in subset]
            tensor = _contract_at(alpha.tensor, p, rest, [t_vecs[i] for i in rest])
            form = MultilinearForm(p, tuple(dims[i] for i in subset) + (dims[-1],),
                                   sign * tensor % p)
            if form.is_zero():
                continue
            key = frozenset(subset) | {k - 1}
            if key in comps:
                comps[key] = comps[key] + form
            else:
                comps[key] = form
    return MultiaffineForm(p, dims, comps)


# ------------------------------------------- multilinear approximation

def _coset_groups(coord_vals: np.ndarray) -> list[np.ndarray]:
    """Group prefix point indices by their last-slot map value."""
    order = {}
    for i, row in enumerate(map(tuple, coord_vals)):
        order.setdefault(row, []).append(i)
    return [np.array(order[key]) for key in sorted(order)]


def approximate_multilinear_phase(alpha: MultilinearForm, eps: float, seed: int,
                                  budget: Optional[int] = None,
                                  draws_per_level: int = 50) -> PhaseCombination:
    """Approximate the character of a biased multilinear form in L2.

    Three stages: sample translates of the last-slot kernel until the
    covering counts deviate little enough on all but a small exceptional
    set (checked exactly on the full domain; the sample size starts small
    and doubles, capped by the 2^7 eps^-4 c^-4 worst-case bound); replace
    the kernel by an external strictly-multilinear approximation; expand
    the membership indicators into characters.  All coefficients are equal
    and positive and sum to exactly 1/bias; the measured L2 error of the
    returned combination is at most eps.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    c = alpha.bias(budget)
    if c == 0:
        raise HypothesisError("the form has bias 0; nothing to approximate")
    if alpha.is_zero():
        term = PhaseTerm(complex(1), MultiaffineForm(alpha.p, alpha.dims, {}))
        return PhaseCombination((term,), 0.0, Fraction(1))

    p, k, dims = alpha.p, alpha.k, alpha.dims
    prefix_spaces = [FiniteSpace(p, d) for d in dims[:-1]]
    n_prefix = product_size(prefix_spaces)
    check_budget(n_prefix * p ** dims[-1], budget, what="kernel enumeration")

    coords = last_slot_forms(alpha)
    grids = product_point_grids(prefix_spaces, budget=None)
    coord_vals = np.stack([f.evaluate_on_grids(grids) for f in coords], axis=1)
    z_flat = ~coord_vals.any(axis=1)
    z_count = int(np.count_nonzero(z_flat))
    assert Fraction(z_count, n_prefix) == c
    sizes = tuple(p**d for d in dims[:-1])
    z_cube = z_flat.reshape(sizes, order="F")

    neg_tables = [add_index_table(p, d) for d in dims[:-1]]
    pts_per_slot = [space_points(p, d) for d in dims[:-1]]
    powers = [p ** np.arange(d, dtype=np.int64) for d in dims[:-1]]

    def translate_cover_counts(translates):
        counts = np.zeros(sizes, dtype=np.int64)
        for t in translates:
            sel = []
            for j, vec in enumerate(t):
                neg_idx = int(np.dot((-np.asarray(vec, dtype=np.int64)) % p, powers[j]))
                sel.append(neg_tables[j][:, neg_idx])
            counts += z_cube[np.ix_(*sel)]
        return counts.reshape(-1, order="F")

    def random_translate(rng):
        return tuple(tuple(rng.randrange(p) for _ in range(d)) for d in dims[:-1])

    # for 2-slot forms the kernel is a subspace, so translates drawn one per
    # coset cover every point exactly equally
    groups = _coset_groups(coord_vals) if k == 2 else None
    n_cosets = len(groups) if groups else None

    rng = random.Random(seed)
    cap = max(8, math.ceil(2**7 * eps**-4 * float(c) ** -4))
    allowed = math.floor(float(c) ** 2 * eps**2 * n_prefix / 8)

    levels = []
    m = 8
    while m <= cap:
        levels.append(m)
        if n_cosets and m % n_cosets:
            stratified = ((m + n_cosets - 1) // n_cosets) * n_cosets
            if stratified <= cap and stratified < 2 * m:
                levels.append(stratified)
        m *= 2
    if not levels:
        levels = [cap]

    chosen = None
    for m in levels:
        target = Fraction(m * z_count, n_prefix)
        threshold = (eps / 4) * float(target)
        for draw in range(draws_per_level):
            if n_cosets and m % n_cosets == 0 and draw == 0:
                translates = []
                for _ in range(m // n_cosets):
                    for grp in groups:
                        flat = int(grp[rng.randrange(len(grp))])
                        translates.append(
                            (tuple(int(v) for v in pts_per_slot[0][flat]),))
            else:
                translates = [random_translate(rng) for _ in range(m)]
            counts = translate_cover_counts(translates)
            deviations = np.abs(counts - float(target))
            if int(np.count_nonzero(deviations > threshold + 1e-12)) <= allowed:
                chosen = (m, translates)
                break
        if chosen:
            break
    if chosen is None:
        raise HypothesisError(
            f"no translate sample met the covering condition up to m = {cap}")
    m, translates = chosen

    # externally approximate the kernel, then expand indicators; the dual
    # basis already cuts the kernel exactly, so s never needs to exceed the
    # number of coordinates (the union-bound start would inflate p^s terms)
    target_excess = (Fraction(eps) * c / (4 * m)) ** 2
    approx = external_approximation(coords, target_excess, seed=rng.randrange(2**32),
                                    budget=budget, s_cap=len(coords))
    beta_forms = [f for _, f in approx.variety.constraints]
    s = len(beta_forms)

    coefficient = Fraction(n_prefix, p**s * m * z_count)
    terms = []
    for t_vecs in translates:
        for tau in itertools.product(range(p), repeat=s):
            lam = phase_form(alpha, t_vecs, tau, beta_forms)
            terms.append(PhaseTerm(complex(coefficient), lam))
    exact_l1 = Fraction(n_prefix, z_count)
    assert coefficient * len(terms) == exact_l1 == 1 / c
    assert len(terms) <= 2**25 * eps**-14 * float(c) ** -14

    comb = PhaseCombination(tuple(terms), 0.0, exact_l1)
    error = l2_distance(FunctionTable.from_form(alpha, budget), comb, budget)
    if error > eps + 1e-9:
        raise HypothesisError(
            f"measured error {error} exceeds eps = {eps} after accepted draw")
    comb.l2_error = error
    return comb


# ------------------------------------------- polynomial approximation

def diagonal_shift_polynomial(source, t_vecs) -> PolynomialFn:
    """The polynomial x -> source(t_1 + x, ..., t_k + x), expanded symbolically.

    source is a multilinear or multiaffine form whose slots all have one
    common dimension n; the t_j are vectors in F_p^n.
    """
    if isinstance(source, MultilinearForm):
        source = MultiaffineForm(source.p, source.dims,
                                 {frozenset(range(source.k)): source})
    p, dims = source.p, source.dims
    n = dims[0] if dims else 0
    if any(d != n for d in dims):
        raise ValueError("all slots must share one dimension")
    terms: dict[tuple[int, ...], int] = {}
    for subset, form in source.components.items():
        slots = sorted(subset)
        for r in range(len(slots) + 1):
            for keep in itertools.combinations(slots, r):
                rest = [i for i in slots if i not in keep]
                positions = [slots.index(i) for i in rest]
                tensor = _contract_at(form.tensor, p, positions,
                                      [t_vecs[i] for i in rest])
                for idx in itertools.product(*(range(n) for _ in range(r))):
                    coef = int(tensor[idx])
                    if not coef:
                        continue
                    exps = [0] * n
                    for i in idx:
                        exps[i] += 1
                    key = tuple(exps)
                    terms[key] = (terms.get(key, 0) + coef) % p
    return PolynomialFn(p, n, terms)


def approximate_polynomial_phase(q: PolynomialFn, eps: float, seed: int,
                                 k: Optional[int] = None,
                                 budget: Optional[int] = None,
                                 translate_draws: int = 128) -> PhaseCombination:
    """Approximate a degree-k polynomial phase by degree-(k-1) phases.

    Runs the multilinear approximation on the derived symmetric form, then
    finds translates along the diagonal realizing the averaged error bound
    and rewrites every multiaffine phase as a polynomial of degree at most
    k-1 (duplicate polynomials are merged, summing their coefficients).
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if k is None:
        k = max(q.degree, 1)
    if not 1 <= k < q.p:
        raise ValueError(f"need 1 <= k < p, got k={k}, p={q.p}")
    if q.degree > k:
        raise ValueError(f"polynomial degree {q.degree} exceeds k={k}")
    if q.degree <= k - 1:
        return PhaseCombination((PhaseTerm(complex(1), q),), 0.0, Fraction(1))
    if eps >= 1:
        return PhaseCombination((), 1.0, Fraction(0))

    p, n = q.p, q.n
    form = derived_symmetric_form(q, k)
    c = form.bias(budget)
    if c == 0:
        raise HypothesisError("the derived symmetric form has bias 0")
    comb_ml = approximate_multilinear_phase(form, eps, seed, budget)

    rng = random.Random(seed + 1)
    n_points = p**n
    check_budget(n_points, budget, what="diagonal table")
    pts = space_points(p, n).astype(np.int64)
    phases = unit_phases(p)
    coeffs = np.array([t.coefficient for t in comb_ml.terms])

    def diagonal_error(t_tuple):
        grids = [(pts + np.asarray(t, dtype=np.int64)) % p for t in t_tuple]
        target = phases[form.evaluate_on_grids(grids)]
        g = np.zeros(n_points, dtype=complex)
        for term, coef in zip(comb_ml.terms, coeffs):
            g += coef * phases[term.source.evaluate_on_grids(grids)]
        return float(np.mean(np.abs(target - g) ** 2))

    exhaustive = p ** (k * n) <= 4096
    if exhaustive:
        candidates = itertools.product(
            *(map(tuple, space_points(p, n)) for _ in range(k)))
    else:
        candidates = (tuple(tuple(rng.randrange(p) for _ in range(n))
                            for _ in range(k))
                      for _ in range(translate_draws))
    accepted = None
    for t_tuple in candidates:
        if diagonal_error(t_tuple) <= eps**2 + 1e-12:
            accepted = t_tuple
            break
    if accepted is None:
        raise HypothesisError(
            "no translate tuple met the averaged error bound; "
            f"searched {'all' if exhaustive else translate_draws} candidates")

    q_top = q.homogeneous_part(k)
    q_low = q.lower_part(k)
    shift_full = diagonal_shift_polynomial(form, accepted)
    q_prime = shift_full - q_top
    assert q_prime.degree <= k - 1

    merged: dict[tuple, tuple[complex, PolynomialFn]] = {}
    for term in comb_ml.terms:
        r_poly = diagonal_shift_polynomial(term.source, accepted)
        assert r_poly.degree <= k - 1
        out_poly = r_poly + q_low - q_prime
        assert out_poly.degree <= k - 1
        key = tuple(sorted(out_poly.terms.items()))
        if key in merged:
            merged[key] = (merged[key][0] + term.coefficient, merged[key][1])
        else:
            merged[key] = (term.coefficient, out_poly)
    terms = tuple(PhaseTerm(coef, poly) for coef, poly in merged.values())

    comb = PhaseCombination(terms, 0.0, comb_ml.exact_l1)
    error = l2_distance(FunctionTable.from_polynomial(q, budget), comb, budget)
    if error > eps + 1e-9:
        raise HypothesisError(
            f"measured error {error} exceeds eps = {eps} after translate search")
    comb.l2_error = error
    return comb


# --------------------------------------------------- uniformity norms

def gowers_norm(table: FunctionTable, k: int, budget: Optional[int] = None) -> float:
    """Degree-k uniformity norm of a function on a single coordinate space.

    Averages the multiplicative derivative over all k difference directions
    and base points (cost p^((k+1)n)) and takes the 2^k-th root.
    """
    if len(table.spaces) != 1:
        raise ValueError("uniformity norms are computed on a single space")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    space = table.spaces[0]
    p, n_dim = space.p, space.dim
    n_points = space.size
    check_budget(n_points ** (k + 1), budget, what="uniformity norm")
    add = add_index_table(p, n_dim)
    f = table.values
    base = np.arange(n_points)
    total = 0.0 + 0.0j
    for a_tuple in itertools.product(range(n_points), repeat=k):
        prod = np.ones(n_points, dtype=complex)
        for bits in itertools.product((0, 1), repeat=k):
            idx = base
            for j, b in enumerate(bits):
                if b:
                    idx = add[idx, a_tuple[j]]
            vals = f[idx]
            prod *= vals if sum(bits) % 2 == 0 else np.conj(vals)
        total += prod.mean()
    average = total / n_points**k
    return float(max(average.real, 0.0)) ** (1.0 / 2**k)


def gowers_norm_exact(q: PolynomialFn, k: int, budget: Optional[int] = None) -> Fraction:
    """Exact 2^k-th power of the uniformity norm of a polynomial phase.

    Counts the residues of the k-fold additive derivative over all base
    points and directions; the nonzero residues appear equally often, so
    the character average is the rational (N_0 - N_1)/N.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if q.degree > k:
        raise ValueError(f"degree {q.degree} exceeds k={k}")
    p, n_dim = q.p, q.n
    n_points = p**n_dim
    check_budget(n_points ** (k + 1), budget, what="exact uniformity norm")
    add = add_index_table(p, n_dim)
    table = q.evaluate_table()
    base = np.arange(n_points)
    counts = np.zeros(p, dtype=np.int64)
    for a_tuple in itertools.product(range(n_points), repeat=k):
        acc = np.zeros(n_points, dtype=np.int64)
        for bits in itertools.product((0, 1), repeat=k):
            idx = base
            for j, b in enumerate(bits):
                if b:
                    idx = add[idx, a_tuple[j]]
            sign = 1 if (k - sum(bits)) % 2 == 0 else -1
            acc += sign * table[idx]
        counts += np.bincount(acc % p, minlength=p)
    nonzero = counts[1:]
    if np.any(nonzero != nonzero[0]):
        raise ArithmeticError("derivative residues are unbalanced; value is irrational")
    total = int(counts.sum())
    return Fraction(int(counts[0]) - int(counts[1]), total)


def gowers_inverse_polynomial(q: PolynomialFn, k: int, seed: int,
                              budget: Optional[int] = None):
    """A degree-(k-1) polynomial correlating with the degree-k phase.

    For degree at most k-1 the polynomial itself is a perfect certificate;
    otherwise the phase is approximated at eps = 1/2 and the term with the
    largest correlation is returned together with its exact value, which by
    averaging is at least 1/(2m) in magnitude.
    """
    if not 1 <= k < q.p:
        raise ValueError(f"need 1 <= k < p, got k={k}, p={q.p}")
    if q.degree <= k - 1:
        return q, complex(1)
    comb = approximate_polynomial_phase(q, 0.5, seed, k=k, budget=budget)
    table = FunctionTable.from_polynomial(q, budget)
    phases = unit_phases(q.p)
    best = None
    for term in comb.terms:
        corr = complex(np.mean(table.values * np.conj(phases[term.source.evaluate_table()])))
        if best is None or abs(corr) > abs(best[1]):
            best = (term.source, corr)
    poly, corr = best
    if abs(corr) < 1 / (2 * comb.m) - 1e-9:
        raise HypothesisError(
            f"best correlation {abs(corr)} fell below 1/(2m) = {1 / (2 * comb.m)}")
    return poly, corr
