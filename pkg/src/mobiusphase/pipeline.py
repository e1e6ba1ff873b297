"""Moebius-side experiments over F_p[t].

Correlation sums of the Moebius function against polynomial phases in the
coefficients, statement-level checks of the reduction chain (correlation
dichotomy, biased-multiplier premise, base-w bias cascade, degree
lowering), the Chevalley-Warning solution search, the index-sequence
splitting behind the cascade, and the empirical decay experiment.  Every
certified inequality is evaluated on exact rationals; floating point only
ever carries character sums.
"""

import io
import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .budget import HypothesisError, check_budget
from .ffpoly import PolyFp, SpaceIndex, base_w_decompose, mobius, space_elements
from .forms import (
    MultilinearForm,
    PolynomialFn,
    derived_symmetric_form,
    multiplication_matrix,
    rearrangement_dominates,
    space_points,
    unit_phases,
)
from .phaseapprox import approximate_polynomial_phase
from .varieties import MultilinearVariety


# ------------------------------------------------------------ mu tables

@lru_cache(maxsize=None)
def _mobius_array(p: int, n: int, kind: str) -> np.ndarray:
    # the size was already budget-checked by the caller
    idx = SpaceIndex(p, n, kind)
    values = np.array([mobius(f) for f in space_elements(idx, budget=idx.size)],
                      dtype=np.int64)
    values.setflags(write=False)
    return values


def mobius_values(idx: SpaceIndex, budget: Optional[int] = None) -> np.ndarray:
    """Moebius values over G_n or A_n in enumeration order (read-only cache)."""
    check_budget(idx.size, budget, what=f"mu table for {idx.kind}_{idx.n}")
    return _mobius_array(idx.p, idx.n, idx.kind)


def mobius_sum(p: int, n: int, monic_only: bool = True,
               budget: Optional[int] = None) -> int:
    """Exact integer sum of mu over A_n (monic) or G_n (degree < n)."""
    kind = "A" if monic_only else "G"
    return int(mobius_values(SpaceIndex(p, n, kind), budget).sum())


def _poly_index(f: PolyFp, p: int, n: int) -> int:
    return sum(f.coeff(i) * p**i for i in range(n))


def _padded(q: PolynomialFn, n: int) -> PolynomialFn:
    if n < q.n:
        raise ValueError(f"q uses {q.n} coordinates but n = {n}")
    if n == q.n:
        return q
    pad = (0,) * (n - q.n)
    return PolynomialFn(q.p, n, {e + pad: c for e, c in q.terms.items()})


def _t_power(p: int, e: int) -> PolyFp:
    return PolyFp(p, (0,) * e + (1,))


# ------------------------------------------------------- correlation sum

@dataclass
class CorrelationReport:
    p: int
    n: int
    k: int
    q_text: str
    value: complex
    magnitude: float
    constant_part: complex
    nonconstant_part: complex
    permuted_delta: float
    seconds: float


def mobius_correlation(q: PolynomialFn, n: Optional[int] = None,
                       budget: Optional[int] = None,
                       seed: int = 0) -> CorrelationReport:
    """Normalized correlation of mu with the phase of q over G_n.

    The value is (1/p^n) sum_{f in G_n} mu(f) chi(q(f)), with f entering q
    through its coefficient vector.  The contribution of the p constant
    polynomials is reported separately, and the whole sum is recomputed in
    a seeded random enumeration order as a floating-point sanity check.
    """
    p = q.p
    if n is None:
        n = q.n
    q = _padded(q, n)
    start = time.perf_counter()
    check_budget(p**n, budget, what="correlation sum")
    mu = mobius_values(SpaceIndex(p, n, "G"), budget)
    phases = unit_phases(p)[q.evaluate_table(budget)]
    terms = mu * phases
    size = p**n
    value = complex(terms.sum()) / size
    constant_part = complex(terms[:p].sum()) / size

    rng = random.Random(seed)
    order = list(range(size))
    rng.shuffle(order)
    shuffled = terms[order]
    permuted = complex(math.fsum(shuffled.real), math.fsum(shuffled.imag)) / size
    report = CorrelationReport(
        p=p, n=n, k=max(q.degree, 0), q_text=repr(q),
        value=value, magnitude=abs(value),
        constant_part=constant_part,
        nonconstant_part=value - constant_part,
        permuted_delta=abs(value - permuted),
        seconds=time.perf_counter() - start)
    assert report.magnitude <= 1 + 1e-12
    return report


# --------------------------------------------------- dichotomy statement

@dataclass
class DisjunctRow:
    m: int
    kind: str  # "A" monic multipliers, "G" general multipliers
    value: float
    threshold: float
    exact: Optional[Fraction] = None  # rational value, p <= 3 only

    @property
    def holds(self) -> bool:
        return self.value >= self.threshold


@dataclass
class BiasRow:
    m: int
    kind: str
    histogram: tuple  # ((bias Fraction, count), ...) sorted by bias
    max_bias: Fraction
    fraction_above: Fraction  # tuples with bias >= c/(2n), the C_1 = 1 slot


@dataclass
class VaughanReport:
    p: int
    n: int
    k: int
    c: float
    m0: int
    correlation_abs: float
    bias_lq: Fraction
    bias_floor: Fraction  # p^(-k m0), the first-branch base with C_1 = 1
    first: list
    second: list
    bias_rows: list
    constant_note: str = "thresholds involving C_1 are reported symbolically"

    @property
    def first_holds(self) -> bool:
        return any(r.holds for r in self.first)

    @property
    def second_holds(self) -> bool:
        return any(r.holds for r in self.second)

    @property
    def monic_disjunction_holds(self) -> bool:
        return any(r.holds for r in self.first + self.second if r.kind == "A")


def _phase_sum_abs_sq(counts: np.ndarray) -> Optional[int]:
    """Sum over leading axes of |sum_j counts[..., j] zeta_p^j|^2, exact.

    The squared modulus lies in the real subfield of the p-th cyclotomic
    field, which is rational only for p <= 3; returns None for larger p.
    """
    p = counts.shape[-1]
    if p == 2:
        diff = counts[..., 0] - counts[..., 1]
        return int(np.sum(diff * diff))
    if p == 3:
        a, b, c = counts[..., 0], counts[..., 1], counts[..., 2]
        total = np.sum((a - b) ** 2 + (b - c) ** 2 + (c - a) ** 2)
        return int(total) // 2
    return None


def _symmetrized_composition(form: MultilinearForm, a_polys, m: int,
                             n: int) -> MultilinearForm:
    # like forms.symmetrized_multiplication_form but admits degree-m
    # multipliers, so monic families A_m can be probed alongside G_m
    k = form.k
    mats = [multiplication_matrix(a, n, n - m) for a in a_polys]
    cur = form.tensor
    for mat in mats:
        cur = np.tensordot(cur, mat, axes=([0], [0])) % form.p
    base = MultilinearForm(form.p, (n - m,) * k, cur)
    total = MultilinearForm.zero(form.p, (n - m,) * k)
    for pi in itertools.permutations(range(k)):
        total = total + base.permuted(pi)
    return total


def vaughan_dichotomy_check(q: PolynomialFn, c: float, m0: int,
                            budget: Optional[int] = None) -> VaughanReport:
    """Evaluate both branches of the correlation dichotomy exhaustively.

    Requires the measured correlation to be at least c.  The first table
    averages |E_x Phi(ax)|^2 over short multipliers a with Phi the phase
    of q, the second the fourfold product average; the bias rows give the
    exact distribution of the bias of the symmetrized composed forms over
    all multiplier tuples.  Monic multipliers ("A") and general ones ("G")
    are both evaluated everywhere, since the source statements switch
    between the two families.  Statement-level quantities only; the
    identity proof behind the dichotomy is out of scope.
    """
    p, n = q.p, q.n
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 <= m0 <= n:
        raise ValueError(f"m0 = {m0} out of range")
    k = max(q.degree, 1)
    base = mobius_correlation(q, budget=budget)
    if base.magnitude < c - 1e-12:
        raise HypothesisError(
            f"measured correlation {base.magnitude} is below c = {c}")
    check_budget(p**n * n, budget, what="dichotomy tables")

    qtable = q.evaluate_table(budget)
    phases = unit_phases(p)

    def value_matrix(m: int, kind: str) -> np.ndarray:
        # sizes covered by the dichotomy-tables budget check above
        left = SpaceIndex(p, m, kind)
        right = SpaceIndex(p, n - m, "G")
        rows = []
        for a in space_elements(left, budget=left.size):
            rows.append([qtable[_poly_index(a * x, p, n)]
                         for x in space_elements(right, budget=right.size)])
        return np.array(rows, dtype=np.int64)

    first = []
    for m in range(0, n // 9 + 1):
        threshold = c**2 / (16 * n**5)
        for kind in ("A", "G"):
            vals = value_matrix(m, kind)
            mat = phases[vals]
            value = float(np.mean(np.abs(mat.mean(axis=1)) ** 2))
            counts = np.stack([(vals == r).sum(axis=1) for r in range(p)],
                              axis=-1)
            num = _phase_sum_abs_sq(counts)
            exact = None
            if num is not None:
                exact = Fraction(num, vals.shape[0] * vals.shape[1] ** 2)
                assert abs(value - exact) <= 1e-9
            first.append(DisjunctRow(m, kind, value, threshold, exact))

    second = []
    for m in range(-(-n // 18), 17 * n // 18 + 1):
        threshold = c**4 / (256 * n**10)
        for kind in ("A", "G"):
            vals = value_matrix(m, kind)
            mat = phases[vals]
            gram = (mat.conj().T @ mat) / mat.shape[0]
            value = float(np.mean(np.abs(gram) ** 2))
            # gram[x, x'] = (1/|A|) sum_d C_d[x, x'] zeta^d with C_d the
            # number of multipliers a whose value jumps by d from x to x'
            ind = [(vals == r).astype(np.int64) for r in range(p)]
            counts = np.stack(
                [sum(ind[r].T @ ind[(r + d) % p] for r in range(p))
                 for d in range(p)], axis=-1)
            num = _phase_sum_abs_sq(counts)
            exact = None
            if num is not None:
                exact = Fraction(num, vals.shape[0] ** 2 * vals.shape[1] ** 2)
                assert abs(value - exact) <= 1e-9
            second.append(DisjunctRow(m, kind, value, threshold, exact))

    bias_rows = []
    bias_lq = Fraction(1)
    if k < p:
        form = derived_symmetric_form(q, k)
        bias_lq = form.bias(budget)
        cut = c / (2 * n)
        for m in range(m0, 17 * n // 18 + 1):
            check_budget(p**(k * m), budget, what="multiplier tuples")
            for kind in ("A", "G"):
                counts: dict = {}
                midx = SpaceIndex(p, m, kind)
                members = space_elements(midx, budget=midx.size)
                for a_polys in itertools.product(members, repeat=k):
                    b = _symmetrized_composition(form, a_polys, m, n).bias(budget)
                    counts[b] = counts.get(b, 0) + 1
                total = sum(counts.values())
                above = sum(cnt for b, cnt in counts.items() if float(b) >= cut)
                bias_rows.append(BiasRow(m, kind, tuple(sorted(counts.items())),
                                         max(counts), Fraction(above, total)))
    return VaughanReport(
        p=p, n=n, k=k, c=c, m0=m0,
        correlation_abs=base.magnitude, bias_lq=bias_lq,
        bias_floor=Fraction(1, p**(k * m0)),
        first=first, second=second, bias_rows=bias_rows)


# --------------------------------------------- Chevalley-Warning search

@dataclass
class CWReport:
    p: int
    d: int
    g: int
    k: int
    w: Optional[PolyFp]
    solution_count: int
    n_equations: int
    sum_degrees: int
    dimension_ok: bool  # d > k * n_equations, the instantiated condition
    crude_dimension_ok: bool  # d > k * r * g^k, the a-priori bound
    count_divisible: bool


def chevalley_warning_search(w_variety: MultilinearVariety, d: int, g: int,
                             budget: Optional[int] = None) -> CWReport:
    """Find a nonzero w whose geometric progression lies in the variety.

    Pulls each constraint back along w -> (w t^{i_1 d}, ..., w t^{i_k d})
    for all index tuples below g, yielding polynomial equations of degree
    at most k in the d coefficients of w, then brute-forces w over G_d.
    The solution count is checked for divisibility by p, which is asserted
    (together with the existence of a nonzero solution) whenever the
    degree-sum hypothesis of Chevalley-Warning holds; an over-constrained
    instance may report no nonzero solution.
    """
    p = w_variety.p
    k = w_variety.k
    if k < 1:
        raise ValueError("variety must have at least one slot")
    if len(set(w_variety.ambient)) > 1:
        raise ValueError(f"ambient must be uniform, got {w_variety.ambient}")
    ambient = w_variety.ambient[0]
    if d < 1 or g < 1:
        raise ValueError("need d >= 1 and g >= 1")
    if g * d > ambient:
        raise ValueError(
            f"progression degree {g * d - 1} does not fit in {ambient} slots")
    check_budget(p**d, budget, what="solution search")

    equations = []  # (slots, form, index tuple restricted to the slots)
    n_equations = 0
    sum_degrees = 0
    for slots, form in w_variety.constraints:
        for i_tuple in itertools.product(range(g), repeat=len(slots)):
            equations.append((form, i_tuple))
            n_equations += 1
            sum_degrees += len(slots)

    def shift_vec(w_vec, i):
        out = [0] * ambient
        for pos, coef in enumerate(w_vec):
            out[pos + i * d] = coef
        return out

    count = 0
    found = None
    widx = SpaceIndex(p, d, "G")
    for w_poly in space_elements(widx, budget=widx.size):
        w_vec = [w_poly.coeff(i) for i in range(d)]
        if all(form.evaluate([shift_vec(w_vec, i) for i in i_tuple]) == 0
               for form, i_tuple in equations):
            count += 1
            if found is None and not w_poly.is_zero():
                found = w_poly

    r = len(w_variety.constraints)
    divisible = count % p == 0
    if d > sum_degrees:
        assert divisible, "solution count must be divisible by p here"
        assert found is not None, "a nonzero solution must exist here"
    return CWReport(p=p, d=d, g=g, k=k, w=found, solution_count=count,
                    n_equations=n_equations, sum_degrees=sum_degrees,
                    dimension_ok=d > k * n_equations,
                    crude_dimension_ok=d > k * r * g**k,
                    count_divisible=divisible)


# --------------------------------------------------- index sequence plan

@dataclass(frozen=True)
class SequencePlan:
    j: tuple
    g: int
    s: int
    d: int
    l: tuple
    a: tuple
    multiplicity: int  # permutations fixing j
    l_stabilizer: int  # permutations fixing l; the decomposition multiplier


def _stabilizer_size(seq) -> int:
    seq = list(seq)
    return math.prod(math.factorial(seq.count(v)) for v in set(seq))


def sequence_plan(j: Sequence[int], g: int, s: int, d: int,
                  p: Optional[int] = None) -> SequencePlan:
    """Split a nondecreasing index tuple as j = l + a for the cascade.

    l is built inductively: it starts at min(j_1, g-1), stays put when the
    next index increases by at most one, and otherwise jumps to
    min(j_next - a_prev - 1, g-1).  The four structural properties (l and
    a nondecreasing, a bounded by s - g, and strict growth of l forcing
    strict growth of a) are asserted before returning, as is j = l + a.
    When p is given, both stabilizer sizes are checked nonzero mod p.
    """
    j = tuple(int(v) for v in j)
    k = len(j)
    if k < 1:
        raise ValueError("j must be nonempty")
    if g < 1 or s < 1 or d < 1:
        raise ValueError("g, s, d must be positive")
    if any(j[i] > j[i + 1] for i in range(k - 1)):
        raise ValueError(f"j = {j} is not nondecreasing")
    if j[0] < 0 or j[-1] > s - 1:
        raise ValueError(f"j = {j} leaves the range [0, {s - 1}]")
    if k > s - g:
        raise ValueError(f"need k <= s - g, got k = {k}, s - g = {s - g}")

    l = [min(j[0], g - 1)]
    for i in range(k - 1):
        if j[i + 1] > j[i] + 1:
            l.append(min(j[i + 1] - (j[i] - l[i]) - 1, g - 1))
        else:
            l.append(l[i])
    a = [ji - li for ji, li in zip(j, l)]

    assert all(l[i] <= l[i + 1] for i in range(k - 1))
    assert all(a[i] <= a[i + 1] for i in range(k - 1))
    assert all(0 <= ai <= s - g for ai in a)
    assert all(0 <= li <= g - 1 for li in l)
    for i1 in range(k):
        for i2 in range(k):
            if l[i1] > l[i2]:
                assert a[i1] > a[i2]
    assert all(ji == li + ai for ji, li, ai in zip(j, l, a))

    mult = _stabilizer_size(j)
    stab_l = _stabilizer_size(l)
    if p is not None:
        assert mult % p != 0, f"multiplicity {mult} vanishes mod {p}"
        assert stab_l % p != 0, f"stabilizer {stab_l} vanishes mod {p}"
    return SequencePlan(j=j, g=g, s=s, d=d, l=tuple(l), a=tuple(a),
                        multiplicity=mult, l_stabilizer=stab_l)


# -------------------------------------------------------- bias cascade

@dataclass
class CascadeRow:
    position: int
    index_tuple: tuple
    bias: Fraction
    bound: Fraction
    is_head: bool  # one of the first s constant tuples
    is_sorted: bool
    plan: Optional[SequencePlan] = None
    reduced_positions: tuple = ()  # positions of the forms behind each T_sigma


@dataclass
class PreconditionCheck:
    name: str
    holds: bool


@dataclass
class CascadeReport:
    p: int
    n: int
    k: int
    d: int
    m: int
    g: int
    s: int
    w: PolyFp
    c: Fraction  # min premise bias over the g^k progression tuples
    premise: list  # (index tuple, exact bias) rows
    rows: list
    main_bias: Fraction  # bias of the symmetric form after the main projection
    main_bound: Fraction  # product of the per-row chained bounds
    final_bias: Fraction  # bias of the symmetric form itself
    final_bound: Fraction  # removal_factor * main_bias
    removal_factor: Fraction  # p^(-2 * 3^k * d)
    preconditions: list
    identities_checked: int


def _invert(sigma) -> tuple:
    inv = [0] * len(sigma)
    for i, v in enumerate(sigma):
        inv[v] = i
    return tuple(inv)


def _multiset_match(target, source) -> tuple:
    # tau with source[tau[i]] == target[i], consuming duplicates in order
    remaining = list(range(len(source)))
    tau = []
    for v in target:
        for pos, idx in enumerate(remaining):
            if source[idx] == v:
                tau.append(idx)
                del remaining[pos]
                break
        else:
            raise ValueError(f"{target} is not a rearrangement of {source}")
    return tuple(tau)


def bias_cascade_report(q: PolynomialFn, w: PolyFp, d: int, m: int,
                        n: Optional[int] = None,
                        budget: Optional[int] = None,
                        k: Optional[int] = None) -> CascadeReport:
    """Verify the base-w cascade that lower-bounds the symmetric-form bias.

    Exact steps, in order: the diagonal identity between q's top part and
    its symmetric form; the base-w coordinate split of every polynomial;
    the premise biases of the symmetrized compositions along the w
    progression; the listing of all index tuples, where each of the first
    s constant tuples names a scaled restriction of a premise form and
    every later tuple satisfies the stabilizer decomposition against
    strictly earlier tuples (all checked as exact tensor identities); and
    the two final chained lower bounds, for the bias of the main-part
    composition and for the full bias behind the removal factor.
    """
    p = q.p
    if n is None:
        n = q.n
    q = _padded(q, n)
    if k is None:
        k = max(q.degree, 1)
    if not 1 <= k < p:
        raise ValueError(f"need 1 <= k < p, got k = {k}, p = {p}")
    if w.p != p or w.is_zero() or w.degree >= d:
        raise ValueError("w must be a nonzero element of G_d")
    if not 1 <= d <= m <= n - 1:
        raise ValueError(f"need 1 <= d <= m <= n-1, got d={d}, m={m}, n={n}")
    g = m // d
    s = g - 1 + (n - m) // d
    if k > s - g:
        raise ValueError(f"need k <= s - g, got k = {k}, s - g = {s - g}")
    preconditions = [
        PreconditionCheck("m <= 17n/18", 18 * m <= 17 * n),
        PreconditionCheck("d <= n/(18(k+2))", 18 * (k + 2) * d <= n),
    ]
    identities = 0

    check_budget(p**n, budget, what="diagonal and reconstruction checks")
    lq = derived_symmetric_form(q, k)
    for sigma in itertools.permutations(range(k)):
        assert np.array_equal(np.transpose(lq.tensor, sigma), lq.tensor)
    q_top = q.homogeneous_part(k)
    for x in space_points(p, n):
        vec = [int(v) for v in x]
        assert q_top.evaluate(vec) == lq.evaluate([vec] * k)
    identities += 1

    gidx = SpaceIndex(p, n, "G")
    for f in space_elements(gidx, budget=gidx.size):
        assert base_w_decompose(f, w, d, s).reconstruct() == f
    identities += 1

    def psi_form(l_tuple):
        return _symmetrized_composition(
            lq, [w * _t_power(p, l * d) for l in l_tuple], m, n)

    def small_form(i_tuple):
        mats = [multiplication_matrix(w * _t_power(p, i * d), n, d)
                for i in i_tuple]
        cur = lq.tensor
        for mat in mats:
            cur = np.tensordot(cur, mat, axes=([0], [0])) % p
        return MultilinearForm(p, (d,) * k, cur)

    premise = []
    c = None
    for i_tuple in itertools.product(range(g), repeat=k):
        b = psi_form(i_tuple).bias(budget)
        premise.append((i_tuple, b))
        c = b if c is None else min(c, b)

    all_tuples = list(itertools.product(range(s), repeat=k))
    heads = [(i,) * k for i in range(s)]
    rest = sorted((t for t in all_tuples if t not in heads),
                  key=lambda t: (sum(v * v for v in t), t))
    listing = heads + rest
    position = {t: i + 1 for i, t in enumerate(listing)}
    forms = {t: small_form(t) for t in all_tuples}
    k_fact = math.factorial(k) % p

    def chunk_basis(offset):
        # rows spanning t^(offset*d) G_d inside G_{n-m}
        return multiplication_matrix(_t_power(p, offset * d), n - m, d).T

    rows = []
    bounds = {}
    for pos, tup in enumerate(listing, start=1):
        form = forms[tup]
        bias = form.bias(budget)
        is_head = pos <= s
        is_sorted = tuple(sorted(tup)) == tup
        plan = None
        reduced = ()
        if is_head:
            # constant tuple: k! times the form is a premise-form restriction
            level = min(tup[0], g - 1)
            offset = tup[0] - level
            restricted = psi_form((level,) * k).restricted([chunk_basis(offset)] * k)
            assert np.array_equal(restricted.tensor, form.scaled(k_fact).tensor)
            identities += 1
            bound = c
        elif not is_sorted:
            srt = tuple(sorted(tup))
            tau = _multiset_match(tup, srt)
            assert np.array_equal(np.transpose(forms[srt].tensor, tau), form.tensor)
            assert forms[srt].bias(budget) == bias
            identities += 1
            bound = bounds[srt]
        else:
            plan = sequence_plan(tup, g, s, d, p=p)
            h_form = psi_form(plan.l).restricted(
                [chunk_basis(a) for a in plan.a])
            total = MultilinearForm.zero(p, (d,) * k)
            stab = 0
            others = []
            for sigma in itertools.permutations(range(k)):
                v_prime = tuple(plan.l[sigma[i]] + plan.a[i] for i in range(k))
                total = total + forms[v_prime]
                if all(plan.l[sigma[i]] == plan.l[i] for i in range(k)):
                    stab += 1
                    assert v_prime == tup
                else:
                    assert rearrangement_dominates(plan.l, plan.a, _invert(sigma))
                    assert sum(v * v for v in v_prime) < sum(v * v for v in tup)
                    assert position[v_prime] < pos
                    others.append(v_prime)
            assert stab == plan.l_stabilizer
            assert np.array_equal(total.tensor, h_form.tensor)
            residue = h_form - form.scaled(stab)
            direct = MultilinearForm.zero(p, (d,) * k)
            for v_prime in others:
                direct = direct + forms[v_prime]
            assert np.array_equal(residue.tensor, direct.tensor)
            identities += 3
            assert h_form.bias(budget) >= c
            bound = c
            for v_prime in others:
                bound = bound * bounds[v_prime]
            reduced = tuple(position[v] for v in others)
        assert bias >= bound
        bounds[tup] = bound
        rows.append(CascadeRow(position=pos, index_tuple=tup, bias=bias,
                               bound=bound, is_head=is_head,
                               is_sorted=is_sorted, plan=plan,
                               reduced_positions=reduced))

    # the main-part form on k slots of s stacked chunks; its bias must agree
    # with the bias of the symmetric form composed with the main projection
    big_dims = (d * s,) * k
    big = np.zeros(big_dims, dtype=np.int64)
    for tup in all_tuples:
        slices = tuple(slice(i * d, (i + 1) * d) for i in tup)
        big[slices] = (big[slices] + forms[tup].tensor) % p
    big_form = MultilinearForm(p, big_dims, big)
    main_bias = big_form.bias(budget)

    main_matrix = np.zeros((n, n), dtype=np.int64)
    for col in range(n):
        dec = base_w_decompose(_t_power(p, col), w, d, s)
        main = PolyFp(p, ())
        for jj, chunk in enumerate(dec.chunks):
            main = main + chunk.shifted(jj * d)
        main = w * main
        for row in range(n):
            main_matrix[row, col] = main.coeff(row)
    cur = lq.tensor
    for _ in range(k):
        cur = np.tensordot(cur, main_matrix, axes=([0], [0])) % p
    composed_main = MultilinearForm(p, (n,) * k, cur)
    assert composed_main.bias(budget) == main_bias
    identities += 1

    main_bound = math.prod((bounds[t] for t in all_tuples), start=Fraction(1))
    assert main_bias >= main_bound
    removal = Fraction(1, p ** (2 * 3**k * d))
    final_bias = lq.bias(budget)
    final_bound = removal * main_bias
    assert final_bias >= final_bound

    return CascadeReport(
        p=p, n=n, k=k, d=d, m=m, g=g, s=s, w=w, c=c, premise=premise,
        rows=rows, main_bias=main_bias, main_bound=main_bound,
        final_bias=final_bias, final_bound=final_bound,
        removal_factor=removal, preconditions=preconditions,
        identities_checked=identities)


# ------------------------------------------------------- degree lowering

@dataclass
class DegreeLoweringResult:
    q_tilde: PolynomialFn
    correlation: complex
    correlation_abs: float
    c: float
    eps: float
    l1: float
    m: int
    averaging_bound: float
    threshold_note: str = ("source threshold (c/2)^C kept symbolic; "
                           "the averaging bound (c - eps)/l1 is asserted")


def degree_lowering(q: PolynomialFn, seed: int, c: Optional[float] = None,
                    k: Optional[int] = None,
                    budget: Optional[int] = None) -> DegreeLoweringResult:
    """Produce a lower-degree polynomial still correlating with mu.

    Measures the correlation and the bias of the symmetric form (failing
    if either drops below the requested c), approximates the phase of q at
    L2 error c^2/4, and returns the combination term whose own correlation
    with mu is largest; that maximum provably reaches (c - eps) divided by
    the combination's coefficient mass.
    """
    p, n = q.p, q.n
    if k is None:
        k = max(q.degree, 1)
    base = mobius_correlation(q, budget=budget)
    if k < p and q.degree == k:
        bias_lq = float(derived_symmetric_form(q, k).bias(budget))
    else:
        bias_lq = 1.0
    if c is None:
        c = min(base.magnitude, bias_lq)
    else:
        if base.magnitude < c - 1e-12:
            raise HypothesisError(
                f"correlation {base.magnitude} is below the requested c = {c}")
        if bias_lq < c - 1e-12:
            raise HypothesisError(
                f"bias {bias_lq} is below the requested c = {c}")
    if c <= 0:
        raise HypothesisError("measured correlation is zero; nothing to lower")

    if q.degree <= k - 1:
        return DegreeLoweringResult(
            q_tilde=q, correlation=base.value, correlation_abs=base.magnitude,
            c=c, eps=0.0, l1=1.0, m=1, averaging_bound=c)

    eps = c * c / 4
    comb = approximate_polynomial_phase(q, eps, seed, k=k, budget=budget)
    mu = mobius_values(SpaceIndex(p, n, "G"), budget)
    phases = unit_phases(p)
    size = p**n
    best = None
    for term in comb.terms:
        vals = phases[term.source.evaluate_table(budget)]
        corr = complex((mu * vals).sum()) / size
        if best is None or abs(corr) > abs(best[1]):
            best = (term.source, corr)
    q_tilde, corr = best
    assert q_tilde.degree <= k - 1
    l1 = float(comb.exact_l1) if comb.exact_l1 is not None else comb.coefficient_l1
    bound = (c - eps) / l1
    assert abs(corr) >= bound - 1e-12
    return DegreeLoweringResult(
        q_tilde=q_tilde, correlation=corr, correlation_abs=abs(corr),
        c=c, eps=eps, l1=l1, m=comb.m, averaging_bound=bound)


# ------------------------------------------------------ decay experiment

@dataclass
class DecayRow:
    n: int
    max_abs: float
    mean_abs: float


@dataclass
class DecayReport:
    p: int
    k: int
    samples: int
    seed: int
    rows: list
    slope: Optional[float]
    epsilon_hat: Optional[float]
    monotone: bool

    def csv_text(self) -> str:
        out = io.StringIO()
        out.write("n,max_abs_S,mean_abs_S,slope\n")
        slope_text = "" if self.slope is None else repr(self.slope)
        for row in self.rows:
            out.write(f"{row.n},{row.max_abs!r},{row.mean_abs!r},{slope_text}\n")
        return out.getvalue()


def random_phase_polynomial(rng: random.Random, p: int, n: int,
                            k: int) -> PolynomialFn:
    """Uniform coefficients on every monomial of total degree up to k."""
    terms = {}
    for exps in itertools.product(range(min(k, p - 1) + 1), repeat=n):
        if sum(exps) <= k:
            terms[exps] = rng.randrange(p)
    return PolynomialFn(p, n, terms)


def structured_polynomials(p: int, n: int, k: int) -> list:
    """Deterministic probes: distinct-coordinate products and a pure power."""
    out = []
    for combo in itertools.combinations(range(n), k):
        exps = [0] * n
        for i in combo:
            exps[i] = 1
        out.append(PolynomialFn(p, n, {tuple(exps): 1}))
    exps = [0] * n
    exps[0] = k
    out.append(PolynomialFn(p, n, {tuple(exps): 1}))
    return out


def decay_experiment(p: int, k: int, n_range: Sequence[int], samples: int,
                     seed: int, budget: Optional[int] = None) -> DecayReport:
    """Empirical decay of the largest correlation as the degree bound grows.

    For each n the maximum and mean of |S| over structured plus seeded
    random degree-k polynomials are recorded; the slope of log_p(max) in n
    is fitted by least squares when at least two usable rows exist, and
    its negation is reported as the empirical decay exponent.  The entire
    run is deterministic given the seed.
    """
    rng = random.Random(seed)
    rows = []
    for n in n_range:
        check_budget(p**n, budget, what="decay enumeration")
        polys = structured_polynomials(p, n, k)
        polys += [random_phase_polynomial(rng, p, n, k) for _ in range(samples)]
        mags = [mobius_correlation(qq, budget=budget).magnitude for qq in polys]
        rows.append(DecayRow(n=n, max_abs=max(mags), mean_abs=float(np.mean(mags))))
    usable = [(r.n, math.log(r.max_abs, p)) for r in rows if r.max_abs > 0]
    slope = None
    if len(usable) >= 2:
        xs = np.array([u[0] for u in usable], dtype=float)
        ys = np.array([u[1] for u in usable], dtype=float)
        slope = float(np.polyfit(xs, ys, 1)[0])
    monotone = all(rows[i + 1].max_abs <= rows[i].max_abs + 1e-12
                   for i in range(len(rows) - 1))
    return DecayReport(p=p, k=k, samples=samples, seed=seed, rows=rows,
                       slope=slope,
                       epsilon_hat=None if slope is None else -slope,
                       monotone=monotone)
