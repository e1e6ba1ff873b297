"""The advertised-guarantee suite: ten numbered, self-contained checks.

Each criterion function re-derives its expected values from scratch (naive
counting, exhaustive enumeration, or independent recomputation), runs the
library code, and returns a CriterionResult; nothing is cached between
criteria.  run_all is the single entry point used both by the test suite
and by the command line `verify` subcommand.
"""

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .ffpoly import PolyFp, SpaceIndex, base_w_decompose, space_elements
from .forms import (
    FiniteSpace,
    MultilinearForm,
    PolynomialFn,
    derived_symmetric_form,
    product_point_grids,
    rank_mod_p,
    rearrangement_dominates,
    unit_phases,
)
from .phaseapprox import (
    FunctionTable,
    approximate_multilinear_phase,
    approximate_polynomial_phase,
    gowers_inverse_polynomial,
    gowers_norm,
    l2_distance,
)
from .pipeline import (
    bias_cascade_report,
    chevalley_warning_search,
    decay_experiment,
    mobius_correlation,
    mobius_sum,
    random_phase_polynomial,
    sequence_plan,
    vaughan_dichotomy_check,
)
from .varieties import MultilinearVariety, directional_convolution_positive

__all__ = ["CriterionResult", "ALL_CRITERIA", "run_all", "format_table"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d}  {self.name:<28} {flag}  {self.detail}"


def _ok(number: int, name: str, detail: str) -> CriterionResult:
    return CriterionResult(number, name, True, detail)


def _random_form(rng: random.Random, p: int, dims) -> MultilinearForm:
    size = int(np.prod(dims)) if dims else 1
    tensor = np.array([rng.randrange(p) for _ in range(size)],
                      dtype=np.int64).reshape(tuple(dims))
    return MultilinearForm(p, tuple(dims), tensor)


def _random_basis(rng: random.Random, p: int, d: int, r: int) -> np.ndarray:
    """r independent rows in F_p^d, by rejection."""
    while True:
        mat = np.array([rng.randrange(p) for _ in range(r * d)],
                       dtype=np.int64).reshape(r, d)
        if rank_mod_p(mat, p) == r:
            return mat


# 1 ----------------------------------------------------------------------

def criterion_mobius_sums() -> CriterionResult:
    """Partial sums of the squarefree sign over monic strata, exact."""
    checked = 0
    for p, top in ((2, 8), (3, 5)):
        if mobius_sum(p, 1) != -p:
            return CriterionResult(1, "mobius-partial-sums", False,
                                   f"sum at degree 1 over F_{p} is not {-p}")
        checked += 1
        for n in range(2, top + 1):
            value = mobius_sum(p, n)
            if value != 0:
                return CriterionResult(1, "mobius-partial-sums", False,
                                       f"p={p} n={n}: got {value}, want 0")
            checked += 1
    return _ok(1, "mobius-partial-sums", f"{checked} strata exact")


# 2 ----------------------------------------------------------------------

def criterion_bias_oracle() -> CriterionResult:
    """Kernel-count bias against the full character average, 200 forms."""
    rng = random.Random(20_240_201)
    caps = {2: 12, 3: 8, 5: 6}
    worst = 0.0
    for i in range(200):
        p = rng.choice([2, 3, 5])
        k = rng.randrange(1, 4)
        dims = []
        for _ in range(k):
            room = caps[p] - sum(dims) - (k - len(dims) - 1)
            dims.append(rng.randrange(1, max(2, room + 1)))
        alpha = _random_form(rng, p, dims)
        bias = alpha.bias()
        vals = alpha.evaluate_on_grids(product_point_grids(alpha.spaces()))
        char = complex(np.mean(unit_phases(p)[vals]))
        err = abs(char - float(bias))
        worst = max(worst, err)
        if err > 1e-9:
            return CriterionResult(2, "bias-oracle-equivalence", False,
                                   f"form {i}: |character - kernel| = {err}")
        if p == 2:
            zeros = int(np.count_nonzero(vals == 0))
            exact = Fraction(2 * zeros - vals.size, vals.size)
            if exact != bias:
                return CriterionResult(2, "bias-oracle-equivalence", False,
                                       f"form {i}: exact mismatch at p = 2")
    return _ok(2, "bias-oracle-equivalence", f"200 forms, worst gap {worst:.2e}")


# 3 ----------------------------------------------------------------------

def _random_variety(rng, p, ambient, r, strictly=False) -> MultilinearVariety:
    k = len(ambient)
    constraints = []
    for _ in range(r):
        if strictly:
            subset = tuple(range(k))
        else:
            size = rng.randrange(1, k + 1)
            subset = tuple(sorted(rng.sample(range(k), size)))
        sub_dims = tuple(ambient[i] for i in subset)
        form = _random_form(rng, p, sub_dims)
        while form.is_zero():
            form = _random_form(rng, p, sub_dims)
        constraints.append((subset, form))
    return MultilinearVariety(p, ambient, constraints)


def criterion_inequality_suite() -> CriterionResult:
    """Exact rational and integer inequalities on forms and varieties."""
    rng = random.Random(314_159)
    name = "exact-inequality-suite"

    # density never drops below p^-(number of constraints): 100 varieties
    for i in range(100):
        p = rng.choice([2, 3])
        k = rng.randrange(1, 4)
        ambient = tuple(rng.randrange(1, 4) for _ in range(k))
        r = rng.randrange(0, 4)
        w = _random_variety(rng, p, ambient, r)
        if w.density() < Fraction(1, p**r):
            return CriterionResult(3, name, False,
                                   f"density floor broken on variety {i}")

    # restriction to subspaces: bias rises, and by at most the codimension
    for i in range(100):
        p = rng.choice([2, 3])
        k = rng.randrange(1, 4)
        dims = tuple(rng.randrange(1, 4) for _ in range(k))
        alpha = _random_form(rng, p, dims)
        ranks = [rng.randrange(1, d + 1) for d in dims]
        bases = [_random_basis(rng, p, d, r) for d, r in zip(dims, ranks)]
        beta = alpha.restricted(bases)
        lo, hi = alpha.bias(), beta.bias()
        codim = sum(d - r for d, r in zip(dims, ranks))
        if hi < lo or lo < Fraction(1, p**codim) * hi:
            return CriterionResult(3, name, False,
                                   f"restriction inequality broken at pair {i}")

    # intersections of strictly-multilinear varieties: |V n W|*|U| >= |V|*|W|
    for i in range(50):
        p = rng.choice([2, 3])
        k = rng.randrange(1, 3)
        ambient = tuple(rng.randrange(1, 4) for _ in range(k))
        v = _random_variety(rng, p, ambient, rng.randrange(0, 3), strictly=True)
        w = _random_variety(rng, p, ambient, rng.randrange(0, 3), strictly=True)
        total = v.ambient_size
        if v.intersected(w).point_count() * total < v.point_count() * w.point_count():
            return CriterionResult(3, name, False,
                                   f"intersection inequality broken at pair {i}")

    # pointwise sums of forms: bias is supermultiplicative, 200 pairs
    for i in range(200):
        p = rng.choice([2, 3])
        k = rng.randrange(1, 4)
        dims = tuple(rng.randrange(1, 4) for _ in range(k))
        alpha, beta = _random_form(rng, p, dims), _random_form(rng, p, dims)
        if (alpha + beta).bias() < alpha.bias() * beta.bias():
            return CriterionResult(3, name, False,
                                   f"bias product inequality broken at pair {i}")

    # convolution positivity with the removed set at the size threshold
    for i in range(20):
        p = 2
        k = rng.choice([1, 1, 2])
        ambient = (4,) if k == 1 else (2, 2)
        w = _random_variety(rng, p, ambient, 1)
        points = w.points()
        allowed = (Fraction(1, 2**(2 * k)) * Fraction(1, p**k)
                   * w.ambient_size)
        take = min(len(points) - 1, math.floor(allowed))
        removed = rng.sample(points, take) if take > 0 else []
        check = directional_convolution_positive(w, removed)
        if not (check.positive and check.precondition_ok):
            return CriterionResult(3, name, False,
                                   f"convolution positivity broken at instance {i}")

    return _ok(3, name, "100+100+50+200+20 instances, all exact")


# 4 ----------------------------------------------------------------------

def criterion_rearrangement() -> CriterionResult:
    """Exhaustive strict rearrangement comparison, entries in [0, 4]."""
    name = "rearrangement-exhaustive"
    checked = 0
    for k in range(1, 5):
        tuples = list(itertools.combinations_with_replacement(range(5), k))
        perms = list(itertools.permutations(range(k)))
        for xs in tuples:
            for ys in tuples:
                pairing_ok = all(xs[i] == xs[j]
                                 for i in range(k) for j in range(k)
                                 if ys[i] == ys[j])
                if not pairing_ok:
                    continue
                for sigma in perms:
                    if tuple(xs[sigma[i]] for i in range(k)) == xs:
                        continue
                    checked += 1
                    if not rearrangement_dominates(xs, ys, sigma):
                        return CriterionResult(
                            4, name, False,
                            f"not strict at xs={xs} ys={ys} sigma={sigma}")
    return _ok(4, name, f"{checked} admissible triples, all strict")


# 5 ----------------------------------------------------------------------

def criterion_phase_approximation() -> CriterionResult:
    """The biased-phase L2 approximation contract on 20 random forms."""
    name = "phase-approximation-contract"
    rng = random.Random(65_537)
    eps = 0.25
    done = 0
    attempts = 0
    while done < 20:
        attempts += 1
        if attempts > 500:
            return CriterionResult(5, name, False,
                                   "could not sample 20 biased forms")
        p = rng.choice([2, 3])
        dims = rng.choice([(2, 2), (1, 1, 1), (2, 1, 1)])
        alpha = _random_form(rng, p, dims)
        bias = alpha.bias()
        if bias < Fraction(1, p):
            continue
        comb = approximate_multilinear_phase(alpha, eps, seed=1000 + done)
        spaces = alpha.spaces()
        grids = product_point_grids(spaces)
        table = FunctionTable(spaces, unit_phases(p)[alpha.evaluate_on_grids(grids)])
        err = l2_distance(table, comb)
        if err > eps + 1e-12:
            return CriterionResult(5, name, False,
                                   f"measured error {err} exceeds {eps}")
        if comb.exact_l1 is None or comb.exact_l1 > Fraction(1, bias):
            return CriterionResult(5, name, False,
                                   "coefficient sum exceeds inverse bias")
        if abs(comb.coefficient_l1 - float(comb.exact_l1)) > 1e-9:
            return CriterionResult(5, name, False,
                                   "float and exact coefficient sums disagree")
        for term in comb.terms:
            if not term.source.multilinear_part().is_zero():
                return CriterionResult(5, name, False,
                                       "a term has a nonzero multilinear part")
        cap = Fraction(2**25) * Fraction(4)**14 * Fraction(1, bias)**14
        if comb.m > cap:
            return CriterionResult(5, name, False, "term count exceeds the cap")
        done += 1
    return _ok(5, name, f"20 forms at eps = {eps}, all bounds hold")


# 6 ----------------------------------------------------------------------

def _recomputed_correlation(q: PolynomialFn, w: PolynomialFn) -> complex:
    phases = unit_phases(q.p)
    return complex(np.mean(phases[q.evaluate_table()]
                           * np.conj(phases[w.evaluate_table()])))


def criterion_uniformity_inverse() -> CriterionResult:
    """Degree-squared norm value plus the inverse witness on random inputs."""
    name = "uniformity-inverse"
    square = PolynomialFn(3, 1, {(2,): 1})
    table = FunctionTable.from_polynomial(square)
    norm = gowers_norm(table, 2)
    if abs(norm - (1 / 3) ** 0.25) > 1e-9:
        return CriterionResult(6, name, False, f"norm of the square phase: {norm}")

    witness, corr = gowers_inverse_polynomial(square, 2, seed=0)
    m = approximate_polynomial_phase(square, 0.5, seed=0, k=2).m
    again = _recomputed_correlation(square, witness)
    if abs(again - corr) > 1e-9 or abs(again) < 1 / (2 * m) - 1e-12:
        return CriterionResult(6, name, False, "square-phase witness too weak")

    rng = random.Random(271_828)
    done = 0
    attempts = 0
    while done < 10:
        attempts += 1
        if attempts > 500:
            return CriterionResult(6, name, False, "sampling stalled")
        n = rng.randrange(1, 4)
        q = random_phase_polynomial(rng, 3, n, 2)
        if q.degree != 2 or derived_symmetric_form(q, 2).bias() < Fraction(1, 3):
            continue
        witness, corr = gowers_inverse_polynomial(q, 2, seed=attempts)
        if witness.degree > 1:
            return CriterionResult(6, name, False,
                                   f"witness degree {witness.degree} too high")
        again = _recomputed_correlation(q, witness)
        if abs(again - corr) > 1e-9:
            return CriterionResult(6, name, False,
                                   f"correlation mismatch {abs(again - corr)}")
        done += 1
    return _ok(6, name, "norm value, 1 + 10 witnesses verified")


# 7 ----------------------------------------------------------------------

def criterion_cascade_machinery() -> CriterionResult:
    """Index-splitting laws, chunk reconstruction, and the bias cascade."""
    name = "cascade-machinery"
    plans = 0
    for s in range(1, 7):
        for k in range(1, 5):
            for g in range(1, s - k + 1):
                for j in itertools.combinations_with_replacement(range(s), k):
                    plan = sequence_plan(j, g, s, 1)
                    l, a = plan.l, plan.a
                    assert all(l[i] <= l[i + 1] for i in range(k - 1))
                    assert all(a[i] <= a[i + 1] for i in range(k - 1))
                    assert all(0 <= ai <= s - g for ai in a)
                    assert tuple(li + ai for li, ai in zip(l, a)) == tuple(j)
                    for i1 in range(k):
                        for i2 in range(k):
                            if l[i1] > l[i2] and not a[i1] > a[i2]:
                                return CriterionResult(
                                    7, name, False, f"split law broken at {j}")
                    plans += 1

    rebuilt = 0
    for p, n, dees in ((2, 12, (1, 3)), (3, 7, (1, 2))):
        xs = space_elements(SpaceIndex(p, n, "G"))
        for d in dees:
            ws = [w for w in space_elements(SpaceIndex(p, d + 1, "G"))
                  if not w.is_zero()]
            for w in ws:
                for x in xs:
                    if base_w_decompose(x, w, d, 3).reconstruct() != x:
                        return CriterionResult(
                            7, name, False,
                            f"reconstruction failed at p={p} d={d} w={w}")
                    rebuilt += 1

    q = PolynomialFn(3, 4, {(1, 1, 0, 0): 1})
    rep = bias_cascade_report(q, PolyFp(3, (1,)), 1, 1)
    heads = [row for row in rep.rows if row.is_head]
    if len(heads) != rep.s or any(row.bias < rep.c for row in heads):
        return CriterionResult(7, name, False, "a head row dips below the premise")
    if rep.identities_checked == 0 or any(r.bias < r.bound for r in rep.rows):
        return CriterionResult(7, name, False, "a cascade bound fails")
    return _ok(7, name,
               f"{plans} splits, {rebuilt} reconstructions, "
               f"{rep.identities_checked} exact identities")


# 8 ----------------------------------------------------------------------

def criterion_progression_counts() -> CriterionResult:
    """Solution counts of pulled-back systems are multiples of p."""
    name = "progression-solution-counts"
    rng = random.Random(999_331)
    shapes = [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1)]
    for i in range(20):
        p, g, r = shapes[i % len(shapes)]
        k = 2
        subsets = [tuple(sorted(rng.sample(range(k), rng.randrange(1, k + 1))))
                   for _ in range(r)]
        n_eq = sum(g ** len(sub) for sub in subsets)
        d = k * n_eq + 1
        ambient = (g * d,) * k
        constraints = []
        for sub in subsets:
            dims = tuple(ambient[s] for s in sub)
            form = _random_form(rng, p, dims)
            while form.is_zero():
                form = _random_form(rng, p, dims)
            constraints.append((sub, form))
        w = MultilinearVariety(p, ambient, constraints)
        rep = chevalley_warning_search(w, d, g)
        if not (rep.dimension_ok and rep.count_divisible):
            return CriterionResult(8, name, False,
                                   f"system {i}: count {rep.solution_count} bad")
        if rep.w is None or rep.w.is_zero():
            return CriterionResult(8, name, False,
                                   f"system {i}: no nonzero solution returned")
    return _ok(8, name, "20 systems, counts divisible, nonzero solutions")


# 9 ----------------------------------------------------------------------

def criterion_decay_determinism() -> CriterionResult:
    """The decay experiment is reproducible and reports a fitted slope."""
    name = "decay-determinism"
    first = decay_experiment(3, 2, range(2, 7), samples=50, seed=7)
    second = decay_experiment(3, 2, range(2, 7), samples=50, seed=7)
    if first.csv_text() != second.csv_text():
        return CriterionResult(9, name, False, "two seeded runs differ")
    if first.slope is None:
        return CriterionResult(9, name, False, "no slope fitted")
    return _ok(9, name, f"slope = {first.slope:.4f} "
                        f"(empirical exponent {-first.slope:.4f})")


# 10 ---------------------------------------------------------------------

def criterion_dichotomy_instance() -> CriterionResult:
    """Both dichotomy branches carry exact values on a live instance."""
    name = "dichotomy-instance"
    q = PolynomialFn(3, 4, {(1, 1, 0, 0): 1})
    c = mobius_correlation(q).magnitude
    if not c > 0:
        return CriterionResult(10, name, False, "instance has zero correlation")
    rep = vaughan_dichotomy_check(q, c, 1)
    rows = rep.first + rep.second
    if not rep.first or not rep.second:
        return CriterionResult(10, name, False, "a branch has no rows")
    if any(row.exact is None for row in rows):
        return CriterionResult(10, name, False, "a row is missing its exact value")
    if not any(row.exact > 0 for row in rows):
        return CriterionResult(10, name, False, "no positive branch quantity")
    return _ok(10, name,
               f"correlation {c:.4f}, {len(rows)} exact rows, positives present")


ALL_CRITERIA = (
    criterion_mobius_sums,
    criterion_bias_oracle,
    criterion_inequality_suite,
    criterion_rearrangement,
    criterion_phase_approximation,
    criterion_uniformity_inverse,
    criterion_cascade_machinery,
    criterion_progression_counts,
    criterion_decay_determinism,
    criterion_dichotomy_instance,
)


def run_all(numbers: Optional[Sequence[int]] = None) -> list[CriterionResult]:
    """Run the requested criteria (all by default), never raising."""
    wanted = set(numbers) if numbers is not None else None
    results = []
    for index, fn in enumerate(ALL_CRITERIA, start=1):
        if wanted is not None and index not in wanted:
            continue
        try:
            results.append(fn())
        except Exception as exc:  # a crash is a failure, not an abort
            results.append(CriterionResult(index, fn.__name__, False,
                                           f"raised {exc!r}"))
    return results


def format_table(results: Sequence[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    good = sum(r.passed for r in results)
    lines.append(f"{good}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
