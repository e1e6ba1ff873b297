"""Tests for phase approximation, translate maps, and uniformity norms."""

import cmath
import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from mobiusphase.budget import BudgetExceededError, HypothesisError
from mobiusphase.forms import (
    FiniteSpace,
    MultiaffineForm,
    MultilinearForm,
    PolynomialFn,
    derived_symmetric_form,
    space_points,
)
from mobiusphase.phaseapprox import (
    FunctionTable,
    PhaseCombination,
    PhaseTerm,
    approximate_multilinear_phase,
    approximate_polynomial_phase,
    combination_table,
    diagonal_shift_polynomial,
    gowers_inverse_polynomial,
    gowers_norm,
    gowers_norm_exact,
    kernel_variety,
    l2_distance,
    last_slot_forms,
    translate_map,
)
from mobiusphase.varieties import MultilinearVariety


def dot_form(p, d):
    return MultilinearForm(p, (d, d), np.eye(d, dtype=np.int64))


def random_form(rng, p, dims):
    tensor = np.array([rng.randrange(p) for _ in range(int(np.prod(dims)))],
                      dtype=np.int64).reshape(dims)
    return MultilinearForm(p, dims, tensor)


def naive_combination_error(form, comb):
    # plain-loop independent recomputation of the L2 distance
    p = form.p
    w = cmath.exp(2j * cmath.pi / p)
    pts = [space_points(p, d) for d in form.dims]
    total, count = 0.0, 0
    for vecs in itertools.product(*(map(tuple, g) for g in pts)):
        target = w ** form.evaluate(vecs)
        got = 0j
        for term in comb.terms:
            if isinstance(term.source, PolynomialFn):
                val = term.source.evaluate(vecs[0])
            else:
                val = term.source.evaluate(vecs)
            got += term.coefficient * w**val
        total += abs(target - got) ** 2
        count += 1
    return (total / count) ** 0.5


# ------------------------------------------------------ kernel variety

def test_kernel_variety_dot():
    zv = kernel_variety(dot_form(2, 2))
    assert zv.density() == Fraction(1, 4)
    assert len(zv.constraints) == 2
    assert zv.is_strictly_multilinear


def test_kernel_variety_keeps_zero_slices():
    # x0*y0 on two 2-dim slots: the second coordinate form is zero but stays
    form = MultilinearForm.from_entries(2, (2, 2), [(0, 0, 1)])
    zv = kernel_variety(form)
    assert len(zv.constraints) == 2
    assert zv.density() == Fraction(1, 2) == form.bias()


def test_kernel_variety_density_equals_bias():
    rng = random.Random(40)
    for _ in range(20):
        p = rng.choice([2, 3])
        k = rng.randrange(2, 4)
        dims = tuple(rng.randrange(1, 3) for _ in range(k))
        form = random_form(rng, p, dims)
        assert kernel_variety(form).density() == form.bias()


def test_kernel_variety_needs_two_slots():
    with pytest.raises(ValueError):
        kernel_variety(MultilinearForm.from_entries(3, (2,), [(0, 1)]))


# ------------------------------------------------------- translate map

def test_translate_map_agrees_on_translated_kernel():
    # the multiaffine substitutes match the last-slot map on t + kernel
    rng = random.Random(41)
    for _ in range(10):
        p = rng.choice([2, 3])
        k = rng.randrange(2, 4)
        dims = tuple(rng.randrange(1, 3) for _ in range(k))
        form = random_form(rng, p, dims)
        z_points = kernel_variety(form).points()
        pts = [space_points(p, d) for d in dims[:-1]]
        for _ in range(4):
            t = tuple(tuple(rng.randrange(p) for _ in range(d)) for d in dims[:-1])
            lmap = translate_map(form, t)
            for z in z_points[: min(len(z_points), 8)]:
                x = tuple(tuple((np.array(tj) + np.array(zj)) % p)
                          for tj, zj in zip(t, z))
                for j, laff in enumerate(lmap):
                    e_j = tuple(int(i == j) for i in range(dims[-1]))
                    expected = form.evaluate(x + (e_j,))
                    assert laff.evaluate(x) == expected


def test_translate_map_top_part_vanishes():
    rng = random.Random(42)
    for _ in range(10):
        p = rng.choice([2, 3])
        dims = tuple(rng.randrange(1, 3) for _ in range(rng.randrange(2, 4)))
        form = random_form(rng, p, dims)
        t = tuple(tuple(rng.randrange(p) for _ in range(d)) for d in dims[:-1])
        for laff in translate_map(form, t):
            assert laff.multilinear_part().is_zero()


def test_translate_map_bilinear_case_is_constant():
    # with two slots the proper-subset sum leaves only the constant value
    form = dot_form(3, 2)
    t = ((1, 2),)
    for j, laff in enumerate(lmap := translate_map(form, t)):
        assert set(laff.components) <= {frozenset()}
        assert laff.evaluate(((0, 0),)) == t[0][j]
    assert len(lmap) == 2


# -------------------------------------------- multilinear approximation

def check_combination_invariants(form, comb, eps):
    assert comb.l2_error <= eps + 1e-9
    coefs = {t.coefficient for t in comb.terms}
    assert len(coefs) == 1
    coef = coefs.pop()
    assert coef.imag == 0 and coef.real > 0
    assert comb.exact_l1 == 1 / form.bias()
    assert abs(comb.coefficient_l1 - float(comb.exact_l1)) < 1e-9
    for term in comb.terms:
        assert term.source.multilinear_part().is_zero()
    c = float(form.bias())
    assert comb.m <= 2**25 * eps**-14 * c**-14


def test_approx_ml_dot_exact():
    form = dot_form(2, 2)
    comb = approximate_multilinear_phase(form, 0.25, seed=5)
    check_combination_invariants(form, comb, 0.25)
    assert comb.exact_l1 == 4
    # balanced covering and exact kernel cut make the combination exact
    assert comb.l2_error <= 1e-9
    assert naive_combination_error(form, comb) <= 1e-9


def test_approx_ml_scalar_product_f3():
    form = MultilinearForm.from_entries(3, (1, 1), [(0, 0, 1)])
    comb = approximate_multilinear_phase(form, 0.4, seed=11)
    check_combination_invariants(form, comb, 0.4)
    assert comb.exact_l1 == 3
    assert comb.l2_error <= 1e-9


def test_approx_ml_three_slots():
    form = MultilinearForm.from_entries(2, (1, 1, 1), [(0, 0, 0, 1)])
    comb = approximate_multilinear_phase(form, 0.6, seed=21)
    check_combination_invariants(form, comb, 0.6)
    assert comb.exact_l1 == Fraction(4, 3)
    assert naive_combination_error(form, comb) == pytest.approx(comb.l2_error, abs=1e-9)


def test_approx_ml_zero_form():
    form = MultilinearForm.zero(3, (2, 2))
    comb = approximate_multilinear_phase(form, 0.3, seed=1)
    assert comb.m == 1 and comb.l2_error == 0.0 and comb.exact_l1 == 1
    assert comb.terms[0].coefficient == 1


def test_approx_ml_random_instances():
    rng = random.Random(43)
    done = 0
    while done < 8:
        p = rng.choice([2, 3])
        dims = rng.choice([(2, 2), (1, 1, 1), (2, 1, 1)])
        if p == 3 and len(dims) == 3:
            continue  # keep the randomized pass fast
        form = random_form(rng, p, dims)
        eps = rng.choice([0.4, 0.5])
        comb = approximate_multilinear_phase(form, eps, seed=rng.randrange(10**6))
        check_combination_invariants(form, comb, eps)
        assert naive_combination_error(form, comb) <= eps + 1e-9
        done += 1


def test_approx_ml_rejects_bad_eps():
    with pytest.raises(ValueError):
        approximate_multilinear_phase(dot_form(2, 2), 0.0, seed=1)


def test_approx_ml_budget():
    with pytest.raises(BudgetExceededError):
        approximate_multilinear_phase(dot_form(2, 2), 0.25, seed=1, budget=10)


# -------------------------------------------- diagonal shift polynomial

def test_diagonal_shift_matches_pointwise():
    rng = random.Random(44)
    for _ in range(12):
        p = rng.choice([3, 5])
        k = rng.randrange(2, 4)
        n = rng.randrange(1, 3)
        form = random_form(rng, p, (n,) * k)
        t = tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(k))
        poly = diagonal_shift_polynomial(form, t)
        for _ in range(6):
            x = tuple(rng.randrange(p) for _ in range(n))
            shifted = tuple(tuple((xi + ti) % p for xi, ti in zip(x, tj)) for tj in t)
            assert poly.evaluate(x) == form.evaluate(shifted)


def test_diagonal_shift_of_derived_form_recovers_top_part():
    # substituting the diagonal at zero shift inverts the symmetrization
    rng = random.Random(45)
    for _ in range(8):
        p, k, n = 5, rng.randrange(2, 4), rng.randrange(1, 3)
        terms = {}
        for _ in range(4):
            exps = [0] * n
            for _ in range(k):
                exps[rng.randrange(n)] += 1
            terms[tuple(exps)] = rng.randrange(p)
        q = PolynomialFn(p, n, terms)
        if q.degree < k:
            continue
        form = derived_symmetric_form(q, k)
        zero = tuple((0,) * n for _ in range(k))
        assert diagonal_shift_polynomial(form, zero) == q.homogeneous_part(k)


def test_diagonal_shift_dimension_mismatch():
    form = random_form(random.Random(0), 3, (2, 1))
    with pytest.raises(ValueError):
        diagonal_shift_polynomial(form, ((0, 0), (0,)))


# -------------------------------------------- polynomial approximation

def test_approx_poly_square_f3():
    q = PolynomialFn(3, 1, {(2,): 1})
    comb = approximate_polynomial_phase(q, 0.5, seed=3)
    assert comb.l2_error <= 1e-9
    assert comb.exact_l1 == 3
    assert all(t.source.degree <= 1 for t in comb.terms)
    assert comb.m <= 27
    assert abs(sum(t.coefficient for t in comb.terms) - 3) < 1e-9
    assert naive_combination_error_poly(q, comb) <= 1e-9


def naive_combination_error_poly(q, comb):
    w = cmath.exp(2j * cmath.pi / q.p)
    total, count = 0.0, 0
    for x in map(tuple, space_points(q.p, q.n)):
        target = w ** q.evaluate(x)
        got = sum(t.coefficient * w ** t.source.evaluate(x) for t in comb.terms)
        total += abs(target - got) ** 2
        count += 1
    return (total / count) ** 0.5


def test_approx_poly_two_variables():
    q = PolynomialFn(3, 2, {(1, 1): 1, (1, 0): 2})
    comb = approximate_polynomial_phase(q, 0.5, seed=7)
    assert comb.l2_error <= 0.5 + 1e-9
    assert all(t.source.degree <= 1 for t in comb.terms)
    assert naive_combination_error_poly(q, comb) == pytest.approx(comb.l2_error, abs=1e-9)


def test_approx_poly_low_degree_shortcut():
    q = PolynomialFn(5, 2, {(1, 0): 2, (0, 0): 3})
    comb = approximate_polynomial_phase(q, 0.25, seed=1, k=3)
    assert comb.m == 1 and comb.l2_error == 0.0
    assert comb.terms[0].source == q and comb.terms[0].coefficient == 1


def test_approx_poly_trivial_eps():
    q = PolynomialFn(3, 1, {(2,): 1})
    comb = approximate_polynomial_phase(q, 1.0, seed=1)
    assert comb.m == 0 and comb.l2_error == 1.0
    assert naive_combination_error_poly(q, comb) == pytest.approx(1.0)


def test_approx_poly_validation():
    q = PolynomialFn(3, 1, {(2,): 1})
    with pytest.raises(ValueError):
        approximate_polynomial_phase(q, -0.1, seed=1)
    with pytest.raises(ValueError):
        approximate_polynomial_phase(q, 0.5, seed=1, k=1)  # degree exceeds k
    with pytest.raises(ValueError):
        approximate_polynomial_phase(q, 0.5, seed=1, k=3)  # k must stay below p
    # a nonzero linear phase has unbiased derivative, so k=1 cannot work
    with pytest.raises(HypothesisError):
        approximate_polynomial_phase(PolynomialFn(2, 1, {(1,): 1}), 0.5, seed=1, k=1)


# ------------------------------------------------------- uniformity norms

def test_gowers_norm_constant():
    table = FunctionTable([FiniteSpace(3, 1)], np.ones(3, dtype=complex))
    for k in (1, 2):
        assert gowers_norm(table, k) == pytest.approx(1.0)


def test_gowers_norm_structured_phase_is_one():
    # degree k-1 phases have full degree-k uniformity norm
    q = PolynomialFn(3, 1, {(1,): 2, (0,): 1})
    table = FunctionTable.from_polynomial(q)
    assert gowers_norm(table, 2) == pytest.approx(1.0)
    assert gowers_norm_exact(q, 2) == 1


def test_gowers_norm_square_phase_frozen():
    q = PolynomialFn(3, 1, {(2,): 1})
    table = FunctionTable.from_polynomial(q)
    assert gowers_norm(table, 2) == pytest.approx((1 / 3) ** 0.25, abs=1e-9)
    assert gowers_norm(table, 1) == pytest.approx((1 / 3) ** 0.5, abs=1e-9)
    assert gowers_norm_exact(q, 2) == Fraction(1, 3)


def test_gowers_norm_exact_matches_zero_set_density():
    # the 2^k-th power equals (p * density - 1) / (p - 1) for the zero set
    # of the derived symmetric form when the degree is exactly k
    rng = random.Random(46)
    checked = 0
    while checked < 6:
        p, k, n = 3, 2, rng.randrange(1, 3)
        terms = {}
        for _ in range(3):
            exps = [0] * n
            for _ in range(k):
                exps[rng.randrange(n)] += 1
            terms[tuple(exps)] = rng.randrange(p)
        q = PolynomialFn(p, n, terms)
        if q.degree < k:
            continue
        form = derived_symmetric_form(q, k)
        zero_set = MultilinearVariety(p, form.dims, [(tuple(range(k)), form)])
        expected = (p * zero_set.density() - 1) / (p - 1)
        assert gowers_norm_exact(q, k) == expected
        table = FunctionTable.from_polynomial(q)
        assert gowers_norm(table, k) ** (2**k) == pytest.approx(float(expected), abs=1e-9)
        checked += 1


def test_gowers_norm_validation_and_budget():
    q = PolynomialFn(3, 1, {(2,): 1})
    table = FunctionTable.from_polynomial(q)
    with pytest.raises(ValueError):
        gowers_norm(table, 0)
    with pytest.raises(BudgetExceededError):
        gowers_norm(table, 2, budget=5)
    with pytest.raises(ValueError):
        gowers_norm_exact(q, 1)  # degree exceeds k
    two_slot = FunctionTable([FiniteSpace(2, 1), FiniteSpace(2, 1)], np.ones(4))
    with pytest.raises(ValueError):
        gowers_norm(two_slot, 2)


# -------------------------------------------------- inverse correlation

def test_gowers_inverse_square_phase():
    q = PolynomialFn(3, 1, {(2,): 1})
    poly, corr = gowers_inverse_polynomial(q, 2, seed=9)
    assert poly.degree <= 1
    assert abs(corr) == pytest.approx(3**-0.5, abs=1e-9)
    # independent recomputation of the reported correlation
    w = cmath.exp(2j * cmath.pi / 3)
    redo = sum(w ** q.evaluate((x,)) * w ** -poly.evaluate((x,)) for x in range(3)) / 3
    assert abs(redo - corr) < 1e-12


def test_gowers_inverse_low_degree():
    q = PolynomialFn(3, 2, {(1, 0): 1})
    poly, corr = gowers_inverse_polynomial(q, 2, seed=2)
    assert poly == q and corr == 1


def test_gowers_inverse_two_variable():
    q = PolynomialFn(3, 2, {(1, 1): 1})
    poly, corr = gowers_inverse_polynomial(q, 2, seed=13)
    assert poly.degree <= 1
    w = cmath.exp(2j * cmath.pi / 3)
    redo = 0j
    for x in map(tuple, space_points(3, 2)):
        redo += w ** q.evaluate(x) * w ** -poly.evaluate(x)
    redo /= 9
    assert abs(redo - corr) < 1e-12
    assert abs(corr) >= 1 / (2 * 81)


# ----------------------------------------------------- tables, distance

def test_function_table_shape_check():
    with pytest.raises(ValueError):
        FunctionTable([FiniteSpace(2, 2)], np.ones(3))


def test_function_table_phase_norm():
    table = FunctionTable.from_form(dot_form(3, 1))
    assert np.allclose(np.abs(table.values), 1.0)
    assert table.l2_norm() == pytest.approx(1.0)


def test_l2_distance_empty_combination_is_one():
    form = dot_form(2, 2)
    table = FunctionTable.from_form(form)
    empty = PhaseCombination((), 1.0, Fraction(0))
    assert l2_distance(table, empty) == pytest.approx(1.0)
    assert l2_distance(table, table) == 0.0


def test_l2_distance_domain_mismatch():
    a = FunctionTable.from_form(dot_form(2, 2))
    b = FunctionTable.from_form(dot_form(2, 1))
    with pytest.raises(ValueError):
        a.distance(b)


def test_combination_table_rejects_wrong_domain():
    poly_term = PhaseTerm(complex(1), PolynomialFn(3, 2, {(1, 0): 1}))
    comb = PhaseCombination((poly_term,), 0.0)
    with pytest.raises(ValueError):
        combination_table(comb, [FiniteSpace(3, 1)])
