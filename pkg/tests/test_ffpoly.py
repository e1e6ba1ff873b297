"""Ring arithmetic, Moebius function, enumeration and base-w splitting.

The factorization oracle below is written against bare coefficient tuples and
shares no code with the package: trial division over a sieved irreducible
table.  Derived expectations in this file were computed with it and frozen.
"""

import itertools
import random

import pytest

from mobiusphase.budget import BudgetExceededError
from mobiusphase.ffpoly import (
    BaseWDecomposition,
    PolyFp,
    SpaceIndex,
    base_w_decompose,
    count_irreducible_factors,
    enumerate_space,
    from_vector,
    is_squarefree,
    mobius,
    one,
    poly_gcd,
    pow_mod,
    space_elements,
    variable,
    zero,
)


# ---------------------------------------------------------------- oracle

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _omul(p, a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _odivmod(p, a, b):
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    if da < db:
        return (), _trim(a)
    inv = pow(b[-1], -1, p)
    q = [0] * (da - db + 1)
    for i in range(da - db, -1, -1):
        c = a[i + db] % p
        if c:
            f = (c * inv) % p
            q[i] = f
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - f * y) % p
    return _trim(q), _trim(a)


def _omonic(p, n):
    for digits in itertools.product(range(p), repeat=n):
        yield tuple(digits) + (1,)


def _oirreducibles(p, max_deg):
    irr = []
    for d in range(1, max_deg + 1):
        for f in _omonic(p, d):
            if all(_odivmod(p, f, g)[1] != () for g in irr if 2 * (len(g) - 1) <= d):
                irr.append(f)
    return irr


def _ofactor(p, f):
    f = _trim(c % p for c in f)
    assert f, "oracle factorization of zero"
    if len(f) == 1:
        return []
    out = []
    for g in _oirreducibles(p, len(f) - 1):
        while True:
            q, r = _odivmod(p, f, g)
            if r != ():
                break
            out.append(g)
            f = q
    assert len(f) == 1
    return out


def _omobius(p, f):
    f = _trim(c % p for c in f)
    if not f:
        return 0
    fac = _ofactor(p, f)
    if len(set(fac)) != len(fac):
        return 0
    return -1 if len(fac) % 2 else 1


# ---------------------------------------------------------------- arithmetic

def test_normalization_and_degree():
    assert PolyFp(2, (1, 1, 0)).coeffs == (1, 1)
    assert PolyFp(3, (4, -1)).coeffs == (1, 2)
    assert zero(5).degree == -1
    assert one(5).degree == 0
    assert PolyFp(2, (1, 0, 1)).degree == 2
    with pytest.raises(ValueError):
        PolyFp(4, (1,))


def test_divrem_frozen_example():
    # (t^3 + t + 1) = t * (t^2 + 1) + 1 over F_2
    f = PolyFp(2, (1, 1, 0, 1))
    g = PolyFp(2, (1, 0, 1))
    q, r = divmod(f, g)
    assert q == variable(2)
    assert r == one(2)


def test_divrem_reconstruction_random():
    rng = random.Random(11)
    for p in (2, 3, 5):
        for _ in range(200):
            f = from_vector(p, [rng.randrange(p) for _ in range(rng.randrange(0, 9))])
            g = from_vector(p, [rng.randrange(p) for _ in range(rng.randrange(1, 6))])
            if g.is_zero():
                continue
            q, r = divmod(f, g)
            assert q * g + r == f
            assert r.degree < g.degree


def test_gcd_frozen_and_properties():
    # gcd(t^2 + t, t^2 + 1) = t + 1 over F_2
    assert poly_gcd(PolyFp(2, (0, 1, 1)), PolyFp(2, (1, 0, 1))) == PolyFp(2, (1, 1))
    assert poly_gcd(zero(3), zero(3)) == zero(3)
    f = PolyFp(3, (1, 2, 1))
    assert poly_gcd(f, zero(3)) == f.monic()
    rng = random.Random(7)
    for _ in range(100):
        p = rng.choice((2, 3, 5))
        f = from_vector(p, [rng.randrange(p) for _ in range(rng.randrange(1, 7))])
        g = from_vector(p, [rng.randrange(p) for _ in range(rng.randrange(1, 7))])
        d = poly_gcd(f, g)
        if d.is_zero():
            assert f.is_zero() and g.is_zero()
            continue
        assert d.is_monic()
        assert (f % d).is_zero() and (g % d).is_zero()


def test_derivative():
    # (t^2 + t + 1)' = 1 over F_2
    assert PolyFp(2, (1, 1, 1)).derivative() == one(2)
    assert PolyFp(3, (0, 0, 0, 1)).derivative() == zero(3)  # (t^3)' = 3t^2 = 0
    assert PolyFp(5, (2, 3, 4)).derivative() == PolyFp(5, (3, 3))


def test_pow_mod_matches_naive():
    p = 3
    f = PolyFp(p, (1, 0, 2, 1))
    b = PolyFp(p, (2, 1))
    naive = one(p)
    for _ in range(11):
        naive = (naive * b) % f
    assert pow_mod(b, 11, f) == naive


# ------------------------------------------------------- squarefree / count

def test_squarefree_examples():
    assert is_squarefree(PolyFp(2, (1, 1, 1)))               # t^2+t+1 irreducible
    assert not is_squarefree(PolyFp(2, (1, 0, 1, 0, 1)))     # t^4+t^2+1 = (t^2+t+1)^2
    assert not is_squarefree(PolyFp(3, (0, 0, 0, 1)))        # t^3, derivative vanishes
    assert is_squarefree(PolyFp(2, (0, 1, 1)))               # t(t+1)
    with pytest.raises(ValueError):
        is_squarefree(zero(2))
    with pytest.raises(ValueError):
        is_squarefree(one(2))


def test_count_irreducible_factors_frozen():
    assert count_irreducible_factors(PolyFp(2, (1, 0, 1, 1))) == 1  # t^3+t^2+1
    assert count_irreducible_factors(PolyFp(2, (0, 1, 1))) == 2     # t(t+1)
    with pytest.raises(ValueError):
        count_irreducible_factors(PolyFp(2, (1, 0, 1, 0, 1)))       # not squarefree


def test_count_matches_oracle_exhaustive():
    for p, max_deg in ((2, 5), (3, 4), (5, 3)):
        for deg in range(1, max_deg + 1):
            for tail in itertools.product(range(p), repeat=deg):
                f = PolyFp(p, tail + (1,))
                fac = _ofactor(p, f.coeffs)
                if len(set(fac)) == len(fac):
                    assert is_squarefree(f)
                    assert count_irreducible_factors(f) == len(fac)
                else:
                    assert not is_squarefree(f)


def test_mobius_values_and_conventions():
    assert mobius(PolyFp(2, (0, 1))) == -1     # mu(t)
    assert mobius(PolyFp(2, (0, 1, 1))) == 1   # mu(t^2+t)
    assert mobius(PolyFp(2, (0, 0, 1))) == 0   # mu(t^2)
    assert mobius(zero(3)) == 0
    assert mobius(PolyFp(3, (2,))) == 1
    # unit invariance: mu(c*f) = mu(f)
    rng = random.Random(5)
    for _ in range(100):
        p = rng.choice((3, 5))
        f = from_vector(p, [rng.randrange(p) for _ in range(rng.randrange(1, 6))])
        c = rng.randrange(1, p)
        assert mobius(f.scaled(c)) == mobius(f)


def test_mobius_matches_oracle():
    for p, n in ((2, 4), (3, 3), (5, 2)):
        for vec in itertools.product(range(p), repeat=n + 1):
            assert mobius(from_vector(p, vec)) == _omobius(p, vec)


def test_mobius_sum_identity():
    # sum over monic degree 1 is -p; over monic degree n >= 2 it vanishes
    for p, max_n in ((2, 8), (3, 5), (5, 3)):
        assert sum(mobius(f) for f in enumerate_space(SpaceIndex(p, 1, "A"))) == -p
        for n in range(2, max_n + 1):
            assert sum(mobius(f) for f in enumerate_space(SpaceIndex(p, n, "A"))) == 0


# ---------------------------------------------------------------- spaces

def test_enumeration_order_and_sizes():
    g2 = list(enumerate_space(SpaceIndex(2, 2, "G")))
    assert g2 == [zero(2), one(2), PolyFp(2, (0, 1)), PolyFp(2, (1, 1))]
    a1 = list(enumerate_space(SpaceIndex(3, 1, "A")))
    assert a1 == [PolyFp(3, (0, 1)), PolyFp(3, (1, 1)), PolyFp(3, (2, 1))]
    for idx in (SpaceIndex(2, 5, "G"), SpaceIndex(3, 3, "A"), SpaceIndex(5, 2, "G")):
        elems = list(enumerate_space(idx))
        assert len(elems) == idx.size == len(set(elems))
        if idx.kind == "A":
            assert all(f.is_monic() and f.degree == idx.n for f in elems)
        else:
            assert all(f.degree < idx.n for f in elems)
    assert space_elements(SpaceIndex(2, 2, "G")) == tuple(g2)
    # degenerate n = 0
    assert list(enumerate_space(SpaceIndex(3, 0, "G"))) == [zero(3)]
    assert list(enumerate_space(SpaceIndex(3, 0, "A"))) == [one(3)]


def test_enumeration_budget_refused():
    with pytest.raises(BudgetExceededError):
        list(enumerate_space(SpaceIndex(2, 8, "G"), budget=255))


# ---------------------------------------------------------------- base-w

def test_base_w_frozen_example():
    # x = t^5+t^3+t, w = t^2+1, d = 3, s = 2 over F_2
    x = PolyFp(2, (0, 1, 0, 1, 0, 1))
    w = PolyFp(2, (1, 0, 1))
    dec = base_w_decompose(x, w, d=3, s=2)
    assert dec.res == variable(2)
    assert dec.chunks == (zero(2), one(2))
    assert dec.over == zero(2)
    assert dec.reconstruct() == x


def test_base_w_properties_random():
    rng = random.Random(23)
    for _ in range(300):
        p = rng.choice((2, 3, 5))
        d = rng.randrange(1, 4)
        s = rng.randrange(1, 4)
        w = from_vector(p, [rng.randrange(p) for _ in range(rng.randrange(1, d + 2))])
        if w.is_zero() or w.degree > d:
            continue
        n = rng.randrange(0, 10)
        x = from_vector(p, [rng.randrange(p) for _ in range(n)])
        y = from_vector(p, [rng.randrange(p) for _ in range(n)])
        dx = base_w_decompose(x, w, d, s)
        assert dx.reconstruct() == x
        assert dx.res.degree < w.degree
        assert all(c.degree < d for c in dx.chunks)
        assert len(dx.chunks) == s
        if not dx.over.is_zero():
            # overflow is divisible by w * t^(s*d)
            q, r = divmod(dx.over, w.shifted(s * d))
            assert r.is_zero()
        # F_p-linearity of every coordinate
        c = rng.randrange(p)
        dy = base_w_decompose(y, w, d, s)
        dz = base_w_decompose(x.scaled(c) + y, w, d, s)
        assert dz.res == dx.res.scaled(c) + dy.res
        assert all(
            zc == xc.scaled(c) + yc for zc, xc, yc in zip(dz.chunks, dx.chunks, dy.chunks)
        )
        assert dz.over == dx.over.scaled(c) + dy.over


def test_base_w_rejects_bad_inputs():
    with pytest.raises(ValueError):
        base_w_decompose(one(2), zero(2), 1, 1)
    with pytest.raises(ValueError):
        base_w_decompose(one(2), PolyFp(2, (1, 0, 1)), 1, 2)  # deg w > d
