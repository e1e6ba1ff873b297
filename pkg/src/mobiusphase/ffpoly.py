"""Exact arithmetic in F_p[t] and the Moebius function.

A polynomial is a tuple of residues mod p stored little-endian: entry i is
the coefficient of t**i.  Tuples carry no trailing zeros and the zero
polynomial is the empty tuple, so equal polynomials have equal tuples.
deg(0) is the sentinel -1.

The module also enumerates the two standard families

    G_n : polynomials of degree < n   (an n-dimensional F_p-space),
    A_n : monic polynomials of degree exactly n (a coset of G_n),

in little-endian lexicographic order (the t^0 coefficient varies fastest),
and splits a polynomial into base-w coordinates: remainder, d-coefficient
chunks of the quotient, and the overflow above s chunks.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .budget import check_budget


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PolyFp:
    """A polynomial over F_p, little-endian coefficient tuple without trailing zeros."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        reduced = tuple(c % self.p for c in self.coeffs)
        while reduced and reduced[-1] == 0:
            reduced = reduced[:-1]
        object.__setattr__(self, "coeffs", reduced)

    @property
    def degree(self) -> int:
        """Degree, with deg(0) = -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def coeff_vector(self, n: int) -> tuple[int, ...]:
        """First n coefficients as a fixed-length vector; degree must be < n."""
        if self.degree >= n:
            raise ValueError(f"degree {self.degree} does not fit in {n} coefficients")
        return tuple(self.coeff(i) for i in range(n))

    def __add__(self, other: "PolyFp") -> "PolyFp":
        _check_same_field(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyFp(self.p, tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __neg__(self) -> "PolyFp":
        return PolyFp(self.p, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "PolyFp") -> "PolyFp":
        return self + (-other)

    def __mul__(self, other: "PolyFp") -> "PolyFp":
        _check_same_field(self, other)
        if self.is_zero() or other.is_zero():
            return PolyFp(self.p, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyFp(self.p, tuple(out))

    def scaled(self, c: int) -> "PolyFp":
        return PolyFp(self.p, tuple(c * a for a in self.coeffs))

    def shifted(self, k: int) -> "PolyFp":
        """Multiply by t**k."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        if self.is_zero():
            return self
        return PolyFp(self.p, (0,) * k + self.coeffs)

    def __divmod__(self, other: "PolyFp") -> tuple["PolyFp", "PolyFp"]:
        _check_same_field(self, other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.p
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return PolyFp(p, ()), self
        inv_lead = pow(other.leading(), -1, p)
        quot = [0] * (dq + 1)
        for i in range(dq, -1, -1):
            c = rem[i + other.degree] % p
            if c:
                q = (c * inv_lead) % p
                quot[i] = q
                for j, b in enumerate(other.coeffs):
                    rem[i + j] -= q * b
        return PolyFp(p, tuple(quot)), PolyFp(p, tuple(rem))

    def __floordiv__(self, other: "PolyFp") -> "PolyFp":
        return divmod(self, other)[0]

    def __mod__(self, other: "PolyFp") -> "PolyFp":
        return divmod(self, other)[1]

    def monic(self) -> "PolyFp":
        """The monic scalar multiple; zero stays zero."""
        if self.is_zero() or self.is_monic():
            return self
        return self.scaled(pow(self.leading(), -1, self.p))

    def derivative(self) -> "PolyFp":
        return PolyFp(self.p, tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append("t" if c == 1 else f"{c}*t")
            else:
                parts.append(f"t^{i}" if c == 1 else f"{c}*t^{i}")
        return " + ".join(reversed(parts))


def _check_same_field(f: PolyFp, g: PolyFp) -> None:
    if f.p != g.p:
        raise ValueError(f"mixed moduli {f.p} and {g.p}")


def zero(p: int) -> PolyFp:
    return PolyFp(p, ())


def one(p: int) -> PolyFp:
    return PolyFp(p, (1,))


def variable(p: int) -> PolyFp:
    """The polynomial t."""
    return PolyFp(p, (0, 1))


def from_vector(p: int, vec) -> PolyFp:
    """Polynomial with little-endian coefficient vector vec (trailing zeros ok)."""
    return PolyFp(p, tuple(int(c) for c in vec))


def poly_gcd(f: PolyFp, g: PolyFp) -> PolyFp:
    """Monic greatest common divisor; gcd(0, 0) = 0."""
    _check_same_field(f, g)
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def pow_mod(base: PolyFp, exp: int, mod: PolyFp) -> PolyFp:
    """base**exp reduced mod `mod`, by square-and-multiply on the exponent bits."""
    if exp < 0:
        raise ValueError("exponent must be nonnegative")
    if mod.degree < 1:
        raise ValueError("modulus must have degree >= 1")
    result = one(base.p)
    base = base % mod
    while exp:
        if exp & 1:
            result = (result * base) % mod
        base = (base * base) % mod
        exp >>= 1
    return result


def is_squarefree(f: PolyFp) -> bool:
    """Whether f has no repeated irreducible factor.

    Uses the derivative test: f is squarefree iff f' != 0 and gcd(f, f') is
    constant.  In characteristic p a vanishing derivative means f is a p-th
    power, hence never squarefree for deg f >= 1.
    """
    if f.is_zero() or f.degree == 0:
        raise ValueError("squarefreeness is asked of polynomials of degree >= 1")
    df = f.derivative()
    if df.is_zero():
        return False
    return poly_gcd(f, df).degree == 0


def count_irreducible_factors(f: PolyFp) -> int:
    """Number of monic irreducible factors of a squarefree f (unit ignored).

    Distinct-degree splitting: for d = 1, 2, ... the gcd of f with
    t**(p**d) - t collects every irreducible factor of degree dividing d;
    on a squarefree input, after removing lower degrees, the d-th gcd g_d
    is the product of the degree-d factors and contributes deg(g_d)/d.
    The Frobenius power t**(p**d) is maintained by modular exponentiation,
    never materializing a degree p**d polynomial.
    """
    if f.is_zero() or f.degree == 0:
        raise ValueError("factor counting is asked of polynomials of degree >= 1")
    if not is_squarefree(f):
        raise ValueError("factor counting requires a squarefree input")
    p = f.p
    f = f.monic()
    t = variable(p)
    count = 0
    d = 0
    h = t % f
    while f.degree >= 2 * (d + 1):
        d += 1
        h = pow_mod(h, p, f)
        g = poly_gcd(f, h - t)
        if g.degree > 0:
            count += g.degree // d
            f = f // g
            h = h % f if f.degree >= 1 else zero(p)
    if f.degree >= 1:
        count += 1
    return count


def mobius(f: PolyFp) -> int:
    """Moebius function on F_p[t].

    mu(0) = 0, mu(nonzero constant) = +1, mu(c*f) = mu(f), mu vanishes on
    non-squarefree inputs, and otherwise mu(f) = (-1)**(number of monic
    irreducible factors).
    """
    if f.is_zero():
        return 0
    if f.degree == 0:
        return 1
    if not is_squarefree(f):
        return 0
    return -1 if count_irreducible_factors(f) % 2 else 1


@dataclass(frozen=True)
class SpaceIndex:
    """Name of a polynomial family: kind "G" (degree < n) or "A" (monic degree n)."""

    p: int
    n: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("G", "A"):
            raise ValueError(f"kind must be 'G' or 'A', got {self.kind!r}")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    @property
    def size(self) -> int:
        return self.p**self.n


def enumerate_space(idx: SpaceIndex, budget: int | None = None) -> Iterator[PolyFp]:
    """Yield the members of G_n or A_n in little-endian lexicographic order."""
    check_budget(idx.size, budget, what=f"enumeration of {idx.kind}_{idx.n}")
    p, n = idx.p, idx.n
    lead = (1,) if idx.kind == "A" else ()
    digits = [0] * n
    while True:
        yield PolyFp(p, tuple(digits) + lead) if lead else PolyFp(p, tuple(digits))
        i = 0
        while i < n and digits[i] == p - 1:
            digits[i] = 0
            i += 1
        if i == n:
            return
        digits[i] += 1


@lru_cache(maxsize=None)
def _space_list(p: int, n: int, kind: str) -> tuple[PolyFp, ...]:
    # budget already approved by the caller in space_elements
    idx = SpaceIndex(p, n, kind)
    return tuple(enumerate_space(idx, budget=idx.size))


def space_elements(idx: SpaceIndex, budget: int | None = None) -> tuple[PolyFp, ...]:
    """The full family as a cached tuple, in enumeration order."""
    check_budget(idx.size, budget, what=f"enumeration of {idx.kind}_{idx.n}")
    return _space_list(idx.p, idx.n, idx.kind)


@dataclass(frozen=True)
class BaseWDecomposition:
    """x = res + w*(chunks[0] + t^d*chunks[1] + ... + t^((s-1)d)*chunks[s-1]) + over."""

    w: PolyFp
    d: int
    s: int
    res: PolyFp
    chunks: tuple[PolyFp, ...]
    over: PolyFp

    def reconstruct(self) -> PolyFp:
        p = self.w.p
        main = zero(p)
        for j, chunk in enumerate(self.chunks):
            main = main + chunk.shifted(j * self.d)
        return self.res + self.w * main + self.over


def base_w_decompose(x: PolyFp, w: PolyFp, d: int, s: int) -> BaseWDecomposition:
    """Split x into base-w coordinates.

    res is the remainder of x mod w; the quotient is cut into s chunks of d
    coefficients each (members of G_d); whatever sits above s*d coefficients
    goes to the overflow term, which is divisible by w * t**(s*d).  The split
    is F_p-linear in x and reconstructs exactly.
    """
    if w.is_zero():
        raise ValueError("w must be nonzero")
    if d < 1 or s < 1:
        raise ValueError("chunk size d and chunk count s must be >= 1")
    if w.degree > d:
        raise ValueError(f"deg w = {w.degree} exceeds chunk size d = {d}")
    _check_same_field(x, w)
    q, res = divmod(x, w)
    chunks = tuple(PolyFp(x.p, tuple(q.coeff(j * d + i) for i in range(d))) for j in range(s))
    over_quot = PolyFp(x.p, tuple(q.coeffs[s * d:]))
    over = w * over_quot.shifted(s * d)
    return BaseWDecomposition(w=w, d=d, s=s, res=res, chunks=chunks, over=over)
