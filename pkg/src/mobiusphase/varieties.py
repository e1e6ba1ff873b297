"""Multilinear varieties: exact density, convolutions, fiber pipeline.

A variety is the common zero set of multilinear forms, each depending on a
subset of the slots.  Everything here enumerates the ambient product space,
so densities and memberships are exact; the only randomness is the seeded
sampling in the external approximation and the dependent random choice.
"""

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .budget import HypothesisError, check_budget
from .forms import (
    FiniteSpace,
    MultilinearForm,
    product_point_grids,
    product_size,
    space_points,
)

Constraint = tuple[tuple[int, ...], MultilinearForm]


def _normalize_constraint(k, ambient, subset, form):
    subset = tuple(int(i) for i in subset)
    if len(set(subset)) != len(subset) or sorted(subset) != list(subset):
        raise ValueError(f"constraint subset must be sorted and distinct: {subset}")
    if not subset:
        raise ValueError("constraint subset must be nonempty")
    if subset[0] < 0 or subset[-1] >= k:
        raise ValueError(f"constraint subset {subset} out of range for {k} slots")
    expected = tuple(ambient[i] for i in subset)
    if form.dims != expected:
        raise ValueError(f"constraint form dims {form.dims} != ambient dims {expected}")
    return subset, form


class MultilinearVariety:
    """Zero set of multilinear constraints inside a product of F_p spaces."""

    def __init__(self, p: int, ambient: Sequence[int], constraints=()):
        self.p = int(p)
        self.ambient = tuple(int(d) for d in ambient)
        if any(d < 0 for d in self.ambient):
            raise ValueError(f"ambient dimensions must be >= 0: {self.ambient}")
        k = len(self.ambient)
        normalized = []
        for subset, form in constraints:
            if form.p != self.p:
                raise ValueError(f"constraint prime {form.p} != variety prime {self.p}")
            normalized.append(_normalize_constraint(k, self.ambient, subset, form))
        self.constraints: tuple[Constraint, ...] = tuple(normalized)

    @classmethod
    def full(cls, p: int, ambient) -> "MultilinearVariety":
        return cls(p, ambient, ())

    @property
    def k(self) -> int:
        return len(self.ambient)

    @property
    def codimension(self) -> int:
        return len(self.constraints)

    @property
    def is_strictly_multilinear(self) -> bool:
        return all(len(s) == self.k for s, _ in self.constraints)

    @property
    def ambient_size(self) -> int:
        return self.p ** sum(self.ambient)

    def spaces(self) -> list[FiniteSpace]:
        return [FiniteSpace(self.p, d) for d in self.ambient]

    def contains(self, point) -> bool:
        """Membership of a point given as one vector per slot."""
        if len(point) != self.k:
            raise ValueError(f"expected {self.k} vectors, got {len(point)}")
        for subset, form in self.constraints:
            if form.evaluate([point[i] for i in subset]) != 0:
                return False
        return True

    def membership_tensor(self, budget: Optional[int] = None) -> np.ndarray:
        """Boolean array of shape p^ambient marking the variety's points.

        Axis i is indexed by the slot-i point index (little-endian digits),
        so flattening in Fortran order matches the product grid order.
        """
        sizes = tuple(self.p**d for d in self.ambient)
        check_budget(int(np.prod(sizes, dtype=object)), budget, what="variety enumeration")
        mask = np.ones(sizes, dtype=bool)
        for subset, form in self.constraints:
            grids = product_point_grids([FiniteSpace(self.p, self.ambient[i]) for i in subset],
                                        budget=None)
            vals = form.evaluate_on_grids(grids)
            sub_sizes = tuple(self.p ** self.ambient[i] for i in subset)
            cube = vals.reshape(sub_sizes, order="F") == 0
            shape = tuple(sizes[i] if i in subset else 1 for i in range(self.k))
            mask &= cube.reshape(shape)
        return mask

    def point_count(self, budget: Optional[int] = None) -> int:
        return int(np.count_nonzero(self.membership_tensor(budget)))

    def density(self, budget: Optional[int] = None) -> Fraction:
        return Fraction(self.point_count(budget), self.ambient_size)

    def points(self, budget: Optional[int] = None) -> list[tuple[tuple[int, ...], ...]]:
        """All points, each a tuple of one coefficient tuple per slot."""
        mask = self.membership_tensor(budget)
        slot_pts = [space_points(self.p, d) for d in self.ambient]
        out = []
        for idx in np.argwhere(mask):
            out.append(tuple(tuple(int(v) for v in slot_pts[i][j]) for i, j in enumerate(idx)))
        return out

    def intersected(self, other: "MultilinearVariety") -> "MultilinearVariety":
        if self.p != other.p or self.ambient != other.ambient:
            raise ValueError("varieties live in different ambient spaces")
        return MultilinearVariety(self.p, self.ambient, self.constraints + other.constraints)

    def __eq__(self, other):
        return (
            isinstance(other, MultilinearVariety)
            and self.p == other.p
            and self.ambient == other.ambient
            and self.constraints == other.constraints
        )

    def __repr__(self):
        return (f"MultilinearVariety(p={self.p}, ambient={self.ambient}, "
                f"codim={self.codimension})")


def variety_density(w: MultilinearVariety, budget: Optional[int] = None) -> Fraction:
    """Exact density |W|/|ambient|; always >= p^-codimension."""
    return w.density(budget)


# ------------------------------------------------- directional convolutions

@lru_cache(maxsize=None)
def add_index_table(p: int, dim: int) -> np.ndarray:
    """Table A with A[i, j] = index of (point i + point j) in F_p^dim."""
    pts = space_points(p, dim).astype(np.int64)
    powers = p ** np.arange(dim, dtype=np.int64)
    summed = (pts[:, None, :] + pts[None, :, :]) % p
    return (summed @ powers).astype(np.intp)


def _convolve_direction(values: np.ndarray, axis: int, add: np.ndarray) -> np.ndarray:
    """Unnormalized convolution sum_y f(..y+x..) f(..y..) along one axis."""
    moved = np.moveaxis(values, axis, 0)
    gathered = moved[add]  # shape (y, x, rest...)
    out = (gathered * moved[:, None, ...]).sum(axis=0)
    return np.moveaxis(out, 0, axis)


@dataclass
class ConvolutionCheck:
    positive: bool
    min_value: Fraction
    precondition_ok: bool
    size_threshold: Fraction
    bad_count: int
    codimension: int

    def __bool__(self) -> bool:
        return self.positive


def _point_set_tensor(w: MultilinearVariety, points) -> np.ndarray:
    """Boolean tensor for an explicit point list; points must lie in W."""
    if isinstance(points, np.ndarray) and points.dtype == bool:
        return points
    sizes = tuple(w.p**d for d in w.ambient)
    mask = np.zeros(sizes, dtype=bool)
    powers = [w.p ** np.arange(d, dtype=np.int64) for d in w.ambient]
    for point in points:
        if not w.contains(point):
            raise ValueError(f"point {point} is not in the variety")
        idx = tuple(int(np.dot(np.asarray(v, dtype=np.int64) % w.p, powers[i]))
                    for i, v in enumerate(point))
        mask[idx] = True
    return mask


def directional_convolution_positive(w: MultilinearVariety, removed=(),
                                     budget: Optional[int] = None) -> ConvolutionCheck:
    """Iterated convolution of the indicator of W minus a small removed set.

    Applies the direction-i convolution for i = 1..k to 1_(W \\ B) and checks
    strict positivity at every point of W.  The guarantee needs
    |B| <= 2^-2k p^-(k r) |ambient| with r the constraint count; when that
    size precondition fails the check still runs and the flag records it.
    """
    wmask = w.membership_tensor(budget)
    bmask = _point_set_tensor(w, removed)
    if np.any(bmask & ~wmask):
        raise ValueError("removed set is not contained in the variety")
    k, p = w.k, w.p
    r = w.codimension
    threshold = Fraction(w.ambient_size, 2 ** (2 * k) * p ** (k * r))
    bad_count = int(np.count_nonzero(bmask))
    precondition_ok = Fraction(bad_count) <= threshold

    sizes = tuple(p**d for d in w.ambient)
    # the unnormalized values grow like prod sizes[i]^(2^(k-1-i)); go to
    # arbitrary precision when that exceeds the int64 range
    denom = 1
    for s in sizes:
        denom = s * denom * denom
    dtype = np.int64 if denom < 2**62 else object
    values = (wmask & ~bmask).astype(dtype)
    for axis in range(k):
        values = _convolve_direction(values, axis, add_index_table(p, w.ambient[axis]))
    on_w = values[wmask]
    if on_w.size == 0:
        return ConvolutionCheck(True, Fraction(0), precondition_ok, threshold, bad_count, r)
    min_val = min(int(v) for v in on_w.ravel())
    return ConvolutionCheck(min_val > 0, Fraction(min_val, denom), precondition_ok,
                            threshold, bad_count, r)


# ------------------------------------------------- external approximation

@dataclass
class ExternalApproximation:
    variety: MultilinearVariety
    s: int
    taus: tuple[tuple[int, ...], ...]
    measured_excess: Fraction
    target_excess: Fraction
    attempts: int


def external_approximation(coords: Sequence[MultilinearForm], target_excess,
                           seed: int, budget: Optional[int] = None,
                           s_cap: Optional[int] = None,
                           attempts_per_level: int = 40) -> ExternalApproximation:
    """Approximate the joint zero set Z of the coordinate forms from outside.

    Draws s random dual vectors tau and keeps the strictly-multilinear
    variety cut out by the forms tau . coords; resamples (growing s) until
    the exact excess |V \\ Z| / |ambient| is at most target_excess.  V
    always contains Z since the new forms are combinations of the old ones.
    """
    coords = list(coords)
    if not coords:
        raise ValueError("need at least one coordinate form (may be zero)")
    p, dims = coords[0].p, coords[0].dims
    for f in coords:
        if f.p != p or f.dims != dims:
            raise ValueError("coordinate forms must share prime and dims")
    target = Fraction(target_excess)
    if target < 0:
        raise ValueError(f"target excess must be >= 0, got {target}")
    total = p ** sum(dims)
    check_budget(total, budget, what="zero-set enumeration")
    s_total = len(coords)

    grids = product_point_grids([FiniteSpace(p, d) for d in dims], budget=None)
    coord_vals = np.stack([f.evaluate_on_grids(grids) for f in coords], axis=1)
    z_mask = ~coord_vals.any(axis=1)
    outside = int(np.count_nonzero(~z_mask))

    def combo_form(tau):
        tensor = sum(int(t) * f.tensor for t, f in zip(tau, coords)) % p
        return MultilinearForm(p, dims, np.asarray(tensor))

    def measure(taus):
        vals = (coord_vals @ np.array(taus).T) % p
        v_mask = ~vals.any(axis=1)
        return Fraction(int(np.count_nonzero(v_mask & ~z_mask)), total)

    if target > 0:
        s_start = max(1, math.ceil(math.log(outside / (target * total), p)) + 1) \
            if outside else 1
    else:
        s_start = max(1, s_total)
    if s_cap is None:
        inv = math.ceil(math.log(1 / target, p)) if 0 < target < 1 else 1
        s_cap = max(s_start, s_total, inv)
    rng = random.Random(seed)
    attempts = 0
    for s in range(min(s_start, s_cap), s_cap + 1):
        for _ in range(attempts_per_level):
            attempts += 1
            taus = tuple(tuple(rng.randrange(p) for _ in range(s_total)) for _ in range(s))
            excess = measure(taus)
            if excess <= target:
                variety = MultilinearVariety(
                    p, dims, [(tuple(range(len(dims))), combo_form(t)) for t in taus])
                return ExternalApproximation(variety, s, taus, excess, target, attempts)
    # deterministic fallback: the standard dual basis cuts V = Z exactly
    if s_cap >= s_total:
        taus = tuple(tuple(int(i == j) for j in range(s_total)) for i in range(s_total))
        excess = measure(taus)
        if excess <= target:
            variety = MultilinearVariety(
                p, dims, [(tuple(range(len(dims))), combo_form(t)) for t in taus])
            return ExternalApproximation(variety, s_total, taus, excess, target, attempts + 1)
    raise HypothesisError(
        f"external approximation: excess <= {target} unreachable with s <= {s_cap}")


# ------------------------------------------------------ subvariety search

@dataclass
class FinderResult:
    status: str  # "found" | "not_found" | "budget_exhausted"
    variety: Optional[MultilinearVariety]
    combos_tried: int

    def __bool__(self) -> bool:
        return self.status == "found"


def _dictionary_forms(p, ambient, extra):
    """Candidate constraints: sparse 0/1 tensors plus single-slot 0/1 forms."""
    k = len(ambient)
    seen = set()
    out = []

    def push(subset, form):
        key = (subset, form.tensor.tobytes(), form.dims)
        if key not in seen:
            seen.add(key)
            out.append((subset, form))

    for r in range(1, k + 1):
        for subset in itertools.combinations(range(k), r):
            dims = tuple(ambient[i] for i in subset)
            cells = list(itertools.product(*(range(d) for d in dims)))
            for cell in cells:
                t = np.zeros(dims, dtype=np.int64)
                t[cell] = 1
                push(subset, MultilinearForm(p, dims, t))
            for c1, c2 in itertools.combinations(cells, 2):
                t = np.zeros(dims, dtype=np.int64)
                t[c1] = 1
                t[c2] = 1
                push(subset, MultilinearForm(p, dims, t))
    for i in range(k):
        d = ambient[i]
        for coeffs in itertools.product((0, 1), repeat=d):
            if any(coeffs):
                t = np.array(coeffs, dtype=np.int64)
                push((i,), MultilinearForm(p, (d,), t))
    for subset, form in extra:
        if not form.is_zero():
            push(tuple(subset), form)
    return out


def subvariety_finder(w: MultilinearVariety, max_codim: int, extra_candidates=(),
                      include_own_constraints: bool = True,
                      combo_budget: int = 50_000,
                      budget: Optional[int] = None) -> FinderResult:
    """Exhaustive search for a small variety contained in W.

    Tries conjunctions of up to max_codim constraints from a fixed
    dictionary (0/1 tensors with at most two nonzero entries on every slot
    subset, all single-slot 0/1 linear forms, the variety's own constraints,
    and any extra candidates), verifying containment pointwise.
    """
    wmask = w.membership_tensor(budget)
    if wmask.all():
        return FinderResult("found", MultilinearVariety.full(w.p, w.ambient), 1)
    extra = list(extra_candidates)
    if include_own_constraints:
        extra.extend(w.constraints)
    candidates = _dictionary_forms(w.p, w.ambient, extra)
    masks = []
    for subset, form in candidates:
        v = MultilinearVariety(w.p, w.ambient, [(subset, form)])
        masks.append(v.membership_tensor(None))
    tried = 1  # the empty conjunction was checked above
    for r in range(1, max_codim + 1):
        for combo in itertools.combinations(range(len(candidates)), r):
            if tried >= combo_budget:
                return FinderResult("budget_exhausted", None, tried)
            tried += 1
            inter = masks[combo[0]].copy()
            for i in combo[1:]:
                inter &= masks[i]
            if not np.any(inter & ~wmask):
                constraints = [candidates[i] for i in combo]
                return FinderResult(
                    "found", MultilinearVariety(w.p, w.ambient, constraints), tried)
    return FinderResult("not_found", None, tried)


# --------------------------------------------------- biased fiber pipeline

@dataclass
class FiberReport:
    variety: Optional[MultilinearVariety]
    status: str  # "certified" | "finder_failed"
    c_input: Fraction
    c_tilde_measured: Optional[Fraction]
    chain_bound: Fraction
    target_floor: Optional[Fraction]
    epsilon: Fraction
    c_prime: Fraction
    finder_K: int
    max_codim: int
    seed: int
    draws: int
    chosen_shift: tuple[tuple[int, ...], ...]
    set_a_density: Fraction
    bad_count: int
    convolution: Optional[ConvolutionCheck]
    verification: tuple  # ((point, exact slice bias), ...)
    finder: FinderResult


def slice_bias_table(alpha: MultilinearForm, k: int, budget: Optional[int] = None):
    """Exact bias of every slice alpha(x, .) with x in the first k slots.

    Returns (matrix M, n_front, n_back) where M[a, b] flags front index a
    and middle index b (all slots after the first k except the last one)
    such that the last-slot functional vanishes identically; the slice bias
    at a is the row density sum_b M[a, b] / n_back.
    """
    ell = alpha.k - k
    if not 1 <= ell:
        raise ValueError(f"need at least one trailing slot: k={k}, total={alpha.k}")
    spaces = alpha.spaces()[:-1]
    check_budget(product_size(spaces) * alpha.dims[-1], budget, what="slice bias table")
    grids = product_point_grids(spaces, budget=None)
    last_dim = alpha.dims[-1]
    cols = []
    for j in range(last_dim):
        sub = MultilinearForm(alpha.p, alpha.dims[:-1], alpha.tensor[..., j])
        cols.append(sub.evaluate_on_grids(grids))
    vanish = ~np.stack(cols, axis=1).any(axis=1)
    n_front = product_size(spaces[:k])
    n_mid = product_size(spaces[k:])
    return vanish.reshape((n_front, n_mid), order="F"), n_front, n_mid


def biased_fiber_variety(alpha: MultilinearForm, k: int, c, seed: int,
                         finder_K: int = 1, draws: int = 64,
                         combo_budget: int = 50_000,
                         budget: Optional[int] = None) -> FiberReport:
    """Locate a small variety of front slices that all have large bias.

    Implements the construction behind the fiber theorem: collect the pairs
    (a, b) whose slice functional vanishes, make a dependent random choice
    of the middle coordinates maximizing |A| - (1/epsilon)|B|, search for a
    small subvariety of the resulting variety A, check the convolution
    positivity of A minus the bad set on it, and re-verify the slice bias
    of every surviving point exactly.
    """
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ValueError(f"need 0 < c <= 1, got {c}")
    ell = alpha.k - k
    if ell < 1:
        raise ValueError(f"need at least one back slot: k={k}, arity={alpha.k}")
    p = alpha.p
    front_dims = alpha.dims[:k]
    mid_spaces = [FiniteSpace(p, d) for d in alpha.dims[k:-1]]

    vanish, n_front, n_mid = slice_bias_table(alpha, k, budget)
    counts = vanish.sum(axis=1)
    biased = [a for a in range(n_front) if Fraction(int(counts[a]), n_mid) >= c]
    if Fraction(len(biased), n_front) < c:
        raise HypothesisError(
            f"slice-bias hypothesis fails: only {len(biased)}/{n_front} slices "
            f"have bias >= {c}, below the required density {c}")

    epsilon = Fraction(1, 2 ** (2 * k) * p ** (2 * k * finder_K)) * c ** (2 * k * finder_K)
    c_prime = c * c * epsilon / 2
    max_codim = math.floor(finder_K * (2 * math.log(1 / c, p) + 2)) if c < 1 \
        else 2 * finder_K
    chain_bound = c_prime ** (2**k)

    # dependent random choice over the middle coordinates
    rng = random.Random(seed)
    mid_sizes = [sp.size for sp in mid_spaces]
    best = None
    for _ in range(max(1, draws)):
        digits = [rng.randrange(s) for s in mid_sizes]
        b_idx = 0
        for s, dig in zip(reversed(mid_sizes), reversed(digits)):
            b_idx = b_idx * s + dig
        in_a = vanish[:, b_idx]
        a_size = int(np.count_nonzero(in_a))
        bad = [a for a in range(n_front)
               if in_a[a] and Fraction(int(counts[a]), n_mid) <= c_prime]
        objective = Fraction(a_size) - len(bad) / epsilon
        if best is None or objective > best[0]:
            best = (objective, digits, a_size, bad)
    _, digits, a_size, bad = best
    shift = tuple(tuple(int(v) for v in space_points(p, sp.dim)[digits[i]])
                  for i, sp in enumerate(mid_spaces))

    # A is a variety: one constraint per coordinate of the last slot, each
    # the front-slot form alpha(., shift, e_j); zero forms are dropped
    constraints = []
    mid_vecs = [np.array(v, dtype=np.int64) for v in shift]
    tensor = alpha.tensor
    for vec in mid_vecs:
        tensor = np.tensordot(tensor, vec, axes=([k], [0])) % p
    for j in range(alpha.dims[-1]):
        form = MultilinearForm(p, front_dims, tensor[..., j])
        if not form.is_zero():
            constraints.append((tuple(range(k)), form))
    set_a = MultilinearVariety(p, front_dims, constraints)
    set_a_density = Fraction(a_size, n_front)

    finder = subvariety_finder(set_a, max_codim, combo_budget=combo_budget, budget=budget)
    if finder.status != "found":
        return FiberReport(None, "finder_failed", c, None, chain_bound, None,
                           epsilon, c_prime, finder_K, max_codim, seed, draws, shift,
                           set_a_density, len(bad), None, (), finder)
    w = finder.variety

    wmask = w.membership_tensor(budget)
    bmask = np.zeros(n_front, dtype=bool)
    bmask[bad] = True
    bmask = bmask.reshape(wmask.shape, order="F") & wmask
    conv = directional_convolution_positive(w, bmask, budget)

    slot_pts = [space_points(p, d) for d in front_dims]
    verification = []
    c_tilde = None
    for idx in np.argwhere(wmask):
        flat = 0
        for size, j in zip(reversed([p**d for d in front_dims]), reversed(idx)):
            flat = flat * size + int(j)
        bias = Fraction(int(counts[flat]), n_mid)
        point = tuple(tuple(int(v) for v in slot_pts[i][j]) for i, j in enumerate(idx))
        verification.append((point, bias))
        c_tilde = bias if c_tilde is None else min(c_tilde, bias)

    r = w.codimension
    target_floor = Fraction(1, 2 ** (2 ** (k + 2) * k) * p ** (2 ** (k + 1) * k * r)) \
        * c ** (2 ** (k + 2) * k * r)
    return FiberReport(w, "certified", c, c_tilde, chain_bound, target_floor,
                       epsilon, c_prime, finder_K, max_codim, seed, draws, shift,
                       set_a_density, len(bad), conv, tuple(verification), finder)
