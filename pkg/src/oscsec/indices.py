"""Index combinatorics for products of Veronese factors.

A Segre-Veronese variety SV^n_d with n = (n_1, ..., n_r) and d = (d_1, ..., d_r)
lives in the projectivization of a tensor product of symmetric powers.  Its
ambient coordinates are labelled by the set

    Lambda = Lambda_{n_1, d_1} x ... x Lambda_{n_r, d_r},

where Lambda_{n, d} is the set of nondecreasing d-tuples with entries in
{0, ..., n} (degree-d monomials in n+1 variables, written as sorted exponent
lists).  A *product index* is an element of Lambda: a tuple of r factor
indices.  Everything downstream (osculating spaces, degeneration supports,
hyperplane certificates) is phrased in terms of a distance on Lambda and a
family of shift operators that trade zeros for a fixed nonzero digit.

Shapes are canonicalized with factors sorted by (n_i, d_i); the order the
caller supplied is retained separately for display.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

FactorIndex = tuple  # nondecreasing tuple of ints, e.g. (0, 0, 2)
ProductIndex = tuple  # tuple of FactorIndex, one per factor


@dataclass(frozen=True)
class Shape:
    """A Segre-Veronese shape: factor dimensions and factor degrees.

    ``factor_dims`` and ``degrees`` are stored in canonical order (sorted by
    (n_i, d_i)); ``display_pairs`` keeps the caller's original order for
    printing.  All arithmetic uses the canonical order.
    """

    factor_dims: tuple
    degrees: tuple
    display_pairs: tuple

    def __post_init__(self):
        if len(self.factor_dims) != len(self.degrees):
            raise ValueError("factor_dims and degrees must have equal length")
        if not self.factor_dims:
            raise ValueError("a shape needs at least one factor")
        pairs = list(zip(self.factor_dims, self.degrees))
        if any(n < 1 or d < 1 for n, d in pairs):
            raise ValueError(f"factor dimensions and degrees must be >= 1, got {pairs}")
        if sorted(pairs) != pairs:
            raise ValueError("canonical factor order is sorted by (n_i, d_i)")

    @property
    def r(self):
        return len(self.factor_dims)

    @property
    def n(self):
        """Dimension of the variety (sum of the factor dimensions)."""
        return sum(self.factor_dims)

    @property
    def d(self):
        """Total degree (sum of the factor degrees)."""
        return sum(self.degrees)

    @property
    def factor_sizes(self):
        return tuple(math.comb(n + d, n) for n, d in zip(self.factor_dims, self.degrees))

    @property
    def lambda_size(self):
        return math.prod(self.factor_sizes)

    @property
    def ambient_dim(self):
        """Projective dimension N of the ambient space."""
        return self.lambda_size - 1

    def corner(self, digits):
        """The product index whose i-th factor is (digits[i],) * d_i."""
        if len(digits) != self.r:
            raise ValueError(f"need one digit per factor, got {digits}")
        for c, n in zip(digits, self.factor_dims):
            if not 0 <= c <= n:
                raise ValueError(f"digit {c} out of range for a P^{n} factor")
        return tuple((c,) * d for c, d in zip(digits, self.degrees))

    def label(self):
        ns = ",".join(str(n) for n, _ in self.display_pairs)
        ds = ",".join(str(d) for _, d in self.display_pairs)
        return f"SV^({ns})_({ds})"


def shape(factor_dims, degrees) -> Shape:
    """Build a Shape, sorting factors into canonical order."""
    ns = tuple(int(n) for n in factor_dims)
    ds = tuple(int(d) for d in degrees)
    if len(ns) != len(ds):
        raise ValueError("factor_dims and degrees must have equal length")
    pairs = sorted(zip(ns, ds))
    return Shape(
        factor_dims=tuple(n for n, _ in pairs),
        degrees=tuple(d for _, d in pairs),
        display_pairs=tuple(zip(ns, ds)),
    )


def veronese(n, d) -> Shape:
    return shape((n,), (d,))


@lru_cache(maxsize=None)
def _factor_indices(n, d):
    return tuple(itertools.combinations_with_replacement(range(n + 1), d))


def enumerate_factor_indices(n, d):
    """All nondecreasing d-tuples over {0..n}, in lexicographic order."""
    if n < 0 or d < 0:
        raise ValueError(f"need n >= 0 and d >= 0, got n={n}, d={d}")
    return list(_factor_indices(n, d))


def enumerate_product_indices(sh: Shape):
    """Iterate over Lambda in lexicographic product order.  Lazy."""
    factors = [_factor_indices(n, d) for n, d in zip(sh.factor_dims, sh.degrees)]
    return itertools.product(*factors)


def factor_distance(a, b):
    """d - |multiset intersection| for two factor indices of equal degree.

    Both arguments are nondecreasing, so the intersection size is a linear
    two-pointer merge.
    """
    common = 0
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        if a[i] == b[j]:
            common += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return la - common


def distance(I, J):
    """Hamming-style distance on Lambda: unmatched entries summed over factors."""
    if len(I) != len(J):
        raise ValueError(f"product indices have different factor counts: {I} vs {J}")
    total = 0
    for a, b in zip(I, J):
        if len(a) != len(b):
            raise ValueError(f"factor degree mismatch: {a} vs {b}")
        total += factor_distance(a, b)
    return total


def count_digit(f, c):
    return f.count(c)


def zeros_of(I):
    """Number of zero entries of I, summed over factors (written s^+_I)."""
    return sum(f.count(0) for f in I)


def digit_count(I, j):
    """Number of entries equal to j, summed over factors (written s^-_{I,j})."""
    return sum(f.count(j) for f in I)


# ---------------------------------------------------------------------------
# Shift operators.
#
# For a digit j >= 1, the elementary shift delta^l on a single factor turns
# l zeros into l copies of j (l > 0), or l copies of j into zeros (l < 0).
# On a product index, a shift profile applies one elementary shift per
# factor.  Delta(I, l)_j is the shell of indices reachable with offsets of a
# single sign summing to |l|; mixed-sign profiles are deliberately excluded.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftProfile:
    """Per-factor shift offsets for a fixed target digit."""

    offsets: tuple
    digit: int = 1

    def __post_init__(self):
        if self.digit < 1:
            raise ValueError("shift digit must be >= 1 (zeros are the pivot digit)")


def _shift_factor(f, j, l):
    """Apply delta^l to one factor; None when out of range."""
    if l == 0:
        return f
    zeros = f.count(0)
    js = f.count(j)
    if l > 0:
        if l > zeros:
            return None
        rest = [x for x in f if x != 0]
        rest.extend([0] * (zeros - l))
        rest.extend([j] * l)
    else:
        if -l > js:
            return None
        rest = [x for x in f if x != j]
        rest.extend([j] * (js + l))
        rest.extend([0] * (-l))
    rest.sort()
    return tuple(rest)


def delta_shift(I, profile: ShiftProfile):
    """Apply a per-factor shift profile to I.  None if any factor overflows."""
    if len(profile.offsets) != len(I):
        raise ValueError("profile length must match the number of factors")
    out = []
    for f, l in zip(I, profile.offsets):
        g = _shift_factor(f, profile.digit, l)
        if g is None:
            return None
        out.append(g)
    return tuple(out)


def delta_set(I, l, j=1):
    """The shell Delta(I, l)_j: all same-sign shifts of I with offsets summing to l.

    l > 0 trades zeros for copies of j, l < 0 the reverse, l = 0 gives {I}.
    Computed directly from per-factor capacities; the ambient Lambda is never
    scanned.
    """
    r = len(I)
    if l == 0:
        return {I}
    if l > 0:
        caps = [f.count(0) for f in I]
        sign = 1
    else:
        caps = [f.count(j) for f in I]
        sign = -1
    out = set()
    for comp in _bounded_compositions(abs(l), caps):
        shifted = delta_shift(I, ShiftProfile(tuple(sign * c for c in comp), j))
        assert shifted is not None  # compositions respect the capacities
        out.add(shifted)
    return out


def _bounded_compositions(total, caps):
    """Compositions of `total` with part i bounded by caps[i]."""
    if sum(caps) < total:
        return
    if len(caps) == 1:
        yield (total,)
        return
    lo = max(0, total - sum(caps[1:]))
    hi = min(caps[0], total)
    for first in range(lo, hi + 1):
        for rest in _bounded_compositions(total - first, caps[1:]):
            yield (first,) + rest


def delta_closure_up(I, j=1):
    """Delta(I)^+_j: union of the shells Delta(I, l)_j over l >= 0."""
    out = set()
    for l in range(zeros_of(I) + 1):
        out |= delta_set(I, l, j)
    return out


def delta_closure_down(I, j=1):
    """Delta(I)^-_j: union of the shells Delta(I, -l)_j over l >= 0."""
    out = set()
    for l in range(digit_count(I, j) + 1):
        out |= delta_set(I, -l, j)
    return out


def shift_offsets(K, J, j=1):
    """Per-factor offsets witnessing J in Delta(K)^+_j, or None.

    J lies in the upward closure of K exactly when, factor by factor, J is K
    with some zeros replaced by copies of j.  Returns the tuple of per-factor
    counts of replaced zeros when that holds.
    """
    if len(K) != len(J):
        return None
    offsets = []
    for a, b in zip(K, J):
        if len(a) != len(b):
            return None
        diff = b.count(j) - a.count(j)
        if diff < 0 or a.count(0) - b.count(0) != diff:
            return None
        # the entries that are neither 0 nor j must agree as multisets
        ra = sorted(x for x in a if x != 0 and x != j)
        rb = sorted(x for x in b if x != 0 and x != j)
        if ra != rb:
            return None
        offsets.append(diff)
    return tuple(offsets)


def in_up_closure(K, J, j=1):
    return shift_offsets(K, J, j) is not None


def shift_coefficient(K, J, j=1):
    """Product over factors of C(zeros(K^i), offset_i) for J in Delta(K)^+_j.

    This is the coefficient of e_J in the expansion of the degenerate point
    obtained from e_K by moving along the coordinate curve of digit j; raises
    ValueError when J is not an upward shift of K.
    """
    offsets = shift_offsets(K, J, j)
    if offsets is None:
        raise ValueError(f"{J} is not an upward digit-{j} shift of {K}")
    coeff = 1
    for a, l in zip(K, offsets):
        coeff *= math.comb(a.count(0), l)
    return coeff


def curve_expansion(K, j=1):
    """All (J, l, coeff) with J in Delta(K, l)_j, l >= 0, coeff = shift_coefficient.

    Materializes the upward closure of K once, with multiplicities; used when
    a whole expansion is consumed (certificate verification) rather than a
    single coefficient.
    """
    per_factor = []
    for a in K:
        z = a.count(0)
        opts = []
        for l in range(z + 1):
            g = _shift_factor(a, j, l)
            opts.append((g, l, math.comb(z, l)))
        per_factor.append(opts)
    out = []
    for combo in itertools.product(*per_factor):
        J = tuple(g for g, _, _ in combo)
        l = sum(lf for _, lf, _ in combo)
        c = math.prod(cf for _, _, cf in combo)
        out.append((J, l, c))
    return out


# ---------------------------------------------------------------------------
# Distance-bounded enumeration around a corner, without scanning Lambda.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _factor_indices_by_distance(n, d, digit):
    """Factor indices grouped by distance from the corner (digit,)*d."""
    shells = [[] for _ in range(d + 1)]
    for f in _factor_indices(n, d):
        shells[d - f.count(digit)].append(f)
    return tuple(tuple(s) for s in shells)


def ball_around_corner(sh: Shape, digits, radius):
    """All product indices within the given distance of a corner.  Lazy.

    Enumeration is a product over factors of distance shells with total
    distance <= radius, so the cost is proportional to the ball, not to
    |Lambda|.
    """
    if radius < 0:
        return
    shells = [
        _factor_indices_by_distance(n, d, c)
        for (n, d), c in zip(zip(sh.factor_dims, sh.degrees), digits)
    ]

    def rec(i, budget, prefix):
        if i == len(shells):
            yield tuple(prefix)
            return
        for t in range(min(budget, len(shells[i]) - 1) + 1):
            for f in shells[i][t]:
                prefix.append(f)
                yield from rec(i + 1, budget - t, prefix)
                prefix.pop()

    yield from rec(0, radius, [])


def ball_sizes(sh: Shape, digits, radius=None):
    """sizes[t] = #{J : d(J, corner) = t}, computed by convolving factor shells."""
    if radius is None:
        radius = sh.d
    hist = [1]
    for (n, d), c in zip(zip(sh.factor_dims, sh.degrees), digits):
        shells = _factor_indices_by_distance(n, d, c)
        counts = [len(s) for s in shells]
        new = [0] * (min(radius, len(hist) - 1 + len(counts) - 1) + 1)
        for t1, h in enumerate(hist):
            for t2, cnt in enumerate(counts):
                if t1 + t2 <= radius:
                    new[t1 + t2] += h * cnt
        hist = new
    return hist


def enumerate_shapes(max_lambda, max_factors=None, min_total_degree=1):
    """All canonical shapes with |Lambda| <= max_lambda and total degree >= min.

    Factors are (n_i, d_i) with n_i, d_i >= 1, nondecreasing in (n_i, d_i).
    Returns a list sorted by (r, factor_dims, degrees).
    """
    out = []

    def rec(pairs, size):
        if pairs and sum(d for _, d in pairs) >= min_total_degree:
            out.append(
                Shape(
                    tuple(n for n, _ in pairs),
                    tuple(d for _, d in pairs),
                    tuple(pairs),
                )
            )
        if max_factors is not None and len(pairs) >= max_factors:
            return
        n0, d0 = pairs[-1] if pairs else (1, 1)
        n = n0
        while size * (n + 1) <= max_lambda:  # the cheapest factor (n, 1) still fits
            d = d0 if n == n0 and pairs else 1
            while size * math.comb(n + d, n) <= max_lambda:
                rec(pairs + [(n, d)], size * math.comb(n + d, n))
                d += 1
            n += 1

    rec([], 1)
    out.sort(key=lambda s: (s.r, s.factor_dims, s.degrees))
    return out
