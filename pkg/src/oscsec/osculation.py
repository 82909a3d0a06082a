"""Osculating spaces at coordinate points and osculating projections.

At a coordinate point e_I of a Segre-Veronese variety, the s-th osculating
space is spanned by the coordinate vectors e_J with d(I, J) <= s, so both its
dimension and the index set of the projection away from it are pure
combinatorics.  This module computes those bases and dimensions, the closed
dimension formula, projections away from several osculating spaces at once,
and the explicit monomial witnesses showing that suitable projections of a
Veronese variety induce Cremona transformations, coordinate projections, or
constant maps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .indices import (
    ProductIndex,
    Shape,
    ball_sizes,
    distance,
    enumerate_factor_indices,
    enumerate_product_indices,
    veronese,
)


@dataclass(frozen=True)
class OsculatingCenter:
    """A corner e_I (one digit per factor) together with an osculating order."""

    corner: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("osculating order must be >= 0")
        if any(c < 0 for c in self.corner):
            raise ValueError("corner digits must be >= 0")


def osc_basis(sh: Shape, center: OsculatingCenter):
    """{J in Lambda : d(I, J) <= order} for the corner index I of the center.

    This is a basis of the cone over the osculating space T^s at e_I.
    """
    I = sh.corner(center.corner)
    s = center.order
    if s >= sh.d:
        return set(enumerate_product_indices(sh))
    return {J for J in enumerate_product_indices(sh) if distance(I, J) <= s}


def shell_profile(sh: Shape):
    """counts[l] = #{J : d(I_0, J) = l}, from literal factor enumeration.

    The profile does not depend on which corner is used (relabelling digits
    within each factor is a distance-preserving bijection), so the all-zeros
    corner is as good as any.
    """
    return ball_sizes(sh, (0,) * sh.r)


def osc_dim_formula(sh: Shape, s: int):
    """Projective dimension of the s-th osculating space at a coordinate point.

    Closed form: sum over 1 <= l <= s of the number of r-part compositions
    (l_1, ..., l_r) of l with l_i <= d_i, each weighted by
    prod_i C(n_i + l_i - 1, l_i).  Computed as a truncated product of the
    per-factor binomial series.  For s >= total degree this is the ambient
    dimension N.
    """
    if s < 0:
        raise ValueError("osculating order must be >= 0")
    poly = [1]
    for n, d in zip(sh.factor_dims, sh.degrees):
        fac = [math.comb(n + l - 1, l) for l in range(d + 1)]
        new = [0] * (len(poly) + d)
        for a, pa in enumerate(poly):
            for b, fb in enumerate(fac):
                new[a + b] += pa * fb
        poly = new
    return sum(poly[1 : min(s, sh.d) + 1])


def osc_dim_profile(sh: Shape):
    """[osc_dim_formula(sh, s) for s in 0..d], computed in one pass."""
    poly = [1]
    for n, d in zip(sh.factor_dims, sh.degrees):
        fac = [math.comb(n + l - 1, l) for l in range(d + 1)]
        new = [0] * (len(poly) + d)
        for a, pa in enumerate(poly):
            for b, fb in enumerate(fac):
                new[a + b] += pa * fb
        poly = new
    dims = []
    acc = 0
    for l in range(sh.d + 1):
        acc += poly[l]
        dims.append(acc - 1)
    return dims


@dataclass(frozen=True)
class ProjectionPlan:
    """Projection of P^N away from the span of several osculating spaces.

    ``surviving`` is the set of coordinate indices J killed by no center:
    d(I_c, J) > s_c for every center c.  The projection keeps exactly those
    coordinates.
    """

    shape: Shape
    centers: tuple
    surviving: frozenset

    @property
    def is_empty(self):
        return not self.surviving

    @property
    def target_dim(self):
        """Projective dimension of the target space (|surviving| - 1)."""
        return len(self.surviving) - 1


def projection_plan(sh: Shape, centers) -> ProjectionPlan:
    centers = tuple(centers)
    if not centers:
        raise ValueError("need at least one osculating center")
    corners = [tuple(c.corner) for c in centers]
    if len(set(corners)) != len(corners):
        raise ValueError(f"duplicate projection corners: {corners}")
    pts = [(sh.corner(c.corner), c.order) for c in centers]
    surviving = frozenset(
        J
        for J in enumerate_product_indices(sh)
        if all(distance(I, J) > s for I, s in pts)
    )
    return ProjectionPlan(sh, centers, surviving)


# ---------------------------------------------------------------------------
# Cremona witnesses: osculating projections of Veronese varieties at several
# coordinate points, with the induced rational map identified explicitly.
# ---------------------------------------------------------------------------


class CaseRefusal(ValueError):
    """Raised when (n, d, orders) satisfies none of the three witness cases."""


@dataclass(frozen=True)
class CremonaWitness:
    """Explicit surviving monomials certifying the induced rational map.

    kind = "cremona": rows are J_0, ..., J_n with exponent vectors
        (1, ..., 1) - unit_k + common padding, i.e. the composition with the
        degree-d Veronese map is the standard Cremona transformation (times a
        fixed monomial).
    kind = "constant-map": the surviving set is a single index (stored as the
        only row); the induced map is constant.
    kind = "coordinate-subsets": rows is a tuple of (K, rows_K) pairs, one per
        subset K of the coordinates; each family induces the projection onto
        the coordinates in K, and together they separate generic points.
    """

    n: int
    d: int
    orders: tuple
    kind: str
    rows: tuple
    padding: tuple = ()

    def surviving_rows(self):
        if self.kind == "coordinate-subsets":
            return [J for _, rows in self.rows for J in rows]
        return list(self.rows)


def _survives(J, orders, n):
    """d(J, corner_i) > s_i for every coordinate point e_i, i = 0..n."""
    d = len(J)
    for i in range(n + 1):
        s_i = orders[i] if i < len(orders) else 0
        if d - J.count(i) <= s_i:
            return False
    return True


def cremona_witness(n: int, d: int, orders) -> CremonaWitness:
    """Witness for the rational map induced by projecting V^n_d away from
    osculating spaces of orders s_0, ..., s_m at the points e_0, ..., e_m.

    Three constructive cases:
      (a) n <= d and sum(s_j) <= n(d-1) - 2: surviving monomials inducing the
          standard Cremona transformation of P^n;
      (b) n <= d and sum(s_j) = n(d-1) - 1: a single surviving monomial, so
          the induced map is constant;
      (c) n > d and every point has order exactly d-2: families of surviving
          monomials inducing all coordinate projections onto n-d+1 of the
          homogeneous coordinates, which jointly separate generic points.

    Anything else raises CaseRefusal naming the violated inequality.
    """
    orders = tuple(int(s) for s in orders)
    m = len(orders) - 1
    if d < 2:
        raise CaseRefusal(f"need d >= 2, got d={d}")
    if not 1 <= m <= n:
        raise CaseRefusal(f"need 1 <= m <= n points e_0..e_m, got m={m}, n={n}")
    bad = [s for s in orders if not 0 <= s <= d - 2]
    if bad:
        raise CaseRefusal(f"orders must satisfy 0 <= s_j <= d-2 = {d - 2}, got {bad}")
    s_total = sum(orders)
    # capacities: row J survives iff it has at most cap[i] entries equal to i
    cap = [d - (orders[i] if i <= m else 0) - 1 for i in range(n + 1)]

    if n <= d and s_total <= n * (d - 1) - 2:
        return _witness_cremona(n, d, orders, cap)
    if n <= d and s_total == n * (d - 1) - 1:
        return _witness_constant(n, d, orders, cap)
    if n > d:
        if m != n or any(s != d - 2 for s in orders):
            raise CaseRefusal(
                f"n={n} > d={d} requires order d-2={d - 2} at all n+1 points, "
                f"got orders {orders} at {m + 1} points"
            )
        return _witness_subsets(n, d, orders)
    raise CaseRefusal(
        f"no case applies: n={n} <= d={d} but sum(s)={s_total} exceeds "
        f"n(d-1)-2={n * (d - 1) - 2} and differs from n(d-1)-1={n * (d - 1) - 1}"
    )


def _witness_cremona(n, d, orders, cap):
    # Common padding: d-n extra digits with at most cap[i]-1 copies of digit i
    # (each row already spends one slot on each digit other than its own).
    pad_cap = [c - 1 for c in cap]
    need = d - n
    assert sum(pad_cap) >= need, "padding capacity is exactly the case (a) bound"
    padding = []
    for i in range(n + 1):
        take = min(pad_cap[i], need - len(padding))
        padding.extend([i] * take)
        if len(padding) == need:
            break
    padding = tuple(padding)

    rows = []
    for j in range(n + 1):
        row = tuple(sorted([i for i in range(n + 1) if i != j] + list(padding)))
        rows.append(row)
    witness = CremonaWitness(n, d, orders, "cremona", tuple(rows), padding)
    _check_cremona_rows(witness, cap)
    return witness


def _check_cremona_rows(w, cap):
    ones = [1] * (w.n + 1)
    pad_vec = [0] * (w.n + 1)
    for i in w.padding:
        pad_vec[i] += 1
    for j, row in enumerate(w.rows):
        assert len(row) == w.d
        assert _survives(row, w.orders, w.n), (row, w.orders)
        expo = [row.count(i) for i in range(w.n + 1)]
        want = [ones[i] + pad_vec[i] - (1 if i == j else 0) for i in range(w.n + 1)]
        assert expo == want, f"row {j} is not Cremona-shaped: {expo} != {want}"
        assert all(expo[i] <= cap[i] for i in range(w.n + 1))


def _witness_constant(n, d, orders, cap):
    # Total capacity sum(cap) equals d exactly, so the unique surviving
    # monomial has cap[i] copies of every digit i.
    assert sum(cap) == d
    row = tuple(sorted(itertools.chain.from_iterable([i] * cap[i] for i in range(n + 1))))
    assert _survives(row, orders, n)
    # uniqueness: every survivor needs count_i <= cap[i] with total d = sum(cap)
    survivors = [J for J in enumerate_factor_indices(n, d) if _survives(J, orders, n)]
    assert survivors == [row], f"expected a unique survivor, found {len(survivors)}"
    return CremonaWitness(n, d, orders, "constant-map", (row,))


def _witness_subsets(n, d, orders):
    families = []
    universe = list(range(n + 1))
    for K in itertools.combinations(universe, n - d + 1):
        rest = [i for i in universe if i not in K]
        tail = tuple(rest[: d - 1])  # lexicographically smallest choice
        rows = tuple(tuple(sorted((j,) + tail)) for j in K)
        for j, row in zip(K, rows):
            # all d entries distinct, so at most one copy of each digit and
            # the row survives every order-(d-2) center
            assert len(set(row)) == d
            assert _survives(row, orders, n)
            expo = [row.count(i) for i in range(n + 1)]
            tail_vec = [0] * (n + 1)
            for i in tail:
                tail_vec[i] += 1
            want = [tail_vec[i] + (1 if i == j else 0) for i in range(n + 1)]
            assert expo == want, "family does not induce the projection onto K"
        families.append((K, rows))
    # the families jointly separate generic points: any two coordinates lie
    # in a common K since the subsets have size n-d+1 >= 2
    assert n - d + 1 >= 2
    for a, b in itertools.combinations(universe, 2):
        assert any(a in K and b in K for K, _ in families)
    return CremonaWitness(n, d, orders, "coordinate-subsets", tuple(families))


# ---------------------------------------------------------------------------
# Projection away from a single full osculating flag (s = d-1) at a corner:
# the image is the smaller Segre-Veronese obtained by deleting the corner
# digit in every factor, and the fibers are indexed by products of segments.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CornerFactorization:
    shape: Shape
    corner: tuple
    surviving: frozenset
    image_lambda_size: int
    fiber_lambda_size: int
    bijection_checked: bool


def corner_projection_factorization(sh: Shape, corner) -> CornerFactorization:
    """Structure of the projection away from T^{d-1} at a corner.

    The surviving indices are exactly those avoiding the corner digit in every
    factor; deleting that digit and closing the gap identifies them with the
    full index set of the product with each factor dimension lowered by one.
    The report also records the size of the fiber index set, a product of
    (d_i + 1) segments.
    """
    corner = tuple(corner)
    I = sh.corner(corner)
    plan = projection_plan(sh, [OsculatingCenter(corner, sh.d - 1)])
    surviving = plan.surviving
    for J in surviving:
        assert distance(I, J) == sh.d

    seen = set()
    ok = True
    for J in surviving:
        relabeled = []
        for f, c, n in zip(J, corner, sh.factor_dims):
            if any(x == c for x in f):
                ok = False
                break
            relabeled.append(tuple(x - 1 if x > c else x for x in f))
        else:
            seen.add(tuple(relabeled))
            continue
        break
    image_sets = [
        set(enumerate_factor_indices(n - 1, d)) if n >= 1 else set()
        for n, d in zip(sh.factor_dims, sh.degrees)
    ]
    expected = set(itertools.product(*image_sets))
    ok = ok and seen == expected

    image_size = math.prod(math.comb(n - 1 + d, d) for n, d in zip(sh.factor_dims, sh.degrees))
    fiber_size = math.prod(d + 1 for d in sh.degrees)
    assert len(surviving) == image_size
    return CornerFactorization(
        shape=sh,
        corner=corner,
        surviving=surviving,
        image_lambda_size=image_size,
        fiber_lambda_size=fiber_size,
        bijection_checked=ok,
    )
