"""Monomial parametrizations, jet matrices, and secant-variety ranks.

A MonomialMap records the exponent vectors of a monomial parametrization.
Two flavors appear:

  * multihomogeneous maps (Segre-Veronese embeddings): the variables split
    into groups, one per projective factor, and every coordinate has the same
    degree within each group;
  * affine charts (rational normal scrolls): arbitrary monomials plus an
    implicit constant coordinate, stored explicitly as the all-zero exponent
    vector, so the image sits in projective space of dimension #coords - 1.

Jet matrices stack all partial derivatives of the parametrization up to a
given total order, evaluated at a point over F_p; their ranks compute
osculating dimensions.  Stacking first-order jets at h independent random
points spans the h tangent spaces of Terracini's lemma, so the rank of that
stack is (secant cone rank) = (projective secant dimension) + 1 generically.
A full-rank outcome at a single specialization certifies the generic rank;
a deficient outcome at every trial is reported as a suspected defect.

For multihomogeneous maps the order-0 row is omitted from the Terracini
stacks: the per-group Euler relations sum_{v in group} x_v dF/dx_v = d_i F
put the parametrization itself in the span of its first derivatives, also
over F_p once p exceeds every group degree.  Affine charts keep the order-0
row (no Euler relation is available there).
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from .indices import Shape, enumerate_product_indices
from .modp import DEFAULT_PRIME, RankAccumulator, is_prime


class Refusal(RuntimeError):
    """The input is outside the range this implementation will attempt."""


class ResourceRefusal(Refusal):
    pass


class PrimeTooSmallError(Refusal):
    pass


DEFAULT_MAX_ENTRIES = 40_000_000


def max_matrix_entries() -> int:
    raw = os.environ.get("OSCSEC_MAX_ENTRIES")
    if raw:
        try:
            return int(raw)
        except ValueError as exc:
            raise ValueError(f"OSCSEC_MAX_ENTRIES must be an integer, got {raw!r}") from exc
    return DEFAULT_MAX_ENTRIES


@dataclass(frozen=True)
class MonomialMap:
    """Exponent vectors of a monomial parametrization, one per coordinate."""

    exponents: tuple
    group_sizes: tuple
    group_degrees: tuple | None  # None marks an affine chart
    label: str
    shape: Shape | None = None

    def __post_init__(self):
        nv = sum(self.group_sizes)
        for e in self.exponents:
            if len(e) != nv:
                raise ValueError("every exponent vector must cover all variables")

    @property
    def num_vars(self):
        return sum(self.group_sizes)

    @property
    def num_coords(self):
        return len(self.exponents)

    @property
    def ambient_dim(self):
        """Projective dimension N of the ambient space."""
        return self.num_coords - 1

    @property
    def is_affine(self):
        return self.group_degrees is None

    @property
    def variety_dim(self):
        """Dimension of the parametrized projective variety."""
        if self.is_affine:
            return self.num_vars
        return self.num_vars - len(self.group_sizes)

    @property
    def max_degree(self):
        return max(sum(e) for e in self.exponents)


def segre_veronese_map(sh: Shape, max_coords: int = 2_000_000) -> MonomialMap:
    """The Segre-Veronese embedding as a monomial map.

    Variables are grouped per factor ((n_i + 1) homogeneous coordinates
    each); ambient coordinates follow the lexicographic order of Lambda.
    """
    if sh.lambda_size > max_coords:
        raise ResourceRefusal(
            f"{sh.label()} has {sh.lambda_size} coordinates; cap is {max_coords}"
        )
    offsets = []
    off = 0
    for n in sh.factor_dims:
        offsets.append(off)
        off += n + 1
    nv = off
    exps = []
    for J in enumerate_product_indices(sh):
        e = [0] * nv
        for f, o in zip(J, offsets):
            for digit in f:
                e[o + digit] += 1
        exps.append(tuple(e))
    return MonomialMap(
        exponents=tuple(exps),
        group_sizes=tuple(n + 1 for n in sh.factor_dims),
        group_degrees=sh.degrees,
        label=sh.label(),
        shape=sh,
    )


def scroll_map(degrees) -> MonomialMap:
    """Affine chart of the rational normal scroll X_(a_1, ..., a_k).

    Variables are the scaling parameters of all but one ruling block plus the
    ruling coordinate u; the chart lists each block's monomials by descending
    power of u, with the final block dehomogenized (its scaling parameter set
    to 1 and the constant monomial dropped).  The implicit homogenizing
    coordinate is appended as the constant monomial, so X_(1,7) gets its 9
    printed coordinates followed by the constant, sitting in P^9.
    """
    degrees = tuple(int(a) for a in degrees)
    if not degrees or any(a < 1 for a in degrees):
        raise ValueError(f"scroll degrees must be positive, got {degrees}")
    blocks = tuple(reversed(degrees))
    k = len(blocks)
    nv = k  # k-1 scaling parameters + u
    u = k - 1
    exps = []
    for b, a in enumerate(blocks):
        if b < k - 1:
            for j in range(a, -1, -1):
                e = [0] * nv
                e[b] = 1
                e[u] = j
                exps.append(tuple(e))
        else:
            for j in range(a, 0, -1):
                e = [0] * nv
                e[u] = j
                exps.append(tuple(e))
    exps.append((0,) * nv)  # homogenizing constant coordinate
    label = "X_(" + ",".join(str(a) for a in degrees) + ")"
    return MonomialMap(
        exponents=tuple(exps),
        group_sizes=(nv,),
        group_degrees=None,
        label=label,
    )


@dataclass(frozen=True)
class PointSample:
    """A random point with full provenance (prime, seed label, redraws)."""

    values: tuple
    prime: int
    seed_label: str
    rejections: int


def sample_point(m: MonomialMap, prime: int, rng: random.Random, seed_label: str = "") -> PointSample:
    """Uniform coordinates in [0, p); projective factor groups are redrawn
    while identically zero."""
    values = []
    rejections = 0
    start = 0
    for size in m.group_sizes:
        while True:
            group = [rng.randrange(prime) for _ in range(size)]
            if any(group) or m.is_affine:
                break
            rejections += 1
        values.extend(group)
        start += size
    return PointSample(tuple(values), prime, seed_label, rejections)


def jet_multi_indices(num_vars: int, order: int):
    """Derivative multi-indices with total order <= `order`, graded then lex."""
    out = []
    for k in range(order + 1):
        for combo in combinations_with_replacement(range(num_vars), k):
            alpha = [0] * num_vars
            for v in combo:
                alpha[v] += 1
            out.append(tuple(alpha))
    return out


def _power_tables(m: MonomialMap, values, prime, caps=None):
    if caps is None:
        caps = [max(e[v] for e in m.exponents) for v in range(m.num_vars)]
    tabs = []
    for v, top in enumerate(caps):
        t = [1] * (top + 1)
        x = values[v] % prime
        for k in range(1, top + 1):
            t[k] = t[k - 1] * x % prime
        tabs.append(t)
    return tabs


def jet_matrix(m: MonomialMap, point: PointSample, order: int):
    """All partial-derivative rows of the parametrization, orders 0..order.

    Row alpha, column e: prod_v e_v (e_v - 1) ... (e_v - alpha_v + 1)
    x_v^(e_v - alpha_v) mod p, i.e. exact derivatives of monomials evaluated
    at the sample point.  Rows follow jet_multi_indices order.
    """
    p = point.prime
    if p <= m.max_degree:
        raise PrimeTooSmallError(
            f"prime {p} must exceed the maximal coordinate degree {m.max_degree}"
        )
    alphas = jet_multi_indices(m.num_vars, order)
    budget = max_matrix_entries()
    if len(alphas) * m.num_coords > budget:
        raise ResourceRefusal(
            f"jet matrix would have {len(alphas)} x {m.num_coords} entries; "
            f"cap is {budget} (override with OSCSEC_MAX_ENTRIES)"
        )
    tabs = _power_tables(m, point.values, p)
    rows = []
    for alpha in alphas:
        row = []
        for e in m.exponents:
            term = 1
            for v, (ev, av) in enumerate(zip(e, alpha)):
                if av > ev:
                    term = 0
                    break
                ff = 1
                for t in range(av):
                    ff = ff * (ev - t) % p
                term = term * ff % p * tabs[v][ev - av] % p
            row.append(term)
        rows.append(row)
    return rows


def jet_rank(m: MonomialMap, point: PointSample, order: int) -> int:
    rows = jet_matrix(m, point, order)
    acc = RankAccumulator(m.num_coords, point.prime)
    for r in rows:
        acc.add_row(r)
        if acc.saturated:
            break
    return acc.rank


# ---------------------------------------------------------------------------
# Fast osculating ranks at a corner point.
#
# At a coordinate point of a Segre-Veronese variety every nonvanishing
# derivative row is supported on a single ambient coordinate: the row of the
# multi-index alpha (derivatives in non-corner variables only) hits exactly
# the coordinate whose factor indices consist of alpha's variables padded
# with the corner digit, with scalar prod (multiplicity)!.  The order-s jet
# rank is therefore the number of such coordinates reachable with |alpha|
# <= s.  The routines below recompute that count from the derivative side,
# checking the scalar is a unit for every alpha, factor by factor.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _corner_alpha_levels(n: int, d: int, prime: int):
    """counts[l] = #derivative multisets of order l in one factor, with the
    nonvanishing of every row scalar verified mod prime."""
    if prime <= d:
        raise PrimeTooSmallError(f"prime {prime} must exceed the factor degree {d}")
    if n == 1:
        # alpha = l derivatives in the single non-corner variable; scalar l!
        scalar = 1
        for l in range(1, d + 1):
            scalar = scalar * l % prime
            assert scalar, (n, d, l)
        return tuple([1] * (d + 1))
    counts = [0] * (d + 1)
    counts[0] = 1
    for l in range(1, d + 1):
        seen = set()
        for alpha in combinations_with_replacement(range(1, n + 1), l):
            scalar = 1
            mult = 1
            for i in range(l):
                mult = mult + 1 if i and alpha[i] == alpha[i - 1] else 1
                scalar = scalar * mult % prime
            assert scalar, (n, d, alpha)
            seen.add(alpha)
        counts[l] = len(seen)
    return tuple(counts)


def corner_jet_rank_profile(sh: Shape, prime: int = DEFAULT_PRIME):
    """[jet rank at a corner for order s, s = 0..d], via derivative counting."""
    conv = [1]
    for n, d in zip(sh.factor_dims, sh.degrees):
        counts = _corner_alpha_levels(n, d, prime)
        new = [0] * (len(conv) + d)
        for a, ca in enumerate(conv):
            for b, cb in enumerate(counts):
                new[a + b] += ca * cb
        conv = new
    ranks = []
    acc = 0
    for l in range(sh.d + 1):
        acc += conv[l]
        ranks.append(acc)
    return ranks


# ---------------------------------------------------------------------------
# Terracini stacks and secant ranks.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankVerdict:
    map_label: str
    h: int
    prime: int
    seed: int
    expected_cone_rank: int
    cone_rank: int
    verdict: str  # "not_defective_certified" | "defect_suspected"
    trials_run: int

    @property
    def projective_dim(self):
        return self.cone_rank - 1

    @property
    def expected_projective_dim(self):
        return self.expected_cone_rank - 1

    @property
    def deficit(self):
        return self.expected_cone_rank - self.cone_rank

    def to_record(self):
        return {
            "map": self.map_label,
            "h": self.h,
            "prime": self.prime,
            "seed": self.seed,
            "expected_cone_rank": self.expected_cone_rank,
            "cone_rank": self.cone_rank,
            "projective_dim": self.projective_dim,
            "expected_projective_dim": self.expected_projective_dim,
            "verdict": self.verdict,
            "trials_run": self.trials_run,
        }


def expected_cone_rank(m: MonomialMap, h: int) -> int:
    """min(h (dim X + 1), N + 1): the generic rank when X is not h-defective."""
    return min(h * (m.variety_dim + 1), m.num_coords)


def _point_block(m: MonomialMap, values, prime, caps=None):
    """First-order Terracini rows at one point (plus the order-0 row for
    affine charts, where no Euler relation supplies it), built lazily so a
    caller that hits its rank cap can skip the rest of the block."""
    p = prime
    tabs = _power_tables(m, values, p, caps)
    n_coords = m.num_coords
    nv = m.num_vars

    if all(v % p for v in values):
        # every coordinate is invertible: d/dx_v of a monomial is just
        # e_v * monomial / x_v, so one value pass serves all rows
        vals = []
        for e in m.exponents:
            t = 1
            for v, ev in enumerate(e):
                if ev:
                    t = t * tabs[v][ev] % p
            vals.append(t)
        if m.is_affine:
            yield vals
        for v in range(nv):
            inv = pow(tabs[v][1], p - 2, p)
            row = [0] * n_coords
            for c, e in enumerate(m.exponents):
                ev = e[v]
                if ev:
                    row[c] = ev * vals[c] % p * inv % p
            yield row
        return

    vals = [0] * n_coords
    prefixes = []
    suffixes = []
    for c, e in enumerate(m.exponents):
        pref = [1] * (nv + 1)
        for v, ev in enumerate(e):
            pref[v + 1] = pref[v] * tabs[v][ev] % p
        suff = [1] * (nv + 1)
        for v in range(nv - 1, -1, -1):
            suff[v] = suff[v + 1] * tabs[v][e[v]] % p
        vals[c] = pref[nv]
        prefixes.append(pref)
        suffixes.append(suff)
    if m.is_affine:
        yield vals
    for v in range(nv):
        row = [0] * n_coords
        for c, e in enumerate(m.exponents):
            ev = e[v]
            if not ev:
                continue
            row[c] = ev * prefixes[c][v] % p * tabs[v][ev - 1] % p * suffixes[c][v + 1] % p
        yield row


def _sweep_ranks(m: MonomialMap, h_max: int, prime: int, rng: random.Random):
    """Cone ranks of the Terracini stack after 1, 2, ..., h_max points."""
    n_coords = m.num_coords
    budget = max_matrix_entries()
    block = m.num_vars + (1 if m.is_affine else 0)
    if h_max * block * n_coords > budget:
        raise ResourceRefusal(
            f"Terracini stack would have {h_max * block} x {n_coords} entries; "
            f"cap is {budget} (override with OSCSEC_MAX_ENTRIES)"
        )
    acc = RankAccumulator(n_coords, prime)
    cap = m.variety_dim + 1
    caps = [max(e[v] for e in m.exponents) for v in range(m.num_vars)]
    ranks = []
    for _ in range(h_max):
        if acc.saturated:
            ranks.append(acc.rank)
            continue
        pt = sample_point(m, prime, rng)
        base = acc.rank
        for row in _point_block(m, pt.values, prime, caps):
            # a point's block can raise the rank by at most dim X + 1 (its
            # rows span the tangent space of the cone at a smooth point)
            acc.add_row(row)
            if acc.rank - base == cap or acc.saturated:
                break
        ranks.append(acc.rank)
    return ranks


def _check_prime(m: MonomialMap, prime: int):
    if prime is None:
        prime = DEFAULT_PRIME
    if not is_prime(prime):
        raise ValueError(f"{prime} is not prime")
    if prime <= m.max_degree:
        raise PrimeTooSmallError(
            f"prime {prime} must exceed the maximal coordinate degree {m.max_degree}"
        )
    return prime

def _trial_rng(m: MonomialMap, seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}|{m.label}|trial{trial}")


def secant_rank(m: MonomialMap, h: int, prime: int | None = None, seed: int = 0, trials: int = 2) -> RankVerdict:
    """Rank of the Terracini stack at h random points, with retrials.

    A trial matching the expected cone rank certifies non-defectivity (rank
    can only drop under specialization); otherwise the best rank over all
    trials is reported as a suspected defect.
    """
    if h < 1:
        raise ValueError("need h >= 1 points")
    prime = _check_prime(m, prime)
    exp = expected_cone_rank(m, h)
    best = 0
    trials_run = 0
    for t in range(1, trials + 1):
        trials_run = t
        ranks = _sweep_ranks(m, h, prime, _trial_rng(m, seed, t))
        best = max(best, ranks[h - 1])
        if best == exp:
            break
    verdict = "not_defective_certified" if best == exp else "defect_suspected"
    return RankVerdict(m.label, h, prime, seed, exp, best, verdict, trials_run)


def secant_sweep(m: MonomialMap, h_max: int, prime: int | None = None, seed: int = 0, trials: int = 2):
    """RankVerdicts for h = 1..h_max from incremental point stacks

    Each trial reuses one growing accumulator for all h; verdicts for h
    already certified in an earlier trial skip later trials.
    """
    if h_max < 1:
        raise ValueError("need h_max >= 1")
    prime = _check_prime(m, prime)
    expected = [expected_cone_rank(m, h) for h in range(1, h_max + 1)]
    best = [0] * h_max
    trials_done = [0] * h_max
    for t in range(1, trials + 1):
        open_hs = {i for i in range(h_max) if best[i] < expected[i]}
        if t > 1 and not open_hs:
            break
        ranks = _sweep_ranks(m, h_max, prime, _trial_rng(m, seed, t))
        for i in range(h_max):
            if t == 1 or i in open_hs:
                best[i] = max(best[i], ranks[i])
                trials_done[i] = t
    out = []
    for i in range(h_max):
        verdict = "not_defective_certified" if best[i] == expected[i] else "defect_suspected"
        out.append(
            RankVerdict(m.label, i + 1, prime, seed, expected[i], best[i], verdict, trials_done[i])
        )
    return out


def tangential_projection_fiber(m: MonomialMap, h: int, prime: int | None = None, seed: int = 0) -> int:
    """Generic fiber dimension of the projection from h tangent spaces.

    Computed as (dim X + 1) - (R_{h+1} - R_h) where R_k is the cone rank of
    the Terracini stack at k points: adding an (h+1)-st tangent space can
    raise the rank by dim X + 1 minus the dimension of the fiber through the
    new point.  Valid when the projected image is still at least
    dim-X-dimensional (the generic-finiteness criterion of Chiantini and
    Ciliberto); smaller targets are refused.
    """
    if h < 0:
        raise ValueError("need h >= 0")
    if h == 0:
        return 0
    prime = _check_prime(m, prime)
    ranks = _sweep_ranks(m, h + 1, prime, _trial_rng(m, seed, 1))
    r_h, r_h1 = ranks[h - 1], ranks[h]
    # target of the projection away from the h tangent spaces is P^(N - R_h)
    if m.ambient_dim - r_h < m.variety_dim:
        raise Refusal(
            "tangential-projection criterion (Chiantini-Ciliberto) needs the "
            f"projected target P^{m.ambient_dim - r_h} to have dimension >= "
            f"dim X = {m.variety_dim}"
        )
    return (m.variety_dim + 1) - (r_h1 - r_h)
