"""Non-defectivity bounds for Segre-Veronese varieties.

The main bound says SV^n_d is not h-defective for

    h <= n_1 * h_{n_1+1}(d - 2) + 1,        d = d_1 + ... + d_r >= 3,

where h_m counts how many tangent spaces can be degenerated into osculating
spaces: write k+1 = 2^l_1 + ... + 2^l_s + eps with l_1 > ... > l_s >= 1 and
eps in {0,1}; then h_m(k) = m^(l_1 - 1) + ... + m^(l_s - 1), and h_m(0) = 0.

Two companion quantities are reported alongside: the degree-independent
baseline h <= min(n_i) + 1 (classical, with the quadric Segre surface
P^1 x P^1 in P^3 as the lone exception), and the asymptotic simplification
h <= n_1^floor(log2(d-1)).
"""

from __future__ import annotations

from dataclasses import dataclass

from .indices import Shape


@dataclass(frozen=True)
class BinaryProfile:
    """The unique decomposition value = 2^l_1 + ... + 2^l_s + epsilon with
    strictly decreasing exponents >= 1 and epsilon in {0, 1}."""

    lambdas: tuple
    epsilon: int
    value: int

    def __post_init__(self):
        assert self.value == sum(1 << l for l in self.lambdas) + self.epsilon
        assert all(l >= 1 for l in self.lambdas)
        assert list(self.lambdas) == sorted(self.lambdas, reverse=True)
        assert self.epsilon in (0, 1)


def binary_profile(k: int) -> BinaryProfile:
    """Decompose k+1 as powers of two (exponents >= 1) plus epsilon."""
    if k < 0:
        raise ValueError("binary_profile is defined for k >= 0")
    v = k + 1
    eps = v & 1
    lambdas = []
    rest = v - eps
    bit = rest.bit_length() - 1
    while rest:
        if rest >> bit & 1:
            lambdas.append(bit)
            rest ^= 1 << bit
        bit -= 1
    return BinaryProfile(tuple(lambdas), eps, v)


def h_m(m: int, k: int) -> int:
    """m^(l_1 - 1) + ... + m^(l_s - 1) over the profile of k+1; h_m(0) = 0."""
    if m < 2:
        raise ValueError(f"h_m needs m >= 2, got m={m}")
    if k < 0:
        raise ValueError(f"h_m needs k >= 0, got k={k}")
    if k == 0:
        return 0
    return sum(m ** (l - 1) for l in binary_profile(k).lambdas)


@dataclass(frozen=True)
class BoundReport:
    shape: Shape
    h_main: int | None
    h_baseline: int
    h_asymptotic: int | None
    decomposition: BinaryProfile | None
    notes: tuple

    def to_record(self):
        return {
            "shape_dims": list(self.shape.factor_dims),
            "shape_degrees": list(self.shape.degrees),
            "h_main": self.h_main,
            "h_baseline": self.h_baseline,
            "h_asymptotic": self.h_asymptotic,
            "lambdas": list(self.decomposition.lambdas) if self.decomposition else None,
            "epsilon": self.decomposition.epsilon if self.decomposition else None,
            "notes": list(self.notes),
        }


def main_bound_value(n1: int, d: int) -> int:
    """n_1 * h_{n_1+1}(d-2) + 1 for total degree d >= 3."""
    if d < 3:
        raise ValueError(f"the main bound needs total degree >= 3, got d={d}")
    return n1 * h_m(n1 + 1, d - 2) + 1


def intro_bound_value(n1: int, d: int) -> int:
    """The same bound computed literally from the profile of d-1:
    n_1 ((n_1+1)^(l_1 - 1) + ... + (n_1+1)^(l_s - 1)) + 1."""
    if d < 3:
        raise ValueError(f"the main bound needs total degree >= 3, got d={d}")
    prof = binary_profile(d - 2)
    assert prof.value == d - 1
    return n1 * sum((n1 + 1) ** (l - 1) for l in prof.lambdas) + 1


def main_bound(sh: Shape) -> BoundReport:
    n1 = sh.factor_dims[0]
    d = sh.d
    notes = []
    baseline = min(sh.factor_dims) + 1
    if (sh.factor_dims, sh.degrees) == ((1, 1), (1, 1)):
        notes.append(
            "baseline bound does not apply: the quadric Segre surface "
            "P^1 x P^1 in P^3 is its classical exception"
        )
    if d >= 3:
        h_main = main_bound_value(n1, d)
        decomposition = binary_profile(d - 2)
        h_asym = n1 ** ((d - 1).bit_length() - 1)
        assert decomposition.lambdas and decomposition.lambdas[0] == (d - 1).bit_length() - 1
        assert h_main == intro_bound_value(n1, d)
    else:
        h_main = None
        notes.append(f"total degree {d} < 3: only the baseline bound applies")
        decomposition = binary_profile(d - 2) if d >= 2 else None
        h_asym = n1 ** ((d - 1).bit_length() - 1) if d >= 2 else None
    return BoundReport(
        shape=sh,
        h_main=h_main,
        h_baseline=baseline,
        h_asymptotic=h_asym,
        decomposition=decomposition,
        notes=tuple(notes),
    )


# The published d-vs-h table: closed forms of the main bound for small odd d.
TABLE_FORMS = (
    (3, "n1+1", lambda m, n1: m),
    (5, "n1(n1+1)+1", lambda m, n1: n1 * m + 1),
    (7, "n1((n1+1)+1)+1", lambda m, n1: n1 * (m + 1) + 1),
    (9, "n1(n1+1)^2+1", lambda m, n1: n1 * m**2 + 1),
    (11, "n1((n1+1)^2+1)+1", lambda m, n1: n1 * (m**2 + 1) + 1),
    (13, "n1((n1+1)^2+n1+1)+1", lambda m, n1: n1 * (m**2 + n1 + 1) + 1),
    (15, "n1((n1+1)^2+(n1+1)+1)+1", lambda m, n1: n1 * (m**2 + m + 1) + 1),
    (17, "n1(n1+1)^3+1", lambda m, n1: n1 * m**3 + 1),
)


@dataclass(frozen=True)
class TableRow:
    d: int
    formula: str
    h: int


def reproduce_table(n1: int):
    """Evaluate the eight tabulated closed forms and check each against the
    general bound."""
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    m = n1 + 1
    rows = []
    for d, formula, closed in TABLE_FORMS:
        h = closed(m, n1)
        general = main_bound_value(n1, d)
        if h != general:
            raise AssertionError(
                f"table form for d={d} disagrees with the bound: {h} != {general}"
            )
        rows.append(TableRow(d, formula, h))
    return rows
