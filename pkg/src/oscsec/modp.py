"""Exact linear algebra over a large prime field.

Rank computations dominate the cost of every secant-dimension sweep, so rows
are packed into single big integers (256-bit lanes, one lane per column) and
row operations become one multiply-add of big integers each, which gmpy2
executes in C.  The accumulator keeps its pivot rows reduced-echelon *modulo
p* (a pivot row is 1 at its own pivot column and 0 mod p at every other pivot
column) while letting the integer lanes grow dirty within a proven bound:

  * pivot rows are renormalized only at insertion; later cleanings against a
    freshly inserted pivot add < p^2 < 2^124 per lane, at most once per later
    insertion, so pivot lanes stay below 2^62 + ncols * 2^124 < 2^137;
  * reducing an incoming row adds sum_c (p - v_c) * pivot_c, i.e. less than
    ncols * 2^62 * 2^137 < 2^212 per lane for ncols <= 4096.

Both bounds sit well inside the 256-bit lane, so lanes never bleed into their
neighbors and a single final unpack-and-mod recovers the residual row.

The prime must fit in 62 bits.  DEFAULT_PRIME is the smallest prime above
2^61; random_prime draws alternatives for cross-checking ranks at a second
prime.
"""

from __future__ import annotations

import random

try:
    from gmpy2 import mpz
    from gmpy2 import pack as _gmpy_pack
    from gmpy2 import unpack as _gmpy_unpack
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    mpz = int  # type: ignore[misc,assignment] -- same results, slower
    _gmpy_pack = None
    _gmpy_unpack = None

DEFAULT_PRIME = 2305843009213693967  # smallest prime > 2^61

LANE_BITS = 256
LANE_BYTES = LANE_BITS // 8

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for every n below 3.3 * 10^24."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int = 62, rng: random.Random | None = None) -> int:
    """A random prime with exactly `bits` bits (2 <= bits <= 62)."""
    if not 2 <= bits <= 62:
        raise ValueError("packed arithmetic supports primes of at most 62 bits")
    rng = rng or random.Random()
    while True:
        cand = rng.getrandbits(bits - 1) | (1 << (bits - 1)) | 1
        if is_prime(cand):
            return cand


class RankAccumulator:
    """Incremental rank of a growing list of rows over F_p.

    add_row(values) reduces the row against the current pivot rows and
    reports whether the rank increased.  Columns are fixed at construction.
    """

    __slots__ = ("prime", "ncols", "pivot_cols", "_rows", "_nbytes")

    def __init__(self, ncols: int, prime: int = DEFAULT_PRIME):
        if prime.bit_length() > 62:
            raise ValueError(f"prime {prime} exceeds 62 bits")
        if prime.bit_length() < 2 or not is_prime(prime):
            raise ValueError(f"modulus {prime} is not prime")
        if ncols > 4096:
            raise ValueError("lane headroom is proven for at most 4096 columns")
        self.prime = prime
        self.ncols = ncols
        self.pivot_cols: list[int] = []
        self._rows: list = []  # packed pivot rows, parallel to pivot_cols
        self._nbytes = ncols * LANE_BYTES

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def saturated(self) -> bool:
        return len(self._rows) == self.ncols

    def _pack(self, values) -> "mpz":
        if _gmpy_pack is not None:
            return _gmpy_pack(values, LANE_BITS)
        return mpz(
            int.from_bytes(
                b"".join([int(v).to_bytes(LANE_BYTES, "little") for v in values]),
                "little",
            )
        )

    def _unpack_mod(self, row) -> list:
        p = self.prime
        if _gmpy_unpack is not None:
            lanes = _gmpy_unpack(mpz(row), LANE_BITS)
            out = [int(w % p) for w in lanes]
            out.extend([0] * (self.ncols - len(out)))
            return out
        raw = int(row).to_bytes(self._nbytes, "little")
        return [
            int.from_bytes(raw[i : i + LANE_BYTES], "little") % p
            for i in range(0, self._nbytes, LANE_BYTES)
        ]

    def add_row(self, values) -> bool:
        """Reduce `values` (ints, any residues) against the basis; True if new pivot."""
        if len(values) != self.ncols:
            raise ValueError(f"expected {self.ncols} entries, got {len(values)}")
        if self.saturated:
            return False
        p = self.prime
        reduced = [v % p for v in values]
        row = self._pack(reduced)
        if not row:
            return False

        # Pivot rows are 0 mod p at each other's pivot columns, so the
        # multipliers can all be read off the incoming row up front.
        add = mpz(0)
        for col, prow in zip(self.pivot_cols, self._rows):
            v = reduced[col]
            if v:
                add += (p - v) * prow
        if add:
            row += add

        residual = self._unpack_mod(row)
        for col, v in enumerate(residual):
            if v:
                break
        else:
            return False

        inv = pow(v, p - 2, p)
        new_row = [x * inv % p for x in residual]
        packed = self._pack(new_row)
        # keep older pivot rows 0 mod p at the new pivot column
        shift = col * LANE_BITS
        mask = mpz((1 << LANE_BITS) - 1)
        for i, prow in enumerate(self._rows):
            w = ((prow >> shift) & mask) % p
            if w:
                self._rows[i] = prow + (p - w) * packed
        self.pivot_cols.append(col)
        self._rows.append(packed)
        return True

    def add_rows(self, rows) -> int:
        gained = 0
        for r in rows:
            if self.add_row(r):
                gained += 1
        return gained


def rank_of_rows(rows, ncols: int, prime: int = DEFAULT_PRIME) -> int:
    acc = RankAccumulator(ncols, prime)
    for r in rows:
        acc.add_row(r)
        if acc.saturated:
            break
    return acc.rank


def rank_naive(rows, prime: int) -> int:
    """Reference Gaussian elimination on plain lists; used to validate the
    packed accumulator."""
    mat = [[v % prime for v in row] for row in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(mat)):
            if mat[i][col]:
                piv = i
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], prime - 2, prime)
        mat[rank] = [x * inv % prime for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = prime - mat[i][col]
                mat[i] = [(a + f * b) % prime for a, b in zip(mat[i], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
