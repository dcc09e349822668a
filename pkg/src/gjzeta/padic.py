"""
Finite-precision arithmetic over Q_p and GL_n(Z_p) bookkeeping.

Scalars are stored as p^v * u with u a unit known modulo p^(relative
precision).  The group-level routines (Iwasawa decomposition, flag
points, Hermite cosets, congruence subgroups) mostly work on plain
integer matrices reduced modulo a power of p, which is what the integral
evaluators feed them.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, List, Optional, Sequence, Tuple

from sympy import isprime

IntMatrix = Tuple[Tuple[int, ...], ...]


class PrecisionError(ArithmeticError):
    """Working precision is exhausted; retry with a larger N."""


class LevelError(ValueError):
    """A level (congruence exponent) is too small for the requested operation."""


@dataclass(frozen=True)
class PadicConfig:
    p: int
    n: int
    N: int = 20

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 1 or self.N < 1:
            raise ValueError("need n >= 1 and N >= 1")

    @property
    def q(self) -> int:
        return self.p


def valuation(x: int, p: int, cap: Optional[int] = None) -> int:
    """p-adic valuation of a nonzero integer (or cap if x == 0 and cap given)."""
    if x == 0:
        if cap is None:
            raise ValueError("valuation of 0")
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def rational_valuation(x: Fraction, p: int) -> int:
    x = Fraction(x)
    return valuation(x.numerator, p) - valuation(x.denominator, p)


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadicScalar:
    """p^v * u with u known mod p^rel.  v is None for (approximate) zero,
    in which case the value is only known to vanish mod p^absprec."""

    p: int
    v: Optional[int]
    u: int
    rel: int
    zero_prec: int = 0

    @classmethod
    def from_rational(cls, x, p: int, N: int) -> "PadicScalar":
        x = Fraction(x)
        if x == 0:
            return cls(p, None, 0, 0, zero_prec=10**9)
        v = rational_valuation(x, p)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        mod = p**N
        return cls(p, v, num * pow(den, -1, mod) % mod, N)

    @classmethod
    def zero(cls, p: int, absprec: int) -> "PadicScalar":
        return cls(p, None, 0, 0, zero_prec=absprec)

    @property
    def absprec(self) -> int:
        return self.zero_prec if self.v is None else self.v + self.rel

    def is_zero(self) -> bool:
        return self.v is None

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        if self.v is None or other.v is None:
            bound = min(
                self.absprec + (other.v if other.v is not None else other.zero_prec),
                other.absprec + (self.v if self.v is not None else self.zero_prec),
            )
            return PadicScalar.zero(self.p, bound)
        rel = min(self.rel, other.rel)
        return PadicScalar(self.p, self.v + other.v, self.u * other.u % self.p**rel, rel)

    def __neg__(self):
        if self.v is None:
            return self
        return PadicScalar(self.p, self.v, (-self.u) % self.p**self.rel, self.rel)

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        p = self.p
        A = min(self.absprec, other.absprec)
        vals = [s.v for s in (self, other) if s.v is not None]
        if not vals:
            return PadicScalar.zero(p, A)
        e = min(vals)
        if e >= A:
            return PadicScalar.zero(p, A)
        mod = p ** (A - e)
        total = 0
        for s in (self, other):
            if s.v is not None:
                total += s.u * p ** (s.v - e)
        total %= mod
        if total == 0:
            return PadicScalar.zero(p, A)
        w = valuation(total, p)
        return PadicScalar(p, e + w, (total // p**w) % p ** (A - e - w), A - e - w)

    def __sub__(self, other):
        return self + (-other)

    def inverse(self) -> "PadicScalar":
        if self.v is None:
            raise PrecisionError("cannot invert a value indistinguishable from 0")
        return PadicScalar(self.p, -self.v, pow(self.u, -1, self.p**self.rel), self.rel)

    def abs_exponent(self) -> int:
        """|x| = q^(-v); returns v."""
        if self.v is None:
            raise PrecisionError("absolute value of an unresolved zero")
        return self.v

    def to_fraction(self) -> Fraction:
        """A rational representative (exact when the input was integral-ish)."""
        if self.v is None:
            return Fraction(0)
        u = self.u
        half = self.p**self.rel
        if u > half // 2:
            u -= half
        return Fraction(u) * Fraction(self.p) ** self.v

    def __str__(self):
        if self.v is None:
            return f"O(p^{self.zero_prec})"
        return f"ϖ^{self.v}·{self.u} mod p^{self.rel}"


@dataclass(frozen=True)
class PadicMatrix:
    p: int
    entries: Tuple[Tuple[PadicScalar, ...], ...]

    @classmethod
    def from_rows(cls, rows, p: int, N: int = 20) -> "PadicMatrix":
        return cls(p, tuple(tuple(PadicScalar.from_rational(x, p, N) for x in r) for r in rows))

    @classmethod
    def identity(cls, n, p, N=20) -> "PadicMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], p, N)

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0]) if self.entries else 0

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        r, m = self.shape
        m2, c = other.shape
        if m != m2:
            raise ValueError("shape mismatch")
        rows = []
        for i in range(r):
            row = []
            for j in range(c):
                acc = PadicScalar.zero(self.p, 10**9)
                for k in range(m):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return PadicMatrix(self.p, tuple(rows))

    def to_fractions(self):
        return [[x.to_fraction() for x in r] for r in self.entries]

    def min_valuation(self) -> int:
        vals = [x.v for r in self.entries for x in r if x.v is not None]
        if not vals:
            raise PrecisionError("matrix indistinguishable from 0")
        return min(vals)

    def absprec(self) -> int:
        return min(x.absprec for r in self.entries for x in r)

    def integral_form(self) -> Tuple[int, IntMatrix, int]:
        """(e, G, prec) with p^e * self = G mod p^prec, G integral."""
        p = self.p
        e = -min(self.min_valuation(), 0)
        prec = self.absprec() + e
        mod = p**prec
        rows = []
        for r in self.entries:
            row = []
            for x in r:
                if x.v is None:
                    row.append(0)
                else:
                    row.append(x.u * p ** (x.v + e) % mod)
            rows.append(tuple(row))
        return e, tuple(rows), prec

    def __str__(self):
        return "[" + "; ".join(", ".join(str(x) for x in r) for r in self.entries) + "]"


def matrix_to_json(m: PadicMatrix) -> list:
    return [[str(x) for x in r] for r in m.entries]


# ---------------------------------------------------------------------------
# integer-matrix helpers
# ---------------------------------------------------------------------------


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], mod: Optional[int] = None) -> IntMatrix:
    n, m, c = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(c):
            s = 0
            for k in range(m):
                s += ai[k] * b[k][j]
            row.append(s % mod if mod else s)
        out.append(tuple(row))
    return tuple(out)


def det_int(a: Sequence[Sequence[int]]) -> int:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if n == 3:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )
    # Bareiss
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse_mod(a: Sequence[Sequence[int]], p: int, L: int) -> IntMatrix:
    """Inverse of a matrix in GL_n(Z/p^L)."""
    n = len(a)
    mod = p**L
    m = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] % p), None)
        if piv is None:
            raise ValueError("matrix is not invertible mod p")
        m[c], m[piv] = m[piv], m[c]
        inv = pow(m[c][c], -1, mod)
        m[c] = [x * inv % mod for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] % mod:
                f = m[r][c]
                m[r] = [(x - f * y) % mod for x, y in zip(m[r], m[c])]
    return tuple(tuple(r[n:]) for r in m)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def diag_power(p: int, a: Sequence[int]) -> IntMatrix:
    n = len(a)
    return tuple(tuple(p ** a[i] if i == j else 0 for j in range(n)) for i in range(n))


# ---------------------------------------------------------------------------
# Iwasawa decomposition
# ---------------------------------------------------------------------------


def iwasawa_int(g: Sequence[Sequence[int]], p: int, N: int):
    """Iwasawa data of an integral matrix known mod p^N.

    Returns (a, k, A, prec): g = u * diag(p^a) * k with k in GL_n(Z_p)
    given mod p^prec, and A = g * E the upper-triangular column-reduced
    form (diag entries p^a_i * unit).  prec = N - sum(a).
    """
    n = len(g)
    mod = p**N
    A = [[x % mod for x in r] for r in g]
    Einv = [[int(i == j) for j in range(n)] for i in range(n)]
    a = [0] * n
    for i in range(n - 1, -1, -1):
        row = A[i]
        best_j, best_v = -1, N
        for j in range(i + 1):
            x = row[j]
            if x:
                vj = 0
                while x % p == 0:
                    x //= p
                    vj += 1
                if vj < best_v:
                    best_j, best_v = j, vj
                    if vj == 0:
                        break
        if best_j < 0:
            raise PrecisionError(f"row {i} has no pivot at precision p^{N}")
        if best_j != i:
            for r in A:
                r[best_j], r[i] = r[i], r[best_j]
            Einv[best_j], Einv[i] = Einv[i], Einv[best_j]
        pv = p**best_v
        uinv = pow(A[i][i] // pv, -1, mod)
        for l in range(i):
            x = A[i][l]
            if x:
                f = (x // pv) * uinv % mod
                for r in range(i + 1):
                    A[r][l] = (A[r][l] - f * A[r][i]) % mod
                # E <- E (1 - f e_{il})  <=>  Einv <- (1 + f e_{il}) Einv
                Ei, El = Einv[i], Einv[l]
                for c in range(n):
                    Ei[c] = (Ei[c] + f * El[c]) % mod
        a[i] = best_v
    prec = N - sum(a)
    if prec < 1:
        raise PrecisionError("precision exhausted during Iwasawa reduction")
    pm = p**prec
    k = []
    for i in range(n):
        eps = (A[i][i] // p ** a[i]) % pm
        k.append(tuple(eps * x % pm for x in Einv[i]))
    return tuple(a), tuple(k), A, prec


def iwasawa_decompose(g: PadicMatrix):
    """g = u * diag(p^a) * k with u unipotent upper triangular and k in GL_n(Z_p).

    Returns (u, a, k) with u and k as PadicMatrix and a as a tuple of ints.
    """
    p = g.p
    e, G, prec = g.integral_form()
    if prec <= 0:
        raise PrecisionError("no precision left")
    a, k, A, kprec = iwasawa_int(G, p, prec)
    n = len(a)
    # A = u * diag(p^a_i * eps_i)
    u_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if j < i:
                row.append(PadicScalar.zero(p, kprec))
            elif j == i:
                row.append(PadicScalar.from_rational(1, p, kprec))
            else:
                piv = PadicScalar.from_rational(A[j][j], p, prec)
                x = PadicScalar.from_rational(A[i][j], p, prec)
                row.append(x * piv.inverse() if A[i][j] else PadicScalar.zero(p, kprec))
        u_rows.append(tuple(row))
    u = PadicMatrix(p, tuple(u_rows))
    kmat = PadicMatrix(
        p,
        tuple(
            tuple(PadicScalar.from_rational(x, p, kprec) if x else PadicScalar.zero(p, kprec) for x in r)
            for r in k
        ),
    )
    return u, tuple(x - e for x in a), kmat


# ---------------------------------------------------------------------------
# flag variety B(Z/p^L) \ GL_n(Z/p^L)
# ---------------------------------------------------------------------------


def canonical_flag(k: Sequence[Sequence[int]], p: int, L: int):
    """Write k = b x (mod p^L) with b upper triangular and x the canonical
    coset representative.  Returns (x, diag(b))."""
    n = len(k)
    mod = p**L
    rows: List[Optional[Tuple[int, ...]]] = [None] * n
    pivcol = [0] * n
    used = [False] * n
    diag = [0] * n
    for i in range(n - 1, -1, -1):
        r = [x % mod for x in k[i]]
        for j in range(n - 1, i, -1):
            t = r[pivcol[j]]
            if t:
                rj = rows[j]
                r = [(x - t * y) % mod for x, y in zip(r, rj)]
        for c in range(n):
            if not used[c] and r[c] % p:
                break
        else:
            raise ValueError("matrix is not invertible mod p")
        uu = r[c]
        inv = pow(uu, -1, mod)
        rows[i] = tuple(x * inv % mod for x in r)
        pivcol[i] = c
        used[c] = True
        diag[i] = uu
    return tuple(rows), tuple(diag)


def canonical_flag_batch(k, p: int, L: int):
    """Vectorized canonical_flag on an array of shape (B, n, n).

    Returns (rows, diag) as int64 arrays of shapes (B, n, n) and (B, n).
    Raises ValueError if some matrix is singular mod p."""
    import numpy as np

    k = np.asarray(k, dtype=np.int64)
    B, n, _ = k.shape
    mod = p**L
    inv_tab = np.zeros(mod, dtype=np.int64)
    for u in range(mod):
        if u % p:
            inv_tab[u] = pow(u, -1, mod)
    rows = np.zeros_like(k)
    diag = np.zeros((B, n), dtype=np.int64)
    pivcol = np.zeros((B, n), dtype=np.int64)
    used = np.zeros((B, n), dtype=bool)
    idx = np.arange(B)
    for i in range(n - 1, -1, -1):
        r = k[:, i, :] % mod
        for j in range(n - 1, i, -1):
            t = r[idx, pivcol[:, j]]
            r = (r - t[:, None] * rows[:, j, :]) % mod
        cand = (r % p != 0) & ~used
        if not cand.any(axis=1).all():
            raise ValueError("matrix is not invertible mod p")
        c = np.argmax(cand, axis=1)
        uu = r[idx, c]
        rows[:, i, :] = r * inv_tab[uu][:, None] % mod
        pivcol[:, i] = c
        used[idx, c] = True
        diag[:, i] = uu
    return rows, diag


def group_array(n: int, p: int, m: int, L: int):
    """K_0(p^m) reduced mod p^L as an int64 array (B, n, n); all of GL_n(Z/p^L) when m = 0.

    Same elements and order as k0_elements / gl_elements."""
    import numpy as np

    if L < m:
        raise LevelError("need L >= m")
    mod = p**L
    if n > 3:
        src = gl_elements(n, p, L) if m == 0 else k0_elements(n, p, m, L)
        return np.array(list(src), dtype=np.int64).reshape(-1, n, n)
    if n == 1:
        top = np.zeros((1, 0), dtype=np.int64)
    else:
        top = np.indices((mod,) * (n * (n - 1))).reshape(n * (n - 1), -1).T
    step = p**m if m else 1
    bottom_axes = [np.arange(0, mod, step)] * (n - 1) + [np.arange(mod)]
    bot = np.stack(np.meshgrid(*bottom_axes, indexing="ij"), axis=-1).reshape(-1, n)
    B = top.shape[0] * bot.shape[0]
    mats = np.empty((top.shape[0], bot.shape[0], n, n), dtype=np.int64)
    if n > 1:
        mats[:, :, : n - 1, :] = top.reshape(-1, 1, n - 1, n)
    mats[:, :, n - 1, :] = bot.reshape(1, -1, n)
    mats = mats.reshape(B, n, n)
    if n == 1:
        d = mats[:, 0, 0]
    elif n == 2:
        d = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    else:
        a = mats
        d = (
            a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
            - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
            + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0])
        )
    return mats[d % p != 0]


def matrix_codes(rows, p: int, L: int):
    """Integer codes of (B, n, n) residue arrays (base p^L digits, row-major)."""
    import numpy as np

    rows = np.asarray(rows, dtype=np.int64)
    B = rows.shape[0]
    flat = rows.reshape(B, -1)
    mod = p**L
    code = np.zeros(B, dtype=np.int64)
    for j in range(flat.shape[1]):
        code = code * mod + flat[:, j]
    return code


def _flag_rows(n: int, p: int, L: int, i: int, used: Tuple[int, ...], pivots: Tuple[int, ...]):
    """Enumerate canonical rows i..0 given pivots of rows below."""
    mod = p**L
    if i < 0:
        yield ()
        return
    for c in range(n):
        if c in used:
            continue
        choices = []
        for col in range(n):
            if col == c:
                choices.append((1,))
            elif col in used:
                choices.append((0,))
            elif col < c:
                choices.append(tuple(range(0, mod, p)))
            else:
                choices.append(tuple(range(mod)))
        for row in itertools.product(*choices):
            for rest in _flag_rows(n, p, L, i - 1, used + (c,), pivots + (c,)):
                yield rest + (row,)


def flag_points(cfg_or_n, m: int, p: Optional[int] = None) -> Iterator[IntMatrix]:
    """Canonical representatives of B(Z/p^m)\\GL_n(Z/p^m), lifted to K.

    Deterministic (lexicographic in pivot choices and residues)."""
    if isinstance(cfg_or_n, PadicConfig):
        n, p = cfg_or_n.n, cfg_or_n.p
    else:
        n = cfg_or_n
    if m < 1:
        raise LevelError("flag level must be >= 1")
    for rows in _flag_rows(n, p, m, n - 1, (), ()):
        yield tuple(rows)


def flag_count(n: int, p: int, m: int) -> int:
    """|GL_n(Z/p^m)| / |B(Z/p^m)|."""
    return gl_order(n, p, m) // borel_order(n, p, m)


def gl_order(n: int, p: int, m: int) -> int:
    out = 1
    for i in range(n):
        out *= p**n - p**i
    return out * p ** (n * n * (m - 1))


def borel_order(n: int, p: int, m: int) -> int:
    units = (p - 1) * p ** (m - 1)
    return units**n * p ** (m * n * (n - 1) // 2)


# ---------------------------------------------------------------------------
# Hermite forms: {g in Mat_n(O) : v(det g) = v} = disjoint union of H K
# ---------------------------------------------------------------------------


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def hermite_forms(cfg_or_n, v: int, p: Optional[int] = None, last_exponent: Optional[int] = None) -> Iterator[IntMatrix]:
    """Upper-triangular representatives H with diag p^a_i, sum a_i = v and
    entry (i, j), i < j, reduced mod p^a_i (column reduction), so that the
    cosets H K are pairwise distinct and cover the determinant shell.

    ``last_exponent`` optionally restricts a_n."""
    if isinstance(cfg_or_n, PadicConfig):
        n, p = cfg_or_n.n, cfg_or_n.p
    else:
        n = cfg_or_n
    if v < 0:
        raise ValueError("v must be nonnegative")
    for a in compositions(v, n):
        if last_exponent is not None and a[-1] != last_exponent:
            continue
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        ranges = [range(p ** a[i]) for i, j in slots]
        for vals in itertools.product(*ranges):
            H = [[0] * n for _ in range(n)]
            for i in range(n):
                H[i][i] = p ** a[i]
            for (i, j), x in zip(slots, vals):
                H[i][j] = x
            yield tuple(tuple(r) for r in H)


def hermite_count(n: int, p: int, v: int) -> int:
    return sum(p ** sum(a[i] * (n - 1 - i) for i in range(n)) for a in compositions(v, n))


# ---------------------------------------------------------------------------
# congruence subgroups and volumes
# ---------------------------------------------------------------------------


def gl_elements(n: int, p: int, L: int) -> Iterator[IntMatrix]:
    """All of GL_n(Z/p^L) (brute force; small cases only)."""
    mod = p**L
    for flat in itertools.product(range(mod), repeat=n * n):
        m = tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))
        if det_int(m) % p:
            yield m


def k0_elements(n: int, p: int, m: int, L: int) -> Iterator[IntMatrix]:
    """K_0(p^m) reduced mod p^L (L >= m): bottom row = (0,...,0,*) mod p^m."""
    if L < m:
        raise LevelError("need L >= m")
    mod = p**L
    top_ranges = [range(mod)] * (n * (n - 1))
    bottom = [range(0, mod, p**m)] * (n - 1) + [range(mod)]
    for top in itertools.product(*top_ranges):
        for bot in itertools.product(*bottom):
            rows = [tuple(top[i * n : (i + 1) * n]) for i in range(n - 1)] + [tuple(bot)]
            if det_int(rows) % p:
                yield tuple(rows)


def primitive_vectors(n: int, p: int, m: int) -> Iterator[Tuple[int, ...]]:
    mod = p**m
    for vec in itertools.product(range(mod), repeat=n):
        if any(x % p for x in vec):
            yield vec


def projective_points(n: int, p: int, m: int) -> List[Tuple[int, ...]]:
    """P^{n-1}(Z/p^m): primitive row vectors up to units, normalized so the
    first unit coordinate is 1."""
    mod = p**m
    pts = []
    for vec in primitive_vectors(n, p, m):
        j = next(i for i, x in enumerate(vec) if x % p)
        if vec[j] == 1:
            pts.append(vec)
    return pts


def k0_index(n: int, p: int, m: int) -> int:
    """[K : K_0(p^m)] as the size of the K-orbit of [0:...:0:1] in P^{n-1}(Z/p^m).

    K acts transitively on primitive rows, so the orbit is all of
    P^{n-1}(Z/p^m); counted as (#primitive vectors) / (#units)."""
    if m == 0:
        return 1
    if n == 1:
        return 1
    mod = p**m
    primitive = mod**n - (mod // p) ** n
    units = mod - mod // p
    return primitive // units


def subgroup_volume(cfg: PadicConfig, which: str, level: int = 1) -> Fraction:
    """Haar volume with vol(K) = 1.  which in {"K", "K(p^N)", "K_0(p^m)"}."""
    n, p = cfg.n, cfg.p
    if which == "K":
        return Fraction(1)
    if level < 1:
        raise LevelError("congruence level must be >= 1")
    if which in ("K(p^N)", "K(N)", "principal"):
        return Fraction(1, gl_order(n, p, level))
    if which in ("K_0(p^m)", "K0", "K_0"):
        return Fraction(1, k0_index(n, p, level))
    raise ValueError(f"unknown subgroup {which!r}")


def k0_coset_reps(n: int, p: int, m: int) -> List[IntMatrix]:
    """Representatives k with K = disjoint union of k K_0(p^m) (left cosets)."""
    if m == 0 or n == 1:
        return [identity(n)]
    reps = []
    for pt in projective_points(n, p, m):
        # a matrix in K with last row pt, then invert
        j = next(i for i, x in enumerate(pt) if x % p)
        rows = []
        others = [c for c in range(n) if c != j]
        for idx in range(n - 1):
            rows.append(tuple(int(c == others[idx]) for c in range(n)))
        rows.append(tuple(pt))
        k = tuple(rows)
        reps.append(inverse_mod(k, p, m))
    return reps


# ---------------------------------------------------------------------------
# modulus character
# ---------------------------------------------------------------------------


def modulus_exponent(a: Sequence[int]) -> int:
    """e with delta_n(diag(p^a)) = q^e, i.e. e = -sum a_i (n - 2i + 1) (1-based i)."""
    n = len(a)
    return -sum(a[i] * (n - 2 * (i + 1) + 1) for i in range(n))


def modulus(field, a: Sequence[int], half: bool = False):
    """delta_n(a) or delta_n^{1/2}(a) as an exact CoeffValue."""
    e = modulus_exponent(a)
    return field.sqrt_q_power(e) if half else field.q_power(e)


def abs_det(field, g: Sequence[Sequence[int]], p: int):
    """|det g| as a CoeffValue (g an integer or rational matrix)."""
    d = Fraction(det_int(g)) if all(isinstance(x, int) for r in g for x in r) else _det_frac(g)
    if d == 0:
        raise ValueError("singular matrix")
    return field.q_power(-rational_valuation(d, p))


def _det_frac(g):
    from sympy import Matrix

    return Fraction(str(Matrix([[Fraction(x) for x in r] for r in g]).det()))


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------


def random_k(n: int, p: int, L: int, rng: random.Random) -> IntMatrix:
    mod = p**L
    while True:
        m = tuple(tuple(rng.randrange(mod) for _ in range(n)) for _ in range(n))
        if det_int(m) % p:
            return m


def random_k0(n: int, p: int, m: int, L: int, rng: random.Random) -> IntMatrix:
    mod = p**L
    while True:
        rows = [tuple(rng.randrange(mod) for _ in range(n)) for _ in range(n - 1)]
        last = tuple(rng.randrange(0, mod, p**m) for _ in range(n - 1)) + (rng.randrange(mod),)
        mat = tuple(rows) + (last,)
        if det_int(mat) % p:
            return mat


def random_unipotent(n: int, p: int, L: int, rng: random.Random) -> IntMatrix:
    mod = p**L
    return tuple(
        tuple(1 if i == j else (rng.randrange(mod) if j > i else 0) for j in range(n)) for i in range(n)
    )
