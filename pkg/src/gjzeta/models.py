"""
Induced-model vectors as finite tables on B(Z/p^m)\\GL_n(Z/p^m).

A vector f in Ind(chi_1, ..., chi_n) that is right K(p^m)-invariant is
determined by its values on canonical flag representatives; everything
else follows from f(u a k) = delta^{1/2}(a) prod chi_i(a_i) f(k).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exactnum import CoeffValue, LaurentPoly, SatakeRat, coeff_to_json, satake_to_json
from .padic import (
    IntMatrix,
    LevelError,
    PadicMatrix,
    PrecisionError,
    canonical_flag,
    canonical_flag_batch,
    det_int,
    flag_points,
    iwasawa_int,
    k0_elements,
    gl_elements,
    group_array,
    mat_mul,
    matrix_codes,
    modulus_exponent,
    rational_valuation,
    valuation,
)
from .reps import LanglandsDatum, dual_induced_datum

log = logging.getLogger(__name__)


class NewformSearchError(RuntimeError):
    """The conductor search did not behave as the theory demands."""


class StabilizationError(RuntimeError):
    """Results at consecutive levels disagree beyond the level budget."""


@lru_cache(maxsize=None)
def flag_table(n: int, p: int, m: int) -> Tuple[Tuple[IntMatrix, ...], Dict[IntMatrix, int]]:
    pts = tuple(flag_points(n, m, p=p))
    return pts, {x: i for i, x in enumerate(pts)}


@lru_cache(maxsize=None)
def _k0_list(n: int, p: int, m: int, L: int) -> Tuple[IntMatrix, ...]:
    if m == 0:
        return tuple(gl_elements(n, p, L))
    return tuple(k0_elements(n, p, m, L))


@dataclass
class FlagFunction:
    """A right K(p^level)-invariant vector of the induced model of ``datum``.

    ``table`` maps canonical flag representatives to values; absent keys are 0.
    """

    datum: LanglandsDatum
    level: int
    table: Dict[IntMatrix, object] = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.level < 1:
            raise LevelError("flag functions live at level >= 1")
        if self.level < self.datum.max_char_conductor:
            raise LevelError(
                f"level {self.level} is below the character conductor {self.datum.max_char_conductor}"
            )
        self.table = {k: v for k, v in self.table.items() if not _is_zero(v)}

    @property
    def p(self):
        return self.datum.p

    @property
    def n(self):
        return self.datum.n

    def value_on_K(self, k: Sequence[Sequence[int]]):
        """f(k) for k in GL_n(Z_p) given as an integer matrix."""
        x, diag = canonical_flag(k, self.p, self.level)
        v = self.table.get(x)
        if v is None:
            return None
        return self.datum.torus_unit_value(diag) * v

    def is_zero(self) -> bool:
        return not self.table

    def scale(self, c) -> "FlagFunction":
        return FlagFunction(self.datum, self.level, {k: v * c for k, v in self.table.items()})

    def __add__(self, other: "FlagFunction") -> "FlagFunction":
        a, b = _common_level(self, other)
        out = dict(a.table)
        for k, v in b.table.items():
            out[k] = out[k] + v if k in out else v
        return FlagFunction(a.datum, a.level, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def lift(self, L: int) -> "FlagFunction":
        """The same vector tabulated at level L >= level."""
        if L == self.level:
            return self
        if L < self.level:
            raise LevelError("use lower_level to go down")
        pts, _ = flag_table(self.n, self.p, L)
        out = {}
        for y in pts:
            v = self.value_on_K(y)
            if v is not None:
                out[y] = v
        return FlagFunction(self.datum, L, out)

    def lower_level(self, m: int) -> "FlagFunction":
        """Average over K(p^m): the K(p^m)-invariant part, tabulated at level m."""
        if m == self.level:
            return self
        if m > self.level:
            raise LevelError("use lift to go up")
        if m < max(1, self.datum.max_char_conductor):
            raise LevelError("target level below the character conductor")
        pts, _ = flag_table(self.n, self.p, self.level)
        fiber = len(pts) // len(flag_table(self.n, self.p, m)[0])
        acc: Dict[IntMatrix, object] = {}
        for y, v in self.table.items():
            x, diag = canonical_flag(y, self.p, m)
            w = self.datum.torus_unit_value(diag).inverse() * v
            acc[x] = acc[x] + w if x in acc else w
        inv = Fraction(1, fiber)
        return FlagFunction(self.datum, m, {k: v * inv for k, v in acc.items()})

    def equals(self, other: "FlagFunction") -> bool:
        a, b = _common_level(self, other)
        keys = set(a.table) | set(b.table)
        return all(_eq(a.table.get(k), b.table.get(k)) for k in keys)

    def to_json(self) -> dict:
        rows = []
        pts, _ = flag_table(self.n, self.p, self.level)
        for x in pts:
            if x in self.table:
                v = self.table[x]
                rows.append({"point": [list(r) for r in x], "value": _value_json(v)})
        return {"level": self.level, "datum": self.datum.describe(), "support": rows}


def _is_zero(v) -> bool:
    return v is None or v.is_zero()


def _eq(a, b) -> bool:
    if _is_zero(a):
        return _is_zero(b)
    if _is_zero(b):
        return False
    return a == b


def _value_json(v):
    if isinstance(v, CoeffValue):
        return coeff_to_json(v)
    return satake_to_json(v)


def _common_level(a: FlagFunction, b: FlagFunction):
    L = max(a.level, b.level)
    return a.lift(L), b.lift(L)


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------


def _check_level(pi: LanglandsDatum, m: int):
    if m < max(1, pi.max_char_conductor):
        raise LevelError(
            f"level {m} too small: need >= max(1, max conductor) = {max(1, pi.max_char_conductor)}"
        )


def seed_vector(pi: LanglandsDatum, m: int, point: Optional[IntMatrix] = None) -> FlagFunction:
    """The B-equivariant extension of the indicator of one flag point
    (the identity coset by default)."""
    _check_level(pi, m)
    n, p = pi.n, pi.p
    if point is None:
        point = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    x, diag = canonical_flag(point, p, m)
    # value at `point` is 1, so the table value at its canonical form is chi(diag)^{-1}
    return FlagFunction(pi, m, {x: pi.torus_unit_value(diag).inverse()})


def spherical_vector(pi: LanglandsDatum, m: int = 1) -> FlagFunction:
    """The normalized spherical vector f^o with f^o(1) = prod_{i<j} zeta(1 + t_i - t_j)."""
    if not pi.is_spherical:
        raise ValueError("datum is not spherical")
    F = pi.field
    val = SatakeRat.constant(F, 1)
    alphas = pi.satake_values()
    qinv = F.q_power(-1)
    for i in range(pi.n):
        for j in range(i + 1, pi.n):
            ratio = alphas[i] * alphas[j] ** -1
            val = val / SatakeRat(LaurentPoly.constant(F, 1) - ratio.scale(qinv))
    pts, _ = flag_table(pi.n, pi.p, m)
    return FlagFunction(pi, m, {x: val for x in pts})


def _exact_rows(g):
    if isinstance(g, PadicMatrix):
        return g.to_fractions()
    if all(isinstance(x, int) for r in g for x in r):
        return g
    return [[Fraction(x) for x in r] for r in g]


def _exact_det(rows):
    if all(isinstance(x, int) for r in rows for x in r):
        return det_int(rows)
    from sympy import Matrix, Rational

    return Fraction(str(Matrix([[Rational(x.numerator, x.denominator) for x in r] for r in rows]).det()))


def _integral_data(g, p: int, m: int):
    """(e, G, N): p^e g is integral and equals G mod p^N, with N large
    enough to read the Iwasawa data to level m."""
    if isinstance(g, PadicMatrix):
        e, G, N = g.integral_form()
        d = det_int(G) % p**N
        if d == 0:
            raise PrecisionError("determinant not resolved at the given precision")
        if N - valuation(d, p) < m:
            raise PrecisionError(f"need precision {m + valuation(d, p)}, have {N}")
        return e, G, N
    rows = _exact_rows(g)
    nz = [Fraction(x) for r in rows for x in r if x != 0]
    e = max([0] + [-rational_valuation(x, p) for x in nz])
    d = _exact_det(rows)
    if d == 0:
        raise ValueError("singular matrix")
    vdet = rational_valuation(Fraction(d), p) + len(rows) * e
    N = m + vdet + 1
    mod = p**N
    scale = p**e
    G = tuple(tuple(_frac_mod(Fraction(x) * scale, mod) for x in r) for r in rows)
    return e, G, N


def det_valuation(g, p: int) -> int:
    d = _exact_det(_exact_rows(g))
    if d == 0:
        raise ValueError("singular matrix")
    return rational_valuation(Fraction(d), p)


def _frac_mod(x: Fraction, mod: int) -> int:
    return x.numerator * pow(x.denominator, -1, mod) % mod


def induced_parts(datum: LanglandsDatum, g, m: int):
    """Iwasawa data needed to evaluate a level-m vector at g.

    Returns (a, diag, x): g = u diag(p^a) b x k' with x the canonical flag
    point, diag the unit diagonal of b and k' in K(p^m)."""
    p = datum.p
    e, G, N = _integral_data(g, p, m)
    a, k, _, kprec = iwasawa_int(G, p, N)
    if kprec < m:
        raise PrecisionError("Iwasawa reduction lost too much precision")
    x, diag = canonical_flag(k, p, m)
    return tuple(ai - e for ai in a), diag, x


def evaluate_induced(f: FlagFunction, g) -> SatakeRat:
    """f(g) = delta^{1/2}(a) prod chi_i(a_i) f(k) via the Iwasawa decomposition."""
    pi = f.datum
    a, diag, x = induced_parts(pi, g, f.level)
    v = f.table.get(x)
    if v is None:
        return SatakeRat.constant(pi.field, 0)
    coeff = pi.field.sqrt_q_power(modulus_exponent(a)) * pi.torus_unit_value(diag)
    return SatakeRat(pi.alpha_monomial(a).scale(coeff)) * v


def right_translate(f: FlagFunction, g, level: Optional[int] = None) -> FlagFunction:
    """(pi(g) f)(x) = f(x g), tabulated at a level where it is invariant."""
    p = f.p
    g = _exact_rows(g)
    L = level if level is not None else f.level + max(0, det_valuation(g, p))
    pts, _ = flag_table(f.n, p, L)
    out = {}
    for y in pts:
        yg = [[sum(y[i][k] * g[k][j] for k in range(f.n)) for j in range(f.n)] for i in range(f.n)]
        val = evaluate_induced(f, yg)
        if not val.is_zero():
            out[y] = val.normalized()
    return FlagFunction(f.datum, L, out)


# ---------------------------------------------------------------------------
# the projection Pi^m
# ---------------------------------------------------------------------------


def projection_level(pi: LanglandsDatum, m: int) -> int:
    return max(m, pi.max_char_conductor, 1)


def _projection_matrix_python(pi: LanglandsDatum, m: int, L: int, twist: bool = True):
    """Reference implementation: one canonicalization per (flag point, group element)."""
    n, p = pi.n, pi.p
    pts, index = flag_table(n, p, L)
    ks = _k0_list(n, p, m, L)
    weight = Fraction(1, len(ks))
    rows: Dict[IntMatrix, Dict[IntMatrix, CoeffValue]] = {}
    mod = p**L
    for x in pts:
        row: Dict[IntMatrix, CoeffValue] = {}
        for k in ks:
            xk = mat_mul(x, k, mod)
            y, diag = canonical_flag(xk, p, L)
            w = pi.torus_unit_value(diag)
            if m > 0 and twist:
                w = w * pi.omega_unit_value(k[n - 1][n - 1], inverse=True)
            row[y] = row[y] + w if y in row else w
        rows[x] = {y: v * weight for y, v in row.items() if not v.is_zero()}
    return rows


def _exponent_table(pi: LanglandsDatum, chi, L: int) -> np.ndarray:
    """u mod p^L -> exponent of zeta_M giving chi(u) (0 on non-units)."""
    p, M = pi.p, pi.field.M
    mod = p**L
    tab = np.zeros(mod, dtype=np.int64)
    if chi.declared_conductor == 0:
        return tab
    for u in range(mod):
        if u % p:
            tab[u] = chi.unit_exponent(u) * (M // chi.order) % M
    return tab


def _omega_inverse_table(pi: LanglandsDatum, L: int) -> np.ndarray:
    p, M = pi.p, pi.field.M
    mod = p**L
    tab = np.zeros(mod, dtype=np.int64)
    level, table, order = pi._omega
    if level == 0:
        return tab
    for u in range(mod):
        if u % p:
            tab[u] = (-table[u % p**level]) * (M // order) % M
    return tab


def _projection_matrix_numpy(pi: LanglandsDatum, m: int, L: int, twist: bool = True, chunk: int = 1 << 21):
    """Same average as the reference version, canonicalizing all (x, k) pairs in batches
    and histogramming (x, canonical point, root-of-unity exponent)."""
    n, p = pi.n, pi.p
    F = pi.field
    M = F.M
    mod = p**L
    pts, _ = flag_table(n, p, L)
    P = len(pts)
    X = np.array(pts, dtype=np.int64)
    codes = matrix_codes(X, p, L)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    G = group_array(n, p, m, L)
    chi_tabs = [_exponent_table(pi, c, L) for c in pi.chars]
    om_tab = _omega_inverse_table(pi, L)
    hist = np.zeros(P * P * M, dtype=np.int64)
    per = max(1, chunk // P)
    xi = np.repeat(np.arange(P), 1)
    for start in range(0, G.shape[0], per):
        Gc = G[start : start + per]
        C = Gc.shape[0]
        prod = np.einsum("xij,kjl->xkil", X, Gc) % mod
        prod = prod.reshape(P * C, n, n)
        rows, diag = canonical_flag_batch(prod, p, L)
        yc = matrix_codes(rows, p, L)
        pos = np.searchsorted(sorted_codes, yc)
        yidx = order[pos]
        j = np.zeros(P * C, dtype=np.int64)
        for i, tab in enumerate(chi_tabs):
            j = j + tab[diag[:, i]]
        if m > 0 and twist:
            j = j + np.tile(om_tab[Gc[:, n - 1, n - 1]], P)
        j %= M
        xidx = np.repeat(xi, C)
        key = (xidx * P + yidx) * M + j
        hist += np.bincount(key, minlength=P * P * M)
    weight = Fraction(1, G.shape[0])
    rows_out: Dict[IntMatrix, Dict[IntMatrix, CoeffValue]] = {x: {} for x in pts}
    for kk in np.nonzero(hist)[0].tolist():
        j = kk % M
        rest = kk // M
        x, y = pts[rest // P], pts[rest % P]
        val = F.zeta(j) * int(hist[kk]) if j else F.rational(int(hist[kk]))
        row = rows_out[x]
        row[y] = row[y] + val if y in row else val
    return {x: {y: v * weight for y, v in row.items() if not v.is_zero()} for x, row in rows_out.items()}


@lru_cache(maxsize=64)
def _projection_matrix_cached(pi_key, pi: LanglandsDatum, m: int, L: int, engine: str, twist: bool):
    if engine == "python":
        return _projection_matrix_python(pi, m, L, twist)
    return _projection_matrix_numpy(pi, m, L, twist)


def projection_matrix(pi: LanglandsDatum, m: int, L: Optional[int] = None, engine: str = "numpy",
                      twist: bool = True):
    """Sparse matrix of Pi^m on level-L tables: (Pi f)(x) = sum_y M[x][y] f(y).

    ``engine`` "numpy" (batched) or "python" (reference loop); both exact.
    ``twist=False`` drops omega^{-1}(k_nn) from xi^m (a negative control only)."""
    L = projection_level(pi, m) if L is None else L
    if L < projection_level(pi, m):
        raise LevelError("projection level too small")
    return _projection_matrix_cached((id(pi), m, L), pi, m, L, engine, twist)


def project_newform(f: FlagFunction, m: int, twist: bool = True) -> FlagFunction:
    """Pi^m(f) = int_K xi^m(k) pi(k) f dk, exactly."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    pi = f.datum
    L = projection_level(pi, m)
    if f.level > L:
        f = f.lower_level(L)
    elif f.level < L:
        f = f.lift(L)
    M = projection_matrix(pi, m, L, twist=twist)
    out = {}
    for x, row in M.items():
        acc = None
        for y, w in row.items():
            v = f.table.get(y)
            if v is not None:
                t = w * v
                acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            out[x] = acc
    return FlagFunction(pi, L, out)


def projection_rank(pi: LanglandsDatum, m: int, twist: bool = True) -> int:
    """dim of the image of Pi^m, read off as the trace of the (idempotent) matrix."""
    M = projection_matrix(pi, m, twist=twist)
    tr = pi.field.zero()
    for x, row in M.items():
        if x in row:
            tr = tr + row[x]
    r = tr.to_fraction()
    if r.denominator != 1:
        raise NewformSearchError(f"trace {r} of a projection is not an integer")
    return int(r)


@dataclass
class Newform:
    conductor: int
    vector: FlagFunction
    dimension: int
    seeds_checked: int


def _proportional(a: FlagFunction, b: FlagFunction) -> bool:
    keys = set(a.table) | set(b.table)
    ratio = None
    for k in keys:
        va, vb = a.table.get(k), b.table.get(k)
        if _is_zero(va) != _is_zero(vb):
            return False
        if _is_zero(va):
            continue
        r = vb / va
        if ratio is None:
            ratio = r
        elif not (r == ratio):
            return False
    return True


def newform(pi: LanglandsDatum, m_max: int = 8, seeds: int = 6, twist: bool = True,
            check_prediction: bool = True) -> Newform:
    """Search m = 0, 1, ... for the first m with Pi^m != 0.

    Returns the discovered conductor and a generator of the image.  The
    image is checked to be one-dimensional (trace of the projection and
    pairwise proportionality of projected seeds), and the conductor is
    compared with the sum of the character conductors."""
    for m in range(0, m_max + 1):
        if 0 < m < pi.omega_conductor:
            # omega^{-1}(k_nn) is not a character of K_0(p^m): no such vectors
            continue
        L = projection_level(pi, m)
        M = projection_matrix(pi, m, L, twist=twist)
        if not any(M[x] for x in M):
            continue
        dim = projection_rank(pi, m, twist)
        # projections of seeds at several flag points
        pts, _ = flag_table(pi.n, pi.p, L)
        images = []
        for x in pts:
            img = project_newform(seed_vector(pi, L, x), m, twist)
            if not img.is_zero():
                images.append(img)
                if len(images) >= seeds:
                    break
        if not images:
            raise NewformSearchError("nonzero projection but every seed projected to zero")
        for other in images[1:]:
            if not _proportional(images[0], other):
                raise NewformSearchError(f"projected seeds are not proportional at m={m}")
        if dim != 1:
            raise NewformSearchError(f"image of Pi^{m} has dimension {dim}, expected 1")
        expected = pi.predicted_conductor
        if check_prediction and m != expected:
            raise NewformSearchError(
                f"discovered conductor {m} differs from the predicted {pi.predicted_conductor}"
            )
        vec = _normalize_first(images[0])
        return Newform(m, vec, dim, len(images))
    raise NewformSearchError(f"no nonzero projection for m <= {m_max}")


def _normalize_first(f: FlagFunction) -> FlagFunction:
    pts, _ = flag_table(f.n, f.p, f.level)
    for x in pts:
        if x in f.table:
            return f.scale(f.table[x].inverse())
    return f


# ---------------------------------------------------------------------------
# pairing and matrix coefficients
# ---------------------------------------------------------------------------


def _is_dual(pi: LanglandsDatum, pit: LanglandsDatum) -> bool:
    if pi.n != pit.n or pi.p != pit.p:
        return False
    return all(a.inverse() == b for a, b in zip(pi.chars, pit.chars))


def pairing(f: FlagFunction, ft: FlagFunction):
    """<f, f~> = int_K f(k) f~(k) dk for f in Ind(chi), f~ in Ind(chi^{-1})."""
    if not _is_dual(f.datum, ft.datum):
        raise ValueError("pairing needs dual induced data (inverted characters, same order)")
    L = max(f.level, ft.level)
    a, b = f.lift(L), ft.lift(L)
    pts, _ = flag_table(f.n, f.p, L)
    acc = f.datum.field.zero()
    for x, v in a.table.items():
        w = b.table.get(x)
        if w is not None:
            acc = v * w + acc
    return acc * Fraction(1, len(pts))


@dataclass
class NewformPair:
    datum: LanglandsDatum
    dual: LanglandsDatum
    conductor: int
    v: FlagFunction
    vt: FlagFunction

    def support_at(self, L: int):
        """[(y, f~(y))] over level-L flag points with f~(y) != 0."""
        key = L
        cache = self.__dict__.setdefault("_support", {})
        if key not in cache:
            pts, _ = flag_table(self.datum.n, self.datum.p, L)
            out = []
            for y in pts:
                val = self.vt.value_on_K(y)
                if val is not None and not val.is_zero():
                    out.append((y, val))
            cache[key] = (out, len(pts))
        return cache[key]


def newform_pair(pi: LanglandsDatum, m_max: int = 8) -> NewformPair:
    """Newform v and dual newform v~, scaled so that <v, v~> = 1 (hence beta(1) = 1)."""
    nf = newform(pi, m_max)
    dual = dual_induced_datum(pi)
    nft = newform(dual, m_max)
    if nft.conductor != nf.conductor:
        raise NewformSearchError("dual datum has a different conductor")
    c = pairing(nf.vector, nft.vector)
    if c.is_zero():
        raise NewformSearchError("newform pairs to zero with the dual newform")
    return NewformPair(pi, dual, nf.conductor, nf.vector, nft.vector.scale(c.inverse()))


def beta_level(pair: NewformPair, g) -> int:
    """Smallest L with k -> v(k g) v~(k) right K(p^L)-invariant, g scaled to be integral."""
    rows = _exact_rows(g)
    p = pair.datum.p
    nz = [Fraction(x) for r in rows for x in r if x != 0]
    e = max([0] + [-rational_valuation(x, p) for x in nz])
    vdet = det_valuation(rows, p) + len(rows) * e
    return max(pair.v.level + vdet, pair.vt.level)


def matrix_coefficient(pair: NewformPair, g, certify: bool = False, level: Optional[int] = None) -> LaurentPoly:
    """beta(g) = int_K v(k g) v~(k) dk, as a Laurent polynomial in the Satake variables.

    The level is the smallest one at which k -> v(k g) is provably
    K(p^level)-invariant; with ``certify`` the value is recomputed one
    level higher and must agree exactly."""
    L = level if level is not None else beta_level(pair, g)
    val = _beta_at_level(pair, g, L)
    if certify:
        val2 = _beta_at_level(pair, g, L + 1)
        if val != val2:
            raise StabilizationError(f"beta differs between levels {L} and {L + 1}")
    return val


def _beta_at_level(pair: NewformPair, g, L: int) -> LaurentPoly:
    pi = pair.datum
    p, n = pi.p, pi.n
    F = pi.field
    support, total = pair.support_at(L)
    m = pair.v.level
    exact = _exact_rows(g)
    sums: Dict[Tuple[int, ...], CoeffValue] = {}
    for y, wt in support:
        yg = [[sum(y[i][k] * exact[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        a, diag, x = induced_parts(pi, yg, m)
        v = pair.v.table.get(x)
        if v is None:
            continue
        t = pi.torus_unit_value(diag) * v * wt
        sums[a] = sums[a] + t if a in sums else t
    out = LaurentPoly(F)
    for a, c in sums.items():
        if c.is_zero():
            continue
        out = out + pi.alpha_monomial(a).scale(c * F.sqrt_q_power(modulus_exponent(a)))
    return out.scale(F.rational(Fraction(1, total)))
