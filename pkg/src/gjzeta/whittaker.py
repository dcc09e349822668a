"""
Spherical Whittaker functions.

Casselman-Shalika on the torus for any n, and an exact GL_2 Jacquet
integral used as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, Sequence, Tuple

from .chars import AddChar, DepthError, make_field
from .exactnum import CoeffField, LaurentPoly, SatakeRat
from .padic import PadicMatrix, modulus_exponent, rational_valuation
from .reps import LanglandsDatum, UnsupportedError


@dataclass(frozen=True)
class WhittakerSpec:
    """Spherical datum plus the orientation of the additive character.

    orientation "psi": W(u g) = psi_n(u) W(g); "psibar": W(u g) = conj(psi_n(u)) W(g).
    """

    datum: LanglandsDatum
    orientation: str = "psi"

    def __post_init__(self):
        if not self.datum.is_spherical:
            raise ValueError("Whittaker functions here are for spherical data only")
        if self.orientation not in ("psi", "psibar"):
            raise ValueError("orientation must be 'psi' or 'psibar'")

    @property
    def field(self) -> CoeffField:
        return self.datum.field


def whittaker_spec(datum: LanglandsDatum, orientation: str = "psi", psi_depth: int = 0) -> WhittakerSpec:
    """WhittakerSpec whose coefficient field also holds p^psi_depth-th roots of unity."""
    if psi_depth:
        field = make_field(datum.chars, datum.p, psi_depth)
        datum = LanglandsDatum(datum.chars, field, datum.langlands_ordered)
    return WhittakerSpec(datum, orientation)


# ---------------------------------------------------------------------------
# Schur polynomials
# ---------------------------------------------------------------------------


def _det(mat):
    """Leibniz expansion; n is tiny."""
    n = len(mat)
    total = None
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = mat[0][perm[0]]
        for i in range(1, n):
            term = term * mat[i][perm[i]]
        if sign < 0:
            term = -term
        total = term if total is None else total + term
    return total


def _xvars(field, n):
    return [LaurentPoly.var(field, f"x{i + 1}") for i in range(n)]


@lru_cache(maxsize=512)
def schur_bialternant(field: CoeffField, lam: Tuple[int, ...]) -> LaurentPoly:
    """s_lambda(x_1..x_n) = det(x_i^{lam_j + n - j}) / det(x_i^{n - j}), lam weakly decreasing, may be negative."""
    n = len(lam)
    shift = lam[-1]
    mu = [l - shift for l in lam]
    xs = _xvars(field, n)
    one = LaurentPoly.constant(field, 1)
    num = _det([[xs[i] ** (mu[j] + n - 1 - j) if mu[j] + n - 1 - j else one for j in range(n)] for i in range(n)])
    den = _det([[xs[i] ** (n - 1 - j) if n - 1 - j else one for j in range(n)] for i in range(n)])
    s = num.divide_exact(den)
    if shift:
        e = one
        for x in xs:
            e = e * x
        s = s * e**shift
    return s


@lru_cache(maxsize=512)
def _complete_h(field: CoeffField, n: int, k: int) -> LaurentPoly:
    if k < 0:
        return LaurentPoly(field)
    if k == 0:
        return LaurentPoly.constant(field, 1)
    if n == 1:
        return LaurentPoly.var(field, "x1", k)
    # h_k(x_1..x_n) = sum_j x_n^j h_{k-j}(x_1..x_{n-1})
    xn = LaurentPoly.var(field, f"x{n}")
    out = LaurentPoly(field)
    p = LaurentPoly.constant(field, 1)
    for j in range(k + 1):
        out = out + p * _complete_h(field, n - 1, k - j)
        p = p * xn
    return out


@lru_cache(maxsize=512)
def schur_jacobi_trudi(field: CoeffField, lam: Tuple[int, ...]) -> LaurentPoly:
    """s_lambda = det(h_{lam_i - i + j})."""
    n = len(lam)
    shift = lam[-1]
    mu = [l - shift for l in lam]
    s = _det([[_complete_h(field, n, mu[i] - i + j) for j in range(n)] for i in range(n)])
    if shift:
        e = LaurentPoly.constant(field, 1)
        for x in _xvars(field, n):
            e = e * x
        s = s * e**shift
    return s


def _is_dominant(lam: Sequence[int]) -> bool:
    return all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def spherical_whittaker_cs(spec: WhittakerSpec, lam: Sequence[int]) -> SatakeRat:
    """W(diag(p^lam)) = delta^{1/2}(p^lam) s_lam(alpha), and 0 off the dominant cone."""
    lam = tuple(int(x) for x in lam)
    pi = spec.datum
    F = pi.field
    if len(lam) != pi.n:
        raise ValueError("lambda has the wrong length")
    if not _is_dominant(lam):
        return SatakeRat.constant(F, 0)
    s = schur_bialternant(F, lam)
    values = {f"x{i + 1}": a for i, a in enumerate(pi.satake_values())}
    return SatakeRat(s.subs(values).scale(F.sqrt_q_power(modulus_exponent(lam))))


# ---------------------------------------------------------------------------
# the GL_2 Jacquet integral
# ---------------------------------------------------------------------------


def _vcap(x: Fraction, p: int, cap: int) -> int:
    """Valuation of x, capped at cap (x = 0 counts as >= cap)."""
    if x == 0:
        return cap
    return min(rational_valuation(x, p), cap)


def jacquet_integral_gl2(spec: WhittakerSpec, g) -> SatakeRat:
    """W(g) = int_F f(w n(u) g) conj-or-not psi(u) du for the normalized spherical f.

    The integrand depends on u only through e(u) = min valuation of the row
    (1, u) g.  Outside the ball p^{-R} it is constant on valuation shells,
    whose psi-integrals vanish below -1; inside, e(u) is constant on cosets
    of p^D.  The ball is summed cell by cell, exactly.
    """
    pi = spec.datum
    if pi.n != 2:
        raise UnsupportedError("the Jacquet oracle is implemented for GL_2 only")
    p = pi.p
    F = pi.field
    rows = g.to_fractions() if isinstance(g, PadicMatrix) else [[Fraction(x) for x in r] for r in g]
    (a, b), (c, d) = rows[0], rows[1]
    # w n(u) g has rows (c, d) and (a + u c, b + u d)
    det = c * b - d * a
    if det == 0:
        raise ValueError("singular matrix")
    vdet = rational_valuation(-det, p)
    coeff_vals = [rational_valuation(x, p) for x in (c, d) if x != 0]
    vmin = min(coeff_vals)
    e_max = vdet - vmin
    R = 1
    for const, coef in ((a, c), (b, d)):
        if const != 0 and coef != 0:
            R = max(R, rational_valuation(coef, p) - rational_valuation(const, p))
    D = max(0, e_max + 1 - vmin)
    psi = AddChar(p, depth=R, conjugate=(spec.orientation == "psi"))
    if R and F.M % p**R:
        raise DepthError(f"coefficient field lacks p^{R}-th roots of unity; build the WhittakerSpec with psi_depth >= {R}")
    # group cells by e(u), summing psi values
    sums: Dict[int, object] = {}
    step = Fraction(1, p**R)
    for t in range(p ** (R + D)):
        u = t * step
        ea = _vcap(a + u * c, p, D + rational_valuation(c, p)) if c != 0 else _vcap(a, p, 10**9)
        eb = _vcap(b + u * d, p, D + rational_valuation(d, p)) if d != 0 else _vcap(b, p, 10**9)
        e = min(ea, eb)
        if e > e_max:
            raise AssertionError("cell precision too low")
        val = psi(u, F)
        sums[e] = sums[e] + val if e in sums else val
    f1 = SatakeRat.constant(F, 1)
    alphas = pi.satake_values()
    f1 = f1 / SatakeRat(LaurentPoly.constant(F, 1) - (alphas[0] * alphas[1] ** -1).scale(F.q_power(-1)))
    out = LaurentPoly(F)
    cell = F.q_power(-D)
    for e2, s in sums.items():
        if s.is_zero():
            continue
        e1 = vdet - e2
        term = pi.alpha_monomial((e1, e2)).scale(F.sqrt_q_power(modulus_exponent((e1, e2))) * s * cell)
        out = out + term
    return (SatakeRat(out) * f1).normalized()
