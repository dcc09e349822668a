"""
Exact coefficient arithmetic.

Scalars live in Q(zeta_M)(sqrt q), Satake-parameter expressions are
Laurent polynomials (and fractions of them) over those scalars, and
series in X = q^{-s} are truncated power series with such coefficients.
Nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple

from sympy import cyclotomic_poly, totient
from sympy.abc import x as _x


class DomainError(ArithmeticError):
    """Raised on division by zero or an otherwise undefined operation."""


# ---------------------------------------------------------------------------
# Q(zeta_M)(sqrt q)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _reduction_table(M: int):
    """Powers zeta^k, k < 2*phi(M), as coordinate tuples in the power basis."""
    d = int(totient(M))
    coeffs = [int(c) for c in cyclotomic_poly(M, _x, polys=True).all_coeffs()]
    # monic: x^d = -(c_1 x^{d-1} + ... + c_d)
    low = [-c for c in reversed(coeffs[1:])]  # low[i] multiplies x^i
    table = []
    for k in range(2 * d):
        if k < d:
            v = [0] * d
            v[k] = 1
        else:
            prev = table[k - 1]
            top = prev[d - 1]
            v = [0] + list(prev[: d - 1])
            for i in range(d):
                v[i] += top * low[i]
        table.append(tuple(v))
    return d, tuple(table)


def _sqrt_q_in_cyclotomic(q: int, M: int) -> bool:
    if q == 1:
        return True
    if q == 2:
        return M % 8 == 0
    if q % 4 == 1:
        return M % q == 0
    return M % (4 * q) == 0


class CoeffField:
    """The field Q(zeta_M)(sqrt q) for a fixed session (M, q)."""

    __slots__ = ("M", "q", "degree", "_table", "_zero_cyc", "_one_cyc")

    def __init__(self, M: int, q: int):
        if M < 1 or q < 2:
            raise ValueError("need M >= 1 and q >= 2")
        if _sqrt_q_in_cyclotomic(q, M):
            raise ValueError(
                f"sqrt({q}) already lies in Q(zeta_{M}); adjoining it formally "
                "would not give a field"
            )
        self.M = M
        self.q = q
        self.degree, self._table = _reduction_table(M)
        self._zero_cyc = (Fraction(0),) * self.degree
        self._one_cyc = (Fraction(1),) + (Fraction(0),) * (self.degree - 1)

    def __eq__(self, other):
        return isinstance(other, CoeffField) and (self.M, self.q) == (other.M, other.q)

    def __hash__(self):
        return hash((self.M, self.q))

    def __repr__(self):
        return f"CoeffField(M={self.M}, q={self.q})"

    # constructors ---------------------------------------------------------

    def zero(self) -> "CoeffValue":
        return CoeffValue(self, self._zero_cyc, self._zero_cyc)

    def one(self) -> "CoeffValue":
        return CoeffValue(self, self._one_cyc, self._zero_cyc)

    def rational(self, r) -> "CoeffValue":
        r = Fraction(r)
        return CoeffValue(self, (r,) + self._zero_cyc[1:], self._zero_cyc)

    def zeta(self, j: int = 1) -> "CoeffValue":
        """zeta_M^j."""
        return CoeffValue(self, self._cyc_power(j % self.M), self._zero_cyc)

    def sqrt_q(self) -> "CoeffValue":
        return CoeffValue(self, self._zero_cyc, self._one_cyc)

    def sqrt_q_power(self, k: int) -> "CoeffValue":
        """(sqrt q)^k for any integer k."""
        half, odd = divmod(k, 2)
        r = Fraction(self.q) ** half
        if odd:
            return CoeffValue(self, self._zero_cyc, (r,) + self._zero_cyc[1:])
        return CoeffValue(self, (r,) + self._zero_cyc[1:], self._zero_cyc)

    def q_power(self, k: int) -> "CoeffValue":
        return self.rational(Fraction(self.q) ** k)

    # cyclotomic helpers ---------------------------------------------------

    def _cyc_power(self, k: int):
        d = self.degree
        if k < 2 * d:
            return tuple(Fraction(c) for c in self._table[k])
        z = tuple(Fraction(c) for c in self._table[1])
        out = tuple(Fraction(c) for c in self._table[2 * d - 1])
        for _ in range(k - 2 * d + 1):
            out = self._cmul(out, z)
        return out

    def _cadd(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _csub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def _cmul(self, a, b):
        d = self.degree
        if d == 1:
            return (a[0] * b[0],)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = list(prod[:d])
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                for i, t in enumerate(self._table[k]):
                    if t:
                        out[i] += c * t
        return tuple(out)

    def _cscale(self, a, r):
        return tuple(x * r for x in a)

    def _cinv(self, a):
        """Inverse in Q(zeta_M) via the multiplication matrix."""
        d = self.degree
        if not any(a):
            raise DomainError("inverse of zero")
        if d == 1:
            return (1 / a[0],)
        # column j of the matrix = a * x^j
        cols = []
        for j in range(d):
            basis = [Fraction(0)] * d
            basis[j] = Fraction(1)
            cols.append(self._cmul(a, tuple(basis)))
        mat = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if mat[r][c] != 0)
            mat[c], mat[piv] = mat[piv], mat[c]
            pv = mat[c][c]
            mat[c] = [t / pv for t in mat[c]]
            for r in range(d):
                if r != c and mat[r][c] != 0:
                    f = mat[r][c]
                    mat[r] = [t - f * s for t, s in zip(mat[r], mat[c])]
        return tuple(mat[i][d] for i in range(d))


class CoeffValue:
    """An element rat + sqrtq * sqrt(q) of Q(zeta_M)(sqrt q)."""

    __slots__ = ("field", "rat", "sq", "_hash")

    def __init__(self, field: CoeffField, rat, sq):
        self.field = field
        self.rat = rat
        self.sq = sq
        self._hash = None

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "CoeffValue":
        if isinstance(other, CoeffValue):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("mixing elements of different coefficient fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        return CoeffValue(F, F._cadd(self.rat, other.rat), F._cadd(self.sq, other.sq))

    __radd__ = __add__

    def __neg__(self):
        return CoeffValue(self.field, tuple(-t for t in self.rat), tuple(-t for t in self.sq))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        return CoeffValue(F, F._csub(self.rat, other.rat), F._csub(self.sq, other.sq))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        a, b, c, d = self.rat, self.sq, other.rat, other.sq
        b_nz = any(b)
        d_nz = any(d)
        if not b_nz and not d_nz:
            return CoeffValue(F, F._cmul(a, c), F._zero_cyc)
        rat = F._cmul(a, c)
        if b_nz and d_nz:
            rat = F._cadd(rat, F._cscale(F._cmul(b, d), Fraction(F.q)))
        sq = F._cadd(F._cmul(a, d) if d_nz else F._zero_cyc, F._cmul(b, c) if b_nz else F._zero_cyc)
        return CoeffValue(F, rat, sq)

    __rmul__ = __mul__

    def conjugate_sqrt(self) -> "CoeffValue":
        """The image under sqrt q -> -sqrt q."""
        return CoeffValue(self.field, self.rat, tuple(-t for t in self.sq))

    def inverse(self) -> "CoeffValue":
        F = self.field
        if not any(self.sq):
            return CoeffValue(F, F._cinv(self.rat), F._zero_cyc)
        # (a + b r)^{-1} = (a - b r) / (a^2 - q b^2)
        norm = F._csub(F._cmul(self.rat, self.rat), F._cscale(F._cmul(self.sq, self.sq), Fraction(F.q)))
        if not any(norm):
            raise DomainError("inverse of zero")
        ninv = F._cinv(norm)
        return CoeffValue(F, F._cmul(self.rat, ninv), F._cmul(tuple(-t for t in self.sq), ninv))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.rat) and not any(self.sq)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.sq) and not any(self.rat[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.rat[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        if not isinstance(other, CoeffValue):
            return NotImplemented
        return self.rat == other.rat and self.sq == other.sq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rat, self.sq))
        return self._hash

    def to_complex(self) -> complex:
        import cmath
        import math

        F = self.field
        z = cmath.exp(2j * math.pi / F.M)
        r = sum(float(c) * z**i for i, c in enumerate(self.rat))
        s = sum(float(c) * z**i for i, c in enumerate(self.sq))
        return r + s * math.sqrt(F.q)

    def __repr__(self):
        return f"CoeffValue({format_coeff(self)})"

    def __str__(self):
        return format_coeff(self)


def _format_cyc(c, M) -> str:
    terms = []
    for i, t in enumerate(c):
        if not t:
            continue
        if i == 0:
            terms.append(str(t))
        else:
            z = f"z{M}" + (f"^{i}" if i > 1 else "")
            terms.append(z if t == 1 else ("-" + z if t == -1 else f"{t}*{z}"))
    return " + ".join(terms) if terms else "0"


def format_coeff(c: CoeffValue) -> str:
    M = c.field.M
    r = _format_cyc(c.rat, M) if any(c.rat) else ""
    s = ""
    if any(c.sq):
        inner = _format_cyc(c.sq, M)
        sqs = f"sqrt({c.field.q})"
        if inner == "1":
            s = sqs
        elif inner == "-1":
            s = "-" + sqs
        elif len([t for t in c.sq if t]) == 1 and c.sq[0]:
            s = f"{inner}*{sqs}"
        else:
            s = f"({inner})*{sqs}"
    if r and s:
        return f"{r} + {s}" if not r.count("+") else f"({r}) + {s}"
    return r or s or "0"


def coeff_to_json(c: CoeffValue) -> dict:
    return {
        "rat": [f"{t.numerator}/{t.denominator}" for t in c.rat],
        "sqrtq": [f"{t.numerator}/{t.denominator}" for t in c.sq],
    }


def coeff_from_json(field: CoeffField, data: Mapping) -> CoeffValue:
    rat = tuple(Fraction(s) for s in data["rat"])
    sq = tuple(Fraction(s) for s in data["sqrtq"])
    if len(rat) != field.degree or len(sq) != field.degree:
        raise ValueError("coefficient vector length does not match the field degree")
    return CoeffValue(field, rat, sq)


# ---------------------------------------------------------------------------
# Laurent polynomials in named Satake variables
# ---------------------------------------------------------------------------

Monomial = Tuple[Tuple[str, int], ...]
ONE_MONO: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        e2 = d.get(k, 0) + e
        if e2:
            d[k] = e2
        else:
            d.pop(k, None)
    return tuple(sorted(d.items()))


def mono_pow(a: Monomial, k: int) -> Monomial:
    if k == 0:
        return ONE_MONO
    return tuple((name, e * k) for name, e in a)


class LaurentPoly:
    """Finite sum of coefficient * monomial; monomial exponents may be negative."""

    __slots__ = ("field", "terms")

    def __init__(self, field: CoeffField, terms: Dict[Monomial, CoeffValue] | None = None):
        self.field = field
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def constant(cls, field, c) -> "LaurentPoly":
        if not isinstance(c, CoeffValue):
            c = field.rational(c)
        return cls(field, {ONE_MONO: c})

    @classmethod
    def var(cls, field, name: str, power: int = 1) -> "LaurentPoly":
        mono = ((name, power),) if power else ONE_MONO
        return cls(field, {mono: field.one()})

    @classmethod
    def monomial(cls, field, mono: Monomial, c=None) -> "LaurentPoly":
        return cls(field, {mono: c if c is not None else field.one()})

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction, CoeffValue)):
            return LaurentPoly.constant(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                out[m] = out[m] + c
            else:
                out[m] = c
        return LaurentPoly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.field, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[Monomial, CoeffValue] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                p = c1 * c2
                if m in out:
                    out[m] = out[m] + p
                else:
                    out[m] = p
        return LaurentPoly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise DomainError("only monomials can be raised to negative powers")
            (m, c), = self.terms.items()
            return LaurentPoly(self.field, {mono_pow(m, k): c**k})
        out = LaurentPoly.constant(self.field, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c: CoeffValue) -> "LaurentPoly":
        return LaurentPoly(self.field, {m: v * c for m, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_value(self) -> CoeffValue:
        return self.terms.get(ONE_MONO, self.field.zero())

    def variables(self):
        return sorted({name for m in self.terms for name, _ in m})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def subs(self, values: Mapping[str, "CoeffValue | LaurentPoly"]) -> "LaurentPoly":
        """Substitute variables by scalars or Laurent polynomials."""
        out = LaurentPoly(self.field)
        for m, c in self.terms.items():
            term = LaurentPoly(self.field, {ONE_MONO: c})
            rest = []
            for name, e in m:
                if name in values:
                    v = values[name]
                    if isinstance(v, LaurentPoly):
                        term = term * v**e
                    else:
                        term = term.scale(_as_coeff(self.field, v) ** e)
                else:
                    rest.append((name, e))
            if rest:
                term = term * LaurentPoly.monomial(self.field, tuple(rest))
            out = out + term
        return out

    def shift_to_polynomial(self):
        """Return (P, mono) with self = P * mono and P a polynomial with no monomial factor."""
        if not self.terms:
            return self, ONE_MONO
        names = self.variables()
        mins = {n: min(dict(m).get(n, 0) for m in self.terms) for n in names}
        shift = tuple(sorted((n, e) for n, e in mins.items() if e))
        inv = mono_pow(shift, -1)
        return LaurentPoly(self.field, {mono_mul(m, inv): c for m, c in self.terms.items()}), shift

    def divide_exact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises DomainError if other does not divide self."""
        if other.is_zero():
            raise DomainError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly(self.field)
        names = sorted(set(self.variables()) | set(other.variables()))

        def key(m):
            d = dict(m)
            return tuple(d.get(n, 0) for n in names)

        lead_o = max(other.terms, key=key)
        lc_o = other.terms[lead_o]
        lc_inv = lc_o.inverse()
        rem = LaurentPoly(self.field, dict(self.terms))
        quot: Dict[Monomial, CoeffValue] = {}
        low_o = min(key(m) for m in other.terms)
        low_bound = min(key(m) for m in self.terms)
        for _ in range(100000):
            if rem.is_zero():
                return LaurentPoly(self.field, quot)
            lead_r = max(rem.terms, key=key)
            if key(lead_r) < low_bound:
                break
            qm = mono_mul(lead_r, mono_pow(lead_o, -1))
            # a quotient monomial below the reachable range means no exact quotient
            kq = key(qm)
            if tuple(a + b for a, b in zip(kq, low_o)) < low_bound:
                break
            qc = rem.terms[lead_r] * lc_inv
            quot[qm] = quot.get(qm, self.field.zero()) + qc
            rem = rem - other * LaurentPoly(self.field, {qm: qc})
        raise DomainError("polynomial does not divide exactly")

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)})"

    def __str__(self):
        return format_poly(self)


def _as_coeff(field, v) -> CoeffValue:
    if isinstance(v, CoeffValue):
        return v
    return field.rational(v)


def _format_mono(m: Monomial) -> str:
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


def format_poly(p: LaurentPoly) -> str:
    if not p.terms:
        return "0"

    def order(m):
        return (sum(e for _, e in m[0]), tuple((n, -e) for n, e in m[0]))

    parts = []
    for m, c in sorted(p.terms.items(), key=order):
        cs = format_coeff(c)
        ms = _format_mono(m)
        if not ms:
            parts.append(cs)
        elif cs == "1":
            parts.append(ms)
        elif cs == "-1":
            parts.append("-" + ms)
        elif " " in cs:
            parts.append(f"({cs})*{ms}")
        else:
            parts.append(f"{cs}*{ms}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# fractions of Laurent polynomials
# ---------------------------------------------------------------------------


class SatakeRat:
    """num/den with Laurent-polynomial numerator and denominator.

    Reduction is lazy: equality is tested by cross-multiplication and
    ``normalized`` only tries an exact division of the numerator by the
    denominator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.constant(num.field, 1)
        if den.is_zero():
            raise DomainError("zero denominator")
        self.num = num
        self.den = den

    @property
    def field(self) -> CoeffField:
        return self.num.field

    @classmethod
    def constant(cls, field, c) -> "SatakeRat":
        return cls(LaurentPoly.constant(field, c))

    @classmethod
    def var(cls, field, name: str, power: int = 1) -> "SatakeRat":
        return cls(LaurentPoly.var(field, name, power))

    def _coerce(self, other):
        if isinstance(other, SatakeRat):
            return other
        if isinstance(other, LaurentPoly):
            return SatakeRat(other)
        if isinstance(other, (int, Fraction, CoeffValue)):
            return SatakeRat.constant(self.field, other)
        return NotImplemented

    def _den_is_one(self):
        return self.den.is_constant() and self.den.constant_value() == 1

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.den == self.den:
            return SatakeRat(self.num + other.num, self.den)
        return SatakeRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return SatakeRat(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._den_is_one():
            return SatakeRat(self.num * other.num, self.den)
        if self._den_is_one():
            return SatakeRat(self.num * other.num, other.den)
        return SatakeRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "SatakeRat":
        if self.num.is_zero():
            raise DomainError("inverse of zero")
        return SatakeRat(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return SatakeRat(self.num**k, self.den**k)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        # equal fractions may have different representations
        return 0

    def subs(self, values) -> "SatakeRat":
        num = self.num.subs(values)
        den = self.den.subs(values)
        if den.is_zero():
            raise DomainError("specialization makes the denominator vanish")
        return SatakeRat(num, den)

    def specialize(self, values) -> CoeffValue:
        """Substitute every variable by a scalar and return the scalar."""
        r = self.subs(values)
        if not (r.num.is_constant() and r.den.is_constant()):
            raise ValueError("not all variables were specialized")
        return r.num.constant_value() / r.den.constant_value()

    def normalized(self) -> "SatakeRat":
        """Divide out the denominator when it divides the numerator exactly."""
        if self._den_is_one():
            return self
        if self.den.is_constant():
            return SatakeRat(self.num.scale(self.den.constant_value().inverse()))
        if len(self.den.terms) == 1:
            return SatakeRat(self.num * self.den**-1)
        try:
            return SatakeRat(self.num.divide_exact(self.den))
        except DomainError:
            return self

    def as_laurent(self) -> LaurentPoly:
        r = self.normalized()
        if not r._den_is_one():
            raise DomainError("not a Laurent polynomial")
        return r.num

    def __repr__(self):
        return f"SatakeRat({self})"

    def __str__(self):
        r = self.normalized()
        if r._den_is_one():
            return format_poly(r.num)
        return f"({format_poly(r.num)}) / ({format_poly(r.den)})"


def satake_to_json(r: SatakeRat) -> dict:
    r = r.normalized()

    def poly(p: LaurentPoly):
        return [
            {"monomial": {n: e for n, e in m}, "coeff": coeff_to_json(c)}
            for m, c in sorted(p.terms.items(), key=lambda t: (sum(e for _, e in t[0]), t[0]))
        ]

    out = {"num": poly(r.num), "text": str(r)}
    if not r._den_is_one():
        out["den"] = poly(r.den)
    return out


def satake_from_json(field: CoeffField, data: Mapping) -> SatakeRat:
    def poly(items):
        terms = {}
        for it in items:
            mono = tuple(sorted((n, int(e)) for n, e in it["monomial"].items()))
            terms[mono] = coeff_from_json(field, it["coeff"])
        return LaurentPoly(field, terms)

    num = poly(data["num"])
    den = poly(data["den"]) if "den" in data else None
    return SatakeRat(num, den)


# ---------------------------------------------------------------------------
# truncated series in X = q^{-s}
# ---------------------------------------------------------------------------


class TruncSeries:
    """c_0 + c_1 X + ... + c_{T-1} X^{T-1} + O(X^T)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: CoeffField, coeffs: Iterable):
        self.field = field
        cs = []
        for c in coeffs:
            if isinstance(c, SatakeRat):
                cs.append(c)
            elif isinstance(c, LaurentPoly):
                cs.append(SatakeRat(c))
            else:
                cs.append(SatakeRat.constant(field, c))
        if not cs:
            raise ValueError("truncation order must be at least 1")
        self.coeffs = tuple(cs)

    @property
    def T(self) -> int:
        return len(self.coeffs)

    @classmethod
    def one(cls, field, T) -> "TruncSeries":
        return cls(field, [1] + [0] * (T - 1))

    @classmethod
    def zero(cls, field, T) -> "TruncSeries":
        return cls(field, [0] * T)

    @classmethod
    def linear(cls, field, T, c0, c1) -> "TruncSeries":
        """c0 + c1 X."""
        return cls(field, [c0, c1] + [0] * (T - 2) if T >= 2 else [c0])

    def _check(self, other: "TruncSeries"):
        if not isinstance(other, TruncSeries):
            raise TypeError("expected a TruncSeries")
        if other.T != self.T:
            raise ValueError(f"truncation orders differ ({self.T} vs {other.T}); truncate first")

    def __add__(self, other):
        self._check(other)
        return TruncSeries(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return TruncSeries(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return TruncSeries(self.field, [-a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries(self.field, [a * other for a in self.coeffs])
        self._check(other)
        T = self.T
        out = [SatakeRat.constant(self.field, 0) for _ in range(T)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j in range(T - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TruncSeries(self.field, out)

    __rmul__ = __mul__

    def invert(self) -> "TruncSeries":
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise DomainError("constant term is zero; series is not invertible")
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, self.T):
            acc = SatakeRat.constant(self.field, 0)
            for j in range(1, k + 1):
                if not self.coeffs[j].is_zero():
                    acc = acc + self.coeffs[j] * out[k - j]
            out.append((-acc * inv0).normalized())
        return TruncSeries(self.field, out)

    def truncate(self, T: int) -> "TruncSeries":
        if T > self.T:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.field, self.coeffs[:T])

    def normalized(self) -> "TruncSeries":
        return TruncSeries(self.field, [c.normalized() for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.T == other.T and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __getitem__(self, i):
        return self.coeffs[i]

    def subs(self, values) -> "TruncSeries":
        return TruncSeries(self.field, [c.subs(values) for c in self.coeffs])

    def __repr__(self):
        return f"TruncSeries({self})"

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            s = str(c)
            xs = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if not xs:
                parts.append(s)
            elif s == "1":
                parts.append(xs)
            else:
                parts.append(f"({s})*{xs}")
        return (" + ".join(parts) or "0") + f" + O(X^{self.T})"


def series_to_json(s: TruncSeries) -> list:
    return [satake_to_json(c) for c in s.coeffs]


def geometric_inverse(field: CoeffField, a, T: int) -> TruncSeries:
    """(1 - a X)^{-1} truncated at T."""
    a = a if isinstance(a, SatakeRat) else SatakeRat(a) if isinstance(a, LaurentPoly) else SatakeRat.constant(field, a)
    coeffs = [SatakeRat.constant(field, 1)]
    for _ in range(1, T):
        coeffs.append(coeffs[-1] * a)
    return TruncSeries(field, coeffs)
