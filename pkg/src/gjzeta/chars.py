"""
Characters: multiplicative characters of Q_p^x, the standard additive
character psi of Q_p, and psi_n on upper unipotent matrices.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Dict, Optional, Sequence, Tuple, Union

from .exactnum import CoeffField, CoeffValue, LaurentPoly, SatakeRat
from .padic import PadicScalar, PrecisionError, rational_valuation


class CharacterError(ValueError):
    """Inconsistent character data."""


class DepthError(ValueError):
    """psi evaluated beyond the configured depth."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def unit_group_generators(p: int, c: int) -> Tuple[Tuple[int, int], ...]:
    """Generators of (Z/p^c)^x with their orders: cyclic for odd p, {-1, 5} for p = 2."""
    if c <= 0:
        return ()
    mod = p**c
    if p == 2:
        if c == 1:
            return ()
        if c == 2:
            return ((mod - 1, 2),)
        return ((mod - 1, 2), (5, 2 ** (c - 2)))
    order = (p - 1) * p ** (c - 1)
    factors = _prime_factors(order)
    for g in range(2, mod):
        if g % p == 0:
            continue
        if all(pow(g, order // f, mod) != 1 for f in factors):
            return ((g, order),)
    raise AssertionError("no generator found")


def _prime_factors(n: int):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


Uniformizer = Union[str, Fraction, int]


class MultChar:
    """A character of Q_p^x: unit part given by generator images in mu_order,
    value at p given by a Satake variable name or an exact rational.

    ``unit_exps[i]`` is the exponent j with chi(gen_i) = zeta_order^j.
    """

    def __init__(
        self,
        p: int,
        conductor: int,
        unit_exps: Sequence[int] = (),
        order: int = 1,
        uniformizer: Uniformizer = 1,
        alpha_sign: int = 1,
    ):
        self.p = p
        self.alpha_sign = alpha_sign if isinstance(uniformizer, str) else 1
        self.declared_conductor = conductor
        self.order = order
        self.gens = unit_group_generators(p, conductor)
        if len(unit_exps) != len(self.gens):
            raise CharacterError(
                f"expected {len(self.gens)} generator images for conductor {conductor}, got {len(unit_exps)}"
            )
        self.unit_exps = tuple(int(e) % order for e in unit_exps)
        for (g, o), e in zip(self.gens, self.unit_exps):
            if (e * o) % order:
                raise CharacterError(f"image of generator {g} (order {o}) is not an {o}-th root of unity")
        self.uniformizer = uniformizer if isinstance(uniformizer, str) else Fraction(uniformizer)

    # constructors ---------------------------------------------------------

    @classmethod
    def trivial(cls, p: int, uniformizer: Uniformizer = 1) -> "MultChar":
        return cls(p, 0, (), 1, uniformizer)

    @classmethod
    def quadratic(cls, p: int, uniformizer: Uniformizer = 1, kind: str = "-1") -> "MultChar":
        """The quadratic character of smallest conductor: the Legendre symbol
        (conductor 1) for odd p; for p = 2 the character of Q_2(i)/Q_2
        (conductor 2), or kind="2" / "-2" for the conductor-3 ones."""
        if p != 2:
            return cls(p, 1, (1,), 2, uniformizer)
        if kind == "-1":
            return cls(2, 2, (1,), 2, uniformizer)
        if kind == "2":
            return cls(2, 3, (0, 1), 2, uniformizer)
        if kind == "-2":
            return cls(2, 3, (1, 1), 2, uniformizer)
        raise ValueError(f"unknown quadratic character kind {kind!r}")

    # structure ------------------------------------------------------------

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.uniformizer, str)

    @cached_property
    def unit_table(self) -> Dict[int, int]:
        """u mod p^c -> exponent of zeta_order."""
        c = self.declared_conductor
        if c == 0:
            return {}
        mod = self.p**c
        table = {1 % mod: 0}
        for (g, o), e in zip(self.gens, self.unit_exps):
            new = {}
            for u, ex in table.items():
                x, ey = u, ex
                for _ in range(o):
                    new.setdefault(x, ey)
                    x = x * g % mod
                    ey = (ey + e) % self.order
            table = new
        if len(table) != (self.p - 1) * self.p ** (c - 1):
            raise CharacterError("generators do not span the unit group")
        return table

    def unit_exponent(self, u: int) -> int:
        """Exponent j with chi(u) = zeta_order^j for a p-adic unit u (integer)."""
        c = self.declared_conductor
        if c == 0:
            return 0
        try:
            return self.unit_table[u % self.p**c]
        except KeyError:
            raise ValueError(f"{u} is not a unit mod p") from None

    def unit_value(self, field: CoeffField, u: int) -> CoeffValue:
        j = self.unit_exponent(u)
        if j == 0:
            return field.one()
        if field.M % self.order:
            raise ValueError(f"field Q(zeta_{field.M}) does not contain the values of this character")
        return field.zeta(j * (field.M // self.order))

    def alpha(self, field: CoeffField) -> LaurentPoly:
        return self.alpha_power(field, 1)

    def inverse(self) -> "MultChar":
        u = self.uniformizer
        inv_u = u if isinstance(u, str) else 1 / u
        return MultChar(
            self.p, self.declared_conductor, [-e for e in self.unit_exps], self.order, inv_u, -self.alpha_sign
        )

    def alpha_power(self, field: CoeffField, k: int) -> LaurentPoly:
        """chi(p)^k."""
        if self.is_symbolic:
            return LaurentPoly.var(field, self.uniformizer, self.alpha_sign * k)
        return LaurentPoly.constant(field, Fraction(self.uniformizer) ** k)

    def spec(self) -> dict:
        u = self.uniformizer
        if isinstance(u, str):
            uval = u if self.alpha_sign == 1 else f"1/{u}"
        else:
            uval = f"{u.numerator}/{u.denominator}"
        return {"conductor": self.declared_conductor, "unit_images": list(self.unit_exps),
                "order": self.order, "uniformizer": uval}

    def __eq__(self, other):
        return isinstance(other, MultChar) and self.spec() == other.spec() and self.p == other.p

    def __hash__(self):
        return hash(str(self.spec()))

    def __repr__(self):
        return f"MultChar(p={self.p}, {self.spec()})"


def multiply_chars(chars: Sequence[MultChar]) -> Tuple[int, Dict[int, int], int]:
    """Pointwise product of unit parts as (level, table u -> exponent, order)."""
    if not chars:
        raise ValueError("empty product")
    p = chars[0].p
    level = max(c.declared_conductor for c in chars)
    order = 1
    for c in chars:
        order = _lcm(order, c.order)
    mod = p**level
    table = {}
    if level == 0:
        return 0, {}, order
    for u in range(mod):
        if u % p == 0:
            continue
        e = 0
        for c in chars:
            e += c.unit_exponent(u) * (order // c.order)
        table[u] = e % order
    return level, table, order


def conductor_of_char(chi: MultChar) -> int:
    """Smallest c with chi trivial on 1 + p^c, recomputed from the values."""
    c = chi.declared_conductor
    if c == 0:
        return 0
    p = chi.p
    _ = chi.unit_table  # validates
    # homomorphism check on the full table
    mod = p**c
    table = chi.unit_table
    units = list(table)
    step = max(1, len(units) // 40)
    for a in units[::step]:
        for b in units[::step]:
            if table[a * b % mod] != (table[a] + table[b]) % chi.order:
                raise CharacterError("unit table is not a homomorphism")
    for level in range(0, c + 1):
        sub = [u for u in units if (u - 1) % p**level == 0] if level else units
        if all(table[u] == 0 for u in sub):
            return level
    return c


def char_eval(chi: MultChar, x, field: CoeffField) -> SatakeRat:
    """chi(x) = chi(p)^v(x) * chi(unit part of x) for x a PadicScalar, int or Fraction."""
    p = chi.p
    if isinstance(x, PadicScalar):
        if x.v is None:
            raise PrecisionError("character of an unresolved zero")
        if x.rel < chi.declared_conductor:
            raise PrecisionError("unit part not known to the conductor")
        v, u = x.v, x.u
    else:
        x = Fraction(x)
        if x == 0:
            raise ValueError("character of 0")
        v = rational_valuation(x, p)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        c = chi.declared_conductor
        u = num * pow(den, -1, p**c) if c else 1
    return SatakeRat(chi.alpha_power(field, v).scale(chi.unit_value(field, u)))


class AddChar:
    """The standard unramified character of Q_p: psi(j / p^k) = zeta_{p^k}^j.

    ``depth`` is the largest k that may appear (values lie in mu_{p^depth})."""

    def __init__(self, p: int, depth: int = 1, conjugate: bool = False):
        self.p = p
        self.depth = depth
        self.conjugate = conjugate

    def exponent(self, x) -> Tuple[int, int]:
        """(j, k) with psi(x) = zeta_{p^k}^j, k <= depth."""
        if isinstance(x, PadicScalar):
            if x.v is None or x.v >= 0:
                return 0, 0
            k = -x.v
            if x.rel < k:
                raise PrecisionError("additive character needs more digits")
            j = x.u % self.p**k
        else:
            x = Fraction(x)
            if x == 0:
                return 0, 0
            v = rational_valuation(x, self.p)
            if v >= 0:
                return 0, 0
            k = -v
            num = x.numerator
            den = x.denominator // self.p**k
            j = num * pow(den, -1, self.p**k) % self.p**k
        if k > self.depth:
            raise DepthError(f"psi evaluated at valuation {-k}, beyond depth {self.depth}")
        if self.conjugate:
            j = -j % self.p**k
        return j, k

    def __call__(self, x, field: CoeffField) -> CoeffValue:
        j, k = self.exponent(x)
        if j == 0:
            return field.one()
        order = self.p**k
        if field.M % order:
            raise DepthError(f"field Q(zeta_{field.M}) lacks p^{k}-th roots of unity")
        return field.zeta(j * (field.M // order))

    def psi_n(self, u: Sequence[Sequence], field: CoeffField) -> CoeffValue:
        """psi(u_{1,2} + ... + u_{n-1,n}) for an upper unipotent matrix."""
        n = len(u)
        s = sum((Fraction(u[i][i + 1]) for i in range(n - 1)), Fraction(0))
        return self(s, field)


def field_modulus(chars: Sequence[MultChar], p: int, psi_depth: int = 0) -> int:
    """Smallest M with all character values and psi values up to depth in mu_M."""
    M = 1
    for c in chars:
        M = _lcm(M, c.order)
    if psi_depth:
        M = _lcm(M, p**psi_depth)
    return M


def make_field(chars: Sequence[MultChar], p: int, psi_depth: int = 0) -> CoeffField:
    return CoeffField(field_modulus(chars, p, psi_depth), p)
