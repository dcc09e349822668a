"""
Principal-series data chi_1 |.|^t_1 (+) ... (+) chi_n |.|^t_n and their L-factors.

The twist |.|^t_i is folded into the uniformizer value
alpha_i = chi_i(p) q^{-t_i}, so a datum is just an ordered list of MultChar.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence

from .chars import MultChar, conductor_of_char, make_field, multiply_chars
from .exactnum import CoeffField, CoeffValue, LaurentPoly, SatakeRat, TruncSeries, geometric_inverse


class UnsupportedError(ValueError):
    """Requested computation lies outside the supported cases."""


class LanglandsDatum:
    def __init__(
        self,
        chars: Sequence[MultChar],
        field: Optional[CoeffField] = None,
        langlands_ordered: bool = True,
    ):
        if not chars:
            raise ValueError("a datum needs at least one character")
        p = chars[0].p
        if any(c.p != p for c in chars):
            raise ValueError("characters over different primes")
        self.p = p
        self.chars = tuple(chars)
        self.field = field if field is not None else make_field(chars, p)
        for c in self.chars:
            if self.field.M % c.order:
                raise ValueError("coefficient field too small for the character values")
        self.langlands_ordered = langlands_ordered
        if not any(c.is_symbolic for c in self.chars):
            self._check_ordering()

    def _check_ordering(self):
        # Re(t_1) >= ... >= Re(t_n)  <=>  |alpha_1| <= ... <= |alpha_n|
        mags = [abs(Fraction(c.uniformizer)) for c in self.chars]
        if any(mags[i] > mags[i + 1] for i in range(len(mags) - 1)):
            self.langlands_ordered = False

    @property
    def n(self) -> int:
        return len(self.chars)

    @property
    def q(self) -> int:
        return self.p

    @cached_property
    def conductors(self) -> tuple:
        return tuple(conductor_of_char(c) for c in self.chars)

    @property
    def predicted_conductor(self) -> int:
        """Sum of the character conductors."""
        return sum(self.conductors)

    @property
    def is_spherical(self) -> bool:
        return self.predicted_conductor == 0

    @property
    def max_char_conductor(self) -> int:
        return max(c.declared_conductor for c in self.chars)

    # central character ----------------------------------------------------

    @cached_property
    def _omega(self):
        return multiply_chars(self.chars)

    @property
    def omega_conductor(self) -> int:
        level, table, order = self._omega
        for c in range(level + 1):
            if all(e == 0 for u, e in table.items() if c == 0 or (u - 1) % self.p**c == 0):
                return c
        return level

    def omega_unit_value(self, u: int, inverse: bool = False) -> CoeffValue:
        level, table, order = self._omega
        if level == 0:
            return self.field.one()
        e = table[u % self.p**level]
        if inverse:
            e = -e % order
        if e == 0:
            return self.field.one()
        return self.field.zeta(e * (self.field.M // order))

    def omega_at_uniformizer(self) -> LaurentPoly:
        out = LaurentPoly.constant(self.field, 1)
        for c in self.chars:
            out = out * c.alpha(self.field)
        return out

    # torus characters -----------------------------------------------------

    @cached_property
    def unit_value_tables(self) -> List[Dict[int, CoeffValue]]:
        """Per character: u mod p^c_i -> chi_i(u)."""
        out = []
        for c in self.chars:
            cc = c.declared_conductor
            if cc == 0:
                out.append({})
                continue
            mod = self.p**cc
            out.append({u: c.unit_value(self.field, u) for u in range(mod) if u % self.p})
        return out

    def torus_unit_value(self, diag: Sequence[int]) -> CoeffValue:
        """prod chi_i(d_i) for p-adic units d_i."""
        val = None
        for i, c in enumerate(self.chars):
            cc = c.declared_conductor
            if cc == 0:
                continue
            x = self.unit_value_tables[i][diag[i] % self.p**cc]
            val = x if val is None else val * x
        return val if val is not None else self.field.one()

    def alpha_monomial(self, a: Sequence[int]) -> LaurentPoly:
        """prod chi_i(p)^a_i."""
        out = LaurentPoly.constant(self.field, 1)
        for c, e in zip(self.chars, a):
            if e:
                out = out * c.alpha_power(self.field, e)
        return out

    def satake_values(self) -> List[LaurentPoly]:
        return [c.alpha(self.field) for c in self.chars]

    def describe(self) -> list:
        return [c.spec() for c in self.chars]

    def __repr__(self):
        return f"LanglandsDatum(p={self.p}, {self.describe()})"


def build_datum(chars: Sequence[MultChar], field: Optional[CoeffField] = None) -> LanglandsDatum:
    return LanglandsDatum(chars, field)


def l_factor(pi: LanglandsDatum, T: int) -> TruncSeries:
    """prod over unramified i of (1 - alpha_i X)^{-1}, truncated at T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    F = pi.field
    out = TruncSeries.one(F, T)
    for c, cond in zip(pi.chars, pi.conductors):
        if cond == 0:
            out = out * geometric_inverse(F, c.alpha(F), T)
    return out


def rs_l_factor(pi: LanglandsDatum, pi_prime: LanglandsDatum, T: int) -> TruncSeries:
    """L(s, pi x pi') for spherical pi': prod_j prod_{i unram} (1 - alpha_i alpha'_j X)^{-1}."""
    if not pi_prime.is_spherical:
        raise UnsupportedError("the second datum must be spherical")
    F = pi.field
    out = TruncSeries.one(F, T)
    for c, cond in zip(pi.chars, pi.conductors):
        if cond:
            continue
        for cp in pi_prime.chars:
            out = out * geometric_inverse(F, c.alpha(F) * cp.alpha(F), T)
    return out


def contragredient_datum(pi: LanglandsDatum) -> LanglandsDatum:
    """Inverted characters in reversed order (restores the Langlands ordering)."""
    return LanglandsDatum([c.inverse() for c in reversed(pi.chars)], pi.field, pi.langlands_ordered)


def dual_induced_datum(pi: LanglandsDatum) -> LanglandsDatum:
    """Inverted characters in the same order: the induced model paired with
    pi by integration over K."""
    return LanglandsDatum([c.inverse() for c in pi.chars], pi.field, pi.langlands_ordered)


# ---------------------------------------------------------------------------
# named characters and batteries
# ---------------------------------------------------------------------------


def parse_char(p: int, token: str, uniformizer) -> MultChar:
    token = token.strip().lower()
    if token in ("triv", "trivial", "unram", "1"):
        return MultChar.trivial(p, uniformizer)
    if token in ("quad", "quadratic"):
        return MultChar.quadratic(p, uniformizer)
    if token.startswith("quad"):
        # quad2 / quad-2 for the conductor-3 characters at p = 2
        return MultChar.quadratic(p, uniformizer, kind=token[4:].lstrip(":"))
    raise ValueError(f"unknown character token {token!r}")


def datum_from_tokens(p: int, tokens: Sequence[str], alpha_names: Optional[Sequence] = None,
                      psi_depth: int = 0) -> LanglandsDatum:
    names = list(alpha_names) if alpha_names else [f"a{i + 1}" for i in range(len(tokens))]
    chars = [parse_char(p, t, names[i]) for i, t in enumerate(tokens)]
    return LanglandsDatum(chars, make_field(chars, p, psi_depth))


BATTERY = {
    "unram+unram": ("triv", "triv"),
    "quad+unram": ("quad", "triv"),
    "quad+quad": ("quad", "quad"),
}


def battery_datum(p: int, name: str) -> LanglandsDatum:
    return datum_from_tokens(p, BATTERY[name])
