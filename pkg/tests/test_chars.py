from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gjzeta.chars import (
    AddChar,
    CharacterError,
    DepthError,
    MultChar,
    char_eval,
    conductor_of_char,
    field_modulus,
    make_field,
    multiply_chars,
    unit_group_generators,
)
from gjzeta.exactnum import CoeffField
from gjzeta.padic import PadicScalar


@pytest.mark.parametrize("p,c", [(3, 1), (3, 2), (5, 2), (2, 2), (2, 3), (2, 4)])
def test_generators_span_units(p, c):
    gens = unit_group_generators(p, c)
    mod = p**c
    span = {1}
    for g, o in gens:
        assert pow(g, o, mod) == 1
        span = {x * pow(g, k, mod) % mod for x in span for k in range(o)}
    assert len(span) == (p - 1) * p ** (c - 1)


@pytest.mark.parametrize("p,expected", [(3, 1), (5, 1), (2, 2)])
def test_quadratic_conductor(p, expected):
    chi = MultChar.quadratic(p)
    assert conductor_of_char(chi) == expected
    assert chi.order == 2


def test_quadratic_p2_kinds():
    assert conductor_of_char(MultChar.quadratic(2, kind="2")) == 3
    assert conductor_of_char(MultChar.quadratic(2, kind="-2")) == 3
    with pytest.raises(ValueError):
        MultChar.quadratic(2, kind="7")


def test_legendre_values():
    chi = MultChar.quadratic(5)
    F = CoeffField(2, 5)
    for u in range(1, 5):
        leg = 1 if u in (1, 4) else -1
        assert chi.unit_value(F, u) == F.rational(leg)


def test_declared_conductor_can_exceed_true():
    # trivial unit images at level 2 still have conductor 0
    chi = MultChar(3, 2, (0,), 1)
    assert conductor_of_char(chi) == 0


def test_bad_generator_image():
    with pytest.raises(CharacterError):
        MultChar(3, 1, (1,), 3)  # a 2-element generator cannot go to a cube root
    with pytest.raises(CharacterError):
        MultChar(3, 1, (), 2)


@given(st.integers(1, 200), st.integers(1, 200))
def test_multiplicative(a, b):
    p = 7
    if a % p == 0 or b % p == 0:
        return
    chi = MultChar(7, 1, (1,), 6)
    assert (chi.unit_exponent(a) + chi.unit_exponent(b)) % 6 == chi.unit_exponent(a * b)


def test_inverse_and_product():
    chi = MultChar(7, 1, (1,), 6, uniformizer=Fraction(2, 3))
    level, table, order = multiply_chars([chi, chi.inverse()])
    assert all(e == 0 for e in table.values())
    F = make_field([chi], 7)
    assert char_eval(chi, Fraction(7 * 3), F) * char_eval(chi.inverse(), Fraction(21), F) == char_eval(
        MultChar.trivial(7), 1, F
    )


def test_char_eval_uniformizer_symbolic():
    chi = MultChar.trivial(3, "a")
    F = CoeffField(1, 3)
    v = char_eval(chi, PadicScalar.from_rational(Fraction(9, 2), 3, 10), F)
    assert v == char_eval(chi, 9, F)
    assert str(chi.alpha_power(F, 2)).count("a") >= 1


def test_addchar_values_and_depth():
    F = CoeffField(9, 3)
    psi = AddChar(3, depth=2)
    assert psi(Fraction(5), F) == F.one()
    assert psi(Fraction(1, 3), F) == F.zeta(3)
    assert psi(Fraction(1, 9), F) == F.zeta(1)
    assert psi(Fraction(1, 3), F) * psi(Fraction(2, 3), F) == F.one()
    with pytest.raises(DepthError):
        psi(Fraction(1, 27), F)
    bar = AddChar(3, depth=2, conjugate=True)
    assert psi(Fraction(1, 9), F) * bar(Fraction(1, 9), F) == F.one()


@given(st.fractions(max_denominator=27), st.fractions(max_denominator=27))
def test_addchar_additive(x, y):
    F = CoeffField(27, 3)
    psi = AddChar(3, depth=3)
    assert psi(x + y, F) == psi(x, F) * psi(y, F)


def test_field_modulus():
    chars = [MultChar.quadratic(3), MultChar(7, 1, (1,), 6)]
    assert field_modulus(chars[:1], 3) == 2
    assert field_modulus(chars[:1], 3, psi_depth=2) == 18
