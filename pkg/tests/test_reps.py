from fractions import Fraction

import pytest

from gjzeta.chars import MultChar
from gjzeta.exactnum import CoeffField, LaurentPoly, TruncSeries, geometric_inverse
from gjzeta.reps import (
    LanglandsDatum,
    UnsupportedError,
    battery_datum,
    contragredient_datum,
    datum_from_tokens,
    dual_induced_datum,
    l_factor,
    parse_char,
    rs_l_factor,
)


@pytest.mark.parametrize(
    "p,name,cond",
    [(3, "unram+unram", 0), (3, "quad+unram", 1), (3, "quad+quad", 2),
     (2, "unram+unram", 0), (2, "quad+unram", 2), (2, "quad+quad", 4)],
)
def test_battery_conductors(p, name, cond):
    pi = battery_datum(p, name)
    assert pi.predicted_conductor == cond
    assert pi.is_spherical == (cond == 0)


def test_omega_conductor():
    assert battery_datum(3, "quad+quad").omega_conductor == 0
    assert battery_datum(3, "quad+unram").omega_conductor == 1


def test_l_factor_drops_ramified():
    pi = battery_datum(3, "quad+unram")
    F = pi.field
    assert l_factor(pi, 4) == geometric_inverse(F, LaurentPoly.var(F, "a2"), 4)
    qq = battery_datum(3, "quad+quad")
    assert l_factor(qq, 4) == TruncSeries.one(qq.field, 4)


def test_l_factor_spherical_coefficients():
    pi = datum_from_tokens(3, ["triv", "triv"], ["x", "y"])
    F = pi.field
    L = l_factor(pi, 3)
    x, y = LaurentPoly.var(F, "x"), LaurentPoly.var(F, "y")
    assert L[1] == x + y
    assert L[2] == x * x + x * y + y * y


def test_rs_l_factor_requires_spherical_second():
    pi = battery_datum(3, "unram+unram")
    with pytest.raises(UnsupportedError):
        rs_l_factor(pi, battery_datum(3, "quad+unram"), 3)


def test_contragredient_vs_dual():
    chars = [MultChar.trivial(3, Fraction(1, 2)), MultChar.trivial(3, Fraction(1, 3))]
    pi = LanglandsDatum(chars)
    c = contragredient_datum(pi)
    d = dual_induced_datum(pi)
    assert [x.uniformizer for x in c.chars] == [3, 2]
    assert [x.uniformizer for x in d.chars] == [2, 3]


def test_ordering_flag():
    ordered = LanglandsDatum([MultChar.trivial(3, Fraction(1, 2)), MultChar.trivial(3, 3)])
    assert ordered.langlands_ordered
    flipped = LanglandsDatum([MultChar.trivial(3, 3), MultChar.trivial(3, Fraction(1, 2))])
    assert not flipped.langlands_ordered


def test_parse_char_tokens():
    assert parse_char(3, "triv", "a").declared_conductor == 0
    assert parse_char(3, "quad", "a").declared_conductor == 1
    assert parse_char(2, "quad2", "a").declared_conductor == 3
    with pytest.raises(ValueError):
        parse_char(3, "cubic", "a")


def test_datum_validation():
    with pytest.raises(ValueError):
        LanglandsDatum([])
    with pytest.raises(ValueError):
        LanglandsDatum([MultChar.trivial(3), MultChar.trivial(5)])
    with pytest.raises(ValueError):
        LanglandsDatum([MultChar.quadratic(3)], CoeffField(1, 3))


def test_omega_at_uniformizer():
    pi = datum_from_tokens(3, ["triv", "quad"], ["x", "y"])
    F = pi.field
    assert pi.omega_at_uniformizer() == LaurentPoly.var(F, "x") * LaurentPoly.var(F, "y")
