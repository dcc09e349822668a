from fractions import Fraction
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gjzeta.exactnum import CoeffField, LaurentPoly
from gjzeta.chars import DepthError
from gjzeta.reps import UnsupportedError, datum_from_tokens
from gjzeta.whittaker import (
    jacquet_integral_gl2,
    schur_bialternant,
    schur_jacobi_trudi,
    spherical_whittaker_cs,
    whittaker_spec,
)


@pytest.mark.parametrize("lam", [(0, 0), (1, 0), (2, 1), (3, 0, 0), (2, 1, 0), (2, 2, 1), (1, -1), (0, -2, -2)])
def test_schur_two_formulas(lam):
    F = CoeffField(1, 3)
    assert schur_bialternant(F, lam) == schur_jacobi_trudi(F, lam)


def test_schur_small():
    F = CoeffField(1, 2)
    x1, x2 = LaurentPoly.var(F, "x1"), LaurentPoly.var(F, "x2")
    assert schur_bialternant(F, (1, 0)) == x1 + x2
    assert schur_bialternant(F, (2, 0)) == x1 * x1 + x1 * x2 + x2 * x2
    assert schur_bialternant(F, (1, 1)) == x1 * x2


@pytest.mark.parametrize("p", [2, 3])
def test_cs_matches_jacquet_on_torus(p):
    spec = whittaker_spec(datum_from_tokens(p, ["triv", "triv"]), "psi", 1)
    for l1, l2 in itertools.product(range(-2, 4), repeat=2):
        g = [[Fraction(p) ** l1, 0], [0, Fraction(p) ** l2]]
        a = spherical_whittaker_cs(spec, (l1, l2))
        b = jacquet_integral_gl2(spec, g)
        assert (a - b).normalized().is_zero(), (l1, l2)


def test_cs_vanishing_off_dominant_cone():
    spec = whittaker_spec(datum_from_tokens(3, ["triv", "triv", "triv"]))
    assert not spherical_whittaker_cs(spec, (0, 0, 0)).is_zero()
    assert spherical_whittaker_cs(spec, (0, 1, 0)).is_zero()
    with pytest.raises(ValueError):
        spherical_whittaker_cs(spec, (0, 0))


@settings(max_examples=15)
@given(st.integers(-3, 3), st.integers(0, 2), st.integers(0, 2))
def test_jacquet_left_equivariance(x_num, l1, l2):
    # W(n(x) g) = psi(x) W(g) for the "psi" orientation
    p = 3
    spec = whittaker_spec(datum_from_tokens(p, ["triv", "triv"]), "psi", 2)
    F = spec.field
    x = Fraction(x_num, p)
    g = [[Fraction(p) ** l1, 0], [0, Fraction(p) ** l2]]
    ng = [[g[0][0], x * g[1][1]], [0, g[1][1]]]
    from gjzeta.chars import AddChar

    psi = AddChar(p, depth=2)(x, F)
    lhs = jacquet_integral_gl2(spec, ng)
    rhs = jacquet_integral_gl2(spec, g) * psi
    assert (lhs - rhs).normalized().is_zero()


def test_jacquet_right_k_invariance():
    p = 2
    spec = whittaker_spec(datum_from_tokens(p, ["triv", "triv"]), "psi", 2)
    g = [[4, 0], [0, 1]]
    k = [[1, 1], [1, 2]]  # det 1
    gk = [[sum(g[i][t] * k[t][j] for t in range(2)) for j in range(2)] for i in range(2)]
    a = jacquet_integral_gl2(spec, g)
    b = jacquet_integral_gl2(spec, gk)
    assert (a - b).normalized().is_zero()


def test_jacquet_needs_depth_and_gl2():
    spec = whittaker_spec(datum_from_tokens(3, ["triv", "triv"]))
    with pytest.raises(DepthError):
        jacquet_integral_gl2(spec, [[1, Fraction(1, 9)], [0, 1]])
    spec3 = whittaker_spec(datum_from_tokens(3, ["triv", "triv", "triv"]))
    with pytest.raises(UnsupportedError):
        jacquet_integral_gl2(spec3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_spec_rejects_ramified():
    with pytest.raises(ValueError):
        whittaker_spec(datum_from_tokens(3, ["quad", "triv"]))
    with pytest.raises(ValueError):
        whittaker_spec(datum_from_tokens(3, ["triv", "triv"]), "neither")
