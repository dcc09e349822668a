from fractions import Fraction

import pytest

from gjzeta.exactnum import LaurentPoly
from gjzeta.padic import LevelError, gl_elements
from gjzeta.reps import battery_datum, datum_from_tokens
from gjzeta.models import (
    FlagFunction,
    NewformSearchError,
    _projection_matrix_numpy,
    _projection_matrix_python,
    flag_table,
    matrix_coefficient,
    newform,
    newform_pair,
    pairing,
    project_newform,
    projection_level,
    right_translate,
    seed_vector,
    spherical_vector,
)

CASES = [(3, "unram+unram"), (3, "quad+unram"), (3, "quad+quad"), (2, "unram+unram"), (2, "quad+unram")]


@pytest.mark.parametrize("p,name", CASES)
def test_numpy_projection_matches_python(p, name):
    pi = battery_datum(p, name)
    for m in range(0, 3):
        if 0 < m < pi.omega_conductor:
            continue
        L = projection_level(pi, m)
        if L > 2 + (p == 2):
            continue
        a = _projection_matrix_python(pi, m, L)
        b = _projection_matrix_numpy(pi, m, L)
        assert set(k for k in a if a[k]) == set(k for k in b if b[k])
        for k in a:
            if a[k]:
                assert a[k] == b[k]


@pytest.mark.parametrize("p,name,cond", [(3, "unram+unram", 0), (3, "quad+unram", 1), (3, "quad+quad", 2),
                                         (2, "quad+unram", 2)])
def test_newform_conductor(p, name, cond):
    nf = newform(battery_datum(p, name))
    assert nf.conductor == cond
    assert nf.dimension == 1


def test_newform_is_fixed_by_projection():
    nf = newform(battery_datum(3, "quad+unram"))
    again = project_newform(nf.vector, nf.conductor)
    keys = set(again.table) | set(nf.vector.lift(again.level).table)
    base = nf.vector.lift(again.level)
    for k in keys:
        assert again.table.get(k) == base.table.get(k)


def test_untwisted_search_misses_prediction():
    # dropping omega changes the fixed space for ramified central characters
    pi = battery_datum(3, "quad+unram")
    with pytest.raises(NewformSearchError):
        newform(pi, m_max=2, twist=False)


def test_flag_function_level_checks():
    pi = battery_datum(3, "quad+unram")
    with pytest.raises(LevelError):
        FlagFunction(pi, 0, {})
    pi2 = battery_datum(2, "quad+unram")
    with pytest.raises(LevelError):
        FlagFunction(pi2, 1, {})


def test_seed_vector_value_and_equivariance():
    pi = battery_datum(3, "quad+unram")
    f = seed_vector(pi, 1)
    F = pi.field
    assert f.value_on_K(((1, 0), (0, 1))) == F.one()
    # f(b k) = chi(b) f(k) for b upper triangular in K
    b = ((2, 1), (0, 1))
    assert f.value_on_K(b) == pi.torus_unit_value((2, 1))


def test_right_translate_by_k_permutes_table():
    pi = battery_datum(3, "unram+unram")
    f = seed_vector(pi, 1)
    g = right_translate(f, ((0, 1), (1, 0)))
    assert len(g.table) == len(f.table) == 1
    assert set(g.table) != set(f.table)


def test_spherical_pairing_and_beta_identity():
    pair = newform_pair(battery_datum(3, "unram+unram"))
    F = pair.datum.field
    assert matrix_coefficient(pair, [[1, 0], [0, 1]]) == LaurentPoly.constant(F, 1)


@pytest.mark.parametrize("p", [2, 3])
def test_macdonald_formula(p):
    pi = datum_from_tokens(p, ["triv", "triv"])
    pair = newform_pair(pi)
    F = pi.field
    a1, a2 = pi.satake_values()
    beta = matrix_coefficient(pair, [[p, 0], [0, 1]], certify=True)
    expect = (a1 + a2).scale(F.sqrt_q() * Fraction(1, p + 1))
    assert beta == expect


@pytest.mark.parametrize("p,name", [(3, "quad+unram"), (3, "quad+quad"), (2, "quad+unram")])
def test_beta_central_and_identity(p, name):
    pi = battery_datum(p, name)
    pair = newform_pair(pi)
    F = pi.field
    assert matrix_coefficient(pair, [[1, 0], [0, 1]]) == LaurentPoly.constant(F, 1)
    assert matrix_coefficient(pair, [[p, 0], [0, p]]) == pi.omega_at_uniformizer()


def test_pairing_rejects_non_dual():
    pi = battery_datum(3, "quad+unram")
    f = seed_vector(pi, 1)
    with pytest.raises(ValueError):
        pairing(f, f)


def test_spherical_vector_constant_on_flags():
    pi = battery_datum(3, "unram+unram")
    f = spherical_vector(pi, 1)
    pts, _ = flag_table(2, 3, 1)
    assert len(f.table) == len(pts)
    with pytest.raises(ValueError):
        spherical_vector(battery_datum(3, "quad+unram"))
