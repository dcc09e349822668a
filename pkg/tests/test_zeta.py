from fractions import Fraction

import pytest

from gjzeta.chars import MultChar
from gjzeta.exactnum import CoeffField, SatakeRat, TruncSeries
from gjzeta.models import newform_pair
from gjzeta.padic import PadicMatrix, PrecisionError
from gjzeta.reps import LanglandsDatum, UnsupportedError, battery_datum, datum_from_tokens, l_factor
from gjzeta.chars import make_field
from gjzeta import zeta as Z


def _const(F, c):
    return SatakeRat.constant(F, c)


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------


def test_main_phi_value_at_identity():
    pi = battery_datum(3, "quad+unram")
    phi = Z.main_phi(pi)
    F = pi.field
    assert Z.sb_eval(phi, [[1, 0], [0, 1]]) == _const(F, 4)
    # bottom row must be (p^c, unit)
    assert Z.sb_eval(phi, [[1, 0], [1, 1]]).is_zero()
    assert Z.sb_eval(phi, [[0, 1], [3, 2]]) == _const(F, 4) * pi.omega_unit_value(2, inverse=True)


def test_shapes_support():
    F = CoeffField(1, 3)
    ind = Z.indicator_phi(2, 3)
    assert Z.sb_eval(ind, [[Fraction(1, 3), 0], [0, 1]], F).is_zero()
    assert Z.sb_eval(ind, [[3, 0], [0, 9]], F) == _const(F, 1)
    blk = Z.block_phi(2, 3)
    assert Z.sb_eval(blk, [[1, 2], [3, 0]], F) == _const(F, 1)
    assert Z.sb_eval(Z.zero_phi(2, 3), [[1, 0], [0, 1]], F).is_zero()
    with pytest.raises(ValueError):
        Z.sb_eval(ind, [[1, 0], [0, 1]])


def test_shift_and_bump():
    F = CoeffField(1, 3)
    sh = Z.shifted(Z.indicator_phi(2, 3))
    assert Z.sb_eval(sh, [[1, 0], [0, 1]], F).is_zero()
    assert Z.sb_eval(sh, [[3, 0], [0, 3]], F) == _const(F, 1)
    b = Z.bumped(Z.indicator_phi(2, 3))
    assert Z.sb_eval(b, [[1, 3], [0, 1]], F) == _const(F, 2)
    assert Z.sb_eval(b, [[1, 1], [0, 1]], F) == _const(F, 1)


def test_padic_input_needs_precision():
    pi = battery_datum(3, "quad+unram")
    x = PadicMatrix.from_rows([[1, 0], [0, 1]], 3, N=1)
    assert Z.sb_eval(Z.main_phi(pi), x) == _const(pi.field, 4)
    pi2 = battery_datum(3, "quad+quad")
    with pytest.raises(PrecisionError):
        Z.sb_eval(Z.main_phi(pi2), x)


def test_unknown_shape():
    with pytest.raises(ValueError):
        Z.SBFunction("gaussian", 2, 3)
    with pytest.raises(ValueError):
        Z.SBFunction("main", 2, 3)


# ---------------------------------------------------------------------------
# zeta integrals
# ---------------------------------------------------------------------------


def test_gl1_zeta_is_tate():
    pi = datum_from_tokens(3, ["triv"], ["x"])
    Zs = Z.gj_zeta(pi, Z.main_phi(pi), 5)
    assert Zs == l_factor(pi, 5)


@pytest.mark.parametrize("p,name", [(3, "unram+unram"), (3, "quad+unram"), (3, "quad+quad"), (2, "quad+unram")])
def test_main_theorem_small(p, name):
    rep = Z.gj_main_theorem(battery_datum(p, name), 3)
    assert rep.equal, rep.table()


def test_main_theorem_corruption_flips_at_xn():
    rep = Z.gj_main_theorem(battery_datum(3, "quad+unram"), 3, corrupt=True)
    assert not rep.equal
    assert rep.first_mismatch == 2


def test_zero_phi_gives_zero_series():
    pi = battery_datum(3, "quad+unram")
    s = Z.gj_zeta(pi, Z.zero_phi(2, 3), 3)
    assert s == TruncSeries.zero(pi.field, 3)


def test_linearity_in_phi():
    pi = battery_datum(3, "unram+unram")
    pair = newform_pair(pi)
    a = Z.gj_zeta(pi, Z.indicator_phi(2, 3), 3, pair=pair)
    b = Z.gj_zeta(pi, Z.block_phi(2, 3), 3, pair=pair)
    both = Z.gj_zeta(pi, Z.PhiSum((Z.indicator_phi(2, 3), Z.block_phi(2, 3))), 3, pair=pair)
    assert both == a + b


@pytest.mark.parametrize("kind", ["main", "indicator", "zero"])
def test_hermite_matches_brute(kind):
    pi = battery_datum(3, "quad+unram")
    reps = Z.oracle_equivalence(pi, 2, shapes=(kind,))
    assert all(r.equal for r in reps)


def test_oracle_corruption_flips():
    pi = battery_datum(3, "unram+unram")
    reps = Z.oracle_equivalence(pi, 2, shapes=("indicator",), corrupt=True)
    assert not reps[0].equal


def test_budget_exceeded():
    pi = battery_datum(3, "quad+unram")
    with pytest.raises(Z.BudgetExceeded):
        Z.gj_zeta(pi, Z.bumped(Z.main_phi(pi)), 2, max_cosets=10)


def test_report_json_and_table():
    rep = Z.gj_spherical(battery_datum(3, "unram+unram"), 2)
    js = rep.to_json()
    assert js["equal"] and "runtime_ms" not in js
    assert "runtime_ms" in rep.to_json(timings=True)
    assert "equal: True" in rep.table()


def test_gj_spherical_rejects_ramified():
    with pytest.raises(UnsupportedError):
        Z.gj_spherical(battery_datum(3, "quad+unram"), 2)


# ---------------------------------------------------------------------------
# Rankin-Selberg
# ---------------------------------------------------------------------------


def _rs_pair(p, n, n2):
    chars = [MultChar.trivial(p, f"a{i + 1}") for i in range(n)]
    chars2 = [MultChar.trivial(p, f"b{i + 1}") for i in range(n2)]
    F = make_field(chars + chars2, p)
    return LanglandsDatum(chars, F), LanglandsDatum(chars2, F)


@pytest.mark.parametrize("p", [2, 3])
def test_rs_nn1(p):
    pi, pit = _rs_pair(p, 2, 1)
    assert Z.rs_integral_nn1_spherical(pi, pit, 4).equal
    assert not Z.rs_integral_nn1_spherical(pi, pit, 4, corrupt=True).equal


@pytest.mark.parametrize("p", [2, 3])
def test_rs_nn(p):
    pi, pit = _rs_pair(p, 2, 2)
    assert Z.rs_integral_nn_spherical(pi, pit, 3).equal
    assert not Z.rs_integral_nn_spherical(pi, pit, 3, corrupt=True).equal
    zero = Z.rs_integral_nn_spherical(pi, pit, 3, phi_kind="zero")
    assert all(c.is_zero() for c in zero.lhs)


def test_rs_name_clash():
    pi = datum_from_tokens(3, ["triv", "triv"])
    with pytest.raises(ValueError):
        Z.rs_integral_nn1_spherical(pi, datum_from_tokens(3, ["triv"]), 2)


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------


def _pit(p):
    chars = [MultChar.trivial(p, Fraction(1, 2)), MultChar.trivial(p, Fraction(1, 3))]
    return LanglandsDatum(chars)


@pytest.mark.parametrize("g", [[[1, 0], [0, 1]], [[3, 0], [0, 1]], [[9, 0], [0, 1]], [[1, 0], [0, 3]],
                               [[1, 1], [0, 3]], [[3, 1], [1, 1]]])
def test_propagation_passes(g):
    rep = Z.propagation_check(_pit(3), g)
    assert rep.passed, rep.to_json()
    assert rep.tail == 0


def test_propagation_corruption():
    rep = Z.propagation_check(_pit(3), [[3, 0], [0, 1]], corrupt=True)
    assert not rep.passed


def test_propagation_gl3_unsupported():
    chars = [MultChar.trivial(3, Fraction(1, k)) for k in (2, 3, 5)]
    with pytest.raises(UnsupportedError):
        Z.propagation_check(LanglandsDatum(chars), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


# ---------------------------------------------------------------------------
# identities and measure anchors
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["quad+unram", "quad+quad"])
def test_phi_invariance(name):
    pi = battery_datum(3, name)
    assert Z.phi_k_invariance_check(pi, samples=30).passed
    assert not Z.phi_k_invariance_check(pi, samples=30, corrupt=True).passed


def test_projection_identity():
    pi = battery_datum(3, "quad+unram")
    assert Z.projection_identity_check(pi, samples=6).passed
    assert not Z.projection_identity_check(pi, samples=6, corrupt=True).passed
    assert Z.idempotence_check(pi)
    assert Z.k0_equivariance_check(newform_pair(pi))


@pytest.mark.parametrize("n,p", [(1, 2), (2, 2), (2, 3), (3, 2)])
def test_vol_k_is_one(n, p):
    assert Z.vol_k_additive(n, p, 1) == 1
    assert Z.vol_k_iwasawa(n, p) == 1


@pytest.mark.parametrize("n,p,v", [(2, 2, 1), (2, 3, 1), (2, 2, 2), (1, 3, 2)])
def test_shell_volumes_agree(n, p, v):
    assert Z.hermite_shell_volume(n, p, v) == Z.brute_shell_volume(n, p, v)


def test_kappa():
    assert Z.kappa(2, 2) == Fraction(3, 8)
