"""One test per acceptance criterion, at the stated tolerances.

Run alone with ``pytest tests/test_acceptance.py -v``; each line of the
output is one criterion."""

import time
from fractions import Fraction

import pytest

from gjzeta import cli
from gjzeta import zeta as Z
from gjzeta.chars import MultChar, make_field
from gjzeta.exactnum import TruncSeries, geometric_inverse
from gjzeta.models import newform_pair
from gjzeta.reps import BATTERY, LanglandsDatum, battery_datum, datum_from_tokens, l_factor


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_01_gl1_main_theorem():
    ram = datum_from_tokens(3, ["quad"])
    rep, dt1 = _timed(Z.gj_main_theorem, ram, 5)
    assert rep.equal
    assert all(c.is_zero() for c in rep.lhs[1:]) and not rep.lhs[0].is_zero()
    unr = datum_from_tokens(3, ["triv"], ["alpha"])
    rep2, dt2 = _timed(Z.gj_main_theorem, unr, 5)
    assert rep2.equal
    F = unr.field
    assert TruncSeries(F, rep2.lhs) == geometric_inverse(F, unr.satake_values()[0], 5)
    assert dt1 < 1 and dt2 < 1


def test_criterion_02_gl2_main_theorem():
    pi = battery_datum(3, "quad+unram")
    pair = newform_pair(pi)
    assert pair.conductor == 1
    rep, dt = _timed(Z.gj_main_theorem, pi, 5, "hermite", pair=pair)
    assert rep.equal and rep.T == 5
    assert dt < 600
    qq = battery_datum(3, "quad+quad")
    rep2 = Z.gj_main_theorem(qq, 4)
    assert rep2.equal
    assert TruncSeries(qq.field, rep2.lhs) == TruncSeries.one(qq.field, 4)


def test_criterion_03_spherical_gj():
    pi = datum_from_tokens(2, ["triv", "triv"])
    rep, dt = _timed(Z.gj_spherical, pi, 5)
    assert rep.equal
    assert TruncSeries(pi.field, rep.rhs) == l_factor(pi, 5)
    assert dt < 300


@pytest.mark.parametrize("p", [2, 3])
def test_criterion_04_rankin_selberg(p):
    def pair(n2):
        chars = [MultChar.trivial(p, f"a{i + 1}") for i in range(2)]
        chars2 = [MultChar.trivial(p, f"b{i + 1}") for i in range(n2)]
        F = make_field(chars + chars2, p)
        return LanglandsDatum(chars, F), LanglandsDatum(chars2, F)

    t0 = time.perf_counter()
    assert Z.rs_integral_nn1_spherical(*pair(1), 3).equal
    assert Z.rs_integral_nn_spherical(*pair(2), 3).equal
    assert time.perf_counter() - t0 < 300


def test_criterion_05_propagation():
    pit = LanglandsDatum([MultChar.trivial(3, Fraction(1, 2)), MultChar.trivial(3, Fraction(1, 3))])
    t0 = time.perf_counter()
    for g in ([[1, 0], [0, 1]], [[3, 0], [0, 1]], [[9, 0], [0, 1]], [[1, 0], [0, 3]]):
        rep = Z.propagation_check(pit, g, Fraction(1, 10**6))
        assert rep.passed, rep.to_json()
        assert rep.diff_bound <= Fraction(1, 10**6)
        assert rep.tail_bound >= rep.tail >= 0
    assert time.perf_counter() - t0 < 120


def test_criterion_06_invariance_identities():
    for p in (2, 3):
        for name in BATTERY:
            pi = battery_datum(p, name)
            pair = newform_pair(pi)
            assert Z.phi_k_invariance_check(pi, samples=100, seed=0).passed
            assert Z.projection_identity_check(pi, samples=50, seed=0, pair=pair).passed
            assert Z.idempotence_check(pi)
            assert Z.k0_equivariance_check(pair)


@pytest.mark.parametrize("p", [2, 3])
def test_criterion_07_oracle_equivalence(p):
    for name in BATTERY:
        for rep in Z.oracle_equivalence(battery_datum(p, name), 3):
            assert rep.equal, rep.table()
    assert all(w["equal"] for w in cli.whittaker_oracle(p, 4))


@pytest.mark.parametrize("p", [3, 2])
def test_criterion_08_conductor_discovery(p):
    for tokens in BATTERY.values():
        case = cli.conductor_case(p, tokens, 8, False)
        assert case["discovered"] == case["predicted"]
        assert case["dimension"] == 1
        assert case["seeds_proportional"] >= 2
        assert all(v in ("zero", "not a character") for v in case["below_conductor"].values())
    if p == 3:
        found = [cli.conductor_case(3, t, 8, False)["discovered"] for t in BATTERY.values()]
        assert found == [0, 1, 2]


def test_criterion_09_measure_anchors():
    for n in (1, 2, 3):
        for p in (2, 3):
            assert Z.vol_k_additive(n, p, 1) == 1
            assert Z.vol_k_iwasawa(n, p) == 1
    for n, p in ((1, 2), (1, 3), (2, 2), (2, 3)):
        for v in (0, 1, 2):
            assert Z.hermite_shell_volume(n, p, v) == Z.brute_shell_volume(n, p, v)


def test_criterion_10_stretch_gl3():
    sph = datum_from_tokens(2, ["triv", "triv", "triv"])
    assert Z.gj_spherical(sph, 3).equal
    ram = datum_from_tokens(2, ["quad", "triv", "triv"])
    rep = Z.gj_main_theorem(ram, 3)
    assert rep.extra["conductor"] == 2
    assert rep.equal


NEGATIVE = [
    ["verify", "main-theorem", "--chars", "quad,triv"],
    ["verify", "gj-spherical"],
    ["verify", "rs-nn1"],
    ["verify", "rs-nn"],
    ["verify", "propagation"],
    ["verify", "phi-invariance", "--chars", "quad,triv", "--samples", "20"],
    ["verify", "projection", "--chars", "quad,triv", "--samples", "10"],
    ["verify", "conductor"],
    ["verify", "oracle-equivalence", "--chars", "quad,triv", "--T", "2"],
]


def test_criterion_11_negative_controls(capsys):
    targets = {argv[1] for argv in NEGATIVE}
    assert targets == set(cli.VERIFY)
    for argv in NEGATIVE:
        assert cli.main(argv + ["--format", "json"]) == 0, argv
        assert cli.main(argv + ["--format", "json", "--corrupt"]) == 1, argv
    capsys.readouterr()
