import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gjzeta.padic import (
    LevelError,
    PadicConfig,
    PadicMatrix,
    PadicScalar,
    PrecisionError,
    borel_order,
    canonical_flag,
    canonical_flag_batch,
    det_int,
    diag_power,
    flag_count,
    flag_points,
    gl_elements,
    gl_order,
    group_array,
    hermite_count,
    hermite_forms,
    inverse_mod,
    iwasawa_int,
    k0_coset_reps,
    k0_elements,
    k0_index,
    mat_mul,
    matrix_codes,
    modulus_exponent,
    random_k,
    rational_valuation,
    valuation,
)

primes = st.sampled_from([2, 3, 5])


def test_config_rejects_composite():
    with pytest.raises(ValueError):
        PadicConfig(p=4, n=2)


@given(primes, st.integers(1, 10**6), st.integers(0, 6))
def test_valuation_of_scaled(p, u, k):
    x = u * p**k
    assert valuation(x, p) == valuation(u, p) + k


def test_valuation_zero_needs_cap():
    with pytest.raises(ValueError):
        valuation(0, 3)
    assert valuation(0, 3, cap=7) == 7
    assert rational_valuation(Fraction(9, 4), 2) == -2


@given(primes, st.fractions(min_value=-50, max_value=50, max_denominator=30).filter(lambda x: x != 0),
       st.fractions(min_value=-50, max_value=50, max_denominator=30).filter(lambda x: x != 0))
def test_scalar_ring_ops(p, a, b):
    N = 12
    A = PadicScalar.from_rational(a, p, N)
    B = PadicScalar.from_rational(b, p, N)
    assert (A * B).v == A.v + B.v
    prod = (A * B).u
    expect = PadicScalar.from_rational(a * b, p, N)
    rel = min(A.rel, B.rel)
    assert prod % p**rel == expect.u % p**rel
    assert (A * A.inverse()).v == 0
    s = A + B
    if s.v is not None and a + b != 0:
        assert s.v == rational_valuation(a + b, p)


def test_scalar_zero_cannot_invert():
    with pytest.raises(PrecisionError):
        PadicScalar.zero(3, 5).inverse()


@given(primes, st.integers(0, 10**4))
def test_inverse_mod(p, seed):
    rng = random.Random(seed)
    n = rng.choice([1, 2, 3])
    L = rng.randint(1, 3)
    k = random_k(n, p, L, rng)
    kinv = inverse_mod(k, p, L)
    assert mat_mul(k, kinv, p**L) == tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def test_inverse_mod_singular():
    with pytest.raises(ValueError):
        inverse_mod(((2, 0), (0, 1)), 2, 3)


@given(st.integers(0, 10**4))
def test_iwasawa_int_reconstructs(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    n = rng.choice([2, 3])
    a0 = [rng.randint(0, 2) for _ in range(n)]
    k0 = random_k(n, p, 8, rng)
    g = mat_mul(diag_power(p, a0), k0)
    N = 10
    a, k, A, prec = iwasawa_int(g, p, N)
    assert sum(a) == sum(a0)
    assert det_int(k) % p
    # g k^{-1} must be upper triangular with diagonal valuations a
    gk = mat_mul(g, inverse_mod(k, p, prec), p**prec)
    for i in range(n):
        for j in range(i):
            assert gk[i][j] % p**prec == 0
        assert valuation(gk[i][i], p, cap=prec) == a[i]


def test_iwasawa_decompose_diagonal():
    from gjzeta.padic import iwasawa_decompose

    g = PadicMatrix.from_rows([[Fraction(1, 3), 0], [0, 9]], 3)
    u, a, k = iwasawa_decompose(g)
    assert a == (-1, 2)


@pytest.mark.parametrize("n,p,L", [(2, 2, 1), (2, 2, 2), (2, 3, 1), (3, 2, 1), (2, 3, 2)])
def test_flag_points_count_and_canonical(n, p, L):
    pts = list(flag_points(n, L, p))
    assert len(pts) == flag_count(n, p, L) == gl_order(n, p, L) // borel_order(n, p, L)
    assert len(set(pts)) == len(pts)
    seen = {canonical_flag(k, p, L)[0] for k in gl_elements(n, p, L)}
    assert seen == set(pts)


@pytest.mark.parametrize("n,p,L", [(2, 2, 2), (2, 3, 1), (3, 2, 1)])
def test_canonical_flag_batch_matches(n, p, L):
    ks = list(gl_elements(n, p, L))
    rows, diag = canonical_flag_batch(np.array(ks), p, L)
    for k, r, d in zip(ks, rows, diag):
        x, dd = canonical_flag(k, p, L)
        assert tuple(map(tuple, r.tolist())) == x
        assert tuple(d.tolist()) == dd


def test_canonical_flag_batch_singular():
    with pytest.raises(ValueError):
        canonical_flag_batch(np.array([[[2, 0], [0, 1]]]), 2, 2)


@pytest.mark.parametrize("n,p,m,L", [(1, 3, 0, 2), (2, 2, 0, 2), (2, 2, 1, 2), (2, 3, 1, 1), (3, 2, 1, 1), (2, 2, 2, 2)])
def test_group_array_matches_enumeration(n, p, m, L):
    arr = group_array(n, p, m, L)
    src = gl_elements(n, p, L) if m == 0 else k0_elements(n, p, m, L)
    ref = np.array(list(src)).reshape(-1, n, n)
    assert arr.shape == ref.shape
    assert (matrix_codes(arr, p, L) == matrix_codes(ref, p, L)).all()


def test_group_array_level_check():
    with pytest.raises(LevelError):
        group_array(2, 2, 3, 2)


@pytest.mark.parametrize("n,p,m", [(2, 2, 1), (2, 2, 2), (2, 3, 1), (3, 2, 1), (2, 3, 2)])
def test_k0_index_and_cosets(n, p, m):
    idx = k0_index(n, p, m)
    assert idx * len(list(k0_elements(n, p, m, m))) == gl_order(n, p, m)
    reps = k0_coset_reps(n, p, m)
    assert len(reps) == idx
    # distinct left cosets: last rows of k^{-1} are distinct points of P^{n-1}
    lasts = set()
    for k in reps:
        kinv = inverse_mod(k, p, m)
        last = kinv[-1]
        j = next(i for i, x in enumerate(last) if x % p)
        u = pow(last[j], -1, p**m)
        lasts.add(tuple(x * u % p**m for x in last))
    assert len(lasts) == idx


def test_k0_index_trivial():
    assert k0_index(2, 3, 0) == 1
    assert k0_index(1, 3, 4) == 1
    assert k0_index(2, 3, 1) == 4


@pytest.mark.parametrize("n,p,v", [(2, 2, 0), (2, 2, 3), (2, 3, 2), (3, 2, 2), (3, 3, 1)])
def test_hermite_forms_count_and_distinct(n, p, v):
    forms = list(hermite_forms(n, v, p))
    assert len(forms) == hermite_count(n, p, v) == len(set(forms))
    for H in forms:
        assert valuation(det_int(H), p) == v


def test_hermite_count_gl2():
    # |K diag(p^v, 1) K / K| summed over the shell: sum_{a1+a2=v} p^{a1}
    assert hermite_count(2, 3, 2) == 1 + 3 + 9


def test_modulus_exponent():
    assert modulus_exponent((1, 0)) == -1
    assert modulus_exponent((0, 1)) == 1
    assert modulus_exponent((1, 0, 0)) == -2
    assert modulus_exponent((1, 1, 1)) == 0


def test_gl_order_small():
    assert gl_order(2, 2, 1) == 6
    assert gl_order(2, 3, 1) == 48
    assert gl_order(2, 2, 2) == 6 * 2**4
    assert len(list(gl_elements(2, 2, 2))) == gl_order(2, 2, 2)
