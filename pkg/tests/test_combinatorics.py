import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadamard_extract.combinatorics import (PiPower, Placeholders, RationalMatrix, a_coeff,
                                            build_lemma_d_matrices, finalspec_weights, gbinom, in1_inverse,
                                            in1_matrix, in2_inverse, in2_matrix, pi_power, powercoeff,
                                            wfinal_extract, xi_weights)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
DELTAS = [Fraction(-2), Fraction(-1, 2), Fraction(0), Fraction(1), Fraction(7, 3)]


def test_gbinom_examples():
    for N in range(8):
        assert gbinom(-1, N) == (-1) ** N
    assert gbinom(Fraction(3, 7), -2) == 0
    assert gbinom(5, 2) == 10
    assert gbinom(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert gbinom(2.5, 2) == pytest.approx(1.875)
    assert isinstance(gbinom(Fraction(1, 3), 3), Fraction)


@given(rationals, rationals, st.integers(0, 10))
def test_chu_vandermonde(m, n, k):
    assert sum(gbinom(m, k - l) * gbinom(n, l) for l in range(k + 1)) == gbinom(m + n, k)


@given(rationals, st.integers(0, 8), st.integers(0, 8))
def test_trinomial_revision(a, b, c):
    assert gbinom(a, b) * gbinom(b, c) == gbinom(a, c) * gbinom(a - c, b - c)


@given(rationals, st.integers(0, 7), st.integers(0, 7))
def test_telescoping_identity(delta, K, m):
    if m > K:
        return
    lhs = sum((-1) ** (l - m) * gbinom(delta - K - m, l - m) for l in range(m, K + 1))
    assert lhs == gbinom(2 * K - delta, K - m)


@given(st.integers(-6, 6), st.integers(0, 6))
def test_gbinom_negative_upper(a, b):
    if a < 0:
        assert gbinom(a, b) == (-1) ** b * gbinom(-a + b - 1, b)
    else:
        assert gbinom(a, b) == math.comb(a, b)


def test_lemma_d_k0():
    A, B, C = build_lemma_d_matrices(0, Fraction(3, 5))
    assert A.rows == [[1]] and B.rows == [[1]] and C.rows == [[1]]


def test_lemma_d_k1_delta0():
    A, B, C = build_lemma_d_matrices(1, 0)
    assert A.rows == [[1, 0], [-1, 1]]
    assert B.rows == [[1, 1], [1, 2]]
    assert (A @ B).rows == [[1, 1], [0, 1]]
    assert A @ B == C


@pytest.mark.parametrize("K", range(7))
@pytest.mark.parametrize("delta", DELTAS)
def test_lemma_d_identity(K, delta):
    A, B, C = build_lemma_d_matrices(K, delta)
    assert A @ B == C


@pytest.mark.parametrize("K", range(7))
@pytest.mark.parametrize("delta", DELTAS)
def test_in1_inverse(K, delta):
    I = RationalMatrix.identity(K + 1)
    assert in1_matrix(K, delta) @ in1_inverse(K, delta) == I
    assert in1_inverse(K, delta) @ in1_matrix(K, delta) == I


def test_in1_small_cases():
    assert in1_inverse(0, Fraction(2)).rows == [[1]]
    d = Fraction(2, 9)
    assert in1_matrix(1, d)[0, 1] + in1_inverse(1, d)[0, 1] == 0
    assert in1_matrix(5, Fraction(1, 2)) @ in1_inverse(5, Fraction(1, 2)) == RationalMatrix.identity(6)


@pytest.mark.parametrize("K,o,delta", [(0, 0, 0), (3, 0, 1), (4, 2, -1), (6, 3, Fraction(7, 3)),
                                       (5, 1, Fraction(-1, 2))])
def test_in2_inverse(K, o, delta):
    mp = Placeholders()
    M = in2_matrix(K, o, delta, mp)
    Minv = in2_inverse(K, o, delta, mp)
    I = RationalMatrix.identity(K + 1)
    assert M @ Minv == I
    assert Minv @ M == I


def test_in2_k0_is_reciprocal():
    mp = Placeholders()
    M = in2_matrix(0, 2, Fraction(1, 2), mp)
    assert in2_inverse(0, 2, Fraction(1, 2), mp)[0, 0] == 1 / M[0, 0]


def test_in2_zero_placeholder_raises():
    # K=1, delta=0: the inverse divides by M' at 1 and 3
    with pytest.raises(ZeroDivisionError):
        in2_inverse(1, 0, 0, Placeholders(zero_at=[3]))


def test_placeholders_are_distinct_primes():
    mp = Placeholders()
    vals = [mp(x) for x in (1, Fraction(1, 2), -3, 7)]
    assert vals == [2, 3, 5, 7]
    assert mp(Fraction(1, 2)) == 3


def test_matrix_mismatches():
    A = RationalMatrix([[1, 2], [3, 4]])
    B = RationalMatrix([[1, 2], [3, 5]])
    assert A.mismatches(B) == [(1, 1)]
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2], [3]])
    with pytest.raises(ValueError):
        A @ RationalMatrix([[1, 2, 3]])


def collect_brute_force(W, d, mprime, sexp, zpow, cutoff=8):
    """Coefficient of s^sexp z^zpow in sum_{l,m,n} 4^-m/m! C(l+m+n+1-d/2, n) z^m W_{l,n} M'(2(l+m+n)+3-d) s^..."""
    total = 0
    for (l, n), w in W.items():
        for m in range(cutoff + 1):
            if l + m + n > cutoff or m != zpow or 2 * (l + m + n) + 3 - d != sexp:
                continue
            total += Fraction(1, 4 ** m * math.factorial(m)) * gbinom(l + m + n + 1 - d / 2, n) * w \
                * mprime(2 * (l + m + n) + 3 - d)
    return total


def random_W(rng, K):
    return {(l, n): Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for l in range(K + 1) for n in range(K + 1 - l)}


def test_powercoeff_examples():
    mp = Placeholders()
    d = Fraction(4)
    for m in range(4):
        assert powercoeff({(0, 0): 1}, 0, m, d, mp) == Fraction(1, 4 ** m * math.factorial(m)) * mp(2 * m + 3 - d)
    W = {(3, 0): Fraction(5, 7)}
    assert powercoeff(W, 3, 2, d, mp) == Fraction(1, 32) * mp(2 * 3 + 4 + 3 - d) * Fraction(5, 7)


@pytest.mark.parametrize("d", [Fraction(4), Fraction(3), Fraction(7, 2)])
def test_powercoeff_matches_brute_force(d):
    rng = random.Random(11)
    mp = Placeholders()
    W = random_W(rng, 3)
    assert powercoeff(W, 3, 2, d, mp) == collect_brute_force(W, d, mp, 2 * 3 + 2 * 2 + 3 - d, 2)


@pytest.mark.parametrize("K", range(7))
@pytest.mark.parametrize("o", range(4))
@pytest.mark.parametrize("delta", DELTAS)
def test_wfinal_round_trip(K, o, delta):
    rng = random.Random(100 * K + 10 * o + DELTAS.index(delta))
    mp = Placeholders()
    d = 2 * delta + 2 + 2 * o
    W = random_W(rng, K)
    L = {m: powercoeff(W, K, m + o, d, mp) for m in range(K + 1)}
    assert wfinal_extract(L, K, o, delta, mp) == W[(K, 0)]


def test_wfinal_unit_table():
    mp = Placeholders()
    K, o, delta = 3, 1, Fraction(1, 2)
    d = 2 * delta + 2 + 2 * o
    W = {(l, n): Fraction(int((l, n) == (K, 0))) for l in range(K + 1) for n in range(K + 1 - l)}
    L = {m: powercoeff(W, K, m + o, d, mp) for m in range(K + 1)}
    assert wfinal_extract(L, K, o, delta, mp) == 1


def test_wfinal_k0():
    mp = Placeholders()
    o, delta = 2, Fraction(1, 2)
    L = {0: Fraction(3, 11)}
    expected = L[0] * 4 ** o * math.factorial(o) / mp(1 - 2 * delta)
    assert wfinal_extract(L, 0, o, delta, mp) == expected


def test_a_coeff_examples():
    mp = Placeholders()
    d = Fraction(5)
    for k in range(4):
        expected = PiPower(1, (2 - d) / 2) * Fraction(1, 4 ** k * math.factorial(k)) * mp(2 * k + 3 - d)
        assert a_coeff(k, 0, d, mp) == expected
    # d even, k + n = d/2 - 1, n > 0
    for d in (4, 6, 8):
        for n in range(1, d // 2):
            assert a_coeff(d // 2 - 1 - n, n, d, mp) == 0
    assert a_coeff(0, 0, 4, mp) == pi_power(-1) * mp(-1)


def test_a_coeff_canonical_numeric():
    from hadamard_extract.expansion import numeric_mprime
    from hadamard_extract.mellin import BumpFunction
    mp = numeric_mprime(BumpFunction.canonical())
    assert float(a_coeff(0, 0, 4, lambda x: Fraction(1))) * mp(-1) == pytest.approx(math.exp(-1) / 2 / math.pi)


def test_xi_weights_k0():
    mp = Placeholders()
    for d in (2, 3, 4, 5):
        for o in range(3):
            w = xi_weights(0, o, d, mp)
            expected = PiPower(1, Fraction(d, 2) - 1) * Fraction(4 ** o * math.factorial(o)) / mp(2 * o - d + 3)
            assert w.weights == [expected]
            assert w.exponents == [2 * o - d + 3] and w.zpowers == [o]


@pytest.mark.parametrize("d", [4, 6, 8])
def test_xi_weights_small_k_single_term(d):
    mp = Placeholders()
    h = d // 2 - 1
    for K in range(h + 1):
        w = xi_weights(K, h - K, d, mp)
        expected = PiPower(Fraction(4 ** h), h) * Fraction(math.factorial(h - K) * math.factorial(K)) / mp(1)
        assert w.weights[0] == expected
        assert all(x == 0 for x in w.weights[1:])


def test_xi_weights_structure():
    mp = Placeholders()
    w = xi_weights(3, 1, 5, mp)
    assert len(w.weights) == 4
    assert w.exponents == [2 * 3 + 2 * m + 2 - 5 + 3 for m in range(4)]
    assert w.zpowers == [1, 2, 3, 4]
    assert set(w.mprime_values) <= set(w.exponents)
    with pytest.raises(ValueError):
        xi_weights(1, 0, 1, mp)


def test_xi_weights_zero_mprime_raises():
    with pytest.raises(ZeroDivisionError):
        xi_weights(1, 0, 4, Placeholders(zero_at=[1]))


@pytest.mark.parametrize("K", range(5))
@pytest.mark.parametrize("d", [4, 6, 8])
def test_finalspec_forms_match_general_weights(K, d):
    mp = Placeholders()
    assert finalspec_weights(K, d, 1, mp).weights == xi_weights(K, 0, d, mp).weights
    assert finalspec_weights(K, d, 2, mp).weights == xi_weights(K, d // 2 - 1, d, mp).weights
    if K < d // 2:
        assert finalspec_weights(K, d, 3, mp).weights == xi_weights(K, d // 2 - 1 - K, d, mp).weights


def test_finalspec_rejections():
    mp = Placeholders()
    with pytest.raises(ValueError):
        finalspec_weights(1, 5, 2, mp)
    with pytest.raises(ValueError):
        finalspec_weights(3, 4, 3, mp)
    with pytest.raises(ValueError):
        finalspec_weights(1, 4, 4, mp)


@pytest.mark.parametrize("K", range(5))
@pytest.mark.parametrize("o", range(3))
@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_xi_weights_recover_v_from_a_coeff_table(K, o, d):
    # flat-space table W_{l,0} = pi^((2-d)/2) V^l / (4^l l!); the weights must return V^K with pi cancelled
    mp = Placeholders()
    d = Fraction(d)
    rng = random.Random(K * 31 + o * 7 + int(2 * d))
    V = {l: Fraction(rng.randint(1, 9), rng.randint(1, 5)) for l in range(K + 1)}
    V[0] = Fraction(1)
    W = {(l, 0): pi_power((2 - d) / 2) * (V[l] * Fraction(1, 4 ** l * math.factorial(l))) for l in range(K + 1)}
    w = xi_weights(K, o, d, mp)
    value = w.apply(lambda e, p: powercoeff(W, K, p, d, mp))
    assert value == V[K]


def test_pipower_arithmetic():
    a = PiPower(Fraction(2), Fraction(1, 2))
    b = PiPower(Fraction(3), Fraction(-1, 2))
    assert a * b == 6
    assert (a / a) == 1
    assert a + a == PiPower(4, Fraction(1, 2))
    assert PiPower(0, 3) == 0
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ZeroDivisionError):
        a / PiPower(0)
    assert float(a) == pytest.approx(2 * math.sqrt(math.pi))
    assert a * 1.5 == pytest.approx(3 * math.sqrt(math.pi))
