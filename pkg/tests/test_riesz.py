import math

import mpmath as mp
import numpy as np
import pytest

import oracles
from hadamard_extract.mellin import BumpFunction, mellin_prime, odd_part
from hadamard_extract.riesz import (SeriesNotConvergedError, TensorBump, TimelikeCurve, c_alpha,
                                    random_test_function, resolvent_riesz_line, riesz_line_pair, riesz_pair,
                                    riesz_pointwise, nu_curve)


def test_c_alpha_examples():
    assert c_alpha(4, 4) == pytest.approx(1 / (8 * math.pi), rel=1e-15)
    for d in (2, 4, 6, 8):
        ref = (4 * math.pi) ** (1 - d / 2) / (2 * math.factorial(d // 2 - 1))
        assert c_alpha(d, d) == pytest.approx(ref, rel=1e-14)
    assert c_alpha(2, 4) == 0.0
    assert c_alpha(0, 3) == 0.0


@pytest.mark.parametrize("alpha,d", [(2.5, 3), (5.5, 4), (3 + 1j, 2), (7, 5)])
def test_c_alpha_against_mpmath(alpha, d):
    ref = complex(oracles.c_alpha(mp.mpc(alpha), d))
    assert complex(c_alpha(alpha, d)) == pytest.approx(ref, rel=1e-13)


def test_riesz_pointwise_examples():
    assert riesz_pointwise(6, 4, [0.2, 1.0, 0.0, 0.0]) == 0.0
    t = 0.7
    assert riesz_pointwise(6, 4, [t, 0, 0, 0]) == pytest.approx(c_alpha(6, 4) * t ** 2, rel=1e-15)
    assert riesz_pointwise(6, 4, [-t, 0, 0, 0]) == 0.0
    assert riesz_pointwise(6, 4, [-t, 0, 0, 0], branch="-") == pytest.approx(c_alpha(6, 4) * t ** 2)
    x = np.array([1.0, 0.3, -0.2, 0.1])
    assert riesz_pointwise(5.5, 4, -x, "difference") == pytest.approx(-riesz_pointwise(5.5, 4, x, "difference"))
    with pytest.raises(ValueError):
        riesz_pointwise(4, 4, x)
    with pytest.raises(ValueError):
        riesz_pointwise(5, 4, x, branch="sideways")


@pytest.mark.parametrize("d", [2, 3, 4])
def test_delta_property(d):
    rng = np.random.default_rng(40 + d)
    count = {2: 4, 3: 3, 4: 3}[d]
    for _ in range(count):
        phi = random_test_function(rng, d)
        val = riesz_pair(0, d, phi)
        ref = float(phi(np.zeros(d)))
        assert abs(val - ref) <= 1e-6 * (1 + abs(ref))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_recursion_across_continuation_boundary(d):
    rng = np.random.default_rng(7 + d)
    phi = random_test_function(rng, d)
    for alpha in np.linspace(d - 3.5, d + 1.5, 4 if d == 4 else 6):
        base = riesz_pair(alpha, d, phi)
        step = riesz_pair(alpha, d, phi, extra=1)
        assert abs(base - step) <= 1e-6 * (1 + abs(base))


@pytest.mark.parametrize("d,alpha", [(2, 2.5), (2, 3.7), (3, 3.6), (3, 4.5)])
def test_pairing_against_direct_quadrature(d, alpha):
    rng = np.random.default_rng(int(10 * alpha) + d)
    phi = random_test_function(rng, d)
    ref = oracles.riesz_pair_direct(alpha, d, phi, phi.time_support[1])
    assert riesz_pair(alpha, d, phi) == pytest.approx(ref, rel=1e-6)


def test_pairing_branches():
    rng = np.random.default_rng(3)
    phi = random_test_function(rng, 2)
    plus = riesz_pair(1.3, 2, phi, "+")
    minus = riesz_pair(1.3, 2, phi, "-")
    assert riesz_pair(1.3, 2, phi, "difference") == pytest.approx(plus - minus, rel=1e-12)
    with pytest.raises(ValueError):
        riesz_pair(1.3, 3, phi)
    with pytest.raises(ValueError):
        riesz_pair(1.3, 2, phi, "both")


def test_box_power_against_mpmath():
    specs = [(0.1, 1.5, (1, 1), 1), (-0.2, 1.2, (2, -1), 1), (0.05, 1.3, (1,), 2)]
    phi = TensorBump(tuple(BumpFunction.standard(c, w, co, a) for c, w, co, a in specs))
    factors = [lambda t, s=s: oracles.bump(t, *s) for s in specs]
    for k, c in [(0, 0.0), (1, 0.0), (1, 2.5), (2, -1.5)]:
        ref = float(oracles.box_power_direct(factors, k, c, 3))
        assert float(phi.box_power([[0.0, 0.0, 0.0]], k, c)[0]) == pytest.approx(ref, rel=1e-9)


def test_box_power_vanishes_outside_support():
    phi = TensorBump((BumpFunction.standard(), BumpFunction.standard()))
    assert phi.box_power([[1.5, 0.0]], 2)[0] == 0.0


def test_nu_curve():
    geo = TimelikeCurve.geodesic_line(4)
    assert np.allclose(nu_curve(geo, np.linspace(-2, 2, 9)), 1.0)
    tilted = TimelikeCurve.geodesic_line(3, [2.0, 1.0, 0.5])
    assert np.allclose(nu_curve(tilted, [-0.3, 0.0, 1.1]), 1.0)
    hyp = TimelikeCurve.hyperbola(4)
    chord = np.array([math.sinh(0.5), math.cosh(0.5) - 1, 0, 0])
    assert nu_curve(hyp, 0.5) == pytest.approx((chord[0] ** 2 - chord[1] ** 2) / 0.25, rel=1e-14)
    assert nu_curve(hyp, 0.0) == pytest.approx(1.0)
    accel = TimelikeCurve(2, lambda t: np.stack([2 * np.atleast_1d(t), np.atleast_1d(t) ** 2], axis=1),
                          lambda t: np.stack([np.full(np.size(t), 2.0), 2 * np.atleast_1d(t)], axis=1))
    assert nu_curve(accel, 0.0) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        nu_curve(accel, 3.0)


def test_geodesic_validation():
    with pytest.raises(ValueError):
        TimelikeCurve.geodesic_line(2, [1.0, 2.0])
    with pytest.raises(ValueError):
        TimelikeCurve.geodesic_line(2, [-2.0, 0.0])


G = BumpFunction.standard(0.1, 0.8, (1, 2, 1))


def g_mp(t):
    return oracles.bump(t, mp.mpf("0.1"), mp.mpf("0.8"), (1, 2, 1))


def test_line_pair_reduces_to_mprime():
    for alpha, d in [(2, 4), (4, 4), (3.5, 3), (6, 2)]:
        expected = 2 ** (2 - alpha) * math.pi ** ((2 - d) / 2) / math.gamma(alpha / 2) \
            * mellin_prime(odd_part(G), alpha - d + 1)
        assert riesz_line_pair(alpha, d, g=G) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("alpha,d", [(4.5, 4), (5.2, 3), (3.3, 2), (6.0, 4)])
def test_line_pair_against_direct_geodesic(alpha, d):
    ref = float(oracles.line_pair_direct(alpha, d, g_mp, lambda t: [t] + [0] * (d - 1), lo=-0.7, hi=0.9))
    assert riesz_line_pair(alpha, d, g=G) == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("alpha,d", [(4.5, 4), (5.2, 3)])
def test_line_pair_against_direct_weighted(alpha, d):
    W = lambda x: 1 + 0.3 * x[..., 1] + 0.2 * x[..., 0] ** 2
    W_mp = lambda x: 1 + mp.mpf("0.3") * x[1] + mp.mpf("0.2") * x[0] ** 2
    v = np.array([1.0, 0.4] + [0.0] * (d - 2))
    v = v / math.sqrt(v[0] ** 2 - v[1] ** 2)
    curve = TimelikeCurve.geodesic_line(d, v)
    ref = float(oracles.line_pair_direct(alpha, d, g_mp, lambda t: [t * mp.mpf(x) for x in v], W_mp, -0.7, 0.9))
    assert riesz_line_pair(alpha, d, W, curve, G) == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("alpha,d", [(4.5, 4), (5.5, 4), (3.5, 2)])
def test_line_pair_against_direct_hyperbola(alpha, d):
    curve = TimelikeCurve.hyperbola(d)
    W = lambda x: np.exp(0.5 * x[..., 1])
    W_mp = lambda x: mp.exp(x[1] / 2)
    pos = lambda t: [mp.sinh(t), mp.cosh(t) - 1] + [0] * (d - 2)
    ref = float(oracles.line_pair_direct(alpha, d, g_mp, pos, W_mp, -0.7, 0.9))
    assert riesz_line_pair(alpha, d, W, curve, G) == pytest.approx(ref, rel=1e-6)


def test_line_pair_random_against_direct():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = int(rng.integers(2, 5))
        alpha = d + float(rng.uniform(0.2, 2.5))
        c, w, tilt = float(rng.uniform(-0.2, 0.2)), float(rng.uniform(0.5, 1.0)), float(rng.uniform(-1, 1))
        g = BumpFunction.standard(round(c, 3), round(w, 3), (1, round(tilt, 3)))
        gm = lambda t: oracles.bump(t, mp.mpf(str(round(c, 3))), mp.mpf(str(round(w, 3))),
                                    (1, mp.mpf(str(round(tilt, 3)))))
        q = float(rng.uniform(-0.5, 0.5))
        W = lambda x, q=q: 1 + q * x[..., 0]
        W_mp = lambda x, q=q: 1 + q * x[0]
        lo, hi = g.support
        ref = float(oracles.line_pair_direct(alpha, d, gm, lambda t: [t] + [0] * (d - 1), W_mp, lo, hi))
        assert riesz_line_pair(alpha, d, W, g=g) == pytest.approx(ref, rel=1e-6, abs=1e-14)


def test_plus_branch_vanishes_on_the_past():
    past = BumpFunction.standard(-0.5, 0.3, (1, 3))
    for alpha, d in [(4.5, 4), (2.0, 4), (1.5, 3), (7, 2)]:
        assert abs(riesz_line_pair(alpha, d, g=past, branch="+")) <= 1e-13
    # in d = 4, R(2) lives on the light cone and meets the line only at 0, so skip it here
    for alpha, d in [(4.5, 4), (1.5, 3), (7, 2)]:
        assert abs(riesz_line_pair(alpha, d, g=past, branch="-")) > 1e-8
    future = BumpFunction.standard(0.5, 0.3, (1, 3))
    for alpha, d in [(4.5, 4), (1.5, 3)]:
        assert abs(riesz_line_pair(alpha, d, g=future, branch="-")) <= 1e-13


def test_branches_combine_to_difference():
    for alpha, d in [(4.5, 4), (1.5, 3), (2.0, 2)]:
        plus = riesz_line_pair(alpha, d, g=G, branch="+")
        minus = riesz_line_pair(alpha, d, g=G, branch="-")
        assert riesz_line_pair(alpha, d, g=G) == pytest.approx(plus - minus, rel=1e-10)


def test_line_pair_needs_g():
    with pytest.raises(ValueError):
        riesz_line_pair(4, 4)


F = BumpFunction.canonical()


def test_resolvent_at_zero():
    for m, d in [(1, 4), (2, 3), (1, 2)]:
        assert resolvent_riesz_line(0, m, d, g=F) == pytest.approx(riesz_line_pair(2 * m, d, g=F), rel=1e-15)


def test_resolvent_second_order_remainder():
    d, m = 4, 1
    t0 = riesz_line_pair(2, d, g=F)
    t1 = riesz_line_pair(4, d, g=F)
    ratios = []
    for z in (1e-1, 1e-2, 1e-3):
        rem = resolvent_riesz_line(z, m, d, g=F) - t0 - z * t1
        ratios.append(abs(rem) / z ** 2)
    assert ratios[0] == pytest.approx(ratios[2], rel=0.05)
    assert ratios[1] == pytest.approx(ratios[2], rel=0.01)


def test_resolvent_tail_stable():
    z, m, d = 7.5 - 3j, 2, 3
    val = resolvent_riesz_line(z, m, d, g=F, tol=1e-14)
    direct = sum(math.comb(m + j - 1, j) * z ** j * riesz_line_pair(2 * j + 2 * m, d, g=F) for j in range(120))
    assert abs(val - direct) <= 1e-13 * abs(direct)


def test_resolvent_errors():
    with pytest.raises(ValueError):
        resolvent_riesz_line(1.0, 0, 4, g=F)
    with pytest.raises(ValueError):
        resolvent_riesz_line(1.0, 1, 4, TimelikeCurve.hyperbola(4), F)
    with pytest.raises(SeriesNotConvergedError):
        resolvent_riesz_line(1e6, 1, 4, g=F, max_terms=5)
