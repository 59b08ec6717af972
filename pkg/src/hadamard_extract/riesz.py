"""Riesz distributions on Minkowski space.

For ``Re(alpha) > d`` the advanced Riesz distribution is the function
``c_alpha gamma(x)^((alpha - d)/2)`` on the closed future cone; the retarded
one lives on the past cone and ``R = R_+ - R_-``. Smaller ``alpha`` are reached
through ``R(alpha)[phi] = R(alpha + 2k)[box^k phi]`` with the wave operator
``box = d0^2 - sum_i di^2``.

Along a timelike curve the pulled-back pairing reduces to a modified Mellin
transform, which is what :func:`riesz_line_pair` evaluates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .combinatorics import gbinom
from .mellin import (BumpFunction, ChebyshevFunction, ProductFunction, mellin_prime,
                     odd_part, rgamma)
from .minkowski import gamma

BRANCHES = ("+", "-", "difference")


class SeriesNotConvergedError(RuntimeError):
    pass


def c_alpha(alpha, d: int) -> complex:
    """``2^(1-alpha) pi^((2-d)/2) / (Gamma(alpha/2) Gamma((alpha-d+2)/2))``."""
    a = complex(alpha)
    val = (2.0 ** (1 - a) * math.pi ** ((2 - d) / 2)
           * complex(rgamma(a / 2)) * complex(rgamma((a - d + 2) / 2)))
    return val.real if np.isrealobj(alpha) else val


def riesz_pointwise(alpha, d: int, x, branch: str = "+"):
    """Riesz function at ``x`` in the regime ``Re(alpha) > d``."""
    if complex(alpha).real <= d:
        raise ValueError("the pointwise formula needs Re(alpha) > d")
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    x = np.asarray(x, dtype=float)
    g = gamma(x)
    causal = g >= 0
    t = x[..., 0]
    if branch == "+":
        mask = causal & (t >= 0)
        sign = 1.0
    elif branch == "-":
        mask = causal & (t <= 0)
        sign = 1.0
    else:
        mask = causal
        sign = np.sign(t)
    val = c_alpha(alpha, d) * np.where(mask, np.abs(g), 0.0) ** ((alpha - d) / 2)
    return np.where(mask, sign * val, 0.0)


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TensorBump:
    """``phi(x) = prod_i f_i(x_i)`` with one 1-d bump per coordinate."""

    factors: tuple

    @property
    def d(self) -> int:
        return len(self.factors)

    def partial(self, x, orders: Sequence[int]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[:-1])
        for i, (f, n) in enumerate(zip(self.factors, orders)):
            out = out * f.derivative(x[..., i], n)
        return out

    def __call__(self, x) -> np.ndarray:
        return self.partial(x, [0] * self.d)

    def box_terms(self, k: int) -> list:
        """``box^k`` as a list of ``(coefficient, derivative orders)``."""
        terms = []

        def rec(prefix, left, slots):
            if slots == 1:
                comp = prefix + [left]
                coef = math.factorial(k)
                for a in comp:
                    coef //= math.factorial(a)
                coef *= (-1) ** sum(comp[1:])
                terms.append((coef, [2 * a for a in comp]))
                return
            for a in range(left + 1):
                rec(prefix + [a], left - a, slots - 1)

        rec([], k, self.d)
        return terms

    def box_power(self, x, k: int, c: complex = 0.0) -> np.ndarray:
        """``((box - c)^k phi)(x)``."""
        x = np.asarray(x, dtype=float)
        inside = np.ones(x.shape[:-1], dtype=bool)
        for i, f in enumerate(self.factors):
            lo, hi = f.support
            inside &= (x[..., i] > lo) & (x[..., i] < hi)
        xs = x[inside]
        orders = range(0, 2 * k + 1, 2)
        tables = []
        for i, f in enumerate(self.factors):
            col = xs[:, i]
            if col.size and col.min() == col.max():
                # constant coordinate (the time axis on a cone slice)
                tables.append({n: v[0] for n, v in f.derivatives(col[:1], orders).items()})
            else:
                tables.append(f.derivatives(col, orders))

        out = 0.0
        for j in range(k + 1):
            pre = math.comb(k, j) * (-c) ** (k - j)
            if pre == 0:
                continue
            for coef, orders in self.box_terms(j):
                term = pre * coef
                for i, n in enumerate(orders):
                    term = term * tables[i][n]
                out = out + term
        full = np.zeros(x.shape[:-1], dtype=np.result_type(out, float))
        full[inside] = out
        return full

    @property
    def time_support(self) -> tuple:
        return self.factors[0].support


TEST_SHARPNESS = 6


def random_test_function(rng: np.random.Generator, d: int, sharpness=TEST_SHARPNESS) -> TensorBump:
    """Tensor bump with a random center, width and linear tilt on each axis.

    The spatial factors are wider than the time support, so every cone slice
    ``|x| <= t`` stays inside the spatial plateau and the only steep region the
    quadrature meets is the upper end of the time factor. A sharpness above 1
    moves the mass away from the support edges, where high derivatives of the
    plain bump are hard to integrate; each factor is of order one at its center.
    """
    factors = []
    amp = Fraction(math.exp(sharpness)).limit_denominator(1000)
    for axis in range(d):
        c = rng.uniform(-0.2, 0.2)
        w = rng.uniform(0.8, 1.2) if axis == 0 else rng.uniform(2.6, 3.4)
        tilt = Fraction(int(rng.integers(-500, 501)), 1000)
        factors.append(BumpFunction.standard(round(c, 3), round(w, 3), (amp, amp * tilt), sharpness))
    return TensorBump(tuple(factors))


# ---------------------------------------------------------------------------
# distributional pairing


def _jacobi_panel(a: float, b: float, n: int, left_pow: float = 0.0, right_pow: float = 0.0):
    """Nodes and weights for ``int_a^b (x-a)^left_pow (b-x)^right_pow g(x) dx``."""
    x, w = roots_jacobi(n, right_pow, left_pow)
    h = (b - a) / 2
    return a + h * (1 + x), w * h ** (1 + left_pow + right_pow)


def _panel_rule(a: float, b: float, panels: int, n: int, left_pow: float, right_pow: float,
                grading: float = 0.0):
    """Composite rule with the algebraic end weights folded into the end panels.

    Returns nodes and weights for ``int_a^b (x-a)^left_pow (b-x)^right_pow g(x) dx``.
    A ``grading`` ratio in (0, 1) shrinks the panels geometrically toward ``b``.
    """
    if grading:
        edges = np.append(b - (b - a) * grading ** np.arange(panels), b)
    else:
        edges = np.linspace(a, b, panels + 1)
    xs, ws = [], []
    for p in range(panels):
        lo, hi = edges[p], edges[p + 1]
        lp = left_pow if p == 0 else 0.0
        rp = right_pow if p == panels - 1 else 0.0
        x, w = _jacobi_panel(lo, hi, n, lp, rp)
        if p != 0:
            w = w * (x - a) ** left_pow
        if p != panels - 1:
            w = w * (b - x) ** right_pow
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _sphere_rule(d: int, n: int):
    """Nodes on S^(d-2) and weights summing to its area."""
    if d == 2:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 3:
        m = 2 * n
        a = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(a), np.sin(a)], axis=1), np.full(m, 2 * np.pi / m)
    if d == 4:
        ct, wt = np.polynomial.legendre.leggauss(n)
        m = 2 * n
        ph = 2 * np.pi * np.arange(m) / m
        st = np.sqrt(1 - ct ** 2)
        pts = np.stack([np.outer(st, np.cos(ph)), np.outer(st, np.sin(ph)),
                        np.outer(ct, np.ones(m))], axis=-1).reshape(-1, 3)
        return pts, np.outer(wt, np.full(m, 2 * np.pi / m)).ravel()
    raise ValueError("the cone quadrature supports d in {2, 3, 4}")


@dataclass(frozen=True)
class ConeRule:
    """Resolution of the cone quadrature."""

    t_panels: int = 4
    w_panels: int = 4
    order: int = 16
    sphere: int = 24
    t_grading: float = 0.0


# tuned on the default test functions: k-step reductions up to k = 5 agree to
# ~1e-9 relative; the t panels shrink toward the steep end of the time factor
DEFAULT_RULES = {2: ConeRule(8, 8, 16, 1, 0.5), 3: ConeRule(8, 3, 16, 24, 0.5), 4: ConeRule(8, 2, 16, 12, 0.5)}


def _cone_integral(beta: complex, d: int, func: Callable, T: float, rule: ConeRule) -> complex:
    """``c_beta int_{future cone, t <= T} gamma^((beta-d)/2) func(x) dx``.

    Coordinates ``x = (t, t sqrt(w) omega)`` turn the cone into
    ``[0, T] x [0, 1] x S^(d-2)`` with measure
    ``t^(beta-1) (1-w)^((beta-d)/2) w^((d-3)/2) dt dw domega / 2``; the algebraic
    factors are absorbed into Gauss-Jacobi end panels.
    """
    if T <= 0:
        return 0j
    b = complex(beta)
    expo = (b - d) / 2
    t, wt = _panel_rule(0.0, T, rule.t_panels, rule.order, b.real - 1, 0.0, rule.t_grading)
    w, ww = _panel_rule(0.0, 1.0, rule.w_panels, rule.order, (d - 3) / 2, expo.real)
    if b.imag:
        wt = wt * t ** (1j * b.imag)
        ww = ww * (1 - w) ** (1j * expo.imag)
    om, wo = _sphere_rule(d, rule.sphere)
    total = 0j
    rad = np.sqrt(w)
    for ti, wti in zip(t, wt):
        pts = np.empty((len(w), len(om), d))
        pts[..., 0] = ti
        pts[..., 1:] = ti * rad[:, None, None] * om[None, :, :]
        vals = func(pts)
        total += wti * (ww @ (vals @ wo))
    return c_alpha(b, d) * total / 2


def riesz_pair(alpha, d: int, phi: TensorBump, branch: str = "+", extra: int = 0,
               rule: Optional[ConeRule] = None) -> complex:
    """``R(alpha)[phi]`` by reduction to ``R(alpha + 2k)[box^k phi]``.

    The Riesz function is locally integrable once ``Re(alpha) + 2k > d - 2``, and
    the cone quadrature absorbs the algebraic singularity on the light cone, so
    the smallest such ``k`` is used. ``extra`` adds further reduction steps.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    if phi.d != d:
        raise ValueError("test function has the wrong dimension")
    rule = rule or DEFAULT_RULES.get(d, ConeRule())
    a = complex(alpha)
    k = max(0, math.floor((d - 2 - a.real) / 2) + 1) + extra
    beta = a + 2 * k
    lo, hi = phi.time_support

    def future(x):
        return phi.box_power(x, k)

    def past(x):
        x = x.copy()
        x[..., 0] *= -1
        return phi.box_power(x, k)

    val = 0j
    if branch in ("+", "difference"):
        val += _cone_integral(beta, d, future, hi, rule)
    if branch in ("-", "difference"):
        minus = _cone_integral(beta, d, past, -lo, rule)
        val = val - minus if branch == "difference" else val + minus
    return val.real if np.isrealobj(alpha) else val


# ---------------------------------------------------------------------------
# timelike curves


class TimelikeCurve:
    """Future-directed timelike curve ``w`` with ``w(0)`` the base point.

    ``position`` maps an array of parameters of shape ``(n,)`` to ``(n, d)``.
    ``nu`` optionally supplies ``gamma(w(t) - w(0)) / t^2`` in closed form.
    """

    def __init__(self, d: int, position: Callable, velocity: Callable, geodesic: bool = False,
                 unit_speed: bool = False, domain: tuple = (-math.inf, math.inf),
                 nu: Optional[Callable] = None):
        self.d = d
        self.position = position
        self.velocity = velocity
        self.geodesic = geodesic
        self.unit_speed = unit_speed
        self.domain = domain
        self._nu = nu

    @classmethod
    def geodesic_line(cls, d: int, velocity: Optional[Sequence[float]] = None) -> "TimelikeCurve":
        """Straight line through the origin with unit-speed timelike velocity."""
        v = np.eye(d)[0] if velocity is None else np.asarray(velocity, dtype=float)
        g = float(gamma(v))
        if g <= 0 or v[0] <= 0:
            raise ValueError("velocity must be future-directed timelike")
        v = v / math.sqrt(g)
        return cls(d, lambda t: np.outer(np.atleast_1d(t), v), lambda t: np.outer(np.atleast_1d(t) * 0 + 1, v),
                   geodesic=True, unit_speed=True, nu=lambda t: np.ones_like(np.asarray(t, dtype=float)))

    @classmethod
    def hyperbola(cls, d: int, accel: float = 1.0) -> "TimelikeCurve":
        """Unit-speed uniformly accelerated curve in the ``(x0, x1)`` plane."""
        a = float(accel)

        def pos(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.zeros((t.size, d))
            out[:, 0] = np.sinh(a * t) / a
            out[:, 1] = (np.cosh(a * t) - 1) / a
            return out

        def vel(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.zeros((t.size, d))
            out[:, 0] = np.cosh(a * t)
            out[:, 1] = np.sinh(a * t)
            return out

        def nu(t):
            t = np.asarray(t, dtype=float)
            x = a * t / 2
            safe = np.where(x == 0, 1.0, x)
            return np.where(x == 0, 1.0, (np.sinh(safe) / safe) ** 2)

        return cls(d, pos, vel, geodesic=False, unit_speed=True, nu=nu)


def nu_curve(w: TimelikeCurve, t):
    """``gamma(w(t) - w(0)) / t^2``, continued by ``gamma(w'(0))`` at ``t = 0``."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t_arr)
    zero = t_arr == 0
    if np.any(zero):
        out[zero] = float(gamma(w.velocity(0.0)[0]))
    nz = ~zero
    if np.any(nz):
        chord = w.position(t_arr[nz]) - w.position(0.0)[0]
        out[nz] = gamma(chord) / t_arr[nz] ** 2
    if np.any(out <= 0):
        raise ValueError("curve chord is not timelike")
    return float(out[0]) if np.ndim(t) == 0 else out


def _nu_fast(w: TimelikeCurve, t):
    return w._nu(t) if w._nu is not None else nu_curve(w, t)


def _line_prefactor(alpha: complex, d: int) -> complex:
    return 2.0 ** (2 - alpha) * math.pi ** ((2 - d) / 2) * complex(rgamma(alpha / 2))


@lru_cache(maxsize=200_000)
def _plain_line_pair(alpha: complex, d: int, g: BumpFunction) -> complex:
    return _line_prefactor(alpha, d) * complex(mellin_prime(odd_part(g), alpha - d + 1))


def riesz_line_pair(alpha, d: int, W: Optional[Callable] = None, w: Optional[TimelikeCurve] = None,
                    g=None, branch: str = "difference") -> complex:
    """Riesz distribution pulled back to a timelike curve, weighted by ``W`` and paired with ``g``.

    Evaluates ``2^(2-alpha) pi^((2-d)/2) / Gamma(alpha/2) * M'((nu^((alpha-d)/2) (W o w) g)_odd)(alpha-d+1)``.
    The one-sided branches use ``M'`` of the product itself (``+``) or of its
    reflection (``-``) with half the prefactor. ``W = None`` means ``W = 1``.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    if g is None:
        raise ValueError("a test function g is required")
    a = complex(alpha)
    w = w or TimelikeCurve.geodesic_line(d)
    plain = W is None and w.geodesic and w.unit_speed and isinstance(g, BumpFunction)
    if plain and branch == "difference":
        val = _plain_line_pair(a, d, g)
    else:
        if plain:
            h = g
        else:
            lo, hi = g.support
            p = (a - d) / 2

            def weight(t):
                base = _nu_fast(w, t) ** p
                if W is not None:
                    base = base * np.asarray(W(w.position(t)))
                return np.real_if_close(base)

            h = ProductFunction(ChebyshevFunction(weight, (lo, hi)), g)
        if branch == "difference":
            val = _line_prefactor(a, d) * complex(mellin_prime(odd_part(h), a - d + 1))
        else:
            target = h if branch == "+" else (g.reflect() if h is g else h.reflect())
            val = _line_prefactor(a, d) / 2 * complex(mellin_prime(target, a - d + 1))
    return val.real if np.isrealobj(alpha) else val


def _line_pair_bound(alpha: float, d: int, sup_norm: float, b: float) -> float:
    """Bound on ``|riesz_line_pair(alpha)|`` for W = 1 on a unit-speed geodesic, valid when ``alpha - d + 1 > 0``."""
    beta = alpha - d + 1
    return (abs(_line_prefactor(alpha, d)) * sup_norm * b ** beta
            / (beta * math.gamma((beta + 1) / 2)))


def resolvent_riesz_line(z, m: int, d: int, w: Optional[TimelikeCurve] = None, g=None,
                         tol: float = 1e-15, max_terms: int = 500) -> complex:
    """Resolvent Riesz distribution of order ``2m`` paired along a unit-speed geodesic.

    Sums ``sum_j C(m+j-1, j) z^j riesz_line_pair(2j + 2m)`` until three
    consecutive tail bounds fall below ``tol`` times the running sum.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    w = w or TimelikeCurve.geodesic_line(d)
    if not (w.geodesic and w.unit_speed):
        raise ValueError("the resolvent series is implemented along unit-speed geodesics")
    z = complex(z)
    lo, hi = g.support
    b = max(abs(lo), abs(hi))
    ts = np.linspace(lo, hi, 2001)
    sup = float(np.max(np.abs(g(ts)))) * 1.05 + 1e-300
    total = 0j
    small = 0
    for j in range(max_terms):
        alpha = 2 * j + 2 * m
        coef = gbinom(m + j - 1, j)
        zj = z ** j
        if zj != 0 or j == 0:
            total += float(coef) * zj * complex(riesz_line_pair(alpha, d, None, w, g))
        if alpha - d + 1 > 0:
            bound = abs(float(coef)) * abs(zj) * _line_pair_bound(alpha, d, sup, b)
            small = small + 1 if bound <= tol * max(abs(total), 1e-300) else 0
            if small >= 3:
                return total
    raise SeriesNotConvergedError(f"resolvent series did not converge in {max_terms} terms")
