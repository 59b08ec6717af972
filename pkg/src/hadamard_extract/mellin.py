"""Mellin transforms of compactly supported smooth profiles.

The transform ``M(f)(alpha) = int_0^inf f(t) t^(alpha-1) dt`` of a function in
C_c^inf(R) is holomorphic for ``Re(alpha) > 0`` and continues meromorphically to
the whole plane, with simple poles at ``0, -1, -2, ...`` and residue
``f^(k)(0)/k!`` at ``-k``. Two continuation routes are implemented:

* integration by parts, ``M(f)(alpha) = (-1)^n M(f^(n))(alpha + n) / (alpha)_n``,
  which works for any smooth ``f`` but loses accuracy for large ``n`` because
  high derivatives of a bump are huge near the edges of its support;
* for bumps, splitting ``(0, tau)`` off and integrating the Taylor series there
  term by term, which is exact in ``alpha`` and needs no derivatives at all.

Dividing by ``Gamma((alpha + 1)/2)`` gives the modified transform ``M'``,
which is entire for odd ``f``.

Functions are passed around through a small duck-typed protocol:

* ``support`` -- closed interval ``(lo, hi)`` outside of which the function vanishes
* ``parity`` -- ``"odd"``, ``"even"`` or ``None``
* ``derivative(t, order)`` -- vectorised evaluation of the ``order``-th derivative
* ``reflect()`` -- the function ``t -> f(-t)``

:class:`BumpFunction` implements it exactly with closed-form derivatives; the
wrapper classes at the bottom cover sampled and composite functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as npoly
from scipy import integrate, special

from .combinatorics import gbinom

# Distance to a pole below which the Laurent expansion replaces the quotient.
POLE_WINDOW = 1e-6

_QUAD_OPTS = dict(epsabs=1e-15, epsrel=1e-13, limit=400)


class UncancelledPoleError(ArithmeticError):
    """M' was requested at a pole of M that Gamma((alpha+1)/2) does not cancel."""


# ---------------------------------------------------------------------------
# reciprocal Gamma


def rgamma(u):
    """Entire reciprocal Gamma function ``1/Gamma(u)``.

    Wraps :func:`scipy.special.rgamma`. For ``Re(u) < 1/2`` the value is
    rebuilt from ``1/Gamma(delta - j) = delta (delta-1) ... (delta-j) / Gamma(1+delta)``
    so that the zeros at non-positive integers are exact and their
    neighbourhoods keep full relative accuracy.
    """
    scalar = np.ndim(u) == 0
    z = np.atleast_1d(np.asarray(u))
    out = special.rgamma(z)
    left = z.real < 0.5
    if np.any(left):
        zl = z[left]
        j = np.rint(-zl.real).astype(int)
        j = np.maximum(j, 0)
        delta = zl + j
        prod = delta * special.rgamma(1 + delta)
        for i in range(1, int(j.max()) + 1):
            active = j >= i
            prod = np.where(active, prod * (delta - i), prod)
        out = out.astype(prod.dtype) if out.dtype != prod.dtype else out
        out[left] = prod
    return out[0] if scalar else out


def _poch(a: complex, n: int) -> complex:
    out = 1.0 + 0j
    for i in range(n):
        out *= a + i
    return out


# ---------------------------------------------------------------------------
# exact bump derivatives


def _poly_deriv(p: tuple) -> tuple:
    return tuple(i * c for i, c in enumerate(p))[1:] or (Fraction(0),)


def _poly_mul(p: tuple, q: tuple) -> tuple:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return tuple(out)


def _poly_add(*ps: tuple) -> tuple:
    n = max(len(p) for p in ps)
    out = [Fraction(0)] * n
    for p in ps:
        for i, c in enumerate(p):
            out[i] += c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


_ONE_MINUS_U2_SQ = (Fraction(1), Fraction(0), Fraction(-2), Fraction(0), Fraction(1))


@lru_cache(maxsize=None)
def _bump_numerator(coeffs: tuple, order: int, sharpness=1) -> tuple:
    """Numerator N_n with d^n/du^n [P(u) e^{-a/(1-u^2)}] = N_n(u) e^{-a/(1-u^2)} / (1-u^2)^(2n)."""
    if order == 0:
        return coeffs
    prev = _bump_numerator(coeffs, order - 1, sharpness)
    n = order - 1
    a = _poly_mul(_poly_deriv(prev), _ONE_MINUS_U2_SQ)
    b = _poly_mul(prev, (Fraction(0), Fraction(4 * n), Fraction(0), Fraction(-4 * n)))
    c = _poly_mul(prev, (Fraction(0), -2 * Fraction(sharpness)))
    return _poly_add(a, b, c)


@lru_cache(maxsize=None)
def _float_numerator(coeffs: tuple, order: int, sharpness=1) -> np.ndarray:
    return np.array([float(c) for c in _bump_numerator(coeffs, order, sharpness)])


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class BumpTerm:
    """``P((t - center)/width) * exp(-a/(1 - u^2))`` on ``|u| < 1``, ``a`` the sharpness."""

    center: float
    width: float
    coeffs: tuple
    sharpness: Fraction = Fraction(1)

    def derivative(self, t: np.ndarray, order: int) -> np.ndarray:
        u = (t - self.center) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        if np.any(inside):
            ui = u[inside]
            v = 1.0 - ui * ui
            num = npoly.polyval(ui, _float_numerator(self.coeffs, order, self.sharpness))
            out[inside] = num * np.exp(-float(self.sharpness) / v - 2 * order * np.log(v))
        return out * self.width ** (-order)

    def derivatives(self, t: np.ndarray, orders) -> dict:
        """Several derivative orders at once, sharing the exponential factor."""
        u = (t - self.center) / self.width
        inside = np.abs(u) < 1
        ui = u[inside]
        v = 1.0 - ui * ui
        base = np.exp(-float(self.sharpness) / v)
        inv = 1.0 / (v * v)
        out = {}
        for n in orders:
            vals = np.zeros_like(u)
            num = npoly.polyval(ui, _float_numerator(self.coeffs, n, self.sharpness))
            vals[inside] = num * base * inv ** n
            out[n] = vals * self.width ** (-n)
        return out

    def analytic(self, t: np.ndarray) -> np.ndarray:
        """The defining formula continued to complex ``t`` (valid near the real interior)."""
        u = (t - self.center) / self.width
        coeffs = _float_numerator(self.coeffs, 0)
        return npoly.polyval(u, coeffs) * np.exp(-float(self.sharpness) / (1.0 - u * u))


class BumpFunction:
    """Finite sum of polynomial-weighted standard bumps.

    Every term is ``P((t - c)/w) exp(-a/(1 - ((t - c)/w)^2))`` with an exact
    rational polynomial ``P`` and rational sharpness ``a`` (1 unless stated). Derivatives of any order come from a closed
    recurrence on the numerator polynomial, so they are exact up to the final
    floating-point evaluation.
    """

    def __init__(self, terms: Sequence[BumpTerm] = (), parity: Optional[str] = None):
        merged: dict = {}
        for term in terms:
            key = (float(term.center), float(term.width), _as_fraction(term.sharpness))
            if key[1] <= 0:
                raise ValueError("bump width must be positive")
            prev = merged.get(key, (Fraction(0),))
            merged[key] = _poly_add(prev, tuple(_as_fraction(c) for c in term.coeffs))
        self.terms = tuple(
            BumpTerm(c, w, p, a) for (c, w, a), p in sorted(merged.items()) if any(p)
        )
        self._parity = parity
        self._taylor = None

    # constructors
    @classmethod
    def canonical(cls) -> "BumpFunction":
        """``t exp(-1/(1 - t^2))`` on ``(-1, 1)``."""
        return cls([BumpTerm(0.0, 1.0, (Fraction(0), Fraction(1)))])

    @classmethod
    def perturbed(cls, eps) -> "BumpFunction":
        """``t (1 + eps t^2) exp(-1/(1 - t^2))``, the fallback odd family."""
        e = _as_fraction(eps)
        return cls([BumpTerm(0.0, 1.0, (Fraction(0), Fraction(1), Fraction(0), e))])

    @classmethod
    def standard(cls, center: float = 0.0, width: float = 1.0, coeffs=(1,),
                 sharpness=1) -> "BumpFunction":
        return cls([BumpTerm(center, width, tuple(_as_fraction(c) for c in coeffs),
                             _as_fraction(sharpness))])

    # protocol
    @property
    def support(self) -> tuple:
        if not self.terms:
            return (0.0, 0.0)
        return (min(t.center - t.width for t in self.terms),
                max(t.center + t.width for t in self.terms))

    @property
    def parity(self) -> Optional[str]:
        if self._parity is not None:
            return self._parity
        if not self.terms:
            return "odd"
        r = self.reflect()
        if r.terms == self.terms:
            return "even"
        if r.terms == (-self).terms:
            return "odd"
        return None

    def derivative(self, t, order: int = 0):
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        tt = np.asarray(t, dtype=float)
        flat = np.atleast_1d(tt).ravel()
        out = np.zeros_like(flat)
        for term in self.terms:
            out += term.derivative(flat, order)
        out = out.reshape(np.shape(tt))
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self.derivative(t, 0)

    def derivatives(self, t, orders) -> dict:
        """``{n: f^(n)(t)}`` for every ``n`` in ``orders``."""
        flat = np.asarray(t, dtype=float).ravel()
        out = {n: np.zeros_like(flat) for n in orders}
        for term in self.terms:
            for n, v in term.derivatives(flat, orders).items():
                out[n] += v
        return {n: v.reshape(np.shape(t)) for n, v in out.items()}

    def taylor_at_zero(self, nodes: int = 128) -> tuple:
        """Taylor coefficients ``a_j = f^(j)(0)/j!`` and a radius ``tau`` where the series is safe.

        The coefficients come from the Cauchy integral on a circle of radius
        ``0.7 R`` (``R`` = distance from 0 to the nearest support edge),
        discretised by the FFT; ``tau = 0.35 R`` keeps the truncated series
        accurate to rounding level.
        """
        if self._taylor is None:
            active = [t for t in self.terms if abs(t.center) < t.width]
            edges = [abs(t.center) - t.width if abs(t.center) >= t.width else t.width - abs(t.center)
                     for t in self.terms]
            R = min(edges) if edges else 1.0
            r = 0.7 * R
            z = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
            vals = np.zeros(nodes, dtype=complex)
            for term in active:
                vals += term.analytic(z)
            coef = (np.fft.fft(vals) / nodes).real[: nodes // 2] / r ** np.arange(nodes // 2)
            par = self.parity
            if par == "odd":
                coef[0::2] = 0.0
            elif par == "even":
                coef[1::2] = 0.0
            self._taylor = (coef, 0.35 * R)
        return self._taylor

    def reflect(self) -> "BumpFunction":
        terms = [BumpTerm(-t.center + 0.0, t.width,
                          tuple(c if i % 2 == 0 else -c for i, c in enumerate(t.coeffs)),
                          t.sharpness)
                 for t in self.terms]
        flip = {"odd": "odd", "even": "even"}.get(self._parity) if self._parity else None
        return BumpFunction(terms, flip)

    def scale(self, s: float) -> "BumpFunction":
        """``t -> f(t/s)``."""
        if s <= 0:
            raise ValueError("scale factor must be positive")
        return BumpFunction([BumpTerm(t.center * s, t.width * s, t.coeffs, t.sharpness) for t in self.terms],
                            self._parity)

    # arithmetic
    def __add__(self, other: "BumpFunction") -> "BumpFunction":
        return BumpFunction(self.terms + other.terms)

    def __neg__(self) -> "BumpFunction":
        return self * -1

    def __sub__(self, other: "BumpFunction") -> "BumpFunction":
        return self + (-other)

    def __mul__(self, k) -> "BumpFunction":
        k = _as_fraction(k)
        return BumpFunction([BumpTerm(t.center, t.width, tuple(k * c for c in t.coeffs), t.sharpness)
                             for t in self.terms], self._parity)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, BumpFunction) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        parts = [f"({t.center:g}, {t.width:g}, {[str(c) for c in t.coeffs]}"
                 + (f", a={t.sharpness})" if t.sharpness != 1 else ")") for t in self.terms]
        return f"BumpFunction([{', '.join(parts)}])"


def eval_bump(f: BumpFunction, t, order: int = 0):
    """Value of ``f^(order)`` at ``t``; zero outside the support."""
    return f.derivative(t, order)


def scale(f: BumpFunction, s: float) -> BumpFunction:
    return f.scale(s)


# ---------------------------------------------------------------------------
# generic wrappers for the function protocol


class ChebyshevFunction:
    """Chebyshev interpolant of a smooth callable on a closed interval.

    The degree is doubled until the trailing coefficients fall below ``tol``
    relative to the largest one. Outside the interval the function reads as zero,
    so it is only meaningful as a factor of something supported inside.
    """

    def __init__(self, func: Callable, interval: tuple, tol: float = 1e-15, max_degree: int = 1024):
        a, b = float(interval[0]), float(interval[1])
        self.interval = (a, b)
        deg = 32
        while True:
            series = cheb.Chebyshev.interpolate(func, deg, domain=[a, b])
            c = np.abs(series.coef)
            scale_ = max(c.max(), 1e-300)
            if c[-4:].max() <= tol * scale_ or deg >= max_degree:
                break
            deg *= 2
        self.series = series
        self._derivs = {0: series}
        self.parity = None

    @property
    def support(self) -> tuple:
        return self.interval

    def derivative(self, t, order: int = 0):
        if order not in self._derivs:
            self._derivs[order] = self.series.deriv(order)
        tt = np.asarray(t, dtype=float)
        a, b = self.interval
        inside = (tt >= a) & (tt <= b)
        out = np.where(inside, self._derivs[order](np.clip(tt, a, b)), 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, t):
        return self.derivative(t, 0)


class ProductFunction:
    """Pointwise product; derivatives by the Leibniz rule."""

    def __init__(self, a, b):
        self.a, self.b = a, b
        pa, pb = a.support, b.support
        lo, hi = max(pa[0], pb[0]), min(pa[1], pb[1])
        self._support = (lo, max(lo, hi))
        if a.parity and b.parity:
            self.parity = "even" if a.parity == b.parity else "odd"
        else:
            self.parity = None

    @property
    def support(self) -> tuple:
        return self._support

    def derivative(self, t, order: int = 0):
        out = 0.0
        for k in range(order + 1):
            out = out + math.comb(order, k) * self.a.derivative(t, k) * self.b.derivative(t, order - k)
        return out

    def __call__(self, t):
        return self.derivative(t, 0)

    def reflect(self):
        return ProductFunction(_reflect(self.a), _reflect(self.b))


class _Reflected:
    def __init__(self, f):
        self.f = f
        lo, hi = f.support
        self.support = (-hi, -lo)
        self.parity = f.parity

    def derivative(self, t, order: int = 0):
        return (-1) ** order * self.f.derivative(-np.asarray(t, dtype=float), order)

    def __call__(self, t):
        return self.derivative(t, 0)

    def reflect(self):
        return self.f


def _reflect(f):
    return f.reflect() if hasattr(f, "reflect") else _Reflected(f)


class ParityPart:
    """``(f(t) +- f(-t))/2`` of an arbitrary protocol function."""

    def __init__(self, f, parity: str):
        if parity not in ("odd", "even"):
            raise ValueError("parity must be 'odd' or 'even'")
        self.f = f
        self.parity = parity
        lo, hi = f.support
        r = max(abs(lo), abs(hi))
        self.support = (-r, r)

    def derivative(self, t, order: int = 0):
        t = np.asarray(t, dtype=float)
        sign = -1 if self.parity == "odd" else 1
        return 0.5 * (self.f.derivative(t, order) + sign * (-1) ** order * self.f.derivative(-t, order))

    def __call__(self, t):
        return self.derivative(t, 0)

    def reflect(self):
        return self if self.parity == "even" else ScaledValue(self, -1)


class ScaledValue:
    """Constant multiple of a protocol function."""

    def __init__(self, f, k):
        self.f, self.k = f, k
        self.support = f.support
        self.parity = f.parity

    def derivative(self, t, order: int = 0):
        return self.k * self.f.derivative(t, order)

    def __call__(self, t):
        return self.derivative(t, 0)

    def reflect(self):
        return ScaledValue(_reflect(self.f), self.k)


def odd_part(f):
    """``(f(t) - f(-t))/2``, flagged odd."""
    if isinstance(f, BumpFunction):
        g = (f - f.reflect()) * Fraction(1, 2)
        return BumpFunction(g.terms, "odd")
    return ParityPart(f, "odd")


def even_part(f):
    """``(f(t) + f(-t))/2``, flagged even."""
    if isinstance(f, BumpFunction):
        g = (f + f.reflect()) * Fraction(1, 2)
        return BumpFunction(g.terms, "even")
    return ParityPart(f, "even")


# ---------------------------------------------------------------------------
# transforms


@dataclass(frozen=True)
class MeroValue:
    """Value of a meromorphic function at a point.

    ``kind`` is ``"finite"`` (``value`` set) or ``"pole"`` (``residue`` set and
    ``finite_part`` holding the constant Laurent coefficient).
    """

    kind: str
    location: complex
    value: Optional[complex] = None
    residue: Optional[complex] = None
    finite_part: Optional[complex] = None

    @property
    def is_pole(self) -> bool:
        return self.kind == "pole"


def _quad_complex(func: Callable, a: float, b: float, **kw) -> complex:
    re = integrate.quad(lambda t: np.real(func(t)), a, b, **_QUAD_OPTS, **kw)[0]
    im = integrate.quad(lambda t: np.imag(func(t)), a, b, **_QUAD_OPTS, **kw)[0]
    return complex(re, im)


def _moment(f, order: int, beta: complex) -> complex:
    """``int_0^inf f^(order)(t) t^(beta-1) dt`` for ``Re(beta) > 0``."""
    lo, hi = f.support
    if hi <= 0:
        return 0j
    a = max(lo, 0.0)
    g = lambda t: f.derivative(t, order)
    if beta.imag == 0:
        b = beta.real
        gx = lambda x: g(hi * x) * hi
        if a > 0:
            val = integrate.quad(lambda x: gx(x) * x ** (b - 1), a / hi, 1.0, **_QUAD_OPTS)[0]
        else:
            val = integrate.quad(gx, 0.0, 1.0, weight="alg", wvar=(b - 1, 0.0), **_QUAD_OPTS)[0]
        return complex(val) * hi ** (b - 1)
    if a > 0:
        return _quad_complex(lambda t: g(t) * t ** (beta - 1), a, hi)
    # t = exp(-x): smooth, exponentially decaying integrand; Taylor tail beyond x_max
    x0, x_max = -math.log(hi), 40.0
    val = _quad_complex(lambda x: g(math.exp(-x)) * np.exp(-beta * x), x0, x_max)
    for j in range(3):
        cj = f.derivative(0.0, order + j) / math.factorial(j)
        val += cj * np.exp(-(beta + j) * x_max) / (beta + j)
    return complex(val)


def _log_moment(f, order: int, power: int) -> float:
    """``int_0^inf f^(order)(t) log(t)^power dt``."""
    lo, hi = f.support
    if hi <= 0:
        return 0.0
    a = max(lo, 0.0)
    g = lambda t: f.derivative(t, order)
    if power == 1 and a == 0:
        return integrate.quad(g, 0.0, hi, weight="alg-loga", wvar=(0.0, 0.0), **_QUAD_OPTS)[0]
    return integrate.quad(lambda t: g(t) * math.log(t) ** power, a, hi, **_QUAD_OPTS)[0]


def _real_if_real(alpha, value: complex):
    if isinstance(alpha, (int, float, Fraction, np.integer, np.floating)):
        return float(value.real)
    return value


def mellin(f, alpha) -> complex:
    """Mellin transform by direct quadrature; requires ``Re(alpha) > 0``."""
    a = complex(alpha)
    if a.real <= 0:
        raise ValueError("direct Mellin transform needs Re(alpha) > 0; use mellin_continued")
    return _real_if_real(alpha, _moment(f, 0, a))


def _removable(f, k: int) -> bool:
    p = getattr(f, "parity", None)
    return (p == "odd" and k % 2 == 0) or (p == "even" and k % 2 == 1)


# -- Taylor-split continuation (bump functions) ------------------------------
#
# M(f)(alpha) = sum_j a_j tau^(j+alpha)/(j+alpha) + int_tau^hi f(t) t^(alpha-1) dt
#
# The sum is the continuation of the integral over (0, tau); its j-th term
# carries the pole at -j with residue a_j.


def _uses_split(f) -> bool:
    if not hasattr(f, "taylor_at_zero"):
        return False
    lo, hi = f.support
    return hi > 0 and f.taylor_at_zero()[1] > 1e-3 * (hi - lo)


def _outer_integral(f, tau: float, a: complex) -> complex:
    lo, hi = f.support
    lo = max(lo, tau)
    if hi <= lo:
        return 0j
    # substitute t = hi x so that absolute tolerances do not depend on the scale of f
    if a.imag == 0:
        b = a.real
        val = integrate.quad(lambda x: f(hi * x) * x ** (b - 1), lo / hi, 1.0, **_QUAD_OPTS)[0]
        return complex(val) * hi ** b
    return _quad_complex(lambda x: f(hi * x) * x ** (a - 1), lo / hi, 1.0) * hi ** a


def _split_rest(f, a: complex, skip: Optional[int]) -> complex:
    coef, tau = f.taylor_at_zero()
    total = _outer_integral(f, tau, a)
    for j, c in enumerate(coef):
        if c != 0 and j != skip:
            total += c * tau ** (j + a) / (j + a)
    return total


# -- integration-by-parts continuation (generic functions) --------------------


def _laurent_ibp(f, k: int) -> tuple:
    """Residue and the next two Laurent coefficients of M(f) at ``-k``."""
    n = k + 1
    sgn = (-1) ** n
    n0 = sgn * _moment(f, n, 1 + 0j).real
    n1 = sgn * _log_moment(f, n, 1)
    n2 = sgn * _log_moment(f, n, 2) / 2
    roots = [i - k for i in range(k)]
    e0 = float(math.prod(roots)) if roots else 1.0
    e1 = sum(1.0 / r for r in roots)
    e2 = sum(1.0 / (roots[i] * roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots)))
    r = n0 / e0
    c0 = (n1 - n0 * e1) / e0
    c1 = (n2 - n1 * e1 + n0 * (e1 * e1 - e2)) / e0
    if _removable(f, k):
        r = 0.0
    return r, c0, c1


def _pole_data(f, k: int, eps: complex) -> tuple:
    """``(residue, regular)`` with ``M(f)(-k + eps) = residue * g(eps)/eps + regular``.

    ``g(eps) = tau^eps`` on the split path and ``1`` on the generic path.
    """
    if _uses_split(f):
        coef, tau = f.taylor_at_zero()
        r = 0.0 if _removable(f, k) or k >= len(coef) else float(coef[k])
        return r, _split_rest(f, -k + eps, k), tau ** eps
    r, c0, c1 = _laurent_ibp(f, k)
    return r, c0 + c1 * eps, 1.0


def mellin_continued(f, alpha, shift: Optional[int] = None) -> MeroValue:
    """Meromorphically continued Mellin transform.

    Bump functions are continued by splitting off a convergent Taylor series
    near the origin; other protocol functions by repeated integration by parts,
    with the Laurent expansion inside ``POLE_WINDOW`` of a pole. ``shift``
    forces the integration-by-parts route with that many steps.
    """
    a = complex(alpha)
    if shift is not None:
        val = (-1) ** shift * _moment(f, shift, a + shift) / _poch(a, shift)
        return MeroValue("finite", a, value=complex(val))
    k = -round(a.real)
    split = _uses_split(f)
    if k >= 0 and (a + k == 0 or (not split and abs(a + k) < POLE_WINDOW)):
        eps = a + k
        r, rest, g = _pole_data(f, k, eps)
        if eps == 0:
            if r != 0:
                lg = math.log(f.taylor_at_zero()[1]) if split else 0.0
                return MeroValue("pole", complex(-k), residue=complex(r),
                                 finite_part=complex(rest + r * lg))
            return MeroValue("finite", a, value=complex(rest))
        return MeroValue("finite", a, value=complex(r * g / eps + rest))
    if split:
        return MeroValue("finite", a, value=_split_rest(f, a, None))
    if a.real > 0:
        return MeroValue("finite", a, value=_moment(f, 0, a))
    n = math.ceil(1 - a.real)
    val = (-1) ** n * _moment(f, n, a + n) / _poch(a, n)
    return MeroValue("finite", a, value=complex(val))


def mellin_residue(f, k: int) -> complex:
    """Residue of M(f) at ``-k`` as produced by the continuation."""
    return complex(_pole_data(f, k, 0j)[0])


def mellin_prime(f, alpha):
    """``M'(f)(alpha) = M(f)(alpha) / Gamma((alpha + 1)/2)``."""
    a = complex(alpha)
    k = -round(a.real)
    if k >= 1 and k % 2 == 1 and (abs(a + k) < POLE_WINDOW or (_uses_split(f) and abs(a + k) < 0.5)):
        # M ~ r g/eps and 1/Gamma((alpha+1)/2) = (eps/2) prod(eps/2 - i) / Gamma(1 + eps/2)
        j = (k - 1) // 2
        eps = a + k
        r, rest, g = _pole_data(f, k, eps)
        half = eps / 2
        q = complex(rgamma(1 + half)) * math.prod(half - i for i in range(1, j + 1))
        return _real_if_real(alpha, complex((r * g + eps * rest) / 2 * q))
    mv = mellin_continued(f, a)
    if mv.is_pole:
        raise UncancelledPoleError(
            f"M(f) has a pole at {mv.location.real:g} with residue {mv.residue.real:.3g} "
            "that Gamma((alpha+1)/2) does not cancel")
    return _real_if_real(alpha, mv.value * complex(rgamma((a + 1) / 2)))


def msexp_sum(h_derivs: Sequence, f, alpha, N: int, s: float) -> complex:
    """Truncated small-``s`` expansion of ``M'((h f_s)_odd)(alpha)`` for odd ``f``.

    ``h_derivs[k]`` is ``h^(2k)(0)``.
    """
    a = complex(alpha)
    total = 0j
    for k in range(N + 1):
        hk = h_derivs[k] if k < len(h_derivs) else 0.0
        if hk == 0:
            continue
        coef = math.factorial(k) / math.factorial(2 * k) * gbinom((a + 2 * k - 1) / 2, k)
        total += coef * hk * complex(mellin_prime(f, a + 2 * k)) * s ** (a + 2 * k)
    return _real_if_real(alpha, total)


def check_mprime_nonzero(f, arguments: Sequence, floor: float = 1e-12) -> dict:
    """Evaluate ``M'(f)`` at the given points and fail loudly on a vanishing value."""
    values = {}
    for x in arguments:
        v = mellin_prime(f, x)
        if abs(v) < floor:
            raise ValueError(
                f"M'(f)({x}) = {v:.3g} is numerically zero; the extraction weights divide by it. "
                "Try the perturbed family t(1 + eps t^2) exp(-1/(1 - t^2)).")
        values[x] = v
    return values
