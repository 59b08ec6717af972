"""Hadamard-coefficient algebra and the flat Klein-Gordon model expansion.

For ``P = box - c`` on Minkowski space the diagonal Hadamard coefficients are
``V^k = c^k``, and the smeared causal propagator of ``P - z`` along the time
axis is the convergent series

    L(s, z) = sum_k (c + z)^k R(2k + 2)[f_s]
            = sum_k (c + z)^k pi^((2-d)/2) / (4^k k!) M'(f)(2k + 3 - d) s^(2k + 3 - d).

:func:`kg_smeared_line` evaluates the first line through the Riesz line
pairings; :func:`assemble_L` builds the second from a table ``W_{l,n}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Mapping, Optional, Tuple

from .combinatorics import PiPower, gbinom
from .mellin import BumpFunction, mellin_prime, odd_part
from .riesz import TensorBump, TimelikeCurve, resolvent_riesz_line, riesz_line_pair, riesz_pair


def _exact(x):
    """Keep ints and Fractions exact; everything else stays numeric."""
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class HadamardTable:
    """Diagonal Hadamard coefficients ``V^0, ..., V^Kmax`` at the base point."""

    values: tuple
    operator: str = ""

    def __post_init__(self):
        if not self.values:
            raise ValueError("a Hadamard table needs at least V^0")
        if self.values[0] != 1:
            raise ValueError("V^0 must equal 1")

    @property
    def kmax(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int):
        return self.values[k]


def vz_shift(V: HadamardTable, z, k: int):
    """Coefficient ``V^k(z) = sum_m C(k, m) z^m V^(k-m)`` of the shifted operator ``P - z``."""
    if k > V.kmax:
        raise ValueError(f"k = {k} exceeds the table length {V.kmax}")
    z = _exact(z)
    return sum(math.comb(k, m) * z ** m * V[k - m] for m in range(k + 1))


def shifted_table(V: HadamardTable, z) -> HadamardTable:
    z = _exact(z)
    return HadamardTable(tuple(vz_shift(V, z, k) for k in range(V.kmax + 1)), f"{V.operator} - ({z})")


def flat_hadamard(c, kmax: int) -> HadamardTable:
    """Table of ``box - c`` on Minkowski space: ``V^k = c^k``."""
    c = _exact(c)
    return HadamardTable(tuple(c ** k if k else Fraction(1) for k in range(kmax + 1)), f"box - ({c})")


# ---------------------------------------------------------------------------
# bivariate expansions


@dataclass
class BivariateExpansion:
    """Sparse coefficients ``L[[s-exponent, z-power]]`` with s-exponents ``2j + 3 - d``."""

    d: object
    entries: Dict[Tuple[Fraction, int], object] = field(default_factory=dict)

    def _key(self, sexp, zpow) -> Tuple[Fraction, int]:
        e = Fraction(sexp)
        j2 = e - 3 + Fraction(self.d)
        if j2 < 0 or j2.denominator != 1 or j2.numerator % 2:
            raise KeyError(f"s-exponent {sexp} is off the grid 2j + 3 - d")
        if zpow < 0:
            raise KeyError("negative z-power")
        return (e, int(zpow))

    def __getitem__(self, key):
        return self.entries.get(self._key(*key), 0)

    def add(self, sexp, zpow, value):
        k = self._key(sexp, zpow)
        prev = self.entries.get(k)
        self.entries[k] = value if prev is None else prev + value

    def coefficient(self, sexp, zpow):
        """Same as indexing; usable as the ``L`` callable of :meth:`XiWeights.apply`."""
        return self[sexp, zpow]

    def evaluate(self, s: float, z: complex) -> complex:
        total = 0j
        for (e, p), v in self.entries.items():
            total += complex(v) * s ** float(e) * complex(z) ** p
        return total

    def __len__(self):
        return len(self.entries)


def assemble_L(W: Mapping[Tuple[int, int], object], d, mprime: Callable, cutoff: int = 12) -> BivariateExpansion:
    """Collect ``sum 4^-m/m! C(l+m+n+1-d/2, n) z^m W_{l,n} M'(2l+2m+2n+3-d) s^(2l+2m+2n+3-d)``.

    Terms with ``l + m + n > cutoff`` are dropped.
    """
    d = _exact(d)
    out = BivariateExpansion(d)
    for (l, n), w in W.items():
        if not w:
            continue
        for m in range(cutoff - l - n + 1):
            j = l + m + n
            e = 2 * j + 3 - d
            b = gbinom(j + 1 - Fraction(d) / 2, n)
            if b == 0:
                continue
            coef = Fraction(1, 4 ** m * math.factorial(m)) * b
            out.add(e, m, coef * w * mprime(e))
    return out


def flat_W(V: HadamardTable, d) -> Dict[Tuple[int, int], PiPower]:
    """``W_{l,0} = pi^((2-d)/2) V^l / (4^l l!)``; all ``n > 0`` entries vanish on flat space."""
    d = _exact(d)
    return {(l, 0): PiPower(Fraction(1), (2 - Fraction(d)) / 2) * (_exact(v) * Fraction(1, 4 ** l * math.factorial(l)))
            for l, v in enumerate(V.values)}


def numeric_mprime(f: BumpFunction) -> Callable:
    """``x -> M'(f)(x)`` with memoisation, for use as ``mprime`` in numeric mode."""
    cache: dict = {}
    g = odd_part(f)

    def mp(x):
        x = float(x)
        if x not in cache:
            cache[x] = mellin_prime(g, x)
        return cache[x]

    return mp


# ---------------------------------------------------------------------------
# the Klein-Gordon oracle


def kg_smeared_line(c, z, d: int, f: BumpFunction, s: float, tol: float = 1e-15) -> complex:
    """``L(s, z)`` for ``P = box - c``: the resolvent line pairing of ``P - z`` against ``f(./s)``."""
    if s <= 0:
        raise ValueError("s must be positive")
    return resolvent_riesz_line(complex(c) + complex(z), 1, d, TimelikeCurve.geodesic_line(d),
                                f.scale(s), tol=tol)


def kg_series_term(k: int, c, z, d: int, mprime: Callable, s: float) -> complex:
    """Term ``k`` of the closed-form series, using the scaling law for ``f_s``."""
    e = 2 * k + 3 - d
    return ((complex(c) + complex(z)) ** k * math.pi ** ((2 - d) / 2)
            / (4 ** k * math.factorial(k)) * mprime(e) * s ** e)


def kg_series(c, z, d: int, mprime: Callable, s: float, tol: float = 1e-16, max_terms: int = 400) -> complex:
    """Closed-form series summed until three consecutive terms are below ``tol`` relative."""
    total, small = 0j, 0
    for k in range(max_terms):
        t = kg_series_term(k, c, z, d, mprime, s)
        total += t
        small = small + 1 if abs(t) <= tol * max(abs(total), 1e-300) else 0
        if small >= 3:
            return total
    raise RuntimeError("closed-form series did not converge")


# ---------------------------------------------------------------------------
# finite Riesz sums for negative powers


def power_kernel_pair(c, mneg: int, phi: TensorBump, d: int, rule=None) -> Tuple[complex, float]:
    """``sum_k C(k+m-1, k) c^k R(2k + 2m)[phi]`` for ``m < 0`` and the value ``((box - c)^|m| phi)(0)``."""
    if mneg >= 0:
        raise ValueError("mneg must be negative")
    if mneg < -3:
        raise ValueError("|mneg| > 3 is not supported")
    c = _exact(c)
    total = 0.0
    for k in range(-mneg + 1):
        coef = gbinom(Fraction(k + mneg - 1), k)
        if coef == 0:
            continue
        total += float(coef) * complex(c) ** k * riesz_pair(2 * k + 2 * mneg, d, phi, rule=rule)
    oracle = float(phi.box_power([[0.0] * d], -mneg, float(c))[0])
    total = complex(total)
    return (total.real if total.imag == 0 else total), oracle


# ---------------------------------------------------------------------------
# small-k formula and the powers-versus-resolvent proposition


def smallk_value(L, k: int, d: int, mprime: Callable):
    """``V^k`` from the single coefficient ``L[[1, d/2 - 1 - k]]`` (even ``d``, ``k < d/2``)."""
    if d % 2:
        raise ValueError("the small-k formula needs even d")
    h = d // 2 - 1
    if not 0 <= k <= h:
        raise ValueError("the small-k formula needs 0 <= k < d/2")
    coef = L[Fraction(1), h - k] if isinstance(L, BivariateExpansion) else L(Fraction(1), h - k)
    pre = PiPower(Fraction(4 ** h * math.factorial(h - k) * math.factorial(k)), h) / mprime(1)
    return pre * coef


def scalar_curvature(L, mprime: Callable):
    """Scalar curvature at the base point for the wave operator in ``d = 4``: ``6 V^1``."""
    return 6 * smallk_value(L, 1, 4, mprime)


def powers_vs_resolvent_check(c, j: int, m: int, d: int, f: BumpFunction) -> Tuple[complex, complex]:
    """Coefficient of ``s^(2j+3-d) z^m`` in two ways.

    The left value comes from the collected series of the resolvent; the right
    one collects the same s-power from ``sum_k C(m+k, m) c^k R(2k+2m+2)[f_s]``,
    the pairing of the ``(m+1)``-st power of the Green's operator.
    """
    mp = numeric_mprime(f)
    L = assemble_L(flat_W(flat_hadamard(c, j), d), d, mp, cutoff=j)
    left = complex(L[2 * j + 3 - d, m])
    right = 0j
    c = complex(_exact(c))
    for k in range(j + 1):
        if 2 * k + 2 * m + 3 - d == 2 * j + 3 - d:
            # f_s contributes s^(alpha - d + 1); at s = 1 the pairing is the coefficient
            right += math.comb(m + k, m) * c ** k * complex(riesz_line_pair(2 * k + 2 * m + 2, d, g=f))
    return left, right
