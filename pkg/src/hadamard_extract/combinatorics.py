"""Exact rational arithmetic for the binomial-matrix identities.

Everything here works over :class:`fractions.Fraction`. Values of ``M'(f)`` enter
through a callable ``mprime(x)``; in exact checks it is a :class:`Placeholders`
table that hands out distinct primes, in pipeline mode it returns floats. Powers
of pi are carried as :class:`PiPower` so they cancel without rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Mapping, Sequence, Tuple


def gbinom(alpha, beta: int):
    """Generalised binomial coefficient with integer lower argument.

    Uses the product form ``alpha (alpha-1) ... (alpha-beta+1) / beta!`` and is
    zero for negative ``beta``. Works for any numeric ``alpha`` (Fraction, float,
    complex); rational inputs give exact results, which is the continuous
    extension at negative integers.
    """
    if beta < 0:
        return 0
    num = 1
    for i in range(beta):
        num = num * (alpha - i)
    if isinstance(num, (int, Fraction)):
        return Fraction(num, math.factorial(beta))
    return num / math.factorial(beta)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# scalars


@dataclass(frozen=True)
class PiPower:
    """Exact monomial ``coeff * pi**exp`` with rational ``coeff`` and ``exp``."""

    coeff: Fraction
    exp: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeff", _frac(self.coeff))
        object.__setattr__(self, "exp", _frac(self.exp))

    def _lift(self, other) -> "PiPower":
        return other if isinstance(other, PiPower) else PiPower(_frac(other), Fraction(0))

    def __add__(self, other):
        if not isinstance(other, (int, Fraction, PiPower)):
            return float(self) + other
        other = self._lift(other)
        if other.coeff == 0:
            return self
        if self.coeff == 0:
            return other
        if other.exp != self.exp:
            raise ValueError("cannot add different powers of pi exactly")
        return PiPower(self.coeff + other.coeff, self.exp)

    __radd__ = __add__

    def __neg__(self):
        return PiPower(-self.coeff, self.exp)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (int, Fraction, PiPower)):
            return float(self) * other
        other = self._lift(other)
        return PiPower(self.coeff * other.coeff, self.exp + other.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction, PiPower)):
            return float(self) / other
        other = self._lift(other)
        if other.coeff == 0:
            raise ZeroDivisionError("division by an exact zero")
        return PiPower(self.coeff / other.coeff, self.exp - other.exp)

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return other / float(self)
        return self._lift(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, PiPower)):
            other = self._lift(other)
            if self.coeff == 0 or other.coeff == 0:
                return self.coeff == other.coeff
            return self.coeff == other.coeff and self.exp == other.exp
        return NotImplemented

    def __hash__(self):
        return hash((self.coeff, self.exp if self.coeff else 0))

    def __float__(self):
        return float(self.coeff) * math.pi ** float(self.exp)

    def __complex__(self):
        return complex(float(self))

    def __repr__(self):
        return f"PiPower({self.coeff}, {self.exp})"


def pi_power(exp) -> PiPower:
    return PiPower(Fraction(1), _frac(exp))


class Placeholders:
    """Stand-in values for ``M'(f)`` at rational points: distinct primes handed out lazily.

    Any nonzero rationals would do; distinct primes make accidental
    cancellations between different arguments impossible.
    """

    def __init__(self, zero_at: Sequence = ()):
        self.values: Dict[Fraction, Fraction] = {}
        self._next = 2
        self.zero_at = {_frac(z) for z in zero_at}

    def _prime(self) -> int:
        p = self._next
        while any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
            p += 1
        self._next = p + 1
        return p

    def __call__(self, x) -> Fraction:
        x = _frac(x)
        if x in self.zero_at:
            return Fraction(0)
        if x not in self.values:
            self.values[x] = Fraction(self._prime())
        return self.values[x]


def _checked(mprime: Callable, x):
    v = mprime(x)
    if v == 0:
        raise ZeroDivisionError(f"M'(f) vanishes at {x}; the inversion needs it nonzero")
    return v


# ---------------------------------------------------------------------------
# matrices


class RationalMatrix:
    """Dense matrix with 0-based indices; entries are any exact ring elements."""

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = [list(r) for r in rows]
        n = len(self.rows[0]) if self.rows else 0
        if any(len(r) != n for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def build(cls, n: int, entry: Callable[[int, int], object], m: int = None) -> "RationalMatrix":
        m = n if m is None else m
        return cls([[entry(i, j) for j in range(m)] for i in range(n)])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.build(n, lambda i, j: Fraction(int(i == j)))

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = 0
                for l in range(k):
                    acc = acc + self.rows[i][l] * other.rows[l][j]
                row.append(acc)
            out.append(row)
        return RationalMatrix(out)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def mismatches(self, other: "RationalMatrix") -> list:
        """Coordinates where the two matrices differ."""
        n, m = self.shape
        return [(i, j) for i in range(n) for j in range(m) if self.rows[i][j] != other.rows[i][j]]

    def __repr__(self):
        return "RationalMatrix(" + repr([[str(x) for x in r] for r in self.rows]) + ")"


def build_lemma_d_matrices(K: int, delta) -> Tuple[RationalMatrix, RationalMatrix, RationalMatrix]:
    """``A = [(-1)^(i-j) C(i,j)]``, ``B = [C(K+i-delta, j)]``, ``C = [C(K-delta, j-i)]``; ``A B = C``."""
    delta = _frac(delta)
    n = K + 1
    A = RationalMatrix.build(n, lambda i, j: (-1) ** ((i - j) % 2) * gbinom(Fraction(i), j))
    B = RationalMatrix.build(n, lambda i, j: gbinom(K + i - delta, j))
    C = RationalMatrix.build(n, lambda i, j: gbinom(K - delta, j - i))
    return A, B, C


def in1_matrix(K: int, delta) -> RationalMatrix:
    delta = _frac(delta)
    return RationalMatrix.build(K + 1, lambda i, j: gbinom(K - delta, j - i))


def in1_inverse(K: int, delta) -> RationalMatrix:
    """Inverse of ``[C(K-delta, j-i)]``, namely ``[C(delta-K, j-i)]``."""
    delta = _frac(delta)
    return RationalMatrix.build(K + 1, lambda i, j: gbinom(delta - K, j - i))


def _mp_arg(K: int, j: int, delta: Fraction) -> Fraction:
    return 2 * K + 2 * j - 2 * delta + 1


def in2_matrix(K: int, o: int, delta, mprime: Callable) -> RationalMatrix:
    """``[4^-(i+o) / (i+o)! * M'(2K+2i-2delta+1) * C(K+i-delta, j)]``."""
    delta = _frac(delta)
    return RationalMatrix.build(
        K + 1,
        lambda i, j: Fraction(1, 4 ** (i + o) * math.factorial(i + o))
        * mprime(_mp_arg(K, i, delta)) * gbinom(K + i - delta, j))


def in2_inverse(K: int, o: int, delta, mprime: Callable) -> RationalMatrix:
    """Closed-form inverse of :func:`in2_matrix`."""
    delta = _frac(delta)

    def entry(i, j):
        pref = Fraction(4 ** (j + o) * math.factorial(j + o)) / _checked(mprime, _mp_arg(K, j, delta))
        acc = Fraction(0)
        for l in range(K + 1):
            acc += (-1) ** ((l - j) % 2) * gbinom(delta - K, l - i) * gbinom(Fraction(l), j)
        return acc * pref

    return RationalMatrix.build(K + 1, entry)


def wfinal_extract(L: Mapping[int, object], K: int, o: int, delta, mprime: Callable):
    """Recover ``W_{K,0}`` from ``L[m] = L[[2K+2m-2delta+1, m+o]]``, ``m = 0..K``."""
    delta = _frac(delta)
    total = 0
    for m in range(K + 1):
        w = (Fraction(4 ** (m + o) * math.factorial(m + o)) / _checked(mprime, _mp_arg(K, m, delta))
             * gbinom(delta - K, m) * gbinom(2 * K - delta, K - m))
        if w:
            total = total + w * L[m]
    return total


def powercoeff(W: Mapping[Tuple[int, int], object], K: int, m: int, d, mprime: Callable):
    """Coefficient ``L[[2K+2m+3-d, m]]`` generated by a ``W_{l,n}`` table.

    ``d`` may be rational so that arbitrary offsets ``delta`` can be exercised.
    """
    d = _frac(d)
    arg = 2 * K + 2 * m + 3 - d
    pre = Fraction(1, 4 ** m * math.factorial(m)) * mprime(arg)
    total = 0
    for n in range(K + 1):
        w = W.get((K - n, n), 0)
        if w:
            total = total + pre * gbinom(K + m + 1 - d / 2, n) * w
    return total


def a_coeff(k: int, n: int, d, mprime: Callable) -> PiPower:
    """``pi^((2-d)/2) n! / (4^k k! (2n)!) * C(k+n+1-d/2, n) * M'(2k+2n+3-d)``."""
    d = _frac(d)
    c = (Fraction(math.factorial(n), 4 ** k * math.factorial(k) * math.factorial(2 * n))
         * gbinom(k + n + 1 - d / 2, n))
    if c == 0:
        return PiPower(Fraction(0))
    return PiPower(1, (2 - d) / 2) * c * mprime(2 * k + 2 * n + 3 - d)


@dataclass
class XiWeights:
    """Weights of the extraction functional.

    ``weights[m]`` multiplies the coefficient at s-exponent ``exponents[m]`` and
    z-power ``zpowers[m]``.
    """

    K: int
    o: int
    d: Fraction
    weights: list
    exponents: list
    zpowers: list
    mprime_values: dict = field(default_factory=dict)

    def apply(self, L: Callable[[object, int], object]):
        """Sum ``weights[m] * L(exponents[m], zpowers[m])``."""
        total = 0
        for w, e, p in zip(self.weights, self.exponents, self.zpowers):
            if w != 0:
                total = total + w * L(e, p)
        return total

    def numeric(self) -> list:
        return [float(w) if not isinstance(w, complex) else w for w in self.weights]


def xi_weights(K: int, o: int, d, mprime: Callable) -> XiWeights:
    """Weights ``C(m, K, o, d, f)`` for ``m = 0..K`` with the pi power kept exact."""
    d = _frac(d)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    weights, exps, pows, used = [], [], [], {}
    for m in range(K + 1):
        e = 2 * K + 2 * m + 2 * o - d + 3
        b = gbinom(d / 2 - 1 - o - K, m) * gbinom(2 * K + o + 1 - d / 2, K - m)
        if b == 0:
            w = PiPower(Fraction(0))
        else:
            mp = _checked(mprime, e)
            used[e] = mp
            c = Fraction(4 ** (K + m + o) * math.factorial(m + o) * math.factorial(K)) * b
            w = PiPower(1, d / 2 - 1) * c / mp
        weights.append(w)
        exps.append(e)
        pows.append(m + o)
    return XiWeights(K, o, d, weights, exps, pows, used)


def finalspec_weights(K: int, d: int, form: int, mprime: Callable) -> XiWeights:
    """The three specialised weight formulas, written out independently.

    ``form=1`` is ``o = 0``; ``form=2`` is ``o = d/2 - 1`` (even ``d``);
    ``form=3`` is ``o = d/2 - 1 - K`` with ``K < d/2`` (even ``d``).
    """
    d = _frac(d)
    h = d / 2 - 1
    if form == 1:
        ws, es, ps = [], [], []
        for m in range(K + 1):
            e = 2 * K + 2 * m - d + 3
            b = gbinom(h - K, m) * gbinom(2 * K + 1 - d / 2, K - m)
            ws.append(PiPower(1, h) * Fraction(4 ** (K + m) * math.factorial(m) * math.factorial(K))
                      * b / mprime(e) if b else PiPower(Fraction(0)))
            es.append(e)
            ps.append(m)
        return XiWeights(K, 0, d, ws, es, ps)
    if h.denominator != 1:
        raise ValueError("forms 2 and 3 need even d")
    h = int(h)
    if form == 2:
        ws, es, ps = [], [], []
        for m in range(K + 1):
            e = Fraction(2 * K + 2 * m + 1)
            b = gbinom(Fraction(-K), m) * gbinom(Fraction(2 * K), K - m)
            ws.append(PiPower(1, h) * Fraction(4 ** (K + m + h) * math.factorial(m + h) * math.factorial(K))
                      * b / mprime(e) if b else PiPower(Fraction(0)))
            es.append(e)
            ps.append(m + h)
        return XiWeights(K, h, d, ws, es, ps)
    if form == 3:
        if K > h:
            raise ValueError("form 3 needs K < d/2")
        zero = PiPower(Fraction(0))
        w0 = PiPower(Fraction(4 ** h), h) * Fraction(math.factorial(h - K) * math.factorial(K)) / mprime(1)
        ws = [w0] + [zero] * K
        es = [Fraction(2 * m + 1) for m in range(K + 1)]
        ps = [h - K + m for m in range(K + 1)]
        return XiWeights(K, h - K, d, ws, es, ps)
    raise ValueError("form must be 1, 2 or 3")
