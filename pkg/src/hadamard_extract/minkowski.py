"""Minkowski-space primitives and the windowed Fourier cancellation check.

Vectors are plain numpy arrays with the time component first; the bilinear form
is ``eta(x, y) = -x0 y0 + sum_i xi yi`` and ``gamma(x) = -eta(x, x)`` is positive
on timelike vectors. All functions accept stacks of vectors along the leading
axes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class CausalClass(enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


def lorentz_vector(components: Sequence[float]) -> np.ndarray:
    """Validate and return a vector of dimension at least 2."""
    x = np.asarray(components, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("a Lorentz vector needs at least two components")
    if not np.all(np.isfinite(x)):
        raise ValueError("components must be finite")
    return x


def eta(x, y) -> np.ndarray:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def gamma(x) -> np.ndarray:
    """``x0^2 - sum_i xi^2``."""
    x = np.asarray(x, dtype=float)
    return x[..., 0] ** 2 - np.sum(x[..., 1:] ** 2, axis=-1)


def classify(x, atol: float = 0.0) -> CausalClass:
    x = np.asarray(x, dtype=float)
    g = float(gamma(x))
    if not np.any(x):
        return CausalClass.SPACELIKE
    if g > atol:
        return CausalClass.TIMELIKE
    if abs(g) <= atol:
        return CausalClass.LIGHTLIKE
    return CausalClass.SPACELIKE


# ---------------------------------------------------------------------------
# reflection through a spacelike direction


def _spatial_frame(xi: np.ndarray) -> np.ndarray:
    """Unit spatial vector along the spatial part of ``xi``."""
    sp = xi[1:]
    n = np.linalg.norm(sp)
    return sp / n


def reflection_vector(xi) -> np.ndarray:
    """The vector ``y`` with ``<y, xi> = 1`` whose reflection preserves ``gamma``.

    ``xi`` is written as ``cos(theta) e0 + sin(theta) n`` with ``n`` a spatial
    unit vector; then ``y = R(e0 - tan(2 theta) e1)`` where ``R`` rotates the
    ``(e0, e1)`` plane onto the ``(e0, n)`` plane taking ``e0`` to ``xi``.
    """
    xi = lorentz_vector(xi)
    if abs(np.linalg.norm(xi) - 1) > 1e-12:
        raise ValueError("xi must have Euclidean norm 1")
    if gamma(xi) >= 0:
        raise ValueError("xi must be spacelike")
    c, s = xi[0], np.linalg.norm(xi[1:])
    cos2, sin2 = c * c - s * s, 2 * s * c
    if abs(cos2) < 1e-8:
        raise ValueError("xi is too close to the light cone (|cos 2theta| < 1e-8)")
    t = sin2 / cos2
    y = np.zeros_like(xi)
    y[0] = c + s * t
    y[1:] = (s - c * t) * _spatial_frame(xi)
    return y


def reflect(xi, x) -> np.ndarray:
    """``O(x) = 2 <x, xi> y - x`` with ``y`` from :func:`reflection_vector`."""
    y = reflection_vector(xi)
    x = np.asarray(x, dtype=float)
    return 2 * (x @ np.asarray(xi, dtype=float))[..., None] * y - x


def reflection_matrix(xi) -> np.ndarray:
    y = reflection_vector(xi)
    return 2 * np.outer(y, xi) - np.eye(len(y))


# ---------------------------------------------------------------------------
# cutoffs


def smooth_step(x) -> np.ndarray:
    """0 for ``x <= 0``, 1 for ``x >= 1``, smooth in between."""
    x = np.asarray(x, dtype=float)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Plateau:
    """Even cutoff equal to 1 on ``[0, inner]`` and 0 beyond ``outer``."""

    inner: float
    outer: float

    def __call__(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        return smooth_step((self.outer - r) / (self.outer - self.inner))


@dataclass
class XiCutoff:
    """Cutoff ``psi(x) = chi(<x, xi>) phi(|x - <x, xi> y|)`` invariant under the reflection."""

    xi: np.ndarray
    y_xi: np.ndarray = field(init=False)
    C: float = field(init=False)
    chi: Plateau = field(init=False)
    phi: Plateau = field(init=False)

    def __post_init__(self):
        self.xi = lorentz_vector(self.xi)
        self.y_xi = reflection_vector(self.xi)
        self.C = float(np.linalg.norm(self.y_xi))
        self.chi = Plateau(1.0, 2.0)
        self.phi = Plateau(self.C + 1, self.C + 2)

    @property
    def radius(self) -> float:
        """Euclidean radius of a ball containing the support."""
        return 3 * self.C + 2


def xi_cutoff_eval(cut: XiCutoff, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    p = x @ cut.xi
    rest = x - p[..., None] * cut.y_xi
    return cut.chi(p) * cut.phi(np.linalg.norm(rest, axis=-1))


# ---------------------------------------------------------------------------
# windowed Fourier transform


@dataclass
class WindowedFourierResult:
    lambdas: np.ndarray
    values: np.ndarray
    error_estimate: float
    converged: bool
    panels: int

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def _orthonormal_complement(xi: np.ndarray) -> np.ndarray:
    """Columns form a Euclidean orthonormal basis of ``xi``'s orthogonal complement."""
    q, _ = np.linalg.qr(np.column_stack([xi, np.eye(len(xi))]))
    return q[:, 1:len(xi)]


def _gauss_panels(a: float, b: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    return (mid[:, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


def _fourier_once(profile, y, basis, lambdas, d, panels, order, window, u_radius, symmetric=True):
    t, wt = _gauss_panels(-2.0, 2.0, panels, order)
    # an asymmetric rule pairs no node with its mirror image u -> -u, so any
    # cancellation it shows is a property of the integral, not of the rule
    shift = 0.0 if symmetric else (math.sqrt(2) - 1) * 2 * u_radius / panels
    u, wu = _gauss_panels(-u_radius - shift, u_radius, panels, order)
    if d == 2:
        U, W = u[:, None], wu
    elif d == 3:
        U = np.stack(np.meshgrid(u, u, indexing="ij"), axis=-1).reshape(-1, 2)
        W = np.outer(wu, wu).ravel()
    else:
        raise ValueError("windowed_fourier supports d in {2, 3}")
    W = W * window.phi_u(np.linalg.norm(U, axis=-1))
    keep = W != 0
    pts = U[keep] @ basis.T
    gU, x0U, W = gamma(pts), pts[:, 0], W[keep]
    # 2 t eta(y, B u) vanishes for the true reflection vector but not for an override
    cross = -2 * eta(y, pts)
    g_y = float(gamma(y))
    chi_t = window.chi_t(t)
    inner = np.zeros(len(t))
    if np.max(np.abs(cross), initial=0.0) > 1e-12 * (1 + np.max(np.abs(gU), initial=0.0)):
        for i in np.flatnonzero(chi_t):
            f = profile(t[i] * t[i] * g_y + t[i] * cross + gU) * np.sign(t[i] * y[0] + x0U)
            inner[i] = f @ W
        inner *= chi_t * wt
        return np.exp(-1j * np.outer(lambdas, t)) @ inner
    # sorted by gamma, the nodes inside the profile's support form one slice per t
    idx = np.argsort(gU, kind="stable")
    gU, x0U, W = gU[idx], x0U[idx], W[idx]
    lo, hi = getattr(profile, "support", (-math.inf, math.inf))
    for i in np.flatnonzero(chi_t):
        base = t[i] * t[i] * g_y
        a, b = np.searchsorted(gU, lo - base, "left"), np.searchsorted(gU, hi - base, "right")
        if a < b:
            f = profile(base + gU[a:b]) * np.sign(t[i] * y[0] + x0U[a:b])
            inner[i] = f @ W[a:b]
    inner *= chi_t * wt
    return np.exp(-1j * np.outer(lambdas, t)) @ inner


class _Window:
    def __init__(self, chi, phi):
        self.chi_t, self.phi_u = chi, phi


def windowed_fourier(profile, xi, lambdas: Sequence[float], d: int, tol: float = 1e-10,
                     y_override: Optional[np.ndarray] = None, order: int = 16,
                     max_panels: int = 160, symmetric: bool = True) -> WindowedFourierResult:
    """Fourier transform of ``psi sigma profile(gamma)`` at ``lambda * xi``.

    The integral is taken in coordinates ``x = t y + B u`` with ``B`` an
    orthonormal basis of the complement of ``xi``; the Jacobian is ``<y, xi> = 1``,
    ``<x, xi> = t`` and ``gamma(x) = t^2 gamma(y) + gamma(B u)``. Composite Gauss
    rules are refined by growing the panel count 1.5-fold until two successive results
    differ by less than ``tol``.

    For timelike ``xi = e0`` the cutoff degenerates to the plain product
    ``chi(x0) phi(|x_spatial|)``, which is the control case. ``y_override``
    replaces the reflection vector, for checks that a wrong ``y`` breaks the
    cancellation.
    """
    xi = lorentz_vector(xi)
    if len(xi) != d:
        raise ValueError("xi has the wrong dimension")
    lambdas = np.asarray(lambdas, dtype=float)
    if gamma(xi) < 0:
        y = reflection_vector(xi) if y_override is None else np.asarray(y_override, dtype=float)
        C = float(np.linalg.norm(reflection_vector(xi)))
    else:
        if np.linalg.norm(xi - np.eye(d)[0]) > 1e-12:
            raise ValueError("only spacelike xi or the control xi = e0 are supported")
        y = xi.copy() if y_override is None else np.asarray(y_override, dtype=float)
        C = 1.0
    basis = _orthonormal_complement(xi)
    chi, phi = Plateau(1.0, 2.0), Plateau(C + 1, C + 2)
    window = _Window(chi, phi)
    if lambdas.size == 0:
        return WindowedFourierResult(lambdas, np.zeros(0, dtype=complex), 0.0, True, 0)
    panels = 2
    prev = _fourier_once(profile, y, basis, lambdas, d, panels, order, window, C + 2, symmetric)
    err = math.inf
    while panels < max_panels:
        panels = (3 * panels + 1) // 2
        cur = _fourier_once(profile, y, basis, lambdas, d, panels, order, window, C + 2, symmetric)
        err = float(np.max(np.abs(cur - prev)))
        prev = cur
        if err < tol:
            return WindowedFourierResult(lambdas, cur, err, True, panels)
    return WindowedFourierResult(lambdas, prev, err, False, panels)
