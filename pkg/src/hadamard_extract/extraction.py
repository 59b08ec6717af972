"""Numerical recovery of ``L[[s^a z^b]]`` from samples and the full extraction pipeline.

The z-coefficients come from a trapezoid rule on a circle (exact for
polynomials of degree below the node count); the s-coefficients from a
least-squares fit of ``L / s^(3-d)`` as a polynomial in ``u = s^2`` at
Chebyshev points of ``[0, s0^2]``. The pipeline samples :func:`kg_smeared_line`, extracts the
``K + 1`` coefficients the weights need, and combines them with
:func:`xi_weights`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .combinatorics import xi_weights
from .expansion import kg_smeared_line
from .mellin import BumpFunction, check_mprime_nonzero, odd_part
from .riesz import SeriesNotConvergedError

CONDITION_LIMIT = 1e12


class PipelineError(RuntimeError):
    """A failure inside :func:`hadamard_from_green`, tagged with the stage it came from."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class IllConditionedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SGrid:
    """Sample points in ``s``.

    ``kind="geometric"`` gives ``s_i = s0 r^i``, ``i < count``. ``kind="chebyshev"``
    puts ``u = s^2`` at the Chebyshev points of ``[0, s0^2]`` (``ratio`` unused),
    which keeps the polynomial fit in ``u`` well conditioned.
    """

    s0: float = 4.0
    ratio: float = 0.75
    count: int = 32
    kind: str = "chebyshev"

    def __post_init__(self):
        if not (self.s0 > 0 and 0 < self.ratio < 1 and self.count >= 1):
            raise ValueError("need s0 > 0, 0 < ratio < 1 and count >= 1")
        if self.kind not in ("geometric", "chebyshev"):
            raise ValueError("kind must be 'geometric' or 'chebyshev'")

    @property
    def points(self) -> np.ndarray:
        if self.kind == "geometric":
            return self.s0 * self.ratio ** np.arange(self.count)
        theta = (np.arange(self.count) + 0.5) * np.pi / self.count
        return self.s0 * np.sqrt((1 + np.cos(theta)) / 2)


@dataclass(frozen=True)
class ZContour:
    """Circle ``|z| = radius`` with ``nodes`` equispaced points."""

    radius: float
    nodes: int = 32

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.nodes < 1 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes must be a power of two")

    @property
    def points(self) -> np.ndarray:
        return self.radius * np.exp(2j * np.pi * np.arange(self.nodes) / self.nodes)


def extract_z_coeffs(sampler: Callable, contour: ZContour, maxpow: int) -> np.ndarray:
    """Taylor coefficients ``0..maxpow`` of ``sampler`` at ``z = 0``."""
    if maxpow >= contour.nodes:
        raise ValueError("the contour needs more nodes than the highest requested power")
    vals = np.array([complex(sampler(z)) for z in contour.points])
    return _coeffs_from_values(vals, contour.radius, maxpow)


def _coeffs_from_values(vals: np.ndarray, radius: float, maxpow: int) -> np.ndarray:
    c = np.fft.fft(vals) / len(vals)
    return c[: maxpow + 1] / radius ** np.arange(maxpow + 1)


@dataclass
class SFit:
    coeffs: np.ndarray
    condition: float
    residual: float
    exponents: list = field(default_factory=list)


def fit_s_series(samples: Sequence, d: int, count: int, start: int = 0, guards: int = 2) -> SFit:
    """Least-squares fit of ``sum_j a_j s^(2j + 3 - d)`` for ``j >= start``.

    The samples are divided by ``s^(2 start + 3 - d)`` and fitted by a
    polynomial in ``u = s^2`` of ``count + guards`` terms, written in the
    Chebyshev basis of ``[0, max u]``; the guard terms absorb the truncated
    tail and are discarded. The returned coefficients are the Taylor
    coefficients of the fit at ``u = 0``.
    """
    s = np.array([float(p[0]) for p in samples])
    v = np.array([complex(p[1]) for p in samples])
    n = count + guards
    if count < 1:
        return SFit(np.zeros(0, dtype=complex), 1.0, 0.0, [])
    if len(s) < n:
        raise ValueError(f"{len(s)} samples cannot determine {n} coefficients")
    if np.any(s <= 0):
        raise ValueError("s samples must be positive")
    base = 2 * start + 3 - d
    y = v / s ** base
    u = s * s
    top = float(u.max())
    A = cheb.chebvander(2 * u / top - 1, n - 1)
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    cond = float(np.linalg.cond(A))
    if cond > CONDITION_LIMIT:
        warnings.warn(f"s-fit condition number {cond:.2e} exceeds {CONDITION_LIMIT:.0e}",
                      IllConditionedWarning, stacklevel=2)
    series = cheb.Chebyshev(sol, domain=[0.0, top])
    coeffs = np.array([series.deriv(j)(0.0) / math.factorial(j) if j else series(0.0)
                       for j in range(count)])
    resid = float(np.linalg.norm(A @ sol - y) / max(np.linalg.norm(y), 1e-300))
    return SFit(coeffs, cond, resid, [base + 2 * j for j in range(count)])


def extract_s_coeffs(samples: Sequence, d: int, count: int, start: int = 0, guards: int = 2) -> np.ndarray:
    """Coefficients of ``s^(2j + 3 - d)`` for ``j = start, ..., start + count - 1``."""
    return fit_s_series(samples, d, count, start, guards).coeffs


# ---------------------------------------------------------------------------
# the pipeline


@dataclass(frozen=True)
class PipelineGrid:
    """Sampling parameters of :func:`hadamard_from_green`.

    The z^p coefficient at a given ``s`` is read off a circle of radius
    ``z_scale (p + 1)^growth / s^2``. In ``L(s, z)`` the z^k term behaves
    roughly like ``(|z| s^2)^k / (k!)^2``, so scaling the radius with ``1/s^2``
    keeps the relative size of the powers on the circle independent of ``s``.
    """

    s_grid: SGrid = SGrid()
    z_nodes: int = 32
    z_scale: float = 40.0
    growth: float = 0.0
    fit_terms: int = 12

    def radius(self, s: float, p: int) -> float:
        return self.z_scale * (p + 1) ** self.growth / s ** 2


@lru_cache(maxsize=256)
def _z_column(c: complex, d: int, f: BumpFunction, grid: PipelineGrid, p: int) -> tuple:
    """Samples ``(s_i, L(s_i, .)[[z^p]])``; cached per oracle, grid and power."""
    out = []
    for s in grid.s_grid.points:
        contour = ZContour(grid.radius(s, p), grid.z_nodes)
        try:
            vals = np.array([kg_smeared_line(c, z, d, f, s) for z in contour.points])
        except SeriesNotConvergedError as exc:
            raise PipelineError("sampling", f"s = {s:.6g}: {exc}") from exc
        out.append((float(s), complex(_coeffs_from_values(vals, contour.radius, p)[p])))
    return tuple(out)


@dataclass
class ExtractionReport:
    value: complex
    reference: Optional[complex]
    coefficients: dict
    weights: list
    conditions: list
    residuals: list

    @property
    def relative_error(self) -> Optional[float]:
        if self.reference is None:
            return None
        ref = abs(self.reference)
        return abs(self.value - self.reference) / (ref if ref else 1.0)


def hadamard_report(c, K: int, o: int, d: int, f: BumpFunction,
                    grid: Optional[PipelineGrid] = None) -> ExtractionReport:
    """Run the pipeline and keep the intermediate coefficients and diagnostics."""
    grid = grid or PipelineGrid()
    if K < 0 or o < 0:
        raise ValueError("K and o must be non-negative")
    c = complex(c)
    g = odd_part(f)
    exps = [2 * K + 2 * m + 2 * o - d + 3 for m in range(K + 1)]
    try:
        mp_vals = check_mprime_nonzero(g, sorted(set(exps)))
    except ValueError as exc:
        raise PipelineError("mprime", str(exc)) from exc
    try:
        weights = xi_weights(K, o, d, lambda x: mp_vals[int(x)])
    except ZeroDivisionError as exc:
        raise PipelineError("weights", str(exc)) from exc
    if K + o >= grid.z_nodes // 2:
        raise PipelineError("z-extraction", "the z contour has too few nodes for the requested powers")
    coeffs, conds, resids = {}, [], []
    total = 0j
    for m, w in enumerate(weights.weights):
        p = m + o
        samples = _z_column(c, d, g, grid, p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IllConditionedWarning)
            try:
                fit = fit_s_series(samples, d, K + 1, start=p, guards=max(2, grid.fit_terms - K - 1))
            except (ValueError, np.linalg.LinAlgError) as exc:
                raise PipelineError("s-extraction", str(exc)) from exc
        if fit.condition > CONDITION_LIMIT:
            raise PipelineError("s-extraction", f"condition number {fit.condition:.2e} for z-power {p}")
        conds.append(fit.condition)
        resids.append(fit.residual)
        coef = complex(fit.coeffs[K])
        coeffs[(exps[m], p)] = coef
        total += complex(float(w)) * coef
    ref = c ** K if K else 1.0
    val = total.real if c.imag == 0 else total
    return ExtractionReport(val, ref, coeffs, weights.numeric(), conds, resids)


def hadamard_from_green(c, K: int, o: int, d: int, f: BumpFunction,
                        grid: Optional[PipelineGrid] = None):
    """Estimate ``V^K`` of ``box - c`` from sampled line pairings of its resolvent."""
    return hadamard_report(c, K, o, d, f, grid).value
