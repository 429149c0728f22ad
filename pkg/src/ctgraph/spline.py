"""Natural cubic smoothing splines with analytic derivatives.

Fits, per dimension, the minimizer of

    sum_i (y_i - s(t_i))^2 + p * integral (s''(u))^2 du

over natural cubic splines with knots at the observation times (second
derivative zero at the boundary knots).  Following Green & Silverman, with
band matrices Q (second-difference operator) and R (overlap of B-spline
second derivatives), the knot second derivatives gamma solve

    (R + p Q'Q) gamma = Q'y,        fitted values  g = y - p Q gamma,

a pentadiagonal symmetric positive-definite system solved in O(n).  With
``p = 0`` this is the natural interpolating spline; as ``p`` grows the fit
tends to the least-squares straight line.  The roughness integral equals
``gamma' R gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .exceptions import OutOfRangeError, TooFewPointsError

_GCV_GRID = np.logspace(-9.0, 9.0, 37)


def _band_system(t: np.ndarray):
    """Column entries of Q and the symmetric banded forms of R and Q'Q.

    Returns ``(a, b, c, R_ab, QtQ_ab)`` where column ``i`` of Q has entries
    ``a[i], b[i], c[i]`` in rows ``i, i+1, i+2``, and the ``*_ab`` arrays are
    in scipy upper banded storage.
    """
    h = np.diff(t)
    m = len(t) - 2
    a = 1.0 / h[:-1]
    c = 1.0 / h[1:]
    b = -(a + c)

    r_main = (h[:-1] + h[1:]) / 3.0
    r_off = h[1:-1] / 6.0

    qtq_main = a * a + b * b + c * c
    qtq_off1 = b[:-1] * a[1:] + c[:-1] * b[1:]
    qtq_off2 = c[:-2] * a[2:]

    r_ab = np.zeros((2, m))
    r_ab[0, 1:] = r_off
    r_ab[1] = r_main

    qtq_ab = np.zeros((3, m))
    qtq_ab[0, 2:] = qtq_off2
    qtq_ab[1, 1:] = qtq_off1
    qtq_ab[2] = qtq_main
    return a, b, c, r_ab, qtq_ab


def _qt_y(a, b, c, y: np.ndarray) -> np.ndarray:
    return a[:, None] * y[:-2] + b[:, None] * y[1:-1] + c[:, None] * y[2:]


def _q_gamma(a, b, c, gamma: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n, gamma.shape[1]))
    out[:-2] += a[:, None] * gamma
    out[1:-1] += b[:, None] * gamma
    out[2:] += c[:, None] * gamma
    return out


def _solve_smoother(t: np.ndarray, y: np.ndarray, p: float):
    """Fitted knot values and interior second derivatives for smoothing p."""
    a, b, c, r_ab, qtq_ab = _band_system(t)
    ab = np.zeros_like(qtq_ab)
    ab[1:] += r_ab
    ab += p * qtq_ab
    gamma = solveh_banded(ab, _qt_y(a, b, c, y), lower=False)
    g = y - p * _q_gamma(a, b, c, gamma, len(t))
    return g, gamma


def _gcv_scores(t: np.ndarray, y: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Generalized cross-validation score per (grid value, dimension).

    ``GCV(p) = n * RSS_p / (n - tr(S_p))^2`` with smoother trace
    ``tr(S_p) = n - p * tr((R + p Q'Q)^{-1} Q'Q)``.
    """
    n = len(t)
    a, b, c, r_ab, qtq_ab = _band_system(t)
    m = n - 2
    qtq_dense = np.zeros((m, m))
    idx = np.arange(m)
    qtq_dense[idx, idx] = qtq_ab[2]
    qtq_dense[idx[:-1], idx[:-1] + 1] = qtq_ab[1, 1:]
    qtq_dense[idx[:-1] + 1, idx[:-1]] = qtq_ab[1, 1:]
    qtq_dense[idx[:-2], idx[:-2] + 2] = qtq_ab[0, 2:]
    qtq_dense[idx[:-2] + 2, idx[:-2]] = qtq_ab[0, 2:]

    qty = _qt_y(a, b, c, y)
    scores = np.empty((len(grid), y.shape[1]))
    for i, p in enumerate(grid):
        ab = np.zeros_like(qtq_ab)
        ab[1:] += r_ab
        ab += p * qtq_ab
        trace = n - p * float(np.trace(solveh_banded(ab, qtq_dense, lower=False)))
        gamma = solveh_banded(ab, qty, lower=False)
        resid = p * _q_gamma(a, b, c, gamma, n)
        rss = (resid * resid).sum(axis=0)
        denom = max(n - trace, 1e-12) ** 2
        scores[i] = n * rss / denom
    return scores


@dataclass(frozen=True)
class SmoothingSpline:
    """Per-dimension natural cubic smoothing spline on shared knots."""

    knots: np.ndarray            # (n,)
    values: np.ndarray           # (n, d) fitted knot values
    second_derivs: np.ndarray    # (n, d), zero in the first and last rows
    smoothing: np.ndarray        # (d,) smoothing parameter used per dimension

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def _locate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.knots[0], self.knots[-1]
        tol = 1e-9 * max(1.0, hi - lo)
        if (t < lo - tol).any() or (t > hi + tol).any():
            raise OutOfRangeError(f"evaluation points outside [{lo}, {hi}]")
        i = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.knots) - 2)
        return t, i

    def eval(self, t) -> np.ndarray:
        """Spline values at ``t`` (scalar or array); shape ``(len(t), d)``."""
        t, i = self._locate(t)
        h = (self.knots[i + 1] - self.knots[i])[:, None]
        lo = (t - self.knots[i])[:, None]
        hi = (self.knots[i + 1] - t)[:, None]
        g0, g1 = self.values[i], self.values[i + 1]
        m0, m1 = self.second_derivs[i], self.second_derivs[i + 1]
        return (
            m0 * hi ** 3 / (6.0 * h)
            + m1 * lo ** 3 / (6.0 * h)
            + (g0 / h - m0 * h / 6.0) * hi
            + (g1 / h - m1 * h / 6.0) * lo
        )

    def derivative(self, t) -> np.ndarray:
        """Analytic first derivative of the cubic pieces at ``t``."""
        t, i = self._locate(t)
        h = (self.knots[i + 1] - self.knots[i])[:, None]
        lo = (t - self.knots[i])[:, None]
        hi = (self.knots[i + 1] - t)[:, None]
        g0, g1 = self.values[i], self.values[i + 1]
        m0, m1 = self.second_derivs[i], self.second_derivs[i + 1]
        return (
            -m0 * hi ** 2 / (2.0 * h)
            + m1 * lo ** 2 / (2.0 * h)
            + (g1 - g0) / h
            - (m1 - m0) * h / 6.0
        )

    def roughness(self) -> np.ndarray:
        """Integral of the squared second derivative per dimension."""
        t = self.knots
        _, _, _, r_ab, _ = _band_system(t)
        gamma = self.second_derivs[1:-1]
        rg = r_ab[1][:, None] * gamma
        rg[:-1] += r_ab[0, 1:][:, None] * gamma[1:]
        rg[1:] += r_ab[0, 1:][:, None] * gamma[:-1]
        return (gamma * rg).sum(axis=0)


def fit_spline(times, values, smoothing: float | None = 0.0) -> SmoothingSpline:
    """Fit natural cubic smoothing splines, one per value dimension.

    ``smoothing=0`` interpolates the data exactly; ``smoothing=None`` picks
    the parameter per dimension by generalized cross-validation over a fixed
    log grid.

    Raises:
        TooFewPointsError: fewer than 4 observations.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if len(t) < 4:
        raise TooFewPointsError("smoothing spline needs at least 4 points")
    if len(t) != len(y):
        raise ValueError("times and values must have equal length")
    if not (np.diff(t) > 0).all():
        raise ValueError("times must be strictly increasing")

    if smoothing is None:
        scores = _gcv_scores(t, y, _GCV_GRID)
        chosen = _GCV_GRID[np.argmin(scores, axis=0)]
    else:
        if smoothing < 0:
            raise ValueError("smoothing must be nonnegative")
        chosen = np.full(y.shape[1], float(smoothing))

    n, d = y.shape
    g = np.empty((n, d))
    m = np.zeros((n, d))
    for p in np.unique(chosen):
        cols = chosen == p
        g_p, gamma_p = _solve_smoother(t, y[:, cols], float(p))
        g[:, cols] = g_p
        m[1:-1, cols] = gamma_p
    return SmoothingSpline(knots=t.copy(), values=g, second_derivs=m, smoothing=chosen)


def spline_objective(times, raw_values, knot_values, smoothing: float) -> np.ndarray:
    """Penalized objective of the natural spline through given knot values.

    The free parameters of a natural cubic spline on fixed knots are exactly
    its knot values; the curvature is the natural-interpolation curvature
    ``gamma = R^{-1} Q' g``.  Used to verify fitted splines are minimizers.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(raw_values, dtype=float)
    g = np.asarray(knot_values, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if g.ndim == 1:
        g = g[:, None]
    a, b, c, r_ab, _ = _band_system(t)
    gamma = solveh_banded(r_ab, _qt_y(a, b, c, g), lower=False)
    rg = r_ab[1][:, None] * gamma
    rg[:-1] += r_ab[0, 1:][:, None] * gamma[1:]
    rg[1:] += r_ab[0, 1:][:, None] * gamma[:-1]
    rough = (gamma * rg).sum(axis=0)
    rss = ((y - g) ** 2).sum(axis=0)
    return rss + smoothing * rough
