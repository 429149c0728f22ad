"""Discrete-time inconsistency demo for continuous-time dependency signs.

A linear system ``dx/dt = A x`` observed at interval ``dt`` obeys the exact
one-lag discrete model ``x(t + dt) = B_dt x(t)`` with ``B_dt = exp(A dt)``.
The sign pattern of ``B_dt`` is what lag-based edge estimates see; when ``A``
has complex eigenvalues, off-diagonal signs of ``B_dt`` flip as ``dt`` varies,
so discrete-time edge signs depend on the sampling interval.  For bivariate
stable systems with a real spectrum the signs agree for every ``dt``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

_ZERO_TOL = 1e-12


def matrix_exponential(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(a * t)`` via eigendecomposition, scaling-and-squaring fallback.

    Exactly diagonal input short-circuits to a diagonal result so structural
    zeros stay exact.  A badly conditioned or defective eigenbasis falls back
    to ``scipy.linalg.expm``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if np.count_nonzero(a - np.diag(np.diag(a))) == 0:
        return np.diag(np.exp(np.diag(a) * t))
    vals, vecs = np.linalg.eig(a)
    if np.linalg.cond(vecs) < 1e8:
        out = (vecs * np.exp(vals * t)) @ np.linalg.inv(vecs)
        return np.real(out)
    return scipy.linalg.expm(a * t)


def _sign(x: float, tol: float) -> int:
    if abs(x) <= tol:
        return 0
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class DemoRow:
    dt: float
    b12: float
    b21: float
    sign_match_12: bool
    sign_match_21: bool


def discretization_demo(a: np.ndarray, dt_grid) -> list[DemoRow]:
    """Off-diagonal entries of ``exp(A dt)`` over a grid plus sign flags.

    Each row records whether the sign of the discrete coefficient agrees with
    the sign of the corresponding continuous coefficient of ``A`` (entries
    within a small tolerance of zero count as zero-signed).
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (2, 2):
        raise ValueError("the demo is defined for 2x2 systems")
    dt_grid = np.asarray(dt_grid, dtype=float)
    if (dt_grid <= 0).any() or not (np.diff(dt_grid) > 0).all():
        raise ValueError("dt grid must be positive and increasing")
    s12 = _sign(a[0, 1], 0.0)
    s21 = _sign(a[1, 0], 0.0)
    rows = []
    for dt in dt_grid:
        b = matrix_exponential(a, float(dt))
        tol = _ZERO_TOL * max(1.0, float(np.abs(b).max()))
        rows.append(DemoRow(
            dt=float(dt),
            b12=float(b[0, 1]),
            b21=float(b[1, 0]),
            sign_match_12=_sign(b[0, 1], tol) == s12,
            sign_match_21=_sign(b[1, 0], tol) == s21,
        ))
    return rows


def proposition1_check(a: np.ndarray, dt_grid) -> bool:
    """True iff discrete off-diagonal signs match ``A`` at every grid point.

    Holds whenever ``A`` has a real (negative) spectrum; fails for
    oscillating systems such as ``[[-1, 2], [-4, -0.5]]``.
    """
    return all(r.sign_match_12 and r.sign_match_21 for r in discretization_demo(a, dt_grid))


def first_sign_flip(a: np.ndarray, dt_grid) -> float | None:
    """Smallest grid ``dt`` at which some off-diagonal sign disagrees."""
    for r in discretization_demo(a, dt_grid):
        if not (r.sign_match_12 and r.sign_match_21):
            return r.dt
    return None


def random_stable_real_spectrum(rng: np.random.Generator, max_cond: float = 50.0) -> np.ndarray:
    """Random 2x2 matrix with two distinct negative real eigenvalues."""
    while True:
        lam = -rng.uniform(0.2, 3.0, size=2)
        if abs(lam[0] - lam[1]) < 0.05:
            continue
        v = rng.standard_normal((2, 2))
        if abs(np.linalg.det(v)) < 1e-3 or np.linalg.cond(v) > max_cond:
            continue
        return (v * lam) @ np.linalg.inv(v)


def write_demo_csv(path, rows: list[DemoRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("dt,b12,b21,sign_match_12,sign_match_21\n")
        for r in rows:
            fh.write(f"{r.dt!r},{r.b12!r},{r.b21!r},"
                     f"{int(r.sign_match_12)},{int(r.sign_match_21)}\n")
