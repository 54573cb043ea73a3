"""
Polynomial root finding.

Companion-matrix eigenvalues, single or batched, followed by a few Newton
steps taken in whichever chart keeps the root inside the unit disc.
"""

import numpy as np
from numpy.polynomial import polynomial as P

from ..config.options import TOLERANCE
from ..errors import RootFindingError
from .point import chordal_distance_array


def trim(coeffs, tol: float = 0.0) -> np.ndarray:
    """Drops high-degree coefficients with modulus <= tol * max modulus."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.abs(c).max()
    keep = np.flatnonzero(np.abs(c) > tol * scale) if scale > 0 else np.array([], dtype=int)
    if keep.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: keep[-1] + 1].copy()


def _chart_residual(rows: np.ndarray, reversed_rows: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """|polynomial| at each root, measured in the chart of that root."""
    inner = np.abs(roots) <= 1.0
    with np.errstate(all="ignore"):
        u = np.where(inner, 0j, 1.0 / roots)
        direct = _horner(rows, np.where(inner, roots, 0j))
        flipped = _horner(reversed_rows, u)
    return np.abs(np.where(inner, direct, flipped))


def _horner(rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluates each row (ascending coefficients) at the matching row of ``x``."""
    acc = np.zeros_like(x)
    for k in range(rows.shape[1] - 1, -1, -1):
        acc = acc * x + rows[:, k : k + 1]
    return acc


def polish(rows: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    """Newton polishing for a ``(count, n)`` root array of a ``(count, n+1)`` coefficient array."""
    rows = np.atleast_2d(rows)
    roots = np.atleast_2d(np.asarray(roots, dtype=complex)).copy()
    reversed_rows = rows[:, ::-1]
    deriv = rows[:, 1:] * np.arange(1, rows.shape[1])
    rev_deriv = reversed_rows[:, 1:] * np.arange(1, rows.shape[1])
    for _ in range(steps):
        inner = np.abs(roots) <= 1.0
        with np.errstate(all="ignore"):
            f = _horner(rows, roots)
            df = _horner(deriv, roots)
            u = 1.0 / roots
            g = _horner(reversed_rows, u)
            dg = _horner(rev_deriv, u)
            direct = roots - f / df
            flipped = 1.0 / (u - g / dg)
            candidate = np.where(inner, direct, flipped)
            before = _chart_residual(rows, reversed_rows, roots)
            after = _chart_residual(rows, reversed_rows, candidate)
        better = np.isfinite(candidate) & (after < before)
        roots = np.where(better, candidate, roots)
    return roots


def relative_residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Residual of each root relative to the size of the terms at that root."""
    c = np.asarray(coeffs, dtype=complex)
    inner = np.abs(roots) <= 1.0
    with np.errstate(all="ignore"):
        x = np.where(inner, roots, 1.0 / roots)
        basis = np.where(inner[:, None], c[None, :], c[::-1][None, :])
        value = np.abs(_horner(basis, x[:, None]))[:, 0]
        scale = _horner(np.abs(basis), np.abs(x)[:, None].astype(complex))[:, 0].real
    return value / np.where(scale > 0, scale, 1.0)


def polynomial_roots(coeffs, check: bool = True) -> np.ndarray:
    """All roots of a polynomial given by ascending coefficients."""
    c = trim(coeffs)
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    roots = P.polyroots(c)
    roots = polish(c[None, :], roots[None, :])[0]
    if check:
        residuals = relative_residuals(c, roots)
        if np.any(~np.isfinite(residuals)) or residuals.max() > TOLERANCE.residual:
            raise RootFindingError("polynomial root residuals too large", residuals)
    return roots


def batched_roots(rows) -> tuple[np.ndarray, np.ndarray]:
    """Roots of many polynomials of one degree at once.

    Parameters
    ----------
    rows : array_like
        ``(count, n+1)`` ascending coefficients, nonzero leading column.

    Returns
    -------
    roots : ndarray
        ``(count, n)`` polished roots.
    colliding : ndarray of bool
        Rows with two roots closer than the cluster tolerance; callers
        should redo those with clustering.
    """
    rows = np.asarray(rows, dtype=complex)
    count, width = rows.shape
    n = width - 1
    if n == 1:
        return (-rows[:, 0] / rows[:, 1])[:, None], np.zeros(count, dtype=bool)
    monic = rows[:, :-1] / rows[:, -1:]
    companion = np.zeros((count, n, n), dtype=complex)
    companion[:, 1:, :-1] = np.eye(n - 1)
    companion[:, :, -1] = -monic
    roots = polish(rows, np.linalg.eigvals(companion))
    gaps = chordal_distance_array(roots[:, :, None], roots[:, None, :])
    gaps[:, np.arange(n), np.arange(n)] = np.inf
    colliding = gaps.min(axis=(1, 2)) <= TOLERANCE.cluster * 10
    return roots, colliding
