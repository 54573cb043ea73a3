"""
Rational maps of the Riemann sphere.

A map is stored as ascending coefficient arrays ``p`` and ``q`` with a monic
denominator. Every evaluation picks the chart (z or 1/z) that keeps the
coordinate inside the unit disc, so infinity is never special-cased by callers.
"""

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from ..config.options import ORBIT, TOLERANCE
from ..errors import PreconditionError, RootFindingError
from ..utils.logging import get_logger
from .exact import ExactForm, bit_size, to_complex
from .point import INFINITY, SpherePoint, chart, chordal_distance_array, cluster_points
from .roots import batched_roots, polynomial_roots, relative_residuals, trim

logger = get_logger("kmsdyn_rational")


@dataclass(frozen=True)
class LocalExpansion:
    """Leading term of a map near a point, in the charts of source and image.

    In those charts ``R(x + t) - R(x) = lead * t**valency + ...``.
    """

    valency: int
    lead: complex
    source_inverted: bool
    target_inverted: bool


def _pad(coeffs: np.ndarray, width: int) -> np.ndarray:
    return np.pad(coeffs, (0, width - len(coeffs)))


def _strip_common_roots(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Removes numerically shared roots of p and q (maps typed with float coefficients)."""
    if len(p) < 2 or len(q) < 2:
        return p, q
    try:
        roots = polynomial_roots(q, check=False)
    except np.linalg.LinAlgError:
        return p, q
    for r in roots:
        if len(p) < 2:
            break
        if relative_residuals(p, np.array([r]))[0] <= TOLERANCE.coprime:
            p = trim(P.polydiv(p, np.array([-r, 1.0]))[0])
            q = trim(P.polydiv(q, np.array([-r, 1.0]))[0])
            logger.debug(f"Cancelled common root {r} of numerator and denominator")
    return p, q


class RationalMap:
    """A rational map ``p/q`` of degree ``d = max(deg p, deg q)``.

    Args:
        numerator: Ascending coefficients of p.
        denominator: Ascending coefficients of q (default 1).
        exact: Optional Gaussian-rational form used for exact orbits.
        label: Text the map was parsed from, kept for reports.
    """

    def __init__(self, numerator, denominator=(1.0,), exact: ExactForm | None = None, label: str | None = None):
        p = trim(np.asarray(numerator, dtype=complex))
        q = trim(np.asarray(denominator, dtype=complex))
        if not np.any(q):
            raise PreconditionError("denominator is identically zero")
        if exact is None:
            p, q = _strip_common_roots(p, q)
        lead = q[-1]
        p, q = p / lead, q / lead
        self.numerator = p
        self.denominator = q
        self.degree = max(len(p), len(q)) - 1
        if self.degree < 1 or not np.any(p):
            raise PreconditionError("map is constant")
        margin = self.resultant_margin()
        if margin < TOLERANCE.resultant:
            raise PreconditionError(f"numerator and denominator nearly share a root (chordal margin {margin:.2e})")
        self.exact = exact
        self.label = label

        width = self.degree + 1
        self._p = _pad(p, width)
        self._q = _pad(q, width)
        self._rev_p = self._p[::-1].copy()
        self._rev_q = self._q[::-1].copy()
        self._dp = P.polyder(self._p) if width > 1 else np.zeros(1)
        self._dq = P.polyder(self._q) if width > 1 else np.zeros(1)
        self._rev_dp = P.polyder(self._rev_p)
        self._rev_dq = P.polyder(self._rev_q)

    def __repr__(self) -> str:
        return f"RationalMap({self.label or 'degree ' + str(self.degree)})"

    @property
    def is_polynomial(self) -> bool:
        return len(self.denominator) == 1

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def value(self, z: complex) -> complex:
        """Numeric image of ``z``; returns ``INFINITY`` at poles."""
        inverted, t = chart(z)
        a, b = (self._rev_p, self._rev_q) if inverted else (self._p, self._q)
        num = P.polyval(t, a)
        den = P.polyval(t, b)
        if den == 0:
            return INFINITY if num != 0 else complex(math.nan, math.nan)
        with np.errstate(over="ignore"):
            w = complex(num / den)
        return w if not cmath.isinf(w) else INFINITY

    def values(self, zs) -> np.ndarray:
        """Vectorized :meth:`value`."""
        zs = np.asarray(zs, dtype=complex)
        finite_inf = np.isinf(zs)
        inverted = finite_inf | (np.abs(zs) > 1.0)
        with np.errstate(all="ignore"):
            t = np.where(finite_inf, 0j, np.where(inverted, 1.0 / zs, zs))
            num = np.where(inverted, P.polyval(t, self._rev_p), P.polyval(t, self._p))
            den = np.where(inverted, P.polyval(t, self._rev_q), P.polyval(t, self._q))
            w = num / den
        return np.where((den == 0) | np.isinf(w), INFINITY, w)

    def __call__(self, x: "SpherePoint | complex") -> SpherePoint:
        """Image of a point, exact while the Gaussian-rational size budget allows."""
        x = SpherePoint.of(x)
        if self.exact is not None and x.is_exact:
            image = self.exact.evaluate(None if x.is_infinite else x.exact)
            if image is None:
                return SpherePoint.infinity()
            if bit_size(image) <= ORBIT.exact_bits:
                return SpherePoint(to_complex(image), image)
            return SpherePoint.of(to_complex(image))
        return SpherePoint.of(self.value(complex(x)))

    def orbit(self, x: "SpherePoint | complex", n: int) -> list[SpherePoint]:
        """``[x, R(x), ..., R^n(x)]``."""
        if n < 0:
            raise PreconditionError("orbit length must be non-negative")
        points = [SpherePoint.of(x)]
        for _ in range(n):
            points.append(self(points[-1]))
        return points

    # ------------------------------------------------------------------
    # Derivatives
    # ------------------------------------------------------------------

    def derivative(self, z: complex) -> complex:
        """Flat derivative ``R'(z)`` at a finite point; ``INFINITY`` at poles."""
        if cmath.isinf(z):
            raise PreconditionError("flat derivative is undefined at infinity")
        num, den = P.polyval(z, self._p), P.polyval(z, self._q)
        if den == 0:
            return INFINITY
        w = P.polyval(z, self._dp) * den - num * P.polyval(z, self._dq)
        return complex(w / den**2)

    def derivatives(self, zs) -> np.ndarray:
        """Vectorized modulus of the flat derivative; inf at poles and at infinity."""
        zs = np.asarray(zs, dtype=complex)
        with np.errstate(all="ignore"):
            num, den = P.polyval(zs, self._p), P.polyval(zs, self._q)
            w = P.polyval(zs, self._dp) * den - num * P.polyval(zs, self._dq)
            out = np.abs(w) / np.abs(den) ** 2
        return np.where(np.isinf(zs) | (den == 0) | ~np.isfinite(out), np.inf, out)

    def spherical_derivative(self, z: complex, chart_name: str | None = None) -> float:
        """Chordal derivative ``|W|(1+|t|^2)/(|P|^2+|Q|^2)`` in the chart of ``z``.

        ``chart_name`` ("z" or "w") forces the chart; the value is chart independent.
        """
        if chart_name is None:
            inverted, t = chart(z)
        elif chart_name == "z":
            if cmath.isinf(z):
                raise PreconditionError("the z chart does not contain infinity")
            inverted, t = False, z
        elif chart_name == "w":
            inverted, t = True, (0j if cmath.isinf(z) else 1.0 / z)
        else:
            raise ValueError(f"unknown chart {chart_name!r}")
        a, b, da, db = (
            (self._rev_p, self._rev_q, self._rev_dp, self._rev_dq)
            if inverted
            else (self._p, self._q, self._dp, self._dq)
        )
        num, den = P.polyval(t, a), P.polyval(t, b)
        w = P.polyval(t, da) * den - num * P.polyval(t, db)
        return float(abs(w) * (1.0 + abs(t) ** 2) / (abs(num) ** 2 + abs(den) ** 2))

    def spherical_derivatives(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        infinite = np.isinf(zs)
        inverted = infinite | (np.abs(zs) > 1.0)
        with np.errstate(all="ignore"):
            t = np.where(infinite, 0j, np.where(inverted, 1.0 / zs, zs))

            def pick(direct, flipped):
                return np.where(inverted, P.polyval(t, flipped), P.polyval(t, direct))

            num, den = pick(self._p, self._rev_p), pick(self._q, self._rev_q)
            w = pick(self._dp, self._rev_dp) * den - num * pick(self._dq, self._rev_dq)
            return np.abs(w) * (1.0 + np.abs(t) ** 2) / (np.abs(num) ** 2 + np.abs(den) ** 2)

    # ------------------------------------------------------------------
    # Local degree
    # ------------------------------------------------------------------

    def local_expansion(self, x: "SpherePoint | complex") -> LocalExpansion:
        """Valency and leading Taylor coefficient by relative thresholding."""
        z = complex(SpherePoint.of(x))
        source_inverted, c = chart(z)
        shift = Polynomial([c, 1.0])
        a, b = (self._rev_p, self._rev_q) if source_inverted else (self._p, self._q)
        num, den = Polynomial(a)(shift), Polynomial(b)(shift)
        target_inverted, cw = chart(self.value(z))
        if target_inverted:
            num, den = den, num
        local = (num - cw * den).coef
        local = _pad(local, self.degree + 1)
        scale = np.abs(local).max()
        for k in range(1, len(local)):
            if abs(local[k]) > TOLERANCE.taylor * scale:
                return LocalExpansion(k, complex(local[k] / den.coef[0]), source_inverted, target_inverted)
        raise PreconditionError(f"map is locally constant at {z}")

    @cached_property
    def critical_points(self) -> tuple[tuple[SpherePoint, int], ...]:
        """Critical points with their valencies; the excesses sum to ``2d - 2``."""
        if self.degree < 2:
            raise PreconditionError("critical points need degree at least 2")
        found = self.exact.critical_points() if self.exact is not None else None
        if found is not None:
            points = [
                (SpherePoint.infinity() if e == "inf" else SpherePoint(v, e), m) for e, v, m in found
            ]
        else:
            points = self._numeric_critical_points()
        excess = sum(m - 1 for _, m in points)
        if excess != 2 * self.degree - 2:
            raise RootFindingError(
                f"critical multiplicities sum to {excess}, expected {2 * self.degree - 2}"
            )
        return tuple(points)

    def _numeric_critical_points(self) -> list[tuple[SpherePoint, int]]:
        w = P.polysub(P.polymul(self._dp, self._q), P.polymul(self._p, self._dq))
        w = trim(w, tol=1e-13)
        points = []
        for centroid, size, spread in cluster_points(polynomial_roots(w), TOLERANCE.cluster):
            point = SpherePoint.of(centroid)
            taylor = self.local_expansion(point).valency
            if taylor != size + 1:
                logger.warning(
                    f"Critical point {point}: root cluster says valency {size + 1}, "
                    f"Taylor coefficients say {taylor}"
                )
            points.append((point, size + 1))
        deficiency = 2 * self.degree - 2 - (len(w) - 1)
        if deficiency > 0 and np.any(w):
            points.append((SpherePoint.infinity(), deficiency + 1))
        return points

    def critical_valency(self, x: "SpherePoint | complex") -> int:
        """Valency of ``x`` if it is (numerically) a critical point, else 1."""
        x = SpherePoint.of(x)
        for point, valency in self.critical_points:
            if point.close_to(x):
                return valency
        return 1

    def valency(self, x: "SpherePoint | complex") -> int:
        x = SpherePoint.of(x)
        if self.exact is not None and x.is_exact and x.exact is not None:
            return self.exact.valency(x.exact)
        if self.exact is not None and x.is_infinite:
            return self.exact.valency(None)
        return self.critical_valency(x)

    def is_critical(self, x: "SpherePoint | complex") -> bool:
        return self.critical_valency(x) > 1

    # ------------------------------------------------------------------
    # Preimages
    # ------------------------------------------------------------------

    def _fibre_row(self, w: complex) -> np.ndarray:
        if cmath.isinf(w):
            return self._q.copy()
        if abs(w) <= 1.0:
            return self._p - w * self._q
        return self._p / w - self._q

    def preimages(self, w: "SpherePoint | complex") -> list[tuple[SpherePoint, int]]:
        """``R^{-1}(w)`` as ``(point, multiplicity)``; multiplicities sum to d."""
        w = SpherePoint.of(w)
        if self.exact is not None and w.is_exact:
            found = self.exact.preimages(None if w.is_infinite else w.exact)
            if found is not None:
                return [
                    (SpherePoint.infinity() if e == "inf" else SpherePoint(v, e), m) for e, v, m in found
                ]
        row = self._fibre_row(complex(w))
        scale = np.abs(row).max()
        finite = trim(row, tol=1e-12)
        result = [
            (SpherePoint.of(c), m)
            for c, m, _ in cluster_points(polynomial_roots(finite), TOLERANCE.cluster)
        ]
        deficiency = self.degree - (len(finite) - 1)
        if deficiency > 0 and scale > 0:
            result.append((SpherePoint.infinity(), deficiency))
        return result

    def preimages_batch(self, ws) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Preimages of many points at once.

        Returns
        -------
        children : ndarray of complex
        parents : ndarray of int
            Index into ``ws`` of each child's image, in non-decreasing order.
        multiplicity : ndarray of int
        ill_conditioned : ndarray of bool
            Children from root clusters wider than the point tolerance.
        """
        ws = np.asarray(ws, dtype=complex).ravel()
        d = self.degree
        infinite = np.isinf(ws)
        with np.errstate(all="ignore"):
            small = np.abs(ws) <= 1.0
            rows = np.where(
                small[:, None],
                self._p[None, :] - ws[:, None] * self._q[None, :],
                self._p[None, :] / ws[:, None] - self._q[None, :],
            )
        rows[infinite] = self._q
        scale = np.abs(rows).max(axis=1)
        regular = ~infinite & (np.abs(rows[:, d]) > 1e-10 * scale)

        children, parents, mults, ill = [], [], [], []
        index = np.flatnonzero(regular)
        if index.size:
            roots, colliding = batched_roots(rows[index])
            good = index[~colliding]
            children.append(roots[~colliding].ravel())
            parents.append(np.repeat(good, d))
            mults.append(np.ones(good.size * d, dtype=int))
            ill.append(np.zeros(good.size * d, dtype=bool))
            fallback = np.concatenate([index[colliding], np.flatnonzero(~regular)])
        else:
            fallback = np.flatnonzero(~regular)

        for i in fallback:
            row = rows[i]
            finite = trim(row, tol=1e-12)
            clusters = cluster_points(polynomial_roots(finite, check=False), TOLERANCE.cluster)
            deficiency = d - (len(finite) - 1)
            if deficiency > 0:
                clusters.append((INFINITY, deficiency, 0.0))
            children.append(np.array([c for c, _, _ in clusters], dtype=complex))
            parents.append(np.full(len(clusters), i))
            mults.append(np.array([m for _, m, _ in clusters], dtype=int))
            ill.append(np.array([m > 1 and s > TOLERANCE.point for _, m, s in clusters], dtype=bool))

        if not children:
            empty = np.zeros(0)
            return empty.astype(complex), empty.astype(int), empty.astype(int), empty.astype(bool)
        children = np.concatenate(children)
        parents = np.concatenate(parents)
        order = np.argsort(parents, kind="stable")
        return (
            children[order],
            parents[order],
            np.concatenate(mults)[order],
            np.concatenate(ill)[order],
        )

    def resultant_margin(self) -> float:
        """Smallest chordal distance between a root of p and a root of q (1.0 if none)."""
        try:
            zeros = polynomial_roots(self.numerator, check=False)
            poles = polynomial_roots(self.denominator, check=False)
        except np.linalg.LinAlgError:
            return 0.0
        if zeros.size == 0 or poles.size == 0:
            return 1.0
        return float(chordal_distance_array(zeros[:, None], poles[None, :]).min())


def evaluate(map: RationalMap, z: "SpherePoint | complex") -> SpherePoint:
    return map(z)


def critical_points(map: RationalMap) -> list[tuple[SpherePoint, int]]:
    return list(map.critical_points)


def valency(map: RationalMap, x: "SpherePoint | complex") -> int:
    return map.valency(x)


def preimages(map: RationalMap, w: "SpherePoint | complex") -> list[tuple[SpherePoint, int]]:
    return map.preimages(w)
