"""
Grand-orbit membership under the valency criterion and the critical classes.

Two points x, y lie in one grand orbit when ``R^n(x) = R^m(y)`` for some
(n, m) with ``val(R^n, x) = val(R^m, y)``. Critical points are grouped by the
coarser relation ``VAL_inf(x) = VAL_inf(y)`` plus an orbit collision.
"""

import numpy as np

from ..config.options import ORBIT, TOLERANCE
from ..errors import PreconditionError
from ..sphere.germs import prefix_valencies
from ..sphere.point import SpherePoint, chordal_distance_array, cluster_points
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger
from .forward import analyze_orbit, julia_membership, val_infinity
from .records import Assumptions, Confidence, GrandOrbitClass, Membership, RegionTag

logger = get_logger("kmsdyn_grand")


def _collisions(map: RationalMap, x, y, horizon: int, tol: float, match_valency: bool) -> Membership:
    """Least (n + m, n) with ``R^n(x) = R^m(y)``, optionally with matching iterate valencies."""
    orbit_x = map.orbit(x, horizon)
    orbit_y = map.orbit(y, horizon)
    values_x = np.array([complex(p) for p in orbit_x])
    values_y = np.array([complex(p) for p in orbit_y])
    distance = chordal_distance_array(values_x[:, None], values_y[None, :])

    vx = prefix_valencies(map, orbit_x) if match_valency else None
    vy = prefix_valencies(map, orbit_y) if match_valency else None

    ambiguous = False
    near = [(int(a), int(b)) for a, b in np.argwhere(distance <= tol * ORBIT.ambiguity_factor)]
    for n, m in sorted(near, key=lambda nm: (nm[0] + nm[1], nm[0])):
        if distance[n, m] > tol or not orbit_x[n].close_to(orbit_y[m], tol):
            ambiguous = True
            continue
        # Numeric orbits converging to a common attractor are not collisions
        exact = orbit_x[n].is_exact and orbit_y[m].is_exact
        if not exact and n > 0 and m > 0 and distance[n - 1, m - 1] <= ORBIT.capture_radius:
            continue
        if match_valency and vx[n] != vy[m]:
            continue
        return Membership(True, (n, m), ambiguous=False)
    return Membership(False, None, ambiguous)


def grand_orbit_member(
    map: RationalMap,
    x: "SpherePoint | complex",
    y: "SpherePoint | complex",
    horizon: int | None = None,
    tol: float | None = None,
) -> Membership:
    """Whether ``y`` lies in the grand orbit of ``x`` within the horizon.

    The witness ``(n, m)`` is the one with least ``n + m``, then least ``n``.
    A pair whose orbits come close without an exact or tolerance-level hit is
    reported as an ambiguous non-member.
    """
    horizon = ORBIT.horizon if horizon is None else horizon
    tol = TOLERANCE.orbit_return if tol is None else tol
    if horizon < 0:
        raise PreconditionError("horizon must be non-negative")
    verdict = _collisions(map, SpherePoint.of(x), SpherePoint.of(y), horizon, tol, match_valency=True)
    if verdict.ambiguous:
        logger.warning(f"Orbits of {x} and {y} pass within tolerance without colliding; membership is ambiguous")
    return verdict


def orbits_collide(
    map: RationalMap,
    x: "SpherePoint | complex",
    y: "SpherePoint | complex",
    horizon: int | None = None,
    tol: float | None = None,
) -> Membership:
    """``R^n(x) = R^m(y)`` for some (n, m) within the horizon, valencies ignored."""
    horizon = ORBIT.horizon if horizon is None else horizon
    tol = TOLERANCE.orbit_return if tol is None else tol
    return _collisions(map, SpherePoint.of(x), SpherePoint.of(y), horizon, tol, match_valency=False)


def _noncritical_closure(map: RationalMap, c: SpherePoint, depth: int, cap: int) -> tuple[list[complex], bool]:
    """Points reaching ``c`` through simple preimages only.

    Returns the points found (``c`` first) and whether the search closed up,
    i.e. some generation had no simple preimages left.
    """
    found = [complex(c)]
    frontier = np.array([complex(c)])
    for k in range(1, depth + 1):
        children, _, multiplicity, _ = map.preimages_batch(frontier)
        frontier = children[multiplicity == 1]
        if frontier.size == 0:
            return found, True
        found.extend(frontier.tolist())
        if len(found) > cap:
            logger.debug(f"Backward closure of {c} passed {cap} points at generation {k}")
            break
    return found, False


def _dedupe(points: list[complex]) -> tuple[SpherePoint, ...]:
    return tuple(SpherePoint.of(centroid) for centroid, _, _ in cluster_points(points, TOLERANCE.cluster))


def _region_confidence(map, c, region, assumptions, horizon) -> Confidence | None:
    """Confidence that ``c`` lies in the region, or None when it does not."""
    if region is RegionTag.SPHERE:
        return Confidence.EXACT
    if assumptions.collet_eckmann or assumptions.preperiodic_critical:
        return Confidence.ASSERTED
    verdict = julia_membership(map, c, horizon)
    return verdict.confidence if verdict.in_julia else None


def critical_classes(
    map: RationalMap,
    region: RegionTag | str = RegionTag.JULIA,
    horizon: int | None = None,
    assumptions: Assumptions | None = None,
) -> list[GrandOrbitClass]:
    """Non-pre-periodic critical points in the region, grouped by VAL_inf and orbit collision.

    A class is finite when the simple-preimage closure of each of its critical
    members terminates within ``ORBIT.class_depth`` generations.
    """
    if map.degree < 2:
        raise PreconditionError("critical classes need degree at least 2")
    region = RegionTag(region)
    horizon = ORBIT.horizon if horizon is None else horizon
    assumptions = Assumptions() if assumptions is None else assumptions

    candidates = []
    for point, _ in map.critical_points:
        record = analyze_orbit(map, point, horizon)
        if record.is_pre_periodic:
            logger.debug(f"Critical point {point} is pre-periodic; not in C_0")
            continue
        confidence = _region_confidence(map, point, region, assumptions, horizon)
        if confidence is None:
            logger.debug(f"Critical point {point} is outside the {region.value} region")
            continue
        candidates.append((point, val_infinity(map, point, horizon), confidence, record.ambiguous))

    classes: list[list[int]] = []
    witnesses: dict[int, list[tuple[int, int]]] = {}
    ambiguous: dict[int, bool] = {}
    for i, (point, value, _, orbit_ambiguous) in enumerate(candidates):
        for members in classes:
            head, head_value = candidates[members[0]][0], candidates[members[0]][1]
            if head_value != value:
                continue
            verdict = orbits_collide(map, head, point, horizon)
            ambiguous[members[0]] |= verdict.ambiguous
            if verdict.member:
                members.append(i)
                witnesses[members[0]].append(verdict.witness)
                break
        else:
            classes.append([i])
            witnesses[i] = []
            ambiguous[i] = orbit_ambiguous

    result = []
    for members in classes:
        head = members[0]
        points, finite = [], True
        for i in members:
            closure, closed = _noncritical_closure(map, candidates[i][0], ORBIT.class_depth, ORBIT.class_node_cap)
            points.extend(closure)
            finite &= closed
        confidences = {candidates[i][2] for i in members}
        confidence = next(c for c in (Confidence.HEURISTIC, Confidence.ASSERTED, Confidence.EXACT) if c in confidences)
        grand = GrandOrbitClass(
            representative=candidates[head][0],
            critical_members=tuple(candidates[i][0] for i in members),
            val_infinity=candidates[head][1],
            finite=finite,
            orbit_members=_dedupe(points),
            confidence=confidence,
            ambiguous=ambiguous[head],
            witnesses=tuple(witnesses[head]),
        )
        logger.info(
            f"Critical class of {grand.representative}: VAL_inf={grand.val_infinity}, "
            f"{'finite' if grand.finite else 'infinite'}, {len(grand.critical_members)} critical member(s)"
        )
        result.append(grand)
    return result
