"""
Valency along orbits and counting of germs between two orbit points.
"""

from ..config.options import TOLERANCE
from ..errors import PreconditionError
from .point import SpherePoint
from .rational import RationalMap


def valency_iterate(map: RationalMap, n: int, x: "SpherePoint | complex") -> int:
    """Local degree of ``R^n`` at ``x``: the product of valencies along the orbit."""
    if n < 0:
        raise PreconditionError("iterate index must be non-negative")
    product = 1
    for point in map.orbit(x, n)[:-1]:
        product *= map.valency(point)
    return product


def prefix_valencies(map: RationalMap, orbit: list[SpherePoint]) -> list[int]:
    """``[val(R^0, x), val(R^1, x), ...]`` for a precomputed orbit ``[x, R(x), ...]``."""
    products = [1]
    for point in orbit[:-1]:
        products.append(products[-1] * map.valency(point))
    return products


def germ_count(
    n: int,
    x: "SpherePoint | complex",
    m: int,
    y: "SpherePoint | complex",
    map: RationalMap,
) -> int:
    """Number of transfer germs from ``x`` to ``y`` with exponents ``(n, m)``.

    Requires ``R^n(x) = R^m(y)``. The count is ``val(R^n, x)`` when the two
    valencies agree and 0 otherwise.
    """
    if n < 0 or m < 0:
        raise PreconditionError("iterate indices must be non-negative")
    image_x = map.orbit(x, n)[-1]
    image_y = map.orbit(y, m)[-1]
    if not image_x.close_to(image_y, TOLERANCE.orbit_return):
        raise PreconditionError(f"R^{n}(x) = {image_x} differs from R^{m}(y) = {image_y}")
    a = valency_iterate(map, n, x)
    b = valency_iterate(map, m, y)
    return a if a == b else 0
