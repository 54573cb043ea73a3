"""
Color utilities for kmsdyn.
Palettes for the escape-time renderer and the report plots.
"""

from typing import Sequence, Tuple

import numpy as np
import webcolors
from colour import Color
from matplotlib.colors import CSS4_COLORS


def get_color(name: str, format: str = "rgb") -> Tuple[int, int, int] | str:
    """Gets the color by name and returns it in the specified format.

    Parameters
    ----------
    name : str
        The color's CSS4 name.
    format : str, optional
        The color's return format. Either "hexadecimal" or "rgb".
        Default is "rgb".

    Returns
    -------
    color : str or tuple of int
        Either a string if "hexadecimal" or a tuple of ints if "rgb".
    """
    color = CSS4_COLORS.get(name.lower())
    if color is None:
        raise ValueError(f"Unknown color name: {name}")
    if format == "rgb":
        return tuple(webcolors.hex_to_rgb(color))
    return color


def palette(start: str, end: str, steps: int) -> np.ndarray:
    """Returns a ``(steps, 3)`` uint8 gradient between two named colors."""
    if steps < 1:
        raise ValueError("palette needs at least one step")
    first = Color(get_color(start, format="hexadecimal"))
    last = Color(get_color(end, format="hexadecimal"))
    colors = list(first.range_to(last, steps)) if steps > 1 else [first]
    return np.array(
        [[round(channel * 255) for channel in c.rgb] for c in colors], dtype=np.uint8
    )


def shade(levels: np.ndarray, max_level: int, colors: Sequence[str], interior: str) -> np.ndarray:
    """Maps escape counts to RGB; ``max_level`` marks points that never escaped."""
    table = palette(colors[0], colors[-1], max_level)
    rgb = np.empty(levels.shape + (3,), dtype=np.uint8)
    inside = levels >= max_level
    rgb[inside] = get_color(interior)
    rgb[~inside] = table[np.clip(levels[~inside], 0, max_level - 1)]
    return rgb
