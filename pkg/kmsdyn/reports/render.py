"""
PNG rendering: Julia sets, phase diagrams and pressure curves.

Images are written without timestamps or software tags so that identical
runs give identical bytes.
"""

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from PIL import Image
from PIL.PngImagePlugin import PngInfo

from ..config.options import JULIA
from ..errors import ConfigError, PreconditionError
from ..orbits.forward import escape_radius
from ..sphere.rational import RationalMap
from ..thermo.base_iteration import julia_seeds
from ..thermo.pressure import BowenEstimate, PressureCurve
from ..utils.colors import get_color, palette, shade
from ..utils.logging import get_logger

logger = get_logger("kmsdyn_render")

PNG_METADATA = {"Software": None}


def pixel_grid(resolution: int, window: float) -> np.ndarray:
    """Complex coordinates of pixel centres; row 0 is the top edge."""
    xs = np.linspace(-window, window, resolution)
    ys = np.linspace(window, -window, resolution)
    return xs[None, :] + 1j * ys[:, None]


def escape_time_grid(
    map: RationalMap,
    resolution: int | None = None,
    window: float | None = None,
    max_iterations: int | None = None,
) -> np.ndarray:
    """Escape counts on the pixel grid; ``max_iterations`` marks points that never escaped."""
    if not map.is_polynomial or map.degree < 2:
        raise ConfigError("escape-time rendering needs a polynomial of degree at least 2")
    resolution = JULIA.resolution if resolution is None else resolution
    window = JULIA.window if window is None else window
    max_iterations = JULIA.max_iterations if max_iterations is None else max_iterations
    radius = escape_radius(map)

    z = pixel_grid(resolution, window)
    levels = np.full(z.shape, max_iterations, dtype=np.int64)
    alive = np.ones(z.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for k in range(max_iterations):
            z[alive] = map.values(z[alive])
            escaped = alive & ~(np.abs(z) <= radius)
            levels[escaped] = k
            alive &= ~escaped
            if not alive.any():
                break
    return levels


def scatter_grid(
    map: RationalMap,
    resolution: int | None = None,
    window: float | None = None,
    points: int | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Hit counts of random backward orbits on the pixel grid."""
    resolution = JULIA.resolution if resolution is None else resolution
    window = JULIA.window if window is None else window
    points = JULIA.scatter_points if points is None else points
    rng = np.random.default_rng(0) if rng is None else rng

    chains = min(points, 1024)
    steps = max(points // chains, 1)
    z = julia_seeds(map, chains, rng, burn_in=JULIA.burn_in)
    counts = np.zeros((resolution, resolution), dtype=np.int64)
    edges = np.linspace(-window, window, resolution + 1)
    for _ in range(steps):
        children, parents, _, _ = map.preimages_batch(z)
        per_parent = np.bincount(parents, minlength=chains)
        if np.any(per_parent == 0):
            raise PreconditionError("backward branch lost while rendering")
        offsets = np.concatenate([[0], np.cumsum(per_parent)[:-1]])
        z = children[offsets + rng.integers(0, per_parent)]
        finite = np.isfinite(z)
        hist, _, _ = np.histogram2d(z[finite].imag, z[finite].real, bins=(edges, edges))
        counts += hist.astype(np.int64)
    return counts[::-1]


def _png_bytes(rgb: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(rgb).save(buffer, format="PNG", pnginfo=PngInfo(), optimize=False)
    return buffer.getvalue()


def render_julia(map: RationalMap, resolution: int | None = None, rng: np.random.Generator | None = None) -> bytes:
    """Escape-time image for polynomials, inverse-iteration scatter otherwise."""
    resolution = JULIA.resolution if resolution is None else resolution
    if not 1 <= resolution <= JULIA.max_resolution:
        raise ConfigError(f"resolution must be between 1 and {JULIA.max_resolution}, got {resolution}")
    if map.is_polynomial and map.degree >= 2:
        levels = escape_time_grid(map, resolution)
        rgb = shade(levels, JULIA.max_iterations, JULIA.palette, JULIA.interior)
        logger.info(f"Rendered escape-time image of {map!r} at {resolution}x{resolution}")
    else:
        counts = scatter_grid(map, resolution, rng=rng)
        intensity = np.log1p(counts)
        top = intensity.max() or 1.0
        table = palette(*JULIA.palette, 256)
        rgb = table[np.round(255 * intensity / top).astype(np.int64)]
        rgb[counts == 0] = get_color(JULIA.interior)
        logger.info(f"Rendered inverse-iteration image of {map!r} at {resolution}x{resolution}")
    return _png_bytes(np.ascontiguousarray(rgb, dtype=np.uint8))


def _figure_bytes(fig) -> bytes:
    buffer = io.BytesIO()
    fig.savefig(buffer, format="png", dpi=100, metadata=PNG_METADATA)
    plt.close(fig)
    return buffer.getvalue()


def plot_phase_diagram(betas, totals, hd: BowenEstimate | None, title: str) -> bytes:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(betas, totals, where="mid", color=get_color(JULIA.palette[0], format="hexadecimal"))
    if hd is not None:
        lo, hi = hd.band
        ax.axvspan(lo, hi, color=get_color(JULIA.palette[1], format="hexadecimal"), alpha=0.4, label="HD band")
        ax.legend(loc="upper left")
    ax.set_xlabel("beta")
    ax.set_ylabel("extremal states")
    ax.set_title(title)
    return _figure_bytes(fig)


def plot_pressure(curve: PressureCurve, root: BowenEstimate | None, title: str) -> bytes:
    fig, ax = plt.subplots(figsize=(6, 4))
    errors = [s.error for s in curve.samples]
    ax.errorbar(curve.deltas, curve.values, yerr=errors, marker="o", color=get_color(JULIA.palette[0], format="hexadecimal"))
    ax.axhline(0.0, color="gray", linewidth=0.8)
    if root is not None:
        ax.axvline(root.value, color=get_color(JULIA.palette[1], format="hexadecimal"), linestyle="--")
    ax.set_xlabel("delta")
    ax.set_ylabel("P(delta)")
    ax.set_title(title)
    return _figure_bytes(fig)
