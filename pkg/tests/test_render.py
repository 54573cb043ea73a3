import io

import numpy as np
import pytest
from PIL import Image

from kmsdyn.errors import ConfigError
from kmsdyn.reports.render import escape_time_grid, pixel_grid, plot_pressure, render_julia
from kmsdyn.thermo import PressureSampler
from kmsdyn.utils import get_color, palette, shade


def test_pixel_grid_orientation():
    grid = pixel_grid(5, 2.0)
    assert grid[0, 0] == -2 + 2j
    assert grid[-1, -1] == 2 - 2j
    assert grid[2, 2] == 0


def test_escape_time_of_square(square):
    levels = escape_time_grid(square, resolution=5, window=2.0, max_iterations=50)
    assert levels[2, 2] == 50
    assert levels[1, 2] == 50
    assert levels[2, 3] == 50
    assert levels[0, 0] == 0
    assert levels[0, 2] == 0


def test_escape_time_needs_a_polynomial(rees):
    with pytest.raises(ConfigError):
        escape_time_grid(rees, resolution=4)


def test_palette_and_shade():
    table = palette("black", "white", 3)
    assert table.shape == (3, 3)
    assert tuple(table[0]) == (0, 0, 0)
    assert tuple(table[-1]) == (255, 255, 255)
    rgb = shade(np.array([[0, 4]]), 4, ("black", "white"), "red")
    assert tuple(rgb[0, 1]) == get_color("red")
    assert tuple(rgb[0, 0]) == (0, 0, 0)
    with pytest.raises(ValueError):
        get_color("not-a-colour")


def test_render_julia_of_square(square):
    payload = render_julia(square, 9)
    image = Image.open(io.BytesIO(payload))
    assert image.size == (9, 9)
    assert image.getpixel((4, 4)) == get_color("black")
    assert image.getpixel((0, 0)) != get_color("black")
    assert render_julia(square, 9) == payload


def test_render_julia_scatter_is_seeded(rees):
    first = render_julia(rees, 12, rng=np.random.default_rng(5))
    second = render_julia(rees, 12, rng=np.random.default_rng(5))
    assert first == second
    assert Image.open(io.BytesIO(first)).size == (12, 12)


def test_render_julia_resolution_bounds(square):
    with pytest.raises(ConfigError):
        render_julia(square, 0)


def test_pressure_plot_is_png(square):
    curve = PressureSampler(square, depth=6).curve([0.0, 1.0, 2.0])
    assert plot_pressure(curve, None, "z^2")[:8] == b"\x89PNG\r\n\x1a\n"
