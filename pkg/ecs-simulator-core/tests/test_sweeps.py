from functools import partial

import pytest

from ecs_simulator.core.logging import configure_console_logging, current_log_level
from ecs_simulator.core.sweeps import map_points, uniform_grid


def test_uniform_grid_includes_reachable_maximum():
    assert uniform_grid(1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_uniform_grid_stops_before_maximum():
    grid = uniform_grid(2.0, 0.35)

    assert len(grid) == 6
    assert grid[-1] == pytest.approx(1.75)


def test_uniform_grid_of_zero_maximum():
    assert uniform_grid(0.0, 0.1) == [0.0]


@pytest.mark.parametrize(("maximum", "step"), [(3.0, 0.02), (2.0, 0.05), (0.3, 0.1), (1.7, 0.3)])
def test_uniform_grid_never_passes_maximum(maximum: float, step: float):
    grid = uniform_grid(maximum, step)

    assert max(grid) <= maximum
    assert maximum - grid[-1] < step


def test_uniform_grid_rejects_bad_arguments():
    with pytest.raises(ValueError, match="step"):
        uniform_grid(1.0, 0.0)

    with pytest.raises(ValueError, match="maximum"):
        uniform_grid(-1.0, 0.1)


def test_map_points_in_process():
    assert map_points(abs, [-2, 1, -3]) == [2, 1, 3]


def test_map_points_keeps_point_order_across_workers():
    points = [1.0, 0.0, 0.5, 2.0]
    evaluate = partial(uniform_grid, step=0.5)

    assert map_points(evaluate, points, workers=2) == [evaluate(point) for point in points]


def test_workers_inherit_the_configured_log_level():
    configure_console_logging("warn")

    try:
        assert current_log_level() == "warn"
    finally:
        configure_console_logging("error")

    assert current_log_level() == "error"
