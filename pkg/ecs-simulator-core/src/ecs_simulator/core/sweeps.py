"""Sweep grids and fan-out of grid points to worker processes."""

import math
import multiprocessing
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor

from ecs_simulator.core.logging import configure_console_logging, current_log_level

GRID_ROUNDING_DIGITS = 12


def uniform_grid(maximum: float, step: float) -> list[float]:
    """``0, step, 2 step, ...`` up to and including ``maximum``, never past it."""
    if step <= 0:
        msg = f"Grid step must be positive, got {step}."
        raise ValueError(msg)

    if maximum < 0:
        msg = f"Grid maximum must be nonnegative, got {maximum}."
        raise ValueError(msg)

    points = math.floor(maximum / step + 1e-9) + 1
    return [min(round(index * step, GRID_ROUNDING_DIGITS), maximum) for index in range(points)]


def map_points[T, R](evaluate: Callable[[T], R], points: Sequence[T], workers: int = 1) -> list[R]:
    """``evaluate`` at every point, in point order.

    With more than one worker the points go to spawned processes, so ``evaluate`` must be picklable
    (a module-level function or a ``functools.partial`` of one). Workers log at the parent's console level.
    """
    if workers <= 1 or len(points) <= 1:
        return [evaluate(point) for point in points]

    with ProcessPoolExecutor(
        max_workers=min(workers, len(points)),
        mp_context=multiprocessing.get_context("spawn"),
        initializer=configure_console_logging,
        initargs=(current_log_level(),),
    ) as executor:
        return list(executor.map(evaluate, points))
