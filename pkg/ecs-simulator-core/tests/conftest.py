from collections.abc import Callable

import numpy as np
import pytest

from ecs_simulator.core.fock import TwoModeAmplitudes, renormalize
from ecs_simulator.core.logging import configure_console_logging

configure_console_logging("error")


def random_two_mode_state(seed: int, cutoff: int) -> TwoModeAmplitudes:
    """A random normalized state supported on m + n <= cutoff."""
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(cutoff + 1, cutoff + 1)) + 1j * rng.normal(size=(cutoff + 1, cutoff + 1))
    m, n = np.indices(amps.shape)
    amps[m + n > cutoff] = 0.0
    return renormalize(TwoModeAmplitudes(amps=amps))


@pytest.fixture(name="random_state")
def random_state_factory() -> Callable[[int, int], TwoModeAmplitudes]:
    return random_two_mode_state
