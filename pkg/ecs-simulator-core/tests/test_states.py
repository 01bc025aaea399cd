import cmath
import math

import numpy as np
import pytest
from pydantic import ValidationError

from ecs_simulator.core.errors import DimensionError, DomainError
from ecs_simulator.core.fock import norm_squared, tail_mass, tensor_product
from ecs_simulator.core.states import (
    CoherentParams,
    EcsParams,
    SqueezeParams,
    coherent,
    css,
    ecs,
    ecs_alpha_squared,
    ecs_mean_photons,
    mean_photon_number,
    noon,
    squeezed_vacuum,
    vacuum,
)


def test_coherent_vacuum():
    state = coherent(CoherentParams(magnitude=0.0))

    assert state.amps[0] == 1.0
    assert norm_squared(state) == 1.0


def test_coherent_one_photon_amplitude():
    state = coherent(CoherentParams(magnitude=1.0))

    assert state.amps[1] == pytest.approx(0.60653, abs=1e-5)


def test_coherent_phase():
    state = coherent(CoherentParams(magnitude=1.0, phase=math.pi / 2))

    assert state.amps[1] == pytest.approx(0.60653j, abs=1e-5)
    assert state.amps[2] == pytest.approx(-math.exp(-0.5) / math.sqrt(2), abs=1e-12)


def test_coherent_params_from_complex():
    params = CoherentParams.from_complex(cmath.rect(0.5, 0.3))

    assert params.magnitude == pytest.approx(0.5)
    assert params.phase == pytest.approx(0.3)


def test_coherent_params_reject_negative_magnitude():
    with pytest.raises(ValidationError):
        CoherentParams(magnitude=-0.1)


def test_squeezed_vacuum_amplitudes():
    state = squeezed_vacuum(SqueezeParams(r=0.5))

    assert state.amps[0] == pytest.approx(0.94171, abs=1e-4)
    assert state.amps[2] == pytest.approx(-0.30771, abs=1e-4)


def test_squeezed_vacuum_without_squeezing():
    state = squeezed_vacuum(SqueezeParams(r=0.0))

    assert state.amps[0] == 1.0
    assert norm_squared(state) == 1.0


@pytest.mark.parametrize("r", [0.1, 0.5, 0.8])
def test_squeezed_vacuum_has_even_photons_only(r: float):
    state = squeezed_vacuum(SqueezeParams(r=r, theta=0.7))

    assert np.all(state.amps[1::2] == 0)


@pytest.mark.parametrize("magnitude", [0.3, 1.0, 1.5])
def test_css_has_even_photons_only(magnitude: float):
    state = css(CoherentParams(magnitude=magnitude, phase=0.4))

    assert np.all(state.amps[1::2] == 0)
    assert norm_squared(state) == pytest.approx(1.0, abs=1e-10)


def test_css_two_photon_amplitude():
    state = css(CoherentParams(magnitude=0.5))

    assert state.amps[2] == pytest.approx(0.1740, abs=2e-4)


def test_css_of_zero_amplitude_is_vacuum():
    state = css(CoherentParams(magnitude=0.0))

    assert state.amps[0] == pytest.approx(1.0)
    assert norm_squared(state) == pytest.approx(1.0)


def test_ecs_vacuum_amplitude():
    state = ecs(EcsParams(alpha=1.0))

    assert state.amps[0, 0] == pytest.approx(0.73341, abs=1e-4)


def test_ecs_corner_structure():
    state = ecs(EcsParams(alpha=1.2 + 0.3j))

    assert np.all(state.amps[1:, 1:] == 0)
    np.testing.assert_array_equal(state.amps[:, 0], state.amps[0, :])
    assert norm_squared(state) == pytest.approx(1.0, abs=1e-10)


def test_ecs_matches_branch_superposition():
    alpha = 0.9 * cmath.exp(0.2j)
    branch = coherent(CoherentParams.from_complex(alpha))
    empty = vacuum()

    expected = EcsParams(alpha=alpha).normalization * (tensor_product(branch, empty).amps + tensor_product(empty, branch).amps)

    np.testing.assert_allclose(ecs(EcsParams(alpha=alpha)).amps, expected, atol=1e-12)


@pytest.mark.parametrize("photons", [1, 2, 5])
def test_noon(photons: int):
    state = noon(photons, cutoff=6)

    assert state.amps[photons, 0] == pytest.approx(1 / math.sqrt(2))
    assert state.amps[0, photons] == pytest.approx(1 / math.sqrt(2))
    assert norm_squared(state) == pytest.approx(1.0, abs=1e-15)


def test_noon_relative_phase():
    state = noon(2, cutoff=3, relative_phase=math.pi)

    assert state.amps[0, 2] == pytest.approx(-1 / math.sqrt(2))


def test_noon_out_of_range():
    with pytest.raises(DimensionError):
        noon(4, cutoff=3)

    with pytest.raises(DomainError):
        noon(0, cutoff=3)


def test_mean_photon_number():
    assert mean_photon_number(vacuum()) == 0.0
    assert mean_photon_number(coherent(CoherentParams(magnitude=0.75))) == pytest.approx(0.5625, abs=1e-9)
    assert mean_photon_number(squeezed_vacuum(SqueezeParams(r=0.5))) == pytest.approx(math.sinh(0.5) ** 2, abs=1e-9)


def test_mean_photon_number_of_noon():
    assert mean_photon_number(noon(3, cutoff=4)) == pytest.approx(3.0)


def test_mean_photon_number_warns_on_truncation(capfire):
    _ = mean_photon_number(coherent(CoherentParams(magnitude=2.0), cutoff=4))

    spans = capfire.exporter.exported_spans_as_dict()
    assert any("misses tail mass" in span["name"] for span in spans)


def test_ecs_mean_photons():
    assert ecs_mean_photons(0) == 0.0
    assert ecs_mean_photons(math.sqrt(2)) == pytest.approx(1.76159, abs=1e-5)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.5 + 0.4j])
def test_ecs_mean_photons_matches_state_moment(alpha: complex):
    assert mean_photon_number(ecs(EcsParams(alpha=alpha))) == pytest.approx(ecs_mean_photons(alpha), abs=1e-8)


def test_ecs_mean_photons_is_monotone():
    values = [ecs_mean_photons(a) for a in np.linspace(0.0, 3.0, 61)]

    assert all(b > a for a, b in zip(values, values[1:], strict=False))


def test_ecs_mean_photons_small_amplitude_limit():
    alpha = 1e-3
    assert ecs_mean_photons(alpha) == pytest.approx(alpha**2 / 2, rel=1e-5)


@pytest.mark.parametrize("n_bar", [0.15, 1.0, 3.0])
def test_ecs_alpha_squared_inverts_mean_photons(n_bar: float):
    alpha_squared = ecs_alpha_squared(n_bar)

    assert ecs_mean_photons(math.sqrt(alpha_squared)) == pytest.approx(n_bar, abs=1e-12)


def test_ecs_alpha_squared_at_one_photon():
    assert ecs_alpha_squared(1.0) == pytest.approx(1.2785, abs=1e-4)
    assert ecs_alpha_squared(0.0) == 0.0

    with pytest.raises(DomainError):
        ecs_alpha_squared(-0.1)


def test_adaptive_constructor_meets_tail_tolerance():
    state = coherent(CoherentParams(magnitude=3.0), cutoff=8, adaptive=True, tail_tol=1e-12)

    assert state.cutoff > 8
    assert tail_mass(state) < 1e-12


@pytest.mark.parametrize(
    ("magnitude", "r"),
    [(1.5, 0.0), (0.0, 0.8), (1.5, 0.8)],
)
def test_constructors_meet_tail_tolerance(magnitude: float, r: float):
    assert tail_mass(coherent(CoherentParams(magnitude=magnitude), adaptive=True)) < 1e-10
    assert tail_mass(css(CoherentParams(magnitude=magnitude), adaptive=True)) < 1e-10
    assert tail_mass(ecs(EcsParams(alpha=magnitude), adaptive=True)) < 1e-10
    assert tail_mass(squeezed_vacuum(SqueezeParams(r=r), adaptive=True)) < 1e-10
