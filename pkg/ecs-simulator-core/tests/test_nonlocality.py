import cmath
import math
from collections.abc import Callable

import numpy as np
import pytest

from ecs_simulator.core.fock import TwoModeAmplitudes, fock_state2, norm_squared, renormalize, tensor_product
from ecs_simulator.core.nonlocality import (
    J3Params,
    J3Settings,
    j3,
    j3_curve,
    j3_curve_point,
    j3_extrema,
    j3_extremize,
    j3_state,
    q_joint,
    q_single,
    restart_starts,
)
from ecs_simulator.core.optics import phase_shift
from ecs_simulator.core.states import CoherentParams, EcsParams, coherent, ecs

type StateFactory = Callable[[int, int], TwoModeAmplitudes]

FAST = J3Settings(restarts=3, tol=1e-7, max_iterations=1500, cutoff=10)


def test_q_single_of_vacuum():
    vacuum = fock_state2(0, 0, 10)

    assert q_single(vacuum, "c", 1.0) == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert q_single(vacuum, "d", 1.0) == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_q_single_vacuum_projector_on_one_photon():
    assert q_single(fock_state2(1, 0, 4), "c", 0.0) == 0.0
    assert q_single(fock_state2(1, 0, 4), "d", 0.0) == pytest.approx(1.0)


def test_q_single_of_product_depends_on_one_mode():
    u = renormalize(coherent(CoherentParams(magnitude=0.6, phase=0.3), 20))
    v = renormalize(coherent(CoherentParams(magnitude=1.1), 20))
    mu = 0.4 - 0.2j

    expected = abs(np.vdot(coherent(CoherentParams.from_complex(mu), 20).amps, u.amps)) ** 2

    assert q_single(tensor_product(u, v), "c", mu) == pytest.approx(expected, abs=1e-10)


def test_q_joint_of_vacuum():
    vacuum = fock_state2(0, 0, 12)

    assert q_joint(vacuum, 0.5j, -0.7) == pytest.approx(math.exp(-0.25 - 0.49), abs=1e-12)


def test_q_joint_factorizes_on_products():
    u = renormalize(coherent(CoherentParams(magnitude=0.8, phase=1.0), 24))
    v = renormalize(coherent(CoherentParams(magnitude=0.5, phase=-0.4), 24))
    state = tensor_product(u, v)
    mu, nu = 0.3 + 0.6j, -0.9 + 0.1j

    assert q_joint(state, mu, nu) == pytest.approx(q_single(state, "c", mu) * q_single(state, "d", nu), abs=1e-10)


@pytest.mark.parametrize("seed", [21, 22, 23])
def test_q_values_are_bounded(seed: int, random_state: StateFactory):
    state = random_state(seed, 8)
    rng = np.random.default_rng(seed)

    for mu, nu in rng.uniform(-2.0, 2.0, size=(20, 2)) + 1j * rng.uniform(-2.0, 2.0, size=(20, 2)):
        single_c = q_single(state, "c", mu)
        single_d = q_single(state, "d", nu)
        joint = q_joint(state, mu, nu)

        assert 0.0 <= single_c <= 1.0 + 1e-12
        assert 0.0 <= single_d <= 1.0 + 1e-12
        assert 0.0 <= joint <= min(single_c, single_d) + 1e-12


def test_j3_with_equal_points_is_single_mode_term(random_state: StateFactory):
    state = random_state(31, 8)
    mu = 0.7 - 0.3j

    assert j3(state, J3Params.uniform(mu)) == pytest.approx(q_single(state, "c", mu), abs=1e-14)


def test_j3_of_vacuum():
    vacuum = fock_state2(0, 0, 12)
    mu = 0.9 + 0.4j

    value = j3(vacuum, J3Params(alpha=mu, beta=0, gamma=0, delta=0))

    assert value == pytest.approx(3 - 2 * math.exp(-abs(mu) ** 2), abs=1e-12)


def test_j3_is_phase_covariant(random_state: StateFactory):
    state = random_state(41, 8)
    params = J3Params(alpha=0.3 + 0.1j, beta=-0.5j, gamma=0.8, delta=-0.2 + 0.6j)
    chi = 0.9
    rotation = cmath.exp(1j * chi)

    rotated_params = J3Params(**{name: value * rotation for name, value in params.model_dump().items()})
    rotated_state = phase_shift(phase_shift(state, "c", chi), "d", chi)

    assert j3(rotated_state, rotated_params) == pytest.approx(j3(state, params), abs=1e-10)


def test_j3_params_vector_layout():
    params = J3Params(alpha=1 + 2j, beta=3 + 4j, gamma=5 + 6j, delta=7 + 8j)

    np.testing.assert_array_equal(params.to_vector(), [1, 3, 5, 7, 2, 4, 6, 8])
    assert J3Params.from_vector(params.to_vector()) == params


def test_j3_params_reject_non_finite():
    with pytest.raises(ValueError, match="finite"):
        J3Params(alpha=complex(math.inf, 0), beta=0, gamma=0, delta=0)


def test_restart_starts_are_seeded_substreams():
    starts = restart_starts(seed=5, restarts=4)

    assert starts.shape == (4, 8)
    assert np.all(np.abs(starts) <= 1.5)
    np.testing.assert_array_equal(restart_starts(seed=5, restarts=2), starts[:2])
    assert not np.array_equal(restart_starts(seed=6, restarts=2), starts[:2])


def _shifted_ecs() -> TwoModeAmplitudes:
    return phase_shift(renormalize(ecs(EcsParams(alpha=0.8), 10)), "d", math.pi / 2)


def test_j3_extremize_is_deterministic():
    state = _shifted_ecs()

    first = j3_extremize(state, "min", restarts=2, seed=3, tol=1e-7, max_iterations=1500)
    second = j3_extremize(state, "min", restarts=2, seed=3, tol=1e-7, max_iterations=1500)

    assert first == second
    assert first.value == pytest.approx(j3(state, first.params), abs=1e-12)


@pytest.mark.parametrize("direction", ["min", "max"])
def test_j3_extremize_dominates_its_starts(direction: str):
    state = _shifted_ecs()

    result = j3_extremize(state, direction, restarts=3, seed=9, tol=1e-7, max_iterations=1500)  # pyright: ignore[reportArgumentType]
    start_values = [j3(state, J3Params.from_vector(start)) for start in restart_starts(9, 3)]

    if direction == "max":
        assert all(result.value >= value for value in start_values)
    else:
        assert all(result.value <= value for value in start_values)

    assert np.all(np.abs(result.params.to_vector()) <= 3.0)


def test_more_restarts_never_worsen_the_extremum():
    state = _shifted_ecs()

    fewer = j3_extremize(state, "min", restarts=2, seed=13, tol=1e-7, max_iterations=1500)
    more = j3_extremize(state, "min", restarts=4, seed=13, tol=1e-7, max_iterations=1500)

    assert more.value <= fewer.value


def test_j3_extremize_flags_non_convergence(capfire):
    result = j3_extremize(_shifted_ecs(), "max", restarts=1, seed=1, tol=1e-12, max_iterations=5)

    assert not result.converged
    assert result.iterations <= 5

    spans = capfire.exporter.exported_spans_as_dict()
    assert any("did not converge" in span["name"] for span in spans)


def test_j3_extrema_reports_both_directions():
    extrema = j3_extrema(_shifted_ecs(), FAST)

    assert extrema.minimum.direction == "min"
    assert extrema.maximum.direction == "max"
    assert extrema.minimum.value <= extrema.maximum.value


def test_j3_state_at_zero_photons_is_vacuum():
    ecs_state, _ = j3_state(0.0, "ecs", FAST)
    mixed_state, _ = j3_state(0.0, "mixed", FAST)

    assert ecs_state.amps[0, 0] == pytest.approx(1.0)
    assert mixed_state.amps[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("source", ["ecs", "mixed"])
def test_j3_state_is_trimmed_within_tolerance(source: str):
    settings = J3Settings(cutoff=30, tail_tol=1e-10)

    state, tail = j3_state(0.5, source, settings)  # pyright: ignore[reportArgumentType]

    assert state.cutoff < 30
    assert tail <= 2 * settings.tail_tol
    assert norm_squared(state) == pytest.approx(1.0, abs=1e-12)


def test_j3_state_honors_adaptive_cutoff():
    settings = J3Settings(cutoff=4, tail_tol=1e-10, adaptive_cutoff=True)

    _, tail = j3_state(1.0, "ecs", settings)
    _, fixed_tail = j3_state(1.0, "ecs", settings.model_copy(update={"adaptive_cutoff": False}))

    assert tail <= 2 * settings.tail_tol
    assert fixed_tail > settings.tail_tol


def test_j3_curve_point_reports_trimmed_cutoff():
    point = j3_curve_point(0.3, "ecs", FAST)
    state, tail = j3_state(0.3, "ecs", FAST)

    assert point.cutoff == state.cutoff
    assert point.tail_mass == tail
    assert point.minimum.value <= point.maximum.value


def test_j3_curves_coincide_at_zero_photons():
    ecs_curve = j3_curve([0.0], "ecs", FAST)
    mixed_curve = j3_curve([0.0], "mixed", FAST)

    assert ecs_curve[0].minimum.value == mixed_curve[0].minimum.value
    assert ecs_curve[0].maximum.value == mixed_curve[0].maximum.value


def test_j3_curve_keeps_grid_order_with_workers():
    grid = [0.2, 0.0, 0.1]

    serial = j3_curve(grid, "ecs", FAST)
    parallel = j3_curve(grid, "ecs", FAST, workers=3)

    assert [point.n_bar for point in parallel] == grid
    assert [point.minimum.value for point in parallel] == [point.minimum.value for point in serial]


@pytest.mark.slow
def test_j3_curves_merge_at_low_photon_numbers_and_split_near_one():
    settings = J3Settings(restarts=8, tol=1e-8, max_iterations=3000, cutoff=16)
    grid = [0.1, 0.3, 1.0, 1.25, 1.5]

    ecs_curve = j3_curve(grid, "ecs", settings, workers=2)
    mixed_curve = j3_curve(grid, "mixed", settings, workers=2)

    def gap(index: int) -> float:
        return max(
            abs(ecs_curve[index].minimum.value - mixed_curve[index].minimum.value),
            abs(ecs_curve[index].maximum.value - mixed_curve[index].maximum.value),
        )

    assert gap(0) < 0.01
    assert gap(1) < 0.01
    assert max(gap(2), gap(3), gap(4)) > 0.01
