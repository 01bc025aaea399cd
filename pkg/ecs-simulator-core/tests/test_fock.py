import cmath
import math

import numpy as np
import pytest
from pydantic import ValidationError

from ecs_simulator.core.errors import DimensionError, DomainError, TruncationError
from ecs_simulator.core.fock import (
    JointPND,
    ModeAmplitudes,
    TwoModeAmplitudes,
    adaptive_cutoff,
    dump_state,
    fock_state,
    fock_state2,
    inner_product,
    inner_product2,
    load_state,
    log_factorial,
    norm_squared,
    photon_number_distribution,
    renormalize,
    tail_mass,
    tensor_product,
    trim_cutoff,
)
from ecs_simulator.core.states import CoherentParams, EcsParams, SqueezeParams, coherent, coherent_amplitudes, ecs, squeezed_vacuum


def test_log_factorial():
    assert log_factorial(0) == 0.0
    assert log_factorial(5) == pytest.approx(math.log(120), abs=1e-12)
    assert log_factorial(170) == pytest.approx(706.5730622457874, rel=1e-12)
    assert math.isfinite(log_factorial(400))


def test_log_factorial_rejects_negative():
    with pytest.raises(DomainError):
        log_factorial(-1)


def test_fock_state():
    state = fock_state(3, cutoff=5)

    assert state.cutoff == 5
    assert state.amps[3] == 1.0
    assert norm_squared(state) == 1.0

    with pytest.raises(DimensionError):
        fock_state(6, cutoff=5)


def test_fock_state2():
    state = fock_state2(1, 2, cutoff=4)

    assert state.amps[1, 2] == 1.0
    assert norm_squared(state) == 1.0

    with pytest.raises(DimensionError):
        fock_state2(0, 5, cutoff=4)


def test_inner_product_conjugates_first_argument():
    u = ModeAmplitudes(amps=[1j, 0.0])
    v = ModeAmplitudes(amps=[1.0, 0.0])

    assert inner_product(u, v) == pytest.approx(-1j)
    assert inner_product(u, u) == pytest.approx(1.0)


def test_inner_product_cutoff_mismatch():
    with pytest.raises(DimensionError):
        inner_product(fock_state(0, 3), fock_state(0, 4))

    with pytest.raises(DimensionError):
        inner_product2(fock_state2(0, 0, 3), fock_state2(0, 0, 4))


def test_tensor_product_of_vacua():
    product = tensor_product(fock_state(0, 3), fock_state(0, 3))

    assert product.amps[0, 0] == 1.0
    assert norm_squared(product) == 1.0


def test_tail_mass_of_truncated_coherent_state():
    state = ModeAmplitudes(amps=coherent_amplitudes(1.0, 3))
    expected = 1.0 - math.exp(-1.0) * (1 + 1 + 1 / 2 + 1 / 6)

    assert tail_mass(state) == pytest.approx(expected, abs=1e-12)


def test_renormalize():
    state = renormalize(ModeAmplitudes(amps=[3.0, 4.0]))

    assert state.normalized
    assert norm_squared(state) == pytest.approx(1.0, abs=1e-15)
    assert state.amps[1] == pytest.approx(0.8)


def test_renormalize_zero_state():
    with pytest.raises(DomainError):
        renormalize(ModeAmplitudes(amps=[0.0, 0.0]))


def test_amplitudes_are_read_only():
    state = fock_state(1, 2)

    with pytest.raises(ValueError, match="read-only"):
        state.amps[0] = 1.0


def test_two_mode_amplitudes_must_be_square():
    with pytest.raises(ValidationError):
        TwoModeAmplitudes(amps=np.zeros((2, 3)))


def test_joint_pnd_rejects_negative_probabilities():
    with pytest.raises(ValidationError):
        JointPND(probs=[[0.5, -0.1], [0.0, 0.0]])


def test_joint_pnd_get_outside_grid():
    table = JointPND(probs=[[0.25, 0.25], [0.25, 0.25]])

    assert table.get(1, 1) == 0.25
    assert table.get(5, 0) == 0.0
    assert table.total() == 1.0


def test_photon_number_distribution():
    distribution = photon_number_distribution(ModeAmplitudes(amps=[0.6, 0.8j]))

    assert distribution == pytest.approx([0.36, 0.64])


def test_adaptive_cutoff_grows_until_tail_is_small():
    cutoffs: list[int] = []

    def build(size: int) -> ModeAmplitudes:
        cutoffs.append(size)
        return ModeAmplitudes(amps=coherent_amplitudes(2.0, size))

    state = adaptive_cutoff(build, cutoff=4, tail_tol=1e-10)

    assert cutoffs[0] == 4
    assert cutoffs == sorted(cutoffs)
    assert state.cutoff == cutoffs[-1]
    assert tail_mass(state) < 1e-10


def test_adaptive_cutoff_gives_up():
    def build(size: int) -> ModeAmplitudes:
        return ModeAmplitudes(amps=coherent_amplitudes(6.0, size))

    with pytest.raises(TruncationError) as exc_info:
        adaptive_cutoff(build, cutoff=4, tail_tol=1e-10, max_cutoff=16)

    assert exc_info.value.cutoff == 16
    assert exc_info.value.tail_mass > 1e-10


def test_dump_and_load_state():
    state = ModeAmplitudes(amps=coherent_amplitudes(CoherentParams(magnitude=0.7, phase=0.4).amplitude, 6))

    text = dump_state(state)
    assert text.startswith("# cutoff 6 modes 1\n")

    loaded = load_state(text)
    assert isinstance(loaded, ModeAmplitudes)
    np.testing.assert_array_equal(loaded.amps, state.amps)


def test_dump_and_load_two_mode_state():
    state = fock_state2(2, 1, cutoff=3)

    loaded = load_state(dump_state(state))

    assert isinstance(loaded, TwoModeAmplitudes)
    np.testing.assert_array_equal(loaded.amps, state.amps)


def test_load_state_requires_header():
    with pytest.raises(ValueError, match="header"):
        load_state("0 1 0\n")


def random_mode_state(seed: int, cutoff: int) -> ModeAmplitudes:
    rng = np.random.default_rng(seed)
    return ModeAmplitudes(amps=rng.normal(size=cutoff + 1) + 1j * rng.normal(size=cutoff + 1))


@pytest.mark.parametrize("seed", range(5))
def test_inner_product_is_conjugate_symmetric(seed: int):
    u = random_mode_state(seed, 8)
    v = random_mode_state(seed + 100, 8)

    assert inner_product(u, v) == pytest.approx(inner_product(v, u).conjugate(), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_inner_product_obeys_cauchy_schwarz(seed: int):
    u = random_mode_state(seed, 8)
    v = random_mode_state(seed + 100, 8)

    assert abs(inner_product(u, v)) ** 2 <= norm_squared(u) * norm_squared(v) * (1 + 1e-12)


def test_log_factorial_steps_by_log_n():
    for n in range(1, 301):
        assert log_factorial(n) - log_factorial(n - 1) == pytest.approx(math.log(n), rel=1e-12, abs=1e-12), n


@pytest.mark.parametrize("cutoff", [0, 1, 6])
def test_fock_states_are_orthonormal(cutoff: int):
    for i in range(cutoff + 1):
        for j in range(cutoff + 1):
            expected = 1.0 if i == j else 0.0
            assert inner_product(fock_state(i, cutoff), fock_state(j, cutoff)) == expected


@pytest.mark.parametrize("seed", range(3))
def test_tensor_product_norm_is_product_of_norms(seed: int):
    u = random_mode_state(seed, 6)
    v = random_mode_state(seed + 50, 6)

    product = tensor_product(u, v)

    assert math.sqrt(norm_squared(product)) == pytest.approx(math.sqrt(norm_squared(u)) * math.sqrt(norm_squared(v)), rel=1e-12)


def test_tensor_product_of_coherent_and_squeezed_vacuum():
    beta, r, theta = 0.7, 0.4, 0.3
    product = tensor_product(coherent(CoherentParams(magnitude=beta), 10), squeezed_vacuum(SqueezeParams(r=r, theta=theta), 10))

    coherent_one = beta * math.exp(-(beta**2) / 2)
    squeezed_two = -cmath.exp(1j * theta) * math.tanh(r) / math.sqrt(2 * math.cosh(r))

    assert product.amps[1, 2] == pytest.approx(coherent_one * squeezed_two, abs=1e-12)
    assert product.amps[1, 1] == 0.0


def test_vacuum_overlap_with_coherent_state():
    overlap = inner_product(fock_state(0, 30), coherent(CoherentParams(magnitude=1.0), 30))

    assert overlap == pytest.approx(math.exp(-0.5), abs=1e-12)


def test_vacuum_overlap_with_entangled_coherent_state():
    overlap = inner_product2(ecs(EcsParams(alpha=1.0), 30), fock_state2(0, 0, 30))

    assert overlap == pytest.approx(2 * math.exp(-0.5) / math.sqrt(2 * (1 + math.exp(-1))), abs=1e-12)
    assert overlap.real == pytest.approx(0.7334, abs=1e-4)


def test_tail_mass_of_weak_coherent_state():
    assert tail_mass(coherent(CoherentParams(magnitude=0.5), 10)) <= 1e-10


def test_trim_cutoff_keeps_tail_within_tolerance():
    state = coherent(CoherentParams(magnitude=0.5), 30)

    trimmed = trim_cutoff(state, 1e-10)

    assert trimmed.cutoff < state.cutoff
    assert norm_squared(state) - norm_squared(trimmed) <= 1e-10
    assert trim_cutoff(state, 1e-14).cutoff >= trimmed.cutoff
    np.testing.assert_array_equal(trimmed.amps, state.amps[: trimmed.cutoff + 1])


def test_trim_cutoff_of_two_mode_state_keeps_the_leading_block():
    state = ecs(EcsParams(alpha=0.6), 20)

    trimmed = trim_cutoff(state, 1e-10)

    assert isinstance(trimmed, TwoModeAmplitudes)
    assert trimmed.cutoff < state.cutoff
    assert norm_squared(state) - norm_squared(trimmed) <= 1e-10
    np.testing.assert_array_equal(trimmed.amps, state.amps[: trimmed.cutoff + 1, : trimmed.cutoff + 1])


def test_trim_cutoff_of_vacuum():
    assert trim_cutoff(fock_state(0, 5)).cutoff == 0
    assert trim_cutoff(fock_state(3, 5)).cutoff == 3
