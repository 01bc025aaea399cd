"""Beam splitter, phase shifter and photon-number statistics of the two output modes.

The splitter convention is the real orthogonal map

    a^dagger -> sqrt(T) c^dagger + sqrt(1-T) d^dagger
    b^dagger -> sqrt(1-T) c^dagger - sqrt(T) d^dagger

At T = 1/2 the matrix is a reflection, so two passes give back the input state.
"""

import math
from functools import lru_cache
from typing import Literal

import logfire
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ecs_simulator.core.errors import TruncationError
from ecs_simulator.core.fock import (
    DEFAULT_CUTOFF,
    DEFAULT_TAIL_TOL,
    ComplexArray,
    JointPND,
    RealArray,
    RealGrid,
    TwoModeAmplitudes,
    adaptive_cutoff,
    log_factorials,
    renormalize,
    tail_mass,
    tensor_product,
)
from ecs_simulator.core.states import (
    TRUNCATION_WARNING_FACTOR,
    CoherentParams,
    SqueezeParams,
    coherent,
    css,
    squeezed_vacuum,
)

PER_N_FLOOR_TOL = 1e-15

Mode = Literal["c", "d"]


class BeamSplitterSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    transmissivity: float = Field(default=0.5, ge=0.0, le=1.0, description="Intensity transmissivity T from port a to port c.")
    convention: Literal["real-orthogonal"] = Field(default="real-orthogonal", description="Sign convention of the splitter matrix.")


BALANCED = BeamSplitterSpec()


@lru_cache(maxsize=1024)
def subspace_matrix(total: int, transmissivity: float) -> RealArray:
    """Real orthogonal block ``U[k, n_a] = <k, N-k| U |n_a, N-n_a>`` for total photon number N."""
    t = math.sqrt(transmissivity)
    s = math.sqrt(1.0 - transmissivity)
    log_fact = log_factorials(total)
    matrix = np.zeros((total + 1, total + 1), dtype=np.float64)

    for n_a in range(total + 1):
        n_b = total - n_a
        i = np.arange(n_a + 1)[:, np.newaxis]
        j = np.arange(n_b + 1)[np.newaxis, :]
        k = i + j

        log_binomials = log_fact[n_a] - log_fact[i] - log_fact[n_a - i] + log_fact[n_b] - log_fact[j] - log_fact[n_b - j]
        log_norms = 0.5 * (log_fact[k] + log_fact[total - k] - log_fact[n_a] - log_fact[n_b])
        signs = np.where((n_b - j) % 2 == 0, 1.0, -1.0)
        terms = np.exp(log_binomials + log_norms) * t ** (i + n_b - j) * s ** (n_a - i + j) * signs

        # bincount sums in a fixed order per output cell
        matrix[:, n_a] = np.bincount(k.ravel(), weights=terms.ravel(), minlength=total + 1)

    matrix.flags.writeable = False
    return matrix


def _apply_beam_splitter(amps: ComplexArray, transmissivity: float) -> ComplexArray:
    cutoff = amps.shape[0] - 1
    out = np.zeros_like(amps)

    for total in range(cutoff + 1):
        rows = np.arange(total + 1)
        out[rows, total - rows] = subspace_matrix(total, transmissivity) @ amps[rows, total - rows]

    return out


def out_of_grid_mass(state: TwoModeAmplitudes) -> float:
    """Probability in components whose total photon number exceeds the per-mode cutoff."""
    m, n = np.indices(state.amps.shape)
    return float(np.sum(np.abs(state.amps[m + n > state.cutoff]) ** 2))


def beam_splitter(
    state: TwoModeAmplitudes,
    spec: BeamSplitterSpec = BALANCED,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> TwoModeAmplitudes:
    """Transform input modes (a, b) into output modes (c, d), one total-photon-number block at a time.

    Blocks with N <= cutoff fit the output grid completely, so they transform unitarily. Input
    components with N > cutoff have no complete block on the grid and are dropped.
    """
    with logfire.span("beam splitter T={transmissivity} cutoff={cutoff}", transmissivity=spec.transmissivity, cutoff=state.cutoff):
        if (discarded := out_of_grid_mass(state)) > tail_tol:
            logfire.warn(
                "Beam splitter dropped {discarded} probability above total photon number {cutoff}",
                discarded=discarded,
                cutoff=state.cutoff,
            )

        return TwoModeAmplitudes(amps=_apply_beam_splitter(state.amps, spec.transmissivity), normalized=state.normalized)


def phase_shift(state: TwoModeAmplitudes, mode: Mode, angle: float) -> TwoModeAmplitudes:
    """Multiply every component by ``e^{i angle k}``, k the photon number in ``mode``."""
    factors = np.exp(1j * angle * np.arange(state.cutoff + 1))
    amps = state.amps * factors[:, np.newaxis] if mode == "c" else state.amps * factors[np.newaxis, :]

    return TwoModeAmplitudes(amps=amps, normalized=state.normalized)


class MixedState(BaseModel):
    """Output of the coherent plus squeezed vacuum interference, renormalized on its grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    state: TwoModeAmplitudes
    coherent: CoherentParams
    squeeze: SqueezeParams
    input_mean_photons: float = Field(description="|beta|^2 + sinh^2 r, carried unchanged through the splitter.")
    tail_mass: float = Field(description="Probability lost to truncation before renormalization.")

    @property
    def cutoff(self) -> int:
        return self.state.cutoff


def mix_cs_sv(
    cs: CoherentParams,
    sv: SqueezeParams,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    adaptive: bool = True,
    tail_tol: float = DEFAULT_TAIL_TOL,
    spec: BeamSplitterSpec = BALANCED,
) -> MixedState:
    """Interfere ``|beta>_a`` with ``|xi>_b`` on the splitter and renormalize the output."""

    def build(size: int) -> TwoModeAmplitudes:
        product = tensor_product(coherent(cs, size), squeezed_vacuum(sv, size))
        return TwoModeAmplitudes(amps=_apply_beam_splitter(product.amps, spec.transmissivity))

    with logfire.span("mix coherent |beta|={beta} with squeezed vacuum r={r}", beta=cs.magnitude, r=sv.r, theta=sv.theta):
        if adaptive:
            output = adaptive_cutoff(build, cutoff=cutoff, tail_tol=tail_tol)
        else:
            output = build(cutoff)
            if (mass := tail_mass(output)) > TRUNCATION_WARNING_FACTOR * tail_tol:
                raise TruncationError(tail_mass=mass, tail_tol=TRUNCATION_WARNING_FACTOR * tail_tol, cutoff=cutoff)

        return MixedState(
            state=renormalize(output),
            coherent=cs,
            squeeze=sv,
            input_mean_photons=cs.magnitude**2 + sv.mean_photons,
            tail_mass=tail_mass(output),
        )


def mix_css_coherent(beta: CoherentParams, cutoff: int = DEFAULT_CUTOFF) -> TwoModeAmplitudes:
    """The ideal scheme: ``|beta>_a`` and the cat state ``N~(|beta> + |-beta>)_b`` give the exact ECS."""
    return beam_splitter(tensor_product(coherent(beta, cutoff), css(beta, cutoff)))


def joint_pnd(state: TwoModeAmplitudes) -> JointPND:
    return JointPND(probs=np.abs(state.amps) ** 2)


class PerNTable(BaseModel):
    """Joint probabilities rescaled so every anti-diagonal ``m + n = N`` sums to one."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: RealGrid = Field(description="Rescaled table; cells on absent anti-diagonals hold zero.")
    absent_totals: tuple[int, ...] = Field(description="Total photon numbers whose anti-diagonal carried no probability.")

    def is_present(self, total: int) -> bool:
        return total not in self.absent_totals


def per_n_normalized(p: JointPND, floor_tol: float = PER_N_FLOOR_TOL) -> PerNTable:
    """``P~[m, n] = P[m, n] / sum_k P[k, N - k]`` for every total photon number N = m + n."""
    m, n = np.indices(p.probs.shape)
    totals = m + n
    diagonal_sums = np.bincount(totals.ravel(), weights=p.probs.ravel())

    present = diagonal_sums >= floor_tol
    safe_sums = np.where(present, diagonal_sums, 1.0)
    scaled = np.where(present[totals], p.probs / safe_sums[totals], 0.0)

    absent = tuple(int(total) for total in np.flatnonzero(~present))
    return PerNTable(probs=scaled, absent_totals=absent)


def off_corner_mass(p: JointPND) -> float:
    """Probability with photons in both modes at once, zero for an ideal ECS."""
    return float(p.probs[1:, 1:].sum())


def corner_ratio(p: JointPND) -> float:
    """Two-photon coincidence relative to two-photon bunching, ``P11 / (P20 + P02)``."""
    bunched = p.get(2, 0) + p.get(0, 2)
    if bunched == 0.0:
        return 0.0
    return p.get(1, 1) / bunched
