"""Constructors for the coherent, squeezed vacuum, cat (CSS), entangled coherent (ECS) and NOON states.

Constructors return the analytic Fock coefficients on the truncated grid without
rescaling, so the discarded probability stays visible through ``tail_mass``.
"""

import cmath
import math
from collections.abc import Callable

import logfire
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from ecs_simulator.core.errors import DimensionError, DomainError
from ecs_simulator.core.fock import (
    DEFAULT_CUTOFF,
    DEFAULT_TAIL_TOL,
    AnyAmplitudes,
    ComplexArray,
    ModeAmplitudes,
    TwoModeAmplitudes,
    adaptive_cutoff,
    fock_state,
    log_factorials,
    tail_mass,
)

TRUNCATION_WARNING_FACTOR = 100.0


class CoherentParams(BaseModel):
    """Amplitude of a coherent state, ``beta = |beta| e^{i phi}``."""

    model_config = ConfigDict(frozen=True)

    magnitude: float = Field(ge=0.0, description="The modulus |beta|.")
    phase: float = Field(default=0.0, description="The phase phi in radians, taken mod 2 pi.")

    @property
    def amplitude(self) -> complex:
        return cmath.rect(self.magnitude, self.phase)

    @classmethod
    def from_complex(cls, beta: complex) -> "CoherentParams":
        return cls(magnitude=abs(beta), phase=cmath.phase(beta))


class SqueezeParams(BaseModel):
    """Squeezing ``r`` and phase ``theta`` of a single-mode squeezed vacuum."""

    model_config = ConfigDict(frozen=True)

    r: float = Field(ge=0.0, description="The squeezing parameter.")
    theta: float = Field(default=0.0, description="The squeezing phase in radians, taken mod 2 pi.")

    @property
    def mean_photons(self) -> float:
        return math.sinh(self.r) ** 2


class EcsParams(BaseModel):
    """Amplitude ``alpha`` of the entangled coherent state ``N_alpha (|alpha,0> + |0,alpha>)``."""

    model_config = ConfigDict(frozen=True)

    alpha: complex = Field(description="The coherent amplitude that sits in one mode or the other.")

    @property
    def normalization(self) -> float:
        return ecs_normalization(self.alpha)


def ecs_normalization(alpha: complex) -> float:
    return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-(abs(alpha) ** 2))))


def css_normalization(beta: complex) -> float:
    return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(beta) ** 2)))


def coherent_amplitudes(beta: complex, cutoff: int) -> ComplexArray:
    """Coefficients ``e^{-|beta|^2/2} beta^n / sqrt(n!)`` for n in 0..cutoff, evaluated in log space."""
    amps = np.zeros(cutoff + 1, dtype=np.complex128)

    if beta == 0:
        amps[0] = 1.0
        return amps

    n = np.arange(cutoff + 1, dtype=np.float64)
    magnitude = abs(beta)
    log_modulus = -(magnitude**2) / 2.0 + n * math.log(magnitude) - 0.5 * log_factorials(cutoff)

    return np.exp(log_modulus) * np.exp(1j * n * cmath.phase(beta))


def squeezed_vacuum_amplitudes(r: float, theta: float, cutoff: int) -> ComplexArray:
    """Even-only coefficients of the squeezed vacuum; odd entries are exactly zero."""
    amps = np.zeros(cutoff + 1, dtype=np.complex128)

    if r == 0:
        amps[0] = 1.0
        return amps

    log_fact = log_factorials(cutoff)
    m = np.arange(cutoff // 2 + 1)
    log_modulus = (
        -0.5 * math.log(math.cosh(r)) + 0.5 * log_fact[2 * m] - m * math.log(2.0) - log_fact[m] + m * math.log(math.tanh(r))
    )
    signs = np.where(m % 2 == 0, 1.0, -1.0)

    amps[2 * m] = signs * np.exp(log_modulus) * np.exp(1j * m * theta)
    return amps


def _maybe_adaptive[S: (ModeAmplitudes, TwoModeAmplitudes)](
    build: Callable[[int], S],
    cutoff: int,
    adaptive: bool,
    tail_tol: float,
) -> S:
    if cutoff < 0:
        msg = f"Cutoff must be nonnegative, got {cutoff}."
        raise DimensionError(msg)

    if adaptive:
        return adaptive_cutoff(build, cutoff=cutoff, tail_tol=tail_tol)

    return build(cutoff)


def coherent(
    p: CoherentParams,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    adaptive: bool = False,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ModeAmplitudes:
    def build(size: int) -> ModeAmplitudes:
        return ModeAmplitudes(amps=coherent_amplitudes(p.amplitude, size))

    return _maybe_adaptive(build, cutoff, adaptive, tail_tol)


def squeezed_vacuum(
    p: SqueezeParams,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    adaptive: bool = False,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ModeAmplitudes:
    def build(size: int) -> ModeAmplitudes:
        return ModeAmplitudes(amps=squeezed_vacuum_amplitudes(p.r, p.theta, size))

    return _maybe_adaptive(build, cutoff, adaptive, tail_tol)


def css(
    p: CoherentParams,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    adaptive: bool = False,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ModeAmplitudes:
    """The even cat state ``N~_beta (|beta> + |-beta>)``."""
    beta = p.amplitude

    def build(size: int) -> ModeAmplitudes:
        parity = np.where(np.arange(size + 1) % 2 == 0, 2.0, 0.0)
        return ModeAmplitudes(amps=css_normalization(beta) * parity * coherent_amplitudes(beta, size))

    return _maybe_adaptive(build, cutoff, adaptive, tail_tol)


def ecs(
    p: EcsParams,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    adaptive: bool = False,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> TwoModeAmplitudes:
    def build(size: int) -> TwoModeAmplitudes:
        branch = coherent_amplitudes(p.alpha, size)
        amps = np.zeros((size + 1, size + 1), dtype=np.complex128)
        amps[:, 0] += branch
        amps[0, :] += branch
        return TwoModeAmplitudes(amps=p.normalization * amps)

    return _maybe_adaptive(build, cutoff, adaptive, tail_tol)


def noon(n: int, cutoff: int = DEFAULT_CUTOFF, relative_phase: float = 0.0) -> TwoModeAmplitudes:
    """``(|N,0> + e^{i phase} |0,N>) / sqrt(2)``."""
    if n < 1:
        msg = f"NOON states need at least one photon, got N={n}."
        raise DomainError(msg)

    if n > cutoff:
        msg = f"NOON state with N={n} does not fit below cutoff {cutoff}."
        raise DimensionError(msg)

    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    amps[n, 0] = 1.0 / math.sqrt(2.0)
    amps[0, n] = cmath.exp(1j * relative_phase) / math.sqrt(2.0)
    return TwoModeAmplitudes(amps=amps, normalized=True)


def vacuum(cutoff: int = DEFAULT_CUTOFF) -> ModeAmplitudes:
    return fock_state(0, cutoff)


def mean_photon_number(state: AnyAmplitudes, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Mean total photon number, summed over both modes for two-mode states."""
    mass = tail_mass(state)
    if mass > TRUNCATION_WARNING_FACTOR * tail_tol:
        logfire.warn(
            "Mean photon number of a state truncated at {cutoff} misses tail mass {tail_mass}",
            cutoff=state.cutoff,
            tail_mass=mass,
            tail_tol=tail_tol,
        )

    probabilities = np.abs(state.amps) ** 2

    if isinstance(state, ModeAmplitudes):
        return float(np.arange(state.cutoff + 1) @ probabilities)

    m, n = np.indices(probabilities.shape)
    return float(np.sum((m + n) * probabilities))


def ecs_mean_photons(alpha: complex) -> float:
    """Mean total photon number of the ECS, ``|alpha|^2 / (1 + e^{-|alpha|^2})``."""
    alpha_squared = abs(alpha) ** 2
    return alpha_squared / (1.0 + math.exp(-alpha_squared))


def ecs_alpha_squared(n_bar: float) -> float:
    """Invert :func:`ecs_mean_photons`: the ``|alpha|^2`` whose ECS carries ``n_bar`` photons on average."""
    if n_bar < 0:
        msg = f"Mean photon number must be nonnegative, got {n_bar}."
        raise DomainError(msg)

    if n_bar == 0:
        return 0.0

    # n_bar lies between |alpha|^2 / 2 and |alpha|^2.
    root: float = brentq(lambda x: x / (1.0 + math.exp(-x)) - n_bar, n_bar, 2.0 * n_bar, xtol=1e-15, rtol=1e-14)  # pyright: ignore[reportAssignmentType]
    return root
