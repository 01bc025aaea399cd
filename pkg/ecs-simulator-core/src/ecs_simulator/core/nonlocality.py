"""Phase-space projector expectations and the third Janssens functional J3.

``Q`` values are contractions of the pure two-mode amplitudes with coherent-state
bras, ``<mu|j> = e^{-|mu|^2/2} conj(mu)^j / sqrt(j!)``. Single-mode terms act on
mode ``c``; joint terms take their first point in mode ``c`` and the second in ``d``.
"""

import cmath
import math
from collections.abc import Sequence
from functools import lru_cache, partial
from typing import Annotated, Literal

import logfire
import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field
from scipy.optimize import minimize

from ecs_simulator.core.fock import (
    DEFAULT_CUTOFF,
    DEFAULT_TAIL_TOL,
    ComplexArray,
    RealArray,
    TwoModeAmplitudes,
    log_factorials,
    norm_squared,
    renormalize,
    tail_mass,
    trim_cutoff,
)
from ecs_simulator.core.metrics import optimal_squeezing
from ecs_simulator.core.optics import Mode, mix_cs_sv, phase_shift
from ecs_simulator.core.states import CoherentParams, EcsParams, ecs, ecs_alpha_squared
from ecs_simulator.core.sweeps import map_points

DEFAULT_RESTARTS = 64
DEFAULT_SEED = 20170601
DEFAULT_OPTIMIZER_TOL = 1e-9
DEFAULT_MAX_ITERATIONS = 4000
SEARCH_BOUND = 3.0
START_RADIUS = 1.5

PARAMETER_COUNT = 8

Direction = Literal["min", "max"]
J3Source = Literal["ecs", "mixed"]


def _finite(value: complex) -> complex:
    if not cmath.isfinite(value):
        msg = f"Phase-space points must be finite, got {value!r}."
        raise ValueError(msg)
    return value


PhaseSpacePoint = Annotated[complex, AfterValidator(_finite)]


class J3Params(BaseModel):
    """The four phase-space points of J3."""

    model_config = ConfigDict(frozen=True)

    alpha: PhaseSpacePoint
    beta: PhaseSpacePoint
    gamma: PhaseSpacePoint
    delta: PhaseSpacePoint

    def points(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def to_vector(self) -> RealArray:
        """Real parts followed by imaginary parts, the layout the optimizer searches over."""
        points = np.array(self.points(), dtype=np.complex128)
        return np.concatenate([points.real, points.imag])

    @classmethod
    def from_vector(cls, vector: Sequence[float] | RealArray) -> "J3Params":
        values = np.asarray(vector, dtype=np.float64)
        if values.shape != (PARAMETER_COUNT,):
            msg = f"Expected {PARAMETER_COUNT} real parameters, got shape {values.shape}."
            raise ValueError(msg)

        alpha, beta, gamma, delta = (complex(values[i], values[i + 4]) for i in range(4))
        return cls(alpha=alpha, beta=beta, gamma=gamma, delta=delta)

    @classmethod
    def uniform(cls, mu: complex) -> "J3Params":
        return cls(alpha=mu, beta=mu, gamma=mu, delta=mu)


class J3Result(BaseModel):
    """Best extremum found over all restarts."""

    value: float
    params: J3Params
    direction: Direction
    restarts: int = Field(ge=1)
    seed: int
    converged: bool = Field(description="Whether the local search that produced the best value met its tolerance.")
    iterations: int = Field(description="Iterations used by the local search that produced the best value.")


class J3Extrema(BaseModel):
    minimum: J3Result
    maximum: J3Result


class J3Settings(BaseModel):
    """Optimizer and truncation settings shared by every point of a J3 curve."""

    model_config = ConfigDict(frozen=True)

    restarts: int = Field(default=DEFAULT_RESTARTS, ge=1, description="Number of seeded local searches per direction.")
    seed: int = Field(default=DEFAULT_SEED, description="Root of the per-restart random substreams.")
    tol: float = Field(default=DEFAULT_OPTIMIZER_TOL, gt=0.0, description="Absolute tolerance on parameters and value.")
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    cutoff: int = Field(default=DEFAULT_CUTOFF, ge=1)
    tail_tol: float = Field(default=DEFAULT_TAIL_TOL, gt=0.0)
    adaptive_cutoff: bool = Field(default=False, description="Grow the ECS cutoff to meet tail_tol; the mixed state always grows it.")


class J3CurvePoint(BaseModel):
    n_bar: float
    source: J3Source
    minimum: J3Result
    maximum: J3Result
    cutoff: int
    tail_mass: float

    @property
    def converged(self) -> bool:
        return self.minimum.converged and self.maximum.converged


@lru_cache(maxsize=64)
def _inverse_sqrt_factorials(cutoff: int) -> RealArray:
    return np.exp(-0.5 * log_factorials(cutoff))


def _bras(points: Sequence[complex] | ComplexArray, cutoff: int) -> ComplexArray:
    """Row ``i`` holds ``<mu_i|j>`` for j in 0..cutoff."""
    conjugates = np.conj(np.asarray(points, dtype=np.complex128))[:, np.newaxis]

    # powers[i, j] = conj(mu_i)^j
    powers = np.ones((conjugates.shape[0], cutoff + 1), dtype=np.complex128)
    powers[:, 1:] = conjugates
    powers = np.cumprod(powers, axis=1)

    return np.exp(-np.abs(conjugates) ** 2 / 2.0) * powers * _inverse_sqrt_factorials(cutoff)


def q_single(state: TwoModeAmplitudes, mode: Mode, mu: complex) -> float:
    """``<psi| (|mu><mu| (x) I) |psi>`` with the projector on ``mode``."""
    bra = _bras([mu], state.cutoff)[0]
    reduced = bra @ state.amps if mode == "c" else state.amps @ bra
    return float(np.sum(np.abs(reduced) ** 2))


def q_joint(state: TwoModeAmplitudes, mu: complex, nu: complex) -> float:
    """``|<mu, nu|psi>|^2``, mu on mode c and nu on mode d."""
    bras = _bras([mu, nu], state.cutoff)
    return float(abs(bras[0] @ state.amps @ bras[1]) ** 2)


def _j3_from_points(amps: ComplexArray, points: Sequence[complex] | ComplexArray) -> float:
    bras = _bras(points, amps.shape[0] - 1)
    overlaps = np.abs(bras @ amps @ bras.T) ** 2

    single = float(np.sum(np.abs(bras[0] @ amps) ** 2))
    return float(single - overlaps[0, 1] - overlaps[0, 2] - overlaps[0, 3] + overlaps[1, 2] + overlaps[1, 3] + overlaps[2, 3])


def j3(state: TwoModeAmplitudes, p: J3Params) -> float:
    """``Q(a) - Q(a,b) - Q(a,g) - Q(a,d) + Q(b,g) + Q(b,d) + Q(g,d)``."""
    return _j3_from_points(state.amps, p.points())


def restart_starts(seed: int, restarts: int) -> RealArray:
    """Start points of every restart, drawn uniformly in ``[-1.5, 1.5]^8`` from the substream ``(seed, i)``."""
    return np.stack([np.random.default_rng([seed, i]).uniform(-START_RADIUS, START_RADIUS, PARAMETER_COUNT) for i in range(restarts)])


def j3_extremize(
    state: TwoModeAmplitudes,
    direction: Direction = "min",
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_OPTIMIZER_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> J3Result:
    """Nelder-Mead from each seeded start within ``|param| <= 3``; the best local result wins.

    Non-convergence of the winning search is logged and flagged on the result.
    """
    if restarts < 1:
        msg = f"restarts must be at least 1, got {restarts}."
        raise ValueError(msg)

    sign = 1.0 if direction == "min" else -1.0

    amps = state.amps

    def objective(vector: RealArray) -> float:
        return sign * _j3_from_points(amps, vector[:4] + 1j * vector[4:])

    best_value = math.inf
    best_vector: RealArray | None = None
    best_converged = False
    best_iterations = 0

    with logfire.span("J3 {direction} over {restarts} restarts", direction=direction, restarts=restarts, seed=seed, cutoff=state.cutoff):
        for start in restart_starts(seed, restarts):
            result = minimize(
                objective,
                start,
                method="Nelder-Mead",
                bounds=[(-SEARCH_BOUND, SEARCH_BOUND)] * PARAMETER_COUNT,
                options={"xatol": tol, "fatol": tol, "maxiter": max_iterations, "adaptive": True},
            )

            value = float(result.fun)  # pyright: ignore[reportAny]
            if value < best_value:
                best_value = value
                best_vector = np.asarray(result.x, dtype=np.float64)  # pyright: ignore[reportAny]
                best_converged = bool(result.success)  # pyright: ignore[reportAny]
                best_iterations = int(result.nit)  # pyright: ignore[reportAny]

        if best_vector is None:
            msg = "The optimizer produced no finite J3 value."
            raise RuntimeError(msg)

        params = J3Params.from_vector(best_vector)

        if not best_converged:
            logfire.warn(
                "J3 {direction} search did not converge within {max_iterations} iterations",
                direction=direction,
                max_iterations=max_iterations,
                value=sign * best_value,
            )

    return J3Result(
        value=j3(state, params),
        params=params,
        direction=direction,
        restarts=restarts,
        seed=seed,
        converged=best_converged,
        iterations=best_iterations,
    )


def j3_extrema(state: TwoModeAmplitudes, settings: J3Settings | None = None) -> J3Extrema:
    settings = settings or J3Settings()
    options = {"restarts": settings.restarts, "seed": settings.seed, "tol": settings.tol, "max_iterations": settings.max_iterations}

    return J3Extrema(
        minimum=j3_extremize(state, "min", **options),
        maximum=j3_extremize(state, "max", **options),
    )


def j3_state(n_bar: float, source: J3Source, settings: J3Settings | None = None) -> tuple[TwoModeAmplitudes, float]:
    """The state tested at mean photon number ``n_bar``, after a pi/2 phase shift on mode d, and its tail mass.

    The state is cut back to the smallest cutoff that keeps the discarded probability within ``tail_tol``
    on top of the construction tail; the returned tail mass counts both.
    """
    settings = settings or J3Settings()
    alpha = math.sqrt(ecs_alpha_squared(n_bar))

    if source == "ecs":
        built = ecs(EcsParams(alpha=alpha), settings.cutoff, adaptive=settings.adaptive_cutoff, tail_tol=settings.tail_tol)
        tail = tail_mass(built)
    else:
        mixed = mix_cs_sv(
            CoherentParams(magnitude=alpha / math.sqrt(2.0)),
            optimal_squeezing(alpha),
            settings.cutoff,
            tail_tol=settings.tail_tol,
        )
        built, tail = mixed.state, mixed.tail_mass

    trimmed = trim_cutoff(built, settings.tail_tol)
    tail += norm_squared(built) - norm_squared(trimmed)

    return phase_shift(renormalize(trimmed), "d", math.pi / 2.0), tail


def j3_curve_point(n_bar: float, source: J3Source, settings: J3Settings) -> J3CurvePoint:
    state, tail = j3_state(n_bar, source, settings)
    extrema = j3_extrema(state, settings)

    return J3CurvePoint(
        n_bar=n_bar,
        source=source,
        minimum=extrema.minimum,
        maximum=extrema.maximum,
        cutoff=state.cutoff,
        tail_mass=tail,
    )


def j3_curve(
    n_bar_grid: Sequence[float],
    source: J3Source,
    settings: J3Settings | None = None,
    workers: int = 1,
) -> list[J3CurvePoint]:
    """Both J3 extrema at every grid point, in grid order; ``workers`` processes share the grid."""
    settings = settings or J3Settings()

    with logfire.span("J3 curve for {source} over {points} points", source=source, points=len(n_bar_grid), workers=workers):
        return map_points(partial(j3_curve_point, source=source, settings=settings), list(n_bar_grid), workers)
