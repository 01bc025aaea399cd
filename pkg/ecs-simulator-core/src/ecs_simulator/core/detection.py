"""The measurement chain: binomial loss, multiplexed click detection and the similarity sweep.

Each mode is split over ``D`` on/off detectors; a detector clicks when it receives at
least one photon, and the click count stands in for the photon number.
"""

import math
from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache, partial
from typing import Literal, Self

import logfire
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import brentq
from scipy.stats import binom

from ecs_simulator.core.errors import DomainError
from ecs_simulator.core.fock import DEFAULT_CUTOFF, DEFAULT_TAIL_TOL, JointPND, ProbabilityTable, RealArray, renormalize
from ecs_simulator.core.metrics import optimal_squeezing, similarity
from ecs_simulator.core.optics import Mode, joint_pnd, mix_cs_sv
from ecs_simulator.core.states import CoherentParams, EcsParams, SqueezeParams, ecs
from ecs_simulator.core.sweeps import map_points, uniform_grid

DEFAULT_DETECTORS = 8
DEFAULT_TRANSMISSION = 0.1
WEIGHT_SUM_TOL = 1e-12

ClickMethod = Literal["auto", "closed-form", "dynamic"]
SweepSchedule = Literal["linear-beta", "fixed-nbar"]


class DetectorConfig(BaseModel):
    """Transmission and splitter weights of the two multiplexed detectors."""

    model_config = ConfigDict(frozen=True)

    detectors: int = Field(default=DEFAULT_DETECTORS, ge=1, description="On/off detectors behind each mode's splitter.")
    weights_c: tuple[float, ...] | None = Field(default=None, description="Splitter weights for mode c; uniform when unset.")
    weights_d: tuple[float, ...] | None = Field(default=None, description="Splitter weights for mode d; uniform when unset.")
    eta_c: float = Field(default=DEFAULT_TRANSMISSION, ge=0.0, le=1.0, description="Transmission of mode c before detection.")
    eta_d: float = Field(default=DEFAULT_TRANSMISSION, ge=0.0, le=1.0, description="Transmission of mode d before detection.")

    @model_validator(mode="after")
    def validate_weights(self) -> Self:
        for name, weights in (("weights_c", self.weights_c), ("weights_d", self.weights_d)):
            if weights is None:
                continue

            if len(weights) != self.detectors:
                msg = f"{name} has {len(weights)} entries for {self.detectors} detectors."
                raise ValueError(msg)

            if any(weight < 0 or not math.isfinite(weight) for weight in weights):
                msg = f"{name} must be finite and nonnegative."
                raise ValueError(msg)

            if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
                msg = f"{name} sums to {math.fsum(weights)!r}, not 1."
                raise ValueError(msg)

        return self

    @classmethod
    def lossless(cls, detectors: int = DEFAULT_DETECTORS) -> Self:
        return cls(detectors=detectors, eta_c=1.0, eta_d=1.0)

    def weights(self, mode: Mode) -> tuple[float, ...]:
        chosen = self.weights_c if mode == "c" else self.weights_d
        return chosen if chosen is not None else (1.0 / self.detectors,) * self.detectors

    def is_uniform(self, mode: Mode) -> bool:
        return (self.weights_c if mode == "c" else self.weights_d) is None

    def eta(self, mode: Mode) -> float:
        return self.eta_c if mode == "c" else self.eta_d


class ClickPND(BaseModel):
    """Joint distribution of click counts ``(k_c, k_d)``, each in 0..D."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: ProbabilityTable

    @property
    def detectors(self) -> int:
        return self.probs.shape[0] - 1

    def total(self) -> float:
        return float(self.probs.sum())


def thinning_matrix(cutoff: int, eta: float) -> RealArray:
    """``L[m', m] = C(m', m) eta^m (1 - eta)^(m' - m)``."""
    photons = np.arange(cutoff + 1)
    return binom.pmf(photons[np.newaxis, :], photons[:, np.newaxis], eta)  # pyright: ignore[reportAny]


def loss_thinning(p: JointPND, eta_c: float, eta_d: float) -> JointPND:
    """Independent binomial loss on each mode."""
    for eta in (eta_c, eta_d):
        if not 0.0 <= eta <= 1.0:
            msg = f"Transmission must lie in [0, 1], got {eta}."
            raise DomainError(msg)

    thinned = thinning_matrix(p.cutoff, eta_c).T @ p.probs @ thinning_matrix(p.cutoff, eta_d)
    return JointPND(probs=thinned)


def _uniform_click_row(n: int, detectors: int) -> RealArray:
    """``P(k|n) = C(D,k) sum_j (-1)^j C(k,j) ((k-j)/D)^n``, summed in exact integers."""
    row = np.zeros(detectors + 1)
    denominator = detectors**n

    for k in range(min(n, detectors) + 1):
        numerator = math.comb(detectors, k) * sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1))
        row[k] = float(Fraction(numerator, denominator))

    return row


def _dynamic_click_row(n: int, weights: Sequence[float]) -> RealArray:
    """Walk the detectors in order; photons still unplaced split binomially onto the current one."""
    detectors = len(weights)
    remaining_weight = np.cumsum(np.asarray(weights, dtype=np.float64)[::-1])[::-1]
    photons = np.arange(n + 1)

    # table[r, k]: r photons left to place, k clicks so far
    table = np.zeros((n + 1, detectors + 1))
    table[n, 0] = 1.0

    for index, weight in enumerate(weights):
        is_last = index == detectors - 1
        share = 1.0 if is_last else (weight / remaining_weight[index] if remaining_weight[index] > 0 else 0.0)
        share = min(share, 1.0)

        # split[r, s]: probability that s of r photons land on this detector
        split: RealArray = binom.pmf(photons[np.newaxis, :], photons[:, np.newaxis], share)  # pyright: ignore[reportAny]

        # landed[r', r]: probability that r - r' >= 1 of r photons land here
        left, before = np.indices((n + 1, n + 1))
        landed = np.where(before > left, split[before, np.clip(before - left, 0, n)], 0.0)

        stepped = split[:, :1] * table
        stepped[:, 1:] += landed @ table[:, :-1]
        table = stepped

    return table[0]


@lru_cache(maxsize=128)
def _click_matrix(cutoff: int, weights: tuple[float, ...], uniform: bool, method: ClickMethod) -> RealArray:
    detectors = len(weights)

    if method == "closed-form" and not uniform:
        msg = "The closed-form click distribution needs uniform splitter weights."
        raise DomainError(msg)

    use_closed_form = method == "closed-form" or (method == "auto" and uniform)
    rows = [_uniform_click_row(n, detectors) if use_closed_form else _dynamic_click_row(n, weights) for n in range(cutoff + 1)]

    matrix = np.stack(rows)
    matrix.flags.writeable = False
    return matrix


def click_matrix(cutoff: int, cfg: DetectorConfig, mode: Mode, method: ClickMethod = "auto") -> RealArray:
    """Conditional click probabilities ``M[n, k] = P(k clicks | n photons)`` for n in 0..cutoff."""
    return _click_matrix(cutoff, cfg.weights(mode), cfg.is_uniform(mode), method)


def click_distribution_mode(n: int, cfg: DetectorConfig, mode: Mode = "c", method: ClickMethod = "auto") -> RealArray:
    """Click-count distribution over k in 0..D for ``n`` photons reaching one mode's detectors."""
    if n < 0:
        msg = f"Photon number must be nonnegative, got {n}."
        raise DomainError(msg)

    return click_matrix(n, cfg, mode, method)[n]


def apply_click_model(p: JointPND, cfg: DetectorConfig, method: ClickMethod = "auto") -> ClickPND:
    """Loss on each mode, then the multiplexed click model."""
    lossy = loss_thinning(p, cfg.eta_c, cfg.eta_d) if min(cfg.eta_c, cfg.eta_d) < 1.0 else p
    clicks = click_matrix(p.cutoff, cfg, "c", method).T @ lossy.probs @ click_matrix(p.cutoff, cfg, "d", method)

    return ClickPND(probs=clicks)


def detected_ecs_reference(alpha: complex, cfg: DetectorConfig, cutoff: int = DEFAULT_CUTOFF) -> ClickPND:
    """The click statistics a perfect ECS would produce through the same detection chain."""
    return apply_click_model(joint_pnd(renormalize(ecs(EcsParams(alpha=alpha), cutoff))), cfg)


def sample_click_distribution(
    n: int,
    cfg: DetectorConfig,
    mode: Mode = "c",
    samples: int = 1_000_000,
    rng: np.random.Generator | None = None,
) -> RealArray:
    """Monte-Carlo estimate of :func:`click_distribution_mode` from explicit photon-to-detector assignments."""
    if samples < 1:
        msg = f"Need at least one sample, got {samples}."
        raise ValueError(msg)

    rng = rng or np.random.default_rng()
    detectors = cfg.detectors

    with logfire.span("sample {samples} assignments of {n} photons to {detectors} detectors", samples=samples, n=n, detectors=detectors):
        if n == 0:
            clicks = np.zeros(samples, dtype=np.int64)
        else:
            assignments = np.sort(rng.choice(detectors, size=(samples, n), p=np.asarray(cfg.weights(mode))), axis=1)
            clicks = 1 + np.count_nonzero(np.diff(assignments, axis=1), axis=1)

    return np.bincount(clicks, minlength=detectors + 1)[: detectors + 1] / samples


def total_variation(p: npt.ArrayLike, q: npt.ArrayLike) -> float:
    """``sum |p - q| / 2`` over the common grid, padding the shorter table with zeros."""
    first = np.atleast_1d(np.asarray(p, dtype=np.float64))
    second = np.atleast_1d(np.asarray(q, dtype=np.float64))

    if first.ndim != second.ndim:
        msg = f"Cannot compare tables of dimension {first.ndim} and {second.ndim}."
        raise ValueError(msg)

    shape = tuple(max(a, b) for a, b in zip(first.shape, second.shape, strict=True))
    padded_first = np.zeros(shape)
    padded_second = np.zeros(shape)
    padded_first[tuple(slice(0, size) for size in first.shape)] = first
    padded_second[tuple(slice(0, size) for size in second.shape)] = second

    return float(np.abs(padded_first - padded_second).sum() / 2.0)


class SimilaritySweepSpec(BaseModel):
    """Grid over the squeezed-vacuum fraction ``x = sinh(2r) / |alpha|^2`` and the coherent amplitude schedule."""

    model_config = ConfigDict(frozen=True)

    detector: DetectorConfig = Field(default_factory=DetectorConfig)
    x_max: float = Field(default=2.0, gt=0.0, description="Largest squeezed-vacuum fraction of the grid.")
    step: float = Field(default=0.05, gt=0.0, description="Grid spacing in x.")
    schedule: SweepSchedule = Field(default="linear-beta", description="How |beta| varies along the grid.")
    beta_start: float = Field(default=0.75, gt=0.0, description="|beta| at x = 0 for the linear-beta schedule.")
    beta_end: float = Field(default=0.45, gt=0.0, description="|beta| at x = x_max for the linear-beta schedule.")
    n_bar: float = Field(default=0.15, gt=0.0, description="Input mean photon number held fixed by the fixed-nbar schedule.")
    phi: float = Field(default=0.0, description="Phase of the coherent amplitude.")
    min_total_clicks: int = Field(default=0, ge=0, description="Compare only click cells with k_c + k_d at least this large.")
    cutoff: int = Field(default=DEFAULT_CUTOFF, ge=1)
    tail_tol: float = Field(default=DEFAULT_TAIL_TOL, gt=0.0)

    def grid(self) -> list[float]:
        return uniform_grid(self.x_max, self.step)

    def beta_at(self, x: float) -> float:
        """|beta| at squeezed-vacuum fraction ``x``, which is clamped to ``[0, x_max]``."""
        x = min(max(x, 0.0), self.x_max)

        if self.schedule == "linear-beta":
            return self.beta_start + (self.beta_end - self.beta_start) * x / self.x_max

        return math.sqrt(_fixed_nbar_beta_squared(x, self.n_bar))


def _fixed_nbar_beta_squared(x: float, n_bar: float) -> float:
    """``|beta|^2`` such that ``|beta|^2 + sinh^2 r = n_bar`` with ``sinh(2r) = 2 x |beta|^2``."""

    def excess(b: float) -> float:
        return b + (math.sqrt(1.0 + (2.0 * x * b) ** 2) - 1.0) / 2.0 - n_bar

    root: float = brentq(excess, 0.0, n_bar, xtol=1e-15, rtol=1e-14)  # pyright: ignore[reportAssignmentType]
    return root


class SimilarityPoint(BaseModel):
    x: float
    similarity: float
    n_bar: float = Field(description="Input mean photon number |beta|^2 + sinh^2 r.")
    beta: float
    r: float
    cutoff: int
    tail_mass: float


def _restrict(clicks: ClickPND, min_total_clicks: int) -> RealArray:
    if min_total_clicks == 0:
        return clicks.probs

    k_c, k_d = np.indices(clicks.probs.shape)
    return np.where(k_c + k_d >= min_total_clicks, clicks.probs, 0.0)


def similarity_point(spec: SimilaritySweepSpec, x: float) -> SimilarityPoint:
    """Detected similarity between the coherent plus squeezed vacuum output and a perfect ECS at one grid point."""
    beta = spec.beta_at(x)
    alpha = math.sqrt(2.0) * beta * complex(math.cos(spec.phi), math.sin(spec.phi))
    r = math.asinh(x * abs(alpha) ** 2) / 2.0
    squeeze = SqueezeParams(r=r, theta=optimal_squeezing(alpha).theta)

    mixed = mix_cs_sv(CoherentParams(magnitude=beta, phase=spec.phi), squeeze, spec.cutoff, tail_tol=spec.tail_tol)
    detected = apply_click_model(joint_pnd(mixed.state), spec.detector)
    reference = detected_ecs_reference(alpha, spec.detector, mixed.cutoff)

    return SimilarityPoint(
        x=x,
        similarity=similarity(_restrict(detected, spec.min_total_clicks), _restrict(reference, spec.min_total_clicks)),
        n_bar=mixed.input_mean_photons,
        beta=beta,
        r=r,
        cutoff=mixed.cutoff,
        tail_mass=mixed.tail_mass,
    )


def similarity_sweep(spec: SimilaritySweepSpec | None = None, workers: int = 1) -> list[SimilarityPoint]:
    """Detected similarity to the ECS reference along the squeezed-vacuum fraction grid, in grid order."""
    spec = spec or SimilaritySweepSpec()
    grid = spec.grid()

    with logfire.span("similarity sweep over {points} points ({schedule})", points=len(grid), schedule=spec.schedule):
        return map_points(partial(similarity_point, spec), grid, workers)
