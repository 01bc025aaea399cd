"""Fidelity between the mixed state and the ECS, the optimal squeezing, and the similarity of measured tables."""

import cmath
import math
from collections.abc import Sequence

import logfire
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field

from ecs_simulator.core.errors import DomainError
from ecs_simulator.core.fock import (
    DEFAULT_CUTOFF,
    DEFAULT_TAIL_TOL,
    JointPND,
    ModeAmplitudes,
    RealArray,
    TwoModeAmplitudes,
    inner_product,
    inner_product2,
    norm_squared,
    renormalize,
    tail_mass,
)
from ecs_simulator.core.optics import mix_cs_sv
from ecs_simulator.core.states import (
    CoherentParams,
    EcsParams,
    SqueezeParams,
    css,
    ecs,
    ecs_alpha_squared,
    vacuum,
)

FIDELITY_DISCREPANCY_TOL = 1e-6


class FidelityReport(BaseModel):
    """Closed-form and numeric fidelity of the mixed state to the ECS, side by side."""

    closed_form: float = Field(ge=0.0, le=1.0 + 1e-12)
    numeric: float = Field(ge=0.0, le=1.0 + 1e-12)
    cutoff: int = Field(description="Per-mode cutoff of the numeric evaluation.")
    discrepancy: float = Field(description="|closed_form - numeric|.")


class FidelityCurvePoint(BaseModel):
    n_bar: float
    alpha_squared: float
    f_opt: float = Field(description="Fidelity with the optimal squeezed vacuum.")
    f_vacuum: float = Field(description="Fidelity when the squeezed vacuum is replaced by vacuum.")
    tail_mass: float = Field(default=0.0, description="Probability the truncated cat state behind the vacuum baseline discards.")


def fidelity_closed_form(alpha: complex, sv: SqueezeParams) -> float:
    """``F = e^{-(|alpha|^2/2) cos(theta - 2 phi) tanh r} / (cosh r cosh(|alpha|^2/2))`` with phi the phase of alpha."""
    half = abs(alpha) ** 2 / 2.0
    phi = cmath.phase(alpha)
    exponent = -half * math.cos(sv.theta - 2.0 * phi) * math.tanh(sv.r)

    return math.exp(exponent) / (math.cosh(sv.r) * math.cosh(half))


def optimal_squeezing(alpha: complex) -> SqueezeParams:
    """``r = arcsinh(|alpha|^2) / 2`` and ``theta = 2 phi + pi`` (mod 2 pi)."""
    theta = math.fmod(2.0 * cmath.phase(alpha) + math.pi, 2.0 * math.pi)
    if theta < 0:
        theta += 2.0 * math.pi

    return SqueezeParams(r=math.asinh(abs(alpha) ** 2) / 2.0, theta=theta)


def two_mode_fidelity(a: TwoModeAmplitudes, b: TwoModeAmplitudes) -> float:
    """``|<A|B>|^2`` after rescaling both states to unit norm."""
    if norm_squared(a) == 0.0 or norm_squared(b) == 0.0:
        msg = "Fidelity is undefined for a state with zero norm."
        raise DomainError(msg)

    return abs(inner_product2(renormalize(a), renormalize(b))) ** 2


def _baseline_cat(alpha: complex, cutoff: int, adaptive: bool) -> ModeAmplitudes:
    return css(CoherentParams.from_complex(alpha / math.sqrt(2.0)), cutoff, adaptive=adaptive)


def vacuum_baseline_fidelity(alpha: complex, cutoff: int = DEFAULT_CUTOFF, *, adaptive: bool = False) -> float:
    """Fidelity obtained when the squeezed vacuum port is left empty, ``|<CSS(alpha/sqrt 2)|0>|^2``."""
    cat = _baseline_cat(alpha, cutoff, adaptive)
    return abs(inner_product(cat, vacuum(cat.cutoff))) ** 2


def fidelity_report(
    alpha: complex,
    sv: SqueezeParams,
    cutoff: int = DEFAULT_CUTOFF,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> FidelityReport:
    """Evaluate the fidelity both ways; disagreement above 1e-6 is logged as a warning."""
    mixed = mix_cs_sv(CoherentParams.from_complex(alpha / math.sqrt(2.0)), sv, cutoff, tail_tol=tail_tol)
    reference = ecs(EcsParams(alpha=alpha), mixed.cutoff)

    closed_form = fidelity_closed_form(alpha, sv)
    numeric = two_mode_fidelity(reference, mixed.state)
    discrepancy = abs(closed_form - numeric)

    if discrepancy > FIDELITY_DISCREPANCY_TOL:
        logfire.warn(
            "Closed-form fidelity {closed_form} and numeric fidelity {numeric} disagree by {discrepancy}",
            closed_form=closed_form,
            numeric=numeric,
            discrepancy=discrepancy,
            cutoff=mixed.cutoff,
        )

    return FidelityReport(closed_form=closed_form, numeric=numeric, cutoff=mixed.cutoff, discrepancy=discrepancy)


def fidelity_curve(
    n_bar_grid: Sequence[float],
    phi: float = 0.0,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    adaptive: bool = False,
) -> list[FidelityCurvePoint]:
    """Optimal-squeezing fidelity and the vacuum baseline against the ECS mean photon number."""
    points: list[FidelityCurvePoint] = []

    with logfire.span("fidelity curve over {points} mean photon numbers", points=len(n_bar_grid), phi=phi):
        for n_bar in n_bar_grid:
            alpha_squared = ecs_alpha_squared(n_bar)
            alpha = cmath.rect(math.sqrt(alpha_squared), phi)
            cat = _baseline_cat(alpha, cutoff, adaptive)

            points.append(
                FidelityCurvePoint(
                    n_bar=n_bar,
                    alpha_squared=alpha_squared,
                    f_opt=fidelity_closed_form(alpha, optimal_squeezing(alpha)),
                    f_vacuum=vacuum_baseline_fidelity(alpha, cutoff, adaptive=adaptive),
                    tail_mass=tail_mass(cat),
                )
            )

    return points


def fidelity_grid(alpha: complex, r_grid: npt.ArrayLike, theta_grid: npt.ArrayLike) -> RealArray:
    """Closed-form fidelity on an (r, theta) mesh, rows indexed by r."""
    r = np.asarray(r_grid, dtype=np.float64)[:, np.newaxis]
    theta = np.asarray(theta_grid, dtype=np.float64)[np.newaxis, :]
    half = abs(alpha) ** 2 / 2.0

    return np.exp(-half * np.cos(theta - 2.0 * cmath.phase(alpha)) * np.tanh(r)) / (np.cosh(r) * math.cosh(half))


def _as_table(p: JointPND | npt.ArrayLike) -> RealArray:
    table: RealArray = p.probs if isinstance(p, JointPND) else np.asarray(p, dtype=np.float64)

    if table.ndim == 1:
        table = table[:, np.newaxis]

    if np.any(table < 0):
        msg = "Similarity needs nonnegative tables."
        raise DomainError(msg)

    return table


def similarity(p: JointPND | npt.ArrayLike, q: JointPND | npt.ArrayLike) -> float:
    """Squared Bhattacharyya coefficient ``(sum sqrt(P Q))^2`` of two tables renormalized on their common grid."""
    first = _as_table(p)
    second = _as_table(q)

    rows = max(first.shape[0], second.shape[0])
    cols = max(first.shape[1], second.shape[1])
    padded_first = np.zeros((rows, cols))
    padded_second = np.zeros((rows, cols))
    padded_first[: first.shape[0], : first.shape[1]] = first
    padded_second[: second.shape[0], : second.shape[1]] = second

    first_total = padded_first.sum()
    second_total = padded_second.sum()
    if first_total <= 0 or second_total <= 0:
        msg = "Similarity is undefined for a table with empty support."
        raise DomainError(msg)

    coefficient = float(np.sum(np.sqrt((padded_first / first_total) * (padded_second / second_total))))
    return min(coefficient, 1.0) ** 2
