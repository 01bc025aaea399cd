import cmath
import math
import os
import sys
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Literal

import logfire
import numpy as np
import yaml
from cyclopts import App, validators
from cyclopts.parameter import Parameter
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from rich import print as rich_print
from rich.console import Console

from ecs_simulator.cli.records import OutputFormat, SeriesRecord, SweepConfig, build_metadata, output_path, write_record
from ecs_simulator.cli.utils import rich_table_from_records
from ecs_simulator.core.detection import DetectorConfig, SimilaritySweepSpec, click_distribution_mode, sample_click_distribution
from ecs_simulator.core.detection import similarity_sweep as run_similarity_points
from ecs_simulator.core.detection import total_variation
from ecs_simulator.core.errors import EcsSimulatorError
from ecs_simulator.core.fock import DEFAULT_CUTOFF, DEFAULT_TAIL_TOL, ModeAmplitudes, TwoModeAmplitudes, dump_state, tail_mass
from ecs_simulator.core.logging import LogLevel, configure_console_logging, resolve_log_level
from ecs_simulator.core.metrics import fidelity_curve as run_fidelity_points
from ecs_simulator.core.metrics import optimal_squeezing, two_mode_fidelity
from ecs_simulator.core.nonlocality import DEFAULT_MAX_ITERATIONS, DEFAULT_OPTIMIZER_TOL, DEFAULT_RESTARTS, DEFAULT_SEED, J3Settings
from ecs_simulator.core.nonlocality import j3_curve as run_j3_points
from ecs_simulator.core.optics import corner_ratio, joint_pnd, mix_cs_sv, off_corner_mass, per_n_normalized
from ecs_simulator.core.sweeps import uniform_grid
from ecs_simulator.core.states import (
    CoherentParams,
    EcsParams,
    SqueezeParams,
    coherent,
    css,
    ecs,
    ecs_alpha_squared,
    noon,
    squeezed_vacuum,
    vacuum,
)

CONFIG_FILE_NAMES = ["ecs-sim.yml", "ecs-sim.yaml", "ecs-sim.json"]
DEFAULT_WORKERS = os.cpu_count() or 1

StateKind = Literal["coherent", "squeezed", "css", "ecs", "noon", "vacuum"]
PndSource = Literal["mixed", "ecs"]

type Runner = Callable[[SweepConfig], list[SeriesRecord]]


def try_default_configs() -> Path | None:
    """Try to find a default config file."""
    for config in CONFIG_FILE_NAMES:
        if Path(config).exists():
            return Path(config)

    return None


def try_config(config: Path | None) -> Path | None:
    """Use the given config file, else a default one in the working directory, else none."""
    if config:
        if not config.exists():
            msg = f"Config file {config} does not exist."
            raise FileNotFoundError(msg)
        return config

    return try_default_configs()


class ConfigDefaults(BaseModel):
    """Values a config file may supply for the global flags."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    cutoff: int | None = Field(default=None, ge=1)
    adaptive_cutoff: bool | None = None
    tail_tol: float | None = Field(default=None, gt=0.0)
    seed: int | None = None
    output_format: OutputFormat | None = Field(default=None, alias="format")
    workers: int | None = Field(default=None, ge=1)
    log_level: LogLevel | None = None


def load_config_defaults(config: Path | None) -> ConfigDefaults:
    config = try_config(config=config)

    if config is None:
        return ConfigDefaults()

    config_dict: dict[str, Any] | None = yaml.safe_load(config.read_text())

    return ConfigDefaults.model_validate(config_dict or {})


@Parameter(name="*")
@dataclass
class GlobalOptions:
    cutoff: Annotated[int | None, Parameter(help="Per-mode photon-number cutoff.", validator=validators.Number(gte=1))] = None
    adaptive_cutoff: Annotated[bool | None, Parameter(help="Grow the cutoff until the tail mass drops below --tail-tol.")] = None
    tail_tol: Annotated[float | None, Parameter(help="Largest probability truncation may discard.", validator=validators.Number(gt=0))] = None
    out: Annotated[Path | None, Parameter(help="Output file; stdout when omitted.")] = None
    output_format: Annotated[OutputFormat | None, Parameter(name="--format", help="Output format.")] = None
    seed: Annotated[int | None, Parameter(help="Root seed for every stochastic component.")] = None
    workers: Annotated[int | None, Parameter(help="Worker processes for grid points; all CPUs by default.", validator=validators.Number(gte=1))] = None
    config: Annotated[Path | None, Parameter(help="YAML or JSON file with defaults for these flags.")] = None
    log_level: Annotated[LogLevel | None, Parameter(help="Console log level for stderr diagnostics.")] = None


def first[T](*values: T | None) -> T:
    for value in values:
        if value is not None:
            return value

    msg = "Expected at least one value that is not None."
    raise ValueError(msg)


def build_config(
    command: str,
    params: dict[str, Any],
    options: GlobalOptions | None,
    default_format: OutputFormat = "csv",
) -> SweepConfig:
    """Merge flags over config-file values over built-in defaults."""
    options = options or GlobalOptions()
    defaults = load_config_defaults(options.config)

    return SweepConfig.model_validate(
        {
            "command": command,
            "params": params,
            "cutoff": first(options.cutoff, defaults.cutoff, DEFAULT_CUTOFF),
            "adaptive_cutoff": first(options.adaptive_cutoff, defaults.adaptive_cutoff, False),
            "tail_tol": first(options.tail_tol, defaults.tail_tol, DEFAULT_TAIL_TOL),
            "seed": first(options.seed, defaults.seed, DEFAULT_SEED),
            "out": options.out,
            "output_format": first(options.output_format, defaults.output_format, default_format),
            "workers": first(options.workers, defaults.workers, DEFAULT_WORKERS),
            "log_level": resolve_log_level(options.log_level or defaults.log_level),
        }
    )


app: App = App(name="ecs-sim", help="Entangled coherent states from coherent and squeezed vacuum light, in truncated Fock space.")

Positive = validators.Number(gt=0)
NonNegative = validators.Number(gte=0)


@app.command(name="state")
def state(
    kind: Annotated[StateKind, Parameter(help="Which state to build.")],
    *,
    beta: Annotated[float, Parameter(help="|beta| of the coherent and cat states.", validator=NonNegative)] = 0.75,
    alpha: Annotated[float, Parameter(help="|alpha| of the entangled coherent state.", validator=NonNegative)] = 1.0,
    phi: Annotated[float, Parameter(help="Phase of beta or alpha in radians.")] = 0.0,
    r: Annotated[float, Parameter(help="Squeezing parameter.", validator=NonNegative)] = 0.5,
    theta: Annotated[float, Parameter(help="Squeezing phase in radians.")] = 0.0,
    photons: Annotated[int, Parameter(help="Photon number N of the NOON state.", validator=validators.Number(gte=1))] = 2,
    relative_phase: Annotated[float, Parameter(help="Relative phase of the NOON branches.")] = 0.0,
    common: Annotated[GlobalOptions | None, Parameter(name="*")] = None,
) -> SweepConfig:
    """Fock amplitudes of one of the supported states."""
    params = {
        "kind": kind,
        "beta": beta,
        "alpha": alpha,
        "phi": phi,
        "r": r,
        "theta": theta,
        "photons": photons,
        "relative_phase": relative_phase,
    }
    return build_config("state", params, common)


@app.command(name="pnd")
def pnd(
    *,
    beta: Annotated[float | None, Parameter(help="|beta| of the coherent input (default 0.45).", validator=NonNegative)] = None,
    nbar: Annotated[float | None, Parameter(help="Target ECS mean photon number; sets beta = |alpha|/sqrt 2.", validator=NonNegative)] = None,
    phi: Annotated[float, Parameter(help="Phase of beta in radians.")] = 0.0,
    r: Annotated[Literal["optimal"] | float, Parameter(help="Squeezing parameter, or 'optimal'.")] = "optimal",
    theta: Annotated[float | None, Parameter(help="Squeezing phase; optimal when omitted.")] = None,
    source: Annotated[PndSource, Parameter(help="Mixed coherent plus squeezed vacuum output, or the ideal ECS.")] = "mixed",
    common: Annotated[GlobalOptions | None, Parameter(name="*")] = None,
) -> SweepConfig:
    """Joint photon-number distribution P and its per-N normalization."""
    if isinstance(r, float) and r < 0:
        msg = f"--r must be nonnegative, got {r}."
        raise ValueError(msg)

    params = {"beta": beta, "nbar": nbar, "phi": phi, "r": r, "theta": theta, "source": source}
    return build_config("pnd", params, common)


@app.command(name="fidelity-curve")
def fidelity_curve(
    *,
    nbar_max: Annotated[float, Parameter(help="Largest ECS mean photon number.", validator=NonNegative)] = 3.0,
    step: Annotated[float, Parameter(help="Grid spacing in mean photon number.", validator=Positive)] = 0.02,
    phi: Annotated[float, Parameter(help="Phase of alpha in radians.")] = 0.0,
    common: Annotated[GlobalOptions | None, Parameter(name="*")] = None,
) -> SweepConfig:
    """Optimal-squeezing fidelity and the vacuum baseline against mean photon number."""
    return build_config("fidelity-curve", {"nbar_max": nbar_max, "step": step, "phi": phi}, common)


@app.command(name="j3-curve")
def j3_curve(
    *,
    source: Annotated[Literal["ecs", "mixed"], Parameter(help="Test the ideal ECS or the mixed state.")] = "ecs",
    nbar_max: Annotated[float, Parameter(help="Largest mean photon number.", validator=NonNegative)] = 2.0,
    step: Annotated[float, Parameter(help="Grid spacing in mean photon number.", validator=Positive)] = 0.05,
    restarts: Annotated[int, Parameter(help="Seeded local searches per direction.", validator=validators.Number(gte=1))] = DEFAULT_RESTARTS,
    tol: Annotated[float, Parameter(help="Optimizer tolerance.", validator=Positive)] = DEFAULT_OPTIMIZER_TOL,
    max_iterations: Annotated[int, Parameter(help="Iteration cap per local search.", validator=validators.Number(gte=1))] = (
        DEFAULT_MAX_ITERATIONS
    ),
    common: Annotated[GlobalOptions | None, Parameter(name="*")] = None,
) -> SweepConfig:
    """Minimum and maximum of J3 against mean photon number, after a pi/2 phase shift on mode d."""
    params = {
        "source": source,
        "nbar_max": nbar_max,
        "step": step,
        "restarts": restarts,
        "tol": tol,
        "max_iterations": max_iterations,
    }
    return build_config("j3-curve", params, common)


@app.command(name="similarity-sweep")
def similarity_sweep(
    *,
    eta: Annotated[float, Parameter(help="Transmission of both modes.", validator=validators.Number(gte=0, lte=1))] = 0.1,
    eta_c: Annotated[float | None, Parameter(help="Transmission of mode c; overrides --eta.", validator=validators.Number(gte=0, lte=1))] = None,
    eta_d: Annotated[float | None, Parameter(help="Transmission of mode d; overrides --eta.", validator=validators.Number(gte=0, lte=1))] = None,
    detectors: Annotated[int, Parameter(help="Detectors per mode.", validator=validators.Number(gte=1))] = 8,
    x_max: Annotated[float, Parameter(help="Largest squeezed-vacuum fraction sinh(2r)/|alpha|^2.", validator=Positive)] = 2.0,
    step: Annotated[float, Parameter(help="Grid spacing in the squeezed-vacuum fraction.", validator=Positive)] = 0.05,
    fixed_nbar: Annotated[float | None, Parameter(help="Hold the input mean photon number fixed instead of sweeping beta.", validator=Positive)] = None,
    beta_start: Annotated[float, Parameter(help="|beta| at x = 0.", validator=Positive)] = 0.75,
    beta_end: Annotated[float, Parameter(help="|beta| at x = x-max.", validator=Positive)] = 0.45,
    min_total_clicks: Annotated[int, Parameter(help="Compare only click cells with at least this many clicks.", validator=NonNegative)] = 0,
    weights_c: Annotated[
        tuple[float, ...] | None, Parameter(help="Splitter weight of each mode-c detector; repeat once per detector. Uniform when omitted.")
    ] = None,
    weights_d: Annotated[
        tuple[float, ...] | None, Parameter(help="Splitter weight of each mode-d detector; repeat once per detector. Uniform when omitted.")
    ] = None,
    phi: Annotated[float, Parameter(help="Phase of beta in radians.")] = 0.0,
    common: Annotated[GlobalOptions | None, Parameter(name="*")] = None,
) -> SweepConfig:
    """Detected similarity to a perfect ECS along the squeezed-vacuum fraction."""
    params = {
        "eta_c": eta if eta_c is None else eta_c,
        "eta_d": eta if eta_d is None else eta_d,
        "detectors": detectors,
        "x_max": x_max,
        "step": step,
        "fixed_nbar": fixed_nbar,
        "beta_start": beta_start,
        "beta_end": beta_end,
        "min_total_clicks": min_total_clicks,
        "phi": phi,
        "weights_c": None if weights_c is None else list(weights_c),
        "weights_d": None if weights_d is None else list(weights_d),
    }
    _ = _detector_config(params)
    return build_config("similarity-sweep", params, common)


@app.command(name="click-sim")
def click_sim(
    *,
    m: Annotated[int, Parameter(help="Photons reaching the detectors of mode c.", validator=NonNegative)] = 2,
    n: Annotated[int, Parameter(help="Photons reaching the detectors of mode d.", validator=NonNegative)] = 0,
    detectors: Annotated[int, Parameter(help="Detectors per mode.", validator=validators.Number(gte=1))] = 8,
    samples: Annotated[int, Parameter(help="Monte-Carlo assignments per mode.", validator=validators.Number(gte=1))] = 1_000_000,
    common: Annotated[GlobalOptions | None, Parameter(name="*")] = None,
) -> SweepConfig:
    """Click model against a Monte-Carlo oracle for fixed photon numbers."""
    params = {"m": m, "n": n, "detectors": detectors, "samples": samples}
    return build_config("click-sim", params, common, default_format="json")


def _detector_config(p: dict[str, Any]) -> DetectorConfig:
    return DetectorConfig(
        detectors=p["detectors"],
        weights_c=p["weights_c"],
        weights_d=p["weights_d"],
        eta_c=p["eta_c"],
        eta_d=p["eta_d"],
    )


def _tail_warning(tail: float, config: SweepConfig) -> list[str]:
    if tail <= config.tail_tol:
        return []
    return [f"tail mass {tail:.3e} exceeds tail_tol {config.tail_tol:.3e}"]


def run_state(config: SweepConfig) -> list[SeriesRecord]:
    p = config.params
    kind: StateKind = p["kind"]
    options: dict[str, Any] = {"adaptive": config.adaptive_cutoff, "tail_tol": config.tail_tol}

    built: ModeAmplitudes | TwoModeAmplitudes
    match kind:
        case "coherent":
            built = coherent(CoherentParams(magnitude=p["beta"], phase=p["phi"]), config.cutoff, **options)
        case "squeezed":
            built = squeezed_vacuum(SqueezeParams(r=p["r"], theta=p["theta"]), config.cutoff, **options)
        case "css":
            built = css(CoherentParams(magnitude=p["beta"], phase=p["phi"]), config.cutoff, **options)
        case "ecs":
            built = ecs(EcsParams(alpha=cmath.rect(p["alpha"], p["phi"])), config.cutoff, **options)
        case "noon":
            built = noon(p["photons"], config.cutoff, relative_phase=p["relative_phase"])
        case "vacuum":
            built = vacuum(config.cutoff)

    tail = tail_mass(built)
    indices = list(np.ndindex(built.amps.shape))
    amplitudes = [complex(built.amps[index]) for index in indices]

    columns: dict[str, list[Any]] = (
        {"n": [index[0] for index in indices]}
        if isinstance(built, ModeAmplitudes)
        else {"m": [index[0] for index in indices], "n": [index[1] for index in indices]}
    )
    columns |= {
        "re": [amplitude.real for amplitude in amplitudes],
        "im": [amplitude.imag for amplitude in amplitudes],
        "probability": [abs(amplitude) ** 2 for amplitude in amplitudes],
    }

    metadata = build_metadata(config, tail_mass_max=tail, warnings=_tail_warning(tail, config), state_cutoff=built.cutoff)
    return [SeriesRecord(name="state", columns=columns, metadata=metadata, plot_columns=["probability"], text=dump_state(built))]


def run_pnd(config: SweepConfig) -> list[SeriesRecord]:
    p = config.params
    warnings: list[str] = []

    beta: float = first(p["beta"], 0.45)
    if p["nbar"] is not None:
        if p["beta"] is not None:
            warnings.append("beta ignored because nbar is set")
        beta = math.sqrt(ecs_alpha_squared(p["nbar"]) / 2.0)

    alpha = cmath.rect(math.sqrt(2.0) * beta, p["phi"])
    optimal = optimal_squeezing(alpha)
    squeeze = optimal if p["r"] == "optimal" else SqueezeParams(r=p["r"], theta=first(p["theta"], optimal.theta))

    if p["source"] == "ecs":
        target = ecs(EcsParams(alpha=alpha), config.cutoff, adaptive=config.adaptive_cutoff, tail_tol=config.tail_tol)
        state, tail = target, tail_mass(target)
        fidelity = 1.0
    else:
        mixed = mix_cs_sv(
            CoherentParams(magnitude=beta, phase=p["phi"]),
            squeeze,
            config.cutoff,
            adaptive=config.adaptive_cutoff,
            tail_tol=config.tail_tol,
        )
        state, tail = mixed.state, mixed.tail_mass
        fidelity = two_mode_fidelity(ecs(EcsParams(alpha=alpha), mixed.cutoff), mixed.state)

    warnings += _tail_warning(tail, config)
    table = joint_pnd(state)
    per_n = per_n_normalized(table)

    cells = [(m, n) for m, n in np.ndindex(table.probs.shape) if table.probs[m, n] > 0]
    present = [(m, n) for m, n in np.ndindex(table.probs.shape) if m + n <= table.cutoff and per_n.is_present(m + n)]

    metadata = build_metadata(
        config,
        tail_mass_max=tail,
        warnings=warnings,
        beta=beta,
        r=squeeze.r,
        theta=squeeze.theta,
        input_mean_photons=beta**2 + squeeze.mean_photons,
        fidelity_to_ecs=fidelity,
        corner_ratio=corner_ratio(table),
        off_corner_mass=off_corner_mass(table),
        state_cutoff=state.cutoff,
    )
    per_n_metadata = metadata | {"absent_totals": [total for total in per_n.absent_totals if total <= table.cutoff]}

    return [
        SeriesRecord(
            name="pnd",
            columns={
                "m": [m for m, _ in cells],
                "n": [n for _, n in cells],
                "p": [float(table.probs[m, n]) for m, n in cells],
            },
            metadata=metadata,
            plot_columns=["p"],
        ),
        SeriesRecord(
            name="per_n",
            columns={
                "m": [m for m, _ in present],
                "n": [n for _, n in present],
                "p_tilde": [float(per_n.probs[m, n]) for m, n in present],
            },
            metadata=per_n_metadata,
            plot_columns=["p_tilde"],
        ),
    ]


def run_fidelity_curve(config: SweepConfig) -> list[SeriesRecord]:
    p = config.params
    points = run_fidelity_points(uniform_grid(p["nbar_max"], p["step"]), p["phi"], config.cutoff, adaptive=config.adaptive_cutoff)
    tail = max(point.tail_mass for point in points)

    return [
        SeriesRecord(
            name="fidelity",
            columns={
                "n_bar": [point.n_bar for point in points],
                "F_opt": [point.f_opt for point in points],
                "F_vacuum": [point.f_vacuum for point in points],
            },
            metadata=build_metadata(config, tail_mass_max=tail, warnings=_tail_warning(tail, config)),
        )
    ]


def run_j3_curve(config: SweepConfig) -> list[SeriesRecord]:
    p = config.params
    settings = J3Settings(
        restarts=p["restarts"],
        seed=config.seed,
        tol=p["tol"],
        max_iterations=p["max_iterations"],
        cutoff=config.cutoff,
        tail_tol=config.tail_tol,
        adaptive_cutoff=config.adaptive_cutoff,
    )
    points = run_j3_points(uniform_grid(p["nbar_max"], p["step"]), p["source"], settings, workers=config.workers)

    warnings = [f"n_bar={point.n_bar}: optimizer did not converge" for point in points if not point.converged]
    tail = max(point.tail_mass for point in points)

    metadata = build_metadata(
        config,
        tail_mass_max=tail,
        warnings=warnings + _tail_warning(tail, config),
        adaptive_cutoff=config.adaptive_cutoff or p["source"] == "mixed",
        effective_cutoff_max=max(point.cutoff for point in points),
        optimizer="Nelder-Mead",
        phase_shift_d=math.pi / 2.0,
        directions=["min", "max"],
    )
    return [
        SeriesRecord(
            name="j3",
            columns={
                "n_bar": [point.n_bar for point in points],
                "j3_min": [point.minimum.value for point in points],
                "j3_max": [point.maximum.value for point in points],
                "converged": [point.converged for point in points],
            },
            metadata=metadata,
            plot_columns=["j3_min", "j3_max"],
        )
    ]


def run_similarity_sweep(config: SweepConfig) -> list[SeriesRecord]:
    p = config.params
    fixed_nbar: float | None = p["fixed_nbar"]

    spec = SimilaritySweepSpec(
        detector=_detector_config(p),
        x_max=p["x_max"],
        step=p["step"],
        schedule="linear-beta" if fixed_nbar is None else "fixed-nbar",
        beta_start=p["beta_start"],
        beta_end=p["beta_end"],
        n_bar=first(fixed_nbar, 0.15),
        phi=p["phi"],
        min_total_clicks=p["min_total_clicks"],
        cutoff=config.cutoff,
        tail_tol=config.tail_tol,
    )
    points = run_similarity_points(spec, workers=config.workers)
    tail = max(point.tail_mass for point in points)
    best = max(points, key=lambda point: point.similarity)

    metadata = build_metadata(
        config,
        tail_mass_max=tail,
        warnings=_tail_warning(tail, config),
        adaptive_cutoff=True,
        effective_cutoff_max=max(point.cutoff for point in points),
        schedule=spec.schedule,
        schedule_is_assumption=True,
        argmax_x=best.x,
        max_similarity=best.similarity,
    )
    return [
        SeriesRecord(
            name="similarity",
            columns={
                "x": [point.x for point in points],
                "similarity": [point.similarity for point in points],
                "n_bar": [point.n_bar for point in points],
                "beta": [point.beta for point in points],
                "r": [point.r for point in points],
            },
            metadata=metadata,
            plot_columns=["similarity"],
        )
    ]


def run_click_sim(config: SweepConfig) -> list[SeriesRecord]:
    p = config.params
    detector = DetectorConfig.lossless(p["detectors"])

    model_c = click_distribution_mode(p["m"], detector, "c")
    model_d = click_distribution_mode(p["n"], detector, "d")
    sampled_c = sample_click_distribution(p["m"], detector, "c", p["samples"], np.random.default_rng([config.seed, 0]))
    sampled_d = sample_click_distribution(p["n"], detector, "d", p["samples"], np.random.default_rng([config.seed, 1]))

    metadata = build_metadata(
        config,
        tail_mass_max=0.0,
        warnings=[],
        total_variation_c=total_variation(sampled_c, model_c),
        total_variation_d=total_variation(sampled_d, model_d),
    )
    return [
        SeriesRecord(
            name="clicks",
            columns={
                "k": list(range(p["detectors"] + 1)),
                "model_c": [float(value) for value in model_c],
                "sampled_c": [float(value) for value in sampled_c],
                "model_d": [float(value) for value in model_d],
                "sampled_d": [float(value) for value in sampled_d],
            },
            metadata=metadata,
            plot_columns=["model_c", "sampled_c"],
        )
    ]


RUNNERS: dict[str, Runner] = {
    "state": run_state,
    "pnd": run_pnd,
    "fidelity-curve": run_fidelity_curve,
    "j3-curve": run_j3_curve,
    "similarity-sweep": run_similarity_sweep,
    "click-sim": run_click_sim,
}


def write_records(records: list[SeriesRecord], config: SweepConfig) -> list[tuple[SeriesRecord, Path | None]]:
    written: list[tuple[SeriesRecord, Path | None]] = []

    for index, record in enumerate(records):
        if config.out is None:
            write_record(record, config.output_format, sys.stdout)
            written.append((record, None))
            continue

        path = output_path(config.out, record, primary=index == 0)
        with path.open("w", encoding="utf-8", newline="") as stream:
            write_record(record, config.output_format, stream)
        written.append((record, path))

    return written


def parse_args(argv: list[str] | None = None) -> SweepConfig | None:
    """Validate the command line into a SweepConfig; usage errors exit with a nonzero status.

    Returns None when the command line only asked for help or the version.
    """
    command, bound, _ = app.parse_args(argv)

    try:
        result = command(*bound.args, **bound.kwargs)
    except (ValidationError, ValueError, FileNotFoundError) as e:
        rich_print(f"[red]Usage error:[/red] {e}", file=sys.stderr)
        raise SystemExit(1) from e

    return result if isinstance(result, SweepConfig) else None


def run(config: SweepConfig) -> int:
    """Compute the requested records and write them; returns the process exit status."""
    configure_console_logging(config.log_level)

    try:
        with logfire.span("ecs-sim {command}", command=config.command, params=config.params):
            records = RUNNERS[config.command](config)
    except (EcsSimulatorError, ValidationError) as e:
        rich_print(f"[red]{type(e).__name__}:[/red] {e}", file=sys.stderr)
        return 1

    try:
        written = write_records(records, config)
    except OSError as e:
        rich_print(f"[red]Could not write output:[/red] {e}", file=sys.stderr)
        return 1

    warning_count = sum(len(record.metadata.get("warnings", [])) for record in records)
    if warning_count:
        logfire.warn("{command} finished with {warning_count} warnings", command=config.command, warning_count=warning_count)

    Console(stderr=True).print(rich_table_from_records(written))
    return 0


def run_cli() -> None:
    config = parse_args()

    if config is None:
        return

    sys.exit(run(config))


if __name__ == "__main__":
    run_cli()
