import io
import json
from datetime import UTC, datetime
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Literal, Self, TextIO

from pydantic import BaseModel, Field, model_validator

from ecs_simulator.core.logging import LogLevel

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 17
SVG_HASH_SALT = "ecs-simulator"
MAX_PLOTTED_SERIES = 2

OutputFormat = Literal["csv", "json", "svg", "dump"]
CommandName = Literal["state", "pnd", "fidelity-curve", "j3-curve", "similarity-sweep", "click-sim"]

type Cell = float | int | bool | str


def tool_version() -> str:
    try:
        return version("ecs-simulator-cli")
    except PackageNotFoundError:
        return "0.0.0"


class SweepConfig(BaseModel):
    """Everything needed to re-run one subcommand."""

    command: CommandName
    params: dict[str, Any] = Field(default_factory=dict, description="Subcommand parameters, JSON-serializable.")
    cutoff: int = Field(ge=1, description="Initial per-mode photon-number cutoff.")
    adaptive_cutoff: bool = Field(description="Whether constructors may grow the cutoff to meet tail_tol.")
    tail_tol: float = Field(gt=0.0, description="Largest probability truncation may discard.")
    seed: int = Field(description="Root seed for every stochastic component.")
    out: Path | None = Field(default=None, description="Output path; stdout when unset.")
    output_format: OutputFormat = Field(default="csv")
    workers: int = Field(default=1, ge=1, description="Worker processes used to evaluate grid points.")
    log_level: LogLevel = Field(default="info")

    @model_validator(mode="after")
    def validate_params(self) -> Self:
        step: float | None = self.params.get("step")
        if step is not None and step <= 0:
            msg = f"step must be positive, got {step}."
            raise ValueError(msg)

        for key in ("nbar_max", "x_max"):
            limit: float | None = self.params.get(key)
            if limit is not None and limit < 0:
                msg = f"{key} must be nonnegative, got {limit}."
                raise ValueError(msg)

        if self.output_format == "dump" and self.command != "state":
            msg = f"--format dump writes single states only; {self.command} produces tables."
            raise ValueError(msg)

        return self


class SeriesRecord(BaseModel):
    """Named columns of equal length, the first one being the x axis, plus provenance metadata."""

    name: str = Field(description="Short label, used as file suffix for secondary outputs.")
    columns: dict[str, list[Cell]]
    metadata: dict[str, Any] = Field(default_factory=dict)
    plot_columns: list[str] | None = Field(default=None, description="y columns drawn by the SVG writer.")
    text: str | None = Field(default=None, description="Plain-text state dump written by the dump format.")

    @model_validator(mode="after")
    def validate_columns(self) -> Self:
        if not self.columns:
            msg = "A series record needs at least one column."
            raise ValueError(msg)

        lengths = {len(values) for values in self.columns.values()}
        if len(lengths) != 1:
            msg = f"Columns of a series record must have equal lengths, got {sorted(lengths)}."
            raise ValueError(msg)

        for column in self.plot_columns or []:
            if column not in self.columns:
                msg = f"Plot column {column!r} is not one of {list(self.columns)}."
                raise ValueError(msg)

        return self

    @property
    def rows(self) -> int:
        return len(next(iter(self.columns.values())))

    @property
    def x_column(self) -> str:
        return next(iter(self.columns))

    def series_to_plot(self) -> list[str]:
        if self.plot_columns is not None:
            return self.plot_columns[:MAX_PLOTTED_SERIES]

        numeric = [
            name
            for name, values in self.columns.items()
            if name != self.x_column and all(isinstance(value, int | float) and not isinstance(value, bool) for value in values)
        ]
        return numeric[:MAX_PLOTTED_SERIES]


def build_metadata(config: SweepConfig, *, tail_mass_max: float, warnings: list[str], **extra: Any) -> dict[str, Any]:
    """Provenance block; ``generated_at`` is the only field that changes between identical runs."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": tool_version(),
        "command": config.command,
        "params": config.params,
        "cutoff": config.cutoff,
        "adaptive_cutoff": config.adaptive_cutoff,
        "tail_tol": config.tail_tol,
        "tail_mass_max": tail_mass_max,
        "seed": config.seed,
        "warnings": warnings,
        **extra,
        "generated_at": datetime.now(tz=UTC).isoformat(timespec="seconds"),
    }


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"

    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"

    return str(value)


def write_csv(record: SeriesRecord, stream: TextIO) -> None:
    """Metadata as ``# key: value`` comment lines, then the header and one line per row."""
    for key, value in record.metadata.items():
        _ = stream.write(f"# {key}: {json.dumps(value)}\n")

    names = list(record.columns)
    _ = stream.write(",".join(names) + "\n")

    for row in zip(*record.columns.values(), strict=True):
        _ = stream.write(",".join(format_cell(cell) for cell in row) + "\n")


def write_json(record: SeriesRecord, stream: TextIO) -> None:
    json.dump({"metadata": record.metadata, "columns": record.columns}, stream, indent=2)
    _ = stream.write("\n")


def render_svg(record: SeriesRecord) -> str:
    """A static line plot of up to two y columns against the x column."""
    import matplotlib  # noqa: PLC0415

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt  # noqa: PLC0415

    buffer = io.StringIO()

    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))

        x_values = record.columns[record.x_column]
        for column in record.series_to_plot():
            _ = ax.plot(x_values, record.columns[column], label=column)

        _ = ax.set_xlabel(record.x_column)
        _ = ax.set_title(f"{record.metadata.get('command', record.name)}")
        _ = ax.legend()
        ax.grid(visible=True, alpha=0.3)

        fig.savefig(buffer, format="svg", metadata={"Date": None})
        plt.close(fig)

    return buffer.getvalue()


def write_record(record: SeriesRecord, output_format: OutputFormat, stream: TextIO) -> None:
    match output_format:
        case "csv":
            write_csv(record, stream)
        case "json":
            write_json(record, stream)
        case "svg":
            _ = stream.write(render_svg(record))
        case "dump":
            if record.text is None:
                msg = f"Record {record.name!r} has no state dump."
                raise ValueError(msg)
            _ = stream.write(record.text)


def output_path(out: Path, record: SeriesRecord, primary: bool) -> Path:
    """The primary record goes to ``out``; the others to ``<stem>.<name><suffix>`` beside it."""
    if primary:
        return out

    return out.with_name(f"{out.stem}.{record.name}{out.suffix}")
