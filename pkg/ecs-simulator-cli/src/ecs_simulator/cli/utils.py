from pathlib import Path

from rich import box
from rich.table import Table

from ecs_simulator.cli.records import SeriesRecord

MAX_WARNING_LENGTH = 100
MAX_LISTED_WARNINGS = 5


def rich_table_from_records(records: list[tuple[SeriesRecord, Path | None]]) -> Table:
    """Create a rich summary of written records for stderr."""
    table = Table(title="Outputs", highlight=True, padding=(0, 1), show_lines=True, box=box.ROUNDED)

    table.add_column("Output")
    table.add_column("Rows", justify="right")
    table.add_column("Columns")
    table.add_column("Tail mass max", justify="right")
    table.add_column("Warnings")

    for record, path in records:
        warnings: list[str] = record.metadata.get("warnings", [])

        listed: list[str] = []
        for warning in warnings[:MAX_LISTED_WARNINGS]:
            if len(warning) > MAX_WARNING_LENGTH:
                warning = warning[:MAX_WARNING_LENGTH] + "... (truncated)"  # noqa: PLW2901
            listed.append(warning)

        if len(warnings) > MAX_LISTED_WARNINGS:
            listed.append(f"... and {len(warnings) - MAX_LISTED_WARNINGS} more")

        table.add_row(
            str(path) if path else f"<stdout> ({record.name})",
            str(record.rows),
            ", ".join(record.columns),
            f"{record.metadata.get('tail_mass_max', 0.0):.2e}",
            "\n".join(listed) or "<none>",
        )

    return table
