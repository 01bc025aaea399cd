import os
import sys
from typing import Literal

import logfire
from logfire import ConsoleOptions

LogLevel = Literal["trace", "debug", "info", "notice", "warn", "error", "fatal"]

LOG_LEVEL_ENV_VAR = "ECS_SIM_LOG_LEVEL"
DEFAULT_LOG_LEVEL: LogLevel = "info"

_LOG_LEVELS: set[str] = {"trace", "debug", "info", "notice", "warn", "error", "fatal"}

_configured_level: LogLevel | None = None


def resolve_log_level(level: str | None = None) -> LogLevel:
    """Pick the console log level from the argument, then the environment, then the default."""
    candidate: str = (level or os.getenv(LOG_LEVEL_ENV_VAR) or DEFAULT_LOG_LEVEL).lower()

    if candidate not in _LOG_LEVELS:
        msg = f"Unknown log level {candidate!r}, expected one of {sorted(_LOG_LEVELS)}."
        raise ValueError(msg)

    return candidate  # pyright: ignore[reportReturnType]


def current_log_level() -> LogLevel:
    """The level of the last :func:`configure_console_logging` call in this process."""
    return _configured_level or resolve_log_level()


def configure_console_logging(min_log_level: str | None = None) -> None:
    """Send logfire spans and logs to stderr only, so figure data on stdout stays clean."""
    global _configured_level  # noqa: PLW0603

    _configured_level = resolve_log_level(min_log_level)

    _ = logfire.configure(
        send_to_logfire=False,
        service_name="ecs-simulator",
        console=ConsoleOptions(
            min_log_level=_configured_level,
            span_style="indented",
            output=sys.stderr,
        ),
    )
