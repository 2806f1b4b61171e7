"""Line-oriented experiment config files.

Grammar: one `key = value` per line, `#` starts a comment, blank lines are
ignored. Values parse as int, then float, then bool (true/false), then fall
back to the literal string. Keys are validated against the target command's
parameter schema by the CLI, not here; this module only owns the file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Malformed config file: syntax, duplicate key, or unknown key."""


Value = int | float | bool | str


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed config: optional command name plus a typed parameter map."""

    command: str | None
    params: dict[str, Value] = field(default_factory=dict)


def _parse_value(text: str) -> Value:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text == "true":
        return True
    if text == "false":
        return False
    return text


def _format_value(value: Value) -> str:
    # bool before int: bool is an int subclass
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; raises ConfigError with line numbers on bad input."""
    params: dict[str, Value] = {}
    first_line: dict[str, int] = {}
    command: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in first_line:
            raise ConfigError(
                f"duplicate key {key!r} on line {lineno} (first set on line {first_line[key]})"
            )
        first_line[key] = lineno
        if key == "command":
            command = value
        else:
            params[key] = _parse_value(value)
    return ExperimentConfig(command, params)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(path, config: ExperimentConfig) -> None:
    """Write a config that load_config parses back to the same values."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if config.command is not None:
            fh.write(f"command = {config.command}\n")
        for key, value in config.params.items():
            fh.write(f"{key} = {_format_value(value)}\n")
