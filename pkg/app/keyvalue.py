"""
Flat key-value text format shared by instance files and experiment configs.

One `key = value` pair per line, `#` starts a comment line, keys are dotted
paths. Floats are written with 17 significant digits so a load after a dump
reproduces every value bit for bit.
"""
from collections.abc import Iterable

from .errors import KeyValueFormatError


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def dumps(pairs: Iterable[tuple[str, object]], header: str | None = None) -> str:
    lines = []
    if header:
        lines.append(f"# {header}")
    for key, value in pairs:
        lines.append(f"{key} = {format_value(value)}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise KeyValueFormatError(f"Line {lineno}: expected 'key = value', got {raw!r}")
        if key in values:
            raise KeyValueFormatError(f"Line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _require(values: dict[str, str], key: str) -> str:
    try:
        return values[key]
    except KeyError:
        raise KeyValueFormatError(f"Missing key {key!r}") from None


def get_float(values: dict[str, str], key: str) -> float:
    raw = _require(values, key)
    try:
        return float(raw)
    except ValueError:
        raise KeyValueFormatError(f"Key {key!r}: not a number: {raw!r}") from None


def get_int(values: dict[str, str], key: str) -> int:
    raw = _require(values, key)
    try:
        return int(raw)
    except ValueError:
        raise KeyValueFormatError(f"Key {key!r}: not an integer: {raw!r}") from None


def get_list(values: dict[str, str], key: str) -> list[str]:
    raw = _require(values, key)
    return [item.strip() for item in raw.split(",") if item.strip()]
