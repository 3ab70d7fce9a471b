"""Canonical scalar forms shared by the parser, collector, and codecs.

A scalar is a bool, int, float, or str. Canonicalization renders integral
floats as ints and other floats via repr, the shortest round-tripping
decimal string, so `0`, `0.0`, and `-0.0` all collapse to `0`.
"""
from __future__ import annotations

import math
import re

NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

Scalar = bool | int | float | str


def canonical_value(value: Scalar) -> Scalar:
    """Collapse numeric types: integral floats become ints."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if math.isfinite(value) and value == int(value):
            return int(value)
        return value
    return value


def canonical_number(value: int | float) -> str:
    if isinstance(value, int):
        return str(value)
    if math.isfinite(value) and value == int(value):
        return str(int(value))
    return repr(value)


def canonical_string(value: Scalar) -> str:
    """Render a scalar the way filenames and captions spell it."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return canonical_number(value)
    return value


def scalar_sort_key(value: Scalar) -> tuple[str, str]:
    """Type-tagged key so mixed-type lists sort deterministically."""
    if isinstance(value, bool):
        return ("bool", canonical_string(value))
    if isinstance(value, (int, float)):
        return ("number", canonical_string(value))
    return ("string", value)


def params_key(params: dict[str, Scalar]) -> tuple[tuple[str, tuple[str, str]], ...]:
    """Canonical identity of a parameter map, for dedupe and caching."""
    return tuple((name, scalar_sort_key(params[name])) for name in sorted(params))


def markup_scalar(value: object) -> str:
    """Render a scalar as a markup value token that parses back unchanged."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return canonical_number(value)
    if isinstance(value, list):
        return "[" + ", ".join(markup_scalar(item) for item in value) + "]"
    text = str(value)
    # commas and quotes anywhere would confuse the list tokenizer
    needs_quote = (
        text == ""
        or text in ("true", "false")
        or NUMBER_RE.match(text) is not None
        or text.startswith("[")
        or '"' in text
        or "," in text
        or text != text.strip()
    )
    if needs_quote:
        escaped = text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return text
