"""
Literal conversion for constants and decorator arguments.

Functions here raise ValueError (or KeyError for missing environment
variables); the resolver turns those into span-carrying schema errors.
"""

import calendar
import math
import re
import uuid
from datetime import datetime
from decimal import Decimal
from typing import Any, Mapping

from Bebop.SCHEMA.ast import ArrayType, Literal, LiteralKind, PrimitiveType, StringType, TypeExpr
from Bebop.WIRE.kinds import PrimitiveKind
from Bebop.WIRE.temporal import NANOS_PER_SECOND, WireDuration, WireTimestamp

_TIMESTAMP = re.compile(
    r"""
    ^(?P<year>\d{4})-(?P<month>\d{2})-(?P<day>\d{2})
    T(?P<hour>\d{2}):(?P<minute>\d{2}):(?P<second>\d{2})
    (?:\.(?P<fraction>\d{1,9}))?
    (?P<zone>Z|(?P<sign>[+-])(?P<oh>\d{2}):(?P<om>\d{2})(?::(?P<os>\d{2})(?:\.(?P<oms>\d{1,3}))?)?)$
    """,
    re.VERBOSE,
)

_DURATION = re.compile(r"^-?(?:\d+(?:\.\d+)?(?:h|ms|us|ns|m|s))+$")
_DURATION_PART = re.compile(r"(\d+(?:\.\d+)?)(h|ms|us|ns|m|s)")
_UNIT_NANOS = {
    "h": 3600 * NANOS_PER_SECOND,
    "m": 60 * NANOS_PER_SECOND,
    "s": NANOS_PER_SECOND,
    "ms": 1_000_000,
    "us": 1_000,
    "ns": 1,
}

_ENV_VAR = re.compile(r"\$\(([A-Za-z_][A-Za-z0-9_]*)\)")


def parse_timestamp(text: str) -> WireTimestamp:
    """
    Parse an ISO 8601 instant such as `2024-01-15T10:30:00+12:00:01.133`.

    Fractions carry up to nanosecond precision; offsets may include
    seconds and milliseconds. The result keeps the offset in `offset_ms`.
    """
    match = _TIMESTAMP.match(text)
    if not match:
        raise ValueError(f"{text!r} is not an ISO 8601 timestamp")
    parts = {name: int(match.group(name)) for name in ("year", "month", "day", "hour", "minute", "second")}
    datetime(**parts)  # rejects impossible dates
    local_seconds = calendar.timegm(
        (parts["year"], parts["month"], parts["day"], parts["hour"], parts["minute"], parts["second"], 0, 0, 0)
    )
    fraction = match.group("fraction") or ""
    nanos = int(fraction.ljust(9, "0")) if fraction else 0

    offset_ms = 0
    if match.group("zone") != "Z":
        offset_ms = (
            int(match.group("oh")) * 3_600_000
            + int(match.group("om")) * 60_000
            + int(match.group("os") or 0) * 1000
            + int((match.group("oms") or "0").ljust(3, "0"))
        )
        if match.group("sign") == "-":
            offset_ms = -offset_ms

    total = local_seconds * NANOS_PER_SECOND + nanos - offset_ms * 1_000_000
    return WireTimestamp.from_nanos(total, offset_ms)


def parse_duration(text: str) -> WireDuration:
    """Parse durations like `1h30m`, `500ms`, `-1.5s`."""
    if not _DURATION.match(text):
        raise ValueError(f"{text!r} is not a duration (use h, m, s, ms, us, ns suffixes)")
    total = Decimal(0)
    for number, unit in _DURATION_PART.findall(text):
        total += Decimal(number) * _UNIT_NANOS[unit]
    if total != total.to_integral_value():
        raise ValueError(f"{text!r} is finer than one nanosecond")
    nanos = int(total)
    return WireDuration.from_nanos(-nanos if text.startswith("-") else nanos)


def substitute_env(text: str, environ: Mapping[str, str]) -> str:
    """Replace every `$(VAR)` with its value; raises KeyError naming the first missing variable."""

    def replace(match: re.Match) -> str:
        name = match.group(1)
        if name not in environ:
            raise KeyError(name)
        return environ[name]

    return _ENV_VAR.sub(replace, text)


def coerce_literal(type_expr: TypeExpr, literal: Literal) -> Any:
    """
    Convert a literal to the Python value of `type_expr`.

    Args:
        type_expr: Declared type (primitive, string or byte array)
        literal: Parsed literal

    Returns:
        Value in the form the dynamic codec encodes

    Raises:
        ValueError: If the literal does not fit the type
    """
    kind = literal.kind
    if isinstance(type_expr, StringType):
        if kind is not LiteralKind.STRING:
            raise ValueError(f"expected a string literal, got {kind.value}")
        return literal.value

    if isinstance(type_expr, ArrayType):
        element = type_expr.element
        if not (isinstance(element, PrimitiveType) and element.kind is PrimitiveKind.BYTE):
            raise ValueError("only byte[] constants take array literals")
        if kind is not LiteralKind.BYTES:
            raise ValueError(f"expected a b\"...\" literal, got {kind.value}")
        if type_expr.length is not None and len(literal.value) != type_expr.length:
            raise ValueError(f"byte[{type_expr.length}] needs exactly {type_expr.length} bytes, got {len(literal.value)}")
        return literal.value

    if not isinstance(type_expr, PrimitiveType):
        raise ValueError("constants must have a primitive, string or byte[] type")

    primitive = type_expr.kind
    if primitive is PrimitiveKind.BOOL:
        if kind is not LiteralKind.BOOL:
            raise ValueError(f"expected true or false, got {kind.value}")
        return literal.value
    if primitive.is_integer:
        if kind is not LiteralKind.INT:
            raise ValueError(f"expected an integer for {primitive.value}, got {kind.value}")
        low, high = primitive.integer_range
        if not low <= literal.value <= high:
            raise ValueError(f"{literal.value} does not fit in {primitive.value}")
        return literal.value
    if primitive.is_float:
        if kind not in (LiteralKind.INT, LiteralKind.FLOAT):
            raise ValueError(f"expected a number for {primitive.value}, got {kind.value}")
        value = float(literal.value)
        if primitive is PrimitiveKind.FLOAT32 and math.isfinite(value) and abs(value) > 3.4028234663852886e38:
            raise ValueError(f"{literal.value} overflows float32")
        return value
    if kind is not LiteralKind.STRING:
        raise ValueError(f"expected a string literal for {primitive.value}, got {kind.value}")
    if primitive is PrimitiveKind.UUID:
        try:
            return uuid.UUID(literal.value)
        except ValueError:
            raise ValueError(f"{literal.value!r} is not a UUID") from None
    if primitive is PrimitiveKind.TIMESTAMP:
        return parse_timestamp(literal.value)
    if primitive is PrimitiveKind.DURATION:
        return parse_duration(literal.value)
    raise ValueError(f"no literal form for {primitive.value}")  # pragma: no cover


__all__ = ["coerce_literal", "parse_duration", "parse_timestamp", "substitute_env"]
