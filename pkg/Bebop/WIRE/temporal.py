"""Timestamp and duration values as they appear on the wire."""

import time
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

NANOS_PER_SECOND = 1_000_000_000


@dataclass(frozen=True)
class WireTimestamp:
    """
    Absolute instant: seconds and nanoseconds since the Unix epoch (UTC),
    plus the timezone offset the instant was expressed in.

    Layout: int64 seconds at offset 0, int32 nanos at 8, int32 offset_ms at 12.
    """

    seconds: int = 0
    nanos: int = 0
    offset_ms: int = 0

    @property
    def total_nanos(self) -> int:
        """Nanoseconds since the epoch; the offset does not move the instant."""
        return self.seconds * NANOS_PER_SECOND + self.nanos

    @classmethod
    def from_nanos(cls, total: int, offset_ms: int = 0) -> "WireTimestamp":
        seconds, nanos = divmod(total, NANOS_PER_SECOND)
        return cls(seconds, nanos, offset_ms)

    @classmethod
    def from_millis(cls, millis: int) -> "WireTimestamp":
        return cls.from_nanos(millis * 1_000_000)

    @classmethod
    def now(cls) -> "WireTimestamp":
        return cls.from_nanos(time.time_ns())

    @classmethod
    def from_datetime(cls, value: datetime) -> "WireTimestamp":
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        offset = value.utcoffset() or timedelta(0)
        epoch = datetime(1970, 1, 1, tzinfo=timezone.utc)
        delta = value - epoch
        total = (delta.days * 86400 + delta.seconds) * NANOS_PER_SECOND + delta.microseconds * 1000
        return cls.from_nanos(total, offset_ms=int(offset / timedelta(milliseconds=1)))

    def to_datetime(self) -> datetime:
        """Aware datetime in the recorded offset; sub-microsecond precision is dropped."""
        tz = timezone(timedelta(milliseconds=self.offset_ms))
        epoch = datetime(1970, 1, 1, tzinfo=timezone.utc)
        moment = epoch + timedelta(seconds=self.seconds, microseconds=self.nanos // 1000)
        return moment.astimezone(tz)

    def plus(self, duration: "WireDuration") -> "WireTimestamp":
        return WireTimestamp.from_nanos(self.total_nanos + duration.total_nanos, self.offset_ms)

    def minus(self, other: "WireTimestamp") -> "WireDuration":
        return WireDuration.from_nanos(self.total_nanos - other.total_nanos)


@dataclass(frozen=True)
class WireDuration:
    """
    Signed time span. Both fields share the sign of the span: a negative
    duration has non-positive seconds and non-positive nanos.
    """

    seconds: int = 0
    nanos: int = 0

    @property
    def total_nanos(self) -> int:
        return self.seconds * NANOS_PER_SECOND + self.nanos

    @classmethod
    def from_nanos(cls, total: int) -> "WireDuration":
        sign = -1 if total < 0 else 1
        seconds, nanos = divmod(abs(total), NANOS_PER_SECOND)
        return cls(sign * seconds, sign * nanos)

    @classmethod
    def from_seconds(cls, seconds: float) -> "WireDuration":
        return cls.from_nanos(round(seconds * NANOS_PER_SECOND))

    def to_seconds(self) -> float:
        return self.total_nanos / NANOS_PER_SECOND

    def to_timedelta(self) -> timedelta:
        return timedelta(microseconds=self.total_nanos / 1000)

    @property
    def is_expired(self) -> bool:
        """True for zero or negative spans (used for deadline checks)."""
        return self.total_nanos <= 0
