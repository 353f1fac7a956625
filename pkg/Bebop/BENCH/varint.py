"""
Varint versus fixed-width size analysis.

For unsigned 32-bit values uniformly distributed over [0, N], the expected
LEB128 varint size is the bucket-weighted average: values below 2^7 take
one byte (zero included), values below 2^14 two bytes, up to five bytes.
Fixed-width encoding always takes four.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List

FIXED_WIDTH = 4
MAX_UINT32 = 0xFFFFFFFF
MAX_VARINT_BYTES = 5


def varint_size(value: int) -> int:
    """Bytes LEB128 needs for an unsigned value; zero takes one."""
    if value < 0:
        raise ValueError(f"varint size is defined for unsigned values, got {value}")
    return max(1, (value.bit_length() + 6) // 7)


def encode_varint(value: int) -> bytes:
    """LEB128: seven bits per byte, high bit set on every byte but the last."""
    if value < 0:
        raise ValueError(f"cannot varint-encode negative value {value}")
    out = bytearray()
    while True:
        part = value & 0x7F
        value >>= 7
        if value:
            out.append(part | 0x80)
        else:
            out.append(part)
            return bytes(out)


def decode_varint(data: bytes, offset: int = 0):
    """(value, next offset)."""
    value = 0
    shift = 0
    while True:
        if offset >= len(data):
            raise ValueError("varint runs past the end of the input")
        byte = data[offset]
        offset += 1
        value |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return value, offset


def expected_varint_size(n: int) -> Fraction:
    """
    Exact expected varint size for values uniform over [0, n].

    Args:
        n: Largest value, 0 <= n <= 2^32 - 1

    Returns:
        Expected bytes per value as a Fraction
    """
    if not 0 <= n <= MAX_UINT32:
        raise ValueError(f"n must be an unsigned 32-bit value, got {n}")
    total = 0
    for k in range(1, MAX_VARINT_BYTES + 1):
        low = 0 if k == 1 else 1 << (7 * (k - 1))
        high = min(n, (1 << (7 * k)) - 1)
        if high >= low:
            total += k * (high - low + 1)
    return Fraction(total, n + 1)


def varint_crossover(fixed_width: int = FIXED_WIDTH) -> int:
    """
    Smallest N whose expected varint size exceeds `fixed_width` bytes.

    The expectation never decreases with N (each added value is at least
    as wide as every earlier one), so a binary search is exact.
    """
    low, high = 0, MAX_UINT32
    if expected_varint_size(high) <= fixed_width:
        raise ValueError(f"varint never exceeds {fixed_width} bytes over uint32")
    while low < high:
        middle = (low + high) // 2
        if expected_varint_size(middle) > fixed_width:
            high = middle
        else:
            low = middle + 1
    return low


@dataclass(frozen=True)
class VarintRow:
    n: int
    expected: Fraction
    fixed: int = FIXED_WIDTH

    @property
    def varint_wins(self) -> bool:
        return self.expected < self.fixed


DEFAULT_POINTS = (1, 127, 128, 1000, 16383, 16384, 100_000, 2_097_151, 10_000_000, 1 << 28, 1_000_000_000, MAX_UINT32)


def varint_table(points: Iterable[int] = DEFAULT_POINTS) -> List[VarintRow]:
    return [VarintRow(n, expected_varint_size(n)) for n in points]


__all__ = [
    "DEFAULT_POINTS",
    "FIXED_WIDTH",
    "VarintRow",
    "decode_varint",
    "encode_varint",
    "expected_varint_size",
    "varint_crossover",
    "varint_size",
    "varint_table",
]
