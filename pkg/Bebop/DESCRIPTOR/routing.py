"""
Method routing IDs.

A routing ID is the MurmurHash3 x86 32-bit body over the UTF-8 bytes of
`/Service/Method` (seed 0) with the standard fmix32 finalizer swapped for
lowbias32. Servers dispatch on the integer and never compare names.
"""

import struct
from typing import Dict, Iterable, Tuple

from Bebop.DESCRIPTOR.errors import ReservedCollision

_MASK = 0xFFFFFFFF
_C1 = 0xCC9E2D51
_C2 = 0x1B873593

# 0 is invalid, 1 is Batch, 2/3/4 are the futures methods
RESERVED_IDS = frozenset(range(5))


def _rotl32(value: int, shift: int) -> int:
    return ((value << shift) | (value >> (32 - shift))) & _MASK


def lowbias32(x: int) -> int:
    x ^= x >> 16
    x = (x * 0x7FEB352D) & _MASK
    x ^= x >> 15
    x = (x * 0x846CA68B) & _MASK
    x ^= x >> 16
    return x


def murmur3_lowbias32(data: bytes, seed: int = 0) -> int:
    h = seed & _MASK
    full = len(data) & ~3
    for (k,) in struct.iter_unpack("<I", data[:full]):
        k = (k * _C1) & _MASK
        k = _rotl32(k, 15)
        k = (k * _C2) & _MASK
        h ^= k
        h = _rotl32(h, 13)
        h = (h * 5 + 0xE6546B64) & _MASK

    tail = data[full:]
    if tail:
        k = int.from_bytes(tail, "little")
        k = (k * _C1) & _MASK
        k = _rotl32(k, 15)
        k = (k * _C2) & _MASK
        h ^= k

    h ^= len(data)
    return lowbias32(h)


def method_routing_id(service_name: str, method_name: str) -> int:
    """
    Routing ID of `/service_name/method_name`.

    Args:
        service_name: Service name as declared (not fully qualified)
        method_name: Method name as declared

    Returns:
        Unsigned 32-bit routing ID
    """
    return murmur3_lowbias32(f"/{service_name}/{method_name}".encode("utf-8"))


def parse_method_path(path: str) -> Tuple[str, str]:
    """Split `/Service/Method`; raises ValueError for any other shape."""
    parts = path.split("/")
    if len(parts) != 3 or parts[0] != "" or not parts[1] or not parts[2]:
        raise ValueError(f"expected /Service/Method, got {path!r}")
    return parts[1], parts[2]


def check_routing_ids(methods: Iterable[Tuple[str, int]]) -> Dict[int, str]:
    """
    Verify a compilation unit's routing IDs.

    Args:
        methods: (`/Service/Method` path, routing ID) pairs

    Returns:
        Routing ID to path

    Raises:
        ReservedCollision: If an ID is reserved or two paths share one
    """
    seen: Dict[int, str] = {}
    for path, routing_id in methods:
        if routing_id in RESERVED_IDS:
            raise ReservedCollision(f"{path} hashes to reserved routing ID {routing_id}; rename the method", routing_id, [path])
        other = seen.get(routing_id)
        if other is not None and other != path:
            raise ReservedCollision(
                f"{other} and {path} share routing ID {routing_id:#010x}; rename one of them",
                routing_id,
                [other, path],
            )
        seen[routing_id] = path
    return seen


__all__ = ["RESERVED_IDS", "check_routing_ids", "lowbias32", "method_routing_id", "murmur3_lowbias32", "parse_method_path"]
