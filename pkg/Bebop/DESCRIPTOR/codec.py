"""Serialized descriptor sets (`.bopd` files)."""

from pathlib import Path
from typing import Optional, Union

from Bebop.DESCRIPTOR.model import DescriptorSet
from Bebop.DYNAMIC.binding import decode_record, encode_record
from Bebop.DYNAMIC.limits import DecodeLimits
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)


def encode_descriptor_set(descriptors: DescriptorSet) -> bytes:
    """Encode with the descriptor meta-schema (`bebop/descriptor.bop`)."""
    return encode_record(descriptors)


def decode_descriptor_set(data: bytes, limits: Optional[DecodeLimits] = None) -> DescriptorSet:
    return decode_record(DescriptorSet, data, limits=limits)


def write_descriptor_file(path: Union[str, Path], descriptors: DescriptorSet) -> int:
    """Write a `.bopd` file; returns the number of bytes written."""
    data = encode_descriptor_set(descriptors)
    Path(path).write_bytes(data)
    logger.info(f"Wrote descriptor set ({len(descriptors.schemas)} schema(s), {len(data)} bytes) to {path}")
    return len(data)


def read_descriptor_file(path: Union[str, Path]) -> DescriptorSet:
    return decode_descriptor_set(Path(path).read_bytes())


__all__ = ["decode_descriptor_set", "encode_descriptor_set", "read_descriptor_file", "write_descriptor_file"]
