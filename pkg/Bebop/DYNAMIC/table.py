"""
TypeTable: definition lookup for the dynamic codec.

Indexes every definition of one or more DescriptorSets by fully-qualified
name and caches the per-definition tables the codec needs on each call
(message fields by tag, union branches by discriminator, fixed sizes).
"""

from typing import Dict, Iterable, List, Optional, Union

from Bebop.DESCRIPTOR.model import (
    DefinitionDescriptor,
    DescriptorSet,
    FieldDescriptor,
    TypeDescriptor,
    TypeKind,
    UnionBranch,
)
from Bebop.SCHEMA.ast import DefinitionKind

TypeRef = Union[str, TypeDescriptor, DefinitionDescriptor]

_UNSIZED = -1


class TypeTable:
    """Definitions by fqn; safe to share between threads once built."""

    def __init__(self, definitions: Iterable[DefinitionDescriptor] = ()):
        self._definitions: Dict[str, DefinitionDescriptor] = {}
        self._message_fields: Dict[str, List[FieldDescriptor]] = {}
        self._message_tags: Dict[str, Dict[int, FieldDescriptor]] = {}
        self._branches: Dict[str, Dict[int, UnionBranch]] = {}
        self._sizes: Dict[str, int] = {}
        self.add(definitions)

    @classmethod
    def from_descriptor_set(cls, *sets: DescriptorSet) -> "TypeTable":
        table = cls()
        for descriptors in sets:
            table.add(descriptors.walk())
        return table

    def add(self, definitions: Iterable[DefinitionDescriptor]) -> None:
        for root in definitions:
            for definition in root.walk():
                self._definitions[definition.fqn] = definition
        self._message_fields.clear()
        self._message_tags.clear()
        self._branches.clear()
        self._sizes.clear()

    def __contains__(self, fqn: str) -> bool:
        return fqn in self._definitions

    def __len__(self) -> int:
        return len(self._definitions)

    def get(self, fqn: str) -> DefinitionDescriptor:
        try:
            return self._definitions[fqn]
        except KeyError:
            raise LookupError(f"unknown definition {fqn!r}") from None

    def type_of(self, ref: TypeRef) -> TypeDescriptor:
        """Normalize a type argument: fqn string, definition or TypeDescriptor."""
        if isinstance(ref, TypeDescriptor):
            return ref
        if isinstance(ref, DefinitionDescriptor):
            return TypeDescriptor.defined(ref.fqn)
        return TypeDescriptor.defined(self.get(ref).fqn)

    # -------------------------------------------------------------------------
    # Cached views
    # -------------------------------------------------------------------------

    def message_fields(self, fqn: str) -> List[FieldDescriptor]:
        """Fields in ascending tag order."""
        fields = self._message_fields.get(fqn)
        if fields is None:
            fields = sorted(self.get(fqn).message_def.fields, key=lambda f: f.tag)
            self._message_fields[fqn] = fields
        return fields

    def message_tags(self, fqn: str) -> Dict[int, FieldDescriptor]:
        tags = self._message_tags.get(fqn)
        if tags is None:
            tags = {f.tag: f for f in self.get(fqn).message_def.fields}
            self._message_tags[fqn] = tags
        return tags

    def union_branches(self, fqn: str) -> Dict[int, UnionBranch]:
        branches = self._branches.get(fqn)
        if branches is None:
            branches = {b.discriminator: b for b in self.get(fqn).union_def.branches}
            self._branches[fqn] = branches
        return branches

    def fixed_size(self, type_desc: TypeDescriptor) -> Optional[int]:
        """Encoded size when every value of the type has the same size, else None."""
        kind = type_desc.kind
        primitive = kind.primitive
        if primitive is not None:
            return primitive.size
        if kind is TypeKind.FIXED_ARRAY:
            element = self.fixed_size(type_desc.element)
            return None if element is None else element * type_desc.fixed_length
        if kind is TypeKind.DEFINED:
            size = self._definition_size(type_desc.defined_fqn)
            return None if size == _UNSIZED else size
        return None

    def _definition_size(self, fqn: str) -> int:
        if fqn in self._sizes:
            return self._sizes[fqn]
        definition = self.get(fqn)
        self._sizes[fqn] = _UNSIZED
        size = _UNSIZED
        if definition.kind is DefinitionKind.ENUM:
            size = definition.enum_def.base.primitive.size
        elif definition.kind is DefinitionKind.STRUCT:
            total = 0
            for fld in definition.struct_def.fields:
                part = self.fixed_size(fld.type)
                if part is None:
                    total = _UNSIZED
                    break
                total += part
            size = total
        self._sizes[fqn] = size
        return size


__all__ = ["TypeRef", "TypeTable"]
