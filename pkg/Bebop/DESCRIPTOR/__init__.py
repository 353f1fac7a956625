"""
Compiled schema descriptors.

`Bebop.DESCRIPTOR.codec` (the `.bopd` reader and writer) depends on the
dynamic codec and is imported from its own module.
"""

from Bebop.DESCRIPTOR.builder import build_descriptor_set, order_definitions, type_descriptor
from Bebop.DESCRIPTOR.errors import DescriptorError, ReservedCollision
from Bebop.DESCRIPTOR.evolution import EvolutionChange, Verdict, check_evolution, has_breaking
from Bebop.DESCRIPTOR.model import (
    ConstDef,
    DecoratorArgument,
    DecoratorDef,
    DecoratorParam,
    DecoratorUsage,
    DefinitionDescriptor,
    DescriptorSet,
    EnumDef,
    EnumMember,
    FieldDescriptor,
    MessageDef,
    MethodDescriptor,
    SchemaDescriptor,
    ServiceDef,
    StructDef,
    TypeDescriptor,
    TypeKind,
    UnionBranch,
    UnionDef,
)
from Bebop.DESCRIPTOR.records import bebop_record, record_class, record_fqn
from Bebop.DESCRIPTOR.routing import RESERVED_IDS, check_routing_ids, method_routing_id, murmur3_lowbias32

__all__ = [
    "RESERVED_IDS",
    "ConstDef",
    "DecoratorArgument",
    "DecoratorDef",
    "DecoratorParam",
    "DecoratorUsage",
    "DefinitionDescriptor",
    "DescriptorError",
    "DescriptorSet",
    "EnumDef",
    "EnumMember",
    "EvolutionChange",
    "FieldDescriptor",
    "MessageDef",
    "MethodDescriptor",
    "ReservedCollision",
    "SchemaDescriptor",
    "ServiceDef",
    "StructDef",
    "TypeDescriptor",
    "TypeKind",
    "UnionBranch",
    "UnionDef",
    "Verdict",
    "bebop_record",
    "build_descriptor_set",
    "check_evolution",
    "check_routing_ids",
    "has_breaking",
    "method_routing_id",
    "murmur3_lowbias32",
    "order_definitions",
    "record_class",
    "record_fqn",
    "type_descriptor",
]
