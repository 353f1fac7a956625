"""
Schema evolution checks.

Compares two DescriptorSets definition by definition (matched by fully
qualified name) and classifies every difference as safe or breaking for
data written with the old schema and read with the new one, and vice versa.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List

from Bebop.DESCRIPTOR.model import (
    DefinitionDescriptor,
    DescriptorSet,
    EnumDef,
    FieldDescriptor,
    MessageDef,
    ServiceDef,
    StructDef,
    UnionDef,
)
from Bebop.SCHEMA.ast import DefinitionKind
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)


class Verdict(Enum):
    SAFE = "safe"
    BREAKING = "breaking"


@dataclass(frozen=True)
class EvolutionChange:
    """One difference between two schema versions."""

    subject: str
    change: str
    verdict: Verdict
    reason: str = ""

    @property
    def breaking(self) -> bool:
        return self.verdict is Verdict.BREAKING

    def __str__(self) -> str:
        note = f" ({self.reason})" if self.reason else ""
        return f"{self.verdict.value}: {self.subject}: {self.change}{note}"


def _safe(subject: str, change: str, reason: str = "") -> EvolutionChange:
    return EvolutionChange(subject, change, Verdict.SAFE, reason)


def _breaking(subject: str, change: str, reason: str = "") -> EvolutionChange:
    return EvolutionChange(subject, change, Verdict.BREAKING, reason)


def _is_deprecated(fld: FieldDescriptor) -> bool:
    return any(usage.fqn.rsplit(".", 1)[-1] == "deprecated" for usage in fld.decorators)


# =============================================================================
# Per-kind comparisons
# =============================================================================

def _compare_message(fqn: str, old: MessageDef, new: MessageDef) -> List[EvolutionChange]:
    changes: List[EvolutionChange] = []
    old_tags = {f.tag: f for f in old.fields}
    new_tags = {f.tag: f for f in new.fields}
    old_names = {f.name: f for f in old.fields}
    new_names = {f.name: f for f in new.fields}

    # same name under a different tag
    retagged = set()
    for name, old_field in old_names.items():
        new_field = new_names.get(name)
        if new_field is not None and new_field.tag != old_field.tag and new_field.tag not in old_tags and old_field.tag not in new_tags:
            retagged.update({old_field.tag, new_field.tag})
            changes.append(
                _breaking(f"{fqn}.{name}", f"tag changed from {old_field.tag} to {new_field.tag}", "Equivalent to remove + add")
            )

    for tag, old_field in old_tags.items():
        new_field = new_tags.get(tag)
        subject = f"{fqn}.{old_field.name}"
        if new_field is None:
            if tag not in retagged:
                changes.append(
                    _breaking(subject, f"field removed (tag {tag})", "Later fields are lost to old readers; deprecate instead")
                )
            continue
        if new_field.type != old_field.type:
            changes.append(
                _breaking(subject, f"type changed from {old_field.type} to {new_field.type}", "Never reuse tag with different type")
            )
        if new_field.name != old_field.name:
            changes.append(_safe(subject, f"renamed to {new_field.name}", "Names not on wire"))
        if _is_deprecated(new_field) and not _is_deprecated(old_field):
            changes.append(_safe(subject, "deprecated", "Skipped on wire; don't reuse tag"))

    for tag, new_field in new_tags.items():
        if tag not in old_tags and tag not in retagged:
            changes.append(_safe(f"{fqn}.{new_field.name}", f"field added (tag {tag})", "Use new tag; old readers ignore"))
    return changes


def _compare_struct(fqn: str, old: StructDef, new: StructDef) -> List[EvolutionChange]:
    changes: List[EvolutionChange] = []
    old_names = [f.name for f in old.fields]
    new_names = [f.name for f in new.fields]
    old_by_name = {f.name: f for f in old.fields}
    new_by_name = {f.name: f for f in new.fields}

    if len(old.fields) == len(new.fields) and all(a.type == b.type for a, b in zip(old.fields, new.fields)):
        moved = [(a.name, b.name) for a, b in zip(old.fields, new.fields) if a.name != b.name]
        if moved and set(old_names) == set(new_names):
            changes.append(_breaking(fqn, "fields reordered", "Or convert to message"))
        else:
            for old_name, new_name in moved:
                changes.append(_breaking(f"{fqn}.{old_name}", f"renamed to {new_name}", "Struct fields cannot change"))
        return changes

    for name in old_names:
        if name not in new_by_name:
            changes.append(_breaking(f"{fqn}.{name}", "field removed", "Create versioned type instead"))
    for name in new_names:
        if name not in old_by_name:
            changes.append(_breaking(f"{fqn}.{name}", "field added", "Positional encoding; no tags"))

    common_old = [n for n in old_names if n in new_by_name]
    common_new = [n for n in new_names if n in old_by_name]
    if common_old != common_new:
        changes.append(_breaking(fqn, "fields reordered", "Or convert to message"))
    for name in common_old:
        if old_by_name[name].type != new_by_name[name].type:
            changes.append(
                _breaking(
                    f"{fqn}.{name}",
                    f"type changed from {old_by_name[name].type} to {new_by_name[name].type}",
                    "Positional layout changes",
                )
            )
    return changes


def _compare_union(fqn: str, old: UnionDef, new: UnionDef) -> List[EvolutionChange]:
    changes: List[EvolutionChange] = []
    old_branches = {b.discriminator: b for b in old.branches}
    new_branches = {b.discriminator: b for b in new.branches}
    for disc, branch in old_branches.items():
        subject = f"{fqn}.{branch.name}"
        replacement = new_branches.get(disc)
        if replacement is None:
            changes.append(_breaking(subject, f"branch removed (discriminator {disc})", "Decode fails for existing data"))
            continue
        if replacement.type_fqn != branch.type_fqn:
            changes.append(_breaking(subject, f"branch type changed from {branch.type_fqn} to {replacement.type_fqn}"))
        elif replacement.name != branch.name:
            changes.append(_safe(subject, f"renamed to {replacement.name}", "Names not on wire"))
    for disc, branch in new_branches.items():
        if disc not in old_branches:
            changes.append(_safe(f"{fqn}.{branch.name}", f"branch added (discriminator {disc})"))
    return changes


def _compare_enum(fqn: str, old: EnumDef, new: EnumDef) -> List[EvolutionChange]:
    if old.base != new.base:
        return [
            _breaking(fqn, f"base type changed from {old.base.name.lower()} to {new.base.name.lower()}", "Wire width changes")
        ]
    changes: List[EvolutionChange] = []
    old_values = old.member_names()
    new_values = new.member_names()
    for value, name in old_values.items():
        if value not in new_values:
            changes.append(_breaking(f"{fqn}.{name}", f"value {value} removed", "Existing data may contain it"))
        elif new_values[value] != name:
            changes.append(_safe(f"{fqn}.{name}", f"renamed to {new_values[value]}", "Names not on wire"))
    for value, name in new_values.items():
        if value not in old_values:
            changes.append(_safe(f"{fqn}.{name}", f"value {value} added"))
    return changes


def _compare_service(fqn: str, old: ServiceDef, new: ServiceDef) -> List[EvolutionChange]:
    changes: List[EvolutionChange] = []
    old_methods = {m.name: m for m in old.methods}
    new_methods = {m.name: m for m in new.methods}
    for name, method in old_methods.items():
        replacement = new_methods.get(name)
        if replacement is None:
            changes.append(_breaking(f"{fqn}.{name}", "method removed", "Clients still call its routing ID"))
            continue
        before = (method.request_fqn, method.response_fqn, method.request_stream, method.response_stream)
        after = (replacement.request_fqn, replacement.response_fqn, replacement.request_stream, replacement.response_stream)
        if before != after:
            changes.append(_breaking(f"{fqn}.{name}", "method signature changed"))
    for name in new_methods:
        if name not in old_methods:
            changes.append(_safe(f"{fqn}.{name}", "method added"))
    return changes


_COMPARERS = {
    DefinitionKind.MESSAGE: ("message_def", _compare_message),
    DefinitionKind.STRUCT: ("struct_def", _compare_struct),
    DefinitionKind.UNION: ("union_def", _compare_union),
    DefinitionKind.ENUM: ("enum_def", _compare_enum),
    DefinitionKind.SERVICE: ("service_def", _compare_service),
}


# =============================================================================
# Entry point
# =============================================================================

def _index(descriptors: DescriptorSet) -> Dict[str, DefinitionDescriptor]:
    return {definition.fqn: definition for definition in descriptors.walk()}


def check_evolution(old: DescriptorSet, new: DescriptorSet) -> List[EvolutionChange]:
    """
    Classify every difference between two compiled schema versions.

    Args:
        old: Descriptors of the deployed schema
        new: Descriptors of the candidate schema

    Returns:
        Changes in old-definition order, then additions
    """
    old_index = _index(old)
    new_index = _index(new)
    changes: List[EvolutionChange] = []

    for fqn, before in old_index.items():
        after = new_index.get(fqn)
        if after is None:
            changes.append(_breaking(fqn, f"{before.kind.keyword} removed", "Existing references break"))
            continue
        if after.kind is not before.kind:
            changes.append(_breaking(fqn, f"changed from {before.kind.keyword} to {after.kind.keyword}"))
            continue
        comparer = _COMPARERS.get(before.kind)
        if comparer is not None:
            attribute, compare = comparer
            changes.extend(compare(fqn, getattr(before, attribute), getattr(after, attribute)))
        elif before.kind is DefinitionKind.CONST and before.const_def != after.const_def:
            changes.append(_safe(fqn, "constant value changed", "Constants are compiled into code, not sent"))

    for fqn, after in new_index.items():
        if fqn not in old_index:
            changes.append(_safe(fqn, f"{after.kind.keyword} added"))

    logger.debug(f"Evolution check: {len(changes)} change(s), {sum(c.breaking for c in changes)} breaking")
    return changes


def has_breaking(changes: List[EvolutionChange]) -> bool:
    return any(change.breaking for change in changes)


__all__ = ["EvolutionChange", "Verdict", "check_evolution", "has_breaking"]
