"""Typed values, kinds, contexts and a host-procedure bridge for a small
intensional expression language."""

from .algebra import is_subtype, join, join_kind
from .context import Context, TagSet, parse_context
from .kinds import Kind, kinds_of
from .values import TypeTag, Value, format_value, parse_type, type_name

__version__ = "0.1.0"

__all__ = [
    "Context", "Kind", "TagSet", "TypeTag", "Value", "format_value",
    "is_subtype", "join", "join_kind", "kinds_of", "parse_context",
    "parse_type", "type_name",
]
