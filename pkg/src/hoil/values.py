"""The value universe: type tags, immutable values, composite operations.

Every runtime value is a :class:`Value` pairing a :class:`TypeTag` with a
payload.  Payloads are plain immutable Python objects (``int``, ``float``,
``str``, tuples) or one of the small frozen payload classes below, so a
``Value`` can be hashed, shared between threads and used as a cache key.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import (
    ConstructionError,
    IndexRangeError,
    KindError,
    MembershipError,
    OperandTypeError,
)

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


# ---------------------------------------------------------------------------
# type tags

INTEGER = "Integer"
FLOAT = "Float"
DOUBLE = "Double"
BOOLEAN = "Boolean"
CHARACTER = "Character"
STRING = "String"
VOID = "Void"
DIMENSION = "Dimension"
CONTEXT = "Context"
ARRAY = "Array"
OBJECT = "Object"
EMBED = "Embed"
FUNCTION = "Function"
OPERATOR = "Operator"
TOP = "Top"

TAG_NAMES = (
    INTEGER, FLOAT, DOUBLE, BOOLEAN, CHARACTER, STRING, VOID, DIMENSION,
    CONTEXT, ARRAY, OBJECT, EMBED, FUNCTION, OPERATOR, TOP,
)


@dataclass(frozen=True)
class TypeTag:
    """Type of a value.

    ``elem`` is set only for arrays.  ``object_name`` is set for named
    object types; an Object tag without a name is the top of the object
    family (what two differently named objects join to).
    """

    name: str
    elem: TypeTag | None = None
    object_name: str | None = None

    def __post_init__(self):
        if self.name not in TAG_NAMES:
            raise ValueError(f"unknown type tag {self.name!r}")
        if (self.name == ARRAY) != (self.elem is not None):
            raise ValueError("exactly the Array tag carries an element tag")
        if self.elem is not None and self.elem.name == TOP:
            raise ValueError("Array(Top) is not a type")
        if self.object_name is not None and self.name != OBJECT:
            raise ValueError("only Object tags carry a type name")

    @property
    def is_top(self) -> bool:
        return self.name == TOP

    def __str__(self):
        return type_name(self)

    def __repr__(self):
        return f"TypeTag({type_name(self)})"


T_INTEGER = TypeTag(INTEGER)
T_FLOAT = TypeTag(FLOAT)
T_DOUBLE = TypeTag(DOUBLE)
T_BOOLEAN = TypeTag(BOOLEAN)
T_CHARACTER = TypeTag(CHARACTER)
T_STRING = TypeTag(STRING)
T_VOID = TypeTag(VOID)
T_DIMENSION = TypeTag(DIMENSION)
T_CONTEXT = TypeTag(CONTEXT)
T_OBJECT = TypeTag(OBJECT)
T_EMBED = TypeTag(EMBED)
T_FUNCTION = TypeTag(FUNCTION)
T_OPERATOR = TypeTag(OPERATOR)
T_TOP = TypeTag(TOP)

SCALAR_TAGS = (
    T_INTEGER, T_FLOAT, T_DOUBLE, T_BOOLEAN, T_CHARACTER, T_STRING, T_VOID,
    T_DIMENSION, T_CONTEXT, T_OBJECT, T_EMBED, T_FUNCTION, T_OPERATOR,
)


def array_of(elem: TypeTag) -> TypeTag:
    return TypeTag(ARRAY, elem=elem)


def object_tag(name: str | None = None) -> TypeTag:
    return TypeTag(OBJECT, object_name=name)


# Lucid-side spellings used by the CLI and the serializer.
_SPELLING = {
    INTEGER: "int", FLOAT: "float", DOUBLE: "double", BOOLEAN: "bool",
    CHARACTER: "char", STRING: "string", VOID: "void", DIMENSION: "dimension",
    CONTEXT: "context", OBJECT: "object", EMBED: "embed", FUNCTION: "function",
    OPERATOR: "operator", TOP: "top",
}
_BY_SPELLING = {v: k for k, v in _SPELLING.items()}


def type_name(tag: TypeTag) -> str:
    if tag.name == ARRAY:
        return f"array<{type_name(tag.elem)}>"
    if tag.name == OBJECT and tag.object_name is not None:
        return f"object<{tag.object_name}>"
    return _SPELLING[tag.name]


def parse_type(text: str) -> TypeTag:
    """Inverse of :func:`type_name`; raises ``ValueError`` on bad input."""
    s = text.strip()
    if s.endswith(">") and "<" in s:
        head, _, rest = s.partition("<")
        inner = rest[:-1].strip()
        if head == "array":
            return array_of(parse_type(inner))
        if head == "object" and inner.isidentifier():
            return object_tag(inner)
        raise ValueError(f"bad type name {text!r}")
    if s == "array":
        raise ValueError("array type needs an element type, e.g. array<int>")
    try:
        return TypeTag(_BY_SPELLING[s])
    except KeyError:
        raise ValueError(f"unknown type name {text!r}") from None


# ---------------------------------------------------------------------------
# payloads

class Float32(float):
    """A float whose value is exactly representable in IEEE binary32.

    ``bits`` holds the 32-bit pattern so NaN payloads survive even where
    the host's float conversion would quiet them.
    """

    __slots__ = ("bits",)

    def __new__(cls, x=0.0, bits=None):
        if bits is None:
            bits = _f32_bits(x)
        self = super().__new__(cls, struct.unpack("<f", struct.pack("<I", bits))[0])
        self.bits = bits
        return self

    @classmethod
    def from_bits(cls, bits: int) -> Float32:
        return cls(bits=bits & 0xFFFFFFFF)

    def __repr__(self):
        return _format_f32(self)

    def __reduce__(self):
        return (Float32.from_bits, (self.bits,))


def _f32_bits(x) -> int:
    if isinstance(x, Float32):
        return x.bits
    if isinstance(x, int):
        x = _int_to_f32_exact(x)
    try:
        packed = struct.pack("<f", x)
    except OverflowError:
        packed = struct.pack("<f", math.copysign(math.inf, x))
    return struct.unpack("<I", packed)[0]


def _int_to_f32_exact(n: int) -> float:
    # Round an integer straight to 24 significant bits (ties to even) so that
    # int -> double -> float double rounding never happens.
    if n == 0:
        return 0.0
    sign = -1 if n < 0 else 1
    m = abs(n)
    shift = m.bit_length() - 24
    if shift > 0:
        q, r = divmod(m, 1 << shift)
        half = 1 << (shift - 1)
        if r > half or (r == half and q & 1):
            q += 1
        m = q << shift
    try:
        return sign * float(m)
    except OverflowError:
        return sign * math.inf


def double_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def double_from_bits(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", bits & 0xFFFFFFFFFFFFFFFF))[0]


@dataclass(frozen=True)
class Coordinate:
    """Payload of a Dimension value: a dimension name with its current tag."""

    name: str
    tag: int | str


@dataclass(frozen=True)
class EmbedRef:
    uri: str
    handle: str | None = None


@dataclass(frozen=True)
class HostHandle:
    """Reference to a procedure in a bridge registry.

    ``receiver`` is set for object methods reached through ``dot``; it is
    passed as the first host argument.
    """

    name: str
    arity: int
    receiver: Any = None


@dataclass(frozen=True)
class Closure:
    """A language-level function: parameters, body and defining scope."""

    name: str
    params: tuple
    body: Any
    scope: Any = field(default=None, compare=False, hash=False)
    env_key: Any = ()   # identifies the captured scope for equality

    @property
    def arity(self) -> int:
        return len(self.params)


# ---------------------------------------------------------------------------
# values

@dataclass(frozen=True, eq=False)
class Value:
    tag: TypeTag
    payload: Any

    def _key(self):
        return (self.tag, _payload_key(self.tag, self.payload))

    def __eq__(self, other):
        if not isinstance(other, Value):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Value({format_value(self)})"

    def __str__(self):
        return format_value(self)


def _payload_key(tag: TypeTag, payload):
    n = tag.name
    if n == DOUBLE:
        return double_bits(payload)
    if n == FLOAT:
        return payload.bits
    if n == ARRAY:
        return tuple(v._key() for v in payload)
    if n == OBJECT:
        return frozenset((k, v._key()) for k, v in payload)
    return payload


def wrap_int64(n: int) -> int:
    return ((n - INT64_MIN) & 0xFFFFFFFFFFFFFFFF) + INT64_MIN


def integer(n: int) -> Value:
    if isinstance(n, bool) or not isinstance(n, int):
        raise OperandTypeError(f"integer payload must be int, got {type(n).__name__}")
    return Value(T_INTEGER, wrap_int64(n))


def float32(x) -> Value:
    return Value(T_FLOAT, x if isinstance(x, Float32) else Float32(x))


def double(x) -> Value:
    return Value(T_DOUBLE, float(x))


def boolean(b: bool) -> Value:
    return TRUE if b else FALSE


def character(c: str) -> Value:
    if not isinstance(c, str) or len(c) != 1:
        raise ConstructionError("character payload must be a single code point")
    return Value(T_CHARACTER, c)


def string(s: str) -> Value:
    if not isinstance(s, str):
        raise OperandTypeError("string payload must be str")
    return Value(T_STRING, s)


def check_tag_value(tag) -> int | str:
    if isinstance(tag, bool) or not isinstance(tag, (int, str)):
        raise OperandTypeError(f"dimension tags are integers or strings, got {tag!r}")
    if isinstance(tag, int):
        return wrap_int64(tag)
    return tag


def dimension(name: str, tag) -> Value:
    if not name:
        raise ConstructionError("dimension name must be non-empty")
    return Value(T_DIMENSION, Coordinate(name, check_tag_value(tag)))


def context_value(ctx) -> Value:
    return Value(T_CONTEXT, ctx)


def construct_array(elem: TypeTag, items: Iterable[Value] = ()) -> Value:
    items = tuple(items)
    for v in items:
        if v.tag != elem:
            raise ConstructionError(
                f"array<{type_name(elem)}> cannot hold a {type_name(v.tag)} element")
    return Value(array_of(elem), items)


def construct_object(name: str, fields) -> Value:
    """Build an Object value; ``fields`` is a mapping or a sequence of pairs.

    Pairs are checked for duplicate names; a mapping cannot have any.
    """
    if not name or not name.isidentifier():
        raise ConstructionError(f"bad object type name {name!r}")
    pairs = list(fields.items()) if isinstance(fields, Mapping) else list(fields)
    seen = set()
    for k, v in pairs:
        if k in seen:
            raise ConstructionError(f"duplicate field {k!r} in {name}")
        if not isinstance(v, Value):
            raise ConstructionError(f"field {k!r} is not a Value")
        seen.add(k)
    return Value(object_tag(name), tuple(pairs))


def embed(uri: str, handle: str | None = None) -> Value:
    return Value(T_EMBED, EmbedRef(uri, handle))


def function(payload) -> Value:
    return Value(T_FUNCTION, payload)


def operator(payload) -> Value:
    return Value(T_OPERATOR, payload)


TRUE = Value(T_BOOLEAN, True)
FALSE = Value(T_BOOLEAN, False)
VOID_VALUE = Value(T_VOID, None)


# ---------------------------------------------------------------------------
# uniform interface

def type_of(v: Value) -> TypeTag:
    return v.tag


def value_of(v: Value):
    """Enclosed payload; Void reads as ``True``."""
    if v.tag.name == VOID:
        return True
    return v.payload


def truth(v: Value) -> bool:
    """Boolean reading of a value accepted where a condition is required."""
    if v.tag.name == VOID:
        return True
    if v.tag.name == BOOLEAN:
        return v.payload
    raise KindError(f"expected bool, got {type_name(v.tag)}")


def _eq_key(v: Value):
    # Void is identified with Boolean true at every level.
    tag = _norm_tag(v.tag)
    n = v.tag.name
    if n == VOID:
        return (tag, True)
    if n == ARRAY:
        return (tag, tuple(_eq_key(x) for x in v.payload))
    if n == OBJECT:
        return (tag, frozenset((k, _eq_key(x)) for k, x in v.payload))
    return (tag, _payload_key(v.tag, v.payload))


def _norm_tag(tag: TypeTag) -> TypeTag:
    if tag.name == VOID:
        return T_BOOLEAN
    if tag.name == ARRAY:
        return array_of(_norm_tag(tag.elem))
    return tag


def equals(a: Value, b: Value) -> Value:
    """Structural equality as a Boolean value.

    Floating payloads compare by bit pattern, which keeps this an
    equivalence relation (NaN equals itself); numeric comparison with
    promotion lives in :mod:`hoil.kinds`.
    """
    return boolean(_eq_key(a) == _eq_key(b))


# ---------------------------------------------------------------------------
# composite operations

def dot(v: Value, member: str, registry=None) -> Value:
    """Member access on objects, contexts and dimensions.

    Object methods are looked up in ``registry`` under ``"Type.member"``.
    """
    n = v.tag.name
    if n == OBJECT:
        for k, x in v.payload:
            if k == member:
                return x
        if registry is not None:
            method = registry.method_value(v, member)
            if method is not None:
                return method
        raise MembershipError(f"{v.tag.object_name} has no member {member!r}")
    if n == CONTEXT:
        tag = v.payload.get(member)
        if tag is None:
            raise MembershipError(f"context has no dimension {member!r}")
        return tag_to_value(tag)
    if n == DIMENSION:
        if member == "name":
            return string(v.payload.name)
        if member == "tag":
            return tag_to_value(v.payload.tag)
        raise MembershipError(f"dimension has no member {member!r}")
    raise KindError(f"'.' needs an object, context or dimension, got {type_name(v.tag)}")


def tag_to_value(tag) -> Value:
    return integer(tag) if isinstance(tag, int) else string(tag)


def array_index(a: Value, i: Value) -> Value:
    if a.tag.name != ARRAY:
        raise OperandTypeError(f"cannot index {type_name(a.tag)}")
    if i.tag.name != INTEGER:
        raise OperandTypeError(f"array index must be int, got {type_name(i.tag)}")
    k = i.payload
    if not 0 <= k < len(a.payload):
        raise IndexRangeError(f"index {k} out of range for length {len(a.payload)}")
    return a.payload[k]


def array_length(a: Value) -> Value:
    if a.tag.name == ARRAY:
        return integer(len(a.payload))
    if a.tag.name == STRING:
        return integer(len(a.payload))
    raise OperandTypeError(f"length of {type_name(a.tag)} is undefined")


def string_concat(a: Value, b: Value) -> Value:
    for x in (a, b):
        if x.tag.name != STRING:
            raise OperandTypeError(f"concatenation needs strings, got {type_name(x.tag)}")
    return string(a.payload + b.payload)


# ---------------------------------------------------------------------------
# canonical text form

def _format_f32(x: Float32) -> str:
    if math.isnan(x) or math.isinf(x):
        return repr(float(x))
    for digits in range(1, 10):
        s = f"{float(x):.{digits}g}"
        if _f32_bits(float(s)) == x.bits:
            break
    return repr(float(s))


def format_tag_value(tag) -> str:
    return str(tag) if isinstance(tag, int) else json.dumps(tag, ensure_ascii=False)


def bare(v: Value) -> str:
    """Payload text without the ``:type`` suffix (used inside arrays)."""
    n, p = v.tag.name, v.payload
    if n == INTEGER:
        return str(p)
    if n == DOUBLE:
        return repr(p)
    if n == FLOAT:
        return _format_f32(p)
    if n == BOOLEAN:
        return "true" if p else "false"
    if n == VOID:
        return "true"
    if n == CHARACTER:
        return "'" + json.dumps(p, ensure_ascii=False)[1:-1].replace("'", "\\'") + "'"
    if n == STRING:
        return json.dumps(p, ensure_ascii=False)
    if n == DIMENSION:
        return f"{p.name}:{format_tag_value(p.tag)}"
    if n == CONTEXT:
        return p.format()
    if n == ARRAY:
        return "[" + ",".join(bare(x) for x in p) + "]"
    if n == OBJECT:
        inner = ",".join(f"{k}:{format_value(x)}" for k, x in p)
        return f"{v.tag.object_name}{{{inner}}}"
    if n == EMBED:
        return f"embed({json.dumps(p.uri, ensure_ascii=False)})"
    if n == FUNCTION:
        return f"fun/{p.arity}"
    if n == OPERATOR:
        return f"op/{p.arity}"
    raise AssertionError(n)


def format_value(v: Value) -> str:
    suffix = "object" if v.tag.name == OBJECT else type_name(v.tag)
    return f"{bare(v)}:{suffix}"
