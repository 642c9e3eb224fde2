"""Kinds and their operator delegates.

A kind groups the types that share an operator family.  Kinds are an
implementation device: programs never see them, but every arithmetic,
comparison, logic and bitwise operator is routed through the delegate
registered for the kind its operands belong to.

Each delegate exposes a ``*_tag`` method computing the result tag from the
operand tags alone.  The static checker calls those, and the value-level
methods call them too, so static and dynamic typing cannot disagree.
"""

from __future__ import annotations

import enum
import math

from .errors import ArithmeticFault, KindError, StrictTypeError, UndefinedKindError
from .values import (
    ARRAY, BOOLEAN, CONTEXT, DIMENSION, DOUBLE, EMBED, FLOAT, FUNCTION, INTEGER,
    OBJECT, OPERATOR, STRING, TOP, VOID,
    T_BOOLEAN, T_DOUBLE, T_FLOAT, T_INTEGER,
    Float32, TypeTag, Value, boolean, double, double_bits, double_from_bits,
    float32, integer, type_name, wrap_int64,
)


class Kind(enum.Enum):
    # declaration order is the priority order used by join_kind
    NUMERIC = "A"
    LOGIC = "L"
    BITWISE = "B"
    INTENSIONAL = "C"
    COMPOSITE = "D"
    FUNCTION = "F"

    @property
    def label(self) -> str:
        return self.name.lower()


MEMBERS: dict[Kind, frozenset[str]] = {
    Kind.NUMERIC: frozenset({INTEGER, FLOAT, DOUBLE}),
    Kind.LOGIC: frozenset({BOOLEAN}),
    Kind.BITWISE: frozenset({INTEGER, FLOAT, DOUBLE, BOOLEAN}),
    Kind.INTENSIONAL: frozenset({CONTEXT, DIMENSION}),
    Kind.COMPOSITE: frozenset({OBJECT, ARRAY, EMBED, STRING}),
    Kind.FUNCTION: frozenset({FUNCTION, OPERATOR, EMBED}),
}


def kinds_of(t: TypeTag) -> frozenset[Kind]:
    if t.name == TOP:
        raise UndefinedKindError("the top type belongs to no kind")
    return frozenset(k for k in Kind if t.name in MEMBERS[k])


def has_kind(t: TypeTag, kind: Kind) -> bool:
    return t.name in MEMBERS[kind]


_RANK = {INTEGER: 0, FLOAT: 1, DOUBLE: 2}
_BY_RANK = (T_INTEGER, T_FLOAT, T_DOUBLE)


def promote(t1: TypeTag, t2: TypeTag) -> TypeTag:
    """Wider of two numeric tags under Integer < Float < Double."""
    return _BY_RANK[max(_RANK[t1.name], _RANK[t2.name])]


ARITH_OPS = ("add", "subtract", "multiply", "divide", "mod", "pow")
COMPARE_OPS = ("gt", "lt", "ge", "le", "eq")
LOGIC_OPS = ("and", "or", "xor", "nand", "nor")
BITWISE_OPS = ("band", "bor", "bxor", "bnand", "bnor")


def _need(kind: Kind, t: TypeTag, what: str):
    if not has_kind(t, kind):
        raise KindError(f"{what} needs {kind.label} operands, got {type_name(t)}")


# ---------------------------------------------------------------------------
# IEEE helpers; Python raises where IEEE 754 produces inf or NaN

def _fdiv(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _fmod(a: float, b: float) -> float:
    try:
        return math.fmod(a, b)
    except ValueError:
        return math.nan


def _fpow(a: float, b: float) -> float:
    odd_int = b.is_integer() and abs(b) < 2 ** 53 and int(b) % 2 == 1
    try:
        return math.pow(a, b)
    except OverflowError:
        return -math.inf if a < 0 and odd_int else math.inf
    except ValueError:
        if a == 0.0:
            # 0 ** negative
            return math.copysign(math.inf, a) if odd_int else math.inf
        return math.nan


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


class NumericDelegate:
    """Arithmetic and comparison operators for kind A."""

    def arith_tag(self, op: str, t1: TypeTag, t2: TypeTag) -> TypeTag:
        if op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator {op!r}")
        _need(Kind.NUMERIC, t1, op)
        _need(Kind.NUMERIC, t2, op)
        return promote(t1, t2)

    def compare_tag(self, op: str, t1: TypeTag, t2: TypeTag) -> TypeTag:
        if op not in COMPARE_OPS:
            raise ValueError(f"unknown comparison operator {op!r}")
        _need(Kind.NUMERIC, t1, op)
        _need(Kind.NUMERIC, t2, op)
        return T_BOOLEAN

    def negate_tag(self, t: TypeTag) -> TypeTag:
        _need(Kind.NUMERIC, t, "negation")
        return t

    def arith(self, op: str, a: Value, b: Value) -> Value:
        tag = self.arith_tag(op, a.tag, b.tag)
        if tag.name == INTEGER:
            return integer(self._int_arith(op, a.payload, b.payload))
        x, y = _as_float(a, tag), _as_float(b, tag)
        if op == "add":
            r = x + y
        elif op == "subtract":
            r = x - y
        elif op == "multiply":
            r = x * y
        elif op == "divide":
            r = _fdiv(x, y)
        elif op == "mod":
            r = _fmod(x, y)
        else:
            r = _fpow(x, y)
        return float32(Float32(r)) if tag.name == FLOAT else double(r)

    @staticmethod
    def _int_arith(op: str, a: int, b: int) -> int:
        if op == "add":
            return a + b
        if op == "subtract":
            return a - b
        if op == "multiply":
            return a * b
        if op in ("divide", "mod"):
            if b == 0:
                raise ArithmeticFault(f"integer {'division' if op == 'divide' else 'modulo'} by zero")
            q = _trunc_div(a, b)
            return q if op == "divide" else a - b * q
        if b < 0:
            raise ArithmeticFault("negative exponent on int operands leaves the int type")
        return pow(a, b, 1 << 64)

    def negate(self, a: Value) -> Value:
        self.negate_tag(a.tag)
        if a.tag.name == INTEGER:
            return integer(-a.payload)
        if a.tag.name == FLOAT:
            return float32(Float32.from_bits(a.payload.bits ^ 0x80000000))
        return double(-a.payload)

    def compare(self, op: str, a: Value, b: Value) -> Value:
        self.compare_tag(op, a.tag, b.tag)
        tag = promote(a.tag, b.tag)
        if tag.name == INTEGER:
            x, y = a.payload, b.payload
        else:
            x, y = _as_float(a, tag), _as_float(b, tag)
        if op == "gt":
            r = x > y
        elif op == "lt":
            r = x < y
        elif op == "ge":
            r = x >= y
        elif op == "le":
            r = x <= y
        else:
            r = x == y
        return boolean(r)


def _as_float(v: Value, target: TypeTag) -> float:
    """Payload converted to the promoted representation, as a Python float."""
    if v.tag.name == INTEGER:
        return float(Float32(v.payload)) if target.name == FLOAT else float(v.payload)
    return float(v.payload)


class LogicDelegate:
    """Boolean connectives for kind L.  Void is accepted and reads as true."""

    @staticmethod
    def _operand(t: TypeTag, op: str):
        if t.name not in (BOOLEAN, VOID):
            raise KindError(f"{op} needs bool operands, got {type_name(t)}")

    def logic_tag(self, op: str, t1: TypeTag, t2: TypeTag) -> TypeTag:
        if op not in LOGIC_OPS:
            raise ValueError(f"unknown logic operator {op!r}")
        self._operand(t1, op)
        self._operand(t2, op)
        return T_BOOLEAN

    def not_tag(self, t: TypeTag) -> TypeTag:
        self._operand(t, "not")
        return T_BOOLEAN

    def logic(self, op: str, a: Value, b: Value) -> Value:
        self.logic_tag(op, a.tag, b.tag)
        x = True if a.tag.name == VOID else a.payload
        y = True if b.tag.name == VOID else b.payload
        if op == "and":
            r = x and y
        elif op == "or":
            r = x or y
        elif op == "xor":
            r = x != y
        elif op == "nand":
            r = not (x and y)
        else:
            r = not (x or y)
        return boolean(r)

    def logic_not(self, a: Value) -> Value:
        self.not_tag(a.tag)
        return boolean(not (True if a.tag.name == VOID else a.payload))


_MASK = {INTEGER: (1 << 64) - 1, FLOAT: (1 << 32) - 1, DOUBLE: (1 << 64) - 1, BOOLEAN: 1}


class BitwiseDelegate:
    """Bitwise operators for kind B over the full bit length of the type.

    Operands must carry identical tags; there is no implicit cast.  Floats
    and doubles are operated on through their IEEE 754 bit patterns.
    """

    def bitwise_tag(self, op: str, t1: TypeTag, t2: TypeTag) -> TypeTag:
        if op not in BITWISE_OPS:
            raise ValueError(f"unknown bitwise operator {op!r}")
        _need(Kind.BITWISE, t1, op)
        _need(Kind.BITWISE, t2, op)
        if t1 != t2:
            raise StrictTypeError(
                f"strict bitwise typing: {op} operands {type_name(t1)} and "
                f"{type_name(t2)} differ and bitwise operators never cast")
        return t1

    def not_tag(self, t: TypeTag) -> TypeTag:
        _need(Kind.BITWISE, t, "bnot")
        return t

    def bitwise(self, op: str, a: Value, b: Value) -> Value:
        tag = self.bitwise_tag(op, a.tag, b.tag)
        mask = _MASK[tag.name]
        x, y = _bits(a), _bits(b)
        if op == "band":
            r = x & y
        elif op == "bor":
            r = x | y
        elif op == "bxor":
            r = x ^ y
        elif op == "bnand":
            r = ~(x & y)
        else:
            r = ~(x | y)
        return _from_bits(tag, r & mask)

    def bitwise_not(self, a: Value) -> Value:
        tag = self.not_tag(a.tag)
        return _from_bits(tag, ~_bits(a) & _MASK[tag.name])


def _bits(v: Value) -> int:
    n = v.tag.name
    if n == INTEGER:
        return v.payload & _MASK[INTEGER]
    if n == BOOLEAN:
        return int(v.payload)
    if n == FLOAT:
        return v.payload.bits
    return double_bits(v.payload)


def _from_bits(tag: TypeTag, bits: int) -> Value:
    n = tag.name
    if n == INTEGER:
        return integer(wrap_int64(bits))
    if n == BOOLEAN:
        return boolean(bool(bits))
    if n == FLOAT:
        return float32(Float32.from_bits(bits))
    return Value(T_DOUBLE, double_from_bits(bits))


NUMERIC = NumericDelegate()
LOGIC = LogicDelegate()
BITWISE = BitwiseDelegate()

DELEGATES = {Kind.NUMERIC: NUMERIC, Kind.LOGIC: LOGIC, Kind.BITWISE: BITWISE}


def delegate(kind: Kind):
    """Operator provider for ``kind``; composite, intensional and function
    kinds are served by :mod:`hoil.values` and :mod:`hoil.context` directly."""
    return DELEGATES[kind]


def arith(op: str, a: Value, b: Value) -> Value:
    return NUMERIC.arith(op, a, b)


def compare(op: str, a: Value, b: Value) -> Value:
    return NUMERIC.compare(op, a, b)


def logic(op: str, a: Value, b: Value) -> Value:
    return LOGIC.logic(op, a, b)


def logic_not(a: Value) -> Value:
    return LOGIC.logic_not(a)


def bitwise(op: str, a: Value, b: Value) -> Value:
    return BITWISE.bitwise(op, a, b)


def bitwise_not(a: Value) -> Value:
    return BITWISE.bitwise_not(a)
