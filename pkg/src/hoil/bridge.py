"""Type bridge between intensional values and host procedures.

Both directions are driven by one declarative table, :data:`MAPPING_TABLE`.
Its upper half says which intensional type a host *return* type becomes;
its lower half says which host types may receive an intensional
*parameter*.  A :class:`ProcedureRegistry` holds natively registered
Python callables with declared host signatures and performs the checks on
every call.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

from . import values as V
from .algebra import is_subtype
from .errors import (
    ArityError,
    HoilError,
    HostCallError,
    ParameterMismatchError,
    RegistrationError,
    ReturnContractError,
    SignatureSyntaxError,
    UnknownProcedureError,
    UnmappableParameterError,
)
from .values import TypeTag, Value, type_name

MAPPING_TABLE = """
# host return type  | intensional expression type | internal type
int, byte, long     | int, dimension              | GIPSYInteger
float               | float                       | GIPSYFloat
double              | double                      | GIPSYDouble
boolean             | bool                        | GIPSYBoolean
char                | char                        | GIPSYCharacter
String              | string, dimension           | GIPSYString
Method              | function                    | GIPSYFunction
Method              | operator                    | GIPSYOperator
[]                  | []                          | GIPSYArray
Object              | class                       | GIPSYObject
Object              | URL                         | GIPSYEmbed
void                | bool::true                  | GIPSYVoid
---
# intensional parameter type | host types  | internal type
string              | String                      | GIPSYString
float               | float                       | GIPSYFloat
double              | double                      | GIPSYDouble
int                 | int                         | GIPSYInteger
dimension           | int, String                 | Dimension
bool                | boolean                     | GIPSYBoolean
class               | Object                      | GIPSYObject
URL                 | Object                      | GIPSYEmbed
[]                  | []                          | GIPSYArray
operator            | Method                      | GIPSYOperator
function            | Method                      | GIPSYFunction
"""

_INTERNAL = {
    "GIPSYInteger": V.INTEGER, "GIPSYFloat": V.FLOAT, "GIPSYDouble": V.DOUBLE,
    "GIPSYBoolean": V.BOOLEAN, "GIPSYCharacter": V.CHARACTER,
    "GIPSYString": V.STRING, "GIPSYFunction": V.FUNCTION,
    "GIPSYOperator": V.OPERATOR, "GIPSYArray": V.ARRAY, "GIPSYObject": V.OBJECT,
    "GIPSYEmbed": V.EMBED, "GIPSYVoid": V.VOID, "Dimension": V.DIMENSION,
}

# Roles disambiguate the two many-to-one host types.
_ROLE_OF = {V.FUNCTION: "function", V.OPERATOR: "operator", V.OBJECT: "object", V.EMBED: "embed"}


class ReturnRow(NamedTuple):
    host: tuple[str, ...]
    intensional: tuple[str, ...]
    internal: str


class ParamRow(NamedTuple):
    intensional: str
    host: tuple[str, ...]
    internal: str


def _split(cell: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in cell.split(","))


def load_table(text: str = MAPPING_TABLE) -> tuple[list[ReturnRow], list[ParamRow]]:
    upper, lower = [], []
    half = upper
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == "---":
            half = lower
            continue
        cells = [c.strip() for c in line.split("|")]
        if len(cells) != 3:
            raise ValueError(f"bad mapping row {line!r}")
        if half is upper:
            upper.append(ReturnRow(_split(cells[0]), _split(cells[1]), cells[2]))
        else:
            lower.append(ParamRow(cells[0], _split(cells[1]), cells[2]))
    return upper, lower


RETURN_ROWS, PARAM_ROWS = load_table()


# ---------------------------------------------------------------------------
# host descriptors

HOST_NAMES = ("int", "byte", "long", "float", "double", "boolean", "char",
              "String", "Method", "Object", "[]", "void")
_INTEGRAL = ("int", "byte", "long")
_RANGE = {"byte": (-128, 127), "int": (-(1 << 31), (1 << 31) - 1),
          "long": (V.INT64_MIN, V.INT64_MAX)}


@dataclass(frozen=True)
class HostDescriptor:
    """A host type; arrays are ``HostDescriptor("[]", elem)``."""

    name: str
    elem: HostDescriptor | None = None

    def __post_init__(self):
        if self.name not in HOST_NAMES:
            raise SignatureSyntaxError(f"unknown host type {self.name!r}")
        if (self.name == "[]") != (self.elem is not None):
            raise SignatureSyntaxError("array descriptors need an element type, e.g. int[]")
        if self.elem is not None and self.elem.name == "void":
            raise SignatureSyntaxError("void[] is not a type")

    def __str__(self):
        return f"{self.elem}[]" if self.elem is not None else self.name


def host(name: str) -> HostDescriptor:
    return parse_descriptor(name)


def parse_descriptor(text: str) -> HostDescriptor:
    s = text.strip()
    if s.endswith("[]") and len(s) > 2:
        return HostDescriptor("[]", parse_descriptor(s[:-2]))
    return HostDescriptor(s)


# ---------------------------------------------------------------------------
# the two directions

_RETURN_BY_HOST: dict[str, list[str]] = {}
for _row in RETURN_ROWS:
    for _h in _row.host:
        _RETURN_BY_HOST.setdefault(_h, []).append(_INTERNAL[_row.internal])

_PARAM_BY_TAG: dict[str, tuple[str, ...]] = {
    _INTERNAL[r.internal]: r.host for r in PARAM_ROWS
}


def host_return_to_tag(d: HostDescriptor, role: str | None = None) -> TypeTag:
    """Intensional tag a host return of type ``d`` is matched back to.

    ``role`` picks between the two readings of ``Method`` (function or
    operator) and of ``Object`` (object or embed); the first table row
    wins when it is not given.
    """
    if d.name == "[]":
        return V.array_of(host_return_to_tag(d.elem, role))
    names = _RETURN_BY_HOST[d.name]
    if len(names) > 1 and role is not None:
        for n in names:
            if _ROLE_OF.get(n) == role:
                return TypeTag(n)
    return TypeTag(names[0])


def param_tag_to_host(t: TypeTag) -> list[HostDescriptor]:
    """Host types that may receive an intensional parameter of type ``t``."""
    if t.name == V.ARRAY:
        return [HostDescriptor("[]", e) for e in param_tag_to_host(t.elem)]
    try:
        hosts = _PARAM_BY_TAG[t.name]
    except KeyError:
        raise UnmappableParameterError(
            f"{type_name(t)} cannot be passed to a host procedure",
            actual=t) from None
    return [HostDescriptor(h) for h in hosts]


def _covers(declared: HostDescriptor, offered: HostDescriptor) -> bool:
    # int, byte and long all stand for the one 64-bit intensional int
    if declared.name in _INTEGRAL:
        return offered.name in _INTEGRAL
    if declared.name == "[]":
        return offered.name == "[]" and _covers(declared.elem, offered.elem)
    return declared.name == offered.name


def tag_accepts(declared: HostDescriptor, t: TypeTag) -> bool:
    """Static half of parameter matching (no range or variant checks)."""
    try:
        offered = param_tag_to_host(t)
    except UnmappableParameterError:
        return False
    return any(_covers(declared, o) for o in offered)


def to_host(v: Value, declared: HostDescriptor):
    """Marshal an argument for a host parameter of type ``declared``.

    Raises :class:`ParameterMismatchError` naming the expected descriptor
    and the offending tag.
    """
    offered = param_tag_to_host(v.tag)
    if v.tag.name == V.DIMENSION:
        # the tag's runtime variant picks int or String
        variant = "int" if isinstance(v.payload.tag, int) else "String"
        offered = [o for o in offered if o.name == variant]
    if not any(_covers(declared, o) for o in offered):
        raise ParameterMismatchError(
            f"host parameter {declared} cannot take {type_name(v.tag)}",
            expected=declared, actual=v.tag)
    return _marshal(v, declared)


def _marshal(v: Value, declared: HostDescriptor):
    n = v.tag.name
    if n == V.DIMENSION:
        payload = v.payload.tag
        if isinstance(payload, int):
            _check_range(payload, declared, ParameterMismatchError, v.tag)
        return payload
    if n == V.INTEGER:
        _check_range(v.payload, declared, ParameterMismatchError, v.tag)
        return v.payload
    if n in (V.FLOAT, V.DOUBLE, V.BOOLEAN, V.STRING, V.CHARACTER):
        return v.payload
    if n == V.ARRAY:
        return tuple(_marshal(x, declared.elem) for x in v.payload)
    return v


def _check_range(n: int, d: HostDescriptor, exc, tag=None):
    lo, hi = _RANGE[d.name]
    if not lo <= n <= hi:
        if exc is ParameterMismatchError:
            raise exc(f"{n} does not fit host type {d}", expected=d, actual=tag)
        raise exc(f"{n} does not fit host type {d}")


def to_intensional(payload, declared: HostDescriptor, role: str | None = None) -> Value:
    """Match a host result of type ``declared`` back to a value.

    Raises :class:`ReturnContractError` when the payload does not have the
    declared shape.
    """
    d = declared.name

    def bad(what):
        return ReturnContractError(
            f"host returned {what} where {declared} was declared")

    if d == "void":
        if payload is not None:
            raise bad(type(payload).__name__)
        return V.VOID_VALUE
    if d in _INTEGRAL:
        if isinstance(payload, bool) or not isinstance(payload, int):
            raise bad(type(payload).__name__)
        _check_range(payload, declared, ReturnContractError)
        return V.integer(payload)
    if d in ("float", "double"):
        if isinstance(payload, bool) or not isinstance(payload, (int, float)):
            raise bad(type(payload).__name__)
        return V.float32(payload) if d == "float" else V.double(payload)
    if d == "boolean":
        if not isinstance(payload, bool):
            raise bad(type(payload).__name__)
        return V.boolean(payload)
    if d == "char":
        if not isinstance(payload, str) or len(payload) != 1:
            raise bad(repr(payload))
        return V.character(payload)
    if d == "String":
        if not isinstance(payload, str):
            raise bad(type(payload).__name__)
        return V.string(payload)
    if d == "[]":
        if not isinstance(payload, (list, tuple)):
            raise bad(type(payload).__name__)
        elem = host_return_to_tag(declared.elem, role)
        items = [to_intensional(x, declared.elem, role) for x in payload]
        if elem.name == V.OBJECT:
            # element objects keep their own names; the array needs one tag
            tags = {x.tag for x in items}
            elem = tags.pop() if len(tags) == 1 else elem
            if tags:
                raise bad("objects of mixed types")
        return V.construct_array(elem, items)
    want = host_return_to_tag(declared, role)
    if want.name == V.EMBED and isinstance(payload, str):
        return V.embed(payload)
    if not isinstance(payload, Value) or not is_subtype(payload.tag, want):
        raise bad(type(payload).__name__ if not isinstance(payload, Value)
                  else type_name(payload.tag))
    if want.name in (V.FUNCTION, V.OPERATOR):
        return Value(want, payload.payload)
    return payload


# ---------------------------------------------------------------------------
# signatures

@dataclass(frozen=True)
class HostSignature:
    """Declared contract of a host procedure.

    ``role`` says what the procedure itself is when referenced as a value
    (function or operator).  ``returns_as`` resolves a ``Method`` or
    ``Object`` return to one of its two intensional readings.
    """

    name: str
    params: tuple[HostDescriptor, ...]
    returns: HostDescriptor
    role: str = "function"
    returns_as: str | None = None

    def __post_init__(self):
        if self.role not in ("function", "operator"):
            raise RegistrationError(f"procedure role must be function or operator, not {self.role!r}")
        if self.returns_as not in (None, "function", "operator", "object", "embed"):
            raise RegistrationError(f"bad return reading {self.returns_as!r}")
        for p in self.params:
            if p.name == "void":
                raise SignatureSyntaxError("void is not a parameter type")

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def return_tag(self) -> TypeTag:
        return host_return_to_tag(self.returns, self.returns_as)

    def format(self) -> str:
        head = "operator " if self.role == "operator" else ""
        tail = f" as {self.returns_as}" if self.returns_as else ""
        params = ", ".join(str(p) for p in self.params)
        return f"{head}{self.name}({params}) -> {self.returns}{tail}"

    __str__ = format


_SIG = re.compile(
    r"^\s*(?:(operator|function)\s+)?([A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)?)"
    r"\s*\(([^()]*)\)\s*->\s*(\S+?)(?:\s+as\s+([a-z]+))?\s*$")


def parse_signature(line: str) -> HostSignature:
    """Parse ``name(param, ...) -> ret``, optionally prefixed with
    ``operator`` and suffixed with ``as operator|embed``."""
    m = _SIG.match(line)
    if m is None:
        raise SignatureSyntaxError(f"bad signature line {line.strip()!r}")
    role, name, params, ret, returns_as = m.groups()
    plist = tuple(parse_descriptor(p) for p in params.split(",")) if params.strip() else ()
    return HostSignature(name, plist, parse_descriptor(ret), role or "function", returns_as)


def parse_signatures(text: str) -> list[HostSignature]:
    sigs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            sigs.append(parse_signature(stripped))
        except SignatureSyntaxError as e:
            raise SignatureSyntaxError(f"line {lineno}: {e.message}", (lineno, 1)) from None
    return sigs


# ---------------------------------------------------------------------------
# registry

class ProcedureRegistry:
    """Append-only map from procedure name to (signature, callable).

    Callables receive marshalled host payloads and must be pure; purity is
    assumed, not enforced.  ``calls`` counts invocations per name.
    """

    def __init__(self, procedures: Iterable[tuple[HostSignature, Callable]] = ()):
        self._procs: dict[str, tuple[HostSignature, Callable]] = {}
        self.calls: Counter = Counter()
        for sig, fn in procedures:
            self.register(sig, fn)

    def register(self, sig: HostSignature | str, fn: Callable) -> None:
        if isinstance(sig, str):
            sig = parse_signature(sig)
        if sig.name in self._procs:
            raise RegistrationError(f"procedure {sig.name} is already registered")
        if not callable(fn):
            raise RegistrationError(f"{sig.name}: implementation is not callable")
        self._procs[sig.name] = (sig, fn)

    def __contains__(self, name):
        return name in self._procs

    def __iter__(self):
        return iter(self._procs)

    def signature(self, name: str) -> HostSignature:
        try:
            return self._procs[name][0]
        except KeyError:
            raise UnknownProcedureError(f"unknown procedure {name!r}") from None

    def value(self, name: str) -> Value:
        """The procedure as a first-class Function or Operator value."""
        sig = self.signature(name)
        handle = V.HostHandle(name, sig.arity)
        return V.operator(handle) if sig.role == "operator" else V.function(handle)

    def method_value(self, obj: Value, member: str) -> Value | None:
        key = f"{obj.tag.object_name}.{member}"
        if key not in self._procs:
            return None
        sig = self._procs[key][0]
        return V.function(V.HostHandle(key, sig.arity - 1, receiver=obj))

    def invoke(self, name: str, args: list[Value]) -> Value:
        sig, fn = self._procs.get(name, (None, None))
        if sig is None:
            raise UnknownProcedureError(f"unknown procedure {name!r}")
        if len(args) != sig.arity:
            raise ArityError(f"{name} takes {sig.arity} argument(s), got {len(args)}")
        payloads = []
        for i, (arg, d) in enumerate(zip(args, sig.params), 1):
            try:
                payloads.append(to_host(arg, d))
            except ParameterMismatchError as e:
                e.message = f"{name} argument {i}: {e.message}"
                e.args = (e.message,)
                raise
        self.calls[name] += 1
        try:
            result = fn(*payloads)
        except HoilError:
            raise
        except Exception as e:
            raise HostCallError(f"{name} raised {type(e).__name__}: {e}") from e
        try:
            return to_intensional(result, sig.returns, sig.returns_as)
        except ReturnContractError as e:
            e.message = f"{name}: {e.message}"
            e.args = (e.message,)
            raise

    def invoke_handle(self, handle: V.HostHandle, args: list[Value]) -> Value:
        if handle.receiver is not None:
            args = [handle.receiver, *args]
        return self.invoke(handle.name, args)

    def stats(self) -> dict[str, int]:
        return dict(sorted(self.calls.items()))


def register(reg: ProcedureRegistry, sig: HostSignature | str, fn: Callable) -> None:
    reg.register(sig, fn)


def invoke(reg: ProcedureRegistry, name: str, args: list[Value]) -> Value:
    return reg.invoke(name, args)


def call_back(fn: Value, host_args, params: Iterable[HostDescriptor],
              returns: HostDescriptor, apply: Callable[[Value, list[Value]], Value]):
    """Host-to-intensional call: the same table read in reverse.

    Host arguments are matched to values through the return half of the
    table; the intensional result is handed back through the parameter
    half.  ``apply`` runs ``fn`` on the converted arguments.
    """
    params = list(params)
    if len(params) != len(host_args):
        raise ArityError(f"callback takes {len(params)} argument(s), got {len(host_args)}")
    args = [to_intensional(a, d) for a, d in zip(host_args, params)]
    result = apply(fn, args)
    if returns.name == "void":
        return None
    return to_host(result, returns)


# ---------------------------------------------------------------------------
# rendering

def table_rows() -> dict:
    return {
        "returns": [
            {"host": list(r.host), "intensional": list(r.intensional), "internal": r.internal}
            for r in RETURN_ROWS],
        "parameters": [
            {"intensional": r.intensional, "host": list(r.host), "internal": r.internal}
            for r in PARAM_ROWS],
    }


def render_table() -> str:
    def block(title, header, rows):
        widths = [max(len(x) for x in col) for col in zip(header, *rows)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        out = [title, fmt.format(*header).rstrip(), "  ".join("-" * w for w in widths)]
        out += [fmt.format(*r).rstrip() for r in rows]
        return out

    up = block("host return -> intensional",
               ("host", "intensional", "internal"),
               [(", ".join(r.host), ", ".join(r.intensional), r.internal) for r in RETURN_ROWS])
    low = block("intensional parameter -> host",
                ("intensional", "host", "internal"),
                [(r.intensional, ", ".join(r.host), r.internal) for r in PARAM_ROWS])
    return "\n".join(["Lucid/Java type mapping", ""] + up + [""] + low) + "\n"
