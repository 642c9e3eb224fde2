"""Static type checking.

Literal types and operator applications over statically typed operands are
settled here; anything that depends on the evaluation context (``#d``,
parameters, object fields) is left dynamic and checked again at run time.

An expression's static type is a small set of possible tags, or ``None``
when unknown.  Conditionals produce unions; an operator applied to a union
must be valid for every member, so ``(if c then 1 else "a") + 1`` is
rejected even though one branch would work.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .. import kinds as K
from .. import values as V
from ..algebra import join_all
from ..bridge import HostSignature, tag_accepts
from ..errors import (
    ArityError, HoilError, KindError, MembershipError, OperandTypeError,
    ParameterMismatchError, UnknownDimensionError, UnknownIdentifierError,
)
from ..values import TypeTag, type_name
from . import builtins
from .syntax import (
    ArrayLit, Binary, Call, ContextLit, DimDecl, Dot, FunDecl, If, Index,
    Literal, Name, ObjectLit, Program, Query, Switch, Unary, VarDecl, Where, walk,
)

MAX_UNION = 8

ARITH = {"add", "subtract", "multiply", "divide", "mod", "pow"}
ORDER = {"gt", "lt", "ge", "le"}
LOGIC = {"and", "or", "xor", "nand", "nor"}
BITWISE = {"band", "bor", "bxor", "bnand", "bnor"}


def binary_tag(op: str, t1: TypeTag, t2: TypeTag) -> TypeTag:
    """Result tag of a binary operator; raises the error evaluation would."""
    if op in ARITH:
        return K.NUMERIC.arith_tag(op, t1, t2)
    if op in ORDER:
        return K.NUMERIC.compare_tag(op, t1, t2)
    if op in ("eq", "ne"):
        return V.T_BOOLEAN
    if op in LOGIC:
        return K.LOGIC.logic_tag(op, t1, t2)
    if op in BITWISE:
        return K.BITWISE.bitwise_tag(op, t1, t2)
    if op == "concat":
        for t in (t1, t2):
            if t.name != V.STRING:
                raise OperandTypeError(f"++ needs strings, got {type_name(t)}")
        return V.T_STRING
    raise ValueError(op)


def unary_tag(op: str, t: TypeTag) -> TypeTag:
    if op == "neg":
        return K.NUMERIC.negate_tag(t)
    if op == "not":
        return K.LOGIC.not_tag(t)
    return K.BITWISE.not_tag(t)


def describe(info) -> str:
    tag = display_tag(info)
    return "dynamic" if tag is None else type_name(tag)


def display_tag(info) -> TypeTag | None:
    """Single tag shown for a static type: the tag itself or the join of a
    union; ``None`` when dynamic or the join is the top type."""
    if info is None:
        return None
    t = join_all(info)
    return None if t.is_top else t


@dataclass
class CheckResult:
    program: Program
    errors: list[HoilError] = field(default_factory=list)
    types: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def info(self, node=None):
        return self.types.get(id(node if node is not None else self.program.root))

    def static_tag(self, node=None) -> TypeTag | None:
        return display_tag(self.info(node))

    def describe(self, node=None) -> str:
        return describe(self.info(node))


_PARAM = object()


class _Scope:
    def __init__(self, parent=None, names=None):
        self.parent = parent
        self.names = names or {}

    def lookup(self, name):
        s = self
        while s is not None:
            if name in s.names:
                return s.names[name], s
            s = s.parent
        return None, None


class Checker:
    def __init__(self, program: Program, signatures=(), extra_dims=()):
        self.program = program
        self.sigs: dict[str, HostSignature] = {}
        for sig in [*signatures, *program.signatures]:
            self.sigs[sig.name] = sig
        self.result = CheckResult(program)
        self.known_dims = set(extra_dims)
        if program.context is not None:
            self.known_dims |= program.context.dims()
        for n in walk(program.root):
            if isinstance(n, ContextLit):
                self.known_dims.update(d for d, _, _ in n.items)
            elif isinstance(n, Where):
                self.known_dims.update(n.dimensions())
        self._decl_info: dict[str, object] = {}
        self._active: set[str] = set()

    def run(self) -> CheckResult:
        self.check(self.program.root, _Scope())
        return self.result

    def error(self, e: HoilError, node):
        self.result.errors.append(e.at(node.pos))
        return None

    def check(self, node, scope):
        try:
            info = self._check(node, scope)
        except HoilError as e:
            info = self.error(e, node)
        if info is not None and len(info) > MAX_UNION:
            info = None
        self.result.types[id(node)] = info
        return info

    # -- helpers

    def _apply(self, fn, *infos):
        if any(i is None for i in infos):
            # an operand with a known type must still suit the operator
            for i in infos:
                for t in i or ():
                    fn(*([t] * len(infos)))
            return None
        return frozenset(fn(*combo) for combo in itertools.product(*infos))

    def _decl(self, decl, scope):
        if decl.uid in self._decl_info:
            return self._decl_info[decl.uid]
        if decl.uid in self._active:
            return None
        self._active.add(decl.uid)
        try:
            if isinstance(decl, VarDecl):
                info = self.check(decl.expr, scope)
            else:
                inner = _Scope(scope, {p: _PARAM for p in decl.params})
                info = self.check(decl.body, inner)
        finally:
            self._active.discard(decl.uid)
        self._decl_info[decl.uid] = info
        return info

    # -- node rules

    def _check(self, node, scope):
        if isinstance(node, Literal):
            return frozenset({node.value.tag})
        if isinstance(node, Name):
            return self._name(node, scope)
        if isinstance(node, Unary):
            info = self.check(node.operand, scope)
            return self._apply(lambda t: unary_tag(node.op, t), info)
        if isinstance(node, Binary):
            a = self.check(node.left, scope)
            b = self.check(node.right, scope)
            return self._apply(lambda x, y: binary_tag(node.op, x, y), a, b)
        if isinstance(node, Query):
            if node.dim not in self.known_dims:
                raise UnknownDimensionError(f"unknown dimension {node.dim}")
            return None
        if isinstance(node, Switch):
            self.check(node.expr, scope)
            if isinstance(node.context, ContextLit):
                self._context_items(node.context, scope)
                self.result.types[id(node.context)] = frozenset({V.T_CONTEXT})
            else:
                info = self.check(node.context, scope)
                for t in info or ():
                    if t.name != V.CONTEXT:
                        raise OperandTypeError(f"@ needs a context, got {type_name(t)}")
            return self.result.types.get(id(node.expr))
        if isinstance(node, ContextLit):
            self._context_items(node, scope)
            return frozenset({V.T_CONTEXT})
        if isinstance(node, If):
            c = self.check(node.cond, scope)
            for t in c or ():
                if t.name not in (V.BOOLEAN, V.VOID):
                    self.error(KindError(f"condition must be bool, got {type_name(t)}"), node.cond)
            a = self.check(node.then, scope)
            b = self.check(node.else_, scope)
            if a is None or b is None:
                return None
            return a | b
        if isinstance(node, Where):
            inner = _Scope(scope, node.bindings())
            info = self.check(node.body, inner)
            for d in node.decls:
                if not isinstance(d, DimDecl):
                    self._decl(d, inner)
            return info
        if isinstance(node, ArrayLit):
            infos = [self.check(x, scope) for x in node.items]
            if not infos or any(i is None or len(i) != 1 for i in infos):
                return None
            tags = {next(iter(i)) for i in infos}
            if len(tags) != 1:
                raise OperandTypeError(
                    "array elements must share one type, got "
                    + ", ".join(sorted(type_name(t) for t in tags)))
            return frozenset({V.array_of(tags.pop())})
        if isinstance(node, ObjectLit):
            for _, e in node.fields:
                self.check(e, scope)
            return frozenset({V.object_tag(node.type_name)})
        if isinstance(node, Dot):
            return self._dot(node, self.check(node.expr, scope))
        if isinstance(node, Index):
            recv = self.check(node.expr, scope)
            idx = self.check(node.index, scope)
            for t in idx or ():
                if t.name != V.INTEGER:
                    raise OperandTypeError(f"array index must be int, got {type_name(t)}")
            if recv is None:
                return None
            for t in recv:
                if t.name != V.ARRAY:
                    raise OperandTypeError(f"cannot index {type_name(t)}")
            return frozenset(t.elem for t in recv)
        if isinstance(node, Call):
            return self._call(node, scope)
        raise AssertionError(type(node).__name__)

    def _context_items(self, lit: ContextLit, scope):
        for d, e, pos in lit.items:
            info = self.check(e, scope)
            for t in info or ():
                if t.name not in (V.INTEGER, V.STRING, V.DIMENSION):
                    self.error(OperandTypeError(
                        f"tag for dimension {d} must be int or string, got {type_name(t)}"), e)

    def _name(self, node: Name, scope):
        decl, where = scope.lookup(node.name)
        if decl is _PARAM:
            return None
        if isinstance(decl, VarDecl):
            return self._decl(decl, where)
        if isinstance(decl, FunDecl):
            return frozenset({V.T_FUNCTION})
        if node.name in builtins.INTRINSICS:
            raise UnknownIdentifierError(f"{node.name} is an intrinsic and can only be called")
        sig = self.sigs.get(node.name)
        if sig is not None:
            return frozenset({V.T_OPERATOR if sig.role == "operator" else V.T_FUNCTION})
        raise UnknownIdentifierError(f"unknown identifier {node.name}")

    def _dot(self, node: Dot, info):
        if info is None:
            return None
        out = set()
        for t in info:
            if t.name == V.DIMENSION:
                if node.member == "name":
                    out.add(V.T_STRING)
                elif node.member != "tag":
                    raise MembershipError(f"dimension has no member {node.member!r}")
                else:
                    return None
            elif t.name in (V.OBJECT, V.CONTEXT):
                return None
            else:
                raise KindError(f"'.' needs an object, context or dimension, got {type_name(t)}")
        return frozenset(out)

    def _call(self, node: Call, scope):
        args = [self.check(a, scope) for a in node.args]
        callee = node.callee
        if isinstance(callee, Name):
            decl, where = scope.lookup(callee.name)
            if isinstance(decl, FunDecl):
                self.result.types[id(callee)] = frozenset({V.T_FUNCTION})
                if len(args) != len(decl.params):
                    raise ArityError(
                        f"{decl.name} takes {len(decl.params)} argument(s), got {len(args)}")
                return self._decl(decl, where)
            if decl is None and callee.name in builtins.INTRINSICS:
                return self._intrinsic(node, callee.name, args)
            if decl is None and callee.name in self.sigs:
                return self._host_call(node, self.sigs[callee.name], args)
        info = self.check(callee, scope)
        for t in info or ():
            if t.name not in (V.FUNCTION, V.OPERATOR):
                raise KindError(f"{type_name(t)} is not callable")
        return None

    def _intrinsic(self, node, name, args):
        spec = builtins.INTRINSICS[name]
        builtins.check_arity(name, spec, len(args))
        for i, (info, a) in enumerate(zip(args, node.args)):
            for t in info or ():
                try:
                    builtins.check_arg(name, spec, i, t)
                except HoilError as e:
                    self.error(e, a)
        return frozenset({spec.result})

    def _host_call(self, node, sig: HostSignature, args):
        if len(args) != sig.arity:
            raise ArityError(f"{sig.name} takes {sig.arity} argument(s), got {len(args)}")
        for i, (info, d, a) in enumerate(zip(args, sig.params, node.args), 1):
            for t in info or ():
                if not tag_accepts(d, t):
                    self.error(ParameterMismatchError(
                        f"{sig.name} argument {i}: host parameter {d} cannot take {type_name(t)}",
                        expected=d, actual=t), a)
        return frozenset({sig.return_tag})


def check(program: Program, signatures=(), extra_dims=()) -> CheckResult:
    """Statically check ``program``; host signatures come from the program
    header plus ``signatures`` (e.g. a registry's)."""
    return Checker(program, signatures, extra_dims).run()
