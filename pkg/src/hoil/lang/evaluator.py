"""Demand-driven evaluation with a value warehouse.

Identifiers are evaluated only when demanded and always relative to the
current context.  A variable's value at a context is stored in the
warehouse under ``(program, binding, frame, context)``; the frame part
distinguishes the bodies of different function calls, so a binding local
to ``f(x)`` is cached separately for each argument tuple.
"""

from __future__ import annotations

import itertools
import sys
import threading
from typing import NamedTuple

from .. import kinds as K
from .. import values as V
from ..bridge import ProcedureRegistry
from ..context import EMPTY, Context, Dimension, ctx_override
from ..errors import (
    ArityError, CycleError, HoilError, KindError, OperandTypeError,
    UnboundDimensionError, UnknownIdentifierError, UnknownProcedureError,
)
from ..values import Value, type_name
from . import builtins
from .checker import ARITH, BITWISE, LOGIC, ORDER
from .syntax import (
    ArrayLit, Binary, Call, ContextLit, Dot, FunDecl, If, Index, Literal, Name,
    ObjectLit, Program, Query, Switch, Unary, VarDecl, Where,
)

_MISSING = object()

# Evaluation recurses once per nested node, so runs happen on a worker
# thread whose stack is big enough for RECURSION_LIMIT Python frames.
RECURSION_LIMIT = 20000
STACK_BYTES = 512 * 1024 * 1024
_limit_lock = threading.Lock()
_active_runs = [0, 0]  # count, recursion limit to restore


def _deep(thunk):
    box = {}

    def work():
        try:
            box["value"] = thunk()
        except RecursionError:
            box["error"] = CycleError("evaluation nested too deeply")
        except BaseException as e:  # re-raised on the calling thread
            box["error"] = e

    with _limit_lock:
        if _active_runs[0] == 0:
            _active_runs[1] = sys.getrecursionlimit()
            sys.setrecursionlimit(max(_active_runs[1], RECURSION_LIMIT))
        _active_runs[0] += 1
        old_stack = threading.stack_size(STACK_BYTES)
        try:
            t = threading.Thread(target=work, name="hoil-eval")
            t.start()
        finally:
            threading.stack_size(old_stack)
    try:
        t.join()
    finally:
        with _limit_lock:
            _active_runs[0] -= 1
            if _active_runs[0] == 0:
                sys.setrecursionlimit(_active_runs[1])
    if "error" in box:
        raise box["error"]
    return box["value"]


class WarehouseStats(NamedTuple):
    hits: int
    misses: int
    entries: int


class Warehouse:
    """Thread-safe memo of computed values.

    ``store`` is insert-if-absent: when two evaluations race on one key the
    first value wins, which is harmless because both computed the same value.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}
        self.hits = 0
        self.misses = 0

    def lookup(self, key):
        with self._lock:
            v = self._data.get(key, _MISSING)
            if v is _MISSING:
                self.misses += 1
            else:
                self.hits += 1
            return v

    def store(self, key, value: Value) -> Value:
        with self._lock:
            return self._data.setdefault(key, value)

    def __len__(self):
        return len(self._data)

    def stats(self) -> WarehouseStats:
        with self._lock:
            return WarehouseStats(self.hits, self.misses, len(self._data))


def warehouse_stats(w: Warehouse) -> WarehouseStats:
    return w.stats()


_program_ids = itertools.count(1)


def _program_token(program: Program) -> int:
    tok = getattr(program, "_token", None)
    if tok is None:
        tok = program._token = next(_program_ids)
    return tok


class Frame:
    __slots__ = ("parent", "names", "dims", "key")

    def __init__(self, parent=None, names=None, dims=None, key=()):
        self.parent = parent
        self.names = names or {}
        self.dims = dims or {}
        self.key = key

    def find(self, name):
        f = self
        while f is not None:
            if name in f.names:
                return f.names[name], f
            f = f.parent
        return None, None

    def dim_decl(self, name):
        f = self
        while f is not None:
            if name in f.dims:
                return f.dims[name]
            f = f.parent
        return None


class Evaluator:
    def __init__(self, program: Program, registry: ProcedureRegistry | None = None,
                 warehouse: Warehouse | None = None):
        self.program = program
        self.registry = registry if registry is not None else ProcedureRegistry()
        self.warehouse = warehouse
        self.token = _program_token(program)
        self.sig_names = {s.name for s in program.signatures}
        self._active: set = set()

    def run(self, context: Context | None = None) -> Value:
        if context is None:
            context = self.program.context or EMPTY
        return _deep(lambda: self.eval(self.program.root, Frame(), context))

    def eval(self, node, frame: Frame, ctx: Context) -> Value:
        try:
            return _DISPATCH[type(node)](self, node, frame, ctx)
        except HoilError as e:
            raise e.at(node.pos)

    # -- node rules

    def _literal(self, node, frame, ctx):
        return node.value

    def _name(self, node, frame, ctx):
        entry, where = frame.find(node.name)
        if isinstance(entry, Value):
            return entry
        if isinstance(entry, VarDecl):
            return self._variable(entry, where, ctx)
        if isinstance(entry, FunDecl):
            return V.function(V.Closure(entry.name, entry.params, entry.body,
                                        (entry, where), where.key))
        if node.name in builtins.INTRINSICS:
            raise UnknownIdentifierError(f"{node.name} is an intrinsic and can only be called")
        if node.name in self.registry:
            return self.registry.value(node.name)
        return self._unresolved(node.name)

    def _unresolved(self, name):
        if name in self.sig_names:
            raise UnknownProcedureError(f"no host implementation for {name}")
        raise UnknownIdentifierError(f"unknown identifier {name}")

    def _variable(self, decl: VarDecl, where: Frame, ctx: Context) -> Value:
        key = (self.token, decl.uid, where.key, ctx)
        w = self.warehouse
        if w is not None:
            v = w.lookup(key)
            if v is not _MISSING:
                return v
        if key in self._active:
            raise CycleError(f"{decl.name} depends on itself at context {ctx.format()}")
        self._active.add(key)
        try:
            v = self.eval(decl.expr, where, ctx)
        finally:
            self._active.discard(key)
        return w.store(key, v) if w is not None else v

    def _unary(self, node, frame, ctx):
        a = self.eval(node.operand, frame, ctx)
        if node.op == "neg":
            return K.NUMERIC.negate(a)
        if node.op == "not":
            return K.LOGIC.logic_not(a)
        return K.BITWISE.bitwise_not(a)

    def _binary(self, node, frame, ctx):
        a = self.eval(node.left, frame, ctx)
        b = self.eval(node.right, frame, ctx)
        op = node.op
        if op in ARITH:
            return K.NUMERIC.arith(op, a, b)
        if op in ORDER:
            return K.NUMERIC.compare(op, a, b)
        if op in LOGIC:
            return K.LOGIC.logic(op, a, b)
        if op in BITWISE:
            return K.BITWISE.bitwise(op, a, b)
        if op == "concat":
            return V.string_concat(a, b)
        if K.has_kind(a.tag, K.Kind.NUMERIC) and K.has_kind(b.tag, K.Kind.NUMERIC):
            eq = K.NUMERIC.compare("eq", a, b)
        else:
            eq = V.equals(a, b)
        return eq if op == "eq" else V.boolean(not eq.payload)

    def _query(self, node, frame, ctx):
        tag = ctx.get(node.dim)
        if tag is None:
            raise UnboundDimensionError(
                f"dimension {node.dim} is not bound in context {ctx.format()}")
        return V.tag_to_value(tag)

    def _switch(self, node, frame, ctx):
        if isinstance(node.context, ContextLit):
            sw = self._context_lit(node.context, frame, ctx).payload
        else:
            c = self.eval(node.context, frame, ctx)
            if c.tag.name != V.CONTEXT:
                raise OperandTypeError(f"@ needs a context, got {type_name(c.tag)}").at(
                    node.context.pos)
            sw = c.payload
        for d, tag in sw:
            decl = frame.dim_decl(d)
            if decl is not None and decl.tag_set is not None:
                Dimension(d, decl.tag_set).check(tag)
        return self.eval(node.expr, frame, ctx_override(ctx, sw))

    def _context_lit(self, node, frame, ctx):
        pairs = []
        for d, e, pos in node.items:
            v = self.eval(e, frame, ctx)
            if v.tag.name in (V.INTEGER, V.STRING):
                pairs.append((d, v.payload))
            elif v.tag.name == V.DIMENSION:
                pairs.append((d, v.payload.tag))
            else:
                raise OperandTypeError(
                    f"tag for dimension {d} must be int or string, got {type_name(v.tag)}", e.pos)
        try:
            return V.context_value(Context(pairs))
        except HoilError as e:
            raise e.at(node.pos)

    def _if(self, node, frame, ctx):
        try:
            c = V.truth(self.eval(node.cond, frame, ctx))
        except KindError as e:
            raise e.at(node.cond.pos)
        return self.eval(node.then if c else node.else_, frame, ctx)

    def _where(self, node, frame, ctx):
        inner = Frame(frame, node.bindings(), node.dimensions(), frame.key)
        return self.eval(node.body, inner, ctx)

    def _array(self, node, frame, ctx):
        items = [self.eval(x, frame, ctx) for x in node.items]
        tags = {v.tag for v in items}
        if len(tags) != 1:
            raise OperandTypeError(
                "array elements must share one type, got "
                + ", ".join(sorted(type_name(t) for t in tags)))
        return V.construct_array(items[0].tag, items)

    def _object(self, node, frame, ctx):
        fields = [(k, self.eval(e, frame, ctx)) for k, e in node.fields]
        return V.construct_object(node.type_name, fields)

    def _dot(self, node, frame, ctx):
        return V.dot(self.eval(node.expr, frame, ctx), node.member, self.registry)

    def _index(self, node, frame, ctx):
        a = self.eval(node.expr, frame, ctx)
        i = self.eval(node.index, frame, ctx)
        return V.array_index(a, i)

    def _call(self, node, frame, ctx):
        callee = node.callee
        if isinstance(callee, Name):
            entry, where = frame.find(callee.name)
            if entry is None:
                args = [self.eval(a, frame, ctx) for a in node.args]
                if callee.name in builtins.INTRINSICS:
                    return builtins.call(callee.name, args)
                if callee.name in self.registry:
                    return self.registry.invoke(callee.name, args)
                return self._unresolved(callee.name)
            if isinstance(entry, FunDecl):
                args = [self.eval(a, frame, ctx) for a in node.args]
                return self._call_closure(entry, where, args, ctx)
        fn = self.eval(callee, frame, ctx)
        args = [self.eval(a, frame, ctx) for a in node.args]
        return self.apply(fn, args, ctx)

    def apply(self, fn: Value, args: list[Value], ctx: Context) -> Value:
        if fn.tag.name not in (V.FUNCTION, V.OPERATOR):
            raise KindError(f"{type_name(fn.tag)} is not callable")
        p = fn.payload
        if isinstance(p, V.Closure):
            decl, where = p.scope
            return self._call_closure(decl, where, args, ctx)
        return self.registry.invoke_handle(p, args)

    def _call_closure(self, decl: FunDecl, where: Frame, args, ctx):
        if len(args) != len(decl.params):
            raise ArityError(f"{decl.name} takes {len(decl.params)} argument(s), got {len(args)}")
        frame = Frame(where, dict(zip(decl.params, args)), None,
                      where.key + ((decl.uid, tuple(args)),))
        return self.eval(decl.body, frame, ctx)


_DISPATCH = {
    Literal: Evaluator._literal,
    Name: Evaluator._name,
    Unary: Evaluator._unary,
    Binary: Evaluator._binary,
    Query: Evaluator._query,
    Switch: Evaluator._switch,
    ContextLit: Evaluator._context_lit,
    If: Evaluator._if,
    Where: Evaluator._where,
    ArrayLit: Evaluator._array,
    ObjectLit: Evaluator._object,
    Dot: Evaluator._dot,
    Index: Evaluator._index,
    Call: Evaluator._call,
}


def evaluate(program: Program, context: Context | None = None,
             registry: ProcedureRegistry | None = None,
             warehouse: Warehouse | None = None) -> Value:
    """Evaluate ``program`` at ``context`` (default: its ``%context``).

    Pass ``warehouse=None`` to recompute every demand.
    """
    return Evaluator(program, registry, warehouse).run(context)
