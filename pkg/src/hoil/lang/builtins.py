"""Intrinsic functions: the context calculus and ``length``.

Each intrinsic has a typing rule over tags (used by the checker) and an
implementation over values (used by the evaluator).
"""

from __future__ import annotations

from typing import Callable, NamedTuple

from .. import context as C
from .. import values as V
from ..errors import ArityError, OperandTypeError
from ..values import TypeTag, Value, type_name


class Intrinsic(NamedTuple):
    min_args: int
    max_args: int | None
    param: Callable[[int], tuple[str, ...]]   # accepted tag names per position
    result: TypeTag
    impl: Callable[[list[Value]], Value]


def _ctx(v: Value) -> C.Context:
    return v.payload


def _names(vals) -> list[str]:
    return [v.payload for v in vals]


def _binary_ctx(fn):
    return Intrinsic(2, 2, lambda i: (V.CONTEXT,), V.T_CONTEXT,
                     lambda a: V.context_value(fn(_ctx(a[0]), _ctx(a[1]))))


def _filter_ctx(fn):
    return Intrinsic(1, None, lambda i: (V.CONTEXT,) if i == 0 else (V.STRING,),
                     V.T_CONTEXT,
                     lambda a: V.context_value(fn(_ctx(a[0]), _names(a[1:]))))


INTRINSICS: dict[str, Intrinsic] = {
    "union": _binary_ctx(C.ctx_union),
    "difference": _binary_ctx(C.ctx_difference),
    "intersection": _binary_ctx(C.ctx_intersection),
    "override": _binary_ctx(C.ctx_override),
    "isSubContext": Intrinsic(2, 2, lambda i: (V.CONTEXT,), V.T_BOOLEAN,
                              lambda a: C.is_sub_context(_ctx(a[0]), _ctx(a[1]))),
    "projection": _filter_ctx(C.ctx_projection),
    "hiding": _filter_ctx(C.ctx_hiding),
    "length": Intrinsic(1, 1, lambda i: (V.ARRAY, V.STRING), V.T_INTEGER,
                        lambda a: V.array_length(a[0])),
}


def check_arity(name: str, spec: Intrinsic, n: int):
    if n < spec.min_args or (spec.max_args is not None and n > spec.max_args):
        want = (str(spec.min_args) if spec.max_args == spec.min_args
                else f"at least {spec.min_args}")
        raise ArityError(f"{name} takes {want} argument(s), got {n}")


def check_arg(name: str, spec: Intrinsic, i: int, tag: TypeTag):
    allowed = spec.param(i)
    if tag.name not in allowed:
        want = " or ".join(type_name(TypeTag(a)) if a != V.ARRAY else "array" for a in allowed)
        raise OperandTypeError(f"{name} argument {i + 1} must be {want}, got {type_name(tag)}")


def call(name: str, args: list[Value]) -> Value:
    spec = INTRINSICS[name]
    check_arity(name, spec, len(args))
    for i, a in enumerate(args):
        check_arg(name, spec, i, a.tag)
    return spec.impl(args)
