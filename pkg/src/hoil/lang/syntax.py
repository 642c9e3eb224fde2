"""Abstract syntax of the expression language."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..bridge import HostSignature
from ..context import Context, TagSet
from ..values import Value

Pos = tuple  # (line, col), both 1-based


@dataclass(eq=False)
class Expr:
    pos: Pos = field(default=(1, 1), kw_only=True)


@dataclass(eq=False)
class Literal(Expr):
    value: Value


@dataclass(eq=False)
class Name(Expr):
    name: str


@dataclass(eq=False)
class Unary(Expr):
    op: str          # neg | not | bnot
    operand: Expr


@dataclass(eq=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(eq=False)
class Query(Expr):
    """``#d``: the current tag of dimension ``d``."""
    dim: str


@dataclass(eq=False)
class ContextLit(Expr):
    items: tuple      # ((dim, Expr, pos), ...)


@dataclass(eq=False)
class Switch(Expr):
    """``e @ c``: evaluate ``e`` with ``c`` overriding the current context."""
    expr: Expr
    context: Expr     # usually a ContextLit


@dataclass(eq=False)
class ArrayLit(Expr):
    items: tuple


@dataclass(eq=False)
class ObjectLit(Expr):
    type_name: str
    fields: tuple     # ((name, Expr), ...)


@dataclass(eq=False)
class Call(Expr):
    callee: Expr
    args: tuple


@dataclass(eq=False)
class Dot(Expr):
    expr: Expr
    member: str


@dataclass(eq=False)
class Index(Expr):
    expr: Expr
    index: Expr


@dataclass(eq=False)
class If(Expr):
    cond: Expr
    then: Expr
    else_: Expr


@dataclass(eq=False)
class DimDecl:
    name: str
    tag_set: TagSet | None
    pos: Pos


@dataclass(eq=False)
class VarDecl:
    name: str
    expr: Expr
    pos: Pos
    uid: str


@dataclass(eq=False)
class FunDecl:
    name: str
    params: tuple
    body: Expr
    pos: Pos
    uid: str


@dataclass(eq=False)
class Where(Expr):
    body: Expr
    decls: tuple

    def bindings(self) -> dict[str, Any]:
        return {d.name: d for d in self.decls if not isinstance(d, DimDecl)}

    def dimensions(self) -> dict[str, DimDecl]:
        return {d.name: d for d in self.decls if isinstance(d, DimDecl)}


@dataclass(eq=False)
class Program:
    root: Expr
    signatures: list[HostSignature] = field(default_factory=list)
    context: Context | None = None
    filename: str = "<expr>"


def walk(node):
    """Yield every expression node below and including ``node``."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Unary):
            stack.append(n.operand)
        elif isinstance(n, Binary):
            stack += [n.left, n.right]
        elif isinstance(n, Switch):
            stack += [n.expr, n.context]
        elif isinstance(n, ContextLit):
            stack += [e for _, e, _ in n.items]
        elif isinstance(n, ArrayLit):
            stack += list(n.items)
        elif isinstance(n, ObjectLit):
            stack += [e for _, e in n.fields]
        elif isinstance(n, Call):
            stack += [n.callee, *n.args]
        elif isinstance(n, (Dot,)):
            stack.append(n.expr)
        elif isinstance(n, Index):
            stack += [n.expr, n.index]
        elif isinstance(n, If):
            stack += [n.cond, n.then, n.else_]
        elif isinstance(n, Where):
            stack.append(n.body)
            for d in n.decls:
                if isinstance(d, VarDecl):
                    stack.append(d.expr)
                elif isinstance(d, FunDecl):
                    stack.append(d.body)
