"""Lexer and recursive-descent parser.

Grammar, loosest binding first::

    expr      := cond ('where' decl* 'end')*
    cond      := 'if' expr 'then' expr 'else' cond | logic_or
    logic_or  := logic_and (('or' | 'xor' | 'nor') logic_and)*
    logic_and := logic_not (('and' | 'nand') logic_not)*
    logic_not := 'not' logic_not | compare
    compare   := bit_or (('==' | '!=' | '<' | '>' | '<=' | '>=') bit_or)?
    bit_or    := bit_and (('|' | 'bor' | 'bxor' | 'bnor') bit_and)*
    bit_and   := concat (('&' | 'band' | 'bnand') concat)*
    concat    := sum ('++' sum)*
    sum       := term (('+' | '-') term)*
    term      := unary (('*' | '/' | '%') unary)*
    unary     := ('-' | '!' | 'bnot') unary | power
    power     := postfix ('^' unary)?
    postfix   := primary ('@' ctx | '.' IDENT | '[' expr ']' | '(' args ')')*
    decl      := 'dimension' IDENT ('in' '{' tag, ... '}')? ';'?
               | IDENT '=' expr ';'?
               | IDENT '(' IDENT, ... ')' '=' expr ';'?

A source file may start with ``%`` header lines: ``%context [d:1]`` and a
``%signatures`` ... ``%end`` block of host signature declarations.
"""

from __future__ import annotations

import itertools
import json
import re
from typing import NamedTuple

from .. import values as V
from ..bridge import parse_signature
from ..context import TagSet, parse_context
from ..errors import HoilError, ParseError
from .syntax import (
    ArrayLit, Binary, Call, ContextLit, DimDecl, Dot, FunDecl, If, Index,
    Literal, Name, ObjectLit, Program, Query, Switch, Unary, VarDecl, Where,
)

KEYWORDS = {
    "where", "end", "dimension", "in", "if", "then", "else", "true", "false",
    "void", "and", "or", "not", "xor", "nand", "nor",
    "band", "bor", "bxor", "bnand", "bnor", "bnot",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+\.\d+(?:[eE][+-]?\d+)?f?|\d+[eE][+-]?\d+f?|\d+f?)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<chr>'(?:[^'\\\n]|\\.)+')
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\+\+|==|!=|<=|>=|[-+*/%^<>&|!@\#.,:;()\[\]{}=])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str       # num | str | chr | id | kw | op | eof
    text: str
    pos: tuple


def tokenize(text: str, line: int = 1) -> list[Token]:
    tokens = []
    i, col = 0, 1
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", (line, col))
        kind, s = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind == "id" and s in KEYWORDS:
                kind = "kw"
            if kind != "ws":
                tokens.append(Token(kind, s, (line, col)))
            col += len(s)
        i = m.end()
    tokens.append(Token("eof", "", (line, col)))
    return tokens


_LOGIC_OR = {"or": "or", "xor": "xor", "nor": "nor"}
_LOGIC_AND = {"and": "and", "nand": "nand"}
_COMPARE = {"==": "eq", "!=": "ne", "<": "lt", ">": "gt", "<=": "le", ">=": "ge"}
_BIT_OR = {"|": "bor", "bor": "bor", "bxor": "bxor", "bnor": "bnor"}
_BIT_AND = {"&": "band", "band": "band", "bnand": "bnand"}
_SUM = {"+": "add", "-": "subtract"}
_TERM = {"*": "multiply", "/": "divide", "%": "mod"}


class Parser:
    _uids = itertools.count()

    def __init__(self, text: str, line: int = 1):
        self.tokens = tokenize(text, line)
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "id":
            self.fail("expected an identifier")
        return self.advance()

    def fail(self, what: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{what}, found {found}", t.pos)

    # -- entry points

    def parse_program(self):
        e = self.expr()
        if self.tok.kind != "eof":
            self.fail("expected end of input")
        return e

    def expr(self):
        e = self.cond()
        while self.at("where"):
            pos = self.advance().pos
            decls = []
            seen = set()
            while not self.at("end"):
                if self.tok.kind == "eof":
                    self.fail("expected 'end'")
                d = self.decl()
                if d.name in seen:
                    raise ParseError(f"{d.name} declared twice in one where clause", d.pos)
                seen.add(d.name)
                decls.append(d)
                if self.at(";"):
                    self.advance()
            self.advance()
            e = Where(e, tuple(decls), pos=pos)
        return e

    def decl(self):
        if self.at("dimension"):
            self.advance()
            name = self.ident()
            tags = None
            if self.at("in"):
                self.advance()
                tags = self.tag_set()
            return DimDecl(name.text, tags, name.pos)
        name = self.ident()
        uid = f"{name.text}#{next(self._uids)}"
        if self.at("("):
            self.advance()
            params = []
            if not self.at(")"):
                params.append(self.ident().text)
                while self.at(","):
                    self.advance()
                    params.append(self.ident().text)
            self.expect(")")
            if len(set(params)) != len(params):
                raise ParseError(f"repeated parameter in {name.text}", name.pos)
            self.expect("=")
            return FunDecl(name.text, tuple(params), self.expr(), name.pos, uid)
        self.expect("=")
        return VarDecl(name.text, self.expr(), name.pos, uid)

    def tag_set(self) -> TagSet:
        start = self.expect("{")
        tags = [self.tag_literal()]
        while self.at(","):
            self.advance()
            tags.append(self.tag_literal())
        self.expect("}")
        try:
            return TagSet.of(tags)
        except TypeError:
            raise ParseError("tag set mixes integer and string tags", start.pos) from None
        except HoilError as e:
            raise ParseError(e.message, start.pos) from None

    def tag_literal(self):
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        t = self.tok
        if t.kind == "num" and t.text.isdigit():
            self.advance()
            return -int(t.text) if neg else int(t.text)
        if t.kind == "str" and not neg:
            self.advance()
            return json.loads(t.text)
        self.fail("expected an integer or string tag")

    def cond(self):
        if self.at("if"):
            pos = self.advance().pos
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.cond()
            return If(c, a, b, pos=pos)
        return self.logic_or()

    def _left(self, sub, table):
        e = sub()
        while self.tok.kind in ("op", "kw") and self.tok.text in table:
            t = self.advance()
            e = Binary(table[t.text], e, sub(), pos=t.pos)
        return e

    def logic_or(self):
        return self._left(self.logic_and, _LOGIC_OR)

    def logic_and(self):
        return self._left(self.logic_not, _LOGIC_AND)

    def logic_not(self):
        if self.at("not"):
            t = self.advance()
            return Unary("not", self.logic_not(), pos=t.pos)
        return self.compare()

    def compare(self):
        e = self.bit_or()
        if self.tok.kind == "op" and self.tok.text in _COMPARE:
            t = self.advance()
            e = Binary(_COMPARE[t.text], e, self.bit_or(), pos=t.pos)
            if self.tok.kind == "op" and self.tok.text in _COMPARE:
                self.fail("comparisons do not chain")
        return e

    def bit_or(self):
        return self._left(self.bit_and, _BIT_OR)

    def bit_and(self):
        return self._left(self.concat, _BIT_AND)

    def concat(self):
        return self._left(self.sum, {"++": "concat"})

    def sum(self):
        return self._left(self.term, _SUM)

    def term(self):
        return self._left(self.unary, _TERM)

    def unary(self):
        if self.at("-", "!", "bnot"):
            t = self.advance()
            op = "neg" if t.text == "-" else "bnot"
            return Unary(op, self.unary(), pos=t.pos)
        return self.power()

    def power(self):
        e = self.postfix()
        if self.at("^"):
            t = self.advance()
            e = Binary("pow", e, self.unary(), pos=t.pos)
        return e

    def postfix(self, allow_switch=True):
        e = self.primary()
        while True:
            if self.at("@") and allow_switch:
                t = self.advance()
                ctx = self.bracket() if self.at("[") else self.postfix(allow_switch=False)
                e = Switch(e, ctx, pos=t.pos)
            elif self.at("."):
                self.advance()
                m = self.ident()
                e = Dot(e, m.text, pos=m.pos)
            elif self.at("["):
                t = self.advance()
                idx = self.expr()
                self.expect("]")
                e = Index(e, idx, pos=t.pos)
            elif self.at("("):
                self.advance()
                args = self.arguments(")")
                e = Call(e, args, pos=e.pos)
            else:
                return e

    def arguments(self, close):
        args = []
        if not self.at(close):
            args.append(self.expr())
            while self.at(","):
                self.advance()
                args.append(self.expr())
        self.expect(close)
        return tuple(args)

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Literal(_number(t), pos=t.pos)
        if t.kind == "str":
            self.advance()
            return Literal(V.string(json.loads(t.text)), pos=t.pos)
        if t.kind == "chr":
            self.advance()
            return Literal(_char(t), pos=t.pos)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.advance()
            return Literal(V.boolean(t.text == "true"), pos=t.pos)
        if t.kind == "kw" and t.text == "void":
            self.advance()
            return Literal(V.VOID_VALUE, pos=t.pos)
        if self.at("#"):
            self.advance()
            d = self.ident()
            return Query(d.text, pos=t.pos)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("["):
            return self.bracket()
        if self.at("if"):
            return self.cond()
        if t.kind == "id":
            self.advance()
            if self.at("{"):
                self.advance()
                fields = []
                if not self.at("}"):
                    fields.append(self.field())
                    while self.at(","):
                        self.advance()
                        fields.append(self.field())
                self.expect("}")
                names = [f for f, _ in fields]
                if len(set(names)) != len(names):
                    raise ParseError(f"duplicate field in {t.text} literal", t.pos)
                return ObjectLit(t.text, tuple(fields), pos=t.pos)
            return Name(t.text, pos=t.pos)
        self.fail("expected an expression")

    def field(self):
        name = self.ident().text
        self.expect(":")
        return name, self.expr()

    def bracket(self):
        """``[d: e, ...]`` context literal, ``[]`` empty context, or array."""
        start = self.expect("[")
        if self.at("]"):
            self.advance()
            return ContextLit((), pos=start.pos)
        if self.tok.kind == "id" and self.peek().kind == "op" and self.peek().text == ":":
            items, seen = [], set()
            while True:
                d = self.ident()
                if d.text in seen:
                    raise ParseError(f"dimension {d.text} appears twice in a context literal", d.pos)
                seen.add(d.text)
                self.expect(":")
                items.append((d.text, self.expr(), d.pos))
                if not self.at(","):
                    break
                self.advance()
            self.expect("]")
            return ContextLit(tuple(items), pos=start.pos)
        return ArrayLit(self.arguments("]"), pos=start.pos)


def _number(t: Token) -> V.Value:
    s = t.text
    if s.endswith("f"):
        return V.float32(float(s[:-1]))
    if "." in s or "e" in s or "E" in s:
        return V.double(float(s))
    n = int(s)
    if n > V.INT64_MAX:
        raise ParseError(f"integer literal {s} does not fit in 64 bits", t.pos)
    return V.integer(n)


def _char(t: Token) -> V.Value:
    body = t.text[1:-1]
    try:
        s = json.loads('"' + body.replace("\\'", "'").replace('"', '\\"') + '"')
    except json.JSONDecodeError:
        raise ParseError(f"bad character literal {t.text}", t.pos) from None
    if len(s) != 1:
        raise ParseError(f"character literal {t.text} must hold one character", t.pos)
    return V.character(s)


def parse_expr(text: str) -> object:
    return Parser(text).parse_program()


def parse(text: str, filename: str = "<expr>") -> Program:
    """Parse a program, including its optional ``%`` header."""
    lines = text.split("\n")
    signatures, context = [], None
    in_sigs = False
    for n, line in enumerate(lines, 1):
        s = line.strip()
        if in_sigs:
            if s == "%end":
                in_sigs = False
            elif s and not s.startswith("#"):
                try:
                    signatures.append(parse_signature(s))
                except HoilError as e:
                    raise ParseError(e.message, (n, 1)) from None
            lines[n - 1] = ""
            continue
        if s.startswith("%signatures"):
            in_sigs = True
        elif s.startswith("%context"):
            try:
                context = parse_context(s[len("%context"):])
            except (ValueError, HoilError) as e:
                raise ParseError(f"bad %context: {e}", (n, 1)) from None
        elif s.startswith("%"):
            raise ParseError(f"unknown directive {s.split()[0]}", (n, 1))
        elif s == "" or s.startswith("//"):
            pass
        else:
            break
        lines[n - 1] = ""
    else:
        if in_sigs:
            raise ParseError("%signatures block is missing %end", (len(lines), 1))
    root = Parser("\n".join(lines)).parse_program()
    return Program(root, signatures, context, filename)


__all__ = ["parse", "parse_expr", "tokenize", "Parser"]
