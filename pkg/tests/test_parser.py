import pytest

from hoil import values as V
from hoil.context import Context, TagSet
from hoil.errors import ParseError
from hoil.lang import parse, parse_expr
from hoil.lang.syntax import (
    ArrayLit, Binary, Call, ContextLit, DimDecl, Dot, FunDecl, If, Index, Literal, Name,
    ObjectLit, Query, Switch, Unary, VarDecl, Where,
)


def test_binary_literal():
    e = parse_expr("1 + 2.5")
    assert isinstance(e, Binary) and e.op == "add"
    assert e.left.value == V.integer(1) and e.right.value == V.double(2.5)


def test_switch_under_where():
    e = parse_expr("#d @ [d:5] where dimension d end")
    assert isinstance(e, Where)
    assert isinstance(e.decls[0], DimDecl) and e.decls[0].name == "d"
    sw = e.body
    assert isinstance(sw, Switch) and isinstance(sw.expr, Query)
    assert isinstance(sw.context, ContextLit)
    d, tag, _ = sw.context.items[0]
    assert d == "d" and tag.value == V.integer(5)


def test_error_position_at_end():
    with pytest.raises(ParseError) as e:
        parse_expr("1 +")
    assert e.value.pos == (1, 4)


def test_error_position_multiline():
    with pytest.raises(ParseError) as e:
        parse_expr("1 +\n  * 2")
    assert e.value.pos == (2, 3)


def test_precedence():
    e = parse_expr("1 + 2 * 3 ^ 2")
    assert e.op == "add" and e.right.op == "multiply" and e.right.right.op == "pow"
    e = parse_expr("a < b and not c or d")
    assert e.op == "or" and e.left.op == "and" and isinstance(e.left.right, Unary)
    e = parse_expr("x @ [d:1] + x @ [d:1]")
    assert e.op == "add" and isinstance(e.left, Switch) and isinstance(e.right, Switch)
    e = parse_expr("-2 ^ 2")
    assert isinstance(e, Unary) and e.operand.op == "pow"
    with pytest.raises(ParseError):
        parse_expr("1 < 2 < 3")


def test_literals():
    assert parse_expr("1.5f").value == V.float32(1.5)
    assert parse_expr("1e3").value == V.double(1000.0)
    assert parse_expr('"a\\"b"').value == V.string('a"b')
    assert parse_expr("'x'").value == V.character("x")
    assert parse_expr("'\\n'").value == V.character("\n")
    assert parse_expr("void").value == V.VOID_VALUE
    with pytest.raises(ParseError):
        parse_expr("99999999999999999999")
    with pytest.raises(ParseError):
        parse_expr("'ab'")


def test_brackets():
    assert parse_expr("[]").items == ()
    assert isinstance(parse_expr("[1, 2]"), ArrayLit)
    c = parse_expr('[d: 1, e: "x"]')
    assert isinstance(c, ContextLit) and [d for d, _, _ in c.items] == ["d", "e"]
    with pytest.raises(ParseError):
        parse_expr("[d:1, d:2]")


def test_postfix_chain():
    e = parse_expr("P{x: [1,2]}.x[0]")
    assert isinstance(e, Index) and isinstance(e.expr, Dot)
    assert isinstance(e.expr.expr, ObjectLit)
    e = parse_expr("f(1, 2)(3)")
    assert isinstance(e, Call) and isinstance(e.callee, Call)
    e = parse_expr("x @ c")
    assert isinstance(e, Switch) and isinstance(e.context, Name)


def test_where_declarations():
    e = parse_expr("g(2) where dimension t in {3, 1}; x = 1; g(a, b) = a end")
    dim, var, fun = e.decls
    assert dim.tag_set == TagSet((1, 3))
    assert isinstance(var, VarDecl) and isinstance(fun, FunDecl)
    assert fun.params == ("a", "b")
    assert var.uid != fun.uid
    with pytest.raises(ParseError):
        parse_expr("x where x = 1; x = 2 end")
    with pytest.raises(ParseError):
        parse_expr('x where dimension t in {1, "a"} end')
    with pytest.raises(ParseError):
        parse_expr("x where x = 1")


def test_if():
    e = parse_expr("if a then 1 else if b then 2 else 3")
    assert isinstance(e, If) and isinstance(e.else_, If)


def test_comments_and_lines():
    e = parse_expr("// leading\n1 +\n// mid\n2")
    assert e.right.pos == (4, 1)


def test_header():
    src = "%signatures\nf(long) -> long\n%end\n%context [d:1]\n\nf(#d)\n"
    p = parse(src, "prog.hoil")
    assert [s.name for s in p.signatures] == ["f"]
    assert p.context == Context({"d": 1})
    assert p.root.pos == (6, 1)
    assert p.filename == "prog.hoil"


def test_header_errors():
    with pytest.raises(ParseError) as e:
        parse("%signatures\nf(int => int\n%end\n1")
    assert e.value.pos[0] == 2
    with pytest.raises(ParseError):
        parse("%bogus\n1")
    with pytest.raises(ParseError):
        parse("%context d:1\n1")


def test_unexpected_character():
    with pytest.raises(ParseError) as e:
        parse_expr("1 $ 2")
    assert e.value.pos == (1, 3)


def test_literal_nodes():
    assert isinstance(parse_expr("true"), Literal)
