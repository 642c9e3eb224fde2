import pytest

from hoil.bridge import parse_signatures
from hoil.lang import check, parse

SIGS = parse_signatures("""
abs(long) -> long
log(String) -> void
name(String) -> int
mk() -> Object
plus(double, double) -> double
""")


def types(src, **kw):
    r = check(parse(src), SIGS, **kw)
    return r.describe(), [e.code for e in r.errors]


@pytest.mark.parametrize("src, want", [
    ("1 + 2.5", "double"),
    ("1 + 2", "int"),
    ("1.5f * 2", "float"),
    ("1 < 2.0", "bool"),
    ("true and void", "bool"),
    ("6 & 3", "int"),
    ("1.5f bxor 1.5f", "float"),
    ('"a" ++ "b"', "string"),
    ("[1, 2]", "array<int>"),
    ("[1, 2][0]", "int"),
    ("P{x: 1}", "object<P>"),
    ("[d: 1]", "context"),
    ("if true then 1 else 2", "int"),
    ('if true then 1 else "a"', "dimension"),
    ("if true then void else false", "bool"),
    ("if true then 1 else false", "dynamic"),
    ("#d @ [d:5] where dimension d end", "dynamic"),
    ("x + 1 where x = 2 end", "int"),
    ("g(1) where g(a) = a + 1 end", "dynamic"),
    ("g(1) where g(a) = 1.5 end", "double"),
    ("abs(-3)", "int"),
    ('log("x")', "void"),
    ("mk()", "object"),
    ("abs", "function"),
    ("union([d:1], [e:2])", "context"),
    ("isSubContext([], [d:1])", "bool"),
    ('length("ab")', "int"),
    ("(1 + 2) @ [d: 1]", "int"),
    ("x where x = x end", "dynamic"),
])
def test_static_types(src, want):
    got, errors = types(src)
    assert errors == []
    assert got == want


@pytest.mark.parametrize("src, code", [
    ("true & 1", "E-STRICT"),
    ("1 & 1.0", "E-STRICT"),
    ("true + 1", "E-KIND"),
    ("1 and true", "E-KIND"),
    ('(if true then 1 else "a") + 1', "E-KIND"),
    ("#q", "E-UNKNOWN-DIM"),
    ("nope", "E-UNKNOWN-ID"),
    ("abs(1, 2)", "E-ARITY"),
    ("g(1, 2) where g(a) = a end", "E-ARITY"),
    ("abs(1.5)", "E-PARAM"),
    ("plus(1, 2)", "E-PARAM"),
    ("name([d:1])", "E-PARAM"),
    ("if 1 then 2 else 3", "E-KIND"),
    ('[1, "a"]', "E-TYPE"),
    ("[1,2][true]", "E-TYPE"),
    ("1[0]", "E-TYPE"),
    ("(1).x", "E-KIND"),
    ("3(1)", "E-KIND"),
    ("union([d:1], 2)", "E-TYPE"),
    ("projection([d:1])", None),
    ("union", "E-UNKNOWN-ID"),
    ("1 @ 2", "E-TYPE"),
    ("1 @ [d: true]", "E-TYPE"),
    ('"a" ++ 1', "E-TYPE"),
])
def test_static_errors(src, code):
    _, errors = types(src)
    if code is None:
        assert errors == []
    else:
        assert code in errors


def test_dynamic_operand_still_checked_against_itself():
    # one side unknown, the other a bool: + can never succeed
    _, errors = types("(#d + true) @ [d:1]")
    assert errors == ["E-KIND"]


def test_dimension_parameter_accepts_both_variants():
    _, errors = types("name(#d) @ [d:1]")
    assert errors == []


def test_known_dimensions_from_context():
    assert types("#d")[1] == ["E-UNKNOWN-DIM"]
    assert types("#d", extra_dims={"d"})[1] == []
    r = check(parse("%context [d:1]\n#d"))
    assert r.ok


def test_error_positions():
    r = check(parse("1 +\n  (true & 1)"))
    assert [e.pos for e in r.errors] == [(2, 9)]


def test_errors_are_collected_not_stopped():
    r = check(parse("(true + 1) + (#q) + nope"))
    assert [e.code for e in r.errors] == ["E-KIND", "E-UNKNOWN-DIM", "E-UNKNOWN-ID"]


def test_unused_bindings_are_checked():
    assert types("1 where x = true + 1 end")[1] == ["E-KIND"]


@pytest.mark.parametrize("seed", range(300))
def test_static_info_covers_runtime_tag(seed):
    from hoil.algebra import is_subtype
    from hoil.errors import HoilError
    from hoil.lang import evaluate
    from progen import INITIAL, program, registry

    reg = registry()
    p = parse(program(seed))
    sigs = [reg.signature(n) for n in reg]
    r = check(p, sigs, INITIAL.dims())
    assert r.ok, [str(e) for e in r.errors]
    try:
        v = evaluate(p, INITIAL, reg)
    except HoilError:
        return
    info = r.info(p.root)
    if info is not None:
        assert any(v.tag == t or is_subtype(v.tag, t) for t in info)
