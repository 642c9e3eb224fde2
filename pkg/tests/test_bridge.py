import random

import pytest

from hoil import values as V
from hoil.algebra import is_subtype, join
from hoil.bridge import (
    PARAM_ROWS, RETURN_ROWS, HostDescriptor, HostSignature, ProcedureRegistry, call_back,
    host, host_return_to_tag, invoke, param_tag_to_host, parse_descriptor, parse_signature,
    parse_signatures, register, render_table, tag_accepts, to_host, to_intensional,
)
from hoil.context import Context
from hoil.errors import (
    ArityError, BridgeError, HostCallError, ParameterMismatchError, RegistrationError,
    ReturnContractError, SignatureSyntaxError, UnknownProcedureError,
    UnmappableParameterError,
)
from hoil.kinds import arith, logic
from hoil.values import (
    T_BOOLEAN, T_CHARACTER, T_CONTEXT, T_DIMENSION, T_DOUBLE, T_EMBED, T_FLOAT,
    T_FUNCTION, T_INTEGER, T_OBJECT, T_OPERATOR, T_STRING, T_VOID, array_of,
)

# (host return types, role, expected tag); written out independently of the
# table text the module parses
UPPER = [
    (["int", "byte", "long"], None, T_INTEGER),
    (["float"], None, T_FLOAT),
    (["double"], None, T_DOUBLE),
    (["boolean"], None, T_BOOLEAN),
    (["char"], None, T_CHARACTER),
    (["String"], None, T_STRING),
    (["Method"], "function", T_FUNCTION),
    (["Method"], "operator", T_OPERATOR),
    (["[]"], None, None),
    (["Object"], "object", T_OBJECT),
    (["Object"], "embed", T_EMBED),
    (["void"], None, T_VOID),
]

# (parameter tag, host types in table order)
LOWER = [
    (T_STRING, ["String"]),
    (T_FLOAT, ["float"]),
    (T_DOUBLE, ["double"]),
    (T_INTEGER, ["int"]),
    (T_DIMENSION, ["int", "String"]),
    (T_BOOLEAN, ["boolean"]),
    (T_OBJECT, ["Object"]),
    (T_EMBED, ["Object"]),
    (array_of(T_INTEGER), ["[]"]),
    (T_OPERATOR, ["Method"]),
    (T_FUNCTION, ["Method"]),
]

ROLE = {V.FUNCTION: "function", V.OPERATOR: "operator", V.OBJECT: "object", V.EMBED: "embed"}


def test_table_shape():
    assert len(RETURN_ROWS) == 12 and len(PARAM_ROWS) == 11
    assert RETURN_ROWS[0].host == ("int", "byte", "long")
    assert RETURN_ROWS[0].intensional == ("int", "dimension")
    assert RETURN_ROWS[-1].intensional == ("bool::true",)
    assert PARAM_ROWS[4].host == ("int", "String")


@pytest.mark.parametrize("hosts, role, want", UPPER)
def test_upper_rows(hosts, role, want):
    for h in hosts:
        if h == "[]":
            d = HostDescriptor("[]", host("double"))
            assert host_return_to_tag(d) == array_of(T_DOUBLE)
        else:
            assert host_return_to_tag(host(h), role) == want


@pytest.mark.parametrize("tag, hosts", LOWER)
def test_lower_rows(tag, hosts):
    got = param_tag_to_host(tag)
    assert [d.name for d in got] == hosts


def test_unmappable_parameters():
    for t in (T_CONTEXT, T_VOID, T_CHARACTER):
        with pytest.raises(UnmappableParameterError):
            param_tag_to_host(t)


def test_void_return_is_logic_true():
    v = to_intensional(None, host("void"))
    assert v.tag == T_VOID
    assert V.value_of(v) is True
    assert logic("and", v, V.TRUE) == V.TRUE


@pytest.mark.parametrize("tag, hosts", LOWER)
def test_round_trip_stays_in_family(tag, hosts):
    for d in param_tag_to_host(tag):
        back = host_return_to_tag(d, ROLE.get(tag.name))
        assert not join(tag, back).is_top


def test_descriptors():
    assert str(parse_descriptor("int[][]")) == "int[][]"
    assert parse_descriptor("int[]") == HostDescriptor("[]", host("int"))
    for bad in ["short", "[]", "void[]"]:
        with pytest.raises(SignatureSyntaxError):
            parse_descriptor(bad)


def test_signature_parsing():
    sig = parse_signature("operator plus(long, long) -> long")
    assert sig.role == "operator" and sig.arity == 2
    assert sig.format() == "operator plus(long, long) -> long"
    sig = parse_signature("mk(String) -> Object as embed")
    assert sig.return_tag == T_EMBED
    assert parse_signature("Point.norm(Object) -> double").name == "Point.norm"
    sigs = parse_signatures("# comment\nf(int) -> int\n\ng() -> void  # trailing\n")
    assert [s.name for s in sigs] == ["f", "g"]
    with pytest.raises(SignatureSyntaxError):
        parse_signature("f(int) => int")
    with pytest.raises(SignatureSyntaxError):
        parse_signature("f(void) -> int")


@pytest.fixture
def reg():
    r = ProcedureRegistry()
    register(r, "abs(long) -> long", abs)
    register(r, "log(String) -> void", lambda s: None)
    register(r, "tiny(byte) -> byte", lambda b: b)
    register(r, "name(String) -> int", len)
    return r


def test_invoke_examples(reg):
    assert invoke(reg, "abs", [V.integer(-5)]) == V.integer(5)
    v = invoke(reg, "log", [V.string("x")])
    assert v.tag == T_VOID and V.truth(v)
    with pytest.raises(ParameterMismatchError) as e:
        invoke(reg, "abs", [V.double(1.0)])
    assert e.value.expected == host("long") and e.value.actual == T_DOUBLE
    with pytest.raises(ArityError):
        invoke(reg, "abs", [])
    with pytest.raises(UnknownProcedureError):
        invoke(reg, "nope", [])
    assert reg.stats() == {"abs": 1, "log": 1}


def test_byte_range(reg):
    assert invoke(reg, "tiny", [V.integer(-128)]) == V.integer(-128)
    with pytest.raises(ParameterMismatchError):
        invoke(reg, "tiny", [V.integer(128)])


def test_dimension_argument_picks_variant(reg):
    assert invoke(reg, "name", [V.dimension("d", "abc")]) == V.integer(3)
    with pytest.raises(ParameterMismatchError):
        invoke(reg, "name", [V.dimension("d", 3)])
    assert invoke(reg, "abs", [V.dimension("d", -3)]) == V.integer(3)


def test_registration_errors(reg):
    with pytest.raises(RegistrationError):
        register(reg, "abs(long) -> long", abs)
    with pytest.raises(RegistrationError):
        register(reg, "x() -> int", 3)


def test_operator_registration_gives_operator_value():
    r = ProcedureRegistry()
    r.register("operator plus(long, long) -> long", lambda a, b: a + b)
    v = r.value("plus")
    assert v.tag == T_OPERATOR
    assert r.invoke_handle(v.payload, [V.integer(1), V.integer(2)]) == V.integer(3)


def test_method_members():
    r = ProcedureRegistry()
    r.register("Point.norm1(Object) -> long", lambda p: sum(abs(x.payload) for _, x in p.payload))
    p = V.construct_object("Point", {"x": V.integer(3), "y": V.integer(-4)})
    m = V.dot(p, "norm1", r)
    assert m.tag == T_FUNCTION and m.payload.arity == 0
    assert r.invoke_handle(m.payload, []) == V.integer(7)


def test_return_contract():
    r = ProcedureRegistry()
    r.register("bad() -> int", lambda: "x")
    r.register("big() -> int", lambda: 1 << 40)
    r.register("flag() -> boolean", lambda: 1)
    r.register("v() -> void", lambda: 0)
    r.register("boom() -> int", lambda: 1 // 0)
    for name in ("bad", "big", "flag", "v"):
        with pytest.raises(ReturnContractError):
            r.invoke(name, [])
    with pytest.raises(HostCallError):
        r.invoke("boom", [])


def test_object_and_embed_returns():
    p = V.construct_object("P", {})
    assert to_intensional(p, host("Object")) is p
    assert to_intensional("urn:x", host("Object"), "embed") == V.embed("urn:x")
    with pytest.raises(ReturnContractError):
        to_intensional(V.integer(1), host("Object"))
    arr = to_intensional([1.5, 2], HostDescriptor("[]", host("double")))
    assert arr.tag == array_of(T_DOUBLE) and arr.payload[1] == V.double(2.0)


def test_marshal_arrays():
    a = V.construct_array(T_INTEGER, [V.integer(1), V.integer(2)])
    assert to_host(a, parse_descriptor("long[]")) == (1, 2)
    with pytest.raises(ParameterMismatchError):
        to_host(a, parse_descriptor("double[]"))


def test_tag_accepts():
    assert tag_accepts(host("long"), T_INTEGER)
    assert tag_accepts(host("String"), T_DIMENSION)
    assert not tag_accepts(host("long"), T_DOUBLE)
    assert not tag_accepts(host("Object"), T_CONTEXT)


def test_call_back_reverses_table():
    seen = []

    def apply(fn, args):
        seen.append(args)
        return arith("add", args[0], V.integer(1))

    out = call_back(V.function(V.HostHandle("cb", 1)), [41], [host("int")], host("int"), apply)
    assert out == 42 and seen == [[V.integer(41)]]
    assert call_back(V.function(None), ["s"], [host("String")], host("void"),
                     lambda f, a: V.TRUE) is None


def test_render_table_lists_every_row():
    text = render_table()
    assert text.count("GIPSY") + text.count("Dimension") >= 23
    assert "bool::true" in text


# -- fuzzing the boundary

HOSTS = ["int", "byte", "long", "float", "double", "boolean", "char", "String",
         "Object", "Method"]
ARG_MAKERS = [
    lambda r: V.integer(r.choice([0, 1, -1, 127, 128, 1 << 33, -(1 << 62)])),
    lambda r: V.double(r.uniform(-10, 10)),
    lambda r: V.float32(r.uniform(-10, 10)),
    lambda r: V.boolean(r.random() < 0.5),
    lambda r: V.string(r.choice(["", "a", "xyz"])),
    lambda r: V.character("c"),
    lambda r: V.dimension("d", r.choice([1, "k"])),
    lambda r: V.context_value(Context({"d": 1})),
    lambda r: V.construct_object("P", {}),
    lambda r: V.embed("urn:e"),
    lambda r: V.construct_array(T_INTEGER, [V.integer(1)]),
    lambda r: V.function(V.HostHandle("g", 1)),
    lambda r: V.VOID_VALUE,
]


def _payload_for(d: HostDescriptor, r: random.Random, role):
    n = d.name
    if n in ("int", "byte", "long"):
        return r.choice([0, 5, -7, 100])
    if n in ("float", "double"):
        return r.choice([0.5, 2, -1.25])
    if n == "boolean":
        return r.random() < 0.5
    if n == "char":
        return "z"
    if n == "String":
        return "out"
    if n == "void":
        return None
    if n == "[]":
        return [_payload_for(d.elem, r, role) for _ in range(2)]
    if n == "Object":
        return "urn:o" if role == "embed" else V.construct_object("R", {})
    return V.function(V.HostHandle("h", 0))


def _garbage(r):
    return r.choice([object(), "s", 3.5, None, True, [1, "a"], 1 << 70])


def fuzz_boundary(trials=1000, seed=7):
    """Returns (successes, typed_errors, violations)."""
    r = random.Random(seed)
    ok = errs = 0
    violations = []
    for i in range(trials):
        params = [host(r.choice(HOSTS)) for _ in range(r.randint(0, 3))]
        ret_name = r.choice([*HOSTS, "void", "[]"])
        ret = HostDescriptor("[]", host(r.choice(["int", "double", "String"]))) \
            if ret_name == "[]" else host(ret_name)
        returns_as = None
        if ret.name == "Object":
            returns_as = r.choice(["object", "embed"])
        elif ret.name == "Method":
            returns_as = r.choice(["function", "operator"])
        sig = HostSignature(f"p{i}", tuple(params), ret, "function", returns_as)
        honest = r.random() < 0.8
        payload = _payload_for(ret, r, returns_as) if honest else _garbage(r)
        reg = ProcedureRegistry()
        reg.register(sig, lambda *a, _p=payload: _p)
        args = [r.choice(ARG_MAKERS)(r) for _ in range(len(params) + (r.random() < 0.05))]
        try:
            v = reg.invoke(sig.name, args)
        except (ParameterMismatchError, ArityError, ReturnContractError):
            errs += 1
            continue
        except BridgeError as e:  # pragma: no cover - would be a contract gap
            violations.append((sig.format(), repr(e)))
            continue
        want = sig.return_tag
        good = v.tag == want or (want.name == V.OBJECT and is_subtype(v.tag, want))
        if not good:
            violations.append((sig.format(), V.format_value(v)))
        if ret.name == "void" and not V.truth(v):
            violations.append((sig.format(), "void not true"))
        ok += 1
    return ok, errs, violations


def test_boundary_fuzz():
    ok, errs, violations = fuzz_boundary()
    assert violations == []
    assert ok > 100 and errs > 100
