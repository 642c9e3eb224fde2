"""Random well-scoped programs for the evaluator property tests.

Programs are generated by target type (int, double, bool) so most of them
evaluate; the rest fail with an ordinary typed error (division by zero,
mostly), which is fine because the properties compare runs, not outcomes.
"""

from __future__ import annotations

import random

from hoil.bridge import ProcedureRegistry
from hoil.context import Context

INITIAL = Context({"d": 0, "e": 1})


def registry() -> ProcedureRegistry:
    reg = ProcedureRegistry()
    reg.register("f(long) -> long", lambda x: (x * 2 + 1) % 1000)
    reg.register("h(double) -> double", lambda x: x / 2)
    return reg


class Gen:
    def __init__(self, seed: int):
        self.r = random.Random(seed)
        self.n = 0

    def fresh(self, prefix):
        self.n += 1
        return f"{prefix}{self.n}"

    def expr(self, ty: str, depth: int, scope: dict) -> str:
        r = self.r
        if depth <= 0 or r.random() < 0.25:
            return self.leaf(ty, scope)
        return getattr(self, "gen_" + ty)(depth - 1, scope)

    def leaf(self, ty, scope):
        r = self.r
        names = [n for n, t in scope.items() if t == ty]
        if names and r.random() < 0.5:
            return r.choice(names)
        if ty == "int":
            return r.choice(["0", "1", "2", "5", "#d", "#e", "#d", "#e"])
        if ty == "double":
            return r.choice(["1.5", "0.25", "2.0"])
        return r.choice(["true", "false"])

    def gen_int(self, k, scope):
        r = self.r
        e = lambda t="int": self.expr(t, k, scope)  # noqa: E731
        choice = r.randrange(9)
        if choice == 0:
            return f"({e()} {r.choice(['+', '-', '*'])} {e()})"
        if choice == 1:
            return f"({e()} {r.choice(['/', '%'])} {e()})"
        if choice == 2:
            return f"(if {e('bool')} then {e()} else {e()})"
        if choice == 3:
            return f"(({e()}) @ [{r.choice('de')}: {e()}])"
        if choice == 4:
            return f"f({e()})"
        return self.where("int", k, scope)

    def gen_double(self, k, scope):
        r = self.r
        e = lambda t="double": self.expr(t, k, scope)  # noqa: E731
        choice = r.randrange(6)
        if choice == 0:
            return f"({e()} {r.choice(['+', '-', '*'])} {e('int')})"
        if choice == 1:
            return f"({e('int')} + {e()})"
        if choice == 2:
            return f"(({e()}) @ [d: {e('int')}])"
        if choice == 3:
            return f"h({e()})"
        if choice == 4:
            return f"(if {e('bool')} then {e()} else {e()})"
        return self.where("double", k, scope)

    def gen_bool(self, k, scope):
        r = self.r
        e = lambda t="bool": self.expr(t, k, scope)  # noqa: E731
        choice = r.randrange(5)
        if choice == 0:
            return f"({e('int')} {r.choice(['<', '<=', '==', '!=', '>'])} {e('int')})"
        if choice == 1:
            return f"({e()} {r.choice(['and', 'or', 'xor'])} {e()})"
        if choice == 2:
            return f"(not {e()})"
        if choice == 3:
            return f"(({e()}) @ [e: {e('int')}])"
        return self.where("bool", k, scope)

    def where(self, ty, k, scope):
        r = self.r
        inner = dict(scope)
        decls = []
        for _ in range(r.randint(1, 2)):
            vt = r.choice(["int", "int", "double", "bool"])
            name = self.fresh("x")
            decls.append(f"{name} = {self.expr(vt, k, inner)};")
            inner[name] = vt
        if r.random() < 0.4:
            g = self.fresh("g")
            body = self.expr("int", k, {**inner, "a": "int"})
            decls.append(f"{g}(a) = {body};")
            call = f"{g}({self.expr('int', k, inner)})"
            if ty == "int":
                return f"({call} + {self.expr(ty, k, inner)} where {' '.join(decls)} end)"
        return f"({self.expr(ty, k, inner)} where {' '.join(decls)} end)"


def program(seed: int, depth: int = 4) -> str:
    g = Gen(seed)
    ty = g.r.choice(["int", "int", "double", "bool"])
    return g.expr(ty, depth, {})
