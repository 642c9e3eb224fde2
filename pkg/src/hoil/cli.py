"""Command-line front end.

Exit codes: 0 success, 1 program errors (syntax, type or evaluation),
2 usage errors, 3 I/O errors.  Results go to stdout and diagnostics to
stderr, except with ``--json`` where one JSON document on stdout carries both.
"""

from __future__ import annotations

import argparse
import importlib
import importlib.util
import json
import os
import sys
from pathlib import Path

from . import hostlib
from .algebra import join
from .bridge import ProcedureRegistry, parse_signatures, render_table, table_rows
from .context import EMPTY, ctx_override, parse_context
from .errors import HoilError
from .kinds import kinds_of
from .lang import Warehouse, check, evaluate, parse
from .values import format_value, parse_type, type_name

EXIT_OK, EXIT_PROGRAM, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class IOFailure(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")

    program = argparse.ArgumentParser(add_help=False)
    src = program.add_mutually_exclusive_group()
    src.add_argument("-e", dest="expr", metavar="EXPR", help="inline program text")
    src.add_argument("-f", dest="file", metavar="FILE", help="program file")
    program.add_argument("--context", metavar="LITERAL",
                         help='initial context, e.g. "[d:1,lang:\\"en\\"]"')
    program.add_argument("--signatures", metavar="FILE", action="append", default=[],
                         help="host signature declarations, one per line")
    program.add_argument("--host", metavar="MODULE", action="append", default=[],
                         help="Python module or .py file providing host procedures")

    p = _ArgParser(prog="hoil", description="Typed intensional expressions with host calls.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)
    sub.add_parser("typecheck", parents=[common, program], help="check a program statically")
    ev = sub.add_parser("eval", parents=[common, program], help="evaluate a program")
    ev.add_argument("--no-warehouse", action="store_true", help="disable the value cache")
    ev.add_argument("--stats", action="store_true", help="report cache and host-call counts")
    j = sub.add_parser("join", parents=[common], help="least upper bound of two types")
    j.add_argument("left")
    j.add_argument("right")
    sub.add_parser("table", parents=[common], help="print the Lucid/Java type mapping")
    k = sub.add_parser("kinds", parents=[common], help="kinds a type belongs to")
    k.add_argument("type")
    return p


# -- output helpers

def _use_color(stream) -> bool:
    env = os.environ.get("HOIL_COLOR")
    if env is not None:
        return env not in ("", "0")
    return hasattr(stream, "isatty") and stream.isatty()


def _diag(err: HoilError, filename: str) -> dict:
    line, col = err.pos or (1, 1)
    return {"severity": "error", "file": filename, "line": line, "col": col,
            "message": err.message, "code": err.code}


def _diag_text(d: dict, color: bool) -> str:
    sev = d["severity"]
    if color:
        sev = f"\x1b[1;31m{sev}\x1b[0m"
    return f"{sev}: {d['file']}:{d['line']}:{d['col']}: {d['message']} ({d['code']})"


class Output:
    def __init__(self, as_json: bool, out, err):
        self.json = as_json
        self.out, self.err = out, err
        self.doc = {"ok": True, "result": None, "diagnostics": []}
        self.lines: list[str] = []

    def result(self, value, text: str | None = None):
        self.doc["result"] = value
        self.lines.append(text if text is not None else str(value))

    def diagnostic(self, d: dict):
        self.doc["ok"] = False
        self.doc["diagnostics"].append(d)
        if not self.json:
            print(_diag_text(d, _use_color(self.err)), file=self.err)

    def stats(self, stats: dict, text: list[str]):
        self.doc["stats"] = stats
        self.lines += text

    def flush(self):
        if self.json:
            print(json.dumps(self.doc, indent=2), file=self.out)
        else:
            for line in self.lines:
                print(line, file=self.out)


# -- program inputs

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot read {path}: {e.strerror or e}") from None
    except UnicodeDecodeError:
        raise IOFailure(f"{path} is not valid UTF-8") from None


def _load_host(spec: str):
    try:
        if spec.endswith(".py") or os.sep in spec:
            name = "hoil_host_" + Path(spec).stem
            mspec = importlib.util.spec_from_file_location(name, spec)
            if mspec is None:
                raise IOFailure(f"cannot load host module {spec}")
            mod = importlib.util.module_from_spec(mspec)
            mspec.loader.exec_module(mod)
            return mod
        return importlib.import_module(spec)
    except FileNotFoundError:
        raise IOFailure(f"cannot read host module {spec}") from None
    except ImportError as e:
        raise IOFailure(f"cannot import host module {spec}: {e}") from None


def _implementation(name: str, hosts):
    for mod in hosts:
        table = getattr(mod, "PROCEDURES", {})
        if name in table:
            return table[name]
        fn = getattr(mod, name.replace(".", "_"), None)
        if callable(fn):
            return fn
    return hostlib.IMPLEMENTATIONS.get(name)


def build_registry(signatures, hosts=()) -> ProcedureRegistry:
    """Registry with one entry per declared signature that has an
    implementation, plus the default host library for undeclared names.

    Later declarations of a name replace earlier ones.
    """
    declared = {}
    for mod in hosts:
        for sig in parse_signatures(getattr(mod, "SIGNATURES", "")):
            declared[sig.name] = sig
    for sig in signatures:
        declared[sig.name] = sig
    reg = ProcedureRegistry()
    for sig, fn in hostlib.DEFAULTS:
        if sig.name not in declared:
            reg.register(sig, fn)
    for name, sig in declared.items():
        fn = _implementation(name, hosts)
        if fn is not None:
            reg.register(sig, fn)
    return reg


def _program_inputs(args):
    if args.expr is not None:
        text, filename = args.expr, "<expr>"
    elif args.file is not None:
        text, filename = _read(args.file), args.file
    else:
        raise UsageError(f"{args.command} needs -e EXPR or -f FILE")
    context = None
    if args.context is not None:
        try:
            context = parse_context(args.context)
        except (ValueError, HoilError) as e:
            raise UsageError(f"bad --context literal: {e}") from None
    sigs = []
    for path in args.signatures:
        try:
            sigs += parse_signatures(_read(path))
        except HoilError as e:
            raise UsageError(f"{path}: {e.message}") from None
    hosts = [_load_host(h) for h in args.host]
    return text, filename, context, sigs, hosts


# -- subcommands

def _prepare(args, out: Output):
    """Parse and check; returns (program, registry, context, result) or None."""
    text, filename, context, sigs, hosts = _program_inputs(args)
    try:
        program = parse(text, filename)
    except HoilError as e:
        out.diagnostic(_diag(e, filename))
        return None
    try:
        registry = build_registry([*sigs, *program.signatures], hosts)
    except HoilError as e:
        out.diagnostic(_diag(e, filename))
        return None
    base = program.context or EMPTY
    ctx = ctx_override(base, context) if context is not None else base
    result = check(program, [registry.signature(n) for n in registry], ctx.dims())
    for e in result.errors:
        out.diagnostic(_diag(e, filename))
    return program, registry, ctx, result


def cmd_typecheck(args, out: Output) -> int:
    prepared = _prepare(args, out)
    if prepared is None:
        return EXIT_PROGRAM
    *_, result = prepared
    if not result.ok:
        return EXIT_PROGRAM
    out.result(result.describe())
    return EXIT_OK


def cmd_eval(args, out: Output) -> int:
    prepared = _prepare(args, out)
    if prepared is None:
        return EXIT_PROGRAM
    program, registry, ctx, result = prepared
    if not result.ok:
        return EXIT_PROGRAM
    warehouse = None if args.no_warehouse else Warehouse()
    code = EXIT_OK
    try:
        out.result(format_value(evaluate(program, ctx, registry, warehouse)))
    except HoilError as e:
        out.diagnostic(_diag(e, program.filename))
        code = EXIT_PROGRAM
    if args.stats:
        calls = registry.stats()
        text = []
        if warehouse is None:
            stats = {"warehouse": None}
            text.append("warehouse: off")
        else:
            h, m, n = warehouse.stats()
            stats = {"warehouse": {"hits": h, "misses": m, "entries": n}}
            text.append(f"warehouse: hits={h} misses={m} entries={n}")
        stats["calls"] = calls
        text.append("calls: " + (" ".join(f"{k}={v}" for k, v in calls.items()) or "none"))
        out.stats(stats, text)
    return code


def _type_arg(text: str):
    try:
        return parse_type(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_join(args, out: Output) -> int:
    t = join(_type_arg(args.left), _type_arg(args.right))
    out.result(type_name(t))
    return EXIT_OK


def cmd_table(args, out: Output) -> int:
    out.result(table_rows(), render_table().rstrip("\n"))
    return EXIT_OK


def cmd_kinds(args, out: Output) -> int:
    t = _type_arg(args.type)
    try:
        ks = sorted(kinds_of(t), key=lambda k: "ALBCDF".index(k.value))
    except HoilError as e:
        out.diagnostic(_diag(e, "<args>"))
        return EXIT_PROGRAM
    out.result([k.label for k in ks],
               " ".join(f"{k.value}:{k.label}" for k in ks) if ks else "none")
    return EXIT_OK


COMMANDS = {
    "typecheck": cmd_typecheck, "eval": cmd_eval, "join": cmd_join,
    "table": cmd_table, "kinds": cmd_kinds,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(stderr)
        print(f"hoil: error: {e}", file=stderr)
        return EXIT_USAGE
    except SystemExit as e:      # --help
        return e.code if isinstance(e.code, int) else EXIT_OK
    out = Output(getattr(args, "json", False), stdout, stderr)
    try:
        code = COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"hoil: error: {e}", file=stderr)
        return EXIT_USAGE
    except IOFailure as e:
        print(f"hoil: error: {e}", file=stderr)
        return EXIT_IO
    out.flush()
    return code


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
