"""The expression language: parsing, static checking and evaluation."""

from __future__ import annotations

from ..errors import CheckFailed, HoilError
from .checker import CheckResult, check
from .evaluator import Evaluator, Warehouse, WarehouseStats, evaluate, warehouse_stats
from .parser import parse, parse_expr
from .syntax import Program

__all__ = [
    "CheckResult", "Evaluator", "Program", "Warehouse", "WarehouseStats",
    "check", "check_or_raise", "evaluate", "format_diagnostic", "parse",
    "parse_expr", "run", "warehouse_stats",
]


def format_diagnostic(err: HoilError, filename: str = "<expr>",
                      severity: str = "error") -> str:
    line, col = err.pos or (1, 1)
    return f"{severity}: {filename}:{line}:{col}: {err.message} ({err.code})"


def check_or_raise(program: Program, registry=None, context=None) -> CheckResult:
    sigs = [registry.signature(n) for n in registry] if registry is not None else ()
    dims = context.dims() if context is not None else ()
    result = check(program, sigs, dims)
    if result.errors:
        raise CheckFailed(result.errors)
    return result


def run(text: str, context=None, registry=None, warehouse: Warehouse | None = None,
        filename: str = "<expr>"):
    """Parse, check and evaluate ``text``; static errors raise :class:`CheckFailed`."""
    program = parse(text, filename)
    check_or_raise(program, registry, context)
    return evaluate(program, context, registry, warehouse)
