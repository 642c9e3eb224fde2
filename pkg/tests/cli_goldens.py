"""The CLI golden cases: argv and the files holding the expected output."""

import io
from pathlib import Path

from hoil.cli import run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "eval_add": ["eval", "-e", "1 + 2.5"],
    "join_int_string": ["join", "int", "string"],
    "eval_strict": ["eval", "-e", "true & 1"],
}


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def expected(name):
    return (int((GOLDEN / f"{name}.exit").read_text()),
            (GOLDEN / f"{name}.stdout").read_text(),
            (GOLDEN / f"{name}.stderr").read_text())


def all_cases():
    """(name, argv) for every case in text and JSON mode."""
    for name, argv in CASES.items():
        yield name, argv
        yield name + "_json", [*argv, "--json"]
