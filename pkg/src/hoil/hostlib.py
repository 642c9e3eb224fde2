"""Host procedures available to every program without a ``--host`` module.

A program or signature file may redeclare any of these names; the
declaration then replaces the default signature but keeps the
implementation.
"""

from __future__ import annotations

import math
import sys

from .bridge import HostSignature, parse_signature


def _log(message: str) -> None:
    print(message, file=sys.stderr)


DEFAULTS: list[tuple[HostSignature, object]] = [
    (parse_signature(line), fn) for line, fn in [
        ("abs(long) -> long", abs),
        ("log(String) -> void", _log),
        ("sqrt(double) -> double", math.sqrt),
        ("floor(double) -> long", math.floor),
        ("max(long, long) -> long", max),
        ("min(long, long) -> long", min),
        ("strlen(String) -> int", len),
        ("upper(String) -> String", str.upper),
        ("str(long) -> String", str),
    ]
]

IMPLEMENTATIONS = {sig.name: fn for sig, fn in DEFAULTS}
