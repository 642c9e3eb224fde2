"""Simple contexts, tag sets and the context calculus.

A :class:`Context` is a finite partial function from dimension names to
tags (integers or strings).  The set operators treat it as a set of
``(dimension, tag)`` pairs; ``override``, ``projection`` and ``hiding``
work dimension-wise.  Every operator returns a simple context.
"""

from __future__ import annotations

import bisect
import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ContextConflictError, ConstructionError, TagMembershipError, TagRangeError
from .values import Value, boolean, check_tag_value, format_tag_value


class Context:
    """Immutable simple context, kept in canonical (sorted by name) order."""

    __slots__ = ("_pairs", "_map")

    def __init__(self, bindings: Mapping[str, int | str] | Iterable[tuple[str, int | str]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        m: dict[str, int | str] = {}
        for dim, tag in items:
            if not isinstance(dim, str) or not dim:
                raise ConstructionError(f"bad dimension name {dim!r}")
            tag = check_tag_value(tag)
            if dim in m and m[dim] != tag:
                raise ContextConflictError(
                    f"dimension {dim} bound to both {format_tag_value(m[dim])} "
                    f"and {format_tag_value(tag)}")
            m[dim] = tag
        self._pairs = tuple(sorted(m.items()))
        self._map = dict(self._pairs)

    @classmethod
    def _of(cls, pairs) -> Context:
        # pairs already functional
        c = cls.__new__(cls)
        c._pairs = tuple(sorted(pairs))
        c._map = dict(c._pairs)
        return c

    def pairs(self) -> frozenset:
        return frozenset(self._pairs)

    def dims(self) -> frozenset[str]:
        return frozenset(self._map)

    def get(self, dim: str, default=None):
        return self._map.get(dim, default)

    def __getitem__(self, dim):
        return self._map[dim]

    def __contains__(self, dim):
        return dim in self._map

    def __iter__(self):
        return iter(self._pairs)

    def __len__(self):
        return len(self._pairs)

    def __eq__(self, other):
        if not isinstance(other, Context):
            return NotImplemented
        return self._pairs == other._pairs

    def __hash__(self):
        return hash(self._pairs)

    def format(self) -> str:
        return "[" + ",".join(f"{d}:{format_tag_value(t)}" for d, t in self._pairs) + "]"

    __str__ = format

    def __repr__(self):
        return f"Context({self.format()})"


EMPTY = Context()

_ITEM = re.compile(r'\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(-?\d+|"(?:[^"\\]|\\.)*")\s*')


def parse_context(text: str) -> Context:
    """Parse a context literal such as ``[d:1, e:"x"]`` or ``[]``."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"context literal must be bracketed: {text!r}")
    body = s[1:-1]
    if not body.strip():
        return EMPTY
    pairs = []
    for part in _split_items(body):
        m = _ITEM.fullmatch(part)
        if m is None:
            raise ValueError(f"bad context item {part.strip()!r}")
        raw = m.group(2)
        pairs.append((m.group(1), json.loads(raw) if raw.startswith('"') else int(raw)))
    return Context(pairs)


def _split_items(body: str):
    items, cur, in_str, esc = [], [], False, False
    for ch in body:
        if in_str:
            cur.append(ch)
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
            cur.append(ch)
        elif ch == ",":
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    items.append("".join(cur))
    return items


def ctx_union(c1: Context, c2: Context) -> Context:
    for d, t in c2:
        if d in c1 and c1[d] != t:
            raise ContextConflictError(
                f"union would bind {d} to both {format_tag_value(c1[d])} and "
                f"{format_tag_value(t)}; use override")
    return Context._of(c1.pairs() | c2.pairs())


def ctx_difference(c1: Context, c2: Context) -> Context:
    return Context._of(c1.pairs() - c2.pairs())


def ctx_intersection(c1: Context, c2: Context) -> Context:
    return Context._of(c1.pairs() & c2.pairs())


def sub_context(c1: Context, c2: Context) -> bool:
    return c1.pairs() <= c2.pairs()


def is_sub_context(c1: Context, c2: Context) -> Value:
    return boolean(sub_context(c1, c2))


def ctx_projection(c: Context, dims: Iterable[str]) -> Context:
    keep = frozenset(dims)
    return Context._of(p for p in c if p[0] in keep)


def ctx_hiding(c: Context, dims: Iterable[str]) -> Context:
    drop = frozenset(dims)
    return Context._of(p for p in c if p[0] not in drop)


def ctx_override(c1: Context, c2: Context) -> Context:
    merged = dict(c1._map)
    merged.update(c2._map)
    return Context._of(merged.items())


# ---------------------------------------------------------------------------
# tag sets and dimension declarations

@dataclass(frozen=True)
class TagSet:
    """Finite, strictly increasing sequence of same-variant tags."""

    tags: tuple

    def __post_init__(self):
        tags = tuple(check_tag_value(t) for t in self.tags)
        if not tags:
            raise ConstructionError("a tag set needs at least one tag")
        if len({type(t) for t in tags}) != 1:
            raise ConstructionError("tag set mixes integer and string tags")
        if any(a >= b for a, b in zip(tags, tags[1:])):
            raise ConstructionError("tag set must be strictly increasing")
        object.__setattr__(self, "tags", tags)

    @classmethod
    def of(cls, tags: Iterable) -> TagSet:
        """Build from any iterable, sorting and deduplicating."""
        return cls(tuple(sorted(set(tags))))

    def __contains__(self, tag) -> bool:
        i = self._find(tag)
        return i is not None

    def _find(self, tag):
        if type(tag) is not type(self.tags[0]):
            return None
        i = bisect.bisect_left(self.tags, tag)
        if i < len(self.tags) and self.tags[i] == tag:
            return i
        return None

    def first(self):
        return self.tags[0]

    def last(self):
        return self.tags[-1]

    def next(self, tag):
        i = self._find(tag)
        if i is None:
            raise TagMembershipError(f"tag {format_tag_value(tag)} is not in the tag set")
        if i + 1 == len(self.tags):
            raise TagRangeError(f"tag {format_tag_value(tag)} is the last in its tag set")
        return self.tags[i + 1]

    def format(self) -> str:
        return "{" + ",".join(format_tag_value(t) for t in self.tags) + "}"


def tag_next(ts: TagSet, t):
    return ts.next(t)


@dataclass(frozen=True)
class Dimension:
    """Declared dimension; without a tag set it accepts any tag."""

    name: str
    tag_set: TagSet | None = None

    def __post_init__(self):
        if not self.name:
            raise ConstructionError("dimension name must be non-empty")

    def admits(self, tag) -> bool:
        return self.tag_set is None or tag in self.tag_set

    def check(self, tag):
        if not self.admits(tag):
            raise TagRangeError(
                f"tag {format_tag_value(tag)} is outside dimension {self.name}'s "
                f"tag set {self.tag_set.format()}")
        return tag
