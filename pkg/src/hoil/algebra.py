"""Subtyping and the union-type join.

The hierarchy is small: Void sits under Boolean, Operator under Function,
arrays and named objects under the unnamed Object, and everything under
Top.  Integer and String additionally join to Dimension; that edge exists
for joins only and does not make an int usable where a dimension is
expected.
"""

from __future__ import annotations

from .kinds import Kind, MEMBERS
from .values import (
    ARRAY, DIMENSION, INTEGER, OBJECT, OPERATOR, STRING, TOP, VOID,
    T_BOOLEAN, T_DIMENSION, T_FUNCTION, T_OBJECT, T_TOP,
    TypeTag, array_of,
)

# Subsumption edges between non-composite tags.
_PARENT = {VOID: T_BOOLEAN, OPERATOR: T_FUNCTION}
# Join-only edges.
_JOIN_PARENT = {INTEGER: T_DIMENSION, STRING: T_DIMENSION}


def _object_family(t: TypeTag) -> bool:
    return t.name in (ARRAY, OBJECT)


def parent(t: TypeTag) -> TypeTag | None:
    """Immediate supertype, or None for Top."""
    if t.name == TOP:
        return None
    if t.name == ARRAY or (t.name == OBJECT and t.object_name is not None):
        return T_OBJECT
    return _PARENT.get(t.name, T_TOP)


def _join_chain(t: TypeTag) -> list[TypeTag]:
    chain = [t]
    while not t.is_top:
        t = _JOIN_PARENT.get(t.name) or parent(t)
        chain.append(t)
    return chain


def join(t1: TypeTag, t2: TypeTag) -> TypeTag:
    """Least upper bound of two tags (the union type)."""
    if t1 == t2:
        return t1
    if t1.is_top or t2.is_top:
        return T_TOP
    if t1.name == ARRAY and t2.name == ARRAY:
        e = join(t1.elem, t2.elem)
        return T_OBJECT if e.is_top else array_of(e)
    if _object_family(t1) and _object_family(t2):
        return T_OBJECT
    above = _join_chain(t2)
    for t in _join_chain(t1):
        if t in above:
            return t
    return T_TOP  # pragma: no cover - every chain ends at Top


def join_all(tags) -> TypeTag:
    it = iter(tags)
    acc = next(it)
    for t in it:
        acc = join(acc, t)
    return acc


def is_subtype(t1: TypeTag, t2: TypeTag) -> bool:
    """Reflexive-transitive subsumption; arrays are covariant."""
    if t1 == t2 or t2.is_top:
        return True
    if t1.name == ARRAY and t2.name == ARRAY:
        return is_subtype(t1.elem, t2.elem)
    p = parent(t1)
    return p is not None and not p.is_top and is_subtype(p, t2)


def joins_below(t1: TypeTag, t2: TypeTag) -> bool:
    """Order induced by :func:`join`: subtyping plus the Dimension edge."""
    if is_subtype(t1, t2):
        return True
    if t1.name in _JOIN_PARENT and t2.name == DIMENSION:
        return True
    if t1.name == ARRAY and t2.name == ARRAY:
        return joins_below(t1.elem, t2.elem)
    return False


def join_kind(t1: TypeTag, t2: TypeTag) -> Kind | None:
    """First kind (in A, L, B, C, D, F order) holding both tags."""
    for k in Kind:
        if t1.name in MEMBERS[k] and t2.name in MEMBERS[k] and not t1.is_top:
            return k
    return None


def join_provider(t: TypeTag, kind: Kind) -> Kind | None:
    """Join of a tag with a kind's operator-provider interface.

    A member of the kind joins to the provider itself; anything else has
    no common provider.
    """
    return kind if t.name in MEMBERS[kind] else None


__all__ = [
    "parent", "join", "join_all", "is_subtype", "joins_below", "join_kind",
    "join_provider",
]
