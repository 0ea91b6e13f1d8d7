"""Runtime values.

Integers, reals and booleans are plain Python ``int``, ``float`` and
``bool``.  Sequences are tuples.  Arrays and references get small
classes of their own because they carry bounds and identity.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, List, Optional

from .errors import Undefined

EPS_REAL = 1e-9


@dataclass
class Array:
    lower: int
    items: List[Any] = field(default_factory=list)

    @property
    def upper(self) -> int:
        return self.lower + len(self.items) - 1

    @property
    def count(self) -> int:
        return len(self.items)

    def _pos(self, i) -> int:
        if type(i) is not int:
            raise Undefined(f"array index {i!r} is not an integer")
        if not self.lower <= i <= self.upper:
            raise Undefined(f"index {i} outside [{self.lower}..{self.upper}]")
        return i - self.lower

    def get(self, i):
        return self.items[self._pos(i)]

    def set(self, i, v) -> None:
        self.items[self._pos(i)] = v

    def slice(self, lo, hi) -> "Array":
        if type(lo) is not int or type(hi) is not int:
            raise Undefined("slice bounds must be integers")
        if hi < lo:
            return Array(lo, [])
        if lo < self.lower or hi > self.upper:
            raise Undefined(f"slice [{lo}..{hi}] outside [{self.lower}..{self.upper}]")
        return Array(lo, self.items[lo - self.lower:hi - self.lower + 1])


@dataclass(frozen=True)
class Ref:
    """Heap reference; ``id is None`` is Void."""
    id: Optional[int] = None

    @property
    def is_void(self) -> bool:
        return self.id is None


VOID = Ref(None)


def copy_value(v):
    """Value-semantics copy used for assignment and the `old` snapshot."""
    if isinstance(v, Array):
        return copy.deepcopy(v)
    return v


def is_int(v) -> bool:
    return type(v) is int


def is_num(v) -> bool:
    return type(v) in (int, float)


def elements(v) -> list:
    """Element list of an array or sequence."""
    if isinstance(v, Array):
        return v.items
    if isinstance(v, tuple):
        return list(v)
    raise Undefined(f"expected an array or sequence, got {type_name(v)}")


def type_name(v) -> str:
    if type(v) is bool:
        return "BOOLEAN"
    if type(v) is int:
        return "INTEGER"
    if type(v) is float:
        return "REAL"
    if isinstance(v, Array):
        return "ARRAY"
    if isinstance(v, Ref):
        return "REF"
    if isinstance(v, tuple):
        return "SEQ"
    if isinstance(v, str):
        return "CHARACTER"
    return type(v).__name__


def values_equal(a, b) -> bool:
    if type(a) is float or type(b) is float:
        if is_num(a) and is_num(b):
            return abs(a - b) <= EPS_REAL
        return False
    if isinstance(a, Array) and isinstance(b, Array):
        return a.lower == b.lower and len(a.items) == len(b.items) and all(
            values_equal(x, y) for x, y in zip(a.items, b.items))
    if isinstance(a, (Array, tuple)) and isinstance(b, (Array, tuple)):
        xs, ys = elements(a), elements(b)
        return len(xs) == len(ys) and all(values_equal(x, y) for x, y in zip(xs, ys))
    if (type(a) is bool) != (type(b) is bool):
        return False
    return a == b


def to_json(v) -> Any:
    """JSON-friendly rendering of a value (stable across runs)."""
    if isinstance(v, Array):
        return {"lower": v.lower, "items": [to_json(x) for x in v.items]}
    if isinstance(v, Ref):
        return "Void" if v.id is None else f"#{v.id}"
    if isinstance(v, tuple):
        return [to_json(x) for x in v]
    if isinstance(v, float):
        return float(repr(v))
    return v


def show(v) -> str:
    """Compact human-readable rendering."""
    if type(v) is bool:
        return "true" if v else "false"
    if isinstance(v, Array):
        body = ", ".join(show(x) for x in v.items)
        return f"[{body}]" if v.lower == 1 else f"[{body}]@{v.lower}"
    if isinstance(v, Ref):
        return "Void" if v.id is None else f"#{v.id}"
    if isinstance(v, tuple):
        return "<" + ", ".join(show(x) for x in v) + ">"
    if isinstance(v, str):
        return repr(v)
    return repr(v)
