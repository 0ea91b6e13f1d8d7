"""Expression and assertion syntax trees.

All nodes are frozen dataclasses, so trees can be hashed, compared
structurally and shared freely between runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple, Union

ARITH_OPS = ("+", "-", "*", "/", "//", "mod", "^")
COMPARE_OPS = ("=", "/=", "<", "<=", ">", ">=")
LOGIC_OPS = ("and", "or", "implies", "iff")
BINARY_OPS = ARITH_OPS + COMPARE_OPS + LOGIC_OPS


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class RealLit:
    value: float


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Old:
    expr: "Expr"


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "not"
    expr: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class MinMax:
    op: str  # "min" or "max"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" or "exists"
    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class Slice:
    array: "Expr"
    lo: "Expr"
    hi: "Expr"


@dataclass(frozen=True)
class Index:
    array: "Expr"
    idx: "Expr"


@dataclass(frozen=True)
class Field:
    target: "Expr"
    name: str


@dataclass(frozen=True)
class FunApp:
    symbol: str
    args: Tuple["Expr", ...]


Expr = Union[IntLit, RealLit, BoolLit, Var, Old, Unary, Binary, MinMax, Quant,
             Slice, Index, Field, FunApp]

LEAVES = (IntLit, RealLit, BoolLit, Var)


def children(e: Expr) -> Tuple[Expr, ...]:
    """Direct subexpressions in left-to-right order."""
    if isinstance(e, LEAVES):
        return ()
    if isinstance(e, (Old, Unary)):
        return (e.expr,)
    if isinstance(e, (Binary, MinMax)):
        return (e.left, e.right)
    if isinstance(e, Quant):
        return (e.lo, e.hi, e.body)
    if isinstance(e, Slice):
        return (e.array, e.lo, e.hi)
    if isinstance(e, Index):
        return (e.array, e.idx)
    if isinstance(e, Field):
        return (e.target,)
    if isinstance(e, FunApp):
        return e.args
    raise TypeError(f"not an expression: {e!r}")


def rebuild(e: Expr, kids: Tuple[Expr, ...]) -> Expr:
    """Return a copy of `e` with its direct subexpressions replaced."""
    if isinstance(e, LEAVES):
        return e
    if isinstance(e, Old):
        return Old(kids[0])
    if isinstance(e, Unary):
        return Unary(e.op, kids[0])
    if isinstance(e, Binary):
        return Binary(e.op, kids[0], kids[1])
    if isinstance(e, MinMax):
        return MinMax(e.op, kids[0], kids[1])
    if isinstance(e, Quant):
        return Quant(e.kind, e.var, kids[0], kids[1], kids[2])
    if isinstance(e, Slice):
        return Slice(kids[0], kids[1], kids[2])
    if isinstance(e, Index):
        return Index(kids[0], kids[1])
    if isinstance(e, Field):
        return Field(kids[0], e.name)
    if isinstance(e, FunApp):
        return FunApp(e.symbol, tuple(kids))
    raise TypeError(f"not an expression: {e!r}")


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield e
    for c in children(e):
        yield from walk(c)


def size(e: Expr) -> int:
    return sum(1 for _ in walk(e))


def conjuncts(e: Expr) -> list:
    """Split a top-level conjunction into its parts."""
    if isinstance(e, Binary) and e.op == "and":
        return conjuncts(e.left) + conjuncts(e.right)
    return [e]


def conjoin(parts) -> Expr:
    parts = list(parts)
    if not parts:
        return BoolLit(True)
    out = parts[0]
    for p in parts[1:]:
        out = Binary("and", out, p)
    return out
