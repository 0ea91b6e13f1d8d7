"""Three-valued evaluation of expressions.

`evaluate` returns a value or raises `Undefined`.  Checkers treat the
exception as the third truth value.  `and`, `or` and `implies` are
evaluated left to right and stop early, so a clause written first can
guard the definedness of the ones after it.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .ast import (Binary, BoolLit, Expr, Field, FunApp, Index, IntLit, MinMax,
                  Old, Quant, RealLit, Slice, Unary, Var)
from .errors import Undefined
from .theory import REGISTRY
from .values import EPS_REAL, VOID, Array, Ref, is_int, is_num, values_equal

MAX_EXPONENT = 4096
MAX_RANGE = 1_000_000
HEAP_FIELDS = ("value", "next", "left", "right")


@dataclass
class ExecState:
    env: Dict[str, Any] = field(default_factory=dict)
    heap: Dict[int, Dict[str, Any]] = field(default_factory=dict)
    snapshot: Optional["ExecState"] = None
    next_id: int = 1

    def new_node(self, value) -> Ref:
        r = Ref(self.next_id)
        self.next_id += 1
        self.heap[r.id] = {"value": value, "next": VOID, "left": VOID, "right": VOID}
        return r

    def take_snapshot(self) -> None:
        """Freeze the current arguments and heap for `old`."""
        self.snapshot = ExecState(copy.deepcopy(self.env), copy.deepcopy(self.heap))


def _num(v, op):
    if not is_num(v):
        raise Undefined(f"operator {op} needs numbers, got {v!r}")
    return v


def _int(v, op):
    if not is_int(v):
        raise Undefined(f"operator {op} needs integers, got {v!r}")
    return v


def _truth(v, op) -> bool:
    if type(v) is not bool:
        raise Undefined(f"operator {op} needs booleans, got {v!r}")
    return v


def _ordered(a, b, op):
    if is_num(a) and is_num(b):
        return a, b
    if isinstance(a, str) and isinstance(b, str):
        return a, b
    raise Undefined(f"cannot order {a!r} and {b!r}")


def compare(op: str, a, b) -> bool:
    if op == "=":
        return values_equal(a, b)
    if op == "/=":
        return not values_equal(a, b)
    a, b = _ordered(a, b, op)
    tol = EPS_REAL if (type(a) is float or type(b) is float) else 0
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b + tol
    if op == ">":
        return a > b
    if op == ">=":
        return a + tol >= b
    raise Undefined(f"unknown comparison {op}")


def arith(op: str, a, b):
    if op == "+":
        return _num(a, op) + _num(b, op)
    if op == "-":
        return _num(a, op) - _num(b, op)
    if op == "*":
        return _num(a, op) * _num(b, op)
    if op == "/":
        a, b = _num(a, op), _num(b, op)
        if b == 0:
            raise Undefined("division by zero")
        return a / b
    if op in ("//", "mod"):
        a, b = _int(a, op), _int(b, op)
        if a < 0 or b < 0:
            raise Undefined(f"{op} with a negative operand")
        if b == 0:
            raise Undefined("division by zero")
        return a // b if op == "//" else a % b
    if op == "^":
        a, b = _num(a, op), _int(b, op)
        if b < 0:
            raise Undefined("negative exponent")
        if b > MAX_EXPONENT and abs(a) > 1:
            raise Undefined("exponent too large")
        return a ** b
    raise Undefined(f"unknown operator {op}")


def evaluate(e: Expr, s: ExecState, bound: Optional[Dict[str, Any]] = None):
    bound = bound or {}
    return _eval(e, s, bound)


def _eval(e: Expr, s: ExecState, bound: Dict[str, Any]):
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, (RealLit, BoolLit)):
        return e.value
    if isinstance(e, Var):
        if e.name in bound:
            return bound[e.name]
        if e.name in s.env:
            return s.env[e.name]
        if e.name == "Void":
            return VOID
        raise Undefined(f"unbound variable {e.name}")
    if isinstance(e, Binary):
        op = e.op
        if op == "and":
            if not _truth(_eval(e.left, s, bound), op):
                return False
            return _truth(_eval(e.right, s, bound), op)
        if op == "or":
            if _truth(_eval(e.left, s, bound), op):
                return True
            return _truth(_eval(e.right, s, bound), op)
        if op == "implies":
            if not _truth(_eval(e.left, s, bound), op):
                return True
            return _truth(_eval(e.right, s, bound), op)
        a = _eval(e.left, s, bound)
        b = _eval(e.right, s, bound)
        if op == "iff":
            return _truth(a, op) == _truth(b, op)
        if op in ("=", "/=", "<", "<=", ">", ">="):
            return compare(op, a, b)
        return arith(op, a, b)
    if isinstance(e, Unary):
        v = _eval(e.expr, s, bound)
        if e.op == "not":
            return not _truth(v, "not")
        return -_num(v, "-")
    if isinstance(e, MinMax):
        a, b = _ordered(_eval(e.left, s, bound), _eval(e.right, s, bound), e.op)
        return max(a, b) if e.op == "max" else min(a, b)
    if isinstance(e, Index):
        arr = _eval(e.array, s, bound)
        idx = _eval(e.idx, s, bound)
        if isinstance(arr, Array):
            return arr.get(idx)
        if isinstance(arr, tuple):
            if not (is_int(idx) and 1 <= idx <= len(arr)):
                raise Undefined(f"sequence index {idx!r} out of range")
            return arr[idx - 1]
        raise Undefined(f"cannot index {arr!r}")
    if isinstance(e, Slice):
        arr = _eval(e.array, s, bound)
        if not isinstance(arr, Array):
            raise Undefined(f"cannot slice {arr!r}")
        return arr.slice(_eval(e.lo, s, bound), _eval(e.hi, s, bound))
    if isinstance(e, Field):
        return field_of(_eval(e.target, s, bound), e.name, s)
    if isinstance(e, Quant):
        lo = _int(_eval(e.lo, s, bound), "quantifier bound")
        hi = _int(_eval(e.hi, s, bound), "quantifier bound")
        if hi - lo >= MAX_RANGE:
            raise Undefined("quantifier range too large")
        inner = dict(bound)
        want = e.kind == "forall"
        for k in range(lo, hi + 1):
            inner[e.var] = k
            if _truth(_eval(e.body, s, inner), e.kind) != want:
                return not want
        return want
    if isinstance(e, Old):
        if s.snapshot is None:
            raise Undefined("old used without an entry snapshot")
        return _eval(e.expr, s.snapshot, bound)
    if isinstance(e, FunApp):
        sym = REGISTRY.get(e.symbol)
        if sym is None:
            raise Undefined(f"unknown function {e.symbol}")
        if len(e.args) not in sym.arities:
            raise Undefined(f"{e.symbol} takes {'/'.join(map(str, sym.arities))} "
                            f"arguments, got {len(e.args)}")
        args = [_eval(a, s, bound) for a in e.args]
        try:
            return sym.fn(args, s.heap)
        except Undefined:
            raise
        except (TypeError, ValueError, KeyError, IndexError, AttributeError) as exc:
            raise Undefined(f"{e.symbol}: {exc}") from None
    raise TypeError(f"not an expression: {e!r}")


def field_of(v, name: str, s: ExecState):
    if isinstance(v, Array):
        if name == "lower":
            return v.lower
        if name == "upper":
            return v.upper
        if name == "count":
            return v.count
    elif isinstance(v, tuple) and name == "count":
        return len(v)
    elif isinstance(v, Ref):
        if v.is_void:
            raise Undefined(f"field {name} of Void")
        rec = s.heap.get(v.id)
        if rec is None:
            raise Undefined(f"dangling reference #{v.id}")
        if name in rec:
            return rec[name]
    raise Undefined(f"no field {name} on {v!r}")


def holds(e: Expr, s: ExecState, bound=None) -> bool:
    """Evaluate an assertion; non-boolean results are undefined."""
    return _truth(evaluate(e, s, bound), "assertion")
