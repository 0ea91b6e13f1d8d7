"""Substitution and occurrence utilities over expression trees."""

from __future__ import annotations

from typing import List, Optional, Tuple

from .ast import (Expr, Field, IntLit, Quant, RealLit, Var, children, rebuild)
from .parser import fresh_name, free_vars
from .program import Routine, assigned_vars, iter_loops

Path = Tuple[int, ...]

__all__ = ["substitute", "replace_expr", "occurrences", "replace_at",
           "free_constants", "free_vars", "rename_bound"]


def substitute(e: Expr, var: str, replacement: Expr) -> Expr:
    """Replace every free occurrence of `var`, renaming bound variables
    that would capture a free variable of `replacement`."""
    return _subst(e, var, replacement, free_vars(replacement))


def _subst(e: Expr, var: str, rep: Expr, rep_free: set) -> Expr:
    if isinstance(e, Var):
        return rep if e.name == var else e
    if var not in free_vars(e):
        return e
    if isinstance(e, Quant):
        lo = _subst(e.lo, var, rep, rep_free)
        hi = _subst(e.hi, var, rep, rep_free)
        if e.var == var:
            return Quant(e.kind, e.var, lo, hi, e.body)
        bv, body = e.var, e.body
        if bv in rep_free:
            bv = fresh_name(rep_free | free_vars(body) | {var}, bv)
            body = _subst(body, e.var, Var(bv), {bv})
        return Quant(e.kind, bv, lo, hi, _subst(body, var, rep, rep_free))
    return rebuild(e, tuple(_subst(c, var, rep, rep_free) for c in children(e)))


def rename_bound(e: Expr, old: str, new: str) -> Expr:
    """Rename bound variable `old` to `new` wherever it is bound."""
    if isinstance(e, Quant):
        lo, hi = rename_bound(e.lo, old, new), rename_bound(e.hi, old, new)
        body = rename_bound(e.body, old, new)
        if e.var == old:
            return Quant(e.kind, new, lo, hi, substitute(body, old, Var(new)))
        return Quant(e.kind, e.var, lo, hi, body)
    return rebuild(e, tuple(rename_bound(c, old, new) for c in children(e)))


def occurrences(e: Expr, target: Expr, path: Path = (), bound=frozenset()) -> List[Path]:
    """Paths to subtrees equal to `target` that do not mention any
    variable bound at that position."""
    out: List[Path] = []
    if e == target and not (free_vars(target) & bound):
        return [path]
    kids = children(e)
    for i, c in enumerate(kids):
        inner = bound
        if isinstance(e, Quant) and i == 2:
            inner = bound | {e.var}
        out += occurrences(c, target, path + (i,), inner)
    return out


def replace_at(e: Expr, path: Path, replacement: Expr) -> Expr:
    if not path:
        return replacement
    kids = list(children(e))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], replacement)
    return rebuild(e, tuple(kids))


def replace_expr(e: Expr, target: Expr, replacement: Expr) -> Expr:
    """Replace every free occurrence of the subtree `target`."""
    for p in sorted(occurrences(e, target), reverse=True):
        e = replace_at(e, p, replacement)
    return e


def free_constants(e: Expr, routine: Routine, loop_label: Optional[str] = None) -> List[Expr]:
    """Terms of `e` that no loop body modifies: unassigned variables,
    field accesses on them (such as ``a.upper``) and numeric literals.

    With `loop_label`, only that loop's body counts as modifying.
    """
    loops = routine.loops()
    if loop_label is not None:
        loops = [lp for lp in loops if lp.label == loop_label]
    changed = set()
    for lp in loops:
        changed |= assigned_vars(lp.body)
    changed.add("Result")
    for d in routine.results:
        changed.add(d.name)
    out: List[Expr] = []

    def visit(x: Expr, bound: frozenset) -> None:
        if isinstance(x, Var):
            if x.name not in bound and x.name not in changed:
                add(x)
            return
        if isinstance(x, Field) and _stable(x.target, bound, changed):
            add(x)
            visit(x.target, bound)
            return
        if isinstance(x, (IntLit, RealLit)):
            add(x)
            return
        for i, c in enumerate(children(x)):
            visit(c, bound | {x.var} if isinstance(x, Quant) and i == 2 else bound)

    def add(x: Expr) -> None:
        if x not in out:
            out.append(x)

    visit(e, frozenset())
    return out


def _stable(x: Expr, bound, changed) -> bool:
    if isinstance(x, Var):
        return x.name not in bound and x.name not in changed and x.name != "Void"
    if isinstance(x, Field):
        return _stable(x.target, bound, changed)
    return False
