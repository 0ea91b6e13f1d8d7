"""Statements, annotated loops and routines."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Tuple

from .ast import Expr, Field, Index, Var, walk

ESSENTIAL = "essential"
BOUNDING = "bounding"
UNTAGGED = "untagged"
TAGS = (ESSENTIAL, BOUNDING, UNTAGGED)


@dataclass(frozen=True)
class Clause:
    expr: Expr
    tag: str = UNTAGGED
    origin: str = "gold"  # "gold" or "candidate:<id>"


@dataclass(frozen=True)
class Assign:
    target: Expr  # Var, Index or Field
    expr: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    els: Tuple["Stmt", ...] = ()


@dataclass(frozen=True)
class Swap:
    array: Expr
    i: Expr
    j: Expr


@dataclass(frozen=True)
class Create:
    """Allocate a fresh heap record whose `value` field is `value`."""
    target: Expr
    value: Expr


@dataclass(frozen=True)
class Loop:
    init: Tuple["Stmt", ...]
    invariant: Tuple[Clause, ...]
    exit: Expr
    variant: Optional[Expr]
    body: Tuple["Stmt", ...]
    label: str = ""
    line: int = 0


Stmt = object  # Assign | If | Swap | Create | Loop


@dataclass(frozen=True)
class Decl:
    name: str
    type: str


@dataclass(frozen=True)
class Routine:
    name: str
    params: Tuple[Decl, ...]
    results: Tuple[Decl, ...]  # () for procedures, (Result,) or named outputs
    require: Tuple[Clause, ...]
    locals: Tuple[Decl, ...]
    body: Tuple["Stmt", ...]
    ensure: Tuple[Clause, ...]
    source: str = field(default="", compare=False)

    @property
    def is_function(self) -> bool:
        return bool(self.results)

    def loops(self) -> list:
        return list(iter_loops(self.body))

    def loop(self, label: str) -> Loop:
        for lp in self.loops():
            if lp.label == label:
                return lp
        raise KeyError(label)

    def with_loop(self, label: str, new: Loop) -> "Routine":
        return replace(self, body=_replace_loop(self.body, label, new))


def iter_stmts(stmts) -> Iterator:
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from iter_stmts(s.then)
            yield from iter_stmts(s.els)
        elif isinstance(s, Loop):
            yield from iter_stmts(s.init)
            yield from iter_stmts(s.body)


def iter_loops(stmts) -> Iterator[Loop]:
    for s in iter_stmts(stmts):
        if isinstance(s, Loop):
            yield s


def _replace_loop(stmts, label, new):
    out = []
    for s in stmts:
        if isinstance(s, Loop):
            if s.label == label:
                s = new
            else:
                s = replace(s, init=_replace_loop(s.init, label, new),
                            body=_replace_loop(s.body, label, new))
        elif isinstance(s, If):
            s = replace(s, then=_replace_loop(s.then, label, new),
                        els=_replace_loop(s.els, label, new))
        out.append(s)
    return tuple(out)


def target_root(e: Expr) -> Optional[str]:
    """Variable whose value an assignment to `e` changes."""
    while isinstance(e, (Index, Field)):
        e = e.array if isinstance(e, Index) else e.target
    return e.name if isinstance(e, Var) else None


def assigned_vars(stmts) -> set:
    """Names possibly modified by executing `stmts` (heap writes count
    against the reference they go through)."""
    out = set()
    for s in iter_stmts(stmts):
        if isinstance(s, (Assign, Create)):
            root = target_root(s.target)
            if root:
                out.add(root)
            if isinstance(s.target, Field):
                out.add("<heap>")
        elif isinstance(s, Swap):
            root = target_root(s.array)
            if root:
                out.add(root)
    return out


def stmt_exprs(stmts) -> Iterator[Expr]:
    """Every expression occurring in executable statements."""
    for s in iter_stmts(stmts):
        if isinstance(s, (Assign, Create)):
            yield s.target
            yield s.value if isinstance(s, Create) else s.expr
        elif isinstance(s, If):
            yield s.cond
        elif isinstance(s, Swap):
            yield from (s.array, s.i, s.j)
        elif isinstance(s, Loop):
            yield s.exit


def vars_in(e: Expr) -> set:
    return {x.name for x in walk(e) if isinstance(x, Var)}
