"""Canonical pretty-printer.

Output uses single spaces and the fewest parentheses the precedence
table allows, so ``parse(show(e)) == e`` for every tree the parser can
produce.
"""

from __future__ import annotations

from .ast import (Binary, BoolLit, Expr, Field, FunApp, Index, IntLit, MinMax,
                  Old, Quant, RealLit, Slice, Unary, Var)
from .program import (Assign, Clause, Create, If, Loop, Routine, Swap, UNTAGGED)

QUANT, IFF, IMPLIES, OR, AND, NOT, CMP, ADD, MUL, NEG, POW, OLD, POSTFIX = range(13)

BINARY_PREC = {
    "iff": IFF, "implies": IMPLIES, "or": OR, "and": AND,
    "=": CMP, "/=": CMP, "<": CMP, "<=": CMP, ">": CMP, ">=": CMP,
    "+": ADD, "-": ADD, "*": MUL, "/": MUL, "//": MUL, "mod": MUL, "^": POW,
}


def prec(e: Expr) -> int:
    if isinstance(e, Quant):
        return QUANT
    if isinstance(e, Binary):
        return BINARY_PREC[e.op]
    if isinstance(e, Unary):
        return NOT if e.op == "not" else NEG
    if isinstance(e, Old):
        return OLD
    if isinstance(e, IntLit) and e.value < 0:
        return NEG
    if isinstance(e, RealLit) and e.value < 0:
        return NEG
    return POSTFIX


def _wrap(e: Expr, ok: bool) -> str:
    s = show(e)
    return s if ok else f"({s})"


def _real(x: float) -> str:
    s = repr(float(x))
    if s in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print real {s}")
    return s


def show(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, RealLit):
        return _real(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Old):
        return "old " + _wrap(e.expr, prec(e.expr) >= OLD)
    if isinstance(e, Unary):
        if e.op == "not":
            return "not " + _wrap(e.expr, prec(e.expr) >= NOT)
        return "-" + _wrap(e.expr, prec(e.expr) >= POW)
    if isinstance(e, Binary):
        p = BINARY_PREC[e.op]
        lp, rp = prec(e.left), prec(e.right)
        if p == CMP:
            lok, rok = lp > CMP, rp > CMP
        elif e.op in ("implies", "^"):
            lok, rok = lp > p, rp >= p
        else:
            lok, rok = lp >= p, rp > p
        # Negation in operand position always gets parentheses.
        if p != POW:
            lok = lok and (lp != NEG)
            rok = rok and (rp != NEG)
        else:
            lok = lok and lp != NEG
        return f"{_wrap(e.left, lok)} {e.op} {_wrap(e.right, rok)}"
    if isinstance(e, MinMax):
        return f"{e.op}({show(e.left)}, {show(e.right)})"
    if isinstance(e, Quant):
        return f"{e.kind} {e.var} in [{show(e.lo)}..{show(e.hi)}]: {show(e.body)}"
    if isinstance(e, Slice):
        return f"{_wrap(e.array, prec(e.array) == POSTFIX)}[{show(e.lo)}..{show(e.hi)}]"
    if isinstance(e, Index):
        return f"{_wrap(e.array, prec(e.array) == POSTFIX)}[{show(e.idx)}]"
    if isinstance(e, Field):
        return f"{_wrap(e.target, prec(e.target) == POSTFIX)}.{e.name}"
    if isinstance(e, FunApp):
        return f"{e.symbol}({', '.join(show(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def show_clause(c: Clause) -> str:
    s = show(c.expr)
    return s if c.tag == UNTAGGED else f"{c.tag}: {s}"


def _block(stmts, indent: int) -> list:
    out = []
    for s in stmts:
        out += show_stmt(s, indent)
    return out


def show_stmt(s, indent: int = 0) -> list:
    pad = "  " * indent
    if isinstance(s, Assign):
        return [f"{pad}{show(s.target)} := {show(s.expr)}"]
    if isinstance(s, Create):
        return [f"{pad}{show(s.target)} := create({show(s.value)})"]
    if isinstance(s, Swap):
        return [f"{pad}{show(s.array)}.swap({show(s.i)}, {show(s.j)})"]
    if isinstance(s, If):
        out = [f"{pad}if {show(s.cond)} then"] + _block(s.then, indent + 1)
        if s.els:
            out.append(f"{pad}else")
            out += _block(s.els, indent + 1)
        return out + [f"{pad}end"]
    if isinstance(s, Loop):
        out = [f"{pad}from"] + _block(s.init, indent + 1)
        if s.invariant:
            out.append(f"{pad}invariant")
            out += [f"{pad}  {show_clause(c)}" for c in s.invariant]
        out.append(f"{pad}until {show(s.exit)}")
        out.append(f"{pad}loop")
        out += _block(s.body, indent + 1)
        if s.variant is not None:
            out.append(f"{pad}variant {show(s.variant)}")
        return out + [f"{pad}end"]
    raise TypeError(f"not a statement: {s!r}")


def _decls(ds) -> str:
    return "; ".join(f"{d.name}: {d.type}" for d in ds)


def show_routine(r: Routine) -> str:
    head = f"{r.name} ({_decls(r.params)})"
    if len(r.results) == 1 and r.results[0].name == "Result":
        head += f": {r.results[0].type}"
    elif r.results:
        head += f": ({_decls(r.results)})"
    out = [head]
    if r.require:
        out.append("  require")
        out += [f"    {show_clause(c)}" for c in r.require]
    if r.locals:
        out.append("  local")
        out += [f"    {d.name}: {d.type}" for d in r.locals]
    out.append("  do")
    out += _block(r.body, 2)
    if r.ensure:
        out.append("  ensure")
        out += [f"    {show_clause(c)}" for c in r.ensure]
    out.append("  end")
    return "\n".join(out) + "\n"
