"""Recursive-descent parser for expressions and annotated routines.

Expressions use a fixed precedence table (loosest first)::

    quantifier body < iff < implies < or < and < not < comparisons
      < + - ++ < * / // mod < unary - < ^ < old < postfix

Comparisons chain (``0 <= r < m`` means ``0 <= r and r < m``).  A
comparison with a slice operand, as in ``a[1..i] <= pivot``, is sugar
for a quantifier over the slice's index range.
"""

from __future__ import annotations

from typing import List, Optional

from .ast import (COMPARE_OPS, Binary, BoolLit, Expr, Field, FunApp, Index,
                  IntLit, MinMax, Old, Quant, RealLit, Slice, Unary, Var)
from .errors import ParseError
from .lexer import Token, tokenize
from .program import (TAGS, UNTAGGED, Assign, Clause, Create, Decl, If, Loop,
                      Routine, Swap)

ORDER_OPS = ("<", "<=", ">", ">=")


def free_vars(e: Expr) -> set:
    """Free variable names of `e` (quantified names excluded)."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Quant):
        return free_vars(e.lo) | free_vars(e.hi) | (free_vars(e.body) - {e.var})
    from .ast import children
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out


def fresh_name(avoid, base: str = "k") -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def _slice_compare(left: Expr, op: str, right: Expr) -> Expr:
    ls, rs = isinstance(left, Slice), isinstance(right, Slice)
    if not (ls or rs) or (ls and rs and op not in ORDER_OPS):
        return Binary(op, left, right)
    avoid = free_vars(left) | free_vars(right)
    if ls and rs:
        k = fresh_name(avoid)
        k2 = fresh_name(avoid | {k})
        inner = Quant("forall", k2, right.lo, right.hi,
                      Binary(op, Index(left.array, Var(k)), Index(right.array, Var(k2))))
        return Quant("forall", k, left.lo, left.hi, inner)
    k = fresh_name(avoid)
    if ls:
        return Quant("forall", k, left.lo, left.hi,
                     Binary(op, Index(left.array, Var(k)), right))
    return Quant("forall", k, right.lo, right.hi,
                 Binary(op, left, Index(right.array, Var(k))))


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: List[Token] = tokenize(text)
        self.pos = 0
        self.loop_count = 0

    # -- token helpers ------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("OP", "KW") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.pos += 1
        return t

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise ParseError(f"{msg} (found {found})", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "IDENT":
            self.error("expected identifier")
        return self.advance().text

    def skip_nl(self) -> None:
        while self.tok.kind == "NL" or self.at(";"):
            self.advance()

    # -- expressions --------------------------------------------------

    def expr(self) -> Expr:
        return self.iff()

    def iff(self) -> Expr:
        e = self.implies()
        while self.at("iff"):
            self.advance()
            e = Binary("iff", e, self.implies())
        return e

    def implies(self) -> Expr:
        e = self.or_()
        if self.at("implies"):
            self.advance()
            return Binary("implies", e, self.implies())
        return e

    def or_(self) -> Expr:
        e = self.and_()
        while self.at("or"):
            self.advance()
            e = Binary("or", e, self.and_())
        return e

    def and_(self) -> Expr:
        e = self.not_()
        while self.at("and"):
            self.advance()
            e = Binary("and", e, self.not_())
        return e

    def not_(self) -> Expr:
        if self.at("not"):
            self.advance()
            return Unary("not", self.not_())
        return self.comparison()

    def comparison(self) -> Expr:
        operands = [self.additive()]
        ops = []
        while self.at(*COMPARE_OPS):
            ops.append(self.advance().text)
            operands.append(self.additive())
        if not ops:
            return operands[0]
        parts = [_slice_compare(operands[i], op, operands[i + 1])
                 for i, op in enumerate(ops)]
        e = parts[0]
        for p in parts[1:]:
            e = Binary("and", e, p)
        return e

    def additive(self) -> Expr:
        e = self.multiplicative()
        while self.at("+", "-", "++"):
            op = self.advance().text
            r = self.multiplicative()
            e = FunApp("concat", (e, r)) if op == "++" else Binary(op, e, r)
        return e

    def multiplicative(self) -> Expr:
        e = self.unary()
        while self.at("*", "/", "//", "mod"):
            op = self.advance().text
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Unary("-", self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.old()
        if self.at("^"):
            self.advance()
            return Binary("^", e, self.unary())
        return e

    def old(self) -> Expr:
        if self.at("old"):
            self.advance()
            return Old(self.old())
        return self.postfix()

    def postfix(self, e: Optional[Expr] = None) -> Expr:
        if e is None:
            e = self.primary()
        while True:
            if self.at("["):
                self.advance()
                first = self.expr()
                if self.at(".."):
                    self.advance()
                    hi = self.expr()
                    self.expect("]")
                    e = Slice(e, first, hi)
                    continue
                e = Index(e, first)
                while self.at(","):
                    self.advance()
                    e = Index(e, self.expr())
                self.expect("]")
            elif self.at(".") and self.peek().kind == "IDENT":
                if self.peek().text == "swap" and self.peek(2).text == "(":
                    return e
                self.advance()
                e = Field(e, self.advance().text)
            else:
                return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return IntLit(int(t.text))
        if t.kind == "REAL":
            self.advance()
            return RealLit(float(t.text))
        if t.kind == "KW" and t.text in ("true", "True", "false", "False"):
            self.advance()
            return BoolLit(t.text in ("true", "True"))
        if t.kind == "KW" and t.text in ("forall", "exists"):
            return self.quantifier()
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "IDENT":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.advance()
                        args.append(self.expr())
                self.expect(")")
                return self.funapp(t, args)
            return Var(t.text)
        self.error("expected an expression")

    def funapp(self, t: Token, args: list) -> Expr:
        if t.text in ("min", "max") and len(args) >= 2:
            e = MinMax(t.text, args[0], args[1])
            for a in args[2:]:
                e = MinMax(t.text, e, a)
            return e
        return FunApp(t.text, tuple(args))

    def quantifier(self) -> Expr:
        kind = self.advance().text
        ranges = []
        while True:
            var = self.ident()
            self.expect("in")
            self.expect("[")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            self.expect("]")
            ranges.append((var, lo, hi))
            if not self.at(","):
                break
            self.advance()
        self.expect(":")
        body = self.expr()
        for var, lo, hi in reversed(ranges):
            body = Quant(kind, var, lo, hi, body)
        return body

    # -- clauses and statements ----------------------------------------

    def clauses(self, stop) -> tuple:
        out = []
        self.skip_nl()
        while not self.at(*stop) and self.tok.kind != "EOF":
            tag = UNTAGGED
            if (self.tok.kind == "IDENT" and self.tok.text in TAGS
                    and self.peek().text == ":"):
                tag = self.advance().text
                self.advance()
            out.append(Clause(self.expr(), tag))
            self.end_of_item(stop)
        return tuple(out)

    def end_of_item(self, stop) -> None:
        if self.tok.kind == "NL" or self.at(";"):
            self.skip_nl()
        elif not self.at(*stop):
            self.error("expected end of line")

    def stmts(self, stop) -> tuple:
        out = []
        self.skip_nl()
        while not self.at(*stop):
            if self.tok.kind == "EOF":
                self.error("unexpected end of input")
            out.append(self.stmt())
            self.end_of_item(stop)
        return tuple(out)

    def stmt(self):
        t = self.tok
        if self.at("if"):
            return self.if_stmt()
        if self.at("from"):
            return self.loop_stmt()
        if self.at("across"):
            return self.across_stmt()
        if t.kind != "IDENT":
            self.error("expected a statement")
        target = self.postfix()
        if self.at(".") and self.peek().text == "swap":
            self.advance()
            self.advance()
            self.expect("(")
            i = self.expr()
            self.expect(",")
            j = self.expr()
            self.expect(")")
            return Swap(target, i, j)
        if not isinstance(target, (Var, Index, Field)):
            self.error("invalid assignment target", t)
        self.expect(":=")
        if self.at("create"):
            self.advance()
            self.expect("(")
            v = self.expr()
            self.expect(")")
            return Create(target, v)
        return Assign(target, self.expr())

    def if_stmt(self):
        self.advance()
        cond = self.expr()
        self.skip_nl()
        self.expect("then")
        then = self.stmts(("elseif", "else", "end"))
        if self.at("elseif"):
            els = (self.if_stmt(),)
            return If(cond, then, els)
        els = ()
        if self.at("else"):
            self.advance()
            els = self.stmts(("end",))
        self.expect("end")
        return If(cond, then, els)

    def new_label(self) -> str:
        self.loop_count += 1
        return f"loop{self.loop_count}"

    def optional_variant(self, variant):
        if self.at("variant"):
            if variant is not None:
                self.error("duplicate variant")
            self.advance()
            variant = self.expr()
            self.skip_nl()
        return variant

    def loop_stmt(self):
        start = self.advance()
        label = self.new_label()
        init = self.stmts(("invariant", "until", "variant"))
        variant = None
        inv = ()
        if self.at("invariant"):
            self.advance()
            inv = self.clauses(("until", "variant"))
        variant = self.optional_variant(variant)
        self.expect("until")
        self.skip_nl()
        exit_ = self.expr()
        self.skip_nl()
        variant = self.optional_variant(variant)
        self.expect("loop")
        body = self.stmts(("variant", "end"))
        variant = self.optional_variant(variant)
        self.expect("end")
        return Loop(init, inv, exit_, variant, body, label, start.line)

    def across_stmt(self):
        start = self.advance()
        label = self.new_label()
        self.expect("[")
        lo = self.expr()
        self.expect("..")
        hi = self.expr()
        self.expect("]")
        inv = ()
        self.skip_nl()
        if self.at("invariant"):
            self.advance()
            inv = self.clauses(("as",))
        self.expect("as")
        k = self.ident()
        self.skip_nl()
        if self.at("invariant"):
            self.advance()
            inv = inv + self.clauses(("loop", "variant"))
        variant = self.optional_variant(None)
        self.expect("loop")
        body = self.stmts(("variant", "end"))
        variant = self.optional_variant(variant)
        self.expect("end")
        kv = Var(k)
        bound = Binary("+", hi, IntLit(1))
        if variant is None:
            variant = Binary("-", bound, kv)
        step = Assign(kv, Binary("+", kv, IntLit(1)))
        return Loop((Assign(kv, lo),), inv, Binary("=", kv, bound), variant,
                    body + (step,), label, start.line)

    # -- routines -------------------------------------------------------

    def type_(self) -> str:
        name = self.ident()
        if self.at("["):
            self.advance()
            parts = [self.type_()]
            while self.at(","):
                self.advance()
                parts.append(self.type_())
            self.expect("]")
            return f"{name} [{', '.join(parts)}]"
        return name

    def decl_group(self) -> list:
        names = [self.ident()]
        while self.at(","):
            self.advance()
            names.append(self.ident())
        self.expect(":")
        ty = self.type_()
        return [Decl(n, ty) for n in names]

    def decls(self, close: str) -> list:
        out = self.decl_group()
        while self.at(";"):
            self.advance()
            out += self.decl_group()
        self.expect(close)
        return out

    def routine(self, alone: bool = True) -> Routine:
        self.skip_nl()
        self.loop_count = 0
        first = self.tok
        name = self.ident()
        params = []
        self.expect("(")
        if not self.at(")"):
            params = self.decls(")")
        else:
            self.advance()
        results = []
        if self.at(":"):
            self.advance()
            if self.at("("):
                self.advance()
                results = self.decls(")")
            else:
                results = [Decl("Result", self.type_())]
        self.skip_nl()
        require = ()
        if self.at("require"):
            self.advance()
            require = self.clauses(("local", "do"))
        local = []
        if self.at("local"):
            self.advance()
            self.skip_nl()
            while not self.at("do"):
                local += self.decl_group()
                self.end_of_item(("do",))
        self.expect("do")
        body = self.stmts(("ensure", "end"))
        ensure = ()
        if self.at("ensure"):
            self.advance()
            ensure = self.clauses(("end",))
        last = self.expect("end")
        self.skip_nl()
        if alone and self.tok.kind != "EOF":
            self.error("trailing input after routine")
        source = "\n".join(self.text.splitlines()[first.line - 1:last.line]) + "\n"
        return Routine(name, tuple(params), tuple(results), require,
                       tuple(local), body, ensure, self.text if alone else source)


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    p.skip_nl()
    e = p.expr()
    p.skip_nl()
    if p.tok.kind != "EOF":
        p.error("unexpected trailing input")
    return e


def parse_routine(text: str) -> Routine:
    return Parser(text).routine()


def parse_routines(text: str) -> List[Routine]:
    """Parse a file holding one or more routines."""
    p = Parser(text)
    out = []
    p.skip_nl()
    while p.tok.kind != "EOF":
        out.append(p.routine(alone=False))
        p.skip_nl()
    if not out:
        raise ParseError("no routine found", 1, 1)
    return out


def parse_clause(text: str) -> Clause:
    p = Parser(text)
    cs = p.clauses(())
    if len(cs) != 1:
        raise ParseError("expected exactly one clause", 1, 1)
    return cs[0]
