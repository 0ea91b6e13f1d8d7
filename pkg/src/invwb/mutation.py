"""Postcondition mutation: candidate invariant generation.

Five heuristics turn postcondition clauses into candidate loop
invariants:

* constant relaxation replaces a term the loop never changes by a fresh
  variable (``Result = max(a[a.lower..a.upper])`` becomes
  ``Result = max(a[a.lower..j])``);
* uncoupling replaces some occurrences of a variable by a fresh one,
  or first duplicates one side of an equation;
* term dropping removes a conjunct;
* aging replaces a loop variable by its value one step earlier;
* backward reasoning pushes the postcondition back through the
  statements that follow the loop.

A small registry of identities (``x = gcd(x, x)``, ``t = t * 1^1`` and
so on) may be applied once per derivation to expose an occurrence for
the heuristics to work on; identities do not count toward the budget.
Every candidate records its derivation so it can be replayed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ast import (Binary, BoolLit, Expr, Field, FunApp, Index, IntLit, MinMax,
                  Old, Quant, RealLit, Slice, Unary, Var, children, conjoin,
                  conjuncts, rebuild, size, walk)
from .errors import InvwbError
from .parser import free_vars, fresh_name, parse_expr
from .printer import show
from .program import (Assign, If, Loop, Routine, assigned_vars, iter_stmts,
                      BOUNDING, ESSENTIAL)
from .subst import free_constants, occurrences, replace_at, substitute

FRESH_ORDER = ("i", "j", "x", "y")
DEFAULT_CAP = 4000
ARRAY_FUNS = {"max", "min", "contains", "sorted", "gap_sorted", "perm", "inversions",
              "has_base", "encoded_value"}
ORDER = ("<", "<=", ">", ">=")


class MutationError(InvwbError):
    pass


@dataclass(frozen=True)
class Step:
    heuristic: str
    params: Tuple[Tuple[str, str], ...] = ()

    def param(self, key: str) -> Optional[str]:
        for k, v in self.params:
            if k == key:
                return v
        return None

    def to_json(self) -> dict:
        return {"heuristic": self.heuristic, "params": dict(self.params)}


@dataclass(frozen=True)
class Candidate:
    clause: Expr
    derivation: Tuple[Step, ...]
    source: int  # index of the postcondition clause it came from
    exit: Optional[Expr] = None
    classification: str = ESSENTIAL
    fresh: Tuple[str, ...] = ()

    @property
    def text(self) -> str:
        return show(self.clause)

    @property
    def depth(self) -> int:
        return sum(1 for s in self.derivation if s.heuristic in HEURISTICS)

    def to_json(self) -> dict:
        return {
            "clause": self.text,
            "derivation": [s.to_json() for s in self.derivation],
            "exit": show(self.exit) if self.exit is not None else None,
            "classification": self.classification,
            "fresh": list(self.fresh),
        }


HEURISTICS = ("relax", "uncouple", "duplicate", "drop", "age", "backward")


# ---------------------------------------------------------------------------
# Helpers

def path_text(p) -> str:
    return ".".join(map(str, p)) if p else "root"


def parse_path(t: str) -> tuple:
    return () if t == "root" else tuple(int(x) for x in t.split("."))


def names_in(e: Expr) -> set:
    out = set()
    for x in walk(e):
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, Quant):
            out.add(x.var)
    return out


def routine_names(r: Routine) -> set:
    return {d.name for d in r.params + r.results + r.locals} | {"Result", "Void"}


def pick_fresh(avoid: set) -> str:
    for n in FRESH_ORDER:
        if n not in avoid:
            return n
    k = 1
    while f"v{k}" in avoid:
        k += 1
    return f"v{k}"


def var_paths(e: Expr, name: str, path=(), bound=frozenset()) -> list:
    if isinstance(e, Var):
        return [path] if e.name == name and name not in bound else []
    out = []
    for i, c in enumerate(children(e)):
        inner = bound | {e.var} if isinstance(e, Quant) and i == 2 else bound
        out += var_paths(c, name, path + (i,), inner)
    return out


def alpha_normalize(e: Expr, rename: Optional[Dict[str, str]] = None) -> Expr:
    """Rename bound variables by nesting depth (and free ones per `rename`)."""

    def go(x: Expr, env: Dict[str, str], depth: int) -> Expr:
        if isinstance(x, Var):
            return Var(env.get(x.name, x.name))
        if isinstance(x, Quant):
            new = f"_b{depth}"
            inner = dict(env)
            inner[x.var] = new
            return Quant(x.kind, new, go(x.lo, env, depth), go(x.hi, env, depth),
                         go(x.body, inner, depth + 1))
        return rebuild(x, tuple(go(c, env, depth) for c in children(x)))

    return go(e, dict(rename or {}), 0)


SYMMETRIC = ("=", "/=", "iff")


def _sorted_sides(e: Expr) -> Expr:
    e = rebuild(e, tuple(_sorted_sides(c) for c in children(e)))
    if isinstance(e, Binary) and e.op in SYMMETRIC and show(e.right) < show(e.left):
        return Binary(e.op, e.right, e.left)
    return e


def canonical_key(e: Expr, fresh: Sequence[str] = ()) -> str:
    """Text identifying `e` up to bound- and fresh-variable renaming and
    the order of the sides of symmetric operators."""
    order = []
    for x in walk(e):
        if isinstance(x, Var) and x.name in fresh and x.name not in order:
            order.append(x.name)
    rename = {n: f"_f{k}" for k, n in enumerate(order)}
    return show(_sorted_sides(alpha_normalize(e, rename)))


def is_bounding(e: Expr) -> bool:
    """Pure range constraints: conjunctions of order comparisons between
    linear terms over variables, fields and literals."""
    parts = conjuncts(e)
    return all(isinstance(p, Binary) and p.op in ORDER and _linear(p.left)
               and _linear(p.right) for p in parts)


def _linear(e: Expr) -> bool:
    if isinstance(e, (IntLit, RealLit, Var)):
        return True
    if isinstance(e, Field):
        return _linear(e.target) if isinstance(e.target, (Var, Field)) else False
    if isinstance(e, Binary) and e.op in ("+", "-"):
        return _linear(e.left) and _linear(e.right)
    if isinstance(e, Binary) and e.op == "*":
        return (isinstance(e.left, IntLit) or isinstance(e.right, IntLit)) and \
            _linear(e.left) and _linear(e.right)
    if isinstance(e, Unary) and e.op == "-":
        return _linear(e.expr)
    return False


def classify(e: Expr) -> str:
    return BOUNDING if is_bounding(e) else ESSENTIAL


def range_clause(lo: Expr, v: Expr, hi: Expr) -> Expr:
    return Binary("and", Binary("<=", lo, v), Binary("<=", v, hi))


# ---------------------------------------------------------------------------
# Identity registry used before a heuristic step.

def _eq_sides(e: Expr) -> list:
    """Paths of the two sides of a top-level equation."""
    if isinstance(e, Binary) and e.op in ("=", "iff"):
        return [(0,), (1,)]
    return []


def _at(e: Expr, path) -> Expr:
    for i in path:
        e = children(e)[i]
    return e


def _lower_of(array: Expr, routine: Optional[Routine]) -> Expr:
    """Literal lower bound stated by the precondition, else `a.lower`."""
    want = Field(array, "lower")
    if routine is not None:
        for c in routine.require:
            for p in conjuncts(c.expr):
                if isinstance(p, Binary) and p.op == "=":
                    if p.left == want and isinstance(p.right, IntLit):
                        return p.right
                    if p.right == want and isinstance(p.left, IntLit):
                        return p.left
    return want


def identity_rewrites(e: Expr, routine: Optional[Routine]) -> List[Tuple[str, tuple, Expr]]:
    """All single applications of a registered identity: (name, path, result)."""
    out = []
    for p in _eq_sides(e):
        side = _at(e, p)
        if isinstance(side, Var):
            t = side
            for name, new in (("gcd_idem", FunApp("gcd", (t, t))),
                              ("gcd_zero", FunApp("gcd", (t, IntLit(0)))),
                              ("times_one", Binary("*", t, IntLit(1))),
                              ("times_power_one",
                               Binary("*", t, Binary("^", IntLit(1), IntLit(1))))):
                out.append((name, p, replace_at(e, p, new)))
        if isinstance(side, Index):
            new = FunApp("max", (Slice(side.array, side.idx, side.idx),))
            out.append(("singleton_max", p, replace_at(e, p, new)))
        if isinstance(side, FunApp) and side.symbol == "seq":
            empty = FunApp("rev", (FunApp("seq", (Var("Void"),)),))
            out.append(("empty_prefix", p, replace_at(e, p, FunApp("concat", (empty, side)))))
    for p in _array_args(e):
        a = _at(e, p)
        new = Slice(a, _lower_of(a, routine), Field(a, "upper"))
        out.append(("full_slice", p, replace_at(e, p, new)))
    return out


def _array_args(e: Expr, path=(), bound=frozenset()) -> list:
    out = []
    if isinstance(e, FunApp) and e.symbol in ARRAY_FUNS:
        for i, a in enumerate(e.args):
            if isinstance(a, Var) and a.name not in bound:
                out.append(path + (i,))
    for i, c in enumerate(children(e)):
        inner = bound | {e.var} if isinstance(e, Quant) and i == 2 else bound
        out += _array_args(c, path + (i,), inner)
    return out


def apply_identity(e: Expr, name: str, path: tuple, routine: Optional[Routine]) -> Expr:
    for n, p, new in identity_rewrites(e, routine):
        if n == name and p == path:
            return new
    raise MutationError(f"identity {name} does not apply at {path_text(path)}")


# ---------------------------------------------------------------------------
# The five heuristics, in primitive form: each returns
# (clause, step, exit contribution, fresh names introduced) tuples.

def _relax(e: Expr, target: Expr, fresh: str):
    paths = occurrences(e, target)
    if not paths:
        return []
    options = [("all", paths)]
    if len(paths) > 1:
        options += [(path_text(p), [p]) for p in paths]
    out = []
    v = Var(fresh)
    for occ, ps in options:
        new = e
        for p in sorted(ps, reverse=True):
            new = replace_at(new, p, v)
        step = Step("relax", (("target", show(target)), ("occurrence", occ), ("fresh", fresh)))
        out.append((new, step, Binary("=", v, target), (fresh,)))
        # Companion range clauses when the target is a slice bound.
        for p in ps:
            parent = _at(e, p[:-1]) if p else None
            if isinstance(parent, Slice) and p[-1] in (1, 2):
                lo_p = _at(new, p[:-1] + (1,))
                hi_p = _at(new, p[:-1] + (2,))
                if p[-1] == 2:
                    comps = [range_clause(lo_p, v, target),
                             range_clause(Binary("-", lo_p, IntLit(1)), v, target)]
                else:
                    comps = [range_clause(target, v, hi_p),
                             range_clause(target, v, Binary("+", hi_p, IntLit(1)))]
                for k, comp in enumerate(comps):
                    cstep = Step("relax", step.params + (("companion", f"{path_text(p)}/{k}"),))
                    out.append((comp, cstep, Binary("=", v, target), (fresh,)))
    return out


def _uncouple(e: Expr, var: str, fresh: str):
    paths = var_paths(e, var)
    if len(paths) < 2:
        return []
    v = Var(fresh)
    out = []
    for occ, ps in [("all", paths)] + [(path_text(p), [p]) for p in paths]:
        new = e
        for p in ps:
            new = replace_at(new, p, v)
        step = Step("uncouple", (("var", var), ("occurrence", occ), ("fresh", fresh)))
        out.append((new, step, Binary("=", Var(var), v), (fresh,)))
    return out


def _duplicate(e: Expr):
    if isinstance(e, Binary) and e.op in ("=", "iff") and e.left != e.right:
        return [(Binary(e.op, e.right, e.right), Step("duplicate", (("side", "right"),)), None, ())]
    return []


def _drop(e: Expr):
    out = []
    parts = conjuncts(e)
    if len(parts) > 1:
        for k, p in enumerate(parts):
            rest = conjoin(parts[:k] + parts[k + 1:])
            ex = p if isinstance(p, Binary) and p.op in ORDER + ("=", "/=") else None
            out.append((rest, Step("drop", (("conjunct", str(k)),)), ex, ()))
    elif isinstance(e, Binary) and e.op == "implies":
        cons = conjuncts(e.right)
        if len(cons) > 1:
            for k in range(len(cons)):
                rest = Binary("implies", e.left, conjoin(cons[:k] + cons[k + 1:]))
                out.append((rest, Step("drop", (("consequent", str(k)),)), None, ()))
    return out


def _age(e: Expr, var: str, offset: Expr):
    if not var_paths(e, var):
        return []
    new = substitute(e, var, Binary("-", Var(var), offset)) if offset != IntLit(0) else e
    return [(new, Step("age", (("var", var), ("offset", show(offset)))), None, ())]


# ---------------------------------------------------------------------------
# Public single-step operations

def _single(e: Expr, results, source: int = 0) -> List[Candidate]:
    return [Candidate(c, (step,), source, ex, classify(c), fr) for c, step, ex, fr in results]


def relax_constant(clause: Expr, target: Expr, routine: Routine,
                   fresh: Optional[str] = None, loop_label: Optional[str] = None) -> List[Candidate]:
    """Replace the loop-invariant term `target` by a fresh variable."""
    if target not in free_constants(clause, routine, loop_label):
        raise MutationError(f"{show(target)} is not constant in the loop")
    fresh = fresh or pick_fresh(routine_names(routine) | names_in(clause))
    return _single(clause, _relax(clause, target, fresh))


def uncouple(clause: Expr, var: str, rewrite: Optional[str] = None,
             routine: Optional[Routine] = None, fresh: Optional[str] = None) -> List[Candidate]:
    """Replace some occurrences of `var` by a fresh variable, optionally
    after applying the identity named `rewrite` (or "duplicate")."""
    pre: List[Tuple[Expr, Tuple[Step, ...]]] = [(clause, ())]
    if rewrite == "duplicate":
        pre = [(c, (s,)) for c, s, _, _ in _duplicate(clause)]
    elif rewrite is not None:
        pre = [(new, (Step("rewrite", (("identity", n), ("path", path_text(p)))),))
               for n, p, new in identity_rewrites(clause, routine) if n == rewrite]
    out = []
    avoid = names_in(clause) | (routine_names(routine) if routine else set())
    for c, steps in pre:
        name = fresh or pick_fresh(avoid | names_in(c))
        for new, step, ex, fr in _uncouple(c, var, name):
            out.append(Candidate(new, steps + (step,), 0, ex, classify(new), fr))
    return out


def drop_term(clause: Expr) -> List[Candidate]:
    return _single(clause, _drop(clause))


def age(clause: Expr, var: str, offset: Expr = IntLit(1)) -> Candidate:
    res = _age(clause, var, offset)
    if not res:
        return Candidate(clause, (Step("age", (("var", var), ("offset", show(offset)))),),
                         0, None, classify(clause))
    return _single(clause, res)[0]


def backward_substitute(post: Expr, trailing: Sequence) -> Expr:
    """Weakest precondition of `post` through assignments and ifs.

    `old` subterms refer to the routine's entry state and are left
    untouched.
    """
    e = post
    for st in reversed(list(trailing)):
        e = _wp(st, e)
    return e


def _wp(st, e: Expr) -> Expr:
    if isinstance(st, Assign):
        if not isinstance(st.target, Var):
            raise MutationError(f"cannot reason backward through assignment to "
                                f"{show(st.target)}")
        return _subst_outside_old(e, st.target.name, st.expr)
    if isinstance(st, If):
        t = backward_substitute(e, st.then)
        f = backward_substitute(e, st.els)
        if t == e and f == e:
            return e
        return Binary("and", Binary("implies", st.cond, t),
                      Binary("implies", Unary("not", st.cond), f))
    raise MutationError(f"cannot reason backward through {type(st).__name__}")


def _subst_outside_old(e: Expr, var: str, rep: Expr) -> Expr:
    if isinstance(e, Old):
        return e
    if isinstance(e, Var):
        return rep if e.name == var else e
    if isinstance(e, Quant):
        lo = _subst_outside_old(e.lo, var, rep)
        hi = _subst_outside_old(e.hi, var, rep)
        if e.var == var:
            return Quant(e.kind, e.var, lo, hi, e.body)
        bv, body = e.var, e.body
        if bv in free_vars(rep):
            # Bound names inside `old` still refer to the quantifier, so
            # renaming them everywhere is sound.
            bv = fresh_name(free_vars(rep) | free_vars(body) | {var}, bv)
            body = substitute(body, e.var, Var(bv))
        return Quant(e.kind, bv, lo, hi, _subst_outside_old(body, var, rep))
    return rebuild(e, tuple(_subst_outside_old(c, var, rep) for c in children(e)))


# ---------------------------------------------------------------------------
# Routine structure

def target_loop(routine: Routine) -> Loop:
    """The last top-level loop: the one whose exit state the
    postcondition describes."""
    loops = [s for s in routine.body if isinstance(s, Loop)]
    if not loops:
        raise MutationError(f"{routine.name} has no loop")
    return loops[-1]


def trailing_statements(routine: Routine) -> tuple:
    lp = target_loop(routine)
    k = list(routine.body).index(lp)
    return routine.body[k + 1:]


def loop_variables(routine: Routine, lp: Optional[Loop] = None) -> List[str]:
    """Variables the loop body assigns, sorted.  Variables set only by
    the initialization keep one value throughout the loop."""
    lp = lp or target_loop(routine)
    names = assigned_vars(lp.body)
    names.discard("<heap>")
    return sorted(names)


def step_offsets(lp: Loop) -> List[Expr]:
    """Aging offsets: 1 plus step expressions found in the body."""
    out: List[Expr] = [IntLit(1)]
    for st in iter_stmts(lp.body):
        if isinstance(st, Assign) and isinstance(st.target, Var):
            e = st.expr
            if isinstance(e, Binary) and e.op in ("+", "-") and e.left == st.target:
                if e.right not in out and not isinstance(e.right, IntLit):
                    out.append(e.right)
    for x in _stmt_subexprs(lp.body):
        if isinstance(x, Index) and isinstance(x.idx, Binary) and x.idx.op == "+" \
                and isinstance(x.idx.right, Var) and x.idx.right not in out:
            out.append(x.idx.right)
    return out


def _stmt_subexprs(stmts) -> Iterable[Expr]:
    from .program import stmt_exprs
    for e in stmt_exprs(stmts):
        yield from walk(e)


# ---------------------------------------------------------------------------
# Closure

@dataclass
class _Node:
    clause: Expr
    derivation: Tuple[Step, ...]
    source: int
    exit: Optional[Expr]
    fresh: Tuple[str, ...]
    rewritten: bool


def generate_candidates(routine: Routine, budget: int = 3, cap: int = DEFAULT_CAP) -> List[Candidate]:
    """Closure of the heuristics over the postcondition, up to `budget`
    heuristic steps per derivation, deduplicated up to renaming."""
    lp = target_loop(routine)
    loop_vars = set(loop_variables(routine, lp))
    offsets = step_offsets(lp)
    base_avoid = routine_names(routine)
    try:
        trailing = trailing_statements(routine)
    except MutationError:
        trailing = ()

    out: List[Candidate] = []
    seen: set = set()
    expanded: set = set()

    def emit(node: _Node) -> bool:
        key = canonical_key(node.clause, node.fresh)
        if key in seen:
            return False
        seen.add(key)
        if len(out) < cap:
            out.append(Candidate(node.clause, node.derivation, node.source, node.exit,
                                 classify(node.clause) if not any(
                                     s.param("companion") for s in node.derivation[-1:])
                                 else BOUNDING,
                                 node.fresh))
        return True

    frontier: List[_Node] = []
    for k, c in enumerate(routine.ensure):
        for part in [c.expr]:
            node = _Node(part, (Step("source", (("clause", str(k)),)),), k, None, (), False)
            if emit(node):
                frontier.append(node)
        if budget >= 1 and trailing:
            try:
                back = backward_substitute(c.expr, trailing)
            except MutationError:
                back = None
            if back is not None and back != c.expr:
                node = _Node(back, (Step("source", (("clause", str(k)),)),
                                    Step("backward", (("statements", str(len(trailing))),))),
                             k, None, (), False)
                if emit(node):
                    frontier.append(node)

    while frontier:
        children_: List[_Node] = []
        for node in frontier:
            if node.derivation[-1].param("companion") or node.derivation[-1].heuristic == "age":
                continue  # range companions and aged clauses are final
            if _depth(node.derivation) >= budget:
                continue
            key = canonical_key(node.clause, node.fresh)
            if key in expanded:
                continue
            expanded.add(key)
            variants = [(node.clause, node.derivation, node.rewritten)]
            if not node.rewritten:
                for name, p, new in identity_rewrites(node.clause, routine):
                    step = Step("rewrite", (("identity", name), ("path", path_text(p))))
                    variants.append((new, node.derivation + (step,), True))
            for clause, deriv, rewritten in variants:
                for new, step, ex, fr in _expand(clause, node, routine, lp, loop_vars,
                                                 offsets, base_avoid):
                    children_.append(_Node(new, deriv + (step,), node.source,
                                           ex if ex is not None else node.exit,
                                           node.fresh + fr, rewritten))
        # Smallest clauses first, so that truncation drops the largest.
        children_.sort(key=lambda n: size(n.clause))
        frontier = [c for c in children_ if emit(c)]
    return out


def _depth(derivation) -> int:
    return sum(1 for s in derivation if s.heuristic in HEURISTICS)


def _expand(clause, node, routine, lp, loop_vars, offsets, base_avoid):
    fresh = pick_fresh(base_avoid | names_in(clause) | set(node.fresh))
    movers = (loop_vars | set(node.fresh))
    results = []
    for target in free_constants(clause, routine, lp.label):
        if isinstance(target, Var) and target.name in node.fresh:
            continue
        if isinstance(target, Field) and set(names_in(target)) & set(node.fresh):
            continue
        results += _relax(clause, target, fresh)
    for var in sorted(free_vars(clause) & movers):
        results += _uncouple(clause, var, fresh)
    results += _duplicate(clause)
    results += _drop(clause)
    for var in sorted(free_vars(clause) & movers):
        for off in offsets:
            results += _age(clause, var, off)
    return results


# ---------------------------------------------------------------------------
# Replay

def replay(c: Candidate, routine: Routine) -> Expr:
    """Re-apply a candidate's derivation to its source clause."""
    e: Optional[Expr] = None
    for step in c.derivation:
        h = step.heuristic
        if h == "source":
            e = routine.ensure[int(step.param("clause"))].expr
        elif h == "backward":
            e = backward_substitute(e, trailing_statements(routine))
        elif h == "rewrite":
            e = apply_identity(e, step.param("identity"), parse_path(step.param("path")), routine)
        elif h == "relax":
            target = parse_expr(step.param("target"))
            fresh = step.param("fresh")
            occ = step.param("occurrence")
            paths = occurrences(e, target)
            chosen = paths if occ == "all" else [parse_path(occ)]
            new = e
            for p in sorted(chosen, reverse=True):
                new = replace_at(new, p, Var(fresh))
            comp = step.param("companion")
            if comp:
                p_text, k = comp.split("/")
                p = parse_path(p_text)
                lo_p, hi_p = _at(new, p[:-1] + (1,)), _at(new, p[:-1] + (2,))
                v = Var(fresh)
                if p[-1] == 2:
                    new = range_clause(lo_p if k == "0" else Binary("-", lo_p, IntLit(1)), v, target)
                else:
                    new = range_clause(target, v, hi_p if k == "0" else Binary("+", hi_p, IntLit(1)))
            e = new
        elif h == "uncouple":
            var, occ, fresh = step.param("var"), step.param("occurrence"), step.param("fresh")
            paths = var_paths(e, var) if occ == "all" else [parse_path(occ)]
            for p in paths:
                e = replace_at(e, p, Var(fresh))
        elif h == "duplicate":
            e = Binary(e.op, e.right, e.right)
        elif h == "drop":
            if step.param("conjunct") is not None:
                k = int(step.param("conjunct"))
                parts = conjuncts(e)
                e = conjoin(parts[:k] + parts[k + 1:])
            else:
                k = int(step.param("consequent"))
                cons = conjuncts(e.right)
                e = Binary("implies", e.left, conjoin(cons[:k] + cons[k + 1:]))
        elif h == "age":
            off = parse_expr(step.param("offset"))
            if off != IntLit(0):
                e = substitute(e, step.param("var"), Binary("-", Var(step.param("var")), off))
        elif h == "pair":
            e = Binary("and", parse_expr(step.param("guard")), e)
        elif h == "instantiate":
            mapping = json.loads(step.param("mapping"))
            for name, value in mapping.items():
                e = substitute(e, name, Var("__inst_" + value))
            for value in mapping.values():
                e = substitute(e, "__inst_" + value, Var(value))
        else:
            raise MutationError(f"unknown derivation step {h}")
    return e


def candidates_json(cands: Sequence[Candidate]) -> str:
    return json.dumps([c.to_json() for c in cands], indent=2, sort_keys=True)
