"""Linear normal forms for range constraints.

Used by inference to discard degenerate instances (``i - i``,
``x <= x``), to recognise equivalent range clauses, and to drop a range
clause when a single surviving atom already implies it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, FrozenSet, Optional, Tuple

from .ast import Binary, Expr, Field, IntLit, Unary, Var, children, conjuncts, walk
from .printer import show

Form = Tuple[Dict[str, Fraction], Fraction]
# An atom `sum(coeff * term) <= const`, terms sorted.
Atom = Tuple[Tuple[Tuple[str, Fraction], ...], Fraction]


def linear(e: Expr) -> Optional[Form]:
    if isinstance(e, IntLit):
        return {}, Fraction(e.value)
    if isinstance(e, Var) or (isinstance(e, Field) and _path(e)):
        return {show(e): Fraction(1)}, Fraction(0)
    if isinstance(e, Unary) and e.op == "-":
        f = linear(e.expr)
        return _scale(f, -1) if f else None
    if isinstance(e, Binary) and e.op in ("+", "-"):
        a, b = linear(e.left), linear(e.right)
        if a is None or b is None:
            return None
        return _add(a, _scale(b, 1 if e.op == "+" else -1))
    if isinstance(e, Binary) and e.op == "*":
        a, b = linear(e.left), linear(e.right)
        if a is None or b is None:
            return None
        if not a[0]:
            return _scale(b, a[1])
        if not b[0]:
            return _scale(a, b[1])
    return None


def _path(e: Expr) -> bool:
    while isinstance(e, Field):
        e = e.target
    return isinstance(e, Var)


def _scale(f: Form, k) -> Form:
    return {t: c * k for t, c in f[0].items()}, f[1] * k


def _add(a: Form, b: Form) -> Form:
    out = dict(a[0])
    for t, c in b[0].items():
        out[t] = out.get(t, 0) + c
    return {t: c for t, c in out.items() if c != 0}, a[1] + b[1]


def degenerate(e: Expr, varying: Optional[set] = None) -> bool:
    """True when `e` contains a sum whose variables cancel, arithmetic on
    literals only, or a comparison whose outcome does not depend on any
    variable (any of `varying`, when given)."""
    for x in walk(e):
        if isinstance(x, Binary) and x.op in ("+", "-"):
            a, b = linear(x.left), linear(x.right)
            if a is None or b is None:
                continue
            if not a[0] and not b[0]:
                return True
            s = _add(a, _scale(b, 1 if x.op == "+" else -1))
            if (set(a[0]) | set(b[0])) - set(s[0]):
                return True
        if isinstance(x, Binary) and x.op in ("<", "<=", ">", ">=", "=", "/="):
            d = _diff(x)
            if d is not None and not d[0]:
                return True
            if d is not None and varying is not None and not (
                    {t.split(".")[0] for t in d[0]} & varying):
                return True
    return False


def _diff(x: Binary) -> Optional[Form]:
    a, b = linear(x.left), linear(x.right)
    if a is None or b is None:
        return None
    return _add(a, _scale(b, -1))


def atoms(e: Expr) -> Optional[FrozenSet[Atom]]:
    """Integer atoms ``p <= c`` equivalent to the conjunction `e`, or None
    when some conjunct is not a linear order comparison."""
    out = set()
    for part in conjuncts(e):
        if not isinstance(part, Binary) or part.op not in ("<", "<=", ">", ">=", "="):
            return None
        d = _diff(part)  # left - right
        if d is None:
            return None
        terms, const = d
        if part.op in ("<=", "="):
            out.add(_atom(terms, -const))
        if part.op == "<":
            out.add(_atom(terms, -const - 1))
        if part.op in (">=", "="):
            out.add(_atom(_scale((terms, const), -1)[0], const))
        if part.op == ">":
            out.add(_atom(_scale((terms, const), -1)[0], const - 1))
    return frozenset(out)


def _atom(terms: Dict[str, Fraction], c: Fraction) -> Atom:
    return tuple(sorted(terms.items())), c


def implied_by(a: Atom, known) -> bool:
    """Some atom in `known` has the same linear part and a tighter bound."""
    return any(k[0] == a[0] and k[1] <= a[1] for k in known)
