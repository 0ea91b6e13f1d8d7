"""Checked execution of annotated routines.

`run_checked` interprets a routine and records a verdict for every
loop proof obligation it meets along the way: initiation after `from`,
consecution after each body execution, the variant before and after
each body execution, the invariant again on exit, and the routine's
pre- and postcondition.  Failures are recorded, not raised, together
with a snapshot of the variables involved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .ast import Field, Index, Var
from .errors import ExecError, NothingToExplain, Undefined
from .evaluator import HEAP_FIELDS, ExecState, evaluate, holds
from .parser import free_vars
from .printer import show
from .program import (Assign, Clause, Create, If, Loop, Routine, Swap)
from .values import EPS_REAL, VOID, Array, Ref, copy_value, is_int, show as show_value, to_json

ITERATION_CAP = 10 ** 6
MODES = ("gold", "candidates", "both")

PASS, FAIL, UNDEFINED, DIVERGENCE = "pass", "fail", "undefined", "divergence"
OBLIGATIONS = ("precondition", "initiation", "consecution", "variant", "exit",
               "postcondition", "termination", "execution")


@dataclass
class Failure:
    clause: str
    status: str  # fail or undefined
    detail: str = ""
    origin: str = "gold"
    snapshot: Optional[int] = None

    def to_json(self) -> dict:
        return {"clause": self.clause, "status": self.status, "detail": self.detail,
                "origin": self.origin, "snapshot": self.snapshot}


@dataclass
class Verdict:
    obligation: str
    status: str
    loop: Optional[str] = None
    execution: int = 0  # which execution of the loop (nested loops run many times)
    iteration: int = 0  # body executions completed before the check
    failures: List[Failure] = field(default_factory=list)
    detail: str = ""
    v_before: Any = None
    v_after: Any = None
    mode: str = "int"

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {"obligation": self.obligation, "status": self.status, "loop": self.loop,
               "execution": self.execution, "iteration": self.iteration,
               "failures": [f.to_json() for f in self.failures], "detail": self.detail}
        if self.obligation == "variant":
            out["variant"] = {"before": to_json(self.v_before), "after": to_json(self.v_after),
                              "mode": self.mode}
        return out


@dataclass
class CheckReport:
    routine: str
    input: list
    verdicts: List[Verdict] = field(default_factory=list)
    snapshots: List[dict] = field(default_factory=list)
    iterations: Dict[str, int] = field(default_factory=dict)
    result: Any = None
    variant_history: Dict[str, List[list]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def failing(self) -> List[Verdict]:
        return [v for v in self.verdicts if not v.ok]

    def counts(self) -> Dict[str, Dict[str, int]]:
        out: Dict[str, Dict[str, int]] = {}
        for v in self.verdicts:
            slot = out.setdefault(v.obligation, {})
            slot[v.status] = slot.get(v.status, 0) + 1
        return {k: dict(sorted(out[k].items())) for k in sorted(out)}

    def verdicts_for(self, loop: str, execution: int = 1) -> List[Verdict]:
        return [v for v in self.verdicts if v.loop == loop and v.execution == execution]

    def to_json(self, full: bool = True) -> dict:
        verdicts = self.verdicts if full else self.failing()
        return {
            "routine": self.routine,
            "input": self.input,
            "ok": self.ok,
            "result": self.result,
            "verdicts": [v.to_json() for v in verdicts],
            "counts": self.counts(),
            "snapshots": self.snapshots,
            "iterations": dict(sorted(self.iterations.items())),
        }

    def dumps(self, full: bool = True) -> str:
        return json.dumps(self.to_json(full), sort_keys=True, indent=2)


class _Abort(Exception):
    """Stops execution after a runtime error or divergence."""


def default_value(ty: str):
    head = ty.split()[0].split("[")[0].upper()
    if head in ("INTEGER", "NATURAL", "INT"):
        return 0
    if head in ("REAL", "DOUBLE"):
        return 0.0
    if head in ("BOOLEAN", "BOOL"):
        return False
    if head == "ARRAY":
        return Array(1, [])
    if head in ("SEQ", "SEQUENCE"):
        return ()
    return VOID


class Checker:
    def __init__(self, routine: Routine, mode: str = "gold",
                 cap: int = ITERATION_CAP,
                 choices: Optional[Dict[str, Callable]] = None,
                 stop_on_failure: bool = False,
                 skip_failed_candidates: bool = False):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.r = routine
        self.mode = mode
        self.cap = cap
        self.choices = choices or {}
        self.stop_on_failure = stop_on_failure
        self.skip_failed = skip_failed_candidates
        self.dead: set = set()
        self.executions: Dict[str, int] = {}
        # Called as observer(None, state) at each loop checkpoint and as
        # observer(clause, state) after a candidate clause passes there.
        self.observer: Optional[Callable] = None

    # -- public ---------------------------------------------------------

    def run(self, args: Sequence, heap: Optional[dict] = None) -> Tuple[Any, CheckReport]:
        r = self.r
        if len(args) != len(r.params):
            raise ExecError(f"{r.name} takes {len(r.params)} arguments, got {len(args)}")
        s = ExecState()
        if heap:
            s.heap = {k: dict(v) for k, v in heap.items()}
            s.next_id = max(s.heap) + 1
        for d, a in zip(r.params, args):
            s.env[d.name] = copy_value(a)
        self.report = CheckReport(r.name, [_input_json(a, s) for a in args])
        s.take_snapshot()
        for d in r.results + r.locals:
            s.env[d.name] = default_value(d.type)
        self.state = s
        try:
            pre = self.check_clauses(r.require, "precondition", None, all_origins=True)
            if not pre.ok:
                return None, self.report
            self.exec_block(r.body)
            self.check_clauses(r.ensure, "postcondition", None, all_origins=True)
        except _Abort:
            return None, self.report
        value = self.result_value()
        self.report.result = _input_json(value, s) if value is not None else None
        return value, self.report

    def result_value(self):
        s, r = self.state, self.r
        if len(r.results) == 1:
            return s.env[r.results[0].name]
        if r.results:
            return tuple(s.env[d.name] for d in r.results)
        vals = tuple(s.env[d.name] for d in r.params)
        return vals[0] if len(vals) == 1 else vals

    # -- checking -------------------------------------------------------

    def selected(self, clauses) -> list:
        out = []
        for c in clauses:
            gold = c.origin == "gold"
            if self.mode == "gold" and not gold:
                continue
            if self.mode == "candidates" and gold:
                continue
            if self.skip_failed and c.origin in self.dead:
                continue
            out.append(c)
        return out

    def check_clauses(self, clauses, obligation: str, loop: Optional[Loop],
                      iteration: int = 0, all_origins: bool = False) -> Verdict:
        label = loop.label if loop else None
        v = Verdict(obligation, PASS, label, self.executions.get(label, 0) if label else 0,
                    iteration)
        todo = clauses if all_origins else self.selected(clauses)
        if self.observer is not None and loop is not None:
            self.observer(None, self.state)
        for c in todo:
            try:
                ok = holds(c.expr, self.state)
                status, detail = (PASS, "") if ok else (FAIL, "clause is false")
            except Undefined as exc:
                status, detail = UNDEFINED, str(exc)
            if status == PASS and self.observer is not None and c.origin != "gold":
                self.observer(c, self.state)
            if status != PASS:
                snap = self.snapshot(c.expr)
                v.failures.append(Failure(show(c.expr), status, detail, c.origin, snap))
                if c.origin != "gold":
                    self.dead.add(c.origin)
        if v.failures:
            v.status = UNDEFINED if all(f.status == UNDEFINED for f in v.failures) else FAIL
        self.record(v)
        return v

    def record(self, v: Verdict) -> None:
        self.report.verdicts.append(v)
        if not v.ok and self.stop_on_failure:
            raise _Abort()

    def snapshot(self, expr=None) -> int:
        s = self.state
        names = sorted(s.env) if expr is None else sorted(
            n for n in free_vars(expr) if n in s.env)
        snap = {n: _input_json(s.env[n], s) for n in names}
        self.report.snapshots.append(snap)
        return len(self.report.snapshots) - 1

    def runtime_error(self, exc: Exception, loop: Optional[Loop] = None, iteration: int = 0):
        label = loop.label if loop else None
        v = Verdict("execution", UNDEFINED, label,
                    self.executions.get(label, 0) if label else 0, iteration,
                    detail=str(exc))
        v.failures.append(Failure("", UNDEFINED, str(exc), "gold", self.snapshot()))
        self.report.verdicts.append(v)
        raise _Abort()

    def eval(self, e, loop=None, iteration=0):
        try:
            return evaluate(e, self.state)
        except Undefined as exc:
            self.runtime_error(exc, loop, iteration)

    # -- statements -----------------------------------------------------

    def exec_block(self, stmts, loop=None, iteration=0) -> None:
        for st in stmts:
            self.exec_stmt(st, loop, iteration)

    def exec_stmt(self, st, loop, iteration) -> None:
        s = self.state
        if isinstance(st, Assign):
            value = self.eval(st.expr, loop, iteration)
            if isinstance(st.target, Var) and st.target.name in self.choices:
                value = self.choices[st.target.name](s, value)
            self.store(st.target, value, loop, iteration)
        elif isinstance(st, Create):
            value = self.eval(st.value, loop, iteration)
            self.store(st.target, s.new_node(copy_value(value)), loop, iteration)
        elif isinstance(st, If):
            cond = self.eval(st.cond, loop, iteration)
            if type(cond) is not bool:
                self.runtime_error(Undefined(f"if condition is not boolean: {cond!r}"),
                                   loop, iteration)
            self.exec_block(st.then if cond else st.els, loop, iteration)
        elif isinstance(st, Swap):
            arr = self.eval(st.array, loop, iteration)
            i = self.eval(st.i, loop, iteration)
            j = self.eval(st.j, loop, iteration)
            try:
                if not isinstance(arr, Array):
                    raise Undefined("swap on a non-array")
                x, y = arr.get(i), arr.get(j)
                arr.set(i, y)
                arr.set(j, x)
            except Undefined as exc:
                self.runtime_error(exc, loop, iteration)
        elif isinstance(st, Loop):
            self.exec_loop(st)
        else:
            raise TypeError(f"unknown statement {st!r}")

    def store(self, target, value, loop, iteration) -> None:
        s = self.state
        try:
            if isinstance(target, Var):
                s.env[target.name] = copy_value(value)
            elif isinstance(target, Index):
                arr = evaluate(target.array, s)
                idx = evaluate(target.idx, s)
                if not isinstance(arr, Array):
                    raise Undefined(f"cannot assign into {arr!r}")
                arr.set(idx, copy_value(value))
            elif isinstance(target, Field):
                ref = evaluate(target.target, s)
                if not isinstance(ref, Ref) or ref.is_void:
                    raise Undefined(f"cannot assign field {target.name} of {ref!r}")
                if target.name not in HEAP_FIELDS:
                    raise Undefined(f"unknown field {target.name}")
                s.heap[ref.id][target.name] = copy_value(value)
        except Undefined as exc:
            self.runtime_error(exc, loop, iteration)

    def exec_loop(self, lp: Loop) -> None:
        label = lp.label
        self.executions[label] = self.executions.get(label, 0) + 1
        execution = self.executions[label]
        history = self.report.variant_history.setdefault(label, [])
        trace: list = []
        history.append(trace)
        self.report.iterations.setdefault(label, 0)
        self.exec_block(lp.init, lp, 0)
        self.check_clauses(lp.invariant, "initiation", lp, 0)
        n = 0
        while True:
            done = self.eval(lp.exit, lp, n)
            if type(done) is not bool:
                self.runtime_error(Undefined("exit condition is not boolean"), lp, n)
            if done:
                break
            if n >= self.cap:
                v = Verdict("termination", DIVERGENCE, label, execution, n,
                            detail=f"iteration cap {self.cap} exceeded")
                self.report.verdicts.append(v)
                raise _Abort()
            before = self.variant_value(lp, n)
            if not trace:
                trace.append(to_json(before))
            self.exec_block(lp.body, lp, n)
            n += 1
            self.report.iterations[label] += 1
            self.check_clauses(lp.invariant, "consecution", lp, n)
            after = self.variant_value(lp, n)
            trace.append(to_json(after))
            vv = variant_verdict(label, execution, n, before, after, lp)
            self.record(vv)
            if not vv.ok:
                # Without a working termination argument further
                # iterations prove nothing and may never end.
                raise _Abort()
        self.check_clauses(lp.invariant, "exit", lp, n)

    def variant_value(self, lp: Loop, n: int):
        if lp.variant is None:
            return None
        try:
            return evaluate(lp.variant, self.state)
        except Undefined as exc:
            return exc


def variant_verdict(label, execution, n, before, after, lp) -> Verdict:
    v = Verdict("variant", PASS, label, execution, n, v_before=before, v_after=after)
    if lp.variant is None:
        v.detail = "no variant declared"
        return v
    text = show(lp.variant)
    for val in (before, after):
        if isinstance(val, Exception):
            v.status = UNDEFINED
            v.v_before = None if isinstance(before, Exception) else before
            v.v_after = None if isinstance(after, Exception) else after
            v.failures.append(Failure(text, UNDEFINED, str(val)))
            return v
        if not (is_int(val) or type(val) is float):
            v.status = UNDEFINED
            v.failures.append(Failure(text, UNDEFINED, f"variant value {val!r} is not numeric"))
            return v
    real = type(before) is float or type(after) is float
    v.mode = "real" if real else "int"
    tol = EPS_REAL if real else 0
    if before < -tol:
        v.status = FAIL
        v.failures.append(Failure(text, FAIL, f"variant {before} is negative before the body"))
    elif real and after > before + tol:
        v.status = FAIL
        v.failures.append(Failure(text, FAIL, f"variant increased from {before} to {after}"))
    elif not real and not after < before:
        v.status = FAIL
        v.failures.append(Failure(text, FAIL, f"variant did not decrease: {before} -> {after}"))
    return v


def _input_json(v, s: ExecState):
    """Values plus, for references, the structure they point to."""
    if isinstance(v, Ref) and not v.is_void:
        return {"ref": to_json(v), "heap": _reachable(v, s.heap)}
    if isinstance(v, tuple):
        return [_input_json(x, s) for x in v]
    return to_json(v)


def _reachable(r: Ref, heap: dict) -> dict:
    out, stack = {}, [r]
    while stack:
        x = stack.pop()
        if not isinstance(x, Ref) or x.is_void or str(x.id) in out or x.id not in heap:
            continue
        rec = heap[x.id]
        out[str(x.id)] = {k: to_json(rec[k]) for k in HEAP_FIELDS}
        stack.extend(rec[k] for k in ("next", "left", "right"))
    return dict(sorted(out.items(), key=lambda kv: int(kv[0])))


def run_checked(routine: Routine, args: Sequence, mode: str = "gold", *,
                heap: Optional[dict] = None, cap: int = ITERATION_CAP,
                choices: Optional[Dict[str, Callable]] = None,
                stop_on_failure: bool = False) -> Tuple[Any, CheckReport]:
    """Execute `routine` on `args`, checking every proof obligation.

    `heap` seeds the record heap for reference arguments.  `choices`
    maps a variable name to ``f(state, default) -> value``; it overrides
    the value stored by plain assignments to that variable, which lets
    tests drive nondeterministic choices such as a binary search's
    midpoint.
    """
    return Checker(routine, mode, cap, choices, stop_on_failure).run(args, heap)


def run_unchecked(routine: Routine, args: Sequence, heap: Optional[dict] = None,
                  cap: int = ITERATION_CAP):
    """Execute without checking any annotation except the precondition."""
    bare = _strip(routine)
    value, report = Checker(bare, "gold", cap).run(args, heap)
    if not report.ok:
        f = report.failing()[0]
        raise ExecError(explain_verdict(f, report))
    return value


def _strip(routine: Routine) -> Routine:
    from dataclasses import replace
    from .program import iter_loops

    out = replace(routine, ensure=())
    for lp in list(iter_loops(routine.body)):
        out = out.with_loop(lp.label, replace(out.loop(lp.label), invariant=(), variant=None))
    return out


def check_variant_wellformed(report: CheckReport, loop: str) -> Verdict:
    """Summarize the variant verdicts recorded for `loop`."""
    vs = [v for v in report.verdicts if v.loop == loop and v.obligation == "variant"]
    if not any(v.loop == loop for v in report.verdicts):
        raise ValueError(f"loop {loop} was never executed")
    bad = [v for v in vs if not v.ok]
    if bad:
        return bad[0]
    mode = "real" if any(v.mode == "real" for v in vs) else "int"
    return Verdict("variant", PASS, loop, 0, len(vs),
                   detail=f"{len(vs)} decreasing steps", mode=mode)


def explain_verdict(v: Verdict, report: CheckReport) -> str:
    where = f"loop {v.loop}" if v.loop else f"routine {report.routine}"
    lines = []
    if v.obligation == "variant":
        lines.append(f"{v.obligation} failure in {where} at iteration {v.iteration}: "
                     f"V_before={show_value(v.v_before) if v.v_before is not None else '?'}, "
                     f"V_after={show_value(v.v_after) if v.v_after is not None else '?'}")
        for f in v.failures:
            lines.append(f"  variant {f.clause}: {f.detail}")
        return "\n".join(lines)
    if v.obligation in ("termination", "execution"):
        lines.append(f"{v.obligation} {v.status} in {where} at iteration {v.iteration}: "
                     f"{v.detail}")
    else:
        at = "on entry" if v.obligation == "precondition" else (
            "at routine end" if v.obligation == "postcondition" else f"at iteration {v.iteration}")
        lines.append(f"{v.obligation} {v.status} in {where} {at}")
    for f in v.failures:
        if f.clause:
            lines.append(f"  clause {f.clause} is {'false' if f.status == FAIL else 'undefined'}"
                         + (f" ({f.detail})" if f.status == UNDEFINED else ""))
        if f.snapshot is not None:
            snap = report.snapshots[f.snapshot]
            vals = ", ".join(f"{k}={_brief(x)}" for k, x in snap.items())
            if vals:
                lines.append(f"  values: {vals}")
    return "\n".join(lines)


def _brief(x) -> str:
    if isinstance(x, dict) and "items" in x:
        body = ", ".join(_brief(i) for i in x["items"])
        return f"[{body}]" if x["lower"] == 1 else f"[{body}]@{x['lower']}"
    if isinstance(x, dict) and "ref" in x:
        return x["ref"]
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, list):
        return "<" + ", ".join(_brief(i) for i in x) + ">"
    return json.dumps(x) if isinstance(x, str) and not x.startswith("#") and x != "Void" else str(x)


def explain_failure(report: CheckReport) -> str:
    bad = report.failing()
    if not bad:
        raise NothingToExplain("nothing to explain: every obligation passed")
    return "\n".join(explain_verdict(v, report) for v in bad)
