"""Random and edge-case input suites for corpus routines.

A policy maps each parameter to a small generator spec, for example::

    {"a": {"type": "array", "lower": 1, "len": [1, 10], "lo": -10, "hi": 10},
     "key": {"type": "int", "lo": -10, "hi": 10, "pick_from": "a"}}

Supported types: int, real, array, chars, list, bst, graph and
outbound.  Bounds may name another parameter: ``{"param": "base",
"offset": -1}``.  Tuples violating the precondition are discarded.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from .errors import ConfigError, Undefined
from .evaluator import ExecState, holds
from .program import Routine
from .values import VOID, Array, Ref, copy_value, to_json

MAX_REJECTIONS = 10_000
ORDER = {"int": 0, "real": 0, "chars": 1, "array": 1, "list": 1, "bst": 1,
         "graph": 1, "outbound": 2}


@dataclass
class InputCase:
    args: List[Any]
    heap: Dict[int, Dict[str, Any]] = field(default_factory=dict)
    label: str = "random"

    def to_json(self) -> dict:
        from .engine import _input_json
        s = ExecState(heap=self.heap)
        return {"args": [_input_json(a, s) for a in self.args], "label": self.label}

    def key(self) -> str:
        return json.dumps(self.to_json()["args"], sort_keys=True)

    def copy(self) -> "InputCase":
        return InputCase([copy_value(a) for a in self.args],
                         {k: dict(v) for k, v in self.heap.items()}, self.label)


def satisfies_precondition(routine: Routine, case: InputCase) -> bool:
    s = ExecState(heap={k: dict(v) for k, v in case.heap.items()})
    for d, a in zip(routine.params, case.args):
        s.env[d.name] = copy_value(a)
    s.take_snapshot()
    for c in routine.require:
        try:
            if not holds(c.expr, s):
                return False
        except Undefined:
            return False
    return True


class _Gen:
    def __init__(self, routine: Routine, policy: Dict[str, dict], rng: random.Random):
        names = [d.name for d in routine.params]
        missing = [n for n in names if n not in policy]
        if missing:
            raise ConfigError(f"no input policy for parameter(s) {', '.join(missing)} "
                              f"of {routine.name}")
        self.names = names
        self.policy = policy
        self.rng = rng

    def bound(self, spec, key, env, default):
        v = spec.get(key, default)
        if isinstance(v, dict):
            return env[v["param"]] + v.get("offset", 0)
        return v

    def length(self, spec, env, mode):
        ln = spec.get("len", [0, 8])
        if isinstance(ln, dict):
            if "same_as" in ln:
                return env[ln["same_as"]].count
            return env[ln["param"]] + ln.get("offset", 0)
        lo, hi = ln
        if mode in ("min", "empty"):
            return lo
        if mode == "singleton":
            return max(lo, min(1, hi))
        if mode in ("equal", "max"):
            return hi
        return self.rng.randint(lo, hi)

    def make(self, mode: str = "random", pin: Optional[str] = None) -> InputCase:
        env: Dict[str, Any] = {}
        heap: Dict[int, Dict[str, Any]] = {}
        order = sorted(self.names, key=lambda n: 2 if "pick_from" in self.policy[n]
                       else ORDER.get(self.policy[n]["type"], 1))
        for name in order:
            env[name] = self.value(name, self.policy[name], env, heap,
                                   "min" if pin == name else mode)
        return InputCase([env[n] for n in self.names], heap, mode if pin is None else f"{pin}-low")

    def value(self, name, spec, env, heap, mode):
        t = spec["type"]
        rng = self.rng
        if t == "int":
            lo, hi = self.bound(spec, "lo", env, 0), self.bound(spec, "hi", env, 10)
            src = spec.get("pick_from")
            if src and mode == "random" and rng.random() < 0.5:
                pool = _pool(env[src], heap)
                if pool:
                    return rng.choice(pool)
            if mode == "min":
                return lo
            if mode == "max":
                return hi
            return rng.randint(lo, hi)
        if t == "real":
            if "value" in spec:
                return float(spec["value"])
            return rng.uniform(spec["lo"], spec["hi"])
        if t in ("array", "chars"):
            lower = spec.get("lower", 1)
            if isinstance(lower, list):
                lower = rng.randint(*lower) if mode == "random" else lower[0]
            n = self.length(spec, env, mode)
            if t == "chars":
                alphabet = spec.get("alphabet", "ab")
                pick = lambda: rng.choice(alphabet)
                low = alphabet[0]
            else:
                lo, hi = self.bound(spec, "lo", env, 0), self.bound(spec, "hi", env, 10)
                pick = lambda: rng.randint(lo, hi)
                low = lo
            if mode == "min":
                items = [low] * n
            elif mode == "equal":
                v = pick()
                items = [v] * n
            else:
                items = [pick() for _ in range(n)]
            if spec.get("sorted"):
                items.sort()
            return Array(lower, items)
        if t == "list":
            n = self.length(spec, env, mode)
            lo, hi = spec.get("lo", 0), spec.get("hi", 9)
            vals = [lo] * n if mode == "min" else [rng.randint(lo, hi) for _ in range(n)]
            return _build_list(vals, heap)
        if t == "bst":
            n = self.length(spec, env, mode)
            lo, hi = spec.get("lo", 0), spec.get("hi", 9)
            vals = [lo] * n if mode in ("min", "equal") else [rng.randint(lo, hi) for _ in range(n)]
            return _build_bst(vals, heap)
        if t == "graph":
            n = self.length(spec, env, mode)
            return _graph(n, rng, mode)
        if t == "outbound":
            g = env[spec["graph"]]
            counts = [0] * g.count
            for row in g.items:
                for j in row.items:
                    counts[j - 1] += 1
            return Array(1, counts)
        raise ConfigError(f"unknown input type {t!r} for parameter {name}")


def _pool(v, heap) -> list:
    if isinstance(v, Array):
        return list(v.items)
    if isinstance(v, Ref) and not v.is_void:
        out, stack = [], [v]
        while stack:
            r = stack.pop()
            if isinstance(r, Ref) and not r.is_void:
                rec = heap[r.id]
                out.append(rec["value"])
                stack += [rec["next"], rec["left"], rec["right"]]
        return sorted(out)
    return []


def _node(heap, value) -> Ref:
    r = Ref(max(heap, default=0) + 1)
    heap[r.id] = {"value": value, "next": VOID, "left": VOID, "right": VOID}
    return r


def _build_list(vals, heap) -> Ref:
    head = VOID
    refs = [_node(heap, v) for v in vals]
    for a, b in zip(refs, refs[1:]):
        heap[a.id]["next"] = b
    return refs[0] if refs else head


def _build_bst(vals, heap) -> Ref:
    if not vals:
        return VOID
    root = _node(heap, vals[0])
    for v in vals[1:]:
        cur = root
        while True:
            side = "left" if v < heap[cur.id]["value"] else "right"
            nxt = heap[cur.id][side]
            if nxt.is_void:
                heap[cur.id][side] = _node(heap, v)
                break
            cur = nxt
    return root


def _graph(n: int, rng: random.Random, mode: str) -> Array:
    """Reaching lists of a random graph without sinks (1-based)."""
    n = max(n, 1)
    reaching: List[List[int]] = [[] for _ in range(n)]
    for j in range(1, n + 1):
        if n == 1:
            targets = [1]
        else:
            others = [i for i in range(1, n + 1) if i != j]
            k = 1 if mode == "min" else rng.randint(1, len(others))
            targets = sorted(rng.sample(others, k))
        for i in targets:
            reaching[i - 1].append(j)
    return Array(1, [Array(1, sorted(r)) for r in reaching])


EDGE_MODES = ("min", "singleton", "equal", "empty", "max")


def generate_inputs(routine: Routine, policy: Dict[str, dict], seed: int = 0,
                    size: int = 100) -> List[InputCase]:
    """Edge cases first, then random tuples, all meeting the precondition.

    Deterministic in `seed`.  Raises ConfigError when the precondition
    rejects more than MAX_REJECTIONS candidate tuples.
    """
    rng = random.Random(f"{seed}:{routine.name}")
    gen = _Gen(routine, policy, rng)
    out: List[InputCase] = []
    seen: set = set()
    rejected = 0

    def offer(case: InputCase) -> bool:
        nonlocal rejected
        if not satisfies_precondition(routine, case):
            rejected += 1
            return False
        k = case.key()
        if k in seen:
            return False
        seen.add(k)
        out.append(case)
        return True

    plans = [(m, None) for m in EDGE_MODES]
    plans += [("random", n) for n in gen.names if policy[n]["type"] == "int"]
    for mode, pin in plans:
        if len(out) >= size:
            break
        offer(gen.make(mode, pin))
    dupes = 0
    while len(out) < size:
        before = rejected
        if not offer(gen.make()):
            if rejected > before:
                if rejected > MAX_REJECTIONS:
                    raise ConfigError(
                        f"input policy for {routine.name} rejected more than "
                        f"{MAX_REJECTIONS} tuples by the precondition; check the "
                        f"policy for {', '.join(gen.names)}")
            else:
                dupes += 1
                if dupes > 20 * size:
                    break  # the input space is smaller than the suite
    return out


def input_from_json(routine: Routine, data: dict) -> InputCase:
    """Rebuild an InputCase from `InputCase.to_json` output."""
    heap: Dict[int, Dict[str, Any]] = {}

    def ref(x):
        return VOID if x == "Void" else Ref(int(x[1:]))

    def conv(v, ty: str):
        if isinstance(v, dict) and "ref" in v:
            for k, rec in v["heap"].items():
                heap[int(k)] = {f: (ref(rec[f]) if f != "value" else rec[f])
                                for f in ("value", "next", "left", "right")}
            return ref(v["ref"])
        if v == "Void":
            return VOID
        if isinstance(v, dict) and "items" in v:
            inner = ty[ty.find("[") + 1:ty.rfind("]")].strip() if "[" in ty else ""
            return Array(v["lower"], [conv(x, inner) for x in v["items"]])
        if ty.upper() == "REAL" and isinstance(v, int):
            return float(v)
        return v

    args = [conv(v, d.type) for v, d in zip(data["args"], routine.params)]
    return InputCase(args, heap, data.get("label", "replay"))


def parse_cli_arg(text: str, ty: str):
    """Turn a command-line argument into a value of type `ty`."""
    t = ty.upper()
    try:
        if t == "INTEGER":
            return int(text)
        if t == "REAL":
            return float(text)
        if t == "BOOLEAN":
            if text.lower() in ("true", "false"):
                return text.lower() == "true"
            raise ValueError(text)
        if t == "CHARACTER":
            if len(text) != 1:
                raise ValueError(text)
            return text
        if t.startswith("ARRAY"):
            inner = ty[ty.find("[") + 1:ty.rfind("]")].strip()
            if inner.upper() == "CHARACTER" and not text.lstrip().startswith("["):
                return Array(1, list(text))
            return _to_array(json.loads(text), inner)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {text!r} as {ty}") from exc
    raise ConfigError(f"arguments of type {ty} cannot be given on the command line")


def _to_array(v, inner: str):
    if not isinstance(v, list):
        raise ValueError(f"expected a list, got {v!r}")
    if inner.upper().startswith("ARRAY"):
        sub = inner[inner.find("[") + 1:inner.rfind("]")].strip()
        return Array(1, [_to_array(x, sub) for x in v])
    if inner.upper() == "REAL":
        return Array(1, [float(x) for x in v])
    return Array(1, list(v))
