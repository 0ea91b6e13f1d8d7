"""Dynamic invariant inference: generate, instantiate, filter, rank.

Candidates from the mutation engine are made concrete by mapping their
fresh variables onto distinct variables of the target loop.  The
results are installed together on the loop and checked on every input
of a suite.  A candidate dies the first time its initiation,
consecution or exit check is false or undefined, and is not evaluated
again.  A second pass retries essential candidates killed only by
undefinedness, this time guarded by each surviving bounding candidate.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .ast import (Binary, BoolLit, Expr, FunApp, MinMax, Old, Quant, Var, children,
                  conjuncts, walk)
from .engine import Checker, ITERATION_CAP, run_checked
from .errors import InvwbError, Undefined
from .evaluator import ExecState, holds
from .values import Ref, copy_value, is_int, values_equal
from .inputs import InputCase, generate_inputs
from .linear import atoms, degenerate, implied_by
from .mutation import (Candidate, Step, canonical_key, generate_candidates,
                       loop_variables, target_loop)
from .printer import show
from .program import BOUNDING, ESSENTIAL, Clause, Loop, Routine
from .subst import substitute

RANKING_NOTE = ("ranking keys are our own: vacuous clauses last, then more "
                "function symbols shared with the postcondition, fewer fresh "
                "variables, essential before bounding, shallower derivations, "
                "smaller clauses, and finally the clause text")
REFLEXIVE = ("=", "<=", ">=", "iff", "implies")
MAX_PAIRS = 5000
SAMPLES_PER_RUN = 3
PERTURBATIONS = 3


class InferenceError(InvwbError):
    pass


@dataclass
class Instance:
    """A candidate with its fresh variables mapped to loop variables."""
    id: str
    clause: Expr
    candidate: Optional[Candidate]
    mapping: Tuple[Tuple[str, str], ...] = ()
    classification: str = ESSENTIAL
    exit: Optional[Expr] = None
    guard: Optional["Instance"] = None

    @property
    def text(self) -> str:
        return show(self.clause)

    def derivation(self) -> List[dict]:
        steps = [s.to_json() for s in self.candidate.derivation] if self.candidate else []
        if self.mapping:
            steps.append({"heuristic": "instantiate", "params": dict(self.mapping)})
        if self.guard is not None:
            steps.append({"heuristic": "pair", "params": {"guard": self.guard.text}})
        return steps


@dataclass
class Kill:
    obligation: str
    status: str
    input: int
    iteration: int
    detail: str


@dataclass
class FilterResult:
    survivors: List[Instance]
    killed: Dict[str, Kill]
    runs: int = 0
    iterations: int = 0
    vacuous: List[Instance] = field(default_factory=list)
    samples: list = field(default_factory=list)


@dataclass
class InferenceReport:
    routine: str
    loop: str
    seed: int
    suite: List[InputCase]
    budget: int
    generated: int
    instances: List[Instance]
    loop_independent: int
    survivors: List[Instance]
    killed: Dict[str, Kill]
    pairs: int
    gold: List[Tuple[str, Optional[str]]]
    postcondition: Tuple[str, ...]
    runs: int = 0
    iterations: int = 0
    entry: Optional[str] = None
    vacuous: List[Instance] = field(default_factory=list)
    by_id: Dict[str, Instance] = field(default_factory=dict)

    @property
    def gold_matched(self) -> int:
        return sum(1 for _, m in self.gold if m is not None)

    @property
    def recall(self) -> Optional[float]:
        return self.gold_matched / len(self.gold) if self.gold else None

    def to_json(self) -> dict:
        post = set(_symbols_of_texts(self.postcondition))
        witnesses = sorted({k.input for k in self.killed.values()})
        return {
            "entry": self.entry,
            "routine": self.routine,
            "loop": self.loop,
            "seed": self.seed,
            "suite_size": len(self.suite),
            "budget": self.budget,
            "candidates": {
                "generated": self.generated,
                "instances": len(self.instances),
                "loop_independent": self.loop_independent,
                "guarded_pairs": self.pairs,
                "survivors": len(self.survivors),
                "vacuous": len(self.vacuous),
                "killed": len(self.killed),
            },
            "survivors": [{
                "id": s.id,
                "clause": s.text,
                "classification": s.classification,
                "derivation": s.derivation(),
                "exit": show(s.exit) if s.exit is not None else None,
                "rank_key": list(rank_key(s, post)),
            } for s in self.survivors],
            "vacuous": [{"id": s.id, "clause": s.text} for s in self.vacuous],
            "killed": [{
                "id": i,
                "clause": self.by_id[i].text,
                "obligation": k.obligation,
                "status": k.status,
                "witness": {"input": k.input, "iteration": k.iteration},
                "detail": k.detail,
            } for i, k in sorted(self.killed.items(), key=lambda kv: _id_order(kv[0]))],
            "inputs": {str(i): self.suite[i].to_json() for i in witnesses},
            "gold": {
                "total": len(self.gold),
                "matched": self.gold_matched,
                "recall": self.recall,
                "clauses": [{"clause": g, "matched_by": m} for g, m in self.gold],
            },
            "ranking": RANKING_NOTE,
            "timings": {"runs": self.runs, "loop_iterations": self.iterations},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)


def _id_order(i: str):
    head = i.split("&")[-1].split("[")[0]
    return (("&" in i), int(head[1:]) if head[1:].isdigit() else 0, i)


# ---------------------------------------------------------------------------
# Instantiation

def free_outside_old(e: Expr, bound=frozenset()) -> set:
    if isinstance(e, Old):
        return set()
    if isinstance(e, Var):
        return set() if e.name in bound else {e.name}
    out = set()
    for i, c in enumerate(children(e)):
        inner = bound | {e.var} if isinstance(e, Quant) and i == 2 else bound
        out |= free_outside_old(c, inner)
    return out


def instantiate(candidates: Sequence[Candidate], routine: Routine,
                lp: Optional[Loop] = None) -> Tuple[List[Instance], int]:
    """Concrete instances of `candidates`, deduplicated; also returns the
    number dropped for mentioning no variable the loop changes."""
    lp = lp or target_loop(routine)
    names = loop_variables(routine, lp)
    varying = set(names)
    out: List[Instance] = []
    seen = set()
    independent = 0
    for k, c in enumerate(candidates, start=1):
        combos = itertools.permutations(names, len(c.fresh)) if c.fresh else [()]
        for combo in combos:
            mapping = tuple(zip(c.fresh, combo))
            clause = _rename(c.clause, mapping)
            norm = atoms(clause)
            key = norm if norm is not None else canonical_key(clause)
            if key in seen:
                continue
            seen.add(key)
            if not (free_outside_old(clause) & varying) or degenerate(clause, varying):
                independent += 1
                continue
            label = f"c{k}" + ("[" + ", ".join(f"{a}:={b}" for a, b in mapping) + "]"
                               if mapping else "")
            ex = _rename(c.exit, mapping) if c.exit is not None else None
            out.append(Instance(label, clause, c, mapping, c.classification, ex))
    return out, independent


def _rename(e: Expr, mapping) -> Expr:
    tmp = [(a, b, f"__inst{n}") for n, (a, b) in enumerate(mapping)]
    for a, _, t in tmp:
        e = substitute(e, a, Var(t))
    for _, b, t in tmp:
        e = substitute(e, t, Var(b))
    return e


# ---------------------------------------------------------------------------
# Filtering

def install(routine: Routine, lp: Loop, instances: Sequence[Instance],
            keep_gold: bool = True) -> Routine:
    """The routine with `instances` added to the invariant of `lp`."""
    gold = lp.invariant if keep_gold else ()
    extra = tuple(Clause(i.clause, i.classification, f"candidate:{i.id}") for i in instances)
    return routine.with_loop(lp.label, replace(lp, invariant=gold + extra))


def filter_candidates(routine: Routine, instances: Sequence[Instance],
                      suite: Sequence[InputCase], lp: Optional[Loop] = None,
                      cap: int = ITERATION_CAP) -> FilterResult:
    """Check all instances together on every input of `suite`."""
    lp = lp or target_loop(routine)
    if not instances:
        return FilterResult([], {})
    checker = Checker(install(routine, lp, instances), "candidates", cap,
                      skip_failed_candidates=True)
    watch = _Justifier(instances, set(loop_variables(routine, lp)))
    checker.observer = watch
    killed: Dict[str, Kill] = {}
    runs = iterations = 0
    for n, case in enumerate(suite):
        if len(killed) == len(instances):
            break
        watch.new_run()
        _, report = checker.run(case.args, case.heap)
        watch.flush()
        runs += 1
        iterations += sum(report.iterations.values())
        for v in report.verdicts:
            if v.obligation == "execution":
                raise InferenceError(f"{routine.name} failed to run on input {n}: {v.detail}")
            for f in v.failures:
                if f.origin.startswith("candidate:"):
                    cid = f.origin[len("candidate:"):]
                    if cid not in killed:
                        killed[cid] = Kill(v.obligation, f.status, n, v.iteration, f.detail)
    alive = [i for i in instances if i.id not in killed]
    vacuous = [i for i in alive if not watch.justified(i.id)]
    survivors = [i for i in alive if watch.justified(i.id)]
    return FilterResult(survivors, killed, runs, iterations, vacuous, watch.samples())


class _Justifier:
    """Tracks whether surviving candidates say something about the loop.

    A candidate is justified once (a) every hypothesis of its
    implications has held in some checked state and (b) some
    perturbation of the loop variables it mentions (a neighbouring
    integer, or another value the variable took in the same run) makes
    it false.  Clauses that stay true whatever the loop variables are,
    like ``contains(a[1..a.upper], x) iff contains(a, x)``, fail (b).
    """

    def __init__(self, instances: Sequence[Instance], loop_vars: set):
        self.hyps = {i.id: hs for i in instances if (hs := hypotheses(i.clause))}
        self.movers = {i.id: sorted(free_outside_old(i.clause) & loop_vars) for i in instances}
        self.stiff = {i.id for i in instances}
        self.loop_vars = sorted(loop_vars)
        self.rng = random.Random(0)
        self.seen: Dict[str, list] = {}
        self.kept: list = []
        self.current: list = []
        self.run_states = 0

    def new_run(self) -> None:
        self.seen = {}
        self.run_states = 0

    def samples(self) -> list:
        return self.kept

    def _record(self, state) -> None:
        """Reservoir of SAMPLES_PER_RUN checkpoint states per run, each
        stored with perturbed copies, for the subsumption check."""
        self.run_states += 1
        slot = len(self.current)
        if slot >= SAMPLES_PER_RUN:
            slot = self.rng.randrange(self.run_states)
            if slot >= SAMPLES_PER_RUN:
                return
        heap = {k: dict(v) for k, v in state.heap.items()}
        env = {k: copy_value(v) for k, v in state.env.items()}
        group = [ExecState(env, heap, state.snapshot, state.next_id)]
        for _ in range(PERTURBATIONS):
            if not self.loop_vars:
                break
            name = self.rng.choice(self.loop_vars)
            alt = self._alternative(name, env.get(name), heap)
            if alt is not None:
                e2 = dict(env)
                e2[name] = alt
                group.append(ExecState(e2, heap, state.snapshot, state.next_id))
        if slot < len(self.current):
            self.current[slot] = group
        else:
            self.current.append(group)

    def flush(self) -> None:
        for g in self.current:
            self.kept.extend(g)
        self.current = []

    def _alternative(self, name: str, cur, heap=None):
        options = [w for w in self.seen.get(name, []) if not values_equal(w, cur)]
        if is_int(cur):
            options += [cur - 1, cur + 1]
        elif isinstance(cur, Ref) and heap:
            options += [Ref(k) for k in sorted(heap) if cur.is_void or k != cur.id]
        return self.rng.choice(options) if options else None

    def justified(self, cid: str) -> bool:
        return cid not in self.hyps and cid not in self.stiff

    def __call__(self, clause, state) -> None:
        if clause is None:
            for n in self.loop_vars:
                v = state.env.get(n)
                bucket = self.seen.setdefault(n, [])
                if len(bucket) < 32 and not any(values_equal(v, w) for w in bucket):
                    bucket.append(copy_value(v))
            self._record(state)
            return
        cid = clause.origin[len("candidate:"):]
        hs = self.hyps.get(cid)
        if hs is not None:
            left = []
            for h in hs:
                try:
                    if holds(h, state):
                        continue
                except Undefined:
                    pass
                left.append(h)
            if left:
                self.hyps[cid] = left
            else:
                del self.hyps[cid]
        if cid in self.stiff:
            self._perturb(cid, clause.expr, state)

    def _perturb(self, cid: str, expr: Expr, state) -> None:
        movers = self.movers.get(cid)
        if not movers:
            return
        name = self.rng.choice(movers)
        alt = self._alternative(name, state.env.get(name), state.heap)
        if alt is None:
            return
        env = dict(state.env)
        env[name] = alt
        try:
            if not holds(expr, ExecState(env, state.heap, state.snapshot, state.next_id)):
                self.stiff.discard(cid)
        except Undefined:
            pass


def hypotheses(e: Expr) -> List[Expr]:
    """Hypotheses of the implications making up `e`.  A clause whose
    hypotheses never held on any checked state is vacuous."""
    if isinstance(e, Binary) and e.op == "and":
        return hypotheses(e.left) + hypotheses(e.right)
    if isinstance(e, Binary) and e.op == "implies":
        inner = hypotheses(e.right)
        return [Binary("and", e.left, h) for h in inner] if inner else [e.left]
    return []


def guarded_pairs(killed: Dict[str, Kill], instances: Sequence[Instance],
                  survivors: Sequence[Instance]) -> List[Instance]:
    """Essential instances killed by undefinedness, each conjoined after a
    surviving bounding instance sharing one of its variables."""
    guards = [s for s in survivors if s.classification == BOUNDING]
    out = []
    for inst in instances:
        k = killed.get(inst.id)
        if k is None or k.status != "undefined" or inst.classification != ESSENTIAL:
            continue
        fv = free_outside_old(inst.clause)
        for g in guards:
            if free_outside_old(g.clause) & fv:
                out.append(Instance(f"{g.id}&{inst.id}", Binary("and", g.clause, inst.clause),
                                    inst.candidate, inst.mapping, ESSENTIAL, inst.exit, g))
                if len(out) >= MAX_PAIRS:
                    return out
    return out


# ---------------------------------------------------------------------------
# Ranking and gold matching

def _symbols(e: Expr) -> set:
    out = set()
    for x in walk(e):
        if isinstance(x, FunApp):
            out.add(x.symbol)
        elif isinstance(x, MinMax):
            out.add(x.op)
        elif isinstance(x, Quant):
            out.add(x.kind)
        elif isinstance(x, Old):
            out.add("old")
    return out


def _symbols_of_texts(texts) -> set:
    from .parser import parse_expr
    out = set()
    for t in texts:
        out |= _symbols(parse_expr(t))
    return out


def is_vacuous(e: Expr) -> bool:
    """Syntactic tautologies such as ``true`` or ``x = x``."""
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Binary):
        if e.op == "and":
            return is_vacuous(e.left) and is_vacuous(e.right)
        if e.op in REFLEXIVE and canonical_key(e.left) == canonical_key(e.right):
            return True
        if e.op == "implies" and is_vacuous(e.right):
            return True
    return False


def rank_key(i: Instance, post_symbols: set) -> tuple:
    return (int(is_vacuous(i.clause)),
            -len(_symbols(i.clause) & post_symbols),
            len(i.mapping),
            0 if i.classification == ESSENTIAL else 1,
            len(i.derivation()),
            len(i.text),
            i.text)


def rank(survivors: Sequence[Instance], routine: Routine) -> List[Instance]:
    post = set()
    for c in routine.ensure:
        post |= _symbols(c.expr)
    return sorted(survivors, key=lambda s: rank_key(s, post))


def prune_ranges(ranked: Sequence[Instance]) -> Tuple[List[Instance], List[Instance]]:
    """Split off range clauses whose every atom is already implied by a
    single atom of a better-ranked survivor."""
    known: set = set()
    keep, redundant = [], []
    for s in ranked:
        form = atoms(s.clause)
        if form is None:
            keep.append(s)
            continue
        if all(implied_by(a, known) for a in form):
            redundant.append(s)
        else:
            keep.append(s)
            known |= form
    return keep, redundant


def _truth(e: Expr, samples) -> frozenset:
    out = set()
    for n, st in enumerate(samples):
        try:
            if holds(e, st):
                out.add(n)
        except Undefined:
            pass
    return frozenset(out)


def subsume(ranked: Sequence[Instance], samples) -> Tuple[List[Instance], List[Instance]]:
    """Split off survivors that a better-ranked kept survivor implies on
    every sampled state.  The samples mix real loop states with copies
    whose loop variables were perturbed, so a clause is only set aside
    when the evidence shows it is weaker, not merely also true.

    Only clauses of the same classification over a subset of the other's
    variables are compared: a strong essential clause holds on little
    beyond the real states and would otherwise swallow every bounding
    clause."""
    keep: List[Tuple[Instance, frozenset, set]] = []
    redundant = []
    for s in ranked:
        t = _truth(s.clause, samples)
        fv = free_outside_old(s.clause)
        if any(kt <= t and k.classification == s.classification and fv <= kv
               for k, kt, kv in keep):
            redundant.append(s)
        else:
            keep.append((s, t, fv))
    return [k for k, _, _ in keep], redundant


def match_gold(lp: Loop, survivors: Sequence[Instance]) -> List[Tuple[str, Optional[str]]]:
    """Which essential gold clauses some survivor states, up to renaming
    of bound variables.  A guarded pair matches through its conjuncts."""
    keys: Dict[str, str] = {}
    for s in survivors:
        for part in [s.clause] + list(conjuncts(s.clause)):
            keys.setdefault(canonical_key(part), s.id)
    out = []
    for c in lp.invariant:
        if c.tag == ESSENTIAL:
            out.append((show(c.expr), keys.get(canonical_key(c.expr))))
    return out


# ---------------------------------------------------------------------------
# Driver

def infer(routine: Routine, policy: dict, seed: int = 0, size: int = 100,
          budget: int = 3, suite: Optional[Sequence[InputCase]] = None,
          entry: Optional[str] = None) -> InferenceReport:
    """Full pipeline on the routine's last top-level loop."""
    lp = target_loop(routine)
    if suite is None:
        suite = generate_inputs(routine, policy, seed, size)
    suite = list(suite)
    cands = generate_candidates(routine, budget)
    instances, independent = instantiate(cands, routine, lp)
    first = filter_candidates(routine, instances, suite, lp)
    pairs = guarded_pairs(first.killed, instances, first.survivors)
    second = filter_candidates(routine, pairs, suite, lp)
    survivors, redundant = prune_ranges(rank(first.survivors + second.survivors, routine))
    survivors, weaker = subsume(survivors, first.samples)
    vacuous = rank(first.vacuous + second.vacuous, routine) + redundant + weaker
    killed = dict(first.killed)
    killed.update(second.killed)
    report = InferenceReport(
        routine.name, lp.label, seed, suite, budget, len(cands), instances,
        independent, survivors, killed, len(pairs), match_gold(lp, survivors),
        tuple(show(c.expr) for c in routine.ensure),
        first.runs + second.runs, first.iterations + second.iterations, entry, vacuous)
    report.by_id = {i.id: i for i in list(instances) + pairs}
    return report


def replay_kill(routine: Routine, inst: Instance, case: InputCase,
                lp: Optional[Loop] = None):
    """Re-run one input with only `inst` installed; returns the report."""
    lp = lp or target_loop(routine)
    _, report = run_checked(install(routine, lp, [inst], keep_gold=False), case.args,
                            "candidates", heap=case.heap)
    return report
