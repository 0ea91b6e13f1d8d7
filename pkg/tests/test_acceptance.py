"""Acceptance criteria 1-8, each reported as one PASS/FAIL line."""

import itertools
import json
import os
import random
import subprocess
import sys
import time
from pathlib import Path

from invwb import corpus
from invwb.engine import explain_failure, run_checked, run_unchecked
from invwb.inference import infer
from invwb.inputs import generate_inputs, input_from_json
from invwb.mutation import target_loop
from invwb.parser import parse_routines
from invwb.theory import (encoded_value, gcd, is_sorted, l1_distance, lemma_max_drop_left,
                          lemma_max_drop_right, lemma_power_even, lemma_power_step, lemma_split,
                          levenshtein, max_knapsack, pagerank_reference, perm)
from invwb.values import Array

DATA = Path(__file__).parent / "data"
SORTS = ["selection_sort", "insertion_sort", "bubble_sort_basic", "bubble_sort_improved",
         "comb_sort"]


def _run(record, number, title, body):
    try:
        ok, detail = body()
    except Exception as exc:  # reported as a FAIL line, then re-raised
        record(number, False, title, f"{type(exc).__name__}: {exc}")
        raise
    record(number, ok, title, detail)
    assert ok, detail


# 1 -------------------------------------------------------------------------

def test_criterion_1_corpus_verification(record_criterion):
    def body():
        start = time.perf_counter()
        failures, runs = [], 0
        for e in corpus.load_corpus():
            for name, r in e.routines.items():
                for case in generate_inputs(r, e.policy(name), seed=0, size=100):
                    _, rep = run_checked(r, case.args, heap=case.heap)
                    runs += 1
                    if not rep.ok:
                        failures.append(f"{e.id}/{name}: {explain_failure(rep).splitlines()[0]}")
        took = time.perf_counter() - start
        detail = f"{runs} runs, {len(failures)} failing, {took:.1f}s"
        if failures:
            detail += "; first: " + failures[0]
        return not failures and took < 60, detail
    _run(record_criterion, 1, "corpus verification", body)


# 2 -------------------------------------------------------------------------

def _knapsack_brute(b, v, w):
    best = 0
    for counts in itertools.product(*[range(b // wk + 1) for wk in w]):
        if sum(c * wk for c, wk in zip(counts, w)) <= b:
            best = max(best, sum(c * vk for c, vk in zip(counts, v)))
    return best


def _naive_distance(s, t):
    if not s:
        return len(t)
    if not t:
        return len(s)
    if s[-1] == t[-1]:
        return _naive_distance(s[:-1], t[:-1])
    return 1 + min(_naive_distance(s[:-1], t[:-1]), _naive_distance(s, t[:-1]),
                   _naive_distance(s[:-1], t))


def test_criterion_2_oracle_equivalence(record_criterion):
    def body():
        bad = []
        knap = corpus.get("knapsack").routine
        rng = random.Random(2)
        for _ in range(500):
            n = rng.randint(0, 4)
            v = [rng.randint(1, 6) for _ in range(n)]
            w = [rng.randint(1, 6) for _ in range(n)]
            b = rng.randint(0, 10)
            got = run_unchecked(knap, [Array(1, v), Array(1, w), n, b])
            if got != _knapsack_brute(b, v, w):
                bad.append(f"knapsack v={v} w={w} b={b}: {got}")
        lev = corpus.get("levenshtein").routine
        words = [""] + ["".join(p) for k in range(1, 5) for p in itertools.product("abc", repeat=k)]
        pairs = 0
        for s in words:
            for t in words:
                pairs += 1
                got = run_unchecked(lev, [Array(1, list(s)), Array(1, list(t))])
                if got != _naive_distance(s, t):
                    bad.append(f"levenshtein {s!r} {t!r}: {got}")
        for entry_id in SORTS:
            r = corpus.get(entry_id).routine
            rng = random.Random(entry_id)
            for _ in range(500):
                items = [rng.randint(-10, 10) for _ in range(rng.randint(1, 10))]
                out = run_unchecked(r, [Array(1, list(items))])
                if not (is_sorted(out.items) and perm(out.items, items)):
                    bad.append(f"{entry_id} {items} -> {out.items}")
        detail = f"500 knapsack, {pairs} edit-distance pairs, {500 * len(SORTS)} sorts"
        return not bad, detail + (f"; first mismatch: {bad[0]}" if bad else "")
    _run(record_criterion, 2, "oracle equivalence", body)


# 3 -------------------------------------------------------------------------

def test_criterion_3_reference_values(record_criterion):
    def body():
        lev = corpus.get("levenshtein").routine
        checks = {
            "encoded_value(<3,2,0,1>, 5) = 138": encoded_value([3, 2, 0, 1], 5) == 138,
            "gcd(x, x) = x on [1..100]": all(gcd(x, x) == x for x in range(1, 101)),
            "K(0) = 0": all(max_knapsack(0, [3, 4], [2, 3], n) == 0 for n in range(3)),
            "edit distance with an empty side": all(
                levenshtein(s, "") == len(s) == levenshtein("", s)
                and run_unchecked(lev, [Array(1, list(s)), Array(1, [])]) == len(s)
                and run_unchecked(lev, [Array(1, []), Array(1, list(s))]) == len(s)
                for s in ["", "a", "abc", "cabba"]),
        }
        knap = corpus.get("knapsack").routine
        checks["K(0) = 0 (corpus program)"] = run_unchecked(
            knap, [Array(1, [3, 4]), Array(1, [2, 3]), 2, 0]) == 0
        bad = [k for k, ok in checks.items() if not ok]
        return not bad, f"{len(checks) - len(bad)}/{len(checks)} values" + (
            f"; wrong: {', '.join(bad)}" if bad else "")
    _run(record_criterion, 3, "reference values", body)


# 4 -------------------------------------------------------------------------

def test_criterion_4_theory_lemmas(record_criterion):
    def body():
        bad, count = [], 0
        for n in range(1, 7):
            for a in itertools.combinations_with_replacement(range(5), n):
                for i in range(1, n + 1):
                    for j in range(i, n + 1):
                        for mid in range(i, j + 1):
                            for key in range(-1, 6):
                                count += 1
                                if not lemma_split(a, i, j, mid, key):
                                    bad.append(("split", a, i, j, mid, key))
        for n in range(1, 7):
            for a in itertools.product(range(4), repeat=n):
                for i in range(1, n + 1):
                    for j in range(i + 1, n + 1):
                        count += 2
                        if not lemma_max_drop_right(a, i, j):
                            bad.append(("max right", a, i, j))
                        if not lemma_max_drop_left(a, i, j):
                            bad.append(("max left", a, i, j))
        for x in range(0, 6):
            for z in range(0, 11):
                count += 2
                if not (lemma_power_even(x, z) and lemma_power_step(x, z)):
                    bad.append(("power", x, z))
        return not bad, f"{count} instances" + (f"; counterexample {bad[0]}" if bad else "")
    _run(record_criterion, 4, "theory lemmas", body)


# 5 -------------------------------------------------------------------------

def test_criterion_5_gold_recall(record_criterion):
    def body():
        start = time.perf_counter()
        rows, bad = [], []
        for e in corpus.designated():
            rep = infer(e.routine, e.policy(), seed=0, size=100, budget=3, entry=e.id)
            rows.append(f"{e.id} {rep.gold_matched}/{len(rep.gold)}:{len(rep.survivors)}")
            if rep.recall != 1 or len(rep.survivors) > 50:
                bad.append(e.id)
        took = time.perf_counter() - start
        detail = f"{took:.0f}s; " + ", ".join(rows)
        return not bad and took < 300, detail
    _run(record_criterion, 5, "gold recall", body)


# 6 -------------------------------------------------------------------------

NEGATIVE = {
    "broken_init.inv": "initiation",
    "broken_variant.inv": "variant",
    "broken_invariant.inv": "consecution",
    "broken_swap.inv": "consecution",
    "broken_guard.inv": "consecution",
}


def _negative_control(path, kind):
    """Find the first input with a failure of `kind`, then replay it from
    its JSON form and expect the same obligation at the same iteration."""
    r = parse_routines(path.read_text())[0]
    e = next(x for x in corpus.load_corpus() if r.name in x.inputs)
    for case in generate_inputs(r, e.inputs[r.name], seed=0, size=100):
        _, rep = run_checked(r, case.args, heap=case.heap)
        hits = [v for v in rep.failing() if v.obligation == kind]
        if hits:
            witness = json.loads(json.dumps(case.to_json()))
            again = input_from_json(r, witness)
            _, rep2 = run_checked(r, again.args, heap=again.heap)
            hits2 = [v for v in rep2.failing() if v.obligation == kind]
            same = bool(hits2) and (hits2[0].loop, hits2[0].iteration) == (
                hits[0].loop, hits[0].iteration)
            return same, f"{path.stem}: {kind} at {hits[0].loop}#{hits[0].iteration}"
    return False, f"{path.stem}: no {kind} failure"


def test_criterion_6_negative_controls(record_criterion):
    def body():
        results = [_negative_control(DATA / f, kind) for f, kind in NEGATIVE.items()]
        return all(ok for ok, _ in results), "; ".join(d for _, d in results)
    _run(record_criterion, 6, "negative controls", body)


# 7 -------------------------------------------------------------------------

def _random_graph(rng, n):
    reaching = [[] for _ in range(n)]
    for j in range(1, n + 1):
        others = [i for i in range(1, n + 1) if i != j] or [1]
        for i in rng.sample(others, rng.randint(1, min(5, len(others)))):
            reaching[i - 1].append(j)
    outbound = [sum(j in row for row in reaching) for j in range(1, n + 1)]
    return [sorted(row) for row in reaching], outbound


def test_criterion_7_pagerank(record_criterion):
    def body():
        r = corpus.get("pagerank").routine
        label = target_loop(r).label
        rng = random.Random(7)
        worst, bad = 0.0, []
        for g in range(20):
            n = rng.randint(1, 50)
            reaching, outbound = _random_graph(rng, n)
            args = [0.85, 1e-6, Array(1, [Array(1, row) for row in reaching]), Array(1, outbound)]
            result, rep = run_checked(r, args)
            ref = pagerank_reference(reaching, outbound, 0.85)
            dist = l1_distance(result.items, ref)
            worst = max(worst, dist)
            diffs = [v - 1 + 1e-6 for v in rep.variant_history[label][0]]
            monotone = all(b <= a for a, b in zip(diffs, diffs[1:]))
            if not (rep.ok and dist <= 1e-6 and monotone):
                bad.append(f"graph {g} (n={n}): ok={rep.ok} L1={dist:.2e} monotone={monotone}")
        return not bad, f"20 graphs, worst L1 {worst:.2e}" + (f"; {bad[0]}" if bad else "")
    _run(record_criterion, 7, "PageRank", body)


# 8 -------------------------------------------------------------------------

def test_criterion_8_determinism(record_criterion):
    def body():
        commands = [
            ["check", "binary_search", "--seed", "11", "--format", "json"],
            ["check", str(DATA / "broken_swap.inv"), "--seed", "11", "--format", "json"],
            ["infer", "has_sequential", "--seed", "11", "--format", "json"],
        ]
        bad = []
        for argv in commands:
            outs = []
            for hash_seed in ("1", "2"):
                env = dict(os.environ, PYTHONHASHSEED=hash_seed)
                proc = subprocess.run([sys.executable, "-m", "invwb", *argv],
                                      capture_output=True, env=env)
                outs.append(proc.stdout)
            if outs[0] != outs[1] or not outs[0]:
                bad.append(" ".join(argv[:2]))
        return not bad, f"{len(commands)} commands run twice" + (
            f"; differing: {', '.join(bad)}" if bad else "")
    _run(record_criterion, 8, "determinism", body)
