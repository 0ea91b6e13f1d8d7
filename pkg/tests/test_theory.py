"""Domain-theory oracles and lemmas."""

import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from invwb.errors import Undefined
from invwb.evaluator import ExecState, evaluate
from invwb.parser import parse_expr
from invwb.theory import (REGISTRY, acyclic, best_value, bst_leftmost, bst_values, concat,
                          contains, encoded_value, gap_sorted, gcd, has_base, inversions,
                          is_bst, is_sorted, l1_distance, lemma_max_drop_left,
                          lemma_max_drop_right, lemma_max_extend, lemma_power_even,
                          lemma_power_step, lemma_split, levenshtein, list_values,
                          max_knapsack, max_slice, pagerank_reference, perm, rev)
from invwb.values import VOID, Ref


# -- gcd -------------------------------------------------------------------

def test_gcd_examples():
    assert gcd(7, 7) == 7
    assert gcd(12, 0) == 12
    assert gcd(12, 8) == 4


def test_gcd_zero_zero_undefined():
    with pytest.raises(Undefined):
        gcd(0, 0)


def test_gcd_matches_divisor_search():
    for a in range(1, 40):
        for b in range(1, 40):
            assert gcd(a, b) == max(d for d in range(1, min(a, b) + 1) if a % d == 0 == b % d)


@settings(max_examples=300)
@given(st.integers(1, 200), st.integers(1, 200))
def test_gcd_reductions(a, b):
    assert gcd(a, b) == gcd(b, a) == gcd(a % b, b)
    if a > b:
        assert gcd(a, b) == gcd(a - b, b)


# -- arrays ----------------------------------------------------------------

def test_max_slice_examples():
    assert max_slice([5], 1, 1) == 5
    assert max_slice([2, 9, 4], 1, 3) == 9
    with pytest.raises(Undefined):
        max_slice([2, 9], 2, 1)


def test_contains_examples():
    assert contains([3, 1, 4], 1, 3, 4)
    assert not contains([3, 1, 4], 2, 1, 3)


def test_sorted_examples():
    assert is_sorted([])
    assert gap_sorted([3, 1, 4, 2], 2)
    assert not gap_sorted([3, 1, 2, 4], 2)


@settings(max_examples=200)
@given(st.lists(st.integers(-5, 5), max_size=8))
def test_gap_one_is_sorted(a):
    assert gap_sorted(a, 1) == is_sorted(a)


def test_perm_and_inversions_examples():
    assert perm([1, 2, 2], [2, 1, 2])
    assert not perm([1, 2], [1, 2, 2])
    assert inversions([3, 1, 2]) == 2


@settings(max_examples=200)
@given(st.lists(st.integers(-5, 5), max_size=8))
def test_inversions_zero_iff_sorted(a):
    assert (inversions(a) == 0) == is_sorted(a)


@settings(max_examples=200)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=8), st.data())
def test_max_extension_lemma(a, data):
    i = data.draw(st.integers(1, len(a) - 1))
    assert lemma_max_extend(a, i)


# -- digits ----------------------------------------------------------------

def test_encoded_value_examples():
    assert encoded_value([3, 2, 0, 1], 5) == 138
    assert encoded_value([], 7) == 0
    assert not has_base([3, 5], 5)
    assert has_base([3, 4], 5)


def test_encoded_value_via_registry_uses_absolute_indices():
    from invwb.values import Array
    s = ExecState({"v": Array(0, [3, 2, 0, 1])})
    assert evaluate(parse_expr("encoded_value(v, 5)"), s) == 138


# -- knapsack --------------------------------------------------------------

def knapsack_brute(b, v, w):
    """Enumerate item counts directly."""
    best = 0
    ranges = [range(b // wk + 1) for wk in w]
    for counts in itertools.product(*ranges):
        if sum(c * wk for c, wk in zip(counts, w)) <= b:
            best = max(best, sum(c * vk for c, vk in zip(counts, v)))
    return best


def test_knapsack_examples():
    assert max_knapsack(0, [3], [2], 1) == 0
    assert max_knapsack(7, [3, 4], [2, 3], 2) == 10
    assert max_knapsack(1, [3], [2], 1) == 0


def test_knapsack_matches_enumeration():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(1, 4)
        v = [rng.randint(1, 6) for _ in range(n)]
        w = [rng.randint(1, 6) for _ in range(n)]
        b = rng.randint(0, 10)
        assert max_knapsack(b, v, w, n) == knapsack_brute(b, v, w)


def test_best_value_endpoints():
    v, w = [3, 4], [2, 3]
    for b in range(1, 8):
        assert best_value(b, v, w, 0, 2) == max_knapsack(b - 1, v, w, 2)
        assert best_value(b, v, w, 2, 2) == max_knapsack(b, v, w, 2)


def test_knapsack_rejects_nonpositive_weight():
    with pytest.raises(Undefined):
        max_knapsack(3, [1], [0], 1)


# -- edit distance ---------------------------------------------------------

def naive_distance(s, t):
    if not s:
        return len(t)
    if not t:
        return len(s)
    if s[-1] == t[-1]:
        return naive_distance(s[:-1], t[:-1])
    return 1 + min(naive_distance(s[:-1], t[:-1]), naive_distance(s, t[:-1]),
                   naive_distance(s[:-1], t))


def test_levenshtein_examples():
    assert levenshtein("", "") == 0
    assert levenshtein("abc", "") == 3
    assert levenshtein("kitten", "sitting") == 3


@settings(max_examples=300, deadline=None)
@given(st.text("abc", max_size=6), st.text("abc", max_size=6))
def test_levenshtein_matches_naive_recursion(s, t):
    assert levenshtein(s, t) == naive_distance(s, t)


# -- sequences and heaps ---------------------------------------------------

def test_rev_examples():
    assert rev(()) == ()
    assert rev((1, 2, 3)) == (3, 2, 1)


@settings(max_examples=200)
@given(st.lists(st.integers(), max_size=8), st.lists(st.integers(), max_size=8))
def test_rev_properties(s, t):
    assert rev(concat(s, t)) == concat(rev(t), rev(s))
    assert rev(rev(s)) == tuple(s)


def _chain(values):
    heap = {}
    for k, v in enumerate(values, start=1):
        heap[k] = {"value": v, "next": Ref(k + 1) if k < len(values) else VOID,
                   "left": VOID, "right": VOID}
    return heap, (Ref(1) if values else VOID)


def test_two_node_cycle_is_not_acyclic():
    heap, head = _chain([1, 2])
    heap[2]["next"] = Ref(1)
    assert not acyclic(heap, head)
    with pytest.raises(Undefined):
        list_values(heap, head)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=8))
def test_acyclic_tail(values):
    heap, head = _chain(values)
    assert acyclic(heap, head)
    assert acyclic(heap, heap[head.id]["next"])
    assert list_values(heap, head) == tuple(values)


def _tree(values):
    heap = {}
    for k, v in enumerate(values, start=1):
        heap[k] = {"value": v, "next": VOID, "left": VOID, "right": VOID}
        if k > 1:
            cur = 1
            while True:
                side = "left" if v <= heap[cur]["value"] else "right"
                if heap[cur][side].is_void:
                    heap[cur][side] = Ref(k)
                    break
                cur = heap[cur][side].id
    return heap, Ref(1)


def test_bst_examples():
    heap, root = _tree([5])
    assert bst_leftmost(heap, root) == root
    assert sorted(bst_values(heap, root)) == [5]
    ok = {1: {"value": 5, "next": VOID, "left": Ref(2), "right": Ref(3)},
          2: {"value": 2, "next": VOID, "left": VOID, "right": VOID},
          3: {"value": 7, "next": VOID, "left": VOID, "right": VOID}}
    assert is_bst(ok, Ref(1))
    ok[2]["value"], ok[3]["value"] = 7, 2
    assert not is_bst(ok, Ref(1))


@settings(max_examples=200)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=15))
def test_leftmost_holds_the_minimum(values):
    heap, root = _tree(values)
    assert is_bst(heap, root)
    assert heap[bst_leftmost(heap, root).id]["value"] == min(bst_values(heap, root))


# -- PageRank --------------------------------------------------------------

def test_pagerank_small_cases():
    assert pagerank_reference([[1]], [1], 0.85) == pytest.approx([1.0])
    assert pagerank_reference([[2], [1]], [1, 1], 0.85) == pytest.approx([0.5, 0.5])


def test_pagerank_reference_is_self_consistent():
    rng = random.Random(3)
    n = 10
    reaching = [[] for _ in range(n)]
    for j in range(1, n + 1):
        for i in rng.sample([k for k in range(1, n + 1) if k != j], rng.randint(1, 4)):
            reaching[i - 1].append(j)
    outbound = [sum(j in r for r in reaching) for j in range(1, n + 1)]
    coarse = pagerank_reference(reaching, outbound, 0.85, eps=1e-12)
    fine = pagerank_reference(reaching, outbound, 0.85, eps=1e-14)
    assert l1_distance(coarse, fine) <= 1e-10
    assert math.isclose(sum(fine), 1.0, rel_tol=1e-9)


def test_pagerank_rejects_bad_dampening():
    with pytest.raises(Undefined):
        pagerank_reference([[1]], [1], 1.0)


# -- lemmas, exhaustively --------------------------------------------------

def test_split_lemma_small_sorted_arrays():
    for n in range(1, 7):
        for a in itertools.combinations_with_replacement(range(5), n):
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    for mid in range(i, j + 1):
                        for key in range(-1, 6):
                            assert lemma_split(a, i, j, mid, key)


def test_two_way_max_lemmas_small_arrays():
    for n in range(1, 6):
        for a in itertools.product(range(3), repeat=n):
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    assert lemma_max_drop_right(a, i, j)
                    assert lemma_max_drop_left(a, i, j)


def test_power_lemmas():
    for x in range(0, 6):
        for z in range(0, 11):
            assert lemma_power_even(x, z)
            assert lemma_power_step(x, z)


def test_registry_has_every_corpus_symbol():
    from invwb import corpus
    from invwb.ast import FunApp, walk
    from invwb.program import stmt_exprs, iter_loops

    used = set()
    for entry in corpus.load_corpus():
        for r in entry.routines.values():
            exprs = [c.expr for c in r.require + r.ensure]
            for lp in iter_loops(r.body):
                exprs += [c.expr for c in lp.invariant]
                if lp.variant is not None:
                    exprs.append(lp.variant)
            exprs += list(stmt_exprs(r.body))
            for e in exprs:
                used |= {x.symbol for x in walk(e) if isinstance(x, FunApp)}
    assert used <= set(REGISTRY), used - set(REGISTRY)
