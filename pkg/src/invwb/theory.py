"""Domain theory: executable definitions of the functions assertions use.

The plain functions at the top take ordinary Python data and are the
oracles tests compare against.  `REGISTRY` wraps them for the
evaluator: each entry checks its definedness condition first and
raises `Undefined` instead of returning a wrong value.
"""

from __future__ import annotations

import copy
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import Undefined
from .values import Array, Ref, VOID, elements, is_int, is_num

# ---------------------------------------------------------------------------
# Arithmetic

def gcd(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise Undefined(f"gcd({a}, {b}): negative argument")
    if a == 0 and b == 0:
        raise Undefined("gcd(0, 0) is undefined")
    return math.gcd(a, b)


# ---------------------------------------------------------------------------
# Arrays.  Index arguments are absolute, matching DSL slices.

def max_slice(a: Sequence, i: int, j: int, lower: int = 1):
    if i > j or i < lower or j > lower + len(a) - 1:
        raise Undefined(f"max over empty or out-of-bounds slice [{i}..{j}]")
    return max(a[i - lower:j - lower + 1])


def min_slice(a: Sequence, i: int, j: int, lower: int = 1):
    if i > j or i < lower or j > lower + len(a) - 1:
        raise Undefined(f"min over empty or out-of-bounds slice [{i}..{j}]")
    return min(a[i - lower:j - lower + 1])


def contains(a: Sequence, i: int, j: int, key, lower: int = 1) -> bool:
    if i > j:
        return False
    if i < lower or j > lower + len(a) - 1:
        raise Undefined(f"contains over out-of-bounds range [{i}..{j}]")
    return key in a[i - lower:j - lower + 1]


def is_sorted(a: Sequence) -> bool:
    return all(a[k] <= a[k + 1] for k in range(len(a) - 1))


def gap_sorted(a: Sequence, d: int) -> bool:
    if d < 1:
        raise Undefined(f"gap_sorted with gap {d} < 1")
    return all(a[k] <= a[k + d] for k in range(len(a) - d))


def perm(a: Sequence, b: Sequence) -> bool:
    return Counter(a) == Counter(b)


def inversions(a: Sequence) -> int:
    n = len(a)
    return sum(1 for k in range(n) for m in range(k + 1, n) if a[k] > a[m])


def encoded_value(v: Sequence[int], base: int, lower: int = 0) -> int:
    """Sum of v[k] * base^k with k the absolute index of each digit."""
    if base <= 0:
        raise Undefined(f"encoded_value with base {base}")
    return sum(d * base ** (lower + k) for k, d in enumerate(v))


def has_base(v: Sequence[int], base: int) -> bool:
    return all(0 <= d < base for d in v)


# ---------------------------------------------------------------------------
# Unbounded knapsack.  v and w are 1-based in the DSL; here plain lists.

@lru_cache(maxsize=4096)
def _knapsack_table(b: int, v: Tuple[int, ...], w: Tuple[int, ...]) -> Tuple[int, ...]:
    table = [0] * (b + 1)
    for c in range(1, b + 1):
        best = table[c - 1]
        for vk, wk in zip(v, w):
            if wk <= c:
                best = max(best, vk + table[c - wk])
        table[c] = best
    return tuple(table)


def _check_items(v, w, n):
    if n < 0 or len(v) < n or len(w) < n:
        raise Undefined(f"knapsack: fewer than {n} item types")
    if any(wk <= 0 for wk in w[:n]):
        raise Undefined("knapsack: weights must be positive")


def max_knapsack(b: int, v: Sequence[int], w: Sequence[int], n: int) -> int:
    """K(b): best value with total weight at most b, items reusable."""
    if b < 0:
        raise Undefined(f"max_knapsack with negative limit {b}")
    _check_items(v, w, n)
    return _knapsack_table(b, tuple(v[:n]), tuple(w[:n]))[b]


def best_value(b: int, v: Sequence[int], w: Sequence[int], j: int, n: int) -> int:
    """Best value for limit b when only item types 1..j may be added on
    top of an optimal selection; K(b-1) when no type has been tried."""
    if b < 0 or not 0 <= j <= n:
        raise Undefined(f"best_value({b}, j={j}, n={n}) out of range")
    _check_items(v, w, n)
    if b == 0:
        return 0
    table = _knapsack_table(b, tuple(v[:n]), tuple(w[:n]))
    best = table[b - 1]
    for k in range(j):
        if w[k] <= b:
            best = max(best, v[k] + table[b - w[k]])
    return best


# ---------------------------------------------------------------------------
# Edit distance

def levenshtein(s: Sequence, t: Sequence) -> int:
    s, t = tuple(s), tuple(t)

    @lru_cache(maxsize=None)
    def d(m: int, n: int) -> int:
        if m == 0:
            return n
        if n == 0:
            return m
        if s[m - 1] == t[n - 1]:
            return d(m - 1, n - 1)
        return 1 + min(d(m - 1, n - 1), d(m, n - 1), d(m - 1, n))

    return d(len(s), len(t))


# ---------------------------------------------------------------------------
# Sequences and heap structures.  A heap maps ids to field dicts.

def rev(s: Sequence) -> tuple:
    return tuple(reversed(tuple(s)))


def concat(s: Sequence, t: Sequence) -> tuple:
    return tuple(s) + tuple(t)


def _record(heap: dict, r: Ref) -> dict:
    try:
        return heap[r.id]
    except KeyError:
        raise Undefined(f"dangling reference #{r.id}") from None


def list_nodes(heap: dict, r: Ref) -> Optional[List[Ref]]:
    """Nodes on the next-chain from r, or None if the chain cycles."""
    seen, out = set(), []
    while not r.is_void:
        if r.id in seen:
            return None
        seen.add(r.id)
        out.append(r)
        r = _record(heap, r)["next"]
    return out


def acyclic(heap: dict, r: Ref) -> bool:
    return list_nodes(heap, r) is not None


def list_values(heap: dict, r: Ref) -> tuple:
    nodes = list_nodes(heap, r)
    if nodes is None:
        raise Undefined("sequence of a cyclic list")
    return tuple(_record(heap, x)["value"] for x in nodes)


def tree_nodes(heap: dict, root: Ref) -> List[Ref]:
    seen, out, stack = set(), [], [root]
    while stack:
        r = stack.pop()
        if r.is_void:
            continue
        if r.id in seen:
            raise Undefined("tree structure is not acyclic")
        seen.add(r.id)
        out.append(r)
        rec = _record(heap, r)
        stack.append(rec["right"])
        stack.append(rec["left"])
    return out


def bst_values(heap: dict, root: Ref) -> tuple:
    """Multiset of values, as a sorted tuple."""
    return tuple(sorted(_record(heap, r)["value"] for r in tree_nodes(heap, root)))


def bst_leftmost(heap: dict, root: Ref) -> Ref:
    if root.is_void:
        raise Undefined("leftmost of an empty tree")
    tree_nodes(heap, root)
    while not _record(heap, root)["left"].is_void:
        root = _record(heap, root)["left"]
    return root


def is_bst(heap: dict, root: Ref) -> bool:
    for r in tree_nodes(heap, root):
        rec = _record(heap, r)
        v = rec["value"]
        if any(x > v for x in bst_values(heap, rec["left"])):
            return False
        if any(x < v for x in bst_values(heap, rec["right"])):
            return False
    return True


def in_tree(heap: dict, node: Ref, root: Ref) -> bool:
    return not node.is_void and any(r.id == node.id for r in tree_nodes(heap, root))


def tree_height(heap: dict, root: Ref) -> int:
    tree_nodes(heap, root)

    def h(r: Ref) -> int:
        if r.is_void:
            return 0
        rec = _record(heap, r)
        return 1 + max(h(rec["left"]), h(rec["right"]))

    return h(root)


# ---------------------------------------------------------------------------
# PageRank

def check_graph(reaching: Sequence[Sequence[int]], outbound: Sequence[int]) -> Optional[str]:
    """Reason the graph is unusable, or None.  Nodes are 1-based."""
    n = len(reaching)
    if n == 0 or len(outbound) != n:
        return "reaching and outbound must have the same positive length"
    counts = [0] * n
    for i, src in enumerate(reaching):
        if len(set(src)) != len(src):
            return f"duplicate entries in reaching[{i + 1}]"
        for j in src:
            if not (is_int(j) and 1 <= j <= n):
                return f"node {j!r} out of range"
            counts[j - 1] += 1
    for j in range(n):
        if outbound[j] != counts[j]:
            return f"outbound[{j + 1}] = {outbound[j]} but node {j + 1} has {counts[j]} links"
        if counts[j] == 0:
            return f"node {j + 1} is a sink"
    return None


def pagerank_reference(reaching: Sequence[Sequence[int]], outbound: Sequence[int],
                       dampening: float, eps: float = 1e-12,
                       cap: int = 100000) -> List[float]:
    if not 0 < dampening < 1:
        raise Undefined(f"dampening {dampening} outside (0, 1)")
    n = len(reaching)
    if n == 0 or len(outbound) != n:
        raise Undefined("malformed graph")
    m = np.zeros((n, n))
    for i, src in enumerate(reaching):
        for j in src:
            if not 1 <= j <= n or outbound[j - 1] < 1:
                raise Undefined(f"malformed graph at node {j}")
            m[i, j - 1] += 1.0 / outbound[j - 1]
    x = np.full(n, 1.0 / n)
    base = (1 - dampening) / n
    for _ in range(cap):
        nxt = base + dampening * (m @ x)
        done = np.abs(nxt - x).sum() <= eps
        x = nxt
        if done:
            break
    return [float(t) for t in x]


@lru_cache(maxsize=256)
def _eigenvector_cached(reaching, outbound, dampening):
    return tuple(pagerank_reference(reaching, outbound, dampening))


def l1_distance(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v):
        raise Undefined("l1_distance of vectors with different lengths")
    return float(sum(abs(a - b) for a, b in zip(u, v)))


# ---------------------------------------------------------------------------
# Lemmas the corpus proofs rest on.  Each returns True when the property
# holds for the given instance (vacuously when its premise is false).

def lemma_max_extend(a: Sequence, i: int, lower: int = 1) -> bool:
    """max(a[lower..i+1]) = max(max(a[lower..i]), a[i+1])."""
    return max_slice(a, lower, i + 1, lower) == max(max_slice(a, lower, i, lower),
                                                    a[i + 1 - lower])


def lemma_max_drop_right(a: Sequence, i: int, j: int, lower: int = 1) -> bool:
    """i < j and a[i] >= a[j] imply max(a[i..j]) = max(a[i..j-1])."""
    if not (i < j and a[i - lower] >= a[j - lower]):
        return True
    return max_slice(a, i, j, lower) == max_slice(a, i, j - 1, lower)


def lemma_max_drop_left(a: Sequence, i: int, j: int, lower: int = 1) -> bool:
    """i < j and a[i] <= a[j] imply max(a[i..j]) = max(a[i+1..j])."""
    if not (i < j and a[i - lower] <= a[j - lower]):
        return True
    return max_slice(a, i, j, lower) == max_slice(a, i + 1, j, lower)


def lemma_split(a: Sequence, i: int, j: int, mid: int, key, lower: int = 1) -> bool:
    """For sorted a and i <= mid <= j, key occurs in a[i..j] exactly when
    it occurs in the half that binary search keeps."""
    if not (is_sorted(a) and i <= mid <= j):
        return True
    pivot = a[mid - lower]
    kept = ((key <= pivot and contains(a, i, mid, key, lower))
            or (key > pivot and contains(a, mid + 1, j, key, lower)))
    return contains(a, i, j, key, lower) == kept


def lemma_power_even(x: int, z: int) -> bool:
    """x^(2z) = (x*x)^z."""
    return x ** (2 * z) == (x * x) ** z


def lemma_power_step(x: int, z: int) -> bool:
    """x^z = x * x^(z-1) for z >= 1."""
    return z < 1 or x ** z == x * x ** (z - 1)


# ---------------------------------------------------------------------------
# Registry glue

@dataclass(frozen=True)
class Symbol:
    name: str
    arities: Tuple[int, ...]
    fn: Callable  # fn(args, heap) -> value
    doc: str = ""


def _arr(v) -> Array:
    if isinstance(v, Array):
        return v
    if isinstance(v, tuple):
        return Array(1, list(v))
    raise Undefined(f"expected an array, got {v!r}")


def _nat(v, what: str) -> int:
    if not is_int(v):
        raise Undefined(f"{what} must be an integer, got {v!r}")
    return v


def _ref(v) -> Ref:
    if not isinstance(v, Ref):
        raise Undefined(f"expected a reference, got {v!r}")
    return v


def _bool(v) -> bool:
    if type(v) is not bool:
        raise Undefined(f"expected a boolean, got {v!r}")
    return v


def _seq(v) -> tuple:
    if isinstance(v, (Array, tuple)):
        return tuple(elements(v))
    return (v,)


def _num_list(v) -> list:
    xs = elements(v)
    if not all(is_num(x) and type(x) is not bool for x in xs):
        raise Undefined("expected numbers")
    return xs


def _extreme(fn):
    def run(args, heap):
        xs = elements(args[0])
        if not xs:
            raise Undefined(f"{fn.__name__} of an empty collection")
        return fn(xs)
    return run


def _contains(args, heap):
    if len(args) == 2:
        return args[1] in elements(args[0])
    a = _arr(args[0])
    return contains(a.items, _nat(args[1], "i"), _nat(args[2], "j"), args[3], a.lower)


def _encoded(args, heap):
    v = args[0]
    base = _nat(args[1], "base")
    lower = v.lower if isinstance(v, Array) else 0
    return encoded_value(elements(v), base, lower)


def _knap_args(v, w):
    return elements(_arr(v)), elements(_arr(w))


def _max_knapsack(args, heap):
    v, w = _knap_args(args[1], args[2])
    return max_knapsack(_nat(args[0], "b"), v, w, _nat(args[3], "n"))


def _best_value(args, heap):
    v, w = _knap_args(args[1], args[2])
    return best_value(_nat(args[0], "b"), v, w, _nat(args[3], "j"), _nat(args[4], "n"))


def _graph(reaching, outbound):
    rs = tuple(tuple(elements(r)) for r in elements(reaching))
    return rs, tuple(elements(outbound))


def _eigenvector(args, heap):
    rs, ob = _graph(args[0], args[1])
    d = args[2]
    if not is_num(d):
        raise Undefined("dampening must be a number")
    if check_graph(rs, ob) is not None:
        raise Undefined("eigenvector of a malformed graph")
    return Array(1, list(_eigenvector_cached(rs, ob, float(d))))


def _valid_graph(args, heap):
    rs, ob = _graph(args[0], args[1])
    return check_graph(rs, ob) is None


def _new_array(args, heap):
    lo, hi = _nat(args[0], "lower"), _nat(args[1], "upper")
    if hi < lo - 1:
        raise Undefined(f"new_array with bounds [{lo}..{hi}]")
    return Array(lo, [copy.deepcopy(args[2]) for _ in range(hi - lo + 1)])


def _abs(args, heap):
    x = args[0]
    if not is_num(x) or type(x) is bool:
        raise Undefined("abs of a non-number")
    return abs(x)


def _gap_sorted(args, heap):
    return gap_sorted(elements(args[0]), _nat(args[1], "gap"))


REGISTRY: Dict[str, Symbol] = {}


def register(name: str, arities, fn: Callable, doc: str = "") -> None:
    REGISTRY[name] = Symbol(name, tuple(arities), fn, doc)


register("gcd", (2,), lambda a, h: gcd(_nat(a[0], "gcd"), _nat(a[1], "gcd")),
         "greatest common divisor; undefined for gcd(0, 0)")
register("max", (1,), _extreme(max), "largest element of a non-empty array or slice")
register("min", (1,), _extreme(min), "smallest element of a non-empty array or slice")
register("contains", (2, 4), _contains, "contains(s, key) or contains(a, i, j, key)")
register("sorted", (1,), lambda a, h: is_sorted(elements(a[0])), "ascending order")
register("gap_sorted", (2,), _gap_sorted, "elements d apart are ordered")
register("perm", (2,), lambda a, h: perm(elements(a[0]), elements(a[1])),
         "multiset equality")
register("inversions", (1,), lambda a, h: inversions(elements(a[0])),
         "number of out-of-order pairs")
register("encoded_value", (2,), _encoded, "sum of a[k] * base^k over absolute k")
register("has_base", (2,), lambda a, h: has_base(elements(a[0]), _nat(a[1], "base")),
         "every digit lies in [0..base-1]")
register("max_knapsack", (4,), _max_knapsack, "unbounded knapsack optimum K(b)")
register("best_value", (5,), _best_value, "partial maximum over item types 1..j")
register("distance", (2,), lambda a, h: levenshtein(elements(a[0]), elements(a[1])),
         "Levenshtein distance")
register("levenshtein", (2,), lambda a, h: levenshtein(elements(a[0]), elements(a[1])),
         "Levenshtein distance")
register("rev", (1,), lambda a, h: rev(_seq(a[0])), "reversed sequence")
register("concat", (2,), lambda a, h: concat(_seq(a[0]), _seq(a[1])),
         "sequence concatenation; scalars act as singletons")
register("length", (1,), lambda a, h: len(elements(a[0])), "number of elements")
register("seq", (1,), lambda a, h: list_values(h, _ref(a[0])),
         "values along the next-chain of a list")
register("acyclic", (1,), lambda a, h: acyclic(h, _ref(a[0])),
         "the next-chain reaches Void")
register("values", (1,), lambda a, h: bst_values(h, _ref(a[0])),
         "multiset of values stored in a tree")
register("leftmost", (1,), lambda a, h: bst_leftmost(h, _ref(a[0])),
         "node reached by following left children")
register("is_bst", (1,), lambda a, h: is_bst(h, _ref(a[0])), "search-tree ordering")
register("in_tree", (2,), lambda a, h: in_tree(h, _ref(a[0]), _ref(a[1])),
         "node belongs to the tree rooted at the second argument")
register("height", (1,), lambda a, h: tree_height(h, _ref(a[0])), "tree height")
register("bit", (1,), lambda a, h: int(_bool(a[0])), "1 for true, 0 for false")
register("abs", (1,), _abs, "absolute value")
register("new_array", (3,), _new_array, "array with the given bounds, filled by copies")
register("eigenvector", (3,), _eigenvector, "reference PageRank scores")
register("l1_distance", (2,), lambda a, h: l1_distance(_num_list(a[0]), _num_list(a[1])),
         "sum of absolute differences")
register("valid_graph", (2,), _valid_graph, "well-formed link structure without sinks")
