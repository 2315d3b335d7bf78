"""Exact combinatorial dimensions of finite classes, with witnesses.

All searches work on concept bitmasks. Once an instance has been seen on a
root-to-leaf path every descendant version set is constant on it, so a
repeated instance can never split again; the level-constrained searches
therefore range over sequences of distinct instances only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Any, Sequence

from .concepts import CapError, ConceptClass, VersionSet, lowest_bit, popcount
from .trees import LCTree

DEFAULT_MAX_CONCEPTS = 20
DEFAULT_MAX_INSTANCES = 8
DEFAULT_MAX_T = 16


@dataclass
class DimensionWitness:
    kind: str
    value: int
    exact: bool = True
    witness: Any = field(default=None, repr=False)

    def to_dict(self) -> dict:
        from .trees import tree_to_dict

        out = {"kind": self.kind, "value": self.value, "exact": self.exact}
        if isinstance(self.witness, LCTree):
            out.update(tree_to_dict(self.witness))
        elif self.witness is not None:
            out["witness"] = self.witness
        return out


def _pairs(labels):
    labels = sorted(labels)
    return [(a, b) for i, a in enumerate(labels) for b in labels[i + 1 :]]


# ---------------------------------------------------------------- D(C)


class LittlestoneShattering:
    """Memoized test: does a version set shatter a fixed instance sequence
    with a level-constrained Littlestone tree?"""

    def __init__(self, C: ConceptClass):
        self.C = C
        self._memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def shatters(self, mask: int, xs: tuple[int, ...]) -> bool:
        if not xs:
            return mask != 0
        key = (mask, xs)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        parts = self.C.split(mask, xs[0])
        rest = xs[1:]
        ok = False
        if len(parts) >= 2:
            good = [y for y, m in parts.items() if self.shatters(m, rest)]
            ok = len(good) >= 2
        self._memo[key] = ok
        return ok

    def tree(self, mask: int, xs: tuple[int, ...]) -> LCTree:
        """Witness tree on ``xs``; edge 0 gets the smaller of the chosen labels."""
        edges = {}

        def build(node: str, m: int):
            t = len(node)
            if t == len(xs):
                return
            parts = self.C.split(m, xs[t])
            good = sorted(y for y, sub in parts.items() if self.shatters(sub, xs[t + 1 :]))
            a, b = good[0], good[1]
            edges[(node, 0)], edges[(node, 1)] = a, b
            build(node + "0", parts[a])
            build(node + "1", parts[b])

        build("", mask)
        return LCTree(len(xs), xs, edges)


def dim_level_littlestone(C: ConceptClass) -> DimensionWitness:
    """Largest depth of a level-constrained Littlestone tree shattered by ``C``.

    Shattering is prefix-closed in the instance sequence, so candidate
    sequences are grown one level at a time and only shattered ones survive.
    Depth never exceeds floor(log2 |C|).
    """
    search = LittlestoneShattering(C)
    bound = int(math.log2(len(C))) if len(C) > 1 else 0
    frontier: list[tuple[int, ...]] = [()]
    best: tuple[int, ...] = ()
    for _ in range(bound):
        nxt = [
            xs + (x,)
            for xs in frontier
            for x in range(C.n_instances)
            if x not in xs and search.shatters(C.full_mask, xs + (x,))
        ]
        if not nxt:
            break
        frontier = nxt
        best = nxt[0]
    return DimensionWitness("D", len(best), True, search.tree(C.full_mask, best))


# ---------------------------------------------------------------- L(C)


def dim_littlestone(C: ConceptClass) -> DimensionWitness:
    """Standard Littlestone dimension with per-node instances."""
    memo: dict[int, int] = {}

    def ldim(mask: int) -> int:
        if mask & (mask - 1) == 0:
            return 0
        hit = memo.get(mask)
        if hit is not None:
            return hit
        cap = int(math.log2(popcount(mask)))
        best = 0
        for x in range(C.n_instances):
            parts = C.split(mask, x)
            if len(parts) < 2:
                continue
            vals = sorted((ldim(m) for m in parts.values()), reverse=True)
            best = max(best, 1 + vals[1])
            if best == cap:
                break
        memo[mask] = best
        return best

    def witness_at(mask: int, r: int):
        # descend only as deep as required so every path has length exactly r
        if r == 0:
            return None
        for x in range(C.n_instances):
            parts = C.split(mask, x)
            good = sorted(y for y, m in parts.items() if ldim(m) >= r - 1)
            if len(good) >= 2:
                a, b = good[0], good[1]
                return {
                    "instance": x,
                    "edges": [
                        {"label": a, "subtree": witness_at(parts[a], r - 1)},
                        {"label": b, "subtree": witness_at(parts[b], r - 1)},
                    ],
                }
        raise AssertionError("unreachable")

    value = ldim(C.full_mask)
    return DimensionWitness("L", value, True, witness_at(C.full_mask, value))


def littlestone_tree_shattered(C: ConceptClass, tree, mask: int | None = None) -> bool:
    """Check a nested per-node-instance witness returned by ``dim_littlestone``."""
    m = C.full_mask if mask is None else mask
    if tree is None:
        return m != 0
    x = tree["instance"]
    e0, e1 = tree["edges"]
    if e0["label"] == e1["label"]:
        return False
    return all(
        littlestone_tree_shattered(C, e["subtree"], C.restrict_mask(m, x, e["label"]))
        for e in (e0, e1)
    )


def littlestone_tree_depth(tree) -> int:
    if tree is None:
        return 0
    return 1 + min(littlestone_tree_depth(e["subtree"]) for e in tree["edges"])


# ---------------------------------------------------------------- B(V, xs), B(C)


class BranchingPotential:
    """Memoized B(V, xs): the best guaranteed path branching over trees on ``xs``
    shattered by V.

    With the instance sequence fixed, sibling subtrees are independent, so the
    value of a node depends only on its own version set and the remaining
    suffix. At each level a node either branches on two distinct realized
    labels (+1) or passes on a single realized label.
    """

    def __init__(self, C: ConceptClass):
        self.C = C
        self._memo: dict[tuple[int, tuple[int, ...]], int] = {}

    def value(self, mask: int, xs: tuple[int, ...]) -> int:
        if not mask:
            raise ValueError("empty version set")
        if not xs:
            return 0
        key = (mask, xs)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        parts = self.C.split(mask, xs[0])
        rest = xs[1:]
        vals = sorted((self.value(m, rest) for m in parts.values()), reverse=True)
        best = vals[0]
        if len(vals) >= 2:
            best = max(best, 1 + vals[1])
        self._memo[key] = best
        return best

    def tree(self, mask: int, xs: tuple[int, ...]) -> LCTree:
        edges = {}

        def build(node: str, m: int):
            t = len(node)
            if t == len(xs):
                return
            target = self.value(m, xs[t:])
            parts = self.C.split(m, xs[t])
            rest = xs[t + 1 :]
            ranked = sorted(parts, key=lambda y: (-self.value(parts[y], rest), y))
            if len(ranked) >= 2 and 1 + self.value(parts[ranked[1]], rest) == target:
                a, b = sorted(ranked[:2])
                edges[(node, 0)], edges[(node, 1)] = a, b
                build(node + "0", parts[a])
                build(node + "1", parts[b])
            else:
                y = ranked[0]
                edges[(node, 0)] = edges[(node, 1)] = y
                build(node + "0", parts[y])
                build(node + "1", parts[y])

        build("", mask)
        return LCTree(len(xs), tuple(xs), edges)


def branching_potential(V: VersionSet, xs: Sequence[int], cache: BranchingPotential | None = None) -> int:
    if not V.mask:
        raise ValueError("empty version set")
    bp = cache or BranchingPotential(V.class_ref)
    return bp.value(V.mask, tuple(xs))


def dim_branching(C: ConceptClass, seq_cap: int | None = None, littlestone: int | None = None) -> DimensionWitness:
    """B(C) as the maximum of B(C, xs) over instance sequences of length <= seq_cap.

    ``exact`` is set when the value reaches L(C) (B <= L always) or when the cap
    covers every distinct-instance sequence (repeats never add branching, and
    B(C, xs) is non-decreasing under appending).
    """
    n = C.n_instances
    cap = n if seq_cap is None else seq_cap
    if cap < 1:
        raise ValueError("seq_cap must be >= 1")
    L = dim_littlestone(C).value if littlestone is None else littlestone
    length = min(cap, n)
    bp = BranchingPotential(C)
    best, best_xs = -1, ()
    for xs in permutations(range(n), length):
        v = bp.value(C.full_mask, xs)
        if v > best:
            best, best_xs = v, xs
            if best == L:
                break
    exact = best == L or cap >= n
    return DimensionWitness("B", best, exact, bp.tree(C.full_mask, best_xs))


# ---------------------------------------------------------------- S(V)


class ShatteredSubsequences:
    """Sets of position-subsequences of a fixed ``xs`` shattered by version sets.

    Subsequences are bitmasks over positions of ``xs``. For a set V and start
    position i, a subsequence beginning at position j is shattered iff two
    distinct labels at x_j each leave a subset shattering the tail.
    """

    def __init__(self, C: ConceptClass, xs: Sequence[int], max_t: int = DEFAULT_MAX_T):
        if len(xs) > max_t:
            raise CapError(f"sequence length {len(xs)} exceeds cap {max_t}")
        self.C = C
        self.xs = tuple(xs)
        self._memo: dict[tuple[int, int], frozenset[int]] = {}
        self._count: dict[int, int] = {}

    def shattered(self, mask: int, start: int = 0) -> frozenset[int]:
        key = (mask, start)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = {0}
        for j in range(start, len(self.xs)):
            parts = self.C.split(mask, self.xs[j])
            if len(parts) < 2:
                continue
            tails = [self.shattered(m, j + 1) for m in parts.values()]
            bit = 1 << j
            for a, b in combinations(tails, 2):
                out.update(q | bit for q in a & b)
        res = frozenset(out)
        self._memo[key] = res
        return res

    def count(self, mask: int) -> int:
        if not mask:
            raise ValueError("empty version set")
        hit = self._count.get(mask)
        if hit is None:
            hit = self._count[mask] = len(self.shattered(mask))
        return hit


def count_shattered_subsequences(
    V: VersionSet, xs: Sequence[int], max_t: int = DEFAULT_MAX_T, cache: ShatteredSubsequences | None = None
) -> int:
    if not V.mask:
        raise ValueError("empty version set")
    counter = cache or ShatteredSubsequences(V.class_ref, xs, max_t)
    return counter.count(V.mask)


def sauer_bound(T: int, D: int) -> int:
    return sum(math.comb(T, i) for i in range(min(D, T) + 1))


# ---------------------------------------------------------------- DS, G, NT


def _ds_core(vectors: set[tuple[int, ...]], d: int) -> set[tuple[int, ...]]:
    """Largest subset in which every vector has an i-neighbour for every i."""
    F = set(vectors)
    changed = True
    while changed and F:
        changed = False
        for i in range(d):
            groups: dict[tuple, int] = {}
            for f in F:
                k = f[:i] + f[i + 1 :]
                groups[k] = groups.get(k, 0) + 1
            bad = {f for f in F if groups[f[:i] + f[i + 1 :]] < 2}
            if bad:
                F -= bad
                changed = True
    return F


def dim_ds(
    C: ConceptClass, max_concepts: int = DEFAULT_MAX_CONCEPTS, max_instances: int = DEFAULT_MAX_INSTANCES
) -> DimensionWitness:
    C.check_caps(max_concepts, max_instances)
    best = DimensionWitness("DS", 0, True, {"sequence": [], "vectors": []})
    for d in range(1, C.n_instances + 1):
        found = None
        for S in combinations(range(C.n_instances), d):
            F = _ds_core(set(C.projection(S)), d)
            if F:
                found = {"sequence": list(S), "vectors": [list(f) for f in sorted(F)]}
                break
        if found is None:
            break
        best = DimensionWitness("DS", d, True, found)
    return best


def check_ds_witness(C: ConceptClass, witness: dict) -> bool:
    S = tuple(witness["sequence"])
    F = {tuple(f) for f in witness["vectors"]}
    if not S:
        return True
    if not F or not F <= set(C.projection(S)):
        return False
    return _ds_core(F, len(S)) == F


def _g_shatters(C: ConceptClass, S: tuple[int, ...], f: tuple[int, ...]) -> bool:
    patterns = set()
    for c in C.concepts:
        patterns.add(sum(1 << k for k, x in enumerate(S) if c[x] == f[k]))
    return len(patterns) == 1 << len(S)


def dim_graph(C: ConceptClass) -> DimensionWitness:
    best = DimensionWitness("G", 0, True, {"set": [], "f": []})
    for d in range(1, C.n_instances + 1):
        found = None
        for S in combinations(range(C.n_instances), d):
            # taking T = S forces f itself to be a behaviour of some concept
            for f in sorted(C.projection(S)):
                if _g_shatters(C, S, f):
                    found = {"set": list(S), "f": list(f)}
                    break
            if found:
                break
        if found is None:
            break
        best = DimensionWitness("G", d, True, found)
    return best


def check_g_witness(C: ConceptClass, witness: dict) -> bool:
    return _g_shatters(C, tuple(witness["set"]), tuple(witness["f"]))


def dim_nt(C: ConceptClass) -> DimensionWitness:
    """Natarajan-threshold dimension by chain extension.

    A chain state for a sequence of length d is the tuple of masks
    (A_0, ..., A_d) where A_k holds the concepts that agree with f on the
    first k positions and with g on the rest. Appending instance x with new
    values g' != f' keeps A_k for k <= d restricted to g', and adds
    A_{d+1} = A_d restricted to f'.
    """
    memo: dict[tuple[int, ...], tuple[int, tuple]] = {}

    def extend(state: tuple[int, ...]) -> tuple[int, tuple]:
        hit = memo.get(state)
        if hit is not None:
            return hit
        best: tuple[int, tuple] = (0, ())
        last = state[-1]
        for x in range(C.n_instances):
            common = None
            for A in state:
                labels = set(C.split(A, x))
                common = labels if common is None else common & labels
                if not common:
                    break
            if not common:
                continue
            f_choices = sorted(C.split(last, x))
            for g in sorted(common):
                for f in f_choices:
                    if f == g:
                        continue
                    nxt = tuple(C.restrict_mask(A, x, g) for A in state) + (C.restrict_mask(last, x, f),)
                    depth, tail = extend(nxt)
                    if depth + 1 > best[0]:
                        best = (depth + 1, ((x, g, f),) + tail)
        memo[state] = best
        return best

    depth, steps = extend((C.full_mask,))
    seq = [s[0] for s in steps]
    g_vals = [s[1] for s in steps]
    f_vals = [s[2] for s in steps]
    chain = []
    for k in range(depth + 1):
        target = [(seq[j], f_vals[j] if j < k else g_vals[j]) for j in range(depth)]
        chain.append(lowest_bit(C.consistent_mask(target)))
    return DimensionWitness("NT", depth, True, {"sequence": seq, "f": f_vals, "g": g_vals, "chain": chain})


def check_nt_witness(C: ConceptClass, witness: dict) -> bool:
    S, f, g, chain = witness["sequence"], witness["f"], witness["g"], witness["chain"]
    d = len(S)
    if any(f[j] == g[j] for j in range(d)) or len(chain) != d + 1:
        return False
    for i in range(1, d + 2):
        c = C.concepts[chain[i - 1]]
        for j in range(1, d + 1):
            want = f[j - 1] if j < i else g[j - 1]
            if c[S[j - 1]] != want:
                return False
    return True
