"""Independent reference implementations used only by the tests.

Nothing here shares code with the memoized engines: trees are enumerated
whole and judged with the plain checkers from ``lcdim.trees``.
"""

from __future__ import annotations

from itertools import product

from lcdim.trees import LCTree, is_littlestone_labeled, is_shattered, min_path_branching, node_addresses


def _consistent(C, pairs):
    return [c for c in C.concepts if all(c[x] == y for x, y in pairs)]


def enumerate_trees(C, xs, littlestone_only=False):
    """Every labelled tree on ``xs`` whose paths stay consistent with C.

    Edge labels at a node range over labels realized by the concepts still
    consistent with the path; branching nodes list the smaller label on the
    left edge (mirror images shatter alike). Without ``littlestone_only`` both
    children of a non-branching node are enumerated independently.
    """
    d = len(xs)
    nodes = list(node_addresses(d))

    def rec(i, edges, pairs_at):
        if i == len(nodes):
            yield dict(edges)
            return
        node = nodes[i]
        t = len(node)
        alive = _consistent(C, pairs_at[node])
        labels = sorted({c[xs[t]] for c in alive})
        choices = [(a, b) for a in labels for b in labels if a < b]
        if not littlestone_only:
            choices += [(a, a) for a in labels]
        for a, b in choices:
            edges[(node, 0)], edges[(node, 1)] = a, b
            pairs_at[node + "0"] = pairs_at[node] + [(xs[t], a)]
            pairs_at[node + "1"] = pairs_at[node] + [(xs[t], b)]
            yield from rec(i + 1, edges, pairs_at)
        edges.pop((node, 0), None)
        edges.pop((node, 1), None)

    yield from rec(0, {}, {"": []})


def naive_branching_potential(C, xs):
    best = 0
    V = C.universe()
    for edges in enumerate_trees(C, xs):
        tree = LCTree(len(xs), tuple(xs), edges)
        assert is_shattered(tree, V)
        best = max(best, min_path_branching(tree))
    return best


def naive_level_littlestone(C, max_depth=3):
    V = C.universe()
    best = 0
    for r in range(1, max_depth + 1):
        found = False
        for xs in product(range(C.n_instances), repeat=r):
            for edges in enumerate_trees(C, xs, littlestone_only=True):
                tree = LCTree(r, xs, edges)
                if is_shattered(tree, V) and is_littlestone_labeled(tree):
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = r
    return best


def brute_littlestone(C, mask=None):
    """Unmemoized per-node Littlestone recursion."""
    members = list(range(len(C))) if mask is None else mask
    if len(members) <= 1:
        return 0
    best = 0
    for x in range(C.n_instances):
        groups = {}
        for i in members:
            groups.setdefault(C.concepts[i][x], []).append(i)
        if len(groups) < 2:
            continue
        vals = sorted((brute_littlestone(C, g) for g in groups.values()), reverse=True)
        if len(vals) >= 2:
            best = max(best, 1 + vals[1])
    return best


def lp_game_value(C, xs, members=None):
    """Minimax expected mistakes by solving each round's matrix game as an LP."""
    import numpy as np
    from scipy.optimize import linprog

    members = list(range(len(C))) if members is None else members
    if not xs:
        return 0.0
    groups = {}
    for i in members:
        groups.setdefault(C.concepts[i][xs[0]], []).append(i)
    labels = sorted(groups)
    cont = [lp_game_value(C, xs[1:], groups[y]) for y in labels]
    k = len(labels)
    # variables p_1..p_k, v ; minimize v s.t. (1 - p_y) + cont_y <= v
    c = np.zeros(k + 1)
    c[-1] = 1
    A = np.zeros((k, k + 1))
    b = np.zeros(k)
    for j in range(k):
        A[j, j] = -1
        A[j, -1] = -1
        b[j] = -1 - cont[j]
    res = linprog(c, A_ub=A, b_ub=b, A_eq=[[1] * k + [0]], b_eq=[1], bounds=[(0, 1)] * k + [(None, None)])
    assert res.success
    return res.x[-1]


def brute_shattered_count(C, xs):
    """Count subsequences of xs that some level-constrained Littlestone tree
    shatters, by enumerating trees on each subsequence."""
    T = len(xs)
    V = C.universe()
    count = 0
    for sel in product((0, 1), repeat=T):
        sub = tuple(x for x, s in zip(xs, sel) if s)
        if not sub:
            count += 1
            continue
        for edges in enumerate_trees(C, sub, littlestone_only=True):
            if is_shattered(LCTree(len(sub), sub, edges), V):
                count += 1
                break
    return count
