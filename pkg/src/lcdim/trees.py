"""Level-constrained trees: one instance per level, a label on every edge.

Nodes are addressed by bitstrings (``""`` is the root, ``"01"`` is the right
child of the root's left child). ``edge_labels[(node, b)]`` is the label on
the edge leaving ``node`` in direction ``b``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Mapping, Sequence

from .concepts import ConceptClass, VersionSet, lowest_bit


def node_addresses(depth: int):
    """All internal node addresses, level by level."""
    for t in range(depth):
        for bits in product("01", repeat=t):
            yield "".join(bits)


def leaf_paths(depth: int):
    for bits in product("01", repeat=depth):
        yield "".join(bits)


@dataclass(frozen=True)
class LCTree:
    depth: int
    level_instances: tuple[int, ...]
    edge_labels: Mapping[tuple[str, int], int] = field(hash=False)

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if len(self.level_instances) != self.depth:
            raise ValueError(
                f"need {self.depth} level instances, got {len(self.level_instances)}"
            )
        for node in node_addresses(self.depth):
            for b in (0, 1):
                if (node, b) not in self.edge_labels:
                    raise ValueError(f"missing edge label at node {node!r}, bit {b}")

    def label(self, node: str, b: int) -> int:
        return self.edge_labels[(node, b)]

    def branches_at(self, node: str) -> bool:
        return self.edge_labels[(node, 0)] != self.edge_labels[(node, 1)]

    def path_pairs(self, sigma: str) -> list[tuple[int, int]]:
        """(instance, label) pairs read off along the leaf path ``sigma``."""
        if len(sigma) != self.depth:
            raise ValueError(f"path length {len(sigma)} != depth {self.depth}")
        return [
            (self.level_instances[t], self.edge_labels[(sigma[:t], int(sigma[t]))])
            for t in range(self.depth)
        ]

    def subtree_equal(self, a: str, b: str) -> bool:
        """True if the subtrees rooted at same-level nodes ``a`` and ``b`` carry identical labels."""
        rest = self.depth - len(a)
        for suffix in node_addresses(rest):
            for bit in (0, 1):
                if self.edge_labels[(a + suffix, bit)] != self.edge_labels[(b + suffix, bit)]:
                    return False
        return True


@dataclass(frozen=True)
class PathReport:
    path: str
    branching_count: int


def tree_from_function(level_instances: Sequence[int], label_fn) -> LCTree:
    """Build a tree from ``label_fn(node, b) -> label``."""
    d = len(level_instances)
    edges = {(node, b): label_fn(node, b) for node in node_addresses(d) for b in (0, 1)}
    return LCTree(d, tuple(level_instances), edges)


def is_littlestone_labeled(tree: LCTree) -> bool:
    return all(tree.branches_at(node) for node in node_addresses(tree.depth))


def is_shattered(tree: LCTree, V: VersionSet) -> bool:
    if not V.mask:
        return False
    C = V.class_ref
    for x in tree.level_instances:
        if not 0 <= x < C.n_instances:
            raise IndexError(f"tree instance {x} out of range")
    return all(
        C.consistent_mask(tree.path_pairs(sigma), V.mask) for sigma in leaf_paths(tree.depth)
    )


def path_branching(tree: LCTree, sigma: str) -> PathReport:
    if len(sigma) != tree.depth:
        raise ValueError(f"path length {len(sigma)} != depth {tree.depth}")
    count = sum(tree.branches_at(sigma[:t]) for t in range(tree.depth))
    return PathReport(sigma, count)


def min_path_branching(tree: LCTree) -> int:
    return min(path_branching(tree, s).branching_count for s in leaf_paths(tree.depth))


def branching_levels(tree: LCTree) -> int:
    return sum(
        any(tree.branches_at("".join(bits)) for bits in product("01", repeat=t))
        for t in range(tree.depth)
    )


def normalize_tree(tree: LCTree, C: ConceptClass, q: int) -> LCTree:
    """Make every path branch exactly ``q`` times and mirror non-branching nodes.

    Once a path has accumulated ``q`` branchings, the subtree below it is
    relabelled with the outputs of the lowest-index concept consistent with the
    path so far (subtrees that already have no branching are left alone).
    Then, top-down, every non-branching node gets its left subtree copied over
    its right one.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    V = C.universe()
    if not is_shattered(tree, V):
        raise ValueError("tree is not shattered by the class")
    if min_path_branching(tree) < q:
        raise ValueError(f"some path branches fewer than q={q} times")

    d = tree.depth
    xs = tree.level_instances
    edges = dict(tree.edge_labels)

    def has_branching_below(node: str) -> bool:
        return any(
            edges[(node + s, 0)] != edges[(node + s, 1)] for s in node_addresses(d - len(node))
        )

    def freeze(node: str, count: int, pairs: list[tuple[int, int]]):
        t = len(node)
        if t == d:
            return
        if count == q:
            if has_branching_below(node):
                c = C.concepts[lowest_bit(C.consistent_mask(pairs))]
                for s in node_addresses(d - t):
                    y = c[xs[t + len(s)]]
                    edges[(node + s, 0)] = y
                    edges[(node + s, 1)] = y
            return
        step = int(edges[(node, 0)] != edges[(node, 1)])
        for b in (0, 1):
            freeze(node + str(b), count + step, pairs + [(xs[t], edges[(node, b)])])

    def symmetrize(node: str):
        t = len(node)
        if t == d:
            return
        if edges[(node, 0)] == edges[(node, 1)]:
            symmetrize(node + "0")
            for s in node_addresses(d - t - 1):
                for b in (0, 1):
                    edges[(node + "1" + s, b)] = edges[(node + "0" + s, b)]
        else:
            symmetrize(node + "0")
            symmetrize(node + "1")

    freeze("", 0, [])
    symmetrize("")
    return LCTree(d, xs, edges)


# ---------------------------------------------------------------- file I/O


def tree_to_dict(tree: LCTree) -> dict:
    edges = sorted(tree.edge_labels.items())
    return {
        "depth": tree.depth,
        "level_instances": list(tree.level_instances),
        "edges": [{"node": node, "b": b, "label": y} for (node, b), y in edges],
    }


def tree_from_dict(data: dict) -> LCTree:
    try:
        edges = {(e["node"], int(e["b"])): int(e["label"]) for e in data["edges"]}
        return LCTree(int(data["depth"]), tuple(int(x) for x in data["level_instances"]), edges)
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed tree: {e}") from e


def save_tree(tree: LCTree, path) -> None:
    Path(path).write_text(json.dumps(tree_to_dict(tree)) + "\n")


def load_tree(path) -> LCTree:
    return tree_from_dict(json.loads(Path(path).read_text()))
