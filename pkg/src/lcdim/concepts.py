"""Finite multiclass concept classes, version sets and class generators.

A concept is a label vector over instances ``0..n-1``. Version sets are
stored as integer bitmasks over concept indices so they can key memo tables
directly.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

MAX_MATERIALIZED = 1 << 16


class CapError(ValueError):
    """A hard size cap was exceeded."""


class ClassFileError(ValueError):
    """A class file could not be parsed."""


class RealizabilityError(RuntimeError):
    """A realizable run received a label no surviving concept agrees with."""


@dataclass(frozen=True)
class ConceptClass:
    n_instances: int
    concepts: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        if self.n_instances < 1:
            raise ValueError("n_instances must be positive")
        if not self.concepts:
            raise ValueError("concept class must be non-empty")
        for i, c in enumerate(self.concepts):
            if len(c) != self.n_instances:
                raise ValueError(
                    f"concept {i} has {len(c)} entries, expected {self.n_instances}"
                )
            if any(y < 0 for y in c):
                raise ValueError(f"concept {i} has a negative label")
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError("duplicate concepts; use ConceptClass.build to deduplicate")

    @classmethod
    def build(cls, n_instances: int, concepts: Iterable[Sequence[int]], name: str = "") -> ConceptClass:
        """Construct a class, dropping duplicate concepts (first occurrence wins)."""
        seen = {}
        for c in concepts:
            seen.setdefault(tuple(int(y) for y in c), None)
        return cls(n_instances, tuple(seen), name)

    def __len__(self) -> int:
        return len(self.concepts)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.concepts)) - 1

    @cached_property
    def label_masks(self) -> tuple[dict[int, int], ...]:
        """Per instance, map label -> bitmask of concepts emitting it."""
        out = []
        for x in range(self.n_instances):
            m: dict[int, int] = {}
            for i, c in enumerate(self.concepts):
                m[c[x]] = m.get(c[x], 0) | (1 << i)
            out.append(m)
        return tuple(out)

    def canonical(self) -> ConceptClass:
        """Same class with concepts in lexicographic order (the on-disk order)."""
        return ConceptClass(self.n_instances, tuple(sorted(self.concepts)), self.name)

    def labels(self) -> list[int]:
        return sorted({y for c in self.concepts for y in c})

    def universe(self) -> VersionSet:
        return VersionSet(self, self.full_mask)

    def version_set(self, members: Iterable[int]) -> VersionSet:
        mask = 0
        for i in members:
            if not 0 <= i < len(self.concepts):
                raise IndexError(f"concept index {i} out of range")
            mask |= 1 << i
        return VersionSet(self, mask)

    # mask-level primitives used by the search code
    def split(self, mask: int, x: int) -> dict[int, int]:
        """Partition ``mask`` by the label each member assigns to ``x``."""
        parts = {}
        for y, m in self.label_masks[x].items():
            sub = mask & m
            if sub:
                parts[y] = sub
        return parts

    def restrict_mask(self, mask: int, x: int, y: int) -> int:
        return mask & self.label_masks[x].get(y, 0)

    def consistent_mask(self, pairs: Iterable[tuple[int, int]], mask: int | None = None) -> int:
        m = self.full_mask if mask is None else mask
        for x, y in pairs:
            m = self.restrict_mask(m, x, y)
        return m

    def projection(self, xs: Sequence[int], mask: int | None = None) -> dict[tuple[int, ...], int]:
        """Distinct behaviour vectors on ``xs`` -> mask of concepts realizing each."""
        m = self.full_mask if mask is None else mask
        out: dict[tuple[int, ...], int] = {}
        for i in iter_bits(m):
            key = tuple(self.concepts[i][x] for x in xs)
            out[key] = out.get(key, 0) | (1 << i)
        return out

    def check_caps(self, max_concepts: int | None = None, max_instances: int | None = None) -> None:
        if max_concepts is not None and len(self.concepts) > max_concepts:
            raise CapError(f"class has {len(self.concepts)} concepts, cap is {max_concepts}")
        if max_instances is not None and self.n_instances > max_instances:
            raise CapError(f"class has {self.n_instances} instances, cap is {max_instances}")


@dataclass(frozen=True)
class VersionSet:
    class_ref: ConceptClass
    mask: int

    @property
    def members(self) -> frozenset[int]:
        return frozenset(iter_bits(self.mask))

    def __len__(self) -> int:
        return popcount(self.mask)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __le__(self, other: VersionSet) -> bool:
        return self.mask & ~other.mask == 0


def iter_bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def realized_labels(V: VersionSet, x: int) -> list[int]:
    if not V.mask:
        raise ValueError("empty version set")
    C = V.class_ref
    if not 0 <= x < C.n_instances:
        raise IndexError(f"instance {x} out of range")
    return sorted(C.split(V.mask, x))


def restrict(V: VersionSet, x: int, y: int) -> VersionSet:
    return VersionSet(V.class_ref, V.class_ref.restrict_mask(V.mask, x, y))


# ---------------------------------------------------------------- generators


def gen_constants(m: int, n: int) -> ConceptClass:
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    return ConceptClass(n, tuple((i,) * n for i in range(m)), f"constants(m={m},n={n})")


def gen_full(labels: int, n: int, cap: int = MAX_MATERIALIZED) -> ConceptClass:
    if labels < 1 or n < 1:
        raise ValueError("labels and n must be >= 1")
    if labels**n > cap:
        raise CapError(f"gen_full would materialize {labels**n} concepts, cap is {cap}")
    return ConceptClass(n, tuple(product(range(labels), repeat=n)), f"full(labels={labels},n={n})")


def _heap_index(address: str) -> int:
    """Heap position of a node address in a complete binary tree."""
    return (1 << len(address)) - 1 + (int(address, 2) if address else 0)


def gen_branch_class(depth: int, unique_off_branch: bool = True) -> ConceptClass:
    """One concept per root-to-leaf branch of a depth-``depth`` tree.

    Instances are the tree's internal nodes in heap order. On-branch nodes get
    the branch's edge bit; off-branch nodes get label 0, or a label private to
    the concept (allocated from 2 upwards) when ``unique_off_branch`` is set.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = (1 << depth) - 1
    concepts = []
    for k, bits in enumerate(product("01", repeat=depth)):
        branch = "".join(bits)
        fill = 2 + k if unique_off_branch else 0
        c = [fill] * n
        for t in range(depth):
            c[_heap_index(branch[:t])] = int(branch[t])
        concepts.append(tuple(c))
    tag = "unique" if unique_off_branch else "zero"
    return ConceptClass(n, tuple(concepts), f"branch(depth={depth},{tag})")


def gen_edge_labeled_branch_class(depth: int) -> ConceptClass:
    """Branches of a depth-``depth`` tree with one instance per level and a
    globally distinct label on every edge."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    concepts = []
    for bits in product("01", repeat=depth):
        branch = "".join(bits)
        # label of the edge into node branch[:t+1] is that node's heap index - 1
        concepts.append(tuple(_heap_index(branch[: t + 1]) - 1 for t in range(depth)))
    return ConceptClass(depth, tuple(concepts), f"edge_labeled_branch(depth={depth})")


def gen_one_branch_per_level_class(depth: int) -> ConceptClass:
    """Branches of a tree in which every level holds exactly one splitting node.

    Splits are scheduled in breadth-first order of a virtual complete binary
    tree of height ``depth``, so the truncation has ``2**depth - 1`` levels
    (one instance each), ``2**depth`` branches, and every branch passes through
    exactly ``depth`` splitting nodes. Every edge carries a fresh label.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    schedule = ["".join(b) for k in range(depth) for b in product("01", repeat=k)]
    next_label = 0
    # each frontier entry: (virtual address, labels along the real path)
    frontier: list[tuple[str, list[int]]] = [("", [])]
    for split_at in schedule:
        new_frontier = []
        for addr, labels in frontier:
            if addr == split_at:
                for b in "01":
                    new_frontier.append((addr + b, labels + [next_label]))
                    next_label += 1
            else:
                new_frontier.append((addr, labels + [next_label]))
                next_label += 1
        frontier = new_frontier
    concepts = tuple(tuple(labels) for _, labels in sorted(frontier))
    return ConceptClass(len(schedule), concepts, f"one_branch_per_level(depth={depth})")


def gen_nt_chain(d: int) -> ConceptClass:
    """Threshold chain: concept k labels instances j < k with 1, the rest 0."""
    if d < 1:
        raise ValueError("d must be >= 1")
    concepts = tuple(tuple(1 if j < k else 0 for j in range(d)) for k in range(d + 1))
    return ConceptClass(d, concepts, f"nt_chain(d={d})")


def gen_random(seed: int, max_concepts: int, n: int, labels: int, min_concepts: int = 1) -> ConceptClass:
    """Random table class; size drawn uniformly in [min_concepts, max_concepts]
    before deduplication."""
    rng = random.Random(seed)
    size = rng.randint(min_concepts, max_concepts)
    rows = [tuple(rng.randrange(labels) for _ in range(n)) for _ in range(size)]
    return ConceptClass.build(n, rows, f"random(seed={seed},k<={max_concepts},n={n},labels={labels})")


GENERATORS = {
    "constants": gen_constants,
    "full": gen_full,
    "branch": gen_branch_class,
    "edge_labeled_branch": gen_edge_labeled_branch_class,
    "one_branch_per_level": gen_one_branch_per_level_class,
    "nt_chain": gen_nt_chain,
    "random": gen_random,
}


# ---------------------------------------------------------------- file I/O


def class_to_dict(C: ConceptClass) -> dict:
    return {
        "name": C.name,
        "n_instances": C.n_instances,
        "concepts": [list(c) for c in sorted(C.concepts)],
    }


def save_class(C: ConceptClass, path) -> None:
    Path(path).write_text(json.dumps(class_to_dict(C)) + "\n")


def class_from_dict(data) -> ConceptClass:
    if not isinstance(data, dict):
        raise ClassFileError("top level must be a JSON object")
    for key in ("n_instances", "concepts"):
        if key not in data:
            raise ClassFileError(f"missing field {key!r}")
    n = data["n_instances"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ClassFileError(f"field 'n_instances': expected positive int, got {n!r}")
    rows = data["concepts"]
    if not isinstance(rows, list) or not rows:
        raise ClassFileError("field 'concepts': expected a non-empty list")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ClassFileError(f"concepts[{i}]: expected a list of {n} labels, got {row!r}")
        for j, y in enumerate(row):
            if not isinstance(y, int) or isinstance(y, bool) or y < 0:
                raise ClassFileError(f"concepts[{i}][{j}]: expected nonnegative int, got {y!r}")
    C = ConceptClass.build(n, rows, str(data.get("name", "")))
    if len(C) < len(rows):
        log.warning("dropped %d duplicate concept(s) while loading", len(rows) - len(C))
    return C


def load_class(path) -> ConceptClass:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ClassFileError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    try:
        return class_from_dict(data)
    except ClassFileError as e:
        raise ClassFileError(f"{path}: {e}") from e
