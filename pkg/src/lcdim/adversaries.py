"""Stream generators: lower-bound constructions and an exhaustive worst case."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .concepts import CapError, ConceptClass, lowest_bit
from .learners import Learner
from .rng import LCG
from .trees import LCTree, branching_levels, is_littlestone_labeled, is_shattered, leaf_paths

DEFAULT_MAX_T = 6


@dataclass
class Stream:
    xs: tuple[int, ...]
    ys: tuple[int, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs, self.ys = tuple(self.xs), tuple(self.ys)
        if len(self.xs) != len(self.ys):
            raise ValueError(f"xs has {len(self.xs)} entries but ys has {len(self.ys)}")

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.xs, self.ys))

    def to_dict(self) -> dict:
        return {"xs": list(self.xs), "ys": list(self.ys), "meta": self.meta}


def save_stream(s: Stream, path) -> None:
    Path(path).write_text(json.dumps(s.to_dict(), sort_keys=True) + "\n")


def load_stream(path) -> Stream:
    d = json.loads(Path(path).read_text())
    return Stream(d["xs"], d["ys"], d.get("meta", {}))


def realizing_concept(C: ConceptClass, xs: Sequence[int], ys: Sequence[int]) -> int | None:
    mask = C.consistent_mask(zip(xs, ys))
    return lowest_bit(mask) if mask else None


def _realizable(C: ConceptClass, name: str, xs, ys, **meta) -> Stream:
    c = realizing_concept(C, xs, ys)
    if c is None:
        raise ValueError(f"{name} produced a non-realizable stream")
    return Stream(xs, ys, {"construction": name, "realizable": True, "concept": c, **meta})


def _sigma(tree: LCTree, sigma: str | None, seed: int | None, length: int) -> str:
    if sigma is None:
        sigma = LCG(0 if seed is None else seed).bits(length)
    if len(sigma) != length or set(sigma) - {"0", "1"}:
        raise ValueError(f"sigma must be a bitstring of length {length}")
    return sigma


def path_stream(tree: LCTree, C: ConceptClass, sigma: str | None = None, seed: int | None = None) -> Stream:
    """Labels read along the root-to-leaf path ``sigma`` of a shattered witness."""
    if not is_shattered(tree, C.universe()):
        raise ValueError("tree is not shattered by the class")
    if not is_littlestone_labeled(tree):
        raise ValueError("tree is not Littlestone-labeled")
    sigma = _sigma(tree, sigma, seed, tree.depth)
    pairs = tree.path_pairs(sigma)
    return _realizable(C, "path", [x for x, _ in pairs], [y for _, y in pairs], sigma=sigma)


def _branching_level_set(tree: LCTree) -> list[int]:
    return [
        t for t in range(tree.depth) if any(tree.branches_at(node) for node in leaf_paths(t))
    ]


def logT_stream(tree: LCTree, C: ConceptClass, T: int, seed: int = 0, sigma: str | None = None) -> Stream:
    """Pairs at the branching levels along a uniform path, padded to length T
    by repeating the last emitted pair."""
    if not is_shattered(tree, C.universe()):
        raise ValueError("tree is not shattered by the class")
    S = _branching_level_set(tree)
    assert len(S) == branching_levels(tree)
    if len(S) > T:
        raise ValueError(f"{len(S)} branching levels exceed horizon T={T}")
    sigma = _sigma(tree, sigma, seed, tree.depth)
    pairs = tree.path_pairs(sigma)
    emitted = [pairs[t] for t in S]
    if not emitted:
        raise ValueError("tree has no branching level to emit")
    emitted += [emitted[-1]] * (T - len(emitted))
    return _realizable(
        C, "logT", [x for x, _ in emitted], [y for _, y in emitted], sigma=sigma, levels=S, emitted=len(S)
    )


def block_stream(tree: LCTree, T: int, seed: int = 0, C: ConceptClass | None = None) -> Stream:
    """Agnostic lower-bound stream on a Littlestone-labeled witness of depth d.

    With k the largest odd number such that k*d <= T, block i repeats the
    level-i instance k times; the remaining rounds reuse the last instance.
    Each round draws a fresh bit and labels it from the node reached by the
    majority bits of the earlier blocks.
    """
    d = tree.depth
    if d < 1:
        raise ValueError("witness must have depth >= 1")
    if T < d:
        raise ValueError(f"horizon T={T} is shorter than the witness depth {d}")
    if not is_littlestone_labeled(tree):
        raise ValueError("tree is not Littlestone-labeled")
    k = T // d
    if k % 2 == 0:
        k -= 1
    rng = LCG(seed)
    xs, ys, bits, majority = [], [], [], ""
    for t in range(T):
        i = min(t // k, d - 1)
        if t < k * d and t % k == 0 and t > 0:
            block = bits[t - k : t]
            majority += "1" if 2 * sum(block) > k else "0"
        b = rng.bit()
        bits.append(b)
        xs.append(tree.level_instances[i])
        ys.append(tree.label(majority[:i], b))
    last = bits[(d - 1) * k : d * k]
    majority += "1" if 2 * sum(last) > k else "0"
    meta = {"construction": "block", "k": k, "majority": majority, "seed": seed}
    if C is not None:
        c = realizing_concept(C, tree.level_instances, [y for _, y in tree.path_pairs(majority)])
        meta["comparator"] = c
    return Stream(xs, ys, meta)


def realizable_streams(C: ConceptClass, xs: Sequence[int]) -> list[Stream]:
    """Every realizable label sequence on ``xs``, in lexicographic order of ys."""
    return [
        Stream(xs, ys, {"construction": "enumerate", "realizable": True, "concept": lowest_bit(m)})
        for ys, m in sorted(C.projection(xs).items())
    ]


def count_mistakes(learner_name: str, C: ConceptClass, stream: Stream, seed: int = 0) -> int:
    lr = Learner(learner_name, C, stream.xs, seed=seed)
    mistakes = 0
    for y in stream.ys:
        mistakes += lr.predict() != y
        lr.observe(y)
    return mistakes


def worst_case_stream(C: ConceptClass, xs: Sequence[int], learner_name: str, max_t: int = DEFAULT_MAX_T):
    """Realizable stream maximizing a deterministic learner's mistakes.

    Against a deterministic learner an adaptive adversary gains nothing over
    a fixed label sequence, so enumerating the projections of C onto xs is an
    exhaustive search. Ties go to the lexicographically smallest ys.
    """
    if learner_name == "agnostic":
        raise ValueError("worst_case_stream needs a deterministic learner")
    if len(xs) > max_t:
        raise CapError(f"T={len(xs)} exceeds the worst-case cap of {max_t}")
    best, best_m = None, -1
    for s in realizable_streams(C, xs):
        m = count_mistakes(learner_name, C, s)
        if m > best_m:
            best, best_m = s, m
    best.meta.update({"construction": "worst_case", "learner": learner_name, "mistakes": best_m})
    return best, best_m
