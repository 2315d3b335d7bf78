"""Online learners for the transductive protocol.

Realizable learners (``bp``, ``ssh``, ``ssh-conservative``) are deterministic
functions of the instance sequence and the labels seen so far. The agnostic
learner runs multiplicative weights over experts, each expert being a
conservative ``ssh`` learner that is allowed to update only on a fixed subset
of rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Sequence

import numpy as np

from .concepts import CapError, ConceptClass, RealizabilityError, VersionSet
from .dimensions import BranchingPotential, ShatteredSubsequences, dim_branching, dim_level_littlestone
from .rng import LCG

LEARNERS = ("bp", "ssh", "ssh-conservative", "agnostic")
DEFAULT_MAX_EXPERTS = 5000

# memo tables are keyed on the class (and sequence) so repeated runs share work
_BP_CACHE: dict[ConceptClass, BranchingPotential] = {}
_SSH_CACHE: dict[tuple[ConceptClass, tuple[int, ...]], ShatteredSubsequences] = {}


def bp_cache(C: ConceptClass) -> BranchingPotential:
    hit = _BP_CACHE.get(C)
    if hit is None:
        hit = _BP_CACHE[C] = BranchingPotential(C)
    return hit


def ssh_cache(C: ConceptClass, xs: Sequence[int], max_t: int | None = None) -> ShatteredSubsequences:
    key = (C, tuple(xs))
    hit = _SSH_CACHE.get(key)
    if hit is None:
        kwargs = {} if max_t is None else {"max_t": max_t}
        hit = _SSH_CACHE[key] = ShatteredSubsequences(C, xs, **kwargs)
    return hit


def clear_caches() -> None:
    _BP_CACHE.clear()
    _SSH_CACHE.clear()


@dataclass
class LearnerState:
    xs: tuple[int, ...]
    V: VersionSet
    t: int = 1
    rng_seed: int | None = None
    conservative: bool = False
    cache: Any = field(default=None, repr=False, compare=False)

    @property
    def C(self) -> ConceptClass:
        return self.V.class_ref

    @property
    def x(self) -> int:
        if not 1 <= self.t <= len(self.xs):
            raise IndexError(f"round {self.t} outside 1..{len(self.xs)}")
        return self.xs[self.t - 1]


def _argmax_label(scores: dict[int, int]) -> int:
    return min(scores, key=lambda y: (-scores[y], y))


def _restrict_or_raise(state: LearnerState, y: int) -> None:
    mask = state.C.restrict_mask(state.V.mask, state.x, y)
    if not mask:
        raise RealizabilityError(f"non-realizable stream: no concept labels x={state.x} with {y} at round {state.t}")
    state.V = VersionSet(state.C, mask)


# ---------------------------------------------------------------- branching potential


def bp_init(C: ConceptClass, xs: Sequence[int]) -> LearnerState:
    return LearnerState(tuple(xs), C.universe(), cache=bp_cache(C))


def bp_potential(state: LearnerState) -> int:
    """B(V_t, x_{t:T}); after the last round this is B(V, empty) = 0."""
    return state.cache.value(state.V.mask, state.xs[state.t - 1 :])


def bp_predict(state: LearnerState) -> int:
    parts = state.C.split(state.V.mask, state.x)
    if len(parts) == 1:
        return next(iter(parts))
    rest = state.xs[state.t :]
    return _argmax_label({y: state.cache.value(m, rest) for y, m in parts.items()})


def bp_observe(state: LearnerState, y: int) -> LearnerState:
    _restrict_or_raise(state, y)
    state.t += 1
    return state


# ---------------------------------------------------------------- subsequence halving


def ssh_init(C: ConceptClass, xs: Sequence[int], conservative: bool = False) -> LearnerState:
    return LearnerState(tuple(xs), C.universe(), conservative=conservative, cache=ssh_cache(C, xs))


def ssh_potential(state: LearnerState) -> int:
    return state.cache.count(state.V.mask)


def ssh_predict(state: LearnerState) -> int:
    parts = state.C.split(state.V.mask, state.x)
    if len(parts) == 1:
        return next(iter(parts))
    return _argmax_label({y: state.cache.count(m) for y, m in parts.items()})


def ssh_observe(state: LearnerState, y: int, conservative: bool | None = None) -> LearnerState:
    cons = state.conservative if conservative is None else conservative
    if not cons or ssh_predict(state) != y:
        _restrict_or_raise(state, y)
    elif not state.C.restrict_mask(state.V.mask, state.x, y):
        raise RealizabilityError(f"non-realizable stream at round {state.t}")
    state.t += 1
    return state


# ---------------------------------------------------------------- agnostic


def mistake_cap(C: ConceptClass, T: int, D: int | None = None, B: int | None = None) -> int:
    """min{B, ceil(D log2(eT/D)), T} with the D term read as 0 when D = 0."""
    if D is None:
        D = dim_level_littlestone(C).value
    if B is None:
        B = dim_branching(C).value
    d_term = 0 if D == 0 else math.ceil(D * math.log2(math.e * T / D))
    return max(0, min(B, d_term, T))


def expert_count(T: int, m: int) -> int:
    return sum(math.comb(T, k) for k in range(min(m, T) + 1))


@dataclass
class AgnosticState:
    """Multiplicative weights over update-round subsets.

    Experts are grouped into numpy arrays: ``masks[e]`` is expert e's
    simulated version set and ``rounds[e, t-1]`` says whether round t is in
    its update set.
    """

    C: ConceptClass
    xs: tuple[int, ...]
    experts: list[tuple[int, ...]]
    rounds: np.ndarray
    masks: np.ndarray
    log_weights: np.ndarray
    eta: float
    rng: LCG
    rng_seed: int
    t: int = 1
    last_pred: int | None = None
    last_expert: int | None = None
    last_expert_preds: np.ndarray | None = field(default=None, repr=False)
    expected_loss: float = 0.0
    cache: Any = field(default=None, repr=False)

    @property
    def x(self) -> int:
        return self.xs[self.t - 1]

    @property
    def weights(self) -> np.ndarray:
        w = np.exp(self.log_weights - self.log_weights.max())
        return w / w.sum()


def agnostic_init(
    C: ConceptClass,
    xs: Sequence[int],
    seed: int = 0,
    eta_scale: float = 1.0,
    m_cap: int | None = None,
    max_experts: int = DEFAULT_MAX_EXPERTS,
) -> AgnosticState:
    xs = tuple(xs)
    T = len(xs)
    if m_cap is None:
        m_cap = mistake_cap(C, T)
    n = expert_count(T, m_cap)
    if n > max_experts:
        raise CapError(f"{n} experts exceed the cap of {max_experts}; use a smaller T")
    experts = [B for k in range(min(m_cap, T) + 1) for B in combinations(range(1, T + 1), k)]
    rounds = np.zeros((len(experts), T), dtype=bool)
    for e, B in enumerate(experts):
        for t in B:
            rounds[e, t - 1] = True
    N = len(experts)
    eta = eta_scale * math.sqrt(8 * math.log(N) / T) if N > 1 and T > 0 else 0.0
    return AgnosticState(
        C=C,
        xs=xs,
        experts=experts,
        rounds=rounds,
        masks=np.full(N, C.full_mask, dtype=np.int64),
        log_weights=np.zeros(N),
        eta=eta,
        rng=LCG(seed),
        rng_seed=seed,
        cache=ssh_cache(C, xs, max_t=max(len(xs), 1)),
    )


def _expert_predictions(state: AgnosticState) -> np.ndarray:
    C, x, counter = state.C, state.x, state.cache
    uniq, inverse = np.unique(state.masks, return_inverse=True)
    preds = np.empty(len(uniq), dtype=np.int64)
    for i, m in enumerate(uniq.tolist()):
        parts = C.split(m, x)
        if len(parts) == 1:
            preds[i] = next(iter(parts))
        else:
            preds[i] = _argmax_label({y: counter.count(sub) for y, sub in parts.items()})
    return preds[inverse.ravel()]


def agnostic_predict(state: AgnosticState) -> int:
    preds = _expert_predictions(state)
    w = state.weights
    u = state.rng.uniform()
    e = int(np.searchsorted(np.cumsum(w), u, side="right"))
    e = min(e, len(w) - 1)
    state.last_expert_preds = preds
    state.last_expert = e
    state.last_pred = int(preds[e])
    return state.last_pred


def agnostic_observe(state: AgnosticState, y: int) -> AgnosticState:
    preds = state.last_expert_preds
    if preds is None:
        preds = _expert_predictions(state)
    losses = (preds != y).astype(float)
    state.expected_loss = float(np.dot(state.weights, losses))
    state.log_weights -= state.eta * losses
    # a simulated conservative learner updates on its designated rounds when it errs
    upd = state.rounds[:, state.t - 1] & (preds != y)
    if upd.any():
        lm = state.C.label_masks[state.x].get(y, 0)
        new = state.masks & lm
        # restriction to an empty set would break the simulated learner; keep it unchanged
        upd &= new != 0
        state.masks = np.where(upd, new, state.masks)
    state.t += 1
    state.last_expert_preds = None
    return state


# ---------------------------------------------------------------- uniform wrapper


class Learner:
    """Name-dispatched learner with ``predict``/``observe``/``potential``."""

    def __init__(self, name: str, C: ConceptClass, xs: Sequence[int], seed: int = 0, eta_scale: float = 1.0, **kw):
        if name not in LEARNERS:
            raise ValueError(f"unknown learner {name!r}; choose from {', '.join(LEARNERS)}")
        self.name = name
        if name == "bp":
            self.state = bp_init(C, xs)
        elif name in ("ssh", "ssh-conservative"):
            self.state = ssh_init(C, xs, conservative=name == "ssh-conservative")
        else:
            self.state = agnostic_init(C, xs, seed=seed, eta_scale=eta_scale, **kw)

    @property
    def deterministic(self) -> bool:
        return self.name != "agnostic"

    def predict(self) -> int:
        if self.name == "bp":
            return bp_predict(self.state)
        if self.name == "agnostic":
            return agnostic_predict(self.state)
        return ssh_predict(self.state)

    def observe(self, y: int) -> None:
        if self.name == "bp":
            bp_observe(self.state, y)
        elif self.name == "agnostic":
            agnostic_observe(self.state, y)
        else:
            ssh_observe(self.state, y)

    def potential(self) -> int | None:
        """Branching potential B(V_t, x_{t:T}); only the bp learner has one."""
        return bp_potential(self.state) if self.name == "bp" else None

    def scount(self) -> int | None:
        if self.name in ("bp", "agnostic"):
            return None
        return ssh_potential(self.state)
