"""Protocol engine, transcript checks, exact minimax oracle and bound verdicts."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .adversaries import Stream, realizing_concept
from .concepts import CapError, ConceptClass, RealizabilityError
from .dimensions import dim_branching, dim_level_littlestone, dim_littlestone
from .learners import Learner, mistake_cap
from .rng import derive_seed

MINIMAX_MAX_CONCEPTS = 20
MINIMAX_MAX_T = 8
VERIFY_MAX_T = 5
CSV_HEADER = ["t", "x", "pred", "true", "mistake", "potential", "scount"]


@dataclass
class RoundRecord:
    t: int
    x: int
    pred: int
    true: int
    mistake: bool
    potential: int | None = None
    potential_next: int | None = None
    scount: int | None = None
    scount_next: int | None = None
    expected_loss: float | None = None


@dataclass
class Transcript:
    learner: str
    records: list[RoundRecord]
    best_in_class: int
    mistakes: int = 0
    regret: int = 0

    def __post_init__(self):
        self.mistakes = sum(r.mistake for r in self.records)
        self.regret = self.mistakes - self.best_in_class

    @property
    def expected_mistakes(self) -> float | None:
        if any(r.expected_loss is None for r in self.records):
            return None
        return sum(r.expected_loss for r in self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow(
                [r.t, r.x, r.pred, r.true, int(r.mistake),
                 "" if r.potential is None else r.potential,
                 "" if r.scount is None else r.scount]
            )
        return buf.getvalue()


def best_in_class_mistakes(C: ConceptClass, xs: Sequence[int], ys: Sequence[int]) -> int:
    return min(sum(c[x] != y for x, y in zip(xs, ys)) for c in C.concepts)


def run(learner_name: str, C: ConceptClass, stream: Stream, seed: int = 0, **kw) -> Transcript:
    """Play ``stream`` against a learner and record every round."""
    lr = Learner(learner_name, C, stream.xs, seed=seed, **kw)
    records = []
    for t, (x, y) in enumerate(stream.pairs, start=1):
        pot, sc = lr.potential(), lr.scount()
        pred = lr.predict()
        lr.observe(y)
        rec = RoundRecord(t, x, pred, y, pred != y, pot, lr.potential(), sc, lr.scount())
        if learner_name == "agnostic":
            rec.expected_loss = lr.state.expected_loss
        records.append(rec)
    return Transcript(learner_name, records, best_in_class_mistakes(C, stream.xs, stream.ys))


def run_realizable(learner_name: str, C: ConceptClass, stream: Stream) -> Transcript:
    if realizing_concept(C, stream.xs, stream.ys) is None:
        raise RealizabilityError("stream is not realizable by the class")
    return run(learner_name, C, stream)


def verify_potential_trace(tr: Transcript) -> bool:
    """B(V_{t+1}, x_{t+1:T}) <= B(V_t, x_{t:T}) - 1{mistake} at every round."""
    for r in tr.records:
        if r.potential is None or r.potential_next is None:
            raise ValueError(f"round {r.t} has no recorded potential")
        if r.potential_next > r.potential - int(r.mistake):
            return False
    return True


def verify_halving_trace(tr: Transcript) -> bool:
    """S(V^{t+1}) <= S(V^t) on correct rounds and <= S(V^t)/2 on mistakes."""
    for r in tr.records:
        if r.scount is None or r.scount_next is None:
            raise ValueError(f"round {r.t} has no recorded S value")
        limit = Fraction(r.scount, 2) if r.mistake else Fraction(r.scount)
        if r.scount_next > limit:
            return False
    return True


# ---------------------------------------------------------------- minimax oracle


def water_fill(a: Sequence[Fraction]) -> Fraction:
    """The unique v with sum(max(0, a_y - v)) = 1."""
    if not a:
        raise ValueError("no labels")
    s = sorted(a, reverse=True)
    total = Fraction(0)
    for k, ak in enumerate(s, start=1):
        total += ak
        v = (total - 1) / k
        if k == len(s) or v >= s[k]:
            return v
    raise AssertionError("unreachable")


class MinimaxOracle:
    """Exact value of the randomized-prediction mistake game on fixed sequences.

    The learner picks a distribution p over labels, the adversary a realized
    label y; the round costs 1 - p(y). Memoized on (version set, remaining
    sequence) so evaluations on many sequences share work.
    """

    def __init__(self, C: ConceptClass, max_concepts: int = MINIMAX_MAX_CONCEPTS, max_t: int = MINIMAX_MAX_T):
        C.check_caps(max_concepts=max_concepts)
        self.C = C
        self.max_t = max_t
        self._memo: dict[tuple[int, tuple[int, ...]], Fraction] = {}

    def value(self, mask: int, xs: tuple[int, ...]) -> Fraction:
        if not xs:
            return Fraction(0)
        key = (mask, xs)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        parts = self.C.split(mask, xs[0])
        a = [1 + self.value(m, xs[1:]) for m in parts.values()]
        v = water_fill(a)
        self._memo[key] = v
        return v

    def __call__(self, xs: Sequence[int]) -> Fraction:
        xs = tuple(xs)
        if len(xs) > self.max_t:
            raise CapError(f"sequence length {len(xs)} exceeds the oracle cap of {self.max_t}")
        return self.value(self.C.full_mask, xs)


def minimax_mistakes(C: ConceptClass, xs: Sequence[int], oracle: MinimaxOracle | None = None) -> Fraction:
    return (oracle or MinimaxOracle(C))(xs)


# ---------------------------------------------------------------- bound verdicts


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass
class BoundVerdict:
    lower: Fraction
    upper: Fraction
    value: Fraction
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"lower": frac_str(self.lower), "upper": frac_str(self.upper),
               "value": frac_str(self.value), "pass": self.passed}
        out.update(self.details)
        return out


def d_log_term(D: int, T: int, log=math.log2) -> float:
    return 0.0 if D == 0 else D * log(math.e * T / D)


def upper_bound(D: int, B_upper: int, T: int) -> Fraction:
    """min{B, D log2(eT/D), T}; the middle term only applies when T >= D and is
    rounded down to 1e-9 so the rational comparison stays conservative."""
    terms = [Fraction(B_upper), Fraction(T)]
    if T >= D:
        terms.append(Fraction(math.floor(d_log_term(D, T) * 10**9), 10**9))
    return min(terms)


def lower_bound(D: int, T: int) -> Fraction:
    return Fraction(min(D, T), 2)


def verify_bounds(
    C: ConceptClass,
    T: int,
    max_t: int = VERIFY_MAX_T,
    seq_cap: int | None = None,
    max_concepts: int = MINIMAX_MAX_CONCEPTS,
    dims: tuple | None = None,
) -> BoundVerdict:
    """Check the mistake-bound sandwich on M* = max over all xs in X^T."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if T > max_t:
        raise CapError(f"T={T} exceeds the verify cap of {max_t}")
    if dims is None:
        D = dim_level_littlestone(C).value
        L = dim_littlestone(C).value
        Bw = dim_branching(C, seq_cap=seq_cap, littlestone=L)
        B, exact = Bw.value, Bw.exact
    else:
        D, B, exact, L = dims
    oracle = MinimaxOracle(C, max_concepts=max_concepts)
    best, best_xs = Fraction(-1), ()
    for xs in product(range(C.n_instances), repeat=T):
        v = oracle(xs)
        if v > best:
            best, best_xs = v, xs
    B_upper = B if exact else L
    lo, up = lower_bound(D, T), upper_bound(D, B_upper, T)
    details = {
        "T": T, "D": D, "B": B, "B_exact": exact, "L": L, "argmax_xs": list(best_xs),
        "d_log2_term": d_log_term(D, T), "d_ln_term": d_log_term(D, T, math.log),
    }
    return BoundVerdict(lo, up, best, lo <= best <= up, details)


# ---------------------------------------------------------------- agnostic Monte Carlo


@dataclass
class AgnosticSummary:
    n: int
    mean_regret: float
    stderr: float
    ci_low: float
    ci_high: float
    mean_mistakes: float
    mean_expected_regret: float
    regrets: list[float] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("regrets")
        return d


def run_agnostic(
    C: ConceptClass,
    stream: Stream | Callable[[int], Stream],
    seeds: Sequence[int],
    eta_scale: float = 1.0,
    m_cap: int | None = None,
) -> AgnosticSummary:
    """Mean regret of the agnostic learner over seeds with a 95% normal interval.

    ``stream`` may be a fixed stream or a function of the seed; the learner's
    own sampling uses a seed derived from (not equal to) the trial seed.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    regrets, mistakes, exp_regrets = [], [], []
    cap_cache: dict[int, int] = {}
    for s in seeds:
        st = stream(s) if callable(stream) else stream
        T = len(st)
        if m_cap is None and T not in cap_cache:
            cap_cache[T] = mistake_cap(C, T)
        tr = run("agnostic", C, st, seed=derive_seed(s, 1), eta_scale=eta_scale,
                 m_cap=m_cap if m_cap is not None else cap_cache[T])
        regrets.append(tr.regret)
        mistakes.append(tr.mistakes)
        exp_regrets.append(tr.expected_mistakes - tr.best_in_class)
    r = np.asarray(regrets, dtype=float)
    n = len(r)
    mean = float(r.mean())
    se = float(r.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return AgnosticSummary(
        n, mean, se, mean - 1.96 * se, mean + 1.96 * se,
        float(np.mean(mistakes)), float(np.mean(exp_regrets)), regrets,
    )
