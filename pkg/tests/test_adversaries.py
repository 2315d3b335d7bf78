import math
import pytest

from lcdim.adversaries import (
    Stream,
    block_stream,
    load_stream,
    logT_stream,
    path_stream,
    realizable_streams,
    realizing_concept,
    save_stream,
    worst_case_stream,
)
from lcdim.concepts import CapError, ConceptClass, gen_branch_class, gen_constants, gen_full
from lcdim.dimensions import dim_branching, dim_level_littlestone
from lcdim.game import best_in_class_mistakes, run, run_agnostic
from lcdim.learners import mistake_cap
from lcdim.rng import LCG
from lcdim.trees import LCTree, leaf_paths, normalize_tree, tree_from_function


def test_lcg_reference_values():
    g = LCG(0)
    assert g.next_u64() == 1442695040888963407
    assert g.next_u64() == (6364136223846793005 * 1442695040888963407 + 1442695040888963407) % 2**64
    assert LCG(5).bits(16) == LCG(5).bits(16)
    u = LCG(3).uniform()
    assert 0 <= u < 1


def test_path_stream_readoff():
    C = gen_full(2, 2)
    tree = dim_level_littlestone(C).witness
    s = path_stream(tree, C, sigma="00")
    assert s.xs == tree.level_instances
    assert s.ys == (tree.label("", 0), tree.label("0", 0))
    for sigma in leaf_paths(2):
        s = path_stream(tree, C, sigma=sigma)
        assert realizing_concept(C, s.xs, s.ys) == s.meta["concept"]
    assert path_stream(tree, C, seed=4) == path_stream(tree, C, seed=4)


def test_path_stream_rejects_unshattered():
    C = gen_constants(2, 1)
    t = LCTree(1, (0,), {("", 0): 0, ("", 1): 5})
    with pytest.raises(ValueError, match="not shattered"):
        path_stream(t, C, sigma="0")


@pytest.mark.parametrize("C", [gen_full(2, 3), gen_branch_class(2), gen_constants(3, 2)])
def test_path_stream_average_mistakes(C):
    w = dim_level_littlestone(C)
    d = w.value
    for name in ("bp", "ssh"):
        total = sum(run(name, C, path_stream(w.witness, C, sigma=s)).mistakes for s in leaf_paths(d))
        assert 2 * total >= d * 2**d


def test_logT_stream_q1():
    C = gen_full(2, 3)
    tree = normalize_tree(tree_from_function((0, 1, 2), lambda n, b: b), C, 1)
    s = logT_stream(tree, C, T=5, seed=2)
    assert s.meta["levels"] == [0] and len(s) == 5
    assert len(set(s.pairs)) == 1
    assert realizing_concept(C, s.xs, s.ys) is not None
    with pytest.raises(ValueError, match="exceed"):
        logT_stream(normalize_tree(tree_from_function((0, 1, 2), lambda n, b: b), C, 3), C, T=2)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_logT_stream_average_mistakes(q):
    C = gen_branch_class(3, False)
    Bw = dim_branching(C)
    assert Bw.value >= q
    tree = normalize_tree(Bw.witness, C, q)
    for name in ("bp", "ssh"):
        total = 0
        for sigma in leaf_paths(tree.depth):
            s = logT_stream(tree, C, T=tree.depth, sigma=sigma)
            tr = run(name, C, s)
            total += sum(r.mistake for r in tr.records[: s.meta["emitted"]])
        assert 2 * total >= q * 2**tree.depth


def test_block_stream_d1():
    C = gen_constants(2, 1)
    tree = dim_level_littlestone(C).witness
    s = block_stream(tree, 5, seed=3, C=C)
    assert s.meta["k"] == 5 and s.xs == (0,) * 5
    assert set(s.ys) <= {tree.label("", 0), tree.label("", 1)}
    # the comparator concept follows the majority and errs on the minority only
    c = C.concepts[s.meta["comparator"]]
    minority = min(s.ys.count(0), s.ys.count(1))
    assert sum(c[x] != y for x, y in s.pairs) == minority == best_in_class_mistakes(C, s.xs, s.ys)


def test_block_stream_shape():
    C = gen_full(2, 2)
    tree = dim_level_littlestone(C).witness
    s = block_stream(tree, 20, seed=0, C=C)
    assert s.meta["k"] == 9
    assert s.xs == (tree.level_instances[0],) * 9 + (tree.level_instances[1],) * 11
    assert block_stream(tree, 20, seed=11) == block_stream(tree, 20, seed=11)
    with pytest.raises(ValueError):
        block_stream(tree, 1)


def test_block_stream_regret_lower_bound():
    C = gen_full(2, 2)
    tree = dim_level_littlestone(C).witness
    T, d = 20, 2
    summ = run_agnostic(C, lambda s: block_stream(tree, T, seed=s), range(500), m_cap=mistake_cap(C, T))
    assert summ.mean_regret >= 0.25 * math.sqrt(T * d)


def test_worst_case_examples():
    S = ConceptClass.build(1, [(0,)])
    s, m = worst_case_stream(S, [0, 0], "bp")
    assert m == 0 and s.ys == (0, 0)
    C = gen_constants(3, 2)
    s, m = worst_case_stream(C, [0, 1, 0], "bp")
    assert m == 1 and s.ys == (1, 1, 1)
    with pytest.raises(CapError):
        worst_case_stream(C, [0] * 7, "bp")


def test_worst_case_dominates_spot_checks():
    C = gen_full(2, 3)
    xs = (0, 2, 1, 0)
    for name in ("bp", "ssh", "ssh-conservative"):
        _, m = worst_case_stream(C, xs, name)
        assert m <= min(3, 3 * math.log2(math.e * 4 / 3), 4)
        g = LCG(9)
        for _ in range(10):
            c = C.concepts[int(g.uniform() * len(C))]
            s = Stream(xs, [c[x] for x in xs])
            assert run(name, C, s).mistakes <= m


def test_realizable_streams_enumerates_projection():
    C = gen_full(2, 2)
    ys = [s.ys for s in realizable_streams(C, (0, 0, 1))]
    assert ys == sorted(ys) and len(ys) == 4
    # the repeated instance always gets the same label
    assert all(y[0] == y[1] for y in ys)


def test_stream_file_round_trip(tmp_path):
    s = Stream([0, 1], [1, 1], {"construction": "x"})
    save_stream(s, tmp_path / "s.json")
    assert load_stream(tmp_path / "s.json") == s
    with pytest.raises(ValueError):
        Stream([0], [0, 1])


def test_every_flagged_stream_realizable():
    C = gen_full(2, 3)
    tree = dim_level_littlestone(C).witness
    for seed in range(5):
        s = path_stream(tree, C, seed=seed)
        assert s.meta["realizable"] and realizing_concept(C, s.xs, s.ys) is not None
