import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lcdim.concepts import (  # noqa: E402
    ConceptClass,
    gen_branch_class,
    gen_constants,
    gen_edge_labeled_branch_class,
    gen_full,
    gen_nt_chain,
    gen_one_branch_per_level_class,
    gen_random,
)

ACCEPTANCE_LINES: list[str] = []


def battery():
    """Ten fixed classes over at most three instances."""
    return {
        "constants(3,2)": gen_constants(3, 2),
        "full(2,2)": gen_full(2, 2),
        "full(2,3)": gen_full(2, 3),
        "full(3,2)": gen_full(3, 2),
        "edge_labeled_branch(3)": gen_edge_labeled_branch_class(3),
        "branch(2,unique)": gen_branch_class(2, True),
        "branch(2,shared)": gen_branch_class(2, False),
        "one_branch_per_level(2)": gen_one_branch_per_level_class(2),
        "nt_chain(3)": gen_nt_chain(3),
        "random(1)": gen_random(1, 8, 3, 3, min_concepts=4),
    }


def generator_family():
    return {
        "singleton": ConceptClass.build(2, [(0, 1)]),
        **{f"constants({m},{n})": gen_constants(m, n) for m in (1, 2, 3, 4) for n in (1, 2, 3)},
        **{f"full(2,{n})": gen_full(2, n) for n in (1, 2, 3, 4)},
        "full(3,2)": gen_full(3, 2),
        "full(4,2)": gen_full(4, 2),
        **{f"branch({d},{u})": gen_branch_class(d, u) for d in (1, 2, 3) for u in (True, False)},
        **{f"edge_labeled_branch({d})": gen_edge_labeled_branch_class(d) for d in (1, 2, 3, 4)},
        **{f"one_branch_per_level({d})": gen_one_branch_per_level_class(d) for d in (1, 2, 3)},
        **{f"nt_chain({d})": gen_nt_chain(d) for d in (1, 2, 3, 4, 5)},
    }


def random_corpus(count=200, seed0=1000):
    out = {}
    for s in range(seed0, seed0 + count):
        n = 1 + s % 4
        labels = 2 + (s // 4) % 3
        out[f"random({s})"] = gen_random(s, 12, n, labels)
    return out


@pytest.fixture(scope="session")
def battery_classes():
    return battery()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
