"""Level-constrained dimensions and learners for transductive online learning."""

from .concepts import (
    CapError,
    ClassFileError,
    ConceptClass,
    RealizabilityError,
    VersionSet,
    gen_branch_class,
    gen_constants,
    gen_edge_labeled_branch_class,
    gen_full,
    gen_nt_chain,
    gen_one_branch_per_level_class,
    gen_random,
    load_class,
    realized_labels,
    restrict,
    save_class,
)
from .dimensions import (
    DimensionWitness,
    branching_potential,
    count_shattered_subsequences,
    dim_branching,
    dim_ds,
    dim_graph,
    dim_level_littlestone,
    dim_littlestone,
    dim_nt,
)
from .game import minimax_mistakes, run_agnostic, run_realizable, verify_bounds
from .trees import LCTree, is_shattered, normalize_tree

__version__ = "0.1.0"

__all__ = [
    "CapError",
    "ClassFileError",
    "ConceptClass",
    "RealizabilityError",
    "VersionSet",
    "gen_branch_class",
    "gen_constants",
    "gen_edge_labeled_branch_class",
    "gen_full",
    "gen_nt_chain",
    "gen_one_branch_per_level_class",
    "gen_random",
    "load_class",
    "realized_labels",
    "restrict",
    "save_class",
    "DimensionWitness",
    "branching_potential",
    "count_shattered_subsequences",
    "dim_branching",
    "dim_ds",
    "dim_graph",
    "dim_level_littlestone",
    "dim_littlestone",
    "dim_nt",
    "minimax_mistakes",
    "run_agnostic",
    "run_realizable",
    "verify_bounds",
    "LCTree",
    "is_shattered",
    "normalize_tree",
]
