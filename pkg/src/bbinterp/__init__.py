"""Toolkit for branch-and-bound proofs with general disjunctions.

Validates certified trees, decomposes product-polytope proofs into
conforming single-factor proofs, compiles trees into monotone real
circuits deciding which factor of a coupled system is infeasible, and
generates the matching hard instance families.  All arithmetic is
exact over the rationals.
"""

from .linsys import (
    DimensionError,
    EnumerationCapExceeded,
    Feasible,
    Infeasible,
    LinSystem,
    RowLabel,
    check_farkas,
    integer_feasible_oracle,
    lp_solve,
)
from .bbtree import (
    BBTree,
    Disjunction,
    FeasibleLeafError,
    IntegerPointFound,
    TreeNode,
    branch,
    certify_tree,
    leaf,
    node_problem,
    solve_bb,
    tree_size,
    validate_tree,
)
from .treesize import SearchBudgetExceeded, min_tree_size_bounded
from .conformal import (
    NodeRange,
    ProductSystem,
    QuasiCertifiedTree,
    audit_conforming,
    box_of,
    check_quasi,
    decompose_conforming,
    decompose_shape_only,
    node_range,
    project_certificate,
    search_certified_conforming,
    unit_box,
)
from .circuits import (
    Circuit,
    binary_search_transform,
    build_leaf_circuit,
    check_monotone,
    circuit_size,
    combine_split,
    compile_interpolant,
    eval_circuit,
    interpolant_size_bound,
)
from .instances import (
    CNF,
    InterpolationInstance,
    SplitCNF,
    certificate_from_tree,
    check_certificate,
    cnf_to_ilp,
    cross_polytope_fixture,
    default_clique_size,
    gen_cc_instance,
    gen_random_kcnf,
    gen_z_witness,
    split_cnf,
    split_instance,
    unsat_clause_count,
)

__all__ = [
    "BBTree",
    "CNF",
    "Circuit",
    "DimensionError",
    "Disjunction",
    "EnumerationCapExceeded",
    "Feasible",
    "FeasibleLeafError",
    "Infeasible",
    "IntegerPointFound",
    "InterpolationInstance",
    "LinSystem",
    "NodeRange",
    "ProductSystem",
    "QuasiCertifiedTree",
    "RowLabel",
    "SearchBudgetExceeded",
    "SplitCNF",
    "TreeNode",
    "audit_conforming",
    "binary_search_transform",
    "box_of",
    "branch",
    "build_leaf_circuit",
    "certificate_from_tree",
    "certify_tree",
    "check_certificate",
    "check_farkas",
    "check_monotone",
    "check_quasi",
    "circuit_size",
    "cnf_to_ilp",
    "combine_split",
    "compile_interpolant",
    "cross_polytope_fixture",
    "decompose_conforming",
    "decompose_shape_only",
    "default_clique_size",
    "eval_circuit",
    "gen_cc_instance",
    "gen_random_kcnf",
    "gen_z_witness",
    "integer_feasible_oracle",
    "interpolant_size_bound",
    "leaf",
    "lp_solve",
    "min_tree_size_bounded",
    "node_problem",
    "node_range",
    "project_certificate",
    "search_certified_conforming",
    "solve_bb",
    "split_cnf",
    "split_instance",
    "tree_size",
    "unit_box",
    "unsat_clause_count",
    "validate_tree",
]
