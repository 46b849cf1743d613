import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bbinterp.bbtree import BBTree, branch, certify_tree, leaf, node_problem, solve_bb, tree_size, validate_tree, IntegerPointFound
from bbinterp.conformal import (
    ConformingDecomposer,
    ProductSystem,
    QuasiCertifiedTree,
    SIDE_P,
    SIDE_Q,
    audit_conforming,
    check_quasi,
    decompose_conforming,
    decompose_shape_only,
    node_range,
    project_certificate,
    quasi_case,
    search_certified_conforming,
    unit_box,
)
from bbinterp.linsys import LinSystem, check_farkas, integer_feasible_oracle

from conftest import random_system


def test_node_range_diagonal():
    rng = node_range((1, 1), unit_box(2))
    assert (rng.l_min, rng.l_max, rng.length) == (-1, 2, 3)


def test_node_range_zero_direction():
    rng = node_range((0, 0), unit_box(2))
    assert (rng.l_min, rng.l_max, rng.length) == (-1, 0, 1)


def test_node_range_mixed_signs():
    rng = node_range((2, -3), unit_box(2))
    assert (rng.l_min, rng.l_max, rng.length) == (-4, 2, 6)


def test_node_range_emptiness_is_tight():
    box = unit_box(2)
    for alpha in ((1, 1), (2, -3), (0, 0), (1, -1)):
        rng = node_range(alpha, box)
        corners = [
            (x, y)
            for x in (Fraction(0), Fraction(1))
            for y in (Fraction(0), Fraction(1))
        ]
        values = [sum(a * c for a, c in zip(alpha, pt)) for pt in corners]
        assert all(v > rng.l_min for v in values)
        assert all(v < rng.l_max + 1 for v in values)
        assert any(v <= rng.l_min + 1 for v in values)
        assert any(v >= rng.l_max for v in values)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(-4, 4), min_size=1, max_size=4),
    st.lists(
        st.tuples(
            st.fractions(min_value=-3, max_value=3, max_denominator=4),
            st.fractions(min_value=0, max_value=3, max_denominator=4),
        ),
        min_size=1, max_size=4,
    ),
)
def test_node_range_matches_corner_enumeration(alpha, raw_box):
    size = min(len(alpha), len(raw_box))
    alpha = tuple(alpha[:size])
    box = [(lo, lo + width) for lo, width in raw_box[:size]]
    rng = node_range(alpha, box)
    corners = itertools.product(*[(lo, hi) for lo, hi in box])
    values = [sum(a * Fraction(c) for a, c in zip(alpha, pt)) for pt in corners]
    lo, hi = min(values), max(values)
    # the halfspaces at the window ends miss the box, one step inside they hit it
    assert rng.l_min < lo <= rng.l_min + 1
    assert rng.l_max <= hi < rng.l_max + 1


def test_project_single_leaf_product_certificate():
    p = LinSystem(1, [[1], [-1]], [-1, 0])  # x <= -1, -x <= 0: infeasible
    q = LinSystem(1, [[1], [-1]], [1, 0])
    prod = ProductSystem(p, q)
    tree = certify_tree(BBTree(2, leaf()), prod.combined)
    cert = tree.node("").cert
    projected = project_certificate(cert, prod.combined.labels, SIDE_P)
    assert check_farkas(p, projected)


def test_project_all_zero():
    labels = ProductSystem(
        LinSystem(1, [[1]], [0]), LinSystem(1, [[1]], [0])
    ).combined.labels
    assert project_certificate((0, 0), labels, SIDE_P) == (0,)


def test_project_second_factor_leaves_have_zero_first_factor_weight(cross_fixture):
    prod, tree = cross_fixture
    for path in ("LLL", "LLR", "LRL", "LRR"):
        problem = node_problem(tree, path, prod.combined)
        projected = project_certificate(tree.node(path).cert, problem.labels, SIDE_P)
        # Only branch rows carry weight, so the combination cannot reach
        # a negative constant without help from the right-hand sides.
        assert all(projected[i] == 0 for i in range(prod.p.m))


def test_decompose_fixture_second_factor(cross_fixture):
    prod, tree = cross_fixture
    side, result = decompose_conforming(tree, prod, unit_box(2), unit_box(2))
    assert side == SIDE_Q
    assert result.tree.same_shape(tree)
    assert result.tree.root.disjunction.alpha == (0, 0)
    assert audit_conforming(result, tree, prod, side) == []
    for path in result.tree.leaf_paths():
        assert check_quasi(result, path, prod.q)


def test_decompose_first_factor_impossible(cross_fixture):
    prod, tree = cross_fixture
    dec = ConformingDecomposer(tree, prod, unit_box(2), unit_box(2))
    assert not dec.can(SIDE_P, "", ())


def test_first_factor_impossibility_confirmed_by_exhaustive_search(cross_fixture):
    from oracles import exhaustive_quasi_assignment

    prod, tree = cross_fixture
    assert exhaustive_quasi_assignment(tree, prod, SIDE_P, unit_box(2)) is None
    assert exhaustive_quasi_assignment(tree, prod, SIDE_Q, unit_box(2)) is not None


def test_naive_projection_search_fails_for_first_factor(cross_fixture):
    prod, tree = cross_fixture
    assert search_certified_conforming(tree, prod, SIDE_P, unit_box(2)) is None


def test_naive_projection_search_finds_second_factor_assignment(cross_fixture):
    # The branch rows of the rebuilt second-factor tree have zero
    # directions, and the projected first-factor-leaf multipliers put
    # weight on the absurd right-branch row, so the all-zero assignment
    # already validates every leaf.  (Checked certificate by
    # certificate; this half of the impossibility claim does not survive.)
    prod, tree = cross_fixture
    assignment = search_certified_conforming(tree, prod, SIDE_Q, unit_box(2))
    assert assignment is not None


def test_decompose_trivial_first_factor_single_leaf():
    p = LinSystem(1, [[1], [-1]], [-1, 0])
    q = LinSystem(1, [[1], [-1]], [1, 0])
    prod = ProductSystem(p, q)
    tree = certify_tree(BBTree(2, leaf()), prod.combined)
    side, result = decompose_conforming(tree, prod, unit_box(1), unit_box(1))
    assert side == SIDE_P
    assert tree_size(result.tree) == 1
    assert check_quasi(result, "", p)


def test_check_quasi_case_two_for_empty_edge(cross_factor):
    # A right branch below an absurd halfspace with useless multipliers
    # is excused by the empty edge, not by its certificate.
    tree = BBTree(
        2,
        branch((0, 0), 5, leaf((0,) * 9), branch((0, 0), 0, leaf((0,) * 10), leaf((0,) * 10))),
    )
    qtree = QuasiCertifiedTree(tree, unit_box(2), {})
    assert quasi_case(qtree, "RL", cross_factor) == 2
    assert quasi_case(qtree, "RR", cross_factor) == 2
    assert quasi_case(qtree, "L", cross_factor) is None


def test_check_quasi_case_one_for_valid_certificate(cross_factor):
    tree = certify_tree(solve_bb(cross_factor), cross_factor)
    qtree = QuasiCertifiedTree(tree, unit_box(2), {})
    for path in tree.leaf_paths():
        assert quasi_case(qtree, path, cross_factor) == 1


def test_probe_verdicts_are_monotone(cross_fixture):
    prod, tree = cross_fixture
    dec = ConformingDecomposer(tree, prod, unit_box(2), unit_box(2))
    for path in ("", "L", "R"):
        for kind in ("le", "ge"):
            series = [dec.mu(path, (0,) * len(path), kind, g) for g in range(-3, 4)]
            if kind == "le":
                assert series == sorted(series)
            else:
                assert series == sorted(series, reverse=True)


def test_shape_only_variant_consistent(cross_fixture):
    prod, tree = cross_fixture
    side, result = decompose_shape_only(tree, prod, unit_box(2), unit_box(2))
    assert side in (SIDE_P, SIDE_Q)
    assert result.tree.same_shape(tree)
    assert validate_tree(result.tree, prod.factor(side))


def _random_infeasible_product(rng):
    while True:
        p = random_system(rng, rng.randint(1, 3), rng.randint(1, 3))
        q = random_system(rng, rng.randint(1, 3), rng.randint(1, 3))
        p_feasible = integer_feasible_oracle(p, p.unit_bounds()) is not None
        q_feasible = integer_feasible_oracle(q, q.unit_bounds()) is not None
        if p_feasible and q_feasible:
            continue
        prod = ProductSystem(p, q)
        try:
            tree = solve_bb(prod.combined)
        except IntegerPointFound:
            continue
        return prod, certify_tree(tree, prod.combined), p_feasible, q_feasible


def test_randomized_decompositions_pass_audit():
    rng = random.Random(2024)
    for _ in range(25):
        prod, tree, p_feasible, q_feasible = _random_infeasible_product(rng)
        side, result = decompose_conforming(tree, prod, unit_box(prod.p.n), unit_box(prod.q.n))
        assert audit_conforming(result, tree, prod, side) == []
        # The chosen side is integer-free, so when exactly one factor
        # has an integral point the other side must be picked.
        if p_feasible and not q_feasible:
            assert side == SIDE_Q
        if q_feasible and not p_feasible:
            assert side == SIDE_P
        if not tree.root.is_leaf:
            dec = ConformingDecomposer(tree, prod, unit_box(prod.p.n), unit_box(prod.q.n))
            le_series = [dec.mu("", (), "le", g) for g in range(-2, 3)]
            ge_series = [dec.mu("", (), "ge", g) for g in range(-2, 3)]
            assert le_series == sorted(le_series)
            assert ge_series == sorted(ge_series, reverse=True)


def test_filler_subtree_under_empty_halfspace():
    # The right branch of the zero-direction root is excused by its
    # halfspace missing the box, and its leaf certificate lives purely
    # on second-factor rows, so the first-factor rebuild cannot keep it
    # as a checked certificate: the branch must come back as a copied
    # shape whose leaf is excused (case 2), and the audit must accept.
    p = LinSystem(1, [[2], [-2], [1], [-1]], [1, -1, 1, 0])  # the half point
    q = LinSystem(1, [[1], [-1], [1], [-1]], [0, -1, 1, 0])  # infeasible
    prod = ProductSystem(p, q)
    tree = BBTree(
        2,
        branch(
            (0, 0), 0,
            branch((1, 0), 0,
                   leaf((0, 1, 0, 0, 0, 0, 0, 0, 0, 2)),
                   leaf((1, 0, 0, 0, 0, 0, 0, 0, 0, 2))),
            leaf((0, 0, 0, 0, 1, 1, 0, 0, 0)),
        ),
    )
    assert validate_tree(tree, prod.combined)
    side, result = decompose_conforming(tree, prod, unit_box(1), unit_box(1))
    assert side == SIDE_P
    assert result.quasi_cases == {"LL": 1, "LR": 1, "R": 2}
    assert audit_conforming(result, tree, prod, side) == []
    assert quasi_case(result, "R", p) == 2


def test_filler_copies_internal_subtrees():
    p = LinSystem(1, [[2], [-2], [1], [-1]], [1, -1, 1, 0])
    q = LinSystem(1, [[1], [-1], [1], [-1]], [0, -1, 1, 0])
    prod = ProductSystem(p, q)
    pure_q = (0, 0, 0, 0, 1, 1, 0, 0, 0, 0)
    tree = BBTree(
        2,
        branch(
            (0, 0), 0,
            branch((1, 0), 0,
                   leaf((0, 1, 0, 0, 0, 0, 0, 0, 0, 2)),
                   leaf((1, 0, 0, 0, 0, 0, 0, 0, 0, 2))),
            branch((0, 1), 0, leaf(pure_q), leaf(pure_q)),
        ),
    )
    assert validate_tree(tree, prod.combined)
    side, result = decompose_conforming(tree, prod, unit_box(1), unit_box(1))
    assert side == SIDE_P
    assert result.tree.same_shape(tree)
    assert result.quasi_cases["RL"] == 2 and result.quasi_cases["RR"] == 2
    assert audit_conforming(result, tree, prod, side) == []


def test_decompose_requires_valid_certificates(cross_fixture):
    prod, tree = cross_fixture
    bad = certify_tree(tree, prod.combined)
    bad.node("LLL").cert = tuple(0 for _ in bad.node("LLL").cert)
    with pytest.raises(ValueError):
        decompose_conforming(bad, prod, unit_box(2), unit_box(2))
