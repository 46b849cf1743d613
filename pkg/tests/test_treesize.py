import math
import random

import pytest

from bbinterp.linsys import LinSystem, integer_feasible_oracle
from bbinterp.treesize import SearchBudgetExceeded, min_tree_size_bounded
from bbinterp.conformal import ProductSystem
from bbinterp.bbtree import solve_bb, tree_size

from conftest import random_system


def test_lp_infeasible_needs_one_leaf():
    sys = LinSystem(1, [[1], [-1], [1], [-1]], [0, -1, 1, 0])
    assert min_tree_size_bounded(sys, 3, 2) == 1


def test_integer_feasible_has_no_tree():
    sys = LinSystem(1, [[1], [-1]], [1, 0])
    assert min_tree_size_bounded(sys, 3, 2) == math.inf


def test_cross_polytope_minimum_four(cross_factor):
    assert min_tree_size_bounded(cross_factor, 3, 2) == 4


def test_strict_segment_needs_two_leaves():
    # [1/3, 2/3] in one variable: one split at 0 kills both sides.
    seg = LinSystem(1, [[3], [-3], [1], [-1]], [2, -1, 1, 0])
    assert min_tree_size_bounded(seg, 3, 2) == 2


def test_budget_exceeded_reports_progress(cross_factor):
    with pytest.raises(SearchBudgetExceeded) as info:
        min_tree_size_bounded(cross_factor, 3, 2, budget=40)
    assert info.value.proven_lower_bound >= 0
    assert info.value.budget == 40


def test_needs_finite_bounds():
    with pytest.raises(ValueError):
        min_tree_size_bounded(LinSystem(1, [[1]], [0]), 2, 1)


def _product(p: LinSystem, q: LinSystem) -> LinSystem:
    return ProductSystem(p, q).combined


def test_product_minimum_equals_factor_minimum_on_corpus():
    rng = random.Random(77)
    checked = 0
    while checked < 6:
        p = random_system(rng, rng.randint(1, 2), rng.randint(1, 2))
        q = random_system(rng, rng.randint(1, 2), rng.randint(1, 2))
        if integer_feasible_oracle(p, p.unit_bounds()) is not None:
            continue
        if integer_feasible_oracle(q, q.unit_bounds()) is not None:
            continue
        try:
            mp = min_tree_size_bounded(p, 3, 2)
            mq = min_tree_size_bounded(q, 3, 2)
            mprod = min_tree_size_bounded(_product(p, q), 3, 2)
        except SearchBudgetExceeded:
            continue
        if math.isinf(mp) or math.isinf(mq):
            continue
        assert mprod == min(mp, mq)
        checked += 1


def test_minimum_never_exceeds_solver_tree(cross_factor):
    tree = solve_bb(cross_factor)
    assert min_tree_size_bounded(cross_factor, 3, 2) <= tree_size(tree)
