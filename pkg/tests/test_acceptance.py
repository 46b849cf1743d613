"""Acceptance criteria, one test per criterion, each printing a
PASS/FAIL line (run with -s to see them on success).

Criterion 6 contains a deliberate red sub-assertion: the claimed
impossibility of naive certificate projection for both factors of the
diamond product is refuted by an explicit all-zero assignment for the
second factor (see the decisions ledger next to this repository).  The
first-factor half, the quasi-certified decomposition, the shape match
and the checker all pass.
"""

import itertools
import random
import time
from fractions import Fraction

from bbinterp.bbtree import IntegerPointFound, certify_tree, solve_bb, tree_size
from bbinterp.circuits import (
    BumpAccumulate,
    CircuitBuilder,
    Composed,
    NonNegCombine,
    StepThreshold,
    binary_search_transform,
    check_monotone,
    circuit_gate_fns,
    circuit_size,
    compile_interpolant,
    interpolant_size_bound,
)
from bbinterp.conformal import (
    SIDE_P,
    audit_conforming,
    decompose_conforming,
    search_certified_conforming,
    unit_box,
)
from bbinterp.instances import (
    CNF,
    InterpolationInstance,
    certificate_from_tree,
    check_certificate,
    cnf_to_ilp,
    cross_polytope_fixture,
    gen_cc_instance,
    gen_random_kcnf,
    gen_z_witness,
)
from bbinterp.linsys import integer_feasible_oracle
from bbinterp.treesize import min_tree_size_bounded

from conftest import random_system
from oracles import brute_force_max_offset

import json


def _report(name, ok, detail=""):
    suffix = f"  ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{suffix}")


def _random_coupled_instance(rng):
    """A small integer-infeasible coupled block system, or None."""
    n1 = rng.randint(1, 3)
    n2 = rng.randint(1, 3)
    n3 = rng.randint(1, 2)
    m1 = rng.randint(1, 2)
    m2 = rng.randint(1, 2)
    a_block = [[rng.randint(-2, 2) for _ in range(n1)] for _ in range(m1)]
    c_block = [[rng.randint(0, 2) for _ in range(n3)] for _ in range(m1)]
    a_rhs = [rng.randint(-2, 2) for _ in range(m1)]
    b_block = [[rng.randint(-2, 2) for _ in range(n2)] for _ in range(m2)]
    d_block = [[-rng.randint(0, 2) for _ in range(n3)] for _ in range(m2)]
    b_rhs = [rng.randint(-2, 2) for _ in range(m2)]
    inst = InterpolationInstance(n1, n2, n3, a_block, c_block, a_rhs, b_block, d_block, b_rhs)
    full = inst.full_system()
    if integer_feasible_oracle(full, [(0, 1)] * full.n) is not None:
        return None
    return inst


def _compiled_random_instances(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = _random_coupled_instance(rng)
        if inst is None:
            continue
        try:
            tree = solve_bb(inst.full_system())
        except IntegerPointFound:
            continue
        out.append((inst, tree, compile_interpolant(tree, inst)))
    return out


def test_criterion_separation_correctness():
    """Compiled circuits agree with the integer-feasibility oracle on
    fifty witnesses per side for r in {3, 4, 5}."""
    start = time.monotonic()
    failures = []
    for r in (3, 4, 5):
        inst = gen_cc_instance(r, 2)
        full = inst.full_system()
        tree = solve_bb(full)
        circuit = compile_interpolant(tree, inst)
        assert circuit_size(circuit) <= circuit.meta["size_bound"]
        for side, expect in (("Z1", 0), ("Z2", 1)):
            for i in range(50):
                z, _ = gen_z_witness(inst, side, 1000 * r + i)
                p_free = integer_feasible_oracle(
                    inst.factor_system("P", z), [(0, 1)] * inst.n1) is None
                q_free = integer_feasible_oracle(
                    inst.factor_system("Q", z), [(0, 1)] * inst.n2) is None
                oracle_expect = 1 if p_free else 0
                assert p_free != q_free, "witness generator must hit one side"
                assert oracle_expect == expect
                value = circuit.eval({f"z{j}": z[j] for j in range(inst.n3)})
                if value != oracle_expect:
                    failures.append((r, side, z, value))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed <= 300
    _report("separation-correctness", ok, f"300 witnesses, {elapsed:.1f}s")
    assert not failures, failures[:3]
    assert elapsed <= 300


def test_criterion_oracle_equivalence():
    """Circuit output equals the decomposition side on every shared
    assignment of fifty random coupled instances."""
    compiled = _compiled_random_instances(50, seed=424242)
    mismatches = 0
    tested = 0
    for inst, tree, circuit in compiled:
        assert circuit_size(circuit) <= circuit.meta["size_bound"]
        for z in itertools.product((0, 1), repeat=inst.n3):
            value = circuit.eval({f"z{j}": z[j] for j in range(inst.n3)})
            prod = inst.product_for(z)
            ztree = inst.instantiate_tree(tree, z)
            side, _ = decompose_conforming(ztree, prod, unit_box(inst.n1), unit_box(inst.n2))
            tested += 1
            if (value == 1) != (side == SIDE_P):
                mismatches += 1
    _report("oracle-equivalence", mismatches == 0, f"{tested} assignments on 50 instances")
    assert mismatches == 0


def _random_probe_circuit(rng):
    k = rng.randint(1, 3)
    names = [f"x{i}" for i in range(k)] + ["y"]
    builder = CircuitBuilder()
    ids = {n: builder.input(n) for n in names}
    top = Fraction(rng.randint(-6, 10))
    s_y = Fraction(rng.randint(1, 3))
    c0 = Fraction(rng.randint(-3, 3))
    acc = builder.apply(NonNegCombine(Fraction(0), s_y, c0), ids[names[0]], ids["y"])
    for i in range(k):
        acc = builder.apply(
            BumpAccumulate(Fraction(0), Fraction(rng.randint(-2, 2)), Fraction(rng.randint(0, 4))),
            acc, ids[f"x{i}"],
        )
    cut = s_y * top + c0 - rng.randint(1, 8)
    builder.post_compose(acc, StepThreshold(cut, strict=rng.random() < 0.5))
    return builder.build(acc), top, names[:-1]


def test_criterion_search_exactness_and_size():
    """A thousand randomized in-circuit searches match enumeration and
    stay within the |C| * q gate budget."""
    rng = random.Random(8080)
    cases = 0
    for _ in range(1000):
        circuit, top, free = _random_probe_circuit(rng)
        q = rng.randint(1, 6)
        transformed = binary_search_transform(circuit, q, top, var="y")
        assert circuit_size(transformed) <= circuit_size(circuit) * q
        point = {n: Fraction(rng.randint(-6, 6), rng.choice((1, 2))) for n in free}
        expect = brute_force_max_offset(circuit, point, "y", top, q)
        assert expect is not None
        assert transformed.eval(point) == expect
        cases += 1
    _report("search-exactness", True, f"{cases} cases, q <= 6")


def test_criterion_compile_size_bound():
    """Every compiled circuit stays under the stated gate-count ceiling."""
    checked = []
    for r, k in ((3, 2), (4, 2), (4, 3)):
        inst = gen_cc_instance(r, k)
        tree = solve_bb(inst.full_system())
        circuit = compile_interpolant(tree, inst)
        checked.append((f"cc r={r} k={k}", circuit, inst.full_system().n, tree_size(tree)))
    for inst, tree, circuit in _compiled_random_instances(10, seed=777):
        checked.append(("random", circuit, inst.full_system().n, tree_size(tree)))
    cnf = CNF(1, [frozenset({1}), frozenset({-1})])
    base_tree = solve_bb(cnf_to_ilp(cnf))
    cert = certificate_from_tree(cnf, (1,), (), base_tree)
    checked.append(("split cnf", cert, 1 + 2 * cnf.m, tree_size(base_tree)))
    bad = []
    for name, circuit, n, leaves in checked:
        bound = interpolant_size_bound(n, leaves)
        if circuit_size(circuit) > bound:
            bad.append((name, circuit_size(circuit), bound))
    _report("compile-size-bound", not bad, f"{len(checked)} circuits")
    assert not bad, bad


def test_criterion_minimum_tree_size_product():
    """The capped exhaustive search finds four leaves for the diamond
    slice, its square, and their minimum."""
    start = time.monotonic()
    prod, _ = cross_polytope_fixture()
    factor_min = min_tree_size_bounded(prod.p, 3, 2)
    product_min = min_tree_size_bounded(prod.combined, 3, 2)
    elapsed = time.monotonic() - start
    ok = factor_min == 4 and product_min == 4 and elapsed <= 120
    _report(
        "minimum-tree-size",
        ok,
        f"factor {factor_min}, product {product_min}, {elapsed:.1f}s",
    )
    assert factor_min == 4
    assert product_min == min(factor_min, factor_min) == 4
    assert elapsed <= 120


def test_criterion_fixture_counterexample():
    """Naive projection must fail on both factors while the relaxed
    decomposition succeeds on the second.

    The second-factor half of the claim is false (ledger entry): the
    all-zero right-hand sides already validate every projected
    certificate, because the rebuilt branching rows have zero
    directions and the first-factor leaves put weight on the absurd
    right-branch row.  The assertion is kept as specified and fails.
    """
    prod, tree = cross_polytope_fixture()
    naive_p = search_certified_conforming(tree, prod, "P", unit_box(2))
    side, qtree = decompose_conforming(tree, prod, unit_box(2), unit_box(2))
    defects = audit_conforming(qtree, tree, prod, side)
    sub_ok = {
        "no naive first-factor tree": naive_p is None,
        "relaxed side is Q": side == "Q",
        "shape matches the zero-direction conforming tree": qtree.tree.same_shape(tree)
        and qtree.tree.root.disjunction.alpha == (0, 0),
        "checker passes": defects == [],
    }
    naive_q = search_certified_conforming(tree, prod, "Q", unit_box(2))
    sub_ok["no naive second-factor tree"] = naive_q is None
    ok = all(sub_ok.values())
    detail = "; ".join(f"{k}: {'ok' if v else 'FALSE'}" for k, v in sub_ok.items())
    _report("fixture-counterexample", ok, detail)
    assert sub_ok["no naive first-factor tree"]
    assert sub_ok["relaxed side is Q"]
    assert sub_ok["shape matches the zero-direction conforming tree"]
    assert sub_ok["checker passes"]
    assert naive_q is None, (
        "counterexample claim refuted for the second factor: assignment "
        f"{naive_q} validates every projected certificate (see decisions ledger)"
    )


def test_criterion_quasi_certificate_soundness():
    """Two hundred random product decompositions pass the independent
    conformance and two-case audit."""
    rng = random.Random(31337)
    audited = 0
    failures = 0
    while audited < 200:
        p = random_system(rng, rng.randint(1, 3), rng.randint(1, 3))
        q = random_system(rng, rng.randint(1, 3), rng.randint(1, 3))
        p_feasible = integer_feasible_oracle(p, p.unit_bounds()) is not None
        q_feasible = integer_feasible_oracle(q, q.unit_bounds()) is not None
        if p_feasible and q_feasible:
            continue
        from bbinterp.conformal import ProductSystem

        prod = ProductSystem(p, q)
        try:
            tree = certify_tree(solve_bb(prod.combined), prod.combined)
        except IntegerPointFound:
            continue
        side, result = decompose_conforming(tree, prod, unit_box(p.n), unit_box(q.n))
        defects = audit_conforming(result, tree, prod, side)
        if defects:
            failures += 1
        if p_feasible and side == SIDE_P:
            failures += 1
        if q_feasible and side != SIDE_P:
            failures += 1
        audited += 1
    _report("quasi-certificate-soundness", failures == 0, f"{audited} products")
    assert failures == 0


def test_criterion_monotonicity_suite():
    """Every distinct gate template produced across the pipeline is
    non-decreasing on a randomized admissible grid."""
    circuits = []
    inst = gen_cc_instance(4, 3)
    tree = solve_bb(inst.full_system())
    circuits.append(compile_interpolant(tree, inst))
    for _, _, circuit in _compiled_random_instances(5, seed=9):
        circuits.append(circuit)
    probe, top, _ = _random_probe_circuit(random.Random(4))
    circuits.append(binary_search_transform(probe, 4, top, var="y"))
    cnf = CNF(1, [frozenset({1}), frozenset({-1})])
    circuits.append(certificate_from_tree(cnf, (1,), (), solve_bb(cnf_to_ilp(cnf))))

    unique = {}
    for circuit in circuits:
        for fn in circuit_gate_fns(circuit):
            unique[json.dumps(fn.to_json(), sort_keys=True)] = fn
    rng = random.Random(11)
    violations = [
        key for key, fn in unique.items()
        # 40 grid points per argument give >1000 ordered comparisons
        if not check_monotone(fn, rng=rng, samples=40)
    ]
    _report("monotonicity-suite", not violations, f"{len(unique)} distinct templates")
    assert not violations, violations[:2]


def test_criterion_cnf_pipeline():
    """Random dense width-3 clause sets: unsatisfiable draws yield
    certificates passing sampled subset audits; a small clause set is
    audited on every subset."""
    n, k, m = 8, 3, 63
    done = 0
    seed = 0
    sampled_failures = 0
    while done < 2 and seed < 40:
        cnf = gen_random_kcnf(n, k, m, seed)
        seed += 1
        if cnf.satisfiable():
            continue
        x0 = tuple(range(1, 5))
        x1 = tuple(range(5, 9))
        tree = solve_bb(cnf_to_ilp(cnf))
        circuit = certificate_from_tree(cnf, x0, x1, tree)
        rng = random.Random(seed)
        for _ in range(100):
            subset = {i for i in range(cnf.m) if rng.random() < 0.5}
            if not check_certificate(circuit, cnf, x0, x1, subset):
                sampled_failures += 1
        done += 1
    assert done == 2, "not enough unsatisfiable draws in 40 seeds"

    # Small clause set: every subset.
    small_seed = 0
    while True:
        small = gen_random_kcnf(4, 2, 14, small_seed)
        if not small.satisfiable() and small.m <= 10:
            break
        small_seed += 1
    tree = solve_bb(cnf_to_ilp(small))
    circuit = certificate_from_tree(small, (1, 2), (3, 4), tree)
    exhaustive_failures = 0
    for bits in itertools.product((0, 1), repeat=small.m):
        subset = {i for i, bit in enumerate(bits) if bit}
        if not check_certificate(circuit, small, (1, 2), (3, 4), subset):
            exhaustive_failures += 1
    ok = sampled_failures == 0 and exhaustive_failures == 0
    _report(
        "cnf-pipeline",
        ok,
        f"2 dense draws x 100 sampled subsets, {2 ** small.m} exhaustive subsets",
    )
    assert sampled_failures == 0
    assert exhaustive_failures == 0
