"""Command line front end.

Exit codes: 0 success, 1 verification failure (invalid tree, failed
check, unsatisfiable expectation), 2 usage or file-format error.
"""

from __future__ import annotations

import argparse
import sys

from .bbtree import (
    DepthCapExceeded,
    FeasibleLeafError,
    IntegerPointFound,
    MOST_FRACTIONAL,
    VARIABLE_BRANCHING,
    certify_tree,
    node_problem,
    solve_bb,
    tree_size,
    validate_tree,
)
from .conformal import ProductSystem, audit_conforming, decompose_conforming, unit_box
from .instances import (
    InstanceError,
    certificate_from_tree,
    cnf_to_ilp,
    cross_polytope_fixture,
    gen_cc_instance,
    gen_random_kcnf,
    gen_z_witness,
)
from .linsys import Feasible, check_farkas, lp_solve
from . import serialize
from .serialize import FormatError, load_json, save_json


class VerificationFailure(Exception):
    pass


class UsageFailure(Exception):
    pass


def _load_system(path):
    return serialize.system_from_json(load_json(path), path)


def _load_tree(path):
    return serialize.tree_from_json(load_json(path), path)


def _cmd_gen(args):
    if args.what == "cc":
        inst = gen_cc_instance(args.r, args.k)
        save_json(args.out, serialize.instance_to_json(inst))
        print(f"wrote {args.out} (n1={inst.n1} n2={inst.n2} n3={inst.n3})")
    elif args.what == "kcnf":
        cnf = gen_random_kcnf(args.n, args.k, args.m, args.seed)
        with open(args.out, "w") as handle:
            handle.write(f"c seed {args.seed}\nc draws {args.m}\n")
            handle.write(serialize.cnf_to_dimacs(cnf))
        print(f"wrote {args.out} ({cnf.m} distinct clauses from {len(cnf.draw_log)} draws, seed {args.seed})")
    elif args.what == "cross":
        prod, tree = cross_polytope_fixture()
        save_json(args.out_system, serialize.system_to_json(prod.combined))
        save_json(args.out_tree, serialize.tree_to_json(tree))
        print(f"wrote {args.out_system} and {args.out_tree}")
    elif args.what == "witness":
        inst = serialize.instance_from_json(load_json(args.instance), args.instance)
        side = args.side.upper()
        z, witness = gen_z_witness(inst, side, args.seed)
        save_json(args.out, serialize.witness_to_json(side, z, witness, args.seed))
        print(f"wrote {args.out} (side {side}, seed {args.seed})")
    return 0


def _cmd_solve(args):
    system = _load_system(args.system)
    try:
        tree = solve_bb(system, strategy=args.strategy, depth_cap=args.cap_depth)
    except IntegerPointFound as exc:
        raise VerificationFailure(
            f"system is integer-feasible at {exc.point}; no valid tree exists"
        ) from None
    except DepthCapExceeded as exc:
        raise VerificationFailure(str(exc)) from None
    save_json(args.out, serialize.tree_to_json(tree))
    print(f"wrote {args.out} (size {tree_size(tree)})")
    return 0


def _cmd_validate(args):
    system = _load_system(args.system)
    tree = _load_tree(args.tree)
    for path in tree.leaf_paths():
        problem = node_problem(tree, path, system)
        result = lp_solve(problem)
        if isinstance(result, Feasible):
            point = ", ".join(str(v) for v in result.point)
            raise VerificationFailure(f"leaf {path!r} is LP-feasible at ({point})")
        cert = tree.node(path).cert
        if cert is not None and not check_farkas(problem, cert):
            raise VerificationFailure(f"leaf {path!r} carries an invalid certificate")
    print(f"valid ({tree_size(tree)} leaves)")
    return 0


def _cmd_decompose(args):
    p = _load_system(args.p)
    q = _load_system(args.q)
    tree = _load_tree(args.tree)
    prod = ProductSystem(p, q)
    if not tree.is_certified():
        tree = certify_tree(tree, prod.combined)
    side, qtree = decompose_conforming(tree, prod, unit_box(p.n), unit_box(q.n))
    defects = audit_conforming(qtree, tree, prod, side)
    if defects:
        raise VerificationFailure("; ".join(defects))
    save_json(args.out, serialize.quasi_tree_to_json(qtree))
    print(f"side {side}; wrote {args.out}")
    return 0


def _cmd_compile(args):
    from .circuits import circuit_size, compile_interpolant

    inst = serialize.instance_from_json(load_json(args.instance), args.instance)
    tree = _load_tree(args.tree)
    if not tree.is_certified():
        try:
            tree = certify_tree(tree, inst.full_system())
        except FeasibleLeafError as exc:
            raise VerificationFailure(str(exc)) from None
    circuit = compile_interpolant(tree, inst)
    save_json(args.out, serialize.circuit_to_json(circuit))
    print(f"wrote {args.out} ({circuit_size(circuit)} gates)")
    return 0


def _cmd_eval(args):
    circuit = serialize.circuit_from_json(load_json(args.circuit), args.circuit)
    data = load_json(args.z)
    z = data["z"] if isinstance(data, dict) else data
    inputs = {f"z{i}": v for i, v in enumerate(z)}
    print(circuit.eval(inputs))
    return 0


def _cmd_certify_cnf(args):
    from .circuits import circuit_size

    with open(args.cnf) as handle:
        cnf = serialize.cnf_from_dimacs(handle.read(), args.cnf)
    x0 = tuple(int(v) for v in args.x0.split(",")) if args.x0 else tuple()
    x1 = tuple(v for v in range(1, cnf.n + 1) if v not in set(x0))
    system = cnf_to_ilp(cnf)
    try:
        tree = solve_bb(system, strategy=args.strategy, depth_cap=args.cap_depth)
    except IntegerPointFound as exc:
        raise VerificationFailure(f"the clause set is satisfiable at {exc.point}") from None
    circuit = certificate_from_tree(cnf, x0, x1, tree)
    save_json(args.out, serialize.circuit_to_json(circuit))
    print(f"wrote {args.out} ({circuit_size(circuit)} gates, tree size {tree_size(tree)})")
    return 0


def _cmd_experiment(args):
    from .report import ExperimentSpec, ExperimentSpecError, run_and_write

    grid = [int(v) for v in args.grid.split(",") if v != ""]
    try:
        spec = ExperimentSpec(
            family=args.family,
            grid=grid,
            seeds=[int(v) for v in args.seeds.split(",") if v != ""],
            k=args.k,
            strategy=args.strategy,
            out_dir=args.out_dir,
            witnesses=args.witnesses,
            subset_samples=args.subset_samples,
            cap_depth=args.cap_depth,
            cap_enum=args.cap_enum,
        )
    except ExperimentSpecError as exc:
        raise UsageFailure(str(exc)) from None
    rows = run_and_write(spec)
    failures = [r for r in rows if r.error or not r.separated]
    for row in rows:
        note = f"  [{row.error}]" if row.error else ""
        print(
            f"{row.instance_id}: tree={row.tree_size} circuit={row.circuit_size} "
            f"separated={row.separated} ms={row.ms}{note}"
        )
    print(f"report in {spec.out_dir}/report.csv and {spec.out_dir}/sizes.svg")
    if failures:
        raise VerificationFailure(f"{len(failures)} grid points failed verification")
    return 0


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--cap-enum", type=int, default=1 << 21,
                        help="integer enumeration cap (default 2^21)")
    parser.add_argument("--cap-depth", type=int, default=None,
                        help="tree depth cap (default twice the variable count)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bbinterp",
        description="Branch-and-bound proofs with general disjunctions: "
        "validate trees, decompose product proofs, compile separating "
        "circuits, generate instance families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate instances and fixtures")
    gen_sub = gen.add_subparsers(dest="what", required=True)
    g = gen_sub.add_parser("cc", help="coupled clique/coloring system")
    g.add_argument("--r", type=int, required=True, help="vertex count")
    g.add_argument("--k", type=int, default=2, help="clique size (default 2)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)
    g = gen_sub.add_parser("kcnf", help="random k-CNF in DIMACS format")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--m", type=int, required=True, help="number of clause draws")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)
    g = gen_sub.add_parser("cross", help="diamond product fixture with its tree")
    g.add_argument("--out-system", required=True)
    g.add_argument("--out-tree", required=True)
    g.set_defaults(func=_cmd_gen)
    g = gen_sub.add_parser("witness", help="shared-variable witness vector")
    g.add_argument("--instance", required=True)
    g.add_argument("--side", choices=["z1", "z2", "Z1", "Z2"], required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="build a certified tree for a 0/1 system")
    p.add_argument("--system", required=True)
    p.add_argument("--strategy", choices=[VARIABLE_BRANCHING, MOST_FRACTIONAL],
                   default=VARIABLE_BRANCHING, help="branching rule (default variable)")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="check every leaf problem is infeasible")
    p.add_argument("--system", required=True)
    p.add_argument("--tree", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("decompose", help="conforming single-factor proof from a product proof")
    p.add_argument("--p", required=True, help="first factor system")
    p.add_argument("--q", required=True, help="second factor system")
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("compile", help="compile a tree into a separating circuit")
    p.add_argument("--instance", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("eval", help="evaluate a circuit on a shared-variable vector")
    p.add_argument("--circuit", required=True)
    p.add_argument("--z", required=True, help="witness JSON or a bare list")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("certify-cnf", help="infeasibility-certificate circuit for a clause set")
    p.add_argument("--cnf", required=True, help="DIMACS file")
    p.add_argument("--x0", required=True, help="comma-separated first-side variables")
    p.add_argument("--strategy", choices=[VARIABLE_BRANCHING, MOST_FRACTIONAL],
                   default=VARIABLE_BRANCHING, help="branching rule (default variable)")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_certify_cnf)

    p = sub.add_parser("experiment", help="run a parameter grid and write CSV + SVG reports")
    p.add_argument("--family", choices=["cc", "cnf"], required=True)
    p.add_argument("--grid", required=True, help="comma-separated r values (cc) or n values (cnf)")
    p.add_argument("--seeds", default="0", help="comma-separated seeds (default 0)")
    p.add_argument("--k", type=int, default=2, help="clique size for the cc family")
    p.add_argument("--strategy", choices=[VARIABLE_BRANCHING, MOST_FRACTIONAL],
                   default=VARIABLE_BRANCHING, help="branching rule (default variable)")
    p.add_argument("--witnesses", type=int, default=5,
                   help="witnesses per side per point (default 5)")
    p.add_argument("--subset-samples", type=int, default=20,
                   help="sampled selector subsets per clause-set point (default 20)")
    p.add_argument("--out-dir", default="report", help="output directory (default report)")
    _add_common(p)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except UsageFailure as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, InstanceError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
