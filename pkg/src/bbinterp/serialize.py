"""File formats: JSON for systems, trees, instances, boxes, witnesses
and circuits, DIMACS for clause sets.

Readers raise FormatError naming the file and the offending field so
the command line can print a usable diagnostic.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .bbtree import BBTree, TreeNode, branch, leaf
from .conformal import QuasiCertifiedTree, box_of
from .instances import CNF, InterpolationInstance
from .linsys import LinSystem, RowLabel
from .circuits import Circuit


class FormatError(ValueError):
    def __init__(self, filename, field, message):
        super().__init__(f"{filename}: field {field!r}: {message}")
        self.filename = filename
        self.field = field


def frac_str(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def parse_frac(text) -> Fraction:
    return Fraction(text)


# ---------------------------------------------------------------------------
# linear systems


def system_to_json(sys: LinSystem) -> dict:
    return {
        "n": sys.n,
        "m": sys.m,
        "A": [list(row) for row in sys.rows],
        "b": list(sys.rhs),
        "labels": [str(label) for label in sys.labels],
    }


def system_from_json(data, filename="<memory>") -> LinSystem:
    for key in ("n", "A", "b"):
        if key not in data:
            raise FormatError(filename, key, "missing")
    try:
        labels = [RowLabel.parse(t) for t in data.get("labels", [])] or None
    except ValueError as exc:
        raise FormatError(filename, "labels", str(exc)) from None
    try:
        sys = LinSystem(int(data["n"]), data["A"], data["b"], labels)
    except (ValueError, TypeError) as exc:
        raise FormatError(filename, "A/b", str(exc)) from None
    if "m" in data and int(data["m"]) != sys.m:
        raise FormatError(filename, "m", f"says {data['m']} but {sys.m} rows given")
    return sys


# ---------------------------------------------------------------------------
# trees


def _node_to_json(node: TreeNode) -> dict:
    if node.is_leaf:
        out = {"leaf": True}
        if node.cert is not None:
            out["cert"] = list(node.cert)
        return out
    return {
        "alpha": list(node.disjunction.alpha),
        "delta": node.disjunction.delta,
        "left": _node_to_json(node.left),
        "right": _node_to_json(node.right),
    }


def tree_to_json(tree: BBTree) -> dict:
    return {"n": tree.n, "node": _node_to_json(tree.root)}


def _node_from_json(data, filename, path):
    if data.get("leaf"):
        return leaf(data.get("cert"))
    for key in ("alpha", "delta", "left", "right"):
        if key not in data:
            raise FormatError(filename, f"node[{path}].{key}", "missing")
    return branch(
        data["alpha"],
        data["delta"],
        _node_from_json(data["left"], filename, path + "L"),
        _node_from_json(data["right"], filename, path + "R"),
    )


def tree_from_json(data, filename="<memory>") -> BBTree:
    if "node" not in data:
        raise FormatError(filename, "node", "missing")
    if "n" not in data:
        raise FormatError(filename, "n", "missing")
    return BBTree(int(data["n"]), _node_from_json(data["node"], filename, ""))


def quasi_tree_to_json(qtree: QuasiCertifiedTree) -> dict:
    def encode(node: TreeNode, path: str) -> dict:
        if node.is_leaf:
            out = {"leaf": True}
            if node.cert is not None:
                out["cert"] = list(node.cert)
            case = qtree.quasi_cases.get(path)
            if case is not None:
                out["quasi_case"] = case
            return out
        return {
            "alpha": list(node.disjunction.alpha),
            "delta": node.disjunction.delta,
            "left": encode(node.left, path + "L"),
            "right": encode(node.right, path + "R"),
        }

    return {
        "n": qtree.tree.n,
        "node": encode(qtree.tree.root, ""),
        "box": [[frac_str(lo), frac_str(hi)] for lo, hi in qtree.box],
    }


def quasi_tree_from_json(data, filename="<memory>") -> QuasiCertifiedTree:
    if "box" not in data:
        raise FormatError(filename, "box", "missing")
    box = box_of([(parse_frac(lo), parse_frac(hi)) for lo, hi in data["box"]])
    cases = {}

    def walk(node_data, path):
        if node_data.get("leaf"):
            if "quasi_case" in node_data:
                cases[path] = node_data["quasi_case"]
            return
        walk(node_data["left"], path + "L")
        walk(node_data["right"], path + "R")

    tree = tree_from_json(data, filename)
    walk(data["node"], "")
    return QuasiCertifiedTree(tree, box, cases)


# ---------------------------------------------------------------------------
# instances and witnesses


def instance_to_json(inst: InterpolationInstance) -> dict:
    return {
        "n1": inst.n1,
        "n2": inst.n2,
        "n3": inst.n3,
        "A": [list(r) for r in inst.a_block],
        "C": [list(r) for r in inst.c_block],
        "a": list(inst.a_rhs),
        "B": [list(r) for r in inst.b_block],
        "D": [list(r) for r in inst.d_block],
        "b": list(inst.b_rhs),
        "meta": dict(inst.meta),
    }


def instance_from_json(data, filename="<memory>") -> InterpolationInstance:
    for key in ("n1", "n2", "n3", "A", "C", "a", "B", "D", "b"):
        if key not in data:
            raise FormatError(filename, key, "missing")
    try:
        return InterpolationInstance(
            int(data["n1"]), int(data["n2"]), int(data["n3"]),
            data["A"], data["C"], data["a"],
            data["B"], data["D"], data["b"],
            meta=data.get("meta", {}),
        )
    except ValueError as exc:
        raise FormatError(filename, "blocks", str(exc)) from None


def witness_to_json(side, z, witness, seed) -> dict:
    return {"side": side, "z": list(z), "witness": list(witness), "seed": seed}


def witness_from_json(data, filename="<memory>"):
    for key in ("side", "z"):
        if key not in data:
            raise FormatError(filename, key, "missing")
    return data["side"], tuple(data["z"]), tuple(data.get("witness", ())), data.get("seed")


# ---------------------------------------------------------------------------
# circuits


def circuit_to_json(circuit: Circuit) -> dict:
    return circuit.to_json()


def circuit_from_json(data, filename="<memory>") -> Circuit:
    for key in ("gates", "output"):
        if key not in data:
            raise FormatError(filename, key, "missing")
    try:
        return Circuit.from_json(data)
    except (ValueError, KeyError) as exc:
        raise FormatError(filename, "gates", str(exc)) from None


# ---------------------------------------------------------------------------
# DIMACS


def cnf_to_dimacs(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.n} {cnf.m}"]
    for clause in cnf.clauses:
        lits = sorted(clause, key=lambda l: (abs(l), l < 0))
        lines.append(" ".join(str(l) for l in lits) + " 0")
    return "\n".join(lines) + "\n"


def cnf_from_dimacs(text: str, filename="<memory>") -> CNF:
    n = None
    declared = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(filename, f"line {lineno}", "bad problem line")
            n, declared = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise FormatError(filename, f"line {lineno}", "clause before the problem line")
        lits = [int(tok) for tok in line.split()]
        if not lits or lits[-1] != 0:
            raise FormatError(filename, f"line {lineno}", "clause must end with 0")
        clauses.append(frozenset(lits[:-1]))
    if n is None:
        raise FormatError(filename, "header", "missing problem line")
    if declared is not None and declared != len(clauses):
        raise FormatError(filename, "header", f"declares {declared} clauses, found {len(clauses)}")
    try:
        return CNF(n, clauses)
    except ValueError as exc:
        raise FormatError(filename, "clauses", str(exc)) from None


# ---------------------------------------------------------------------------
# file helpers


def load_json(path):
    with open(path) as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise FormatError(path, f"line {exc.lineno}", exc.msg) from None


def save_json(path, data):
    with open(path, "w") as handle:
        json.dump(data, handle, indent=1, sort_keys=True)
        handle.write("\n")
