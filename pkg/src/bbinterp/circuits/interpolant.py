"""Compile a certified tree for a coupled 0/1 system into a circuit
deciding which factor became infeasible.

Fixing the shared variables z turns the system into a product of two
0/1 polytopes and the tree into a product proof.  The circuit decides
whether the first factor admits a conforming tree built from the
projected leaf certificates: per internal node the right-hand side is
re-encoded as a pair of slack variables measured from the ends of the
node's box window, each leaf certificate becomes a thresholded
nonnegative combination of z inputs and slack inputs, and the slack
pairing is resolved bottom-up with the in-circuit binary search, the
smaller child searched and the larger invoked once.  Output 1 means
the first factor is infeasible for this z, output 0 the second.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..bbtree import BBTree, node_problem, tree_size
from ..conformal import node_range, unit_box
from ..linsys import check_farkas
from .core import Circuit, CircuitBuilder
from .gates import BumpAccumulate, NonNegCombine, StepThreshold
from .transform import combine_split


class CompileError(ValueError):
    pass


def build_leaf_circuit(threshold, terms, bumps, input_names) -> Circuit:
    """Thresholded accumulator: 1 iff the weighted input sum beats the cut.

    terms maps input name -> nonnegative weight; inputs listed in bumps
    contribute their bump constant instead of weight * value once they
    reach their cut, which keeps the gate monotone provided
    bump >= weight * (cut + 1), and forces acceptance provided
    bump > threshold.  All names in input_names become input gates, so
    leaf circuits over a common variable pool compose by name.
    """
    threshold = Fraction(threshold)
    for name, weight in terms.items():
        if Fraction(weight) < 0:
            raise CompileError(f"negative weight {weight} on {name!r}")
    for name, (cut, bump) in bumps.items():
        weight = Fraction(terms.get(name, 0))
        if Fraction(bump) < max(threshold + 1, weight * (Fraction(cut) + 1)):
            raise CompileError(f"bump constant on {name!r} too small to stay monotone")
    if not input_names:
        raise CompileError("leaf circuits need at least one input to anchor")
    builder = CircuitBuilder()
    ids = {name: builder.input(name) for name in input_names}
    plain = [n for n in input_names if n in terms and n not in bumps]
    bumped = [n for n in input_names if n in bumps]

    acc = None
    if len(plain) >= 2:
        first, second = plain[0], plain[1]
        acc = builder.apply(
            NonNegCombine(Fraction(terms[first]), Fraction(terms[second])),
            ids[first],
            ids[second],
        )
        rest = plain[2:]
    elif plain:
        acc = builder.apply(
            NonNegCombine(Fraction(0), Fraction(terms[plain[0]])),
            ids[input_names[0]],
            ids[plain[0]],
        )
        rest = []
    else:
        acc = builder.apply(
            NonNegCombine(Fraction(0), Fraction(0)), ids[input_names[0]], ids[input_names[0]]
        )
        rest = []
    for name in rest:
        acc = builder.apply(
            NonNegCombine(Fraction(1), Fraction(terms[name])), acc, ids[name]
        )
    for name in bumped:
        cut, bump = bumps[name]
        acc = builder.apply(
            BumpAccumulate(Fraction(terms.get(name, 0)), Fraction(cut), Fraction(bump)),
            acc,
            ids[name],
        )
    builder.post_compose(acc, StepThreshold(threshold, strict=True))
    return builder.build(acc)


class InterpolantCompiler:
    """Single-instance compilation state."""

    def __init__(self, tree: BBTree, system, n1: int, n3: int, z_cols):
        self.tree = tree
        self.system = system
        self.n1 = n1
        self.box = unit_box(n1)
        self.z_names = [f"z{j}" for j in range(n3)]
        self.z_cols = z_cols
        self.ranges = {}
        for path in tree.internal_paths():
            alpha = tree.node(path).disjunction.alpha[:n1]
            self.ranges[path] = node_range(alpha, self.box)

    def leaf_circuit(self, path: str) -> Circuit:
        cert = self.tree.node(path).cert
        labels = node_problem(self.tree, path, self.system).labels
        base = Fraction(0)
        weights = {name: Fraction(0) for name in self.z_names}
        for f, label, row, beta in zip(cert, self.system.labels, self.system.rows, self.system.rhs):
            if label.kind != "P":
                continue
            base += f * beta
            for j, col in enumerate(self.z_cols):
                weights[self.z_names[j]] += f * row[col]
        slack_terms = {}
        slack_cuts = {}
        prefix = ""
        for step, f in zip(path, cert[self.system.m:]):
            rng = self.ranges[prefix]
            if step == "L":
                name = f"gm:{prefix}"
                base += f * rng.l_max
            else:
                name = f"gp:{prefix}"
                base += f * (-rng.l_min - 1)
            slack_terms[name] = Fraction(f)
            slack_cuts[name] = rng.length
            prefix += step
        threshold = base
        terms = {n: w for n, w in weights.items()}
        terms.update(slack_terms)
        for name, weight in terms.items():
            if weight < 0:
                raise CompileError(f"negative accumulated weight on {name!r}")
        # The searches feeding the slack inputs probe down to -(window+1),
        # so a firing bump must outweigh every sibling slack at its most
        # negative probe, not just the threshold.
        probe_slack = sum(
            slack_terms[name] * (Fraction(cut) + 1) for name, cut in slack_cuts.items()
        )
        bumps = {
            name: (
                Fraction(cut),
                max(threshold + 1 + probe_slack, slack_terms[name] * (Fraction(cut) + 1)),
            )
            for name, cut in slack_cuts.items()
        }
        input_names = list(self.z_names) + list(slack_terms)
        return build_leaf_circuit(threshold, terms, bumps, input_names)

    def compile_node(self, path: str) -> Circuit:
        node = self.tree.node(path)
        if node.is_leaf:
            return self.leaf_circuit(path)
        left = self.compile_node(path + "L")
        right = self.compile_node(path + "R")
        span = self.ranges[path].length
        left_leaves = tree_size(BBTree(self.tree.n, node.left))
        right_leaves = tree_size(BBTree(self.tree.n, node.right))
        low_var = f"gm:{path}"
        high_var = f"gp:{path}"
        # Search over the smaller subtree's slack, invoke the larger once.
        if left_leaves <= right_leaves:
            return combine_split(left, right, span, 0, span, var1=low_var, var2=high_var)
        return combine_split(right, left, span, 0, span, var1=high_var, var2=low_var)


def compile_interpolant(tree: BBTree, inst) -> Circuit:
    """Circuit over the shared z variables separating the two factors.

    The tree must be a valid certified tree for the instance's full
    bounded system.  Output 1 says the x-block is infeasible at this z
    (a clique-side witness exists, for the graph instances), 0 says the
    y-block is.
    """
    system = inst.full_system()
    if tree.n != system.n:
        raise CompileError(f"tree is over {tree.n} variables, instance over {system.n}")
    for path in tree.leaf_paths():
        cert = tree.node(path).cert
        if cert is None:
            raise CompileError(f"leaf {path!r} carries no certificate")
        if not check_farkas(node_problem(tree, path, system), cert):
            raise CompileError(f"leaf {path!r} certificate is invalid for the instance")
    z_cols = list(range(inst.n1 + inst.n2, inst.n1 + inst.n2 + inst.n3))
    compiler = InterpolantCompiler(tree, system, inst.n1, inst.n3, z_cols)
    circuit = compiler.compile_node("")
    extra = [n for n in circuit.input_names() if not n.startswith("z")]
    if extra:
        raise AssertionError(f"unresolved slack inputs {extra}")
    circuit.meta["tree_size"] = tree_size(tree)
    circuit.meta["n"] = system.n
    circuit.meta["size_bound"] = interpolant_size_bound(system.n, tree_size(tree))
    return circuit


def interpolant_size_bound(n: int, leaves: int) -> float:
    """Gate-count ceiling for a compiled circuit, in the instance's
    variable count and the tree's leaf count."""
    base = 50.0 * (n + 1) ** 2 * leaves ** 2
    inner = (n + 2) ** 2 * math.log2(10 * n ** 3 + 3)
    return base * inner ** math.log2((4 * n + 5) * leaves)
