"""Conforming single-factor proofs extracted from product proofs.

Given a certified tree for a product P x Q, one of the two factors
always admits a tree of the same shape whose branching directions are
the per-factor parts of the original ones and whose leaves reuse the
projected multiplier vectors, provided certificates are allowed a
relaxed reading: a leaf is also fine when some ancestor branching
halfspace misses a fixed bounding box entirely.

The right-hand sides of the rebuilt tree are found recursively.  For a
fixed node, the feasible right-hand sides for the left branch and for
the right branch form contiguous ranges running in opposite
directions, so a binary search per node suffices.  The ranges run over
the exact window where the branching halfspaces can still meet the
box, extended to the values where one side misses it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .bbtree import BBTree, TreeNode, branch as make_branch, leaf as make_leaf, node_problem
from .linsys import LinSystem, RowLabel, check_farkas, lp_solve, Infeasible, product_rows

SIDE_P = "P"
SIDE_Q = "Q"


class ConformanceError(ValueError):
    """The input tree is not a valid certified tree for the product."""


def _ceil(v) -> int:
    v = Fraction(v)
    return -((-v).__floor__())


def _floor(v) -> int:
    return Fraction(v).__floor__()


def unit_box(n: int):
    """The box [0, 1]^n."""
    return [(Fraction(0), Fraction(1))] * n


def box_of(intervals):
    box = [(Fraction(lo), Fraction(hi)) for lo, hi in intervals]
    for lo, hi in box:
        if lo > hi:
            raise ValueError(f"empty box interval [{lo}, {hi}]")
    return box


@dataclass(frozen=True)
class NodeRange:
    """Integer window where both sides of a disjunction can meet a box.

    l_min is the largest g with {alpha.x <= g} missing the box, l_max
    the smallest g with {alpha.x >= g+1} missing it.
    """

    l_min: int
    l_max: int

    @property
    def length(self) -> int:
        return self.l_max - self.l_min


def node_range(alpha, box) -> NodeRange:
    if len(alpha) != len(box):
        raise ValueError("direction and box dimensions differ")
    mn = sum((Fraction(a) * (lo if a > 0 else hi)) for a, (lo, hi) in zip(alpha, box))
    mx = sum((Fraction(a) * (hi if a > 0 else lo)) for a, (lo, hi) in zip(alpha, box))
    return NodeRange(_ceil(mn) - 1, _floor(mx))


@dataclass
class ProductSystem:
    """Two factor systems and their block-diagonal combination."""

    p: LinSystem
    q: LinSystem
    combined: LinSystem = field(init=False)

    def __post_init__(self):
        rows, rhs, labels = product_rows(self.p, self.q)
        self.combined = LinSystem(self.p.n + self.q.n, rows, rhs, labels)

    def factor(self, side: str) -> LinSystem:
        return self.p if side == SIDE_P else self.q

    def split_alpha(self, alpha):
        return tuple(alpha[: self.p.n]), tuple(alpha[self.p.n:])


@dataclass
class QuasiCertifiedTree:
    """A tree for one factor with per-leaf multipliers and the box.

    quasi_cases records, per leaf path, whether the multipliers were
    checked as a proper certificate (1) or the leaf is excused by an
    ancestor halfspace missing the box (2).
    """

    tree: BBTree
    box: list
    quasi_cases: dict


def project_certificate(cert, labels, side: str):
    """Restrict a product certificate to one factor.

    Keeps the entries on the chosen side's original rows and on every
    branching row, drops the other factor's rows.  Entry order follows
    the row order of the projected node problem.
    """
    if len(cert) != len(labels):
        raise ValueError("certificate and labels differ in length")
    keep = []
    for f, label in zip(cert, labels):
        if label.is_branch() or label.kind == side:
            keep.append(f)
    return tuple(keep)


def check_quasi(qtree: QuasiCertifiedTree, leaf_path: str, sys: LinSystem) -> bool:
    """A leaf is fine via its certificate or via an empty ancestor edge."""
    return quasi_case(qtree, leaf_path, sys) is not None


def quasi_case(qtree: QuasiCertifiedTree, leaf_path: str, sys: LinSystem):
    """1 when the leaf certificate checks out, 2 when an ancestor edge
    halfspace misses the box, None when neither holds."""
    node = qtree.tree.node(leaf_path)
    if not node.is_leaf:
        raise ValueError(f"{leaf_path!r} is not a leaf")
    problem = node_problem(qtree.tree, leaf_path, sys)
    if node.cert is not None and check_farkas(problem, node.cert):
        return 1
    cur = qtree.tree.root
    for step in leaf_path:
        d = cur.disjunction
        rng = node_range(d.alpha, qtree.box)
        if step == "L":
            if d.delta <= rng.l_min:
                return 2
            cur = cur.left
        else:
            if d.delta >= rng.l_max:
                return 2
            cur = cur.right
    return None


class _LeafData:
    """Per-leaf affine form of the projected certificate value.

    For a fixed side, the certificate value at a leaf is a constant
    (from the factor rows) plus one term per ancestor edge that is
    linear in that edge's shift.  The leaf is certificate-valid exactly
    when the value is negative.
    """

    __slots__ = ("const", "edge_weights")

    def __init__(self, const, edge_weights):
        self.const = const
        self.edge_weights = edge_weights  # list aligned with path edges

    def value(self, side, shifts, deltas, steps):
        total = self.const
        for weight, shift, delta, step in zip(self.edge_weights, shifts, deltas, steps):
            if side == SIDE_P:
                if step == "L":
                    total += weight * (delta + shift)
                else:
                    total += weight * (-delta - shift - 1)
            else:
                if step == "L":
                    total += weight * (-shift)
                else:
                    total += weight * shift
        return total


class ConformingDecomposer:
    """Recursive side decision and tree reconstruction for one product."""

    def __init__(self, tree: BBTree, prod: ProductSystem, box_p, box_q, leaf_mode: str = "cert"):
        if leaf_mode not in ("cert", "lp"):
            raise ValueError(leaf_mode)
        self.tree = tree
        self.prod = prod
        self.boxes = {SIDE_P: box_of(box_p), SIDE_Q: box_of(box_q)}
        self.leaf_mode = leaf_mode
        self.memo = {}
        self.range_cache = {}
        self.leaf_data = {SIDE_P: {}, SIDE_Q: {}}
        if leaf_mode == "cert":
            self._check_input()
            self._prepare_leaves()

    def _check_input(self):
        combined = self.prod.combined
        for path in self.tree.leaf_paths():
            node = self.tree.node(path)
            if node.cert is None:
                raise ConformanceError(f"leaf {path!r} carries no certificate")
            problem = node_problem(self.tree, path, combined)
            if not check_farkas(problem, node.cert):
                raise ConformanceError(f"leaf {path!r} certificate is not valid for the product")

    def _prepare_leaves(self):
        combined = self.prod.combined
        m = combined.m
        for path in self.tree.leaf_paths():
            cert = self.tree.node(path).cert
            for side in (SIDE_P, SIDE_Q):
                const = Fraction(0)
                for f, label, beta in zip(cert, combined.labels, combined.rhs):
                    if label.kind == side:
                        const += f * beta
                self.leaf_data[side][path] = _LeafData(const, list(cert[m:]))

    def _range(self, side, path) -> NodeRange:
        key = (side, path)
        cached = self.range_cache.get(key)
        if cached is None:
            alpha = self.tree.node(path).disjunction.alpha
            part = self.prod.split_alpha(alpha)[0 if side == SIDE_P else 1]
            cached = node_range(part, self.boxes[side])
            self.range_cache[key] = cached
        return cached

    def _path_info(self, path):
        deltas = []
        cur = self.tree.root
        for step in path:
            deltas.append(cur.disjunction.delta)
            cur = cur.left if step == "L" else cur.right
        return deltas

    def _leaf_ok(self, side, path, shifts):
        if self.leaf_mode == "cert":
            data = self.leaf_data[side][path]
            deltas = self._path_info(path)
            return data.value(side, shifts, deltas, path) < 0
        # Shape-only variant: the shifted factor leaf system must be
        # LP-infeasible; the box keeps the windows finite.
        factor = self.prod.factor(side)
        rows, rhs = [], []
        cur = self.tree.root
        for step, shift in zip(path, shifts):
            d = cur.disjunction
            part = self.prod.split_alpha(d.alpha)[0 if side == SIDE_P else 1]
            if side == SIDE_P:
                rhs_val = d.delta + shift if step == "L" else -d.delta - shift - 1
            else:
                rhs_val = -shift if step == "L" else shift
            if step == "L":
                rows.append(part)
            else:
                rows.append(tuple(-a for a in part))
            rhs.append(rhs_val)
            cur = cur.left if step == "L" else cur.right
        labels = [RowLabel("branch", "*", "le")] * len(rows)
        system = factor.with_rows(rows, rhs, labels)
        return isinstance(lp_solve(system), Infeasible)

    def can(self, side, path, shifts) -> bool:
        key = (side, path, shifts)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        node = self.tree.node(path)
        if node.is_leaf:
            result = self._leaf_ok(side, path, shifts)
        else:
            result = self._branch_shift(side, path, shifts) is not None
        self.memo[key] = result
        return result

    def edge_ok(self, side, path, step, shifts, g) -> bool:
        """Child is covered at shift g: empty edge halfspace or a real tree."""
        rng = self._range(side, path)
        if side == SIDE_P:
            delta = self.tree.node(path).disjunction.delta
            if step == "L" and delta + g <= rng.l_min:
                return True
            if step == "R" and delta + g >= rng.l_max:
                return True
        else:
            if step == "L" and g >= -rng.l_min:
                return True
            if step == "R" and g <= -rng.l_max - 1:
                return True
        return self.can(side, path + step, shifts + (g,))

    def _branch_shift(self, side, path, shifts):
        """A shift making both children of this node work, or None.

        For the first factor the left-edge predicate is antitone in the
        shift and the right-edge one is monotone, so the largest shift
        that keeps the left branch alive is the only one to test.  For
        the second factor the directions flip and the right edge runs
        one step behind the left one.
        """
        rng = self._range(side, path)
        delta = self.tree.node(path).disjunction.delta
        if side == SIDE_P:
            lo = rng.l_min - delta
            hi = rng.l_max - delta + 1
            best = self._search_max(
                lambda g: self.edge_ok(side, path, "L", shifts, g), lo, hi
            )
            if best is None:
                return None
            if self.edge_ok(side, path, "R", shifts, best):
                return best
            return None
        lo = -rng.l_max
        hi = -rng.l_min
        best = self._search_min(
            lambda g: self.edge_ok(side, path, "L", shifts, g), lo, hi
        )
        if best is None:
            return None
        if self.edge_ok(side, path, "R", shifts, best - 1):
            return best
        return None

    @staticmethod
    def _search_max(pred, lo, hi):
        """Largest g in [lo, hi] with pred true; pred is antitone."""
        if not pred(lo):
            return None
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if pred(mid):
                lo = mid
            else:
                hi = mid - 1
        return lo

    @staticmethod
    def _search_min(pred, lo, hi):
        """Smallest g in [lo, hi] with pred true; pred is monotone."""
        if not pred(hi):
            return None
        while lo < hi:
            mid = (lo + hi) // 2
            if pred(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def decide(self):
        if self.can(SIDE_P, "", ()):
            return SIDE_P
        if self.can(SIDE_Q, "", ()):
            return SIDE_Q
        raise AssertionError(
            "no factor admits a conforming tree; the input cannot have been "
            "a valid certified tree for the product"
        )

    def mu(self, path, shifts, branch_kind, g) -> int:
        """Joint verdict at a probed shift: -1 first factor only, 0 both,
        1 second factor only.  Exposed for monotonicity audits."""
        step = "L" if branch_kind == "le" else "R"
        ok_p = self.edge_ok(SIDE_P, path, step, shifts, g)
        ok_q = self.edge_ok(SIDE_Q, path, step, shifts, g)
        if ok_p and ok_q:
            return 0
        if ok_p:
            return -1
        if ok_q:
            return 1
        raise AssertionError("neither factor covers a probed child")

    def build(self, side):
        cases = {}

        def filler(node: TreeNode, path: str) -> TreeNode:
            if node.is_leaf:
                cases[path] = 2
                return make_leaf(self._project_leaf(side, path))
            part = self.prod.split_alpha(node.disjunction.alpha)[0 if side == SIDE_P else 1]
            rng = node_range(part, self.boxes[side])
            return make_branch(
                part, rng.l_min, filler(node.left, path + "L"), filler(node.right, path + "R")
            )

        def rec(path: str, shifts) -> TreeNode:
            node = self.tree.node(path)
            if node.is_leaf:
                cases[path] = 1
                return make_leaf(self._project_leaf(side, path))
            g = self._branch_shift(side, path, shifts)
            assert g is not None
            delta = node.disjunction.delta
            part = self.prod.split_alpha(node.disjunction.alpha)[0 if side == SIDE_P else 1]
            if side == SIDE_P:
                new_delta = delta + g
                child_shifts = {"L": g, "R": g}
            else:
                new_delta = -g
                child_shifts = {"L": g, "R": g - 1}
            children = {}
            for step in ("L", "R"):
                child_g = child_shifts[step]
                if self.can(side, path + step, shifts + (child_g,)):
                    children[step] = rec(path + step, shifts + (child_g,))
                else:
                    children[step] = filler(self.tree.node(path + step), path + step)
            return make_branch(part, new_delta, children["L"], children["R"])

        root = rec("", ())
        factor = self.prod.factor(side)
        return QuasiCertifiedTree(BBTree(factor.n, root), self.boxes[side], cases)

    def _project_leaf(self, side, path):
        cert = self.tree.node(path).cert
        if cert is None:
            return None
        labels = node_problem(self.tree, path, self.prod.combined).labels
        return project_certificate(cert, labels, side)


def decompose_conforming(tree: BBTree, prod: ProductSystem, box_p, box_q):
    """Side and conforming quasi-certified tree for one factor.

    The tree must be a valid certified tree for prod.combined and the
    boxes must contain the factors.  When both factors admit conforming
    trees the first one wins, matching the circuit compiler's
    orientation.
    """
    dec = ConformingDecomposer(tree, prod, box_p, box_q, leaf_mode="cert")
    side = dec.decide()
    return side, dec.build(side)


def decompose_shape_only(tree: BBTree, prod: ProductSystem, box_p, box_q):
    """Certificate-free variant: leaves only need LP-infeasibility."""
    dec = ConformingDecomposer(tree, prod, box_p, box_q, leaf_mode="lp")
    side = dec.decide()
    result = dec.build(side)
    return side, result


def audit_conforming(result: QuasiCertifiedTree, original: BBTree, prod: ProductSystem, side: str) -> list:
    """Independent conformance check; returns a list of defects.

    Verifies shape equality, that every branching direction is the
    side's part of the original one, that leaf multipliers are the
    plain projections, and that every leaf passes the two-case check.
    """
    defects = []
    factor = prod.factor(side)
    if not result.tree.same_shape(original):
        defects.append("shape differs from the original tree")
        return defects
    for path, node in original.walk():
        built = result.tree.node(path)
        if not node.is_leaf:
            part = prod.split_alpha(node.disjunction.alpha)[0 if side == SIDE_P else 1]
            if tuple(built.disjunction.alpha) != part:
                defects.append(f"node {path!r} direction is not the projection")
        else:
            labels = node_problem(original, path, prod.combined).labels
            expected = project_certificate(node.cert, labels, side)
            if tuple(built.cert) != tuple(expected):
                defects.append(f"leaf {path!r} multipliers are not the projection")
            if not check_quasi(result, path, factor):
                defects.append(f"leaf {path!r} fails both certificate cases")
    return defects


def search_certified_conforming(tree: BBTree, prod: ProductSystem, side: str, box):
    """Exhaustive right-hand-side search with naively projected certificates.

    Tries every per-node right-hand side in the box window (widened by
    one on each end) and demands that every projected leaf multiplier
    vector be a proper certificate.  Returns an assignment mapping node
    path to right-hand side, or None when no assignment works.
    """
    box = box_of(box)
    internal = sorted(tree.internal_paths())
    windows = []
    for path in internal:
        alpha = tree.node(path).disjunction.alpha
        part = prod.split_alpha(alpha)[0 if side == SIDE_P else 1]
        rng = node_range(part, box)
        windows.append(range(rng.l_min - 1, rng.l_max + 2))
    factor = prod.factor(side)
    combined = prod.combined
    leaf_info = []
    for path in tree.leaf_paths():
        cert = tree.node(path).cert
        labels = node_problem(tree, path, combined).labels
        projected = project_certificate(cert, labels, side)
        leaf_info.append((path, projected))

    def assignment_ok(assign):
        for path, projected in leaf_info:
            rows, rhs = [], []
            cur = tree.root
            prefix = ""
            for step in path:
                part = prod.split_alpha(cur.disjunction.alpha)[0 if side == SIDE_P else 1]
                delta = assign[prefix]
                if step == "L":
                    rows.append(part)
                    rhs.append(delta)
                    cur = cur.left
                else:
                    rows.append(tuple(-a for a in part))
                    rhs.append(-delta - 1)
                    cur = cur.right
                prefix += step
            labels = [RowLabel("branch", "*", "le")] * len(rows)
            system = factor.with_rows(rows, rhs, labels)
            if not check_farkas(system, projected):
                return False
        return True

    for combo in itertools.product(*windows):
        assign = dict(zip(internal, combo))
        if assignment_ok(assign):
            return assign
    return None
