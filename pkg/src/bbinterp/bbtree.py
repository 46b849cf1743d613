"""Branch-and-bound trees over general disjunctions.

A tree branches at each internal node on alpha^T x <= delta versus
alpha^T x >= delta + 1.  Right branches are stored in the node problem
as -alpha^T x <= -delta - 1 so that every node problem stays a
<=-system and a single certificate convention covers everything.
Nodes are addressed by root paths such as "LRL".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linsys import (
    Feasible,
    Infeasible,
    LinSystem,
    RowLabel,
    check_farkas,
    lp_solve,
)


class UnknownNodeError(KeyError):
    pass


class FeasibleLeafError(ValueError):
    """A leaf problem admits a rational point, so the tree is invalid."""

    def __init__(self, path, point):
        super().__init__(f"leaf {path!r} is LP-feasible at {tuple(point)}")
        self.path = path
        self.point = tuple(point)


class IntegerPointFound(ValueError):
    """The solver hit an integral point; no valid tree exists."""

    def __init__(self, point):
        super().__init__(f"integral feasible point {tuple(point)}")
        self.point = tuple(point)


class DepthCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Disjunction:
    """Integral branching pair alpha^T x <= delta or alpha^T x >= delta+1."""

    alpha: tuple
    delta: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "delta", int(self.delta))


@dataclass
class TreeNode:
    """Internal node (disjunction plus two children) or leaf (cert optional)."""

    disjunction: Disjunction | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    cert: tuple | None = None

    @property
    def is_leaf(self) -> bool:
        return self.disjunction is None

    def __post_init__(self):
        if self.disjunction is not None and (self.left is None or self.right is None):
            raise ValueError("internal nodes need both children")
        if self.disjunction is None and (self.left is not None or self.right is not None):
            raise ValueError("leaves cannot have children")


def leaf(cert=None) -> TreeNode:
    return TreeNode(cert=None if cert is None else tuple(int(c) for c in cert))


def branch(alpha, delta, left, right) -> TreeNode:
    return TreeNode(disjunction=Disjunction(tuple(alpha), delta), left=left, right=right)


class BBTree:
    """A rooted binary tree of disjunctions over n variables."""

    def __init__(self, n: int, root: TreeNode):
        self.n = n
        self.root = root

    def node(self, path: str) -> TreeNode:
        cur = self.root
        for step in path:
            if cur.is_leaf:
                raise UnknownNodeError(path)
            cur = cur.left if step == "L" else cur.right
        return cur

    def walk(self):
        """Yield (path, node) pairs in preorder."""
        stack = [("", self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            if not node.is_leaf:
                stack.append((path + "R", node.right))
                stack.append((path + "L", node.left))

    def leaf_paths(self):
        return [path for path, node in self.walk() if node.is_leaf]

    def internal_paths(self):
        return [path for path, node in self.walk() if not node.is_leaf]

    def is_certified(self) -> bool:
        return all(node.cert is not None for _, node in self.walk() if node.is_leaf)

    def same_shape(self, other: "BBTree") -> bool:
        def rec(a: TreeNode, b: TreeNode) -> bool:
            if a.is_leaf != b.is_leaf:
                return False
            if a.is_leaf:
                return True
            return rec(a.left, b.left) and rec(a.right, b.right)

        return rec(self.root, other.root)

    def __repr__(self):
        return f"BBTree(n={self.n}, size={tree_size(self)})"


def tree_size(tree: BBTree) -> int:
    """Number of leaves."""
    return sum(1 for _, node in tree.walk() if node.is_leaf)


def path_rows(tree: BBTree, path: str):
    """Branch rows added along the root path, with branch labels.

    The label of each row records the internal node that branched and
    which side was taken, so certificates can be projected later.
    """
    rows, rhs, labels = [], [], []
    cur = tree.root
    prefix = ""
    for step in path:
        if cur.is_leaf:
            raise UnknownNodeError(path)
        d = cur.disjunction
        if step == "L":
            rows.append(tuple(d.alpha))
            rhs.append(d.delta)
            labels.append(RowLabel("branch", prefix, "le"))
            cur = cur.left
        elif step == "R":
            rows.append(tuple(-a for a in d.alpha))
            rhs.append(-d.delta - 1)
            labels.append(RowLabel("branch", prefix, "ge"))
            cur = cur.right
        else:
            raise UnknownNodeError(path)
        prefix += step
    return rows, rhs, labels


def node_problem(tree: BBTree, path: str, sys: LinSystem) -> LinSystem:
    """The system plus one row per edge on the path from the root."""
    if sys.n != tree.n:
        raise ValueError(f"system has {sys.n} variables, tree has {tree.n}")
    rows, rhs, labels = path_rows(tree, path)
    return sys.with_rows(rows, rhs, labels)


def validate_tree(tree: BBTree, sys: LinSystem) -> bool:
    """True iff every leaf problem is LP-infeasible."""
    for path in tree.leaf_paths():
        if isinstance(lp_solve(node_problem(tree, path, sys)), Feasible):
            return False
    return True


def certify_tree(tree: BBTree, sys: LinSystem) -> BBTree:
    """Attach a checked certificate to every leaf.

    Raises FeasibleLeafError (with the witness point) when some leaf
    problem is LP-feasible.
    """

    def rec(node: TreeNode, path: str) -> TreeNode:
        if node.is_leaf:
            result = lp_solve(node_problem(tree, path, sys))
            if isinstance(result, Feasible):
                raise FeasibleLeafError(path, result.point)
            prob = node_problem(tree, path, sys)
            assert check_farkas(prob, result.cert)
            return leaf(result.cert)
        d = node.disjunction
        return TreeNode(
            disjunction=d,
            left=rec(node.left, path + "L"),
            right=rec(node.right, path + "R"),
        )

    return BBTree(tree.n, rec(tree.root, ""))


VARIABLE_BRANCHING = "variable"
MOST_FRACTIONAL = "most-fractional"


def _pick_branch_variable(point, strategy):
    cands = [(j, v) for j, v in enumerate(point) if v.denominator != 1]
    if not cands:
        return None
    if strategy == VARIABLE_BRANCHING:
        return cands[0][0]
    if strategy == MOST_FRACTIONAL:
        def distance(v):
            frac = v - v.__floor__()
            return abs(frac - Fraction(1, 2))

        best = min(distance(v) for _, v in cands)
        for j, v in cands:
            if distance(v) == best:
                return j
        raise AssertionError
    raise ValueError(f"unknown strategy {strategy!r}")


def solve_bb(sys: LinSystem, strategy: str = VARIABLE_BRANCHING, depth_cap: int | None = None) -> BBTree:
    """Build a certified tree for an integer-infeasible 0/1-bounded system.

    Every variable must carry finite unit-row bounds.  Branches on the
    floor of a fractional coordinate of the LP point; raises
    IntegerPointFound when the LP point is integral (the system then
    has no valid tree) and DepthCapExceeded when the cap runs out.
    """
    bounds = sys.unit_bounds()
    if any(b is None for b in bounds):
        raise ValueError("solve_bb needs finite unit-row bounds on every variable")
    if depth_cap is None:
        depth_cap = 2 * sys.n

    def rec(current: LinSystem, depth: int) -> TreeNode:
        result = lp_solve(current)
        if isinstance(result, Infeasible):
            return leaf(result.cert)
        point = result.point
        j = _pick_branch_variable(point, strategy)
        if j is None:
            raise IntegerPointFound(point)
        if depth >= depth_cap:
            raise DepthCapExceeded(f"depth cap {depth_cap} reached")
        floor = point[j].__floor__()
        alpha = tuple(1 if k == j else 0 for k in range(sys.n))
        neg = tuple(-a for a in alpha)
        left_sys = current.with_rows([alpha], [floor], [RowLabel("branch", "*", "le")])
        right_sys = current.with_rows([neg], [-floor - 1], [RowLabel("branch", "*", "ge")])
        return branch(alpha, floor, rec(left_sys, depth + 1), rec(right_sys, depth + 1))

    return BBTree(sys.n, rec(sys, 0))
