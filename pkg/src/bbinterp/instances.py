"""Instance families: the coupled clique/coloring programs, random
k-CNFs, the CNF-to-ILP encoding, clause-splitting with selector
variables, and the cross-polytope product fixture.

Shared-variable systems follow a fixed block layout: the x-block
coupling coefficients are nonnegative and the y-block ones are
nonpositive, so fixing the shared variables tightens one factor and
relaxes the other monotonically.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .bbtree import BBTree, TreeNode, branch, leaf, node_problem, validate_tree, certify_tree
from .conformal import ProductSystem
from .linsys import LinSystem, RowLabel, ROW_P, ROW_Q, ROW_Z, check_farkas


class InstanceError(ValueError):
    pass


def _bound_rows(n, offset, total, kind):
    rows, rhs, labels = [], [], []
    for j in range(n):
        row = [0] * total
        row[offset + j] = 1
        rows.append(tuple(row))
        rhs.append(1)
        labels.append(RowLabel(kind))
        row = [0] * total
        row[offset + j] = -1
        rows.append(tuple(row))
        rhs.append(0)
        labels.append(RowLabel(kind))
    return rows, rhs, labels


@dataclass
class InterpolationInstance:
    """Block system A x + C z <= a, B y + D z <= b over 0/1 variables.

    C is nonnegative and D nonpositive entry-wise; the whole coupled
    system has no 0/1 solution.
    """

    n1: int
    n2: int
    n3: int
    a_block: list  # rows over x (length n1 each)
    c_block: list  # same rows' z coefficients (length n3)
    a_rhs: list
    b_block: list  # rows over y
    d_block: list
    b_rhs: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.c_block:
            if any(v < 0 for v in row):
                raise InstanceError("x-block coupling coefficients must be nonnegative")
        for row in self.d_block:
            if any(v > 0 for v in row):
                raise InstanceError("y-block coupling coefficients must be nonpositive")

    @property
    def n(self) -> int:
        return self.n1 + self.n2 + self.n3

    def full_system(self) -> LinSystem:
        """Everything as one labeled system with 0/1 bounds folded in.

        Row order: x-block rows, x bounds, y-block rows, y bounds,
        z bounds; the first two groups carry the first factor's label,
        the next two the second's.
        """
        total = self.n
        rows, rhs, labels = [], [], []
        for arow, crow, beta in zip(self.a_block, self.c_block, self.a_rhs):
            rows.append(tuple(arow) + (0,) * self.n2 + tuple(crow))
            rhs.append(beta)
            labels.append(RowLabel(ROW_P))
        br, bh, bl = _bound_rows(self.n1, 0, total, ROW_P)
        rows += br; rhs += bh; labels += bl
        for brow, drow, beta in zip(self.b_block, self.d_block, self.b_rhs):
            rows.append((0,) * self.n1 + tuple(brow) + tuple(drow))
            rhs.append(beta)
            labels.append(RowLabel(ROW_Q))
        br, bh, bl = _bound_rows(self.n2, self.n1, total, ROW_Q)
        rows += br; rhs += bh; labels += bl
        br, bh, bl = _bound_rows(self.n3, self.n1 + self.n2, total, ROW_Z)
        rows += br; rhs += bh; labels += bl
        return LinSystem(total, rows, rhs, labels)

    def factor_system(self, side: str, z) -> LinSystem:
        """One factor with the shared variables fixed, 0/1 bounds included."""
        if side == ROW_P:
            rows = [tuple(r) for r in self.a_block]
            rhs = [
                beta - sum(c * zv for c, zv in zip(crow, z))
                for crow, beta in zip(self.c_block, self.a_rhs)
            ]
            n = self.n1
        else:
            rows = [tuple(r) for r in self.b_block]
            rhs = [
                beta - sum(d * zv for d, zv in zip(drow, z))
                for drow, beta in zip(self.d_block, self.b_rhs)
            ]
            n = self.n2
        br, bh, bl = _bound_rows(n, 0, n, side)
        return LinSystem(n, rows + br, rhs + bh, [RowLabel(side)] * len(rows) + bl)

    def product_for(self, z) -> ProductSystem:
        return ProductSystem(self.factor_system(ROW_P, z), self.factor_system(ROW_Q, z))

    def instantiate_tree(self, tree: BBTree, z) -> BBTree:
        """The tree as a product proof for a fixed z.

        Disjunction right-hand sides absorb the z terms; leaf
        certificate entries on the z bound rows are dropped (they only
        ever help, so validity is preserved).
        """
        m_product = len(self.a_block) + 2 * self.n1 + len(self.b_block) + 2 * self.n2
        nz = self.n1 + self.n2

        def rec(node: TreeNode) -> TreeNode:
            if node.is_leaf:
                cert = None
                if node.cert is not None:
                    cert = node.cert[:m_product] + node.cert[m_product + 2 * self.n3:]
                return leaf(cert)
            d = node.disjunction
            alpha = d.alpha[:nz]
            shift = sum(c * zv for c, zv in zip(d.alpha[nz:], z))
            return branch(alpha, d.delta - shift, rec(node.left), rec(node.right))

        return BBTree(nz, rec(tree.root))


def pair_index(r: int):
    """Unordered vertex pairs in lexicographic order."""
    return list(itertools.combinations(range(r), 2))


def default_clique_size(r: int) -> int:
    """The headline clique parameter floor((r / log r)^(2/3) / 8).

    floor(x^(2/3) / 8) equals the largest c with 512 c^3 <= x^2, which
    is exact integer arithmetic whenever log2(r) is integral; elsewhere
    the boundary is irrational and floats are safe.
    """
    if r < 2:
        raise InstanceError("need at least two vertices")
    lg = math.log2(r)
    if lg == int(lg):
        from fractions import Fraction

        x = Fraction(r, int(lg))
        target = x * x
        c = int(round(float(target / 512) ** (1 / 3)))
        while 512 * (c + 1) ** 3 <= target:
            c += 1
        while c > 0 and 512 * c ** 3 > target:
            c -= 1
        return c
    return math.floor((r / lg) ** (2 / 3) / 8)


def gen_cc_instance(r: int, k: int) -> InterpolationInstance:
    """No r-vertex graph both is (k-1)-colorable and has a k-clique.

    x variables assign one of k-1 colors per vertex, y variables pick
    clique vertices, z variables encode the edges (lexicographic pair
    order).  n1 = r(k-1), n2 = r, n3 = r(r-1)/2.
    """
    if r < 2 or k < 2 or k > r:
        raise InstanceError(f"need 2 <= k <= r, got r={r} k={k}")
    pairs = pair_index(r)
    n1 = r * (k - 1)
    n3 = len(pairs)

    def xvar(i, color):
        return i * (k - 1) + color

    a_block, c_block, a_rhs = [], [], []
    for pi, (i, j) in enumerate(pairs):
        for color in range(k - 1):
            arow = [0] * n1
            arow[xvar(i, color)] = 1
            arow[xvar(j, color)] = 1
            crow = [0] * n3
            crow[pi] = 1
            a_block.append(arow)
            c_block.append(crow)
            a_rhs.append(2)
    for i in range(r):
        arow = [0] * n1
        for color in range(k - 1):
            arow[xvar(i, color)] = -1
        a_block.append(arow)
        c_block.append([0] * n3)
        a_rhs.append(-1)

    b_block, d_block, b_rhs = [], [], []
    for pi, (i, j) in enumerate(pairs):
        brow = [0] * r
        brow[i] = 1
        brow[j] = 1
        drow = [0] * n3
        drow[pi] = -1
        b_block.append(brow)
        d_block.append(drow)
        b_rhs.append(1)
    b_block.append([-1] * r)
    d_block.append([0] * n3)
    b_rhs.append(-k)

    return InterpolationInstance(
        n1, r, n3, a_block, c_block, a_rhs, b_block, d_block, b_rhs,
        meta={"family": "clique-coloring", "r": r, "k": k},
    )


def gen_z_witness(inst: InterpolationInstance, side: str, seed: int):
    """A shared-variable vector with a verified witness for one factor.

    side "Z1": a (k-1)-colorable graph plus its coloring; side "Z2": a
    graph containing a k-clique plus the clique indicator.  The witness
    is checked against the factor system before returning.
    """
    meta = inst.meta
    if meta.get("family") != "clique-coloring":
        raise InstanceError("witness generation is defined for the clique-coloring family")
    r, k = meta["r"], meta["k"]
    pairs = pair_index(r)
    rng = random.Random(seed)
    if side == "Z1":
        colors = [rng.randrange(k - 1) for _ in range(r)]
        z = [
            1 if colors[i] != colors[j] and rng.random() < 0.5 else 0
            for (i, j) in pairs
        ]
        x = [0] * inst.n1
        for i in range(r):
            x[i * (k - 1) + colors[i]] = 1
        system = inst.factor_system(ROW_P, z)
        if not system.satisfies(x):
            raise AssertionError("coloring witness fails its own factor system")
        return tuple(z), tuple(x)
    if side == "Z2":
        clique = set(rng.sample(range(r), k))
        z = [
            1 if (i in clique and j in clique) or rng.random() < 0.5 else 0
            for (i, j) in pairs
        ]
        y = [1 if i in clique else 0 for i in range(r)]
        system = inst.factor_system(ROW_Q, z)
        if not system.satisfies(y):
            raise AssertionError("clique witness fails its own factor system")
        return tuple(z), tuple(y)
    raise InstanceError(f"unknown witness side {side!r}")


# ---------------------------------------------------------------------------
# CNF machinery


@dataclass
class CNF:
    """Clause set over variables 1..n; literals are signed indices."""

    n: int
    clauses: list  # list of frozensets
    draw_log: list | None = None  # raw draws when randomly generated

    def __post_init__(self):
        self.clauses = [frozenset(c) for c in self.clauses]
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.n:
                    raise InstanceError(f"literal {lit} out of range")
                if -lit in clause:
                    raise InstanceError(f"clause {sorted(clause)} contains a variable twice")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def is_kcnf(self, k: int) -> bool:
        return all(len(c) == k for c in self.clauses)

    def satisfied_by(self, assignment) -> bool:
        """assignment maps variable index to 0/1."""
        for clause in self.clauses:
            if not any(
                (lit > 0 and assignment[abs(lit)]) or (lit < 0 and not assignment[abs(lit)])
                for lit in clause
            ):
                return False
        return True

    def satisfiable(self, variables=None) -> bool:
        """Exhaustive satisfiability over the given variables (default all)."""
        variables = sorted(variables) if variables is not None else list(range(1, self.n + 1))
        if any(not c for c in self.clauses):
            return False
        for bits in itertools.product((0, 1), repeat=len(variables)):
            assignment = dict(zip(variables, bits))
            if self.satisfied_by(assignment):
                return True
        return False


def gen_random_kcnf(n: int, k: int, m: int, seed: int) -> CNF:
    """m independent uniform k-clause draws, repetition allowed.

    The raw draw sequence is kept in draw_log; the clause set is
    deduplicated preserving first occurrence.
    """
    if k > n:
        raise InstanceError(f"clause width {k} exceeds variable count {n}")
    rng = random.Random(seed)
    draws = []
    for _ in range(m):
        variables = sorted(rng.sample(range(1, n + 1), k))
        clause = frozenset(v if rng.random() < 0.5 else -v for v in variables)
        draws.append(clause)
    deduped = list(dict.fromkeys(draws))
    return CNF(n, deduped, draw_log=draws)


def unsat_clause_count(n: int, k: int, epsilon: float = 0.1) -> int:
    """Draw count making random k-CNFs unsatisfiable with high probability."""
    return math.ceil((math.log(2) + epsilon) * (2 ** k) * n)


def cnf_to_ilp(cnf: CNF) -> LinSystem:
    """One row per clause (at least one literal satisfied) plus 0/1 bounds."""
    rows, rhs, labels = [], [], []
    for clause in cnf.clauses:
        row = [0] * cnf.n
        negatives = 0
        for lit in clause:
            if lit > 0:
                row[lit - 1] = -1
            else:
                row[-lit - 1] = 1
                negatives += 1
        rows.append(tuple(row))
        rhs.append(negatives - 1)
        labels.append(RowLabel(ROW_P))
    br, bh, bl = _bound_rows(cnf.n, 0, cnf.n, ROW_P)
    return LinSystem(cnf.n, rows + br, rhs + bh, labels + bl)


@dataclass
class SplitCNF:
    """A clause set split along a variable partition with selectors.

    Clause i becomes two clauses: its first-side literals plus the
    negated selector, and its second-side literals plus the selector.
    Fixing the selectors to a subset A leaves exactly the first-side
    parts of A and the second-side parts of the complement active.
    """

    base: CNF
    x0: tuple
    x1: tuple
    d0: list  # clauses over X0, selector implied
    d1: list

    @property
    def selector_count(self) -> int:
        return self.base.m

    def combined_cnf(self) -> CNF:
        """Both halves as one CNF; selector i is variable n + i + 1."""
        n = self.base.n
        clauses = []
        for i, clause in enumerate(self.d0):
            clauses.append(frozenset(clause) | {-(n + i + 1)})
        for i, clause in enumerate(self.d1):
            clauses.append(frozenset(clause) | {n + i + 1})
        return CNF(n + self.base.m, clauses)

    def restricted(self, selectors) -> tuple:
        """(active first-side clauses, active second-side clauses) for a
        0/1 selector vector."""
        active0 = [c for i, c in enumerate(self.d0) if selectors[i] == 1]
        active1 = [c for i, c in enumerate(self.d1) if selectors[i] == 0]
        return active0, active1


def split_cnf(cnf: CNF, x0, x1) -> SplitCNF:
    x0 = tuple(sorted(x0))
    x1 = tuple(sorted(x1))
    if sorted(x0 + x1) != list(range(1, cnf.n + 1)) or set(x0) & set(x1):
        raise InstanceError("the two variable groups must partition the variables")
    side0 = set(x0)
    d0, d1 = [], []
    for clause in cnf.clauses:
        d0.append(frozenset(l for l in clause if abs(l) in side0))
        d1.append(frozenset(l for l in clause if abs(l) not in side0))
    return SplitCNF(cnf, x0, x1, d0, d1)


def split_instance(split: SplitCNF) -> InterpolationInstance:
    """The split clause set as a coupled block system with the selectors
    as shared variables."""
    base = split.base
    m = base.m
    pos0 = {v: i for i, v in enumerate(split.x0)}
    pos1 = {v: i for i, v in enumerate(split.x1)}
    a_block, c_block, a_rhs = [], [], []
    for i, clause in enumerate(split.d0):
        row = [0] * len(split.x0)
        negatives = 0
        for lit in clause:
            if lit > 0:
                row[pos0[lit]] = -1
            else:
                row[pos0[-lit]] = 1
                negatives += 1
        crow = [0] * m
        crow[i] = 1
        a_block.append(row)
        c_block.append(crow)
        a_rhs.append(negatives)
    b_block, d_block, b_rhs = [], [], []
    for i, clause in enumerate(split.d1):
        row = [0] * len(split.x1)
        negatives = 0
        for lit in clause:
            if lit > 0:
                row[pos1[lit]] = -1
            else:
                row[pos1[-lit]] = 1
                negatives += 1
        drow = [0] * m
        drow[i] = -1
        b_block.append(row)
        d_block.append(drow)
        b_rhs.append(negatives - 1)
    return InterpolationInstance(
        len(split.x0), len(split.x1), m,
        a_block, c_block, a_rhs, b_block, d_block, b_rhs,
        meta={"family": "split-cnf"},
    )


def lift_tree_to_split(tree: BBTree, split: SplitCNF) -> BBTree:
    """Re-index a tree over the base variables to the block layout
    (first-side variables, then second-side, then selectors).

    Certificates carry over directly: every clause row of the base
    system is the sum of its two split rows, so putting the clause
    row's weight on both split rows (and keeping bound and branching
    weights) cancels the selector columns and reproduces the base
    combination, right-hand side included.
    """
    base = split.base
    m = base.m
    n1, n2 = len(split.x0), len(split.x1)
    n = n1 + n2 + m
    col = {}
    for i, v in enumerate(split.x0):
        col[v] = i
    for i, v in enumerate(split.x1):
        col[v] = n1 + i
    base_rows = m + 2 * base.n  # clause rows then per-variable bound pairs
    split_rows = 2 * m + 2 * (n1 + n2) + 2 * m
    pos0 = {v: i for i, v in enumerate(split.x0)}
    pos1 = {v: i for i, v in enumerate(split.x1)}

    def bound_target(v: int) -> int:
        if v in pos0:
            return m + 2 * pos0[v]
        return m + 2 * n1 + m + 2 * pos1[v]

    def lift_cert(cert):
        if cert is None:
            return None
        if len(cert) < base_rows:
            raise InstanceError("certificate does not cover the clause system")
        lifted = [0] * split_rows
        for i in range(m):
            lifted[i] = cert[i]
            lifted[m + 2 * n1 + i] = cert[i]
        for v in range(1, base.n + 1):
            target = bound_target(v)
            lifted[target] = cert[m + 2 * (v - 1)]
            lifted[target + 1] = cert[m + 2 * (v - 1) + 1]
        return tuple(lifted) + tuple(cert[base_rows:])

    def rec(node: TreeNode) -> TreeNode:
        if node.is_leaf:
            return leaf(lift_cert(node.cert))
        alpha = [0] * n
        for v, coeff in enumerate(node.disjunction.alpha, start=1):
            if coeff:
                alpha[col[v]] = coeff
        return branch(alpha, node.disjunction.delta, rec(node.left), rec(node.right))

    return BBTree(n, rec(tree.root))


def certificate_from_tree(cnf: CNF, x0, x1, tree: BBTree):
    """Monotone circuit deciding which half of the split is unsatisfiable.

    The tree must refute the clause system itself; it then also refutes
    the split system, and compiling the lifted tree on the split blocks
    yields a circuit F over selector inputs z0..z_{m-1} with F(A) = 1
    forcing the active first-side parts unsatisfiable and F(A) = 0 the
    active second-side parts.
    """
    from .circuits import compile_interpolant

    base_system = cnf_to_ilp(cnf)
    split = split_cnf(cnf, x0, x1)
    inst = split_instance(split)
    if not tree.is_certified():
        tree = certify_tree(tree, base_system)
    elif not validate_tree(tree, base_system):
        raise InstanceError("the tree does not refute the clause system")
    lifted = lift_tree_to_split(tree, split)
    return compile_interpolant(lifted, inst)


def check_certificate(circuit, cnf: CNF, x0, x1, subset) -> bool:
    """Audit one selector subset against exhaustive satisfiability.

    subset is a set of clause indices (0-based).  The circuit's verdict
    commits it to one unsatisfiable half; that half is checked by
    enumerating all assignments of its own variables.
    """
    split = split_cnf(cnf, x0, x1)
    selectors = [1 if i in subset else 0 for i in range(cnf.m)]
    value = circuit.eval({f"z{i}": selectors[i] for i in range(cnf.m)})
    if value not in (0, 1):
        raise InstanceError(f"certificate output {value} is not 0/1")
    active0, active1 = split.restricted(selectors)
    if value == 1:
        covered = CNF(cnf.n, active0)
        return not covered.satisfiable(x0)
    covered = CNF(cnf.n, active1)
    return not covered.satisfiable(x1)


# ---------------------------------------------------------------------------
# fixtures


def cross_polytope_factor() -> LinSystem:
    """The plane diamond with corners at the edge midpoints of the unit
    square, rows scaled to integers, bounds included."""
    rows = [(2, 2), (2, -2), (-2, 2), (-2, -2), (1, 0), (-1, 0), (0, 1), (0, -1)]
    rhs = [3, 1, 1, -1, 1, 0, 1, 0]
    return LinSystem(2, rows, rhs)


def cross_polytope_fixture():
    """The diamond product and its hand-built certified 6-leaf tree.

    The tree splits the first factor's first coordinate at the root,
    finishes the second factor under the left branch and the first
    factor under the right one; every leaf combines one scaled diamond
    facet (weight 1) with its two branching rows (weight 2).
    """
    prod = ProductSystem(cross_polytope_factor(), cross_polytope_factor())

    def cert(cut_index, edge_weights):
        v = [0] * 16
        v[cut_index] = 1
        return tuple(v) + tuple(edge_weights)

    ex1 = (1, 0, 0, 0)
    ex2 = (0, 1, 0, 0)
    ey1 = (0, 0, 1, 0)
    ey2 = (0, 0, 0, 1)
    tree = BBTree(
        4,
        branch(
            ex1, 0,
            branch(
                ey1, 0,
                branch(ey2, 0, leaf(cert(11, (0, 2, 2))), leaf(cert(10, (0, 2, 2)))),
                branch(ey2, 0, leaf(cert(9, (0, 2, 2))), leaf(cert(8, (0, 2, 2)))),
            ),
            branch(ex2, 0, leaf(cert(1, (2, 2))), leaf(cert(0, (2, 2)))),
        ),
    )
    for path in tree.leaf_paths():
        problem = node_problem(tree, path, prod.combined)
        if not check_farkas(problem, tree.node(path).cert):
            raise AssertionError(f"fixture certificate at {path!r} is broken")
    return prod, tree
