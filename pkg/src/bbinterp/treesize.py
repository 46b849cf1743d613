"""Bounded exhaustive search for the smallest branch-and-bound tree.

The search space is capped by tree depth and by the max-norm of the
branching directions; right-hand sides range over exactly the integer
values where both halfspaces can still meet the current region.  The
engine keeps an exact support set per region, all vertices plus some
harmless interior points (every searched system is box-bounded), so
emptiness tests and linear extremes are dot-product sweeps instead of
LP calls.

Two monotonicity facts cut the search down: a tree valid for a region
is valid for every subregion, so "a tree with <= s leaves and depth
<= d exists" is antitone in the region; and for a fixed branching
direction the left child grows with the right-hand side while the
right child shrinks, so feasible right-hand sides for each side form
contiguous ranges found by binary search.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .linsys import LinSystem, integer_feasible_oracle


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, budget, proven_lower_bound, best_so_far):
        super().__init__(
            f"search budget {budget} exhausted; "
            f"no tree with <= {proven_lower_bound} leaves, best found: {best_so_far}"
        )
        self.budget = budget
        self.proven_lower_bound = proven_lower_bound
        self.best_so_far = best_so_far


def _solve_square(rows, rhs, n):
    """Solve an n x n rational system, or None when singular."""
    mat = [[Fraction(c) for c in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = 1 / mat[col][col]
        mat[col] = [x * inv for x in mat[col]]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    return tuple(mat[r][n] for r in range(n))


def _feasible(point, rows, rhs):
    for row, beta in zip(rows, rhs):
        if sum(c * p for c, p in zip(row, point)) > beta:
            return False
    return True


def enumerate_vertices(rows, rhs, n):
    """All vertices of {x : rows . x <= rhs}; the region must be bounded."""
    seen = set()
    out = []
    for subset in itertools.combinations(range(len(rows)), n):
        point = _solve_square([rows[i] for i in subset], [rhs[i] for i in subset], n)
        if point is None or point in seen:
            continue
        if _feasible(point, rows, rhs):
            seen.add(point)
            out.append(point)
    return out


def _cut_support(parent_points, cut_row, cut_rhs):
    """Support points of the region after one more halfspace.

    parent_points must contain every vertex of the parent region and
    lie inside it.  The result keeps the satisfying points and adds the
    crossing of every satisfying/violating segment with the cutting
    hyperplane.  Every vertex of the cut region is either a kept parent
    vertex or sits on an edge of the parent crossing the hyperplane, so
    the invariant is preserved; extra points are interior and harmless
    for emptiness tests and linear extremes.
    """
    values = [
        sum(c * p for c, p in zip(cut_row, point)) for point in parent_points
    ]
    kept = [p for p, v in zip(parent_points, values) if v <= cut_rhs]
    seen = set(kept)
    inside = [(p, v) for p, v in zip(parent_points, values) if v <= cut_rhs]
    outside = [(p, v) for p, v in zip(parent_points, values) if v > cut_rhs]
    for u, vu in inside:
        for w, vw in outside:
            t = (cut_rhs - vu) / (vw - vu)
            point = tuple(a + t * (b - a) for a, b in zip(u, w))
            if point not in seen:
                seen.add(point)
                kept.append(point)
    return kept


def candidate_directions(n, coeff_cap):
    """Nonzero integer directions with entries in [-cap, cap], up to sign.

    Mirrored directions give mirrored trees, so only one representative
    per sign class is kept (first nonzero entry positive).  Unit
    directions come first so witness trees are found early.
    """
    out = []
    for alpha in itertools.product(range(-coeff_cap, coeff_cap + 1), repeat=n):
        first = next((a for a in alpha if a != 0), 0)
        if first <= 0:
            continue
        out.append(alpha)
    units = [a for a in out if sum(x != 0 for x in a) == 1 and max(abs(x) for x in a) == 1]
    rest = [a for a in out if a not in units]
    return units + rest


class _Search:
    def __init__(self, sys: LinSystem, coeff_cap, budget):
        self.n = sys.n
        self.base_rows = [tuple(r) for r in sys.rows]
        self.base_rhs = list(sys.rhs)
        self.alphas = candidate_directions(sys.n, coeff_cap)
        self.budget = budget
        self.used = 0
        self.vertex_cache = {}
        self.table_cache = {}
        self.exists_cache = {}

    def _charge(self, amount=1):
        self.used += amount
        if self.used > self.budget:
            raise _BudgetSignal

    def vertices(self, cuts):
        key = tuple(sorted(cuts))
        cached = self.vertex_cache.get(key)
        if cached is not None:
            return cached
        if not cuts:
            self._charge(len(self.base_rows) ** 2)
            verts = enumerate_vertices(self.base_rows, self.base_rhs, self.n)
        else:
            last = key[-1]
            parent = self.vertices(key[:-1])
            if not parent:
                verts = []
            else:
                self._charge(len(parent))
                verts = _cut_support(parent, last[0], last[1])
        self.vertex_cache[key] = verts
        return verts

    def table(self, cuts):
        """Per-direction integer extremes over the region's support set.

        Returns (den, entries) where entries[i] = (mn_num, mx_num) so
        that the exact extremes of alphas[i] are mn_num/den, mx_num/den.
        """
        key = tuple(sorted(cuts))
        cached = self.table_cache.get(key)
        if cached is not None:
            return cached
        points = self.vertices(key)
        den = math.lcm(*(c.denominator for p in points for c in p))
        cols = [[int(p[j] * den) for p in points] for j in range(self.n)]
        zero = [0] * len(points)
        entries = []
        self._charge(len(self.alphas) * max(1, len(points)) // 4)
        for alpha in self.alphas:
            vals = zero
            for j, a in enumerate(alpha):
                if a:
                    col = cols[j]
                    vals = [v + a * c for v, c in zip(vals, col)]
            entries.append((min(vals), max(vals)))
        result = (den, entries)
        self.table_cache[key] = result
        return result

    def exists(self, cuts, depth, size):
        """A valid tree with <= size leaves and depth <= depth exists."""
        key = (tuple(sorted(cuts)), depth, size)
        cached = self.exists_cache.get(key)
        if cached is not None:
            return cached
        self._charge()
        if not self.vertices(cuts):
            result = True
        elif depth == 0 or size < 2:
            result = False
        else:
            result = self._exists_branch(cuts, depth, size)
        self.exists_cache[key] = result
        return result

    def _exists_branch(self, cuts, depth, size):
        den, entries = self.table(cuts)
        for alpha, (mn, mx) in zip(self.alphas, entries):
            # All in units of delta: largest delta emptying the left
            # side, smallest emptying the right side, and the ceiling
            # of the maximum (left cuts at or above it are vacuous).
            lo = -((-mn) // den) - 1
            rmin = mx // den
            hi = -((-mx) // den)
            for s_left in range(1, size):
                s_right = size - s_left
                if s_left == 1:
                    delta = lo
                else:
                    delta = self._max_true(cuts, alpha, mn, mx, den, lo, hi, depth - 1, s_left)
                    if delta is None:
                        continue
                if s_right == 1:
                    if delta >= rmin:
                        return True
                    continue
                if (delta + 1) * den <= mn:
                    # Right cut keeps the whole region.
                    if self.exists(cuts, depth - 1, s_right):
                        return True
                    continue
                right_cut = (tuple(-a for a in alpha), -delta - 1)
                if self.exists(cuts + (right_cut,), depth - 1, s_right):
                    return True
        return False

    def _max_true(self, cuts, alpha, mn, mx, den, lo, hi, depth, size):
        """Largest delta in [lo, hi] whose left child still has a tree."""

        def pred(delta):
            if delta <= lo:
                return True
            if delta * den >= mx:
                # Left cut keeps the whole region.
                return self.exists(cuts, depth, size)
            return self.exists(cuts + ((alpha, delta),), depth, size)

        if not pred(lo):
            return None
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if pred(mid):
                lo = mid
            else:
                hi = mid - 1
        return lo


class _BudgetSignal(Exception):
    pass


def min_tree_size_bounded(
    sys: LinSystem,
    depth_cap: int,
    coeff_cap: int,
    budget: int = 20_000_000,
):
    """Smallest leaf count of any valid tree within the caps.

    Returns math.inf when the system is integer-feasible (no valid tree
    exists at all) and also when the capped search space contains no
    tree.  Raises SearchBudgetExceeded with the proven lower bound when
    the work cap runs out.
    """
    bounds = sys.unit_bounds()
    if any(b is None for b in bounds):
        raise ValueError("min_tree_size_bounded needs finite unit-row bounds")
    box = [(int(lo), int(hi)) for lo, hi in bounds]
    if integer_feasible_oracle(sys, box) is not None:
        return math.inf

    search = _Search(sys, coeff_cap, budget)
    max_size = 2 ** depth_cap
    proven = 0
    try:
        for size in range(1, max_size + 1):
            if search.exists((), depth_cap, size):
                return size
            proven = size
    except _BudgetSignal:
        raise SearchBudgetExceeded(budget, proven, None) from None
    return math.inf
