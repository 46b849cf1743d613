"""Exact rational systems of linear inequalities and LP feasibility.

Everything here works over `fractions.Fraction`; there is no floating
point anywhere.  A system is always of the form A x <= b with integral
A and b, and infeasibility is witnessed by a nonnegative integral
multiplier vector f with f^T A = 0 and f^T b < 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm


class DimensionError(ValueError):
    """Shapes of a system, certificate or point do not line up."""


class EnumerationCapExceeded(RuntimeError):
    """An exhaustive integer enumeration would exceed the configured cap."""


ROW_P = "P"
ROW_Q = "Q"
ROW_Z = "Z"


@dataclass(frozen=True)
class RowLabel:
    """Origin tag of a row: a factor block, the shared-variable block,
    or a branching edge."""

    kind: str  # "P", "Q", "Z" or "branch"
    node: str | None = None
    side: str | None = None  # "le" or "ge" for branch rows

    def __post_init__(self):
        if self.kind == "branch":
            if self.node is None or self.side not in ("le", "ge"):
                raise ValueError("branch labels need a node id and a side")
        elif self.kind not in (ROW_P, ROW_Q, ROW_Z):
            raise ValueError(f"unknown row label kind {self.kind!r}")

    def is_branch(self) -> bool:
        return self.kind == "branch"

    def __str__(self):
        if self.kind == "branch":
            return f"branch:{self.node}:{self.side}"
        return self.kind

    @staticmethod
    def parse(text: str) -> "RowLabel":
        if text in (ROW_P, ROW_Q, ROW_Z):
            return RowLabel(text)
        parts = text.split(":")
        if len(parts) == 3 and parts[0] == "branch":
            return RowLabel("branch", parts[1], parts[2])
        raise ValueError(f"cannot parse row label {text!r}")


class LinSystem:
    """An integral inequality system A x <= b with per-row origin labels."""

    __slots__ = ("n", "rows", "rhs", "labels")

    def __init__(self, n, rows, rhs, labels=None):
        rows = [tuple(int(c) for c in row) for row in rows]
        rhs = [int(v) for v in rhs]
        if len(rows) != len(rhs):
            raise DimensionError(f"{len(rows)} rows but {len(rhs)} right-hand sides")
        for row in rows:
            if len(row) != n:
                raise DimensionError(f"row {row} does not have {n} entries")
        if labels is None:
            labels = [RowLabel(ROW_P)] * len(rows)
        if len(labels) != len(rows):
            raise DimensionError("one label per row required")
        self.n = n
        self.rows = rows
        self.rhs = rhs
        self.labels = list(labels)

    @property
    def m(self) -> int:
        return len(self.rows)

    def with_rows(self, rows, rhs, labels) -> "LinSystem":
        """New system with extra rows appended."""
        return LinSystem(
            self.n,
            list(self.rows) + list(rows),
            list(self.rhs) + list(rhs),
            list(self.labels) + list(labels),
        )

    def satisfies(self, point) -> bool:
        if len(point) != self.n:
            raise DimensionError(f"point has {len(point)} coordinates, system has {self.n}")
        for row, beta in zip(self.rows, self.rhs):
            if sum(Fraction(c) * Fraction(p) for c, p in zip(row, point)) > beta:
                return False
        return True

    def violated_rows(self, point):
        out = []
        for i, (row, beta) in enumerate(zip(self.rows, self.rhs)):
            if sum(Fraction(c) * Fraction(p) for c, p in zip(row, point)) > beta:
                out.append(i)
        return out

    def unit_bounds(self):
        """Per-variable finite bounds read off unit rows, or None where absent.

        Returns a list of [lo, hi] pairs (integers) built from rows of the
        form x_i <= u and -x_i <= -l.  Tighter rows win.
        """
        lo = [None] * self.n
        hi = [None] * self.n
        for row, beta in zip(self.rows, self.rhs):
            support = [j for j, c in enumerate(row) if c != 0]
            if len(support) != 1:
                continue
            j = support[0]
            c = row[j]
            bound = Fraction(beta, c)
            if c > 0:
                if hi[j] is None or bound < hi[j]:
                    hi[j] = bound
            else:
                if lo[j] is None or bound > lo[j]:
                    lo[j] = bound
        return [
            None if (l is None or h is None) else (l, h)
            for l, h in zip(lo, hi)
        ]

    def __eq__(self, other):
        return (
            isinstance(other, LinSystem)
            and self.n == other.n
            and self.rows == other.rows
            and self.rhs == other.rhs
            and self.labels == other.labels
        )

    def __repr__(self):
        return f"LinSystem(n={self.n}, m={self.m})"


def product_rows(p: LinSystem, q: LinSystem):
    """Rows of the block-diagonal system for a pair of factors."""
    rows = []
    rhs = []
    labels = []
    zeros_q = (0,) * q.n
    zeros_p = (0,) * p.n
    for row, beta in zip(p.rows, p.rhs):
        rows.append(tuple(row) + zeros_q)
        rhs.append(beta)
        labels.append(RowLabel(ROW_P))
    for row, beta in zip(q.rows, q.rhs):
        rows.append(zeros_p + tuple(row))
        rhs.append(beta)
        labels.append(RowLabel(ROW_Q))
    return rows, rhs, labels


def check_farkas(sys: LinSystem, cert) -> bool:
    """True iff cert is a nonnegative combination proving 0 <= negative."""
    if len(cert) != sys.m:
        raise DimensionError(f"certificate has {len(cert)} entries, system has {sys.m} rows")
    if any(f < 0 for f in cert):
        return False
    for j in range(sys.n):
        if sum(f * row[j] for f, row in zip(cert, sys.rows)) != 0:
            return False
    return sum(f * beta for f, beta in zip(cert, sys.rhs)) < 0


@dataclass(frozen=True)
class Feasible:
    point: tuple


@dataclass(frozen=True)
class Infeasible:
    cert: tuple


def _integralize(values):
    """Scale nonnegative rationals to integers and strip common factors."""
    denom = lcm(*(v.denominator for v in values)) if values else 1
    scaled = [int(v * denom) for v in values]
    g = 0
    for v in scaled:
        g = gcd(g, v)
    if g > 1:
        scaled = [v // g for v in scaled]
    return scaled


def lp_solve(sys: LinSystem):
    """Exact feasibility of A x <= b over the rationals.

    Returns Feasible(point) with a satisfying rational point, or
    Infeasible(cert) with an integral certificate accepted by
    check_farkas.  Uses a phase-one simplex on the standard form
    A(u - v) + s = b with Bland's rule, so it terminates on every
    input and is fully deterministic.
    """
    n, m = sys.n, sys.m
    if m == 0:
        return Feasible((Fraction(0),) * n)

    # Column layout: u_0..u_{n-1}, v_0..v_{n-1}, s_0..s_{m-1}, then one
    # artificial per row whose right-hand side is negative.
    sigma = [1 if sys.rhs[i] >= 0 else -1 for i in range(m)]
    art_rows = [i for i in range(m) if sigma[i] < 0]
    art_col = {}
    num_struct = 2 * n + m
    for k, i in enumerate(art_rows):
        art_col[i] = num_struct + k
    total = num_struct + len(art_rows)

    tableau = []
    for i in range(m):
        row = [Fraction(0)] * (total + 1)
        for j in range(n):
            a = Fraction(sigma[i] * sys.rows[i][j])
            row[j] = a
            row[n + j] = -a
        row[2 * n + i] = Fraction(sigma[i])
        if i in art_col:
            row[art_col[i]] = Fraction(1)
        row[total] = Fraction(sigma[i] * sys.rhs[i])
        tableau.append(row)

    basis = []
    for i in range(m):
        basis.append(art_col[i] if i in art_col else 2 * n + i)

    # Phase-one objective: minimize the sum of artificials.  cost[j] is
    # the reduced cost row, kept in sync through pivots; artificial
    # columns start basic, so their reduced cost must start at zero.
    cost = [Fraction(0)] * (total + 1)
    for i in art_rows:
        cost[art_col[i]] += 1
        for j in range(total + 1):
            cost[j] -= tableau[i][j]

    def pivot(row_idx, col_idx):
        piv = tableau[row_idx][col_idx]
        inv = 1 / piv
        tableau[row_idx] = [x * inv for x in tableau[row_idx]]
        prow = tableau[row_idx]
        for r in range(m):
            if r != row_idx and tableau[r][col_idx] != 0:
                factor = tableau[r][col_idx]
                tableau[r] = [x - factor * y for x, y in zip(tableau[r], prow)]
        if cost[col_idx] != 0:
            factor = cost[col_idx]
            for j in range(total + 1):
                cost[j] -= factor * prow[j]
        basis[row_idx] = col_idx

    while True:
        entering = None
        for j in range(total):
            if cost[j] < 0:
                entering = j
                break
        if entering is None:
            break
        leaving = None
        best = None
        for r in range(m):
            coef = tableau[r][entering]
            if coef > 0:
                ratio = tableau[r][total] / coef
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leaving]):
                    best = ratio
                    leaving = r
        if leaving is None:
            # Unbounded phase-one objective cannot happen (it is bounded
            # below by zero); guard against an arithmetic slip.
            raise AssertionError("phase-one simplex claims unboundedness")
        pivot(leaving, entering)

    objective = -cost[total]
    if objective > 0:
        # Dual multipliers from the reduced costs of slack/artificial
        # columns give a Farkas certificate after sign bookkeeping.
        y = [Fraction(0)] * m
        for i in range(m):
            if i in art_col:
                y[i] = 1 - cost[art_col[i]]
            else:
                y[i] = -cost[2 * n + i] * sigma[i]
        f = [-sigma[i] * y[i] for i in range(m)]
        cert = tuple(_integralize(f))
        return Infeasible(cert)

    point = [Fraction(0)] * n
    for r, col in enumerate(basis):
        val = tableau[r][total]
        if col < n:
            point[col] += val
        elif col < 2 * n:
            point[col - n] -= val
    return Feasible(tuple(point))


def integer_feasible_oracle(sys: LinSystem, box, cap: int = 1 << 21):
    """Exhaustively search the integer box for a point of the system.

    box is a sequence of (lo, hi) integer pairs, one per variable.  The
    first satisfying point in lexicographic order is returned, or None
    when the box holds no solution.  Raises EnumerationCapExceeded when
    the box volume is beyond cap.
    """
    if len(box) != sys.n:
        raise DimensionError(f"box has {len(box)} intervals, system has {sys.n} variables")
    volume = 1
    for lo, hi in box:
        if lo > hi:
            return None
        volume *= hi - lo + 1
        if volume > cap:
            raise EnumerationCapExceeded(f"box volume exceeds cap {cap}")
    ranges = [range(int(lo), int(hi) + 1) for lo, hi in box]
    for point in itertools.product(*ranges):
        ok = True
        for row, beta in zip(sys.rows, sys.rhs):
            if sum(c * p for c, p in zip(row, point)) > beta:
                ok = False
                break
        if ok:
            return point
    return None
