"""Experiment orchestration: generate, solve, compile, verify, report.

Each grid point is an isolated pipeline; failures are recorded in the
report rather than aborting the run.  The CSV is deterministic given
the seeds except for the wall-time column; the SVG is a static size
plot of tree size, circuit size and the compile-size ceiling against
instance size.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .bbtree import solve_bb, tree_size, VARIABLE_BRANCHING
from .circuits import circuit_size, compile_interpolant, interpolant_size_bound
from .instances import (
    certificate_from_tree,
    check_certificate,
    cnf_to_ilp,
    gen_cc_instance,
    gen_random_kcnf,
    gen_z_witness,
    unsat_clause_count,
)
from .linsys import integer_feasible_oracle

CSV_HEADER = ["instance_id", "n", "n3", "tree_size", "circuit_size", "thm3_bound", "separated", "ms"]


class ExperimentSpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    family: str  # "cc" or "cnf"
    grid: list
    seeds: list = field(default_factory=lambda: [0])
    k: int = 2
    strategy: str = VARIABLE_BRANCHING
    out_dir: str = "report"
    witnesses: int = 5
    subset_samples: int = 20
    cap_depth: int | None = None
    cap_enum: int = 1 << 21

    def __post_init__(self):
        if not self.grid:
            raise ExperimentSpecError("empty parameter grid")
        if self.family not in ("cc", "cnf"):
            raise ExperimentSpecError(f"unknown family {self.family!r}")
        if self.cap_enum <= 0 or self.witnesses <= 0 or self.subset_samples <= 0:
            raise ExperimentSpecError("caps and sample counts must be positive")


@dataclass
class ReportRow:
    instance_id: str
    n: int
    n3: int
    tree_size: int
    circuit_size: int
    thm3_bound: float
    separated: bool
    ms: int
    error: str | None = None

    def csv_values(self):
        return [
            self.instance_id,
            str(self.n),
            str(self.n3),
            str(self.tree_size),
            str(self.circuit_size),
            f"{self.thm3_bound:.6e}",
            "true" if self.separated else "false",
            str(self.ms),
        ]


def _run_cc_point(spec: ExperimentSpec, r: int, seed: int) -> ReportRow:
    instance_id = f"cc_r{r}_k{spec.k}_s{seed}"
    start = time.monotonic()
    inst = gen_cc_instance(r, spec.k)
    full = inst.full_system()
    tree = solve_bb(full, strategy=spec.strategy, depth_cap=spec.cap_depth)
    circuit = compile_interpolant(tree, inst)
    separated = True
    for i in range(spec.witnesses):
        for side, expect in (("Z1", 0), ("Z2", 1)):
            z, _ = gen_z_witness(inst, side, seed * 10_007 + 31 * i + (0 if side == "Z1" else 1))
            value = circuit.eval({f"z{j}": z[j] for j in range(inst.n3)})
            if value != expect:
                separated = False
    ms = int((time.monotonic() - start) * 1000)
    leaves = tree_size(tree)
    return ReportRow(
        instance_id, full.n, inst.n3, leaves, circuit_size(circuit),
        interpolant_size_bound(full.n, leaves), separated, ms,
    )


def _run_cnf_point(spec: ExperimentSpec, n: int, seed: int) -> ReportRow:
    k = 3
    m = unsat_clause_count(n, k)
    instance_id = f"cnf_n{n}_k{k}_m{m}_s{seed}"
    start = time.monotonic()
    cnf = gen_random_kcnf(n, k, m, seed)
    system = cnf_to_ilp(cnf)
    if integer_feasible_oracle(system, [(0, 1)] * n, cap=spec.cap_enum) is not None:
        ms = int((time.monotonic() - start) * 1000)
        return ReportRow(instance_id, n, cnf.m, 0, 0, 0.0, False, ms, error="satisfiable draw")
    half = n // 2
    x0 = tuple(range(1, half + 1))
    x1 = tuple(range(half + 1, n + 1))
    tree = solve_bb(system, strategy=spec.strategy, depth_cap=spec.cap_depth)
    circuit = certificate_from_tree(cnf, x0, x1, tree)
    rng = random.Random(seed)
    separated = True
    for _ in range(spec.subset_samples):
        subset = {i for i in range(cnf.m) if rng.random() < 0.5}
        if not check_certificate(circuit, cnf, x0, x1, subset):
            separated = False
    ms = int((time.monotonic() - start) * 1000)
    leaves = tree_size(tree)
    total_n = n + 2 * cnf.m  # split system variable count
    return ReportRow(
        instance_id, n, cnf.m, leaves, circuit_size(circuit),
        interpolant_size_bound(total_n, leaves), separated, ms,
    )


def run_experiment(spec: ExperimentSpec):
    rows = []
    for point in spec.grid:
        for seed in spec.seeds:
            try:
                if spec.family == "cc":
                    rows.append(_run_cc_point(spec, point, seed))
                else:
                    rows.append(_run_cnf_point(spec, point, seed))
            except Exception as exc:  # isolated per point
                rows.append(
                    ReportRow(
                        f"{spec.family}_{point}_s{seed}", 0, 0, 0, 0, 0.0, False, 0,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return rows


def write_csv(rows, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_values())


def write_size_plot(rows, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    good = [r for r in rows if r.error is None]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if good:
        xs = [r.n for r in good]
        ax.scatter(xs, [max(r.tree_size, 1) for r in good], marker="o", label="tree size")
        ax.scatter(xs, [max(r.circuit_size, 1) for r in good], marker="s", label="circuit size")
        ax.scatter(xs, [max(r.thm3_bound, 1) for r in good], marker="^", label="size ceiling")
        ax.set_yscale("log")
    ax.set_xlabel("instance variables")
    ax.set_ylabel("size (log scale)")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("proof and circuit sizes")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def run_and_write(spec: ExperimentSpec):
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_experiment(spec)
    write_csv(rows, out / "report.csv")
    write_size_plot(rows, out / "sizes.svg")
    return rows
