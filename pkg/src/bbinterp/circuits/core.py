"""Monotone real circuits as immutable gate lists.

A circuit is a topologically ordered list of gates, each either an
input (fan-in 0, named) or an application of a gate function to two
earlier gates.  Evaluation is an exact rational fold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .gates import Composed, GateFn, NonNegCombine, gatefn_from_json, post_compose, pre_compose


class UnboundVariableError(KeyError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str  # "input" or "apply"
    var: str | None = None
    fn: GateFn | None = None
    preds: tuple | None = None


@dataclass
class Circuit:
    gates: list
    output: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for idx, gate in enumerate(self.gates):
            if gate.kind == "apply":
                a, b = gate.preds
                if a >= idx or b >= idx:
                    raise ValueError("gates must be topologically ordered")
        if not (0 <= self.output < len(self.gates)):
            raise ValueError("output gate out of range")

    def input_names(self):
        return [g.var for g in self.gates if g.kind == "input"]

    def eval(self, inputs) -> Fraction:
        values = [None] * len(self.gates)
        for idx, gate in enumerate(self.gates):
            if gate.kind == "input":
                if gate.var not in inputs:
                    raise UnboundVariableError(gate.var)
                values[idx] = Fraction(inputs[gate.var])
            else:
                a, b = gate.preds
                values[idx] = gate.fn.eval(values[a], values[b])
        return values[self.output]

    def eval_gate(self, gate_id: int, inputs) -> Fraction:
        saved = self.output
        try:
            self.output = gate_id
            return self.eval(inputs)
        finally:
            self.output = saved

    def to_json(self):
        gates = []
        for idx, g in enumerate(self.gates):
            if g.kind == "input":
                gates.append({"id": idx, "kind": "input", "var": g.var})
            else:
                gates.append(
                    {
                        "id": idx,
                        "kind": "apply",
                        "fn": g.fn.to_json(),
                        "preds": list(g.preds),
                    }
                )
        return {"gates": gates, "output": self.output}

    @staticmethod
    def from_json(data) -> "Circuit":
        gates = []
        for entry in data["gates"]:
            if entry["kind"] == "input":
                gates.append(Gate("input", var=entry["var"]))
            else:
                gates.append(
                    Gate("apply", fn=gatefn_from_json(entry["fn"]), preds=tuple(entry["preds"]))
                )
        return Circuit(gates, data["output"])


def eval_circuit(circuit: Circuit, inputs) -> Fraction:
    """Exact value of the circuit on a name -> rational assignment."""
    return circuit.eval(inputs)


def circuit_size(circuit: Circuit) -> int:
    """Number of gates, input gates included."""
    return len(circuit.gates)


class CircuitBuilder:
    """Mutable assembly area; inputs are interned by name."""

    def __init__(self):
        self.gates = []
        self._inputs = {}

    def input(self, name: str) -> int:
        if name in self._inputs:
            return self._inputs[name]
        self.gates.append(Gate("input", var=name))
        self._inputs[name] = len(self.gates) - 1
        return self._inputs[name]

    def apply(self, fn: GateFn, a: int, b: int) -> int:
        self.gates.append(Gate("apply", fn=fn, preds=(a, b)))
        return len(self.gates) - 1

    def post_compose(self, gate_id: int, unary) -> int:
        """Post-compose onto an apply gate in place; input gates get a
        fresh pass-through gate instead."""
        gate = self.gates[gate_id]
        if gate.kind == "input":
            return self.apply(
                Composed(NonNegCombine(Fraction(1), Fraction(0)), post=(unary,)),
                gate_id,
                gate_id,
            )
        self.gates[gate_id] = Gate("apply", fn=post_compose(gate.fn, unary), preds=gate.preds)
        return gate_id

    def copy_circuit(self, circuit: Circuit, substitutions=None) -> dict:
        """Copy a circuit's gates in, unifying inputs by name.

        substitutions maps an input name to (gate_id, unary_chain):
        reads of that input are rewired to the gate, with the chain
        folded into the reading slot, first element applied to the raw
        gate value first.  Returns the old-id -> new-id mapping;
        substituted inputs are not copied and map to -1.
        """
        substitutions = substitutions or {}
        mapping = {}
        for idx, gate in enumerate(circuit.gates):
            if gate.kind == "input":
                if gate.var in substitutions:
                    mapping[idx] = -1
                else:
                    mapping[idx] = self.input(gate.var)
                continue
            a, b = gate.preds
            fn = gate.fn
            new_a, new_b = mapping[a], mapping[b]
            for arg, pred in ((0, a), (1, b)):
                src = circuit.gates[pred]
                if src.kind == "input" and src.var in substitutions:
                    target, chain = substitutions[src.var]
                    for unary in reversed(chain):
                        fn = pre_compose(fn, arg, unary)
                    if arg == 0:
                        new_a = target
                    else:
                        new_b = target
            mapping[idx] = self.apply(fn, new_a, new_b)
        return mapping

    def build(self, output: int, meta=None) -> Circuit:
        return Circuit(list(self.gates), output, meta or {})


def check_monotone(fn: GateFn, grid=None, rng=None, samples: int = 60) -> bool:
    """Non-decreasing in each argument over an admissible grid.

    With an explicit grid, the same values are used for both arguments
    (clipped to each argument's domain).  Otherwise a randomized
    admissible grid is drawn per argument, always including the
    template's own critical values.
    """
    rng = rng or random.Random(0)
    domains = fn.arg_domains()
    criticals = fn.critical_args()
    grids = []
    for which in (0, 1):
        lo, hi = domains[which]
        if grid is not None:
            values = [Fraction(v) for v in grid if lo < Fraction(v) < hi]
        else:
            values = [fn.sample_arg(which, rng) for _ in range(samples)]
        values.extend(c for c in criticals[which] if lo < c < hi)
        grids.append(sorted(set(values)))
    if not grids[0] or not grids[1]:
        return True
    for v in grids[1]:
        prev = None
        for u in grids[0]:
            cur = fn.eval(u, v)
            if prev is not None and cur < prev:
                return False
            prev = cur
    for u in grids[0]:
        prev = None
        for v in grids[1]:
            cur = fn.eval(u, v)
            if prev is not None and cur < prev:
                return False
            prev = cur
    return True


def circuit_gate_fns(circuit: Circuit):
    """All gate functions applied anywhere in the circuit."""
    return [g.fn for g in circuit.gates if g.kind == "apply"]
