"""Binary search over one input of a 0/1 circuit, inside the circuit.

Given a monotone 0/1 circuit c and a top value, the transform builds a
circuit computing the largest offset lambda in {0, .., 2^q - 1} with
c(x, top - lambda) = 1, using q chained copies of c.  Each copy probes
the next bit; its gates carry the accumulated offset in the high-order
bits (multiples of the current step) and the squashed 0/1 probe answer
in the fractional part, which keeps every rewritten gate function
non-decreasing.  The probe bookkeeping gates are folded into their
consumers as argument pre-compositions, so the reported size is the
post-elimination count; the raw count (with explicit probe gates) is
recorded in the result metadata.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import Circuit, CircuitBuilder
from .gates import (
    Composed,
    Const,
    NonNegCombine,
    RoundPhase,
    ScaleAdd,
    Squash,
    StaircaseSearch,
    StepThreshold,
    Unsquash,
    phi,
)


def _searched_input(circuit: Circuit, var):
    names = circuit.input_names()
    if var is None:
        if not names:
            raise ValueError("circuit has no inputs to search over")
        var = names[-1]
    if var not in names:
        raise ValueError(f"{var!r} is not an input of the circuit")
    others = [n for n in names if n != var]
    if not others:
        raise ValueError("need at least one untouched input to anchor constants")
    return var, others


def _dependents(circuit: Circuit, var: str):
    """Ids of gates whose value depends on the named input."""
    dep = set()
    for idx, gate in enumerate(circuit.gates):
        if gate.kind == "input":
            if gate.var == var:
                dep.add(idx)
        elif gate.preds[0] in dep or gate.preds[1] in dep:
            dep.add(idx)
    return dep


def _squashed_fn(circuit: Circuit, gate):
    """The gate function with output squashed into (0, 1/2) and inputs
    coming from other squashed gates unsquashed first."""
    pre1 = (Unsquash(),) if circuit.gates[gate.preds[0]].kind == "apply" else ()
    pre2 = (Unsquash(),) if circuit.gates[gate.preds[1]].kind == "apply" else ()
    return Composed(gate.fn, pre1, pre2, (Squash(),))


def append_search(builder: CircuitBuilder, circuit: Circuit, q: int, top, var=None):
    """Append the search circuitry; returns (output id, phase output ids).

    The output gate computes max{lambda in 0..2^q - 1 : circuit = 1 at
    var = top - lambda}, assuming the circuit is 0/1-valued and accepts
    at var = top.
    """
    if q <= 0:
        raise ValueError("the number of searched bits must be positive")
    top = Fraction(top)
    var, others = _searched_input(circuit, var)
    dep = _dependents(circuit, var)
    p = q - 1
    phases = []

    # First probe: the top bit on a plain copy, output rescaled.
    anchor = builder.input(others[0])
    mapping = builder.copy_circuit(
        circuit, {var: (anchor, (Const(top - 2 ** p),))}
    )
    out = mapping[circuit.output]
    if out < 0:
        raise ValueError("the searched input cannot be the output gate")
    prev = builder.post_compose(out, ScaleAdd(Fraction(2 ** p), Fraction(0)))
    phases.append(prev)

    for i in range(1, p + 1):
        step = Fraction(2 ** (p - i + 1))
        offset = Fraction(2 ** (p - i))
        probe = StaircaseSearch(step, top, offset)
        rewritten = _PhaseCopier(builder, circuit, dep, var, step, probe, prev).run()
        phase_out = builder.post_compose(
            rewritten, RoundPhase(step, offset, phi(Fraction(1)))
        )
        phases.append(phase_out)
        prev = phase_out

    return prev, phases


class _PhaseCopier:
    """One chained probe copy with the floor-carry gate rewrites."""

    def __init__(self, builder, circuit, dep, var, step, probe, prev_gate):
        self.builder = builder
        self.circuit = circuit
        self.dep = dep
        self.var = var
        self.step = step
        self.probe = probe
        self.prev_gate = prev_gate

    def run(self) -> int:
        from .gates import FloorCarry, pre_compose

        circuit = self.circuit
        mapping = {}
        for idx, gate in enumerate(circuit.gates):
            if gate.kind == "input":
                mapping[idx] = -1 if gate.var == self.var else self.builder.input(gate.var)
                continue
            fn = _squashed_fn(circuit, gate)
            a, b = gate.preds
            in1 = a in self.dep
            in2 = b in self.dep
            if in1 or in2:
                mode = "both" if (in1 and in2) else ("first" if in1 else "second")
                # Slots fed by carrying gates consume the fractional
                # part, which is a squashed value.
                if in1:
                    fn = Composed(fn.inner, (Unsquash(),), fn.pre2, fn.post)
                if in2:
                    fn = Composed(fn.inner, fn.pre1, (Unsquash(),), fn.post)
                fn = FloorCarry(self.step, mode, fn)
            new_a, new_b = mapping[a], mapping[b]
            for arg, pred in ((0, a), (1, b)):
                if circuit.gates[pred].kind == "input" and circuit.gates[pred].var == self.var:
                    fn = pre_compose(fn, arg, self.probe)
                    if arg == 0:
                        new_a = self.prev_gate
                    else:
                        new_b = self.prev_gate
            mapping[idx] = self.builder.apply(fn, new_a, new_b)

        out = mapping[circuit.output]
        if circuit.output not in self.dep:
            # The probe answer never reaches the output; merge it in so
            # the phase output still carries the accumulated offset.
            carrier = Composed(
                FloorCarry(self.step, "second", NonNegCombine(Fraction(1), Fraction(0))),
                pre2=(self.probe,),
            )
            out = self.builder.apply(carrier, out, self.prev_gate)
        return out


def binary_search_transform(circuit: Circuit, q: int, top, var=None) -> Circuit:
    """Standalone form of the search; see append_search.

    The result's metadata records the raw gate count (one explicit
    probe gate per chained phase before elimination) and the phase
    output ids used by the staged-rounding checks.
    """
    builder = CircuitBuilder()
    out, phases = append_search(builder, circuit, q, top, var)
    result = builder.build(out)
    result.meta["raw_gate_count"] = len(result.gates) + (q - 1)
    result.meta["phase_outputs"] = phases
    return result


def append_split_combine(builder, c1, c2, kappa, lam_min, lam_max, var1=None, var2=None):
    """Append a decider for: do integral values a + b = kappa exist with
    c1 accepting at var1 = a and c2 accepting at var2 = b?

    Requires c1 to accept at var1 = lam_max and c2 at var2 =
    kappa - lam_min, both regardless of the other inputs.  c1 is probed
    log(lam_max - lam_min + 1) times, c2 exactly once.
    """
    kappa = Fraction(kappa)
    lam_min = Fraction(lam_min)
    lam_max = Fraction(lam_max)
    if lam_max < lam_min:
        raise ValueError("empty search window")
    span = lam_max - lam_min
    var2, _ = _searched_input(c2, var2)
    if span == 0:
        anchor2 = builder.input([n for n in c2.input_names() if n != var2][0])
        mapping = builder.copy_circuit(c2, {var2: (anchor2, (Const(kappa - lam_max),))})
        return mapping[c2.output]
    q = math.ceil(math.log2(int(span) + 1))
    best, _ = append_search(builder, c1, q, lam_max, var1)
    mapping = builder.copy_circuit(
        c2, {var2: (best, (ScaleAdd(Fraction(1), kappa - lam_max),))}
    )
    return mapping[c2.output]


def combine_split(c1: Circuit, c2: Circuit, kappa, lam_min, lam_max, var1=None, var2=None) -> Circuit:
    """Standalone form of append_split_combine."""
    builder = CircuitBuilder()
    out = append_split_combine(builder, c1, c2, kappa, lam_min, lam_max, var1, var2)
    return builder.build(out)


def threshold_gate(cut, strict=True) -> StepThreshold:
    return StepThreshold(Fraction(cut), strict)
