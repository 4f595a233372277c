"""Exhaustive basis-state checks of the arithmetic builders against integer arithmetic."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import arith
from .circuit import PHASE, Circuit
from .statevector import basis_state, run


def encode(values: Sequence[int], regs: Sequence[Sequence[int]]) -> int:
    index = 0
    for value, reg in zip(values, regs):
        for bit, q in enumerate(reg):
            index |= ((value >> bit) & 1) << q
    return index


def decode(index: int, regs: Sequence[Sequence[int]]) -> list[int]:
    return [sum(((index >> q) & 1) << bit for bit, q in enumerate(reg)) for reg in regs]


def basis_output(circ: Circuit, values: Sequence[int], regs: Sequence[Sequence[int]],
                 tol: float = 1e-9) -> list[int] | None:
    """Run ``circ`` on a basis input; return the register values if the output
    is (up to phase) a basis state, else None."""
    state = run(circ, basis_state(circ.num_qubits, encode(values, regs)))
    i = int(np.argmax(np.abs(state.amplitudes)))
    if abs(abs(state.amplitudes[i]) - 1.0) > tol:
        return None
    return decode(i, regs)


@dataclass
class FamilyResult:
    name: str
    cases: int = 0
    failures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cases > 0 and not self.failures


def inject_fault(circ: Circuit) -> Circuit:
    """Flip the direction of one rotation (the middle ``R_j`` with ``j >= 2``)."""
    idx = [i for i, g in enumerate(circ.gates) if g.kind == PHASE and g.j >= 2]
    if not idx:
        return circ
    k = idx[len(idx) // 2]
    gates = list(circ.gates)
    gates[k] = replace(gates[k], inverted=not gates[k].inverted)
    return Circuit(circ.num_qubits, gates, circ.registers)


def _check(name: str, circ: Circuit, regs, ranges, expected: Callable[..., list[int]],
           fault: bool) -> FamilyResult:
    if fault:
        circ = inject_fault(circ)
    result = FamilyResult(name)
    for values in itertools.product(*(range(r) for r in ranges)):
        result.cases += 1
        want = expected(*values)
        got = basis_output(circ, list(values) + [0] * (len(regs) - len(values)), regs)
        if got != want:
            result.failures.append(values)
    return result


def run_selftest(n: int = 2, fault: bool = False) -> list[FamilyResult]:
    """Check adder, both multipliers and both squarers on every basis input.

    Sizes: adder on ``2n``-bit operands; multipliers with ``n``-bit factors and
    a ``2n``-bit accumulator; squarers with an ``n``-bit input and ``2n``-bit target.
    """
    l = 2 * n
    results = []

    x, y = tuple(range(l)), tuple(range(l, 2 * l))
    results.append(_check(
        "qft_adder", arith.build_qft_adder(x, y), [x, y], [2**l, 2**l],
        lambda xv, yv: [xv, (xv + yv) % 2**l], fault))

    a, b, c = tuple(range(n)), tuple(range(n, 2 * n)), tuple(range(2 * n, 2 * n + l))
    regs = arith.ArithRegisters(a, b, c)
    mul = lambda av, bv, cv: [av, bv, (cv + av * bv) % 2**l]  # noqa: E731
    results.append(_check("mul_schoolbook", arith.build_mul_schoolbook(regs), [a, b, c],
                          [2**n, 2**n, 2**l], mul, fault))
    results.append(_check("mul_qft", arith.build_mul_qft(regs), [a, b, c],
                          [2**n, 2**n, 2**l], mul, fault))

    a, b, anc = tuple(range(n)), tuple(range(n, n + l)), n + l
    sq = lambda av, bv: [av, (bv + av * av) % 2**l]  # noqa: E731
    sq_anc = lambda av, bv: sq(av, bv) + [0]  # noqa: E731
    results.append(_check("sq_adder_based", arith.build_sq_adder_based(arith.ArithRegisters(a, b, ancilla=anc)),
                          [a, b, (anc,)], [2**n, 2**l], sq_anc, fault))
    results.append(_check("sq_qft", arith.build_sq_qft(a, b), [a, b], [2**n, 2**l], sq, fault))
    return results
