"""Gate-level circuit representation.

Only four gate kinds exist: X, H, Swap and the dyadic phase gate
``R_j = diag(1, exp(2*pi*i / 2**j))``. Any gate may carry an arbitrary set of
control qubits. Circuits are immutable; transforms return new circuits.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

X = "X"
H = "H"
SWAP = "Swap"
PHASE = "PhaseRj"
KINDS = (X, H, SWAP, PHASE)


class CircuitError(ValueError):
    """Raised when a gate or circuit violates its structural contract."""


@dataclass(frozen=True)
class GateOp:
    kind: str
    targets: tuple[int, ...]
    controls: frozenset[int] = frozenset()
    j: int = 0
    inverted: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "controls", frozenset(self.controls))
        want = 2 if self.kind == SWAP else 1
        if len(self.targets) != want:
            raise CircuitError(f"{self.kind} takes {want} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"repeated target in {self.targets}")
        if self.controls & set(self.targets):
            raise CircuitError(f"targets {self.targets} overlap controls {sorted(self.controls)}")
        if min(self.targets + tuple(self.controls)) < 0:
            raise CircuitError("negative qubit index")
        if self.kind == PHASE:
            if self.j <= 0:
                raise CircuitError(f"R_{self.j} is the identity and must not be emitted")
        elif self.j or self.inverted:
            raise CircuitError(f"j/inverted only apply to {PHASE}")

    @property
    def qubits(self) -> frozenset[int]:
        return self.controls | set(self.targets)

    def inverse(self) -> GateOp:
        if self.kind == PHASE:
            return replace(self, inverted=not self.inverted)
        return self

    def dump(self) -> str:
        """One-line text form: ``KIND targets [controls] (j, inverted)``."""
        targets = ",".join(map(str, self.targets))
        controls = ",".join(map(str, sorted(self.controls)))
        line = f"{self.kind} {targets} [{controls}]"
        if self.kind == PHASE:
            line += f" ({self.j}, {int(self.inverted)})"
        return line


def x(target: int, controls: Iterable[int] = ()) -> GateOp:
    return GateOp(X, (target,), frozenset(controls))


def h(target: int) -> GateOp:
    return GateOp(H, (target,))


def swap(q0: int, q1: int) -> GateOp:
    return GateOp(SWAP, (q0, q1))


def phase(j: int, target: int, controls: Iterable[int] = (), inverted: bool = False) -> GateOp:
    return GateOp(PHASE, (target,), frozenset(controls), j=j, inverted=inverted)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[GateOp, ...] = ()
    registers: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        regs = {name: tuple(qs) for name, qs in dict(self.registers).items()}
        object.__setattr__(self, "registers", regs)
        if self.num_qubits < 0:
            raise CircuitError("negative qubit count")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise CircuitError(f"gate {g.dump()} outside {self.num_qubits} qubits")
        seen: set[int] = set()
        for name, qs in regs.items():
            if any(q < 0 or q >= self.num_qubits for q in qs):
                raise CircuitError(f"register {name!r} outside {self.num_qubits} qubits")
            if seen & set(qs) or len(set(qs)) != len(qs):
                raise CircuitError(f"register {name!r} overlaps another register")
            seen |= set(qs)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        return compose(self, other)

    def dump(self) -> str:
        return "\n".join(g.dump() for g in self.gates)


def compose(*circuits: Circuit) -> Circuit:
    """Concatenate circuits in application order; registers are merged."""
    if not circuits:
        raise CircuitError("nothing to compose")
    num_qubits = max(c.num_qubits for c in circuits)
    gates: list[GateOp] = []
    registers: dict[str, tuple[int, ...]] = {}
    for c in circuits:
        gates.extend(c.gates)
        for name, qs in c.registers.items():
            if registers.get(name, qs) != qs:
                raise CircuitError(f"conflicting definitions of register {name!r}")
            registers[name] = qs
    return Circuit(num_qubits, gates, registers)


def inverse(c: Circuit) -> Circuit:
    return Circuit(c.num_qubits, [g.inverse() for g in reversed(c.gates)], c.registers)


def with_control(c: Circuit, ctrl: int) -> Circuit:
    """Add ``ctrl`` to the control set of every gate of ``c``."""
    if ctrl < 0:
        raise CircuitError("negative control index")
    if any(ctrl in g.qubits for g in c.gates):
        raise CircuitError(f"control qubit {ctrl} already used by the circuit")
    gates = [replace(g, controls=g.controls | {ctrl}) for g in c.gates]
    return Circuit(max(c.num_qubits, ctrl + 1), gates, c.registers)


def gate_count(c: Circuit) -> dict[str, int]:
    """Tally gates per kind. Controlled gates are counted under their base kind."""
    counts = Counter(g.kind for g in c.gates)
    return {kind: counts.get(kind, 0) for kind in KINDS}


def touched_qubits(c: Circuit) -> set[int]:
    out: set[int] = set()
    for g in c.gates:
        out |= g.qubits
    return out
