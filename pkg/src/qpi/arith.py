"""Fourier-basis arithmetic circuits: QFT, adder, multipliers and squarers.

All registers are qubit lists ordered least-significant bit first. The QFT
includes its terminal swaps, so after ``build_qft(reg)`` the physical qubit
``reg[l - 1 - u]`` carries the phase ``0.c_u c_{u-1} ... c_0`` (the ``u``-th
Fourier qubit). Rotation blocks address Fourier qubits through
:func:`fourier_qubit`.

A value ``v`` is added to a Fourier-encoded register by rotating Fourier qubit
``u`` with ``R_j`` for each set bit ``k`` of ``v``, where ``j = u - k + 1``.
Rotations with ``j <= 0`` are whole turns and are never emitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import circuit as cq
from .circuit import Circuit, GateOp


class ArithError(ValueError):
    pass


@dataclass(frozen=True)
class ArithRegisters:
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...] = ()
    ancilla: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        _disjoint(self.a, self.b, self.c, () if self.ancilla is None else (self.ancilla,))

    @property
    def num_qubits(self) -> int:
        extra = () if self.ancilla is None else (self.ancilla,)
        return max(self.a + self.b + self.c + extra) + 1

    def names(self) -> dict[str, tuple[int, ...]]:
        regs = {"a": self.a, "b": self.b}
        if self.c:
            regs["c"] = self.c
        if self.ancilla is not None:
            regs["ancilla"] = (self.ancilla,)
        return regs


def _disjoint(*regs: Sequence[int]) -> None:
    flat = [q for r in regs for q in r]
    if len(flat) != len(set(flat)):
        raise ArithError(f"registers overlap: {[list(r) for r in regs]}")
    if any(q < 0 for q in flat):
        raise ArithError("negative qubit index")


def _width(*regs: Sequence[int]) -> int:
    return max(q for r in regs for q in r) + 1


def _nonempty(name: str, reg: Sequence[int]) -> None:
    if not reg:
        raise ArithError(f"register {name} is empty")


def fourier_qubit(reg: Sequence[int], u: int) -> int:
    """Physical qubit holding Fourier digit ``u`` of ``reg`` after :func:`build_qft`."""
    return reg[len(reg) - 1 - u]


def _qft_gates(reg: Sequence[int]) -> list[GateOp]:
    l = len(reg)
    gates = []
    for u in range(l - 1, -1, -1):
        gates.append(cq.h(reg[u]))
        for k in range(u - 1, -1, -1):
            gates.append(cq.phase(u - k + 1, reg[u], controls=(reg[k],)))
    for i in range(l // 2):
        gates.append(cq.swap(reg[i], reg[l - 1 - i]))
    return gates


def build_qft(reg: Sequence[int], num_qubits: Optional[int] = None) -> Circuit:
    """Quantum Fourier transform on ``reg``: ``|c> -> sum_k exp(2 pi i c k / 2^l) |k> / 2^(l/2)``."""
    reg = tuple(reg)
    _nonempty("reg", reg)
    _disjoint(reg)
    width = num_qubits if num_qubits is not None else _width(reg)
    return Circuit(width, _qft_gates(reg), {"reg": reg})


def build_iqft(reg: Sequence[int], num_qubits: Optional[int] = None) -> Circuit:
    return cq.inverse(build_qft(reg, num_qubits))


def _add_rotations(addend: Sequence[int], target: Sequence[int], weight: int = 0,
                   extra_controls: Sequence[int] = ()) -> list[GateOp]:
    """Rotations adding ``2**weight * addend`` to the Fourier-encoded ``target``."""
    gates = []
    for t, qt in enumerate(addend):
        for u in range(len(target)):
            j = u - t - weight + 1
            if j > 0:
                gates.append(cq.phase(j, fourier_qubit(target, u), controls=(qt, *extra_controls)))
    return gates


def build_add_rotations(addend: Sequence[int], target: Sequence[int],
                        num_qubits: Optional[int] = None) -> Circuit:
    """Rotation block of the QFT adder, without the surrounding (I)QFT."""
    addend, target = tuple(addend), tuple(target)
    _disjoint(addend, target)
    width = num_qubits if num_qubits is not None else _width(addend, target)
    return Circuit(width, _add_rotations(addend, target))


def build_qft_adder(addend: Sequence[int], target: Sequence[int], control: Optional[int] = None,
                    num_qubits: Optional[int] = None) -> Circuit:
    """``|x>|y> -> |x>|x + y mod 2^l>`` on ``target`` (length ``l``).

    With ``control`` set only the rotation block is controlled; the QFT and
    its inverse cancel when the rotations are suppressed.
    """
    addend, target = tuple(addend), tuple(target)
    _nonempty("addend", addend)
    _nonempty("target", target)
    ctrl = () if control is None else (control,)
    _disjoint(addend, target, ctrl)
    width = num_qubits if num_qubits is not None else _width(addend, target, ctrl)
    block = build_add_rotations(addend, target, width)
    if control is not None:
        block = cq.with_control(block, control)
    regs = {"addend": addend, "target": target}
    qft = build_qft(target, width)
    return Circuit(width, qft.gates + block.gates + cq.inverse(qft).gates, regs)


def _check_mul(regs: ArithRegisters) -> None:
    _nonempty("a", regs.a)
    _nonempty("b", regs.b)
    _nonempty("c", regs.c)


def build_mul_schoolbook(regs: ArithRegisters, num_qubits: Optional[int] = None) -> Circuit:
    """``|a>|b>|c> -> |a>|b>|c + ab mod 2^l>`` from one controlled QFT adder per bit of ``a``."""
    _check_mul(regs)
    width = num_qubits if num_qubits is not None else regs.num_qubits
    gates: list[GateOp] = []
    for s, a_s in enumerate(regs.a):
        if s >= len(regs.c):
            break  # shifted past the accumulator: adds a multiple of 2^l
        gates += build_qft_adder(regs.b, regs.c[s:], control=a_s, num_qubits=width).gates
    return Circuit(width, gates, regs.names())


def build_mul_qft(regs: ArithRegisters, num_qubits: Optional[int] = None) -> Circuit:
    """Same map as :func:`build_mul_schoolbook` with a single QFT pair around
    doubly-controlled rotations, one block per bit ``a_s``."""
    _check_mul(regs)
    width = num_qubits if num_qubits is not None else regs.num_qubits
    qft = build_qft(regs.c, width)
    gates = list(qft.gates)
    for s, a_s in enumerate(regs.a):
        gates += _add_rotations(regs.b, regs.c, weight=s, extra_controls=(a_s,))
    gates += cq.inverse(qft).gates
    return Circuit(width, gates, regs.names())


def build_sq_adder_based(regs: ArithRegisters, num_qubits: Optional[int] = None) -> Circuit:
    """``|a>|b>|0> -> |a>|b + a^2 mod 2^m>|0>`` using one ancilla.

    For each bit ``a_s`` the ancilla receives a CNOT copy of it, controls an
    adder of ``a`` into the top ``m - s`` qubits of ``b``, and is cleared again.
    """
    if regs.ancilla is None:
        raise ArithError("adder-based squarer needs an ancilla qubit")
    _nonempty("a", regs.a)
    _nonempty("b", regs.b)
    width = num_qubits if num_qubits is not None else regs.num_qubits
    anc = regs.ancilla
    gates: list[GateOp] = []
    for s, a_s in enumerate(regs.a):
        if s >= len(regs.b):
            break
        gates.append(cq.x(anc, controls=(a_s,)))
        gates += build_qft_adder(regs.a, regs.b[s:], control=anc, num_qubits=width).gates
        gates.append(cq.x(anc, controls=(a_s,)))
    return Circuit(width, gates, regs.names())


def build_sq_qft(a: Sequence[int], b: Sequence[int], num_qubits: Optional[int] = None) -> Circuit:
    """``|a>|b> -> |a>|b + a^2 mod 2^m>`` with no ancilla.

    Cross terms ``a_s a_t`` (``t != s``) use doubly-controlled rotations; the
    self term ``a_s a_s = a_s`` needs only a single control.
    """
    a, b = tuple(a), tuple(b)
    _nonempty("a", a)
    _nonempty("b", b)
    _disjoint(a, b)
    width = num_qubits if num_qubits is not None else _width(a, b)
    qft = build_qft(b, width)
    gates = list(qft.gates)
    for s, a_s in enumerate(a):
        for t, a_t in enumerate(a):
            for u in range(len(b)):
                j = u - s - t + 1
                if j <= 0:
                    continue
                controls = (a_s,) if t == s else (a_s, a_t)
                gates.append(cq.phase(j, fourier_qubit(b, u), controls=controls))
    gates += cq.inverse(qft).gates
    return Circuit(width, gates, {"a": a, "b": b})
