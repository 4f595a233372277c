"""Dense statevector simulation kernel.

Basis ordering is little-endian: qubit ``k`` is bit ``k`` of the amplitude
index. Gates are applied in place by compiled bit-mask kernels that visit
only the amplitudes (or amplitude pairs) the gate acts on, so no gate matrix
is ever expanded.
"""

from __future__ import annotations

import cmath
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .circuit import H, PHASE, SWAP, X, Circuit, CircuitError, GateOp

DTYPE = np.complex128
MAX_QUBITS = 26
RNG_ALGORITHM = "numpy.PCG64 via SeedSequence(seed, spawn_key=(stream_id,))"


class ResourceError(MemoryError):
    """The requested state does not fit under the configured memory limit."""

    def __init__(self, num_qubits: int, limit: int):
        self.num_qubits = num_qubits
        self.required_bytes = state_bytes(num_qubits)
        super().__init__(
            f"{num_qubits} qubits need {self.required_bytes} bytes "
            f"({self.required_bytes / 2**20:.0f} MiB) of amplitudes; limit is {limit} qubits"
        )


def state_bytes(num_qubits: int) -> int:
    return (1 << num_qubits) * np.dtype(DTYPE).itemsize


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Different stream ids give statistically independent substreams of the
    same seed, which is how experiment repetitions are kept apart.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))


def zero_state(num_qubits: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    if num_qubits < 0:
        raise ValueError("qubit count must be non-negative")
    if num_qubits > max_qubits:
        raise ResourceError(num_qubits, max_qubits)
    amps = np.zeros(1 << num_qubits, dtype=DTYPE)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> StateVector:
    state = zero_state(num_qubits)
    state.amplitudes[0] = 0.0
    state.amplitudes[index] = 1.0
    return state


def _check_qubits(state: StateVector, qubits) -> None:
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise IndexError(f"qubit {q} out of range for {state.num_qubits}-qubit state")


def _index(num_qubits: int, fixed: dict[int, int]) -> tuple:
    # axis 0 of the reshaped tensor is the most significant qubit
    idx: list = [slice(None)] * num_qubits
    for q, bit in fixed.items():
        idx[num_qubits - 1 - q] = bit
    # trailing Ellipsis keeps a fully-indexed result a 0-d view, not a scalar copy
    return (*idx, Ellipsis)


def phase_factor(j: int, inverted: bool = False) -> complex:
    if j == 1:
        return -1.0
    if j == 2:
        return -1j if inverted else 1j
    angle = 2 * math.pi / (1 << j)
    return cmath.exp(-1j * angle if inverted else 1j * angle)


def _positions(qubits) -> np.ndarray:
    return np.array(sorted(qubits), dtype=np.int64)


def _mask(qubits) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def apply(state: StateVector, gate: GateOp) -> StateVector:
    """Apply ``gate`` to ``state`` in place and return the same state."""
    _check_qubits(state, gate.qubits)
    if gate.controls & set(gate.targets):
        raise CircuitError("target qubit is also a control")
    amps = state.amplitudes
    positions = _positions(gate.qubits)
    cmask = _mask(gate.controls)

    if gate.kind == PHASE:
        factor = complex(phase_factor(gate.j, gate.inverted))
        _kernels.phase(amps, positions, cmask | (1 << gate.targets[0]), factor)
    elif gate.kind == X:
        _kernels.pauli_x(amps, positions, cmask, 1 << gate.targets[0])
    elif gate.kind == H:
        _kernels.hadamard(amps, positions, cmask, 1 << gate.targets[0])
    elif gate.kind == SWAP:
        t0, t1 = gate.targets
        _kernels.swap(amps, positions, cmask, 1 << t0, 1 << t1)
    else:  # pragma: no cover - GateOp validates kinds
        raise CircuitError(f"unsupported gate {gate.kind}")
    return state


# a phase-gate run is fused only when it spans few enough qubits for a dense diagonal
FUSE_MAX_QUBITS = 20
FUSE_MIN_GATES = 4
_PLAN_CACHE_SIZE = 16
_plans: OrderedDict[int, tuple[Circuit, list]] = OrderedDict()


@dataclass
class _DiagonalRun:
    """A maximal run of phase gates, applied as one diagonal pass."""

    qubits: np.ndarray
    diag: np.ndarray
    num_gates: int
    _tables: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, gates: list[GateOp]) -> _DiagonalRun:
        qubits = sorted(set().union(*(g.qubits for g in gates)))
        where = {q: i for i, q in enumerate(qubits)}
        top = max(g.j for g in gates)
        # phases as exact integer multiples of 2*pi / 2**top
        turns = np.zeros(1 << len(qubits), dtype=np.int64)
        idx = np.arange(turns.size, dtype=np.int64)
        for g in gates:
            m = _mask(where[q] for q in g.qubits)
            step = 1 << (top - g.j)
            turns[(idx & m) == m] += -step if g.inverted else step
        turns %= 1 << top
        diag = np.exp(2j * np.pi * turns / (1 << top))
        return cls(np.array(qubits, dtype=np.int64), diag, len(gates))

    def apply(self, state: StateVector) -> None:
        q = state.num_qubits
        low_bits = q // 2
        if q not in self._tables:
            self._tables[q] = (_gather_table(self.qubits, 0, low_bits),
                               _gather_table(self.qubits, low_bits, q - low_bits))
        low_table, high_table = self._tables[q]
        _kernels.diagonal(state.amplitudes, self.diag, low_table, high_table, low_bits)


def _gather_table(qubits: np.ndarray, offset: int, width: int) -> np.ndarray:
    """``table[v]`` = bits of ``v << offset`` at ``qubits``, packed LSB first."""
    v = np.arange(1 << width, dtype=np.int64) << offset
    out = np.zeros_like(v)
    for i, qb in enumerate(qubits):
        out |= ((v >> qb) & 1) << i
    return out


def _plan(circuit: Circuit) -> list:
    key = id(circuit)
    hit = _plans.get(key)
    if hit is not None and hit[0] is circuit:
        _plans.move_to_end(key)
        return hit[1]
    steps: list = []
    pending: list[GateOp] = []
    span: set[int] = set()

    def flush() -> None:
        if len(pending) >= FUSE_MIN_GATES:
            steps.append(_DiagonalRun.build(pending))
        else:
            steps.extend(pending)
        pending.clear()
        span.clear()

    for g in circuit.gates:
        if g.kind == PHASE:
            if len(span | g.qubits) > FUSE_MAX_QUBITS:
                flush()
            pending.append(g)
            span.update(g.qubits)
        else:
            flush()
            steps.append(g)
    flush()
    _plans[key] = (circuit, steps)
    if len(_plans) > _PLAN_CACHE_SIZE:
        _plans.popitem(last=False)
    return steps


def run(circuit: Circuit, state: StateVector, fuse: bool = True) -> StateVector:
    """Apply every gate of ``circuit`` to ``state`` in order (in place).

    With ``fuse`` (the default) each maximal run of consecutive phase gates is
    applied as a single diagonal pass; phase gates commute, so the result is
    the same map with exact phase bookkeeping. The circuit itself is untouched.
    """
    if circuit.num_qubits != state.num_qubits:
        raise ValueError(
            f"circuit acts on {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )
    if not fuse:
        for gate in circuit.gates:
            apply(state, gate)
        return state
    for step in _plan(circuit):
        if isinstance(step, _DiagonalRun):
            _check_qubits(state, step.qubits.tolist())
            step.apply(state)
        else:
            apply(state, step)
    return state


def prob_one(state: StateVector, qubit: int) -> float:
    """Probability of reading 1 on ``qubit``."""
    _check_qubits(state, (qubit,))
    q = state.num_qubits
    part = state.amplitudes.reshape((2,) * q)[_index(q, {qubit: 1})]
    p = float(np.sum(part.real**2) + np.sum(part.imag**2))
    return min(max(p, 0.0), 1.0)


def register_distribution(state: StateVector, qubits) -> np.ndarray:
    """Marginal distribution of the integer held in ``qubits`` (LSB first)."""
    _check_qubits(state, qubits)
    probs = state.amplitudes.real**2 + state.amplitudes.imag**2
    idx = np.arange(probs.size)
    value = np.zeros_like(idx)
    for bit, q in enumerate(qubits):
        value |= ((idx >> q) & 1) << bit
    return np.bincount(value, weights=probs, minlength=1 << len(qubits))


def sample_bernoulli(p: float, shots: int, rng: RngStream) -> int:
    if shots < 0:
        raise ValueError("shots must be non-negative")
    p = min(max(p, 0.0), 1.0)
    return int(rng.generator.binomial(shots, p))


def sample_hits(state: StateVector, qubit: int, shots: int, rng: RngStream) -> int:
    """Number of 1 outcomes on ``qubit`` over ``shots`` independent measurements."""
    return sample_bernoulli(prob_one(state, qubit), shots, rng)


def fidelity(a: StateVector, b: StateVector) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
