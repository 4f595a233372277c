import sys

import numpy as np
import pytest

from qpi.circuit import H, PHASE, SWAP, X, Circuit, GateOp
from qpi.statevector import StateVector

_BASE = {
    X: np.array([[0, 1], [1, 0]], dtype=complex),
    H: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
}


def gate_matrix(gate: GateOp, num_qubits: int) -> np.ndarray:
    """Dense unitary of ``gate``, built column by column from basis states."""
    dim = 1 << num_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        if not all((i >> c) & 1 for c in gate.controls):
            mat[i, i] = 1
            continue
        if gate.kind == PHASE:
            (t,) = gate.targets
            sign = -1 if gate.inverted else 1
            mat[i, i] = np.exp(sign * 2j * np.pi / 2**gate.j) if (i >> t) & 1 else 1
        elif gate.kind == SWAP:
            t0, t1 = gate.targets
            b0, b1 = (i >> t0) & 1, (i >> t1) & 1
            k = i & ~(1 << t0) & ~(1 << t1) | (b1 << t0) | (b0 << t1)
            mat[k, i] = 1
        else:
            (t,) = gate.targets
            bit = (i >> t) & 1
            for out in (0, 1):
                k = (i & ~(1 << t)) | (out << t)
                mat[k, i] += _BASE[gate.kind][out, bit]
    return mat


def circuit_matrix(circ: Circuit) -> np.ndarray:
    mat = np.eye(1 << circ.num_qubits, dtype=complex)
    for g in circ.gates:
        mat = gate_matrix(g, circ.num_qubits) @ mat
    return mat


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return StateVector(num_qubits, v / np.linalg.norm(v))


def encode(values, regs) -> int:
    return sum(((v >> k) & 1) << q for v, r in zip(values, regs) for k, q in enumerate(r))


@pytest.fixture
def rng():
    return np.random.default_rng(20201021)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
