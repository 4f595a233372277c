import itertools
import math

import numpy as np
import pytest

from qpi.arith import (
    ArithError,
    ArithRegisters,
    build_mul_qft,
    build_mul_schoolbook,
    build_qft,
    build_qft_adder,
    build_sq_adder_based,
    build_sq_qft,
)
from qpi.circuit import inverse
from qpi.statevector import StateVector, basis_state, fidelity, prob_one, run

from conftest import encode, random_state


def permutation_image(psi: StateVector, regs, ranges, fn) -> StateVector:
    """Expected output of a reversible integer map ``fn`` applied to ``psi``.

    ``fn`` takes and returns register values; qubits outside ``regs`` are
    carried along unchanged.
    """
    out = np.zeros_like(psi.amplitudes)
    used = sum(1 << q for r in regs for q in r)
    for rest in range(1 << psi.num_qubits):
        if rest & used:
            continue
        for values in itertools.product(*(range(r) for r in ranges)):
            src = rest | encode(values, regs)
            out[rest | encode(fn(*values), regs)] += psi.amplitudes[src]
    return StateVector(psi.num_qubits, out)


def assert_basis_map(circ, regs, ranges, fn):
    for values in itertools.product(*(range(r) for r in ranges)):
        s = run(circ, basis_state(circ.num_qubits, encode(values, regs)))
        want = encode(fn(*values), regs)
        assert abs(s.amplitudes[want]) == pytest.approx(1, abs=1e-9), (values, fn(*values))


# --- QFT -------------------------------------------------------------------

def test_qft_single_qubit_is_h():
    c = build_qft([0])
    assert [g.dump() for g in c.gates] == ["H 0 []"]


def test_qft_two_qubits_of_one():
    s = run(build_qft([0, 1]), basis_state(2, 1))
    np.testing.assert_allclose(s.amplitudes, np.array([1, 1j, -1, -1j]) / 2, atol=1e-15)


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_qft_is_dft(l):
    dim = 2**l
    k = np.arange(dim)
    for c in range(dim):
        s = run(build_qft(range(l)), basis_state(l, c))
        np.testing.assert_allclose(s.amplitudes, np.exp(2j * np.pi * k * c / dim) / math.sqrt(dim), atol=1e-12)


def test_qft_empty_rejected():
    with pytest.raises(ArithError):
        build_qft([])


# --- adder -----------------------------------------------------------------

@pytest.mark.parametrize("x, y, want", [(3, 5, 8), (15, 1, 0)])
def test_adder_examples(x, y, want):
    X, Y = (0, 1, 2, 3), (4, 5, 6, 7)
    s = run(build_qft_adder(X, Y), basis_state(8, encode([x, y], [X, Y])))
    assert abs(s.amplitudes[encode([x, want], [X, Y])]) == pytest.approx(1, abs=1e-12)


def test_adder_superposed_addend():
    X, Y = (0,), (1, 2)
    s = basis_state(3, encode([0, 1], [X, Y]))
    s.amplitudes[:] = 0
    s.amplitudes[encode([0, 1], [X, Y])] = s.amplitudes[encode([1, 1], [X, Y])] = 1 / math.sqrt(2)
    run(build_qft_adder(X, Y), s)
    want = np.zeros(8, dtype=complex)
    want[encode([0, 1], [X, Y])] = want[encode([1, 2], [X, Y])] = 1 / math.sqrt(2)
    np.testing.assert_allclose(s.amplitudes, want, atol=1e-12)


@pytest.mark.parametrize("bits", [4, 6])
def test_adder_exhaustive(bits):
    X, Y = tuple(range(bits)), tuple(range(bits, 2 * bits))
    assert_basis_map(build_qft_adder(X, Y), [X, Y], [2**bits, 2**bits],
                     lambda x, y: [x, (x + y) % 2**bits])


def test_adder_short_addend_and_control():
    X, Y, ctrl = (0, 1), (2, 3, 4, 5), 6
    circ = build_qft_adder(X, Y, control=ctrl)
    assert_basis_map(circ, [X, Y, (ctrl,)], [4, 16, 2],
                     lambda x, y, c: [x, (y + c * x) % 16, c])


def test_adder_overlap_rejected():
    with pytest.raises(ArithError):
        build_qft_adder((0, 1), (1, 2))
    with pytest.raises(ArithError):
        build_qft_adder((0, 1), (2, 3), control=3)


# --- multipliers -----------------------------------------------------------

A, B, C = (0, 1), (2, 3), (4, 5, 6, 7)
REGS = ArithRegisters(A, B, C)
MULTIPLIERS = [build_mul_schoolbook, build_mul_qft]


@pytest.mark.parametrize("builder", MULTIPLIERS)
@pytest.mark.parametrize("a, b, c, want", [(3, 2, 1, 7), (3, 3, 15, 8), (0, 3, 5, 5)])
def test_multiplier_examples(builder, a, b, c, want):
    s = run(builder(REGS), basis_state(8, encode([a, b, c], [A, B, C])))
    assert abs(s.amplitudes[encode([a, b, want], [A, B, C])]) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("builder", MULTIPLIERS)
@pytest.mark.parametrize("n", [2, 3])
def test_multiplier_exhaustive(builder, n):
    l = 2 * n
    a, b, c = tuple(range(n)), tuple(range(n, 2 * n)), tuple(range(2 * n, 2 * n + l))
    assert_basis_map(builder(ArithRegisters(a, b, c)), [a, b, c], [2**n, 2**n, 2**l],
                     lambda av, bv, cv: [av, bv, (cv + av * bv) % 2**l])


@pytest.mark.parametrize("builder", MULTIPLIERS)
def test_multiplier_unequal_widths(builder):
    a, b, c = (0, 1, 2), (3, 4), (5, 6, 7, 8)
    assert_basis_map(builder(ArithRegisters(a, b, c)), [a, b, c], [8, 4, 16],
                     lambda av, bv, cv: [av, bv, (cv + av * bv) % 16])


def test_multipliers_agree_on_superpositions(rng):
    for _ in range(20):
        psi = random_state(8, rng)
        s1 = run(build_mul_schoolbook(REGS), psi.copy())
        s2 = run(build_mul_qft(REGS), psi.copy())
        assert fidelity(s1, s2) >= 1 - 1e-10


def test_multiplier_rejects_overlap_and_empty():
    with pytest.raises(ArithError):
        ArithRegisters((0, 1), (1, 2), (3, 4))
    with pytest.raises(ArithError):
        build_mul_qft(ArithRegisters((0,), (1,), ()))


# --- squarers ---------------------------------------------------------------

SQ_A, SQ_B, ANC = (0, 1), (2, 3, 4, 5), 6


def sq_adder():
    return build_sq_adder_based(ArithRegisters(SQ_A, SQ_B, ancilla=ANC))


@pytest.mark.parametrize("a, b, want", [(3, 0, 9), (3, 10, 3), (1, 0, 1)])
def test_squarer_examples(a, b, want):
    for circ in (sq_adder(), build_sq_qft(SQ_A, SQ_B)):
        s = run(circ, basis_state(circ.num_qubits, encode([a, b], [SQ_A, SQ_B])))
        assert abs(s.amplitudes[encode([a, want], [SQ_A, SQ_B])]) == pytest.approx(1, abs=1e-12)


def test_squarer_uniform_input():
    s = StateVector(7, np.zeros(128, dtype=complex))
    for a in range(4):
        s.amplitudes[encode([a, 0], [SQ_A, SQ_B])] = 0.5
    run(sq_adder(), s)
    want = np.zeros(128, dtype=complex)
    for a in range(4):
        want[encode([a, a * a], [SQ_A, SQ_B])] = 0.5
    np.testing.assert_allclose(s.amplitudes, want, atol=1e-12)
    assert prob_one(s, ANC) == 0.0


@pytest.mark.parametrize("n", [2, 3])
def test_squarers_exhaustive(n):
    a, b, anc = tuple(range(n)), tuple(range(n, 3 * n)), 3 * n
    fn = lambda av, bv: [av, (bv + av * av) % 4**n]  # noqa: E731
    assert_basis_map(build_sq_qft(a, b), [a, b], [2**n, 4**n], fn)
    assert_basis_map(build_sq_adder_based(ArithRegisters(a, b, ancilla=anc)), [a, b], [2**n, 4**n], fn)


@pytest.mark.parametrize("n", [2, 3])
def test_adder_squarer_ancilla_restored(n):
    a, b, anc = tuple(range(n)), tuple(range(n, 3 * n)), 3 * n
    circ = build_sq_adder_based(ArithRegisters(a, b, ancilla=anc))
    for av in range(2**n):
        for bv in range(4**n):
            s = run(circ, basis_state(circ.num_qubits, encode([av, bv], [a, b])))
            assert prob_one(s, anc) <= 1e-12


def test_squarers_agree_on_superpositions(rng):
    adder_based, qft = sq_adder(), build_sq_qft(SQ_A, SQ_B, num_qubits=7)
    for _ in range(20):
        psi = random_state(6, rng)
        padded = StateVector(7, np.concatenate([psi.amplitudes, np.zeros(64)]))  # ancilla |0>
        s1 = run(adder_based, padded.copy())
        s2 = run(qft, padded.copy())
        assert fidelity(s1, s2) >= 1 - 1e-10


def test_squarer_needs_ancilla():
    with pytest.raises(ArithError):
        build_sq_adder_based(ArithRegisters(SQ_A, SQ_B))
    with pytest.raises(ArithError):
        build_sq_qft((0, 1), (1, 2, 3))


# --- generic properties -----------------------------------------------------

CASES = [
    ("adder", lambda: build_qft_adder((0, 1, 2), (3, 4, 5)), [(0, 1, 2), (3, 4, 5)], [8, 8],
     lambda x, y: [x, (x + y) % 8]),
    ("mul_schoolbook", lambda: build_mul_schoolbook(REGS), [A, B, C], [4, 4, 16],
     lambda a, b, c: [a, b, (c + a * b) % 16]),
    ("mul_qft", lambda: build_mul_qft(REGS), [A, B, C], [4, 4, 16],
     lambda a, b, c: [a, b, (c + a * b) % 16]),
    ("sq_qft", lambda: build_sq_qft(SQ_A, SQ_B), [SQ_A, SQ_B], [4, 16],
     lambda a, b: [a, (b + a * a) % 16]),
]


@pytest.mark.parametrize("name, build, regs, ranges, fn", CASES, ids=[c[0] for c in CASES])
def test_linearity(name, build, regs, ranges, fn, rng):
    circ = build()
    psi = random_state(circ.num_qubits, rng)
    got = run(circ, psi.copy())
    want = permutation_image(psi, regs, ranges, fn)
    np.testing.assert_allclose(got.amplitudes, want.amplitudes, atol=1e-10)


@pytest.mark.parametrize("name, build, regs, ranges, fn", CASES, ids=[c[0] for c in CASES])
def test_unitarity_roundtrip(name, build, regs, ranges, fn, rng):
    circ = build()
    psi = random_state(circ.num_qubits, rng)
    out = run(inverse(circ), run(circ, psi.copy()))
    assert fidelity(out, psi) >= 1 - 1e-10
