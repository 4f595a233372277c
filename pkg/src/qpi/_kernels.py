"""Compiled in-place gate kernels.

Each kernel enumerates only the amplitude indices it touches: the loop
counter is expanded by inserting zero bits at the fixed (control/target)
positions, then the control bits are OR-ed in. ``positions`` must be sorted
ascending.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _expand(k, positions):
    for p in positions:
        low = k & ((1 << p) - 1)
        k = ((k >> p) << (p + 1)) | low
    return k


@njit(cache=True)
def phase(amps, positions, mask, factor):
    count = amps.shape[0] >> positions.shape[0]
    for k in range(count):
        i = _expand(k, positions) | mask
        amps[i] *= factor


@njit(cache=True)
def pauli_x(amps, positions, cmask, tbit):
    count = amps.shape[0] >> positions.shape[0]
    for k in range(count):
        i0 = _expand(k, positions) | cmask
        i1 = i0 | tbit
        tmp = amps[i0]
        amps[i0] = amps[i1]
        amps[i1] = tmp


@njit(cache=True)
def hadamard(amps, positions, cmask, tbit):
    r = np.sqrt(0.5)
    count = amps.shape[0] >> positions.shape[0]
    for k in range(count):
        i0 = _expand(k, positions) | cmask
        i1 = i0 | tbit
        a = amps[i0]
        b = amps[i1]
        amps[i0] = (a + b) * r
        amps[i1] = (a - b) * r


@njit(cache=True)
def swap(amps, positions, cmask, bit0, bit1):
    count = amps.shape[0] >> positions.shape[0]
    for k in range(count):
        base = _expand(k, positions) | cmask
        i = base | bit0
        j = base | bit1
        tmp = amps[i]
        amps[i] = amps[j]
        amps[j] = tmp


@njit(cache=True)
def diagonal(amps, diag, low_table, high_table, low_bits):
    """Multiply amplitude ``i`` by ``diag[sub(i)]``; ``sub`` gathers the
    diagonal's qubits, split into a low-bit and a high-bit lookup."""
    lmask = (1 << low_bits) - 1
    for i in range(amps.shape[0]):
        amps[i] *= diag[low_table[i & lmask] | high_table[i >> low_bits]]
