"""Maximum-likelihood quantum amplitude estimation.

Given a circuit ``A`` whose flag qubit reads 1 with probability
``a = sin^2(theta)``, the Grover operator ``Q`` rotates by ``2 theta`` so the
flag of ``Q^m A|0>`` reads 1 with probability ``sin^2((2m + 1) theta)``.
Hit counts from several powers ``m_k`` are combined through the likelihood

    L(theta) = sum_k h_k ln sin^2((2 m_k + 1) theta)
                     + (N - h_k) ln cos^2((2 m_k + 1) theta)

which is maximised over a fine grid and then refined by golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import xlogy

from . import circuit as cq
from .circuit import Circuit
from .statevector import RngStream, prob_one, run, sample_bernoulli, zero_state

THETA_CLAMP = 1e-8
GRID_POINTS = 100_000
GOLDEN_TOL = 1e-10
_TINY = 1e-300


class ProblemError(ValueError):
    pass


@dataclass(frozen=True)
class AmplitudeProblem:
    a_circuit: Circuit
    domain_qubits: tuple[int, ...]
    flag_qubit: int
    ancilla_qubits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain_qubits", tuple(self.domain_qubits))
        object.__setattr__(self, "ancilla_qubits", tuple(self.ancilla_qubits))
        if self.flag_qubit not in self.domain_qubits:
            raise ProblemError("flag qubit must be part of the reflection domain")
        if set(self.domain_qubits) & set(self.ancilla_qubits):
            raise ProblemError("ancilla qubits overlap the reflection domain")
        n = self.a_circuit.num_qubits
        if any(q >= n for q in self.domain_qubits + self.ancilla_qubits):
            raise ProblemError("problem qubits outside the A circuit")

    @property
    def num_qubits(self) -> int:
        return self.a_circuit.num_qubits

    def validate(self, tol: float = 1e-12) -> None:
        """Simulate ``A|0>`` and check every ancilla is returned to |0>."""
        state = run(self.a_circuit, zero_state(self.num_qubits))
        for q in self.ancilla_qubits:
            p = prob_one(state, q)
            if p > tol:
                raise ProblemError(f"A leaves ancilla qubit {q} excited (p = {p:.3e})")


@dataclass(frozen=True)
class MLQAESchedule:
    k_max: int
    shots: int = 100

    def __post_init__(self) -> None:
        if self.k_max < 0:
            raise ValueError("k_max must be non-negative")
        if self.shots < 0:
            raise ValueError("shots must be non-negative")

    @property
    def m_values(self) -> tuple[int, ...]:
        return (0,) + tuple(2 ** (k - 1) for k in range(1, self.k_max + 1))


def query_count(schedule: MLQAESchedule) -> int:
    """Total applications of A and its inverse: each shot of ``Q^m A`` costs ``2m + 1``."""
    return sum(schedule.shots * (2 * m + 1) for m in schedule.m_values)


@dataclass
class AmplitudeEstimate:
    theta_hat: float
    hits: tuple[float, ...]
    query_count: int
    # documented error scale only; not estimated from data
    epsilon_target: Optional[float] = None
    a_hat: float = field(init=False)

    def __post_init__(self) -> None:
        self.a_hat = math.sin(self.theta_hat) ** 2


def reflect_flag(problem: AmplitudeProblem) -> Circuit:
    """Sign flip on every basis state with flag = 1 (a bare Z, i.e. ``R_1``)."""
    return Circuit(problem.num_qubits, [cq.phase(1, problem.flag_qubit)])


def reflect_zero(problem: AmplitudeProblem) -> Circuit:
    """Sign flip on the all-zero state of the domain: X-conjugated multi-controlled Z."""
    dom = problem.domain_qubits
    xs = [cq.x(q) for q in dom]
    mcz = cq.phase(1, dom[-1], controls=dom[:-1])
    return Circuit(problem.num_qubits, xs + [mcz] + xs)


def build_grover(problem: AmplitudeProblem) -> Circuit:
    """``Q = A S_0 A^-1 S_chi``, listed in application order (``S_chi`` first)."""
    a = problem.a_circuit
    return cq.compose(reflect_flag(problem), cq.inverse(a), reflect_zero(problem), a)


def flag_probabilities(problem: AmplitudeProblem, m_values: Sequence[int],
                       max_qubits: Optional[int] = None) -> list[float]:
    """Exact flag probability of ``Q^m A|0>`` for each ``m``.

    The state is advanced incrementally, so the cost is set by ``max(m_values)``
    rather than by their sum.
    """
    kwargs = {} if max_qubits is None else {"max_qubits": max_qubits}
    state = run(problem.a_circuit, zero_state(problem.num_qubits, **kwargs))
    grover = build_grover(problem) if any(m_values) else None
    probs: dict[int, float] = {}
    applied = 0
    for m in sorted(set(m_values)):
        while applied < m:
            run(grover, state)
            applied += 1
        probs[m] = prob_one(state, problem.flag_qubit)
    return [probs[m] for m in m_values]


def hits_from_probabilities(probs: Sequence[float], schedule: MLQAESchedule,
                            rng: Optional[RngStream] = None) -> tuple[float, ...]:
    """Binomial hit counts, or expected (fractional) counts when ``rng`` is None."""
    if rng is None:
        return tuple(schedule.shots * p for p in probs)
    return tuple(sample_bernoulli(p, schedule.shots, rng) for p in probs)


def run_schedule(problem: AmplitudeProblem, schedule: MLQAESchedule,
                 rng: Optional[RngStream] = None, exact: bool = False,
                 max_qubits: Optional[int] = None) -> tuple[float, ...]:
    """Hit counts for every circuit ``Q^{m_k} A`` of the schedule.

    One simulation per ``k``; shots are drawn from the exact flag probability.
    ``exact=True`` returns ``shots * p_k`` without sampling.
    """
    if not exact and rng is None:
        raise ValueError("sampled mode needs an RngStream")
    probs = flag_probabilities(problem, schedule.m_values, max_qubits)
    return hits_from_probabilities(probs, schedule, None if exact else rng)


def log_likelihood(theta, hits: Sequence[float], schedule: MLQAESchedule):
    """Log-likelihood of ``theta`` (scalar or array) given per-``k`` hit counts."""
    theta = np.asarray(theta, dtype=float)
    if len(hits) != len(schedule.m_values):
        raise ValueError(f"expected {len(schedule.m_values)} hit counts, got {len(hits)}")
    total = np.zeros_like(theta)
    for m, h in zip(schedule.m_values, hits):
        angle = (2 * m + 1) * theta
        s2 = np.maximum(np.sin(angle) ** 2, _TINY)
        c2 = np.maximum(np.cos(angle) ** 2, _TINY)
        total = total + xlogy(h, s2) + xlogy(schedule.shots - h, c2)
    return total if total.ndim else float(total)


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    inv_phi = (math.sqrt(5) - 1) / 2
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2


def mle_theta(hits: Sequence[float], schedule: MLQAESchedule,
              grid_points: int = GRID_POINTS) -> AmplitudeEstimate:
    lo, hi = THETA_CLAMP, math.pi / 2 - THETA_CLAMP
    grid = np.linspace(lo, hi, grid_points)
    values = log_likelihood(grid, hits, schedule)
    best = int(np.argmax(values))  # first maximum, i.e. smallest theta on ties
    if best == 0 or best == grid_points - 1:
        theta = float(grid[best])
    else:
        bracket_lo, bracket_hi = float(grid[best - 1]), float(grid[best + 1])
        theta = _golden_max(lambda t: log_likelihood(t, hits, schedule),
                            bracket_lo, bracket_hi, GOLDEN_TOL)
        if log_likelihood(theta, hits, schedule) < values[best]:
            theta = float(grid[best])
    return AmplitudeEstimate(theta_hat=theta, hits=tuple(hits), query_count=query_count(schedule))


def estimate(problem: AmplitudeProblem, schedule: MLQAESchedule,
             rng: Optional[RngStream] = None, exact: bool = False) -> AmplitudeEstimate:
    return mle_theta(run_schedule(problem, schedule, rng, exact), schedule)
