"""Quarter-circle Monte Carlo estimate of pi on a 4n+1 qubit circuit.

Layout (LSB first within each register)::

    x       qubits 0 .. n-1
    y       qubits n .. 2n-1
    ancilla qubits 2n .. 4n-1   (low 2n bits of the accumulator)
    flag    qubit  4n           (top bit of the accumulator)

``P`` puts x and y in uniform superposition. ``R`` squares x and y into the
(2n+1)-bit accumulator, whose top bit is then set iff x^2 + y^2 >= 4^n; an X
turns that into the inside-the-circle indicator, and subtracting y^2 and x^2
from the 2n ancilla bits alone clears them again.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import circuit as cq
from .arith import build_sq_qft
from .circuit import Circuit
from .mlqae import (
    AmplitudeProblem,
    MLQAESchedule,
    flag_probabilities,
    hits_from_probabilities,
    mle_theta,
    query_count,
)
from .statevector import MAX_QUBITS, RngStream, ResourceError, state_bytes

BIG_N = 6  # first size that needs an explicit opt-in


@dataclass(frozen=True)
class PiLayout:
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")

    @property
    def x_reg(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def y_reg(self) -> tuple[int, ...]:
        return tuple(range(self.n, 2 * self.n))

    @property
    def ancilla(self) -> tuple[int, ...]:
        return tuple(range(2 * self.n, 4 * self.n))

    @property
    def flag(self) -> int:
        return 4 * self.n

    @property
    def accumulator(self) -> tuple[int, ...]:
        return self.ancilla + (self.flag,)

    @property
    def num_qubits(self) -> int:
        return 4 * self.n + 1

    def registers(self) -> dict[str, tuple[int, ...]]:
        return {"x": self.x_reg, "y": self.y_reg, "ancilla": self.ancilla, "flag": (self.flag,)}


def f_xy(x: int, y: int, n: int) -> int:
    """1 if the lattice point (x, y) lies strictly inside the radius-2^n quarter circle."""
    if not (0 <= x < 2**n and 0 <= y < 2**n):
        raise ValueError(f"({x}, {y}) outside the {2**n}x{2**n} lattice")
    return int(x * x + y * y < 4**n)


@lru_cache(maxsize=None)
def lattice_count(n: int) -> int:
    side = 2**n
    return sum(f_xy(x, y, n) for x in range(side) for y in range(side))


def exact_fraction(n: int) -> Fraction:
    """Fraction of the 4^n lattice points inside the quarter circle (systematic sampling)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(lattice_count(n), 4**n)


def build_P(layout: PiLayout) -> Circuit:
    gates = [cq.h(q) for q in layout.x_reg + layout.y_reg]
    return Circuit(layout.num_qubits, gates, layout.registers())


def build_R(layout: PiLayout) -> Circuit:
    width = layout.num_qubits
    acc, anc = layout.accumulator, layout.ancilla
    sq_x = build_sq_qft(layout.x_reg, acc, width)
    sq_y = build_sq_qft(layout.y_reg, acc, width)
    flip = Circuit(width, [cq.x(layout.flag)])
    clear_y = cq.inverse(build_sq_qft(layout.y_reg, anc, width))
    clear_x = cq.inverse(build_sq_qft(layout.x_reg, anc, width))
    gates = sq_x.gates + sq_y.gates + flip.gates + clear_y.gates + clear_x.gates
    return Circuit(width, gates, layout.registers())


def build_A(layout: PiLayout) -> Circuit:
    return cq.compose(build_P(layout), build_R(layout))


def make_problem(layout: PiLayout) -> AmplitudeProblem:
    return AmplitudeProblem(
        a_circuit=build_A(layout),
        domain_qubits=layout.x_reg + layout.y_reg + (layout.flag,),
        flag_qubit=layout.flag,
        ancilla_qubits=layout.ancilla,
    )


@dataclass(frozen=True)
class PiExperimentConfig:
    n: int
    k_max: int = 1
    shots: int = 100
    repetitions: int = 100
    seed: int = 0
    mode: str = "sampled"
    allow_big: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.k_max < 0 or self.shots < 0:
            raise ValueError("k_max and shots must be non-negative")
        if self.mode not in ("sampled", "exact"):
            raise ValueError(f"mode must be 'sampled' or 'exact', not {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def schedule(self) -> MLQAESchedule:
        return MLQAESchedule(self.k_max, self.shots)


@dataclass
class RepetitionRecord:
    rep: int
    theta_hat: float
    a_hat: float
    pi_hat: float
    hits: tuple[float, ...]
    stream_id: int
    wall_time_ms: float = 0.0


@dataclass
class PiEstimate:
    config: PiExperimentConfig
    records: list[RepetitionRecord]
    mean_pi: float
    stddev_pi: float
    classical_exact: Fraction
    query_count: int
    qubit_count: int
    flag_probabilities: tuple[float, ...] = ()
    # lattice discretisation error scale, O(1/2^n); documentation only
    epsilon_sampling: float = field(default=0.0)
    wall_time_ms: float = 0.0


def check_capacity(n: int, allow_big: bool = False) -> None:
    qubits = 4 * n + 1
    if n >= BIG_N and not allow_big:
        raise ResourceError(qubits, 4 * (BIG_N - 1) + 1)
    if qubits > MAX_QUBITS:
        raise ResourceError(qubits, MAX_QUBITS)


def estimate_pi(config: PiExperimentConfig) -> PiEstimate:
    """Run ``config.repetitions`` independent amplitude estimations of pi/4.

    The circuit is deterministic, so the flag probability of each ``Q^{m_k} A``
    is simulated once and shared by every repetition; repetition ``r`` draws
    its shots from RNG substream ``r``.
    """
    check_capacity(config.n, config.allow_big)
    start = time.perf_counter()
    layout = PiLayout(config.n)
    schedule = config.schedule
    probs = flag_probabilities(make_problem(layout), schedule.m_values, max_qubits=MAX_QUBITS)

    records = []
    for rep in range(config.repetitions):
        t0 = time.perf_counter()
        rng = None if config.mode == "exact" else RngStream(config.seed, rep)
        hits = hits_from_probabilities(probs, schedule, rng)
        est = mle_theta(hits, schedule)
        records.append(RepetitionRecord(
            rep=rep, theta_hat=est.theta_hat, a_hat=est.a_hat, pi_hat=4 * est.a_hat,
            hits=hits, stream_id=rep, wall_time_ms=1000 * (time.perf_counter() - t0),
        ))

    pis = [r.pi_hat for r in records]
    mean = math.fsum(pis) / len(pis)
    std = math.sqrt(math.fsum((p - mean) ** 2 for p in pis) / (len(pis) - 1)) if len(pis) > 1 else 0.0
    return PiEstimate(
        config=config,
        records=records,
        mean_pi=mean,
        stddev_pi=std,
        classical_exact=4 * exact_fraction(config.n),
        query_count=query_count(schedule),
        qubit_count=layout.num_qubits,
        flag_probabilities=tuple(probs),
        epsilon_sampling=2.0 ** -config.n,
        wall_time_ms=1000 * (time.perf_counter() - start),
    )


def memory_estimate(n: int) -> int:
    """Bytes for the statevector of the n-bit pi circuit."""
    return state_bytes(4 * n + 1)
