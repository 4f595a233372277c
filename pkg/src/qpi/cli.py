"""Command-line driver.

    qpi pi --n 2,3 --kmax 1,5 --reps 100 --seed 7 --out results.csv
    qpi selftest --n 3
    qpi gatecount

Exit codes: 0 success, 1 self-test failure, 2 invalid arguments,
3 problem too large for the memory guard.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import arith
from .circuit import KINDS, Circuit, gate_count
from .pi import BIG_N, PiExperimentConfig, PiLayout, build_R, estimate_pi, memory_estimate
from .selftest import run_selftest
from .statevector import RNG_ALGORITHM, ResourceError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
FLOAT_FMT = "{:.12g}"


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(x)


def _round(x: float) -> float:
    return float(_fmt(x))


@dataclass(frozen=True)
class RunRecord:
    n: int
    rep: int
    kmax: int
    shots: int
    seed: int
    mode: str
    theta_hat: float
    a_hat: float
    pi_hat: float
    queries: int
    qubits: int
    wall_time_ms: float
    # summary rows carry the spread; every row carries the systematic-sampling value
    pi_std: Optional[float] = None
    pi_exact: Optional[float] = None

    def to_row(self) -> list[str]:
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out.append("" if v is None else _fmt(v) if isinstance(v, float) else str(v))
        return out

    @classmethod
    def from_row(cls, row: dict[str, str]) -> RunRecord:
        kwargs = {}
        for f in dataclasses.fields(cls):
            raw = row[f.name]
            if f.name == "mode":
                kwargs[f.name] = raw
            elif f.type in ("int",):
                kwargs[f.name] = int(raw)
            else:
                kwargs[f.name] = None if raw == "" else float(raw)
        return cls(**kwargs)


HEADER = [f.name for f in dataclasses.fields(RunRecord)]


def read_records(text: str) -> list[RunRecord]:
    return [RunRecord.from_row(row) for row in csv.DictReader(io.StringIO(text))]


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or comma list, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpi", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pi", help="estimate pi by maximum-likelihood amplitude estimation")
    p.add_argument("--n", type=_int_list, required=True, help="bits per axis (int or comma list)")
    p.add_argument("--kmax", type=_int_list, default=[1], help="largest schedule index (int or list)")
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--mode", choices=("sampled", "exact"), default="sampled")
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.add_argument("--allow-big", action="store_true", help=f"permit n >= {BIG_N}")

    s = sub.add_parser("selftest", help="exhaustive arithmetic checks")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--inject-fault", action="store_true", help="flip one rotation (negative control)")

    g = sub.add_parser("gatecount", help="per-kind gate counts of every builder")
    g.add_argument("--nmin", type=int, default=2)
    g.add_argument("--nmax", type=int, default=8)
    return parser


def _summary(est, wall_ms: float) -> RunRecord:
    cfg = est.config
    recs = est.records
    return RunRecord(
        n=cfg.n, rep=-1, kmax=cfg.k_max, shots=cfg.shots, seed=cfg.seed, mode=cfg.mode,
        theta_hat=_round(sum(r.theta_hat for r in recs) / len(recs)),
        a_hat=_round(sum(r.a_hat for r in recs) / len(recs)),
        pi_hat=_round(est.mean_pi), queries=est.query_count, qubits=est.qubit_count,
        wall_time_ms=_round(wall_ms), pi_std=_round(est.stddev_pi),
        pi_exact=_round(float(est.classical_exact)),
    )


def pi_records(config: PiExperimentConfig) -> list[RunRecord]:
    est = estimate_pi(config)
    exact = _round(float(est.classical_exact))
    rows = [
        RunRecord(
            n=config.n, rep=r.rep, kmax=config.k_max, shots=config.shots, seed=config.seed,
            mode=config.mode, theta_hat=_round(r.theta_hat), a_hat=_round(r.a_hat),
            pi_hat=_round(r.pi_hat), queries=est.query_count, qubits=est.qubit_count,
            wall_time_ms=_round(r.wall_time_ms), pi_exact=exact,
        )
        for r in est.records
    ]
    rows.append(_summary(est, est.wall_time_ms))
    return rows


def cmd_pi(args, out, err) -> int:
    if any(n < 1 for n in args.n) or any(k < 0 for k in args.kmax) or args.shots < 0 or args.reps < 1:
        err.write("qpi pi: --n must be >= 1, --kmax and --shots >= 0, --reps >= 1\n")
        return EXIT_USAGE
    for n in args.n:
        if n >= BIG_N and not args.allow_big:
            err.write(f"qpi pi: n={n} needs {4 * n + 1} qubits "
                      f"({memory_estimate(n)} bytes of amplitudes); pass --allow-big\n")
            return EXIT_RESOURCE

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    for n in args.n:
        for kmax in args.kmax:
            config = PiExperimentConfig(n=n, k_max=kmax, shots=args.shots, repetitions=args.reps,
                                        seed=args.seed, mode=args.mode, allow_big=args.allow_big)
            try:
                rows = pi_records(config)
            except ResourceError as exc:
                err.write(f"qpi pi: {exc}\n")
                return EXIT_RESOURCE
            for row in rows:
                writer.writerow(row.to_row())
            out.flush()
            summary = rows[-1]
            err.write(f"n={n} kmax={kmax}: pi = {summary.pi_hat:.6f} +/- {summary.pi_std:.6f} "
                      f"(systematic {summary.pi_exact:.6f}, {summary.queries} queries, rng {RNG_ALGORITHM})\n")
    return EXIT_OK


def cmd_selftest(args, out, err) -> int:
    if args.n < 1:
        err.write("qpi selftest: --n must be >= 1\n")
        return EXIT_USAGE
    results = run_selftest(args.n, fault=args.inject_fault)
    out.write(f"{'family':<16} {'cases':>6}  result\n")
    for r in results:
        out.write(f"{r.name:<16} {r.cases:>6}  {'PASS' if r.passed else 'FAIL'}\n")
        for values in r.failures[:10]:
            out.write(f"    mismatch at inputs {values}\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def gatecount_rows(n: int) -> list[tuple[str, int, int, Circuit]]:
    """(builder, input bits, ancilla count, circuit) for each arithmetic builder at size ``n``."""
    l = 2 * n
    a, b, c = range(n), range(n, 2 * n), range(2 * n, 4 * n)
    regs = arith.ArithRegisters(a, b, c)
    sq_b = range(n, 3 * n)
    return [
        ("qft", n, 0, arith.build_qft(range(n))),
        ("qft_adder", n, 0, arith.build_qft_adder(range(n), range(n, 2 * n))),
        ("mul_schoolbook", n, 0, arith.build_mul_schoolbook(regs)),
        ("mul_qft", n, 0, arith.build_mul_qft(regs)),
        ("sq_adder_based", n, 1, arith.build_sq_adder_based(arith.ArithRegisters(a, sq_b, ancilla=3 * n))),
        ("sq_qft", n, 0, arith.build_sq_qft(a, sq_b)),
        ("pi_R", n, l, build_R(PiLayout(n))),
    ]


def cmd_gatecount(args, out, err) -> int:
    if args.nmin < 1 or args.nmax < args.nmin:
        err.write("qpi gatecount: need 1 <= --nmin <= --nmax\n")
        return EXIT_USAGE
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["builder", "n", "qubits", "ancilla", *KINDS, "total"])
    for n in range(args.nmin, args.nmax + 1):
        for name, bits, ancilla, circ in gatecount_rows(n):
            counts = gate_count(circ)
            writer.writerow([name, bits, circ.num_qubits, ancilla,
                             *(counts[k] for k in KINDS), len(circ)])
    return EXIT_OK


COMMANDS = {"pi": cmd_pi, "selftest": cmd_selftest, "gatecount": cmd_gatecount}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    if getattr(args, "out", "-") != "-":
        with open(args.out, "w", newline="") as fh:
            return COMMANDS[args.command](args, fh, err)
    return COMMANDS[args.command](args, out, err)


if __name__ == "__main__":
    sys.exit(main())
