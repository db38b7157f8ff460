"""Monte Carlo experiment engine: parameter sweeps, golden traces, payloads.

Runs replications over a grid of (receiver count, loss rate) points.  All
schedulers at one grid point see the same sampled matrix per replication
(paired comparison), with the plain-ARQ count always computed as the
ratio denominator.  Results come out as CSV rows in a fixed schema:

    algorithm,M,N,p,replication,seed,retransmissions,
    baseline_retransmissions,ratio,ttd_mean,ttd_std

One row per (algorithm, grid point, replication), then per grid point and
algorithm two aggregate rows (replication="mean": averages across runs,
with ttd_std the deviation of per-run means; replication="pooled": all
time-to-decode samples pooled, with the per-packet deviation) and, when
requested, one "theory" row with the analytic floor.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelParams, sample_matrix
from .gf import mat_vec, solve
from .metrics import run_metrics
from .model import CodedPacket, IntegrityError, TransmissionMatrix
from .schedulers import SCHEDULER_NAMES, RunResult, run_scheduler
from .theory import TheoryParams, expected_baseline_retx, expected_min_retx, theory_ratio

CSV_COLUMNS = ("algorithm", "M", "N", "p", "replication", "seed",
               "retransmissions", "baseline_retransmissions", "ratio",
               "ttd_mean", "ttd_std")


class InvariantViolation(RuntimeError):
    """A run broke a guarantee the harness checks; the seed is in the message."""


@dataclass
class ExperimentConfig:
    algorithms: list[str]
    receiver_counts: list[int]
    loss_rates: list[float]
    batch: int
    replications: int = 1000
    base_seed: int = 0
    output_path: str | Path | None = None
    workers: int | None = None  # None: one per CPU; 1: in-process

    def __post_init__(self) -> None:
        for name in self.algorithms:
            if name != "theory" and name not in SCHEDULER_NAMES:
                raise ValueError(f"unknown algorithm {name!r}")
        if self.replications < 1:
            raise ValueError("need at least one replication")

    @property
    def scheduler_names(self) -> list[str]:
        return [a for a in self.algorithms if a != "theory"]

    @property
    def wants_theory(self) -> bool:
        return "theory" in self.algorithms


def replication_seed(base_seed: int, receivers: int, loss: float, batch: int,
                     replication: int) -> int:
    """Stable 64-bit seed for one grid point and replication."""
    tag = f"{base_seed}|{receivers}|{loss:.12g}|{batch}|{replication}"
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=8).digest(), "big")


def _check_run(result: RunResult, baseline: RunResult, seed: int) -> None:
    retx = result.schedule.retransmission_count
    if result.matrix.lost_cell_count():
        raise InvariantViolation(f"{result.algorithm}: unrecovered cells (seed {seed})")
    if retx < result.max_receiver_losses:
        raise InvariantViolation(
            f"{result.algorithm}: {retx} repairs below the per-receiver floor "
            f"{result.max_receiver_losses} (seed {seed})")
    if result.algorithm != "rlnc" and retx > baseline.schedule.retransmission_count:
        raise InvariantViolation(
            f"{result.algorithm}: {retx} repairs exceed the ARQ baseline "
            f"{baseline.schedule.retransmission_count} (seed {seed})")


def run_replication(scheduler_names: list[str], receivers: int, loss: float,
                    batch: int, seed: int) -> list[dict]:
    """All requested schedulers on one shared sampled matrix."""
    params = ChannelParams.homogeneous(receivers, loss, seed)
    matrix = sample_matrix(params, batch)
    baseline = run_scheduler("arq", matrix)
    rows = []
    for name in scheduler_names:
        result = baseline if name == "arq" else run_scheduler(name, matrix, seed=seed)
        _check_run(result, baseline, seed)
        m = run_metrics(result, baseline)
        rows.append({
            "algorithm": name, "M": receivers, "N": batch, "p": loss,
            "seed": seed, "retransmissions": m.retransmissions,
            "baseline_retransmissions": m.baseline_retransmissions,
            "ratio": m.ratio, "ttd_mean": m.ttd_mean, "ttd_std": m.ttd_std,
            "ttd_samples": m.ttd_samples,
        })
    return rows


def _replication_task(args) -> list[dict]:
    names, receivers, loss, batch, seed = args
    return run_replication(names, receivers, loss, batch, seed)


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Execute the sweep; returns the CSV rows and writes them if asked to."""
    grid = [(m, p) for m in config.receiver_counts for p in config.loss_rates]
    tasks = [(config.scheduler_names, m, p, config.batch,
              replication_seed(config.base_seed, m, p, config.batch, r))
             for (m, p) in grid for r in range(config.replications)]

    workers = config.workers
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_task = list(pool.map(_replication_task, tasks, chunksize=16))
    else:
        per_task = [_replication_task(t) for t in tasks]

    rows: list[dict] = []
    reps = config.replications
    for gi, (m, p) in enumerate(grid):
        chunk = per_task[gi * reps:(gi + 1) * reps]
        for r, task_rows in enumerate(chunk):
            for row in task_rows:
                out = dict(row)
                out.pop("ttd_samples")
                out["replication"] = r
                rows.append(out)
        rows.extend(_aggregate_rows(config, m, p, chunk))
        if config.wants_theory:
            rows.append(_theory_row(m, p, config.batch))
    if config.output_path is not None:
        write_csv(rows, config.output_path)
    return rows


def _aggregate_rows(config: ExperimentConfig, receivers: int, loss: float,
                    chunk: list[list[dict]]) -> list[dict]:
    out = []
    for idx, name in enumerate(config.scheduler_names):
        runs = [task_rows[idx] for task_rows in chunk]
        means = [r["ttd_mean"] for r in runs if not math.isnan(r["ttd_mean"])]
        pooled = [s for r in runs for s in r["ttd_samples"]]
        base = {
            "algorithm": name, "M": receivers, "N": config.batch, "p": loss,
            "seed": "",
            "retransmissions": np.mean([r["retransmissions"] for r in runs]),
            "baseline_retransmissions":
                np.mean([r["baseline_retransmissions"] for r in runs]),
            "ratio": np.mean([r["ratio"] for r in runs]),
        }
        out.append(dict(base, replication="mean",
                        ttd_mean=np.mean(means) if means else math.nan,
                        ttd_std=np.std(means) if means else math.nan))
        out.append(dict(base, replication="pooled",
                        ttd_mean=np.mean(pooled) if pooled else math.nan,
                        ttd_std=np.std(pooled) if pooled else math.nan))
    return out


def _theory_row(receivers: int, loss: float, batch: int) -> dict:
    params = TheoryParams.homogeneous(receivers, batch, loss)
    return {
        "algorithm": "theory", "M": receivers, "N": batch, "p": loss,
        "replication": "", "seed": "",
        "retransmissions": expected_min_retx(params),
        "baseline_retransmissions": expected_baseline_retx(params),
        "ratio": theory_ratio(params), "ttd_mean": "", "ttd_std": "",
    }


def _fmt(value) -> str:
    if isinstance(value, float):
        return "" if math.isnan(value) else f"{value:.10g}"
    return str(value)


def write_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


# ---------------------------------------------------------------- figure presets

FIGURE_PRESETS = {
    # retransmission ratio against M at p = 0.5, N = 200
    "fig2": dict(algorithms=["benefit", "sort-utility", "theory"],
                 receiver_counts=list(range(2, 31)), loss_rates=[0.5], batch=200),
    # retransmission ratio against p at M = 10, N = 200
    "fig3": dict(algorithms=["benefit", "sort-utility", "theory"],
                 receiver_counts=[10],
                 loss_rates=[round(0.1 * i, 1) for i in range(1, 10)], batch=200),
    # time to decode against M at p = 0.25, N = 20
    "fig4": dict(algorithms=["benefit", "sort-utility"],
                 receiver_counts=list(range(2, 21)), loss_rates=[0.25], batch=20),
    # time to decode against p at M = 5, N = 20
    "fig5": dict(algorithms=["benefit", "sort-utility"], receiver_counts=[5],
                 loss_rates=[round(0.1 * i, 1) for i in range(1, 10)], batch=20),
}


def figure_config(name: str, out_dir: str | Path, replications: int = 1000,
                  base_seed: int = 0, **overrides) -> ExperimentConfig:
    if name not in FIGURE_PRESETS:
        raise ValueError(f"unknown figure {name!r}; choose from {sorted(FIGURE_PRESETS)}")
    preset = dict(FIGURE_PRESETS[name])
    preset.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(replications=replications, base_seed=base_seed,
                            output_path=Path(out_dir) / f"{name}.csv", **preset)


# ---------------------------------------------------------------- trace replay


def load_matrix(path: str | Path) -> TransmissionMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read matrix file {path}: {exc}") from exc
    return TransmissionMatrix.parse(text)


def trace_run(matrix: TransmissionMatrix, algorithm: str, seed: int = 0,
              emit=print) -> RunResult:
    """Run one scheduler and narrate every slot: transmission, losses, decodes."""
    result = run_scheduler(algorithm, matrix, seed=seed)
    emit(f"matrix: {matrix.receivers} receivers x {matrix.batch} packets, "
         f"{int(matrix.cells.sum())} lost cells; algorithm: {algorithm}")
    events = _decode_events(matrix, result)
    for packet in result.schedule.transmissions:
        if result.algorithm == "rlnc" and packet.slot > matrix.batch:
            head = f"random linear repair over {len(packet.constituents)} packets"
        else:
            head = f"{packet}{_slot_kind(packet, matrix.batch, result)}"
        line = f"slot {packet.slot}: {head}"
        what = events.get(packet.slot)
        if what:
            line += " | " + "; ".join(what)
        emit(line)
    baseline = run_scheduler("arq", matrix)
    metrics = run_metrics(result, baseline)
    tail = f"retransmissions={metrics.retransmissions}"
    if metrics.ttd_samples:
        tail += f" ttd_mean={metrics.ttd_mean:.6g}"
    emit(tail)
    return result


def _slot_kind(packet: CodedPacket, batch: int, result: RunResult) -> str:
    if packet.slot <= batch and result.algorithm != "benefit":
        return ""
    original = packet.is_uncoded and \
        result.matrix.original_slot[next(iter(packet.constituents)) - 1] == packet.slot
    if original:
        return ""
    return " [repair]" if packet.is_uncoded else " [coded repair]"


def _decode_events(matrix: TransmissionMatrix, result: RunResult) -> dict[int, list[str]]:
    events: dict[int, list[str]] = {}
    if result.algorithm == "rlnc":
        for i, state in enumerate(result.receivers, start=1):
            lost = [k for k in range(1, matrix.batch + 1) if matrix.is_lost(i, k)]
            if lost:
                slot = state.recovery_slot[lost[0]]
                events.setdefault(slot, []).append(
                    f"R{i} inverts and decodes {', '.join('c%d' % k for k in lost)}")
        for k in range(1, matrix.batch + 1):
            slot = int(result.matrix.original_slot[k - 1])
            missed = [i for i in range(1, matrix.receivers + 1) if matrix.is_lost(i, k)]
            if missed:
                events.setdefault(slot, []).insert(
                    0, "lost at " + ", ".join(f"R{i}" for i in missed))
        return events
    for i, state in enumerate(result.receivers, start=1):
        by_slot: dict[int, list[int]] = {}
        for k in range(1, matrix.batch + 1):
            if matrix.is_lost(i, k):
                by_slot.setdefault(state.recovery_slot[k], []).append(k)
        for slot, ks in by_slot.items():
            events.setdefault(slot, []).append(
                f"R{i} decodes " + ", ".join(f"c{k}" for k in sorted(ks)))
    for k in range(1, matrix.batch + 1):
        slot = int(result.matrix.original_slot[k - 1])
        missed = [i for i in range(1, matrix.receivers + 1) if matrix.is_lost(i, k)]
        if missed:
            events.setdefault(slot, []).insert(
                0, "lost at " + ", ".join(f"R{i}" for i in missed))
    for slot in events:
        events[slot].sort(key=lambda s: (not s.startswith("lost"), s))
    return events


# ---------------------------------------------------------------- payload check


class PayloadMismatch(IntegrityError):
    def __init__(self, receiver: int, packet: int):
        super().__init__(f"receiver {receiver} reconstructed packet {packet} wrong")
        self.receiver = receiver
        self.packet = packet


def payload_check(matrix: TransmissionMatrix, algorithm: str,
                  payload_len: int = 64, seed: int = 0) -> None:
    """End-to-end byte check: schedule the run, then push real random payloads
    through it and verify every receiver reconstructs every packet exactly.

    Raises PayloadMismatch naming the first (receiver, packet) that differs.
    """
    if payload_len < 1:
        raise ValueError("payload length must be >= 1")
    result = run_scheduler(algorithm, matrix, seed=seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xB0, 1)))
    payloads = rng.integers(0, 256, size=(matrix.batch, payload_len), dtype=np.uint8)
    if algorithm == "rlnc":
        recovered = _rlnc_payload_replay(matrix, result, payloads)
    else:
        recovered = _xor_payload_replay(matrix, result, payloads)
    for i, got in enumerate(recovered, start=1):
        for k in range(1, matrix.batch + 1):
            if k not in got or not np.array_equal(got[k], payloads[k - 1]):
                raise PayloadMismatch(i, k)


def _xor_payload_replay(matrix: TransmissionMatrix, result: RunResult,
                        payloads: np.ndarray) -> list[dict[int, np.ndarray]]:
    # independent byte-level decoder: known payloads plus reduced pending ones
    known: list[dict[int, np.ndarray]] = [{} for _ in range(matrix.receivers)]
    pending: list[list[tuple[set[int], np.ndarray]]] = [[] for _ in range(matrix.receivers)]

    def learn(i0: int, k: int, data: np.ndarray) -> None:
        if k in known[i0]:
            return
        known[i0][k] = data
        queue = [k]
        while queue:
            kk = queue.pop()
            keep = []
            for unknowns, residue in pending[i0]:
                if kk in unknowns:
                    unknowns.discard(kk)
                    residue = residue ^ known[i0][kk]
                if len(unknowns) == 1:
                    last = unknowns.pop()
                    if last not in known[i0]:
                        known[i0][last] = residue
                        queue.append(last)
                elif len(unknowns) >= 2:
                    keep.append((unknowns, residue))
            pending[i0] = keep

    for packet in result.schedule.transmissions:
        is_original = packet.is_uncoded and int(
            result.matrix.original_slot[next(iter(packet.constituents)) - 1]) == packet.slot
        wire = np.zeros(payloads.shape[1], dtype=np.uint8)
        for k in packet.constituents:
            wire = wire ^ payloads[k - 1]
        for i0 in range(matrix.receivers):
            if is_original and matrix.cells[i0, next(iter(packet.constituents)) - 1]:
                continue  # the original was lost at this receiver
            unknowns = {k for k in packet.constituents if k not in known[i0]}
            residue = wire.copy()
            for k in packet.constituents:
                if k in known[i0]:
                    residue ^= known[i0][k]
            if len(unknowns) == 1:
                learn(i0, unknowns.pop(), residue)
            elif len(unknowns) >= 2:
                pending[i0].append((unknowns, residue))
    return known


def _rlnc_payload_replay(matrix: TransmissionMatrix, result: RunResult,
                         payloads: np.ndarray) -> list[dict[int, np.ndarray]]:
    # each receiver keeps the first N innovative rows it hears, then inverts
    from .gf import Gf256Basis
    n = matrix.batch
    out: list[dict[int, np.ndarray]] = []
    for i in range(1, matrix.receivers + 1):
        basis = Gf256Basis(n)
        rows: list[np.ndarray] = []
        rhs: list[np.ndarray] = []

        def feed(row: np.ndarray, data: np.ndarray) -> None:
            if len(rows) < n and basis.insert(row):
                rows.append(row)
                rhs.append(data)

        for k in range(1, n + 1):
            if not matrix.is_lost(i, k):
                unit = np.zeros(n, dtype=np.uint8)
                unit[k - 1] = 1
                feed(unit, payloads[k - 1])
        for vec in result.coefficients or []:
            if len(rows) == n:
                break
            feed(vec, mat_vec(payloads.T, vec))
        if len(rows) < n:
            raise IntegrityError(
                f"receiver {i} never collected {n} innovative packets")
        decoded = solve(np.array(rows, dtype=np.uint8), np.array(rhs, dtype=np.uint8))
        out.append({k: decoded[k - 1] for k in range(1, n + 1)})
    return out
