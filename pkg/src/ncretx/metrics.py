"""Run evaluation: retransmission ratio and time-to-decode statistics.

Time to decode is measured per originally-lost cell as the number of slots
between the packet's own original transmission and the slot the receiver
recovered it in; packets received first time contribute nothing.  The
standard deviation is the population form (divide by n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import IntegrityError
from .schedulers import RunResult, Schedule


@dataclass
class TtdStats:
    samples: list[int]  # one per originally-lost cell, (receiver, packet) order
    mean: float
    std: float


@dataclass
class RunMetrics:
    retransmissions: int
    baseline_retransmissions: int
    ratio: float
    ttd_samples: list[int]
    ttd_mean: float
    ttd_std: float


def retransmission_ratio(run: Schedule, baseline: Schedule) -> float:
    """Repairs used by a scheduler over repairs used by plain ARQ (0/0 -> 0)."""
    if baseline.retransmission_count == 0:
        return 0.0
    return run.retransmission_count / baseline.retransmission_count


def time_to_decode(losses: np.ndarray, original_slot: np.ndarray,
                   receivers) -> TtdStats:
    """Slot deltas from lost original to recovery, per cell, with mean/std.

    Raises IntegrityError if any originally-lost cell was never recovered
    (full recovery is guaranteed by every scheduler, so this only fires on
    corrupted inputs).
    """
    samples: list[int] = []
    for i0, row in enumerate(np.asarray(losses)):
        recovered = receivers[i0].recovery_slot
        for k0 in np.flatnonzero(row):
            slot = recovered.get(k0 + 1)
            if slot is None:
                raise IntegrityError(
                    f"receiver {i0 + 1} never recovered packet {k0 + 1}")
            samples.append(int(slot) - int(original_slot[k0]))
    if samples:
        mean = float(np.mean(samples))
        std = float(np.std(samples))
    else:
        mean = math.nan
        std = math.nan
    return TtdStats(samples, mean, std)


def run_metrics(result: RunResult, baseline: RunResult) -> RunMetrics:
    """Bundle the two evaluation quantities for one completed run."""
    ttd = time_to_decode(result.losses, result.matrix.original_slot,
                         result.receivers)
    return RunMetrics(
        retransmissions=result.schedule.retransmission_count,
        baseline_retransmissions=baseline.schedule.retransmission_count,
        ratio=retransmission_ratio(result.schedule, baseline.schedule),
        ttd_samples=ttd.samples,
        ttd_mean=ttd.mean,
        ttd_std=ttd.std,
    )
