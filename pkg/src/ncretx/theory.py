"""Closed-form retransmission floor for lossless repair of Bernoulli losses.

With per-receiver loss rates p_i over a batch of N packets, the number of
losses L_i at receiver i is Binomial(N, p_i).  Any repair scheme in which
every repair transmission reaches everyone needs at least max_i L_i
transmissions, so the distribution of that maximum is the analytic floor
the schedulers are measured against:

    P[L_i <= j]   binomial CDF per receiver
    Q_j           P[max_i L_i = j], a telescoping product difference
    E[max_i L_i]  sum_j j * Q_j, the expected minimum repair count

The binomial CDF is summed in log space so batches up to 10^4 stay stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TheoryParams:
    receivers: int
    batch: int
    loss_probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.receivers < 1 or self.batch < 1:
            raise ValueError("receivers and batch must be >= 1")
        if len(self.loss_probabilities) != self.receivers:
            raise ValueError("need one loss probability per receiver")
        for p in self.loss_probabilities:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"loss probability {p} outside [0, 1]")

    @classmethod
    def homogeneous(cls, receivers: int, batch: int, p: float) -> "TheoryParams":
        return cls(receivers, batch, (float(p),) * receivers)


def loss_cdf(batch: int, p: float, j: int) -> float:
    """P[L <= j] for L ~ Binomial(batch, p)."""
    if not 0 <= j <= batch:
        raise ValueError(f"j={j} outside 0..{batch}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"loss probability {p} outside [0, 1]")
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 1.0 if j >= batch else 0.0
    if j == batch:
        return 1.0
    log_p, log_q = math.log(p), math.log1p(-p)
    log_terms = [
        math.lgamma(batch + 1) - math.lgamma(c + 1) - math.lgamma(batch - c + 1)
        + c * log_p + (batch - c) * log_q
        for c in range(j + 1)
    ]
    peak = max(log_terms)
    total = peak + math.log(sum(math.exp(t - peak) for t in log_terms))
    return min(1.0, math.exp(total))


def _joint_cdf(params: TheoryParams, j: int) -> float:
    prod = 1.0
    for p in params.loss_probabilities:
        prod *= loss_cdf(params.batch, p, j)
    return prod


def q_j(params: TheoryParams, j: int) -> float:
    """P[max_i L_i = j]: the chance the batch needs exactly j repairs."""
    if not 0 <= j <= params.batch:
        raise ValueError(f"j={j} outside 0..{params.batch}")
    if j == 0:
        return _joint_cdf(params, 0)
    return _joint_cdf(params, j) - _joint_cdf(params, j - 1)


def q_distribution(params: TheoryParams) -> np.ndarray:
    """Q_j for j = 0..N as an array (sums to 1)."""
    joint = np.array([_joint_cdf(params, j) for j in range(params.batch + 1)])
    out = np.empty(params.batch + 1)
    out[0] = joint[0]
    out[1:] = np.diff(joint)
    return out


def expected_min_retx(params: TheoryParams) -> float:
    """E[max_i L_i]: expected minimum number of repair transmissions."""
    q = q_distribution(params)
    return float(np.arange(params.batch + 1) @ q)


def expected_baseline_retx(params: TheoryParams) -> float:
    """Expected repair count for plain one-per-lost-packet ARQ.

    A packet needs a (single, lossless) retransmission iff at least one
    receiver lost it, so the mean is N * (1 - prod_i (1 - p_i)).
    """
    survive = 1.0
    for p in params.loss_probabilities:
        survive *= 1.0 - p
    return params.batch * (1.0 - survive)


def theory_ratio(params: TheoryParams) -> float:
    """Lower-bound retransmission ratio: E[max_i L_i] / E[ARQ repairs].

    Zero when no receiver ever loses anything (no repairs to compare).
    """
    baseline = expected_baseline_retx(params)
    if baseline == 0.0:
        return 0.0
    return expected_min_retx(params) / baseline
