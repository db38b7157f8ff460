"""Retransmission schedulers for single-hop multicast over a lossy batch.

Five algorithms share one contract: take a sampled loss realization and
produce the complete transmission schedule (originals plus repairs) along
with each receiver's decoding state, ending with every packet recovered
everywhere.

  arq           one uncoded multicast retransmission per lost packet
  greedy        XOR sets grown in arrival order under the strict rule that
                every receiver must be able to decode immediately
  sort-utility  the same greedy growth, but seeded in descending order of
                packet utility (receivers still missing the packet)
  rlnc          random linear combinations over GF(2^8) until every
                receiver holds a full-rank system
  benefit       utility-driven coding that deliberately relaxes the strict
                rule: a coded packet may leave some receivers waiting, as
                long as enough receivers benefit now or later

Repairs are lossless (channel contract), so only the N originals consult
the sampled matrix.  Identical inputs always produce identical schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decoder import ReceiverState
from .gf import Gf256Basis
from .model import CodedPacket, IntegrityError, TransmissionMatrix

SCHEDULER_NAMES = ("arq", "greedy", "sort-utility", "benefit", "rlnc")


@dataclass
class Schedule:
    """All transmissions of a run; repairs are everything after the N originals."""

    transmissions: list[CodedPacket]
    retransmission_count: int


@dataclass
class RunResult:
    algorithm: str
    schedule: Schedule
    receivers: list
    matrix: TransmissionMatrix  # final state: fully received, slots as realized
    losses: np.ndarray          # the loss cells the run started from
    coefficients: list[np.ndarray] | None = None  # rlnc coding vectors, one per repair
    audit: list["BenefitAudit"] | None = None     # benefit gate log, one per repair

    @property
    def max_receiver_losses(self) -> int:
        return int(self.losses.sum(axis=1).max())


# ---------------------------------------------------------------- helpers


def _original_packets(matrix: TransmissionMatrix) -> list[CodedPacket]:
    return [CodedPacket(frozenset((k,)), int(matrix.original_slot[k - 1]))
            for k in range(1, matrix.batch + 1)]


def _init_states(matrix: TransmissionMatrix) -> list[ReceiverState]:
    states = [ReceiverState() for _ in range(matrix.receivers)]
    for i, state in enumerate(states, start=1):
        for k in range(1, matrix.batch + 1):
            if not matrix.is_lost(i, k):
                state.receive_original(k, int(matrix.original_slot[k - 1]))
    return states


def _deliver(packet: CodedPacket, states: list[ReceiverState],
             matrix: TransmissionMatrix) -> None:
    # repairs reach every receiver; the matrix tracks what each recovery unlocks
    for i, state in enumerate(states, start=1):
        for k in state.receive(packet):
            matrix.mark_received(i, k)


def _check_recovered(matrix: TransmissionMatrix, algorithm: str) -> None:
    if matrix.lost_cell_count():
        raise IntegrityError(f"{algorithm} finished with unrecovered cells")


def _result(algorithm: str, started_from: np.ndarray, tx: list[CodedPacket],
            states: list, work: TransmissionMatrix, **extra) -> RunResult:
    _check_recovered(work, algorithm)
    schedule = Schedule(tx, len(tx) - work.batch)
    return RunResult(algorithm, schedule, states, work, started_from, **extra)


def _grow_coded_set(cells: np.ndarray, ordered: list[int]) -> list[int]:
    """Extend ordered[0] with later packets while every receiver that misses
    any constituent misses at most one (immediate decodability for all).

    Candidates are tried in the given order; once rejected a packet would be
    rejected against any larger set too, so each acceptance only rescans the
    candidates after it.
    """
    chosen = [ordered[0]]
    misses = cells[:, ordered[0] - 1].astype(np.int64)
    rest = np.array([k - 1 for k in ordered[1:]], dtype=np.intp)
    while rest.size:
        fits = (misses[:, None] + cells[:, rest]).max(axis=0) <= 1
        hits = np.flatnonzero(fits)
        if hits.size == 0:
            break
        col = int(rest[hits[0]])
        chosen.append(col + 1)
        misses = misses + cells[:, col]
        rest = rest[hits[0] + 1:]
    return chosen


# ---------------------------------------------------------------- schedulers


def baseline_arq(matrix: TransmissionMatrix) -> RunResult:
    """Plain ARQ reference: each packet lost anywhere is multicast once more."""
    losses = matrix.cells.copy()
    work = matrix.copy()
    states = _init_states(work)
    tx = _original_packets(work)
    slot = work.batch
    for k in work.lost_columns():
        slot += 1
        packet = CodedPacket(frozenset((k,)), slot)
        tx.append(packet)
        _deliver(packet, states, work)
    return _result("arq", losses, tx, states, work)


def greedy_nc(matrix: TransmissionMatrix) -> RunResult:
    """Grow XOR sets over lost packets in arrival order, strict rule enforced."""
    losses = matrix.cells.copy()
    work = matrix.copy()
    states = _init_states(work)
    tx = _original_packets(work)
    slot = work.batch
    while True:
        lost = work.lost_columns()
        if not lost:
            break
        chosen = _grow_coded_set(work.cells, lost)
        slot += 1
        packet = CodedPacket(frozenset(chosen), slot)
        tx.append(packet)
        _deliver(packet, states, work)
    return _result("greedy", losses, tx, states, work)


def sort_by_utility(matrix: TransmissionMatrix) -> RunResult:
    """Greedy coding seeded by descending packet utility (ties: lower id first).

    The order is fixed once, from post-original utilities; packets whose
    utility hits zero through earlier coded repairs are skipped when their
    turn comes.
    """
    losses = matrix.cells.copy()
    work = matrix.copy()
    states = _init_states(work)
    tx = _original_packets(work)
    slot = work.batch
    order = sorted(work.lost_columns(), key=lambda k: (-work.column_utility(k), k))
    for idx, k in enumerate(order):
        if work.column_utility(k) == 0:
            continue
        rest = [k2 for k2 in order[idx + 1:] if work.column_utility(k2) > 0]
        chosen = _grow_coded_set(work.cells, [k] + rest)
        slot += 1
        packet = CodedPacket(frozenset(chosen), slot)
        tx.append(packet)
        _deliver(packet, states, work)
    return _result("sort-utility", losses, tx, states, work)


class RlncReceiverState:
    """Recovery bookkeeping for a random-linear receiver.

    Packets received as originals are known at their own slot; everything
    else becomes known in the slot where the receiver's coefficient matrix
    first reaches full rank and inversion is possible.
    """

    def __init__(self) -> None:
        self.have: set[int] = set()
        self.recovery_slot: dict[int, int] = {}


def rlnc(matrix: TransmissionMatrix, seed: int = 0) -> RunResult:
    """Random linear coding: repair with uniform GF(2^8) combinations of the
    whole batch until every receiver has N innovative packets."""
    losses = matrix.cells.copy()
    work = matrix.copy()
    m, n = work.receivers, work.batch
    states = [RlncReceiverState() for _ in range(m)]
    bases = [Gf256Basis(n) for _ in range(m)]
    done_slot: list[int | None] = [None] * m

    tx = _original_packets(work)
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            if not work.is_lost(i, k):
                unit = np.zeros(n, dtype=np.uint8)
                unit[k - 1] = 1
                bases[i - 1].insert(unit)
                states[i - 1].have.add(k)
                states[i - 1].recovery_slot[k] = int(work.original_slot[k - 1])
        if bases[i - 1].rank == n:
            done_slot[i - 1] = int(work.original_slot[-1])

    rng = np.random.default_rng(seed)
    slot = n
    coefficients: list[np.ndarray] = []
    while any(b.rank < n for b in bases):
        slot += 1
        vec = rng.integers(0, 256, size=n, dtype=np.uint8)
        while not vec.any():  # an all-zero draw carries nothing; redraw
            vec = rng.integers(0, 256, size=n, dtype=np.uint8)
        coefficients.append(vec)
        tx.append(CodedPacket(frozenset(int(k) + 1 for k in np.flatnonzero(vec)), slot))
        for i in range(m):
            if bases[i].rank < n and bases[i].insert(vec) and bases[i].rank == n:
                done_slot[i] = slot

    for i in range(1, m + 1):
        for k in range(1, n + 1):
            if work.is_lost(i, k):
                states[i - 1].have.add(k)
                states[i - 1].recovery_slot[k] = done_slot[i - 1]  # type: ignore[assignment]
                work.mark_received(i, k)
    return _result("rlnc", losses, tx, states, work, coefficients=coefficients)


# ---------------------------------------------------------------- benefit


@dataclass
class BenefitState:
    """Sender-side state of the benefit scheduler.

    ``prospective`` is the ordered list of packets waiting to be coded
    together (its head is the anchor), ``desired_benefit`` the current
    requirement on how many receivers a coded repair must help now or
    later, relaxed by one per scan cycle.  Cycle 1 interleaves originals
    with repairs; cycles 2..M only rescan outstanding packets.
    """

    prospective: list[int] = field(default_factory=list)
    desired_benefit: int = 0
    cycle: int = 1
    served_as_anchor: set[int] = field(default_factory=set)


@dataclass(frozen=True)
class BenefitAudit:
    """Gate values recorded at the moment a repair was sent."""

    slot: int
    constituents: tuple[int, ...]
    cycle: int
    desired_benefit: int
    decode_benefit: int
    minimum_benefit: int
    combination_benefit: int
    forced: bool = False


def benefit(matrix: TransmissionMatrix,
            initial_desired_benefit: int | None = None) -> RunResult:
    """Utility-driven scheduler that may send repairs not everyone can decode yet.

    The sender keeps an ordered list of prospective coding packets (its head
    is the anchor) and repeatedly either scans an outstanding packet or, in
    the first cycle, transmits the next original.  The scanned/new packet
    joins the prospectives as a coding candidate, which must clear three
    gates before the XOR of the set is sent:

      * every candidate constituent must be decodable by at least one
        receiver from this very transmission (otherwise the newcomer is
        rejected and waits for a different constellation);
      * at least as many receivers must decode something immediately as the
        smallest utility among the constituents (otherwise retransmitting
        that weakest packet uncoded would have been just as good);
      * the number of receivers helped now or later must reach the current
        desired benefit.

    Only the last gate failing stores the candidate as the new prospective
    list.  Each scan cycle after the batch relaxes the desired benefit by
    one, down to 1; anything still missing after that goes out uncoded.
    Lowering the initial desired benefit trades bandwidth for latency.
    """
    run = _BenefitRun(matrix, initial_desired_benefit)
    return run.execute()


class _BenefitRun:
    def __init__(self, matrix: TransmissionMatrix,
                 initial_desired_benefit: int | None):
        self.m = matrix.receivers
        self.n = matrix.batch
        start = self.m if initial_desired_benefit is None else initial_desired_benefit
        if not 1 <= start <= self.m:
            raise ValueError(f"initial desired benefit {start} outside 1..{self.m}")
        self.realized = matrix
        self.losses = matrix.cells.copy()
        # loss outcomes are consumed column by column as originals go out;
        # gates only ever look at already-transmitted packets
        self.work = TransmissionMatrix(matrix.cells.copy(),
                                       np.zeros(self.n, dtype=np.int64))
        self.cells = self.work.cells
        self.cu = self.cells.sum(axis=0).astype(np.int64)  # kept in step with cells
        self.lost_cells = 0  # counts transmitted columns only
        self.states = [ReceiverState() for _ in range(self.m)]
        self.tx: list[CodedPacket] = []
        self.audit: list[BenefitAudit] = []
        self.slot = 0
        self.sent = 0
        self.state = BenefitState(desired_benefit=start)
        # Rejected packets wait before being reconsidered.  A packet turned
        # away because some constituent would reach no receiver stays out
        # until the next repair changes the matrix (growing the set can only
        # lose decoders, never regain them); one turned away by the
        # decode-benefit gate gets another look whenever the set changes.
        self.deferred: set[int] = set()          # only until the set changes
        self.deferred_hard: set[int] = set()     # until the next repair
        # flat flags mirroring served/deferred/prospective for fast scans
        self._blocked = np.zeros(self.n, dtype=bool)
        # per-receiver missing-packet bitmasks (bit k-1 = packet k missing)
        self._row_miss = [
            int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
            for row in self.cells
        ]
        # prospective-set summary, maintained incrementally
        self._pros_mask = 0
        self._pros_min_cu = 0

    def execute(self) -> RunResult:
        nxt = 1
        while True:
            k = self._next_scan_target()
            if k is not None:
                self._consider(self.state.prospective + [k])
            elif self._flush_passing():
                continue
            elif nxt <= self.n:
                self._transmit_original(nxt)
                if int(self.cu[nxt - 1]) >= self.state.desired_benefit:
                    # missed by enough receivers on its own: repair it uncoded
                    # right away, no coding partner search.  A fresh original
                    # sits in no buffer and no prospective set, so this leaves
                    # the coding state untouched.
                    gates = self._read_gates(1 << (nxt - 1), int(self.cu[nxt - 1]))
                    self._transmit_repair([nxt], gates)
                else:
                    self._consider(self.state.prospective + [nxt])
                nxt += 1
            else:
                break
        while self.lost_cells and self.state.desired_benefit > 1:
            self.state.cycle += 1
            self.state.desired_benefit -= 1
            self.state.served_as_anchor = set()
            self._clear_prospective()
            while True:
                k = self._next_scan_target()
                if k is not None:
                    self._consider(self.state.prospective + [k])
                elif not self._flush_passing():
                    break
        if self.lost_cells:
            self._final_sweep()
        return _result("benefit", self.losses, self.tx, self.states, self.work,
                       audit=self.audit)

    # -- scan order --

    def _next_scan_target(self) -> int | None:
        """Outstanding packet to consider next: highest utility, lowest id.

        Cycle 1 scans only packets that are partially missing (1 <= cu < M)
        and have not anchored the prospective list this cycle; later cycles
        scan anything still missing.  Rejected packets wait until the
        prospective list changes again.
        """
        cu = self.cu[:self.sent]
        if self.state.cycle == 1:
            mask = (cu >= 1) & (cu < self.m)
        else:
            mask = cu >= 1
        mask &= ~self._blocked[:self.sent]
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return None
        return int(idx[np.argmax(cu[idx])]) + 1  # argmax ties break low-id

    # -- transmission plumbing --

    def _transmit_original(self, k: int) -> None:
        self.slot += 1
        self.sent = k
        self.work.original_slot[k - 1] = self.slot
        self.tx.append(CodedPacket(frozenset((k,)), self.slot))
        self.lost_cells += int(self.cu[k - 1])
        for i in range(1, self.m + 1):
            if not self.realized.is_lost(i, k):
                for kk in self.states[i - 1].receive_original(k, self.slot):
                    self._mark(i, kk)

    def _transmit_repair(self, ids: list[int], gates: "_Gates",
                         forced: bool = False) -> None:
        self.slot += 1
        packet = CodedPacket(frozenset(ids), self.slot)
        self.tx.append(packet)
        for i, state in enumerate(self.states, start=1):
            for kk in state.receive(packet):
                self._mark(i, kk)
        self.audit.append(BenefitAudit(
            self.slot, tuple(ids), self.state.cycle, self.state.desired_benefit,
            gates.decode_benefit, gates.minimum_benefit,
            gates.combination_benefit, forced))

    def _mark(self, i: int, k: int) -> None:
        if self.cells[i - 1, k - 1]:
            self.cells[i - 1, k - 1] = 0
            self.cu[k - 1] -= 1
            self.lost_cells -= 1
            self._row_miss[i - 1] &= ~(1 << (k - 1))

    # -- gate machinery --

    def _consider(self, candidate: list[int]) -> None:
        # bitmask bookkeeping makes each consideration a handful of popcounts
        newcomer = candidate[-1]
        cand_mask = self._pros_mask | (1 << (newcomer - 1))
        min_cu = int(self.cu[newcomer - 1])
        if len(candidate) > 1:
            min_cu = min(min_cu, self._pros_min_cu)
        gates = self._read_gates(cand_mask, min_cu)
        if gates is None:
            # some constituent would reach no receiver immediately; growing
            # the set only loses decoders, so wait for the next repair
            self.deferred_hard.add(newcomer)
            self._blocked[newcomer - 1] = True
            return
        if gates.decode_benefit < gates.minimum_benefit:
            # coding would not beat retransmitting the weakest constituent
            # uncoded; the newcomer waits for a different constellation
            self.deferred.add(newcomer)
            self._blocked[newcomer - 1] = True
            return
        # keep the candidate either way: a set short of the desired benefit
        # waits for reinforcements, a passing one is still grown until no
        # further packet fits and is then flushed
        self.state.prospective = candidate
        self.state.served_as_anchor.add(candidate[0])
        self._pros_mask = cand_mask
        self._pros_min_cu = min_cu
        self._reset_deferred()

    def _flush_passing(self) -> bool:
        """Transmit the prospective set if it clears all gates; True if sent."""
        pros = self.state.prospective
        if not pros:
            return False
        gates = self._read_gates(self._pros_mask, self._pros_min_cu)
        if gates is None or gates.decode_benefit < gates.minimum_benefit \
                or gates.combination_benefit < self.state.desired_benefit:
            return False
        self._transmit_repair(pros, gates)
        self._clear_prospective()
        return True

    def _read_gates(self, cand_mask: int, min_cu: int) -> "_Gates | None":
        """Gate readings for a candidate, or None if some constituent is not
        immediately decodable by any receiver."""
        dec = 0
        comb = 0
        gain_union = 0
        for row in self._row_miss:
            overlap = row & cand_mask
            if overlap:
                comb += 1
                if not overlap & (overlap - 1):  # single bit: decodes now
                    dec += 1
                    gain_union |= overlap
        if gain_union != cand_mask:
            return None
        return _Gates(decode_benefit=dec, minimum_benefit=min_cu,
                      combination_benefit=comb)

    def _clear_prospective(self) -> None:
        self.state.prospective = []
        self._pros_mask = 0
        self._pros_min_cu = 0
        self.deferred_hard = set()
        self._reset_deferred()

    def _reset_deferred(self) -> None:
        self.deferred = set()
        self._blocked[:] = False
        for k in self.state.served_as_anchor:
            self._blocked[k - 1] = True
        for k in self.state.prospective:
            self._blocked[k - 1] = True
        for k in self.deferred_hard:
            self._blocked[k - 1] = True

    def _final_sweep(self) -> None:
        # desired benefit exhausted: clear the stragglers uncoded
        for k in range(1, self.n + 1):
            if not self.cu[k - 1]:
                continue
            gates = self._read_gates(1 << (k - 1), int(self.cu[k - 1]))
            assert gates is not None  # an outstanding packet always reaches someone
            self._transmit_repair([k], gates, forced=True)


@dataclass(frozen=True)
class _Gates:
    decode_benefit: int
    minimum_benefit: int
    combination_benefit: int


# ---------------------------------------------------------------- dispatch


def run_scheduler(name: str, matrix: TransmissionMatrix, seed: int = 0,
                  initial_desired_benefit: int | None = None) -> RunResult:
    """Run one scheduler by its public name on (a copy of) the given matrix."""
    if name == "arq":
        return baseline_arq(matrix)
    if name == "greedy":
        return greedy_nc(matrix)
    if name == "sort-utility":
        return sort_by_utility(matrix)
    if name == "benefit":
        return benefit(matrix, initial_desired_benefit)
    if name == "rlnc":
        return rlnc(matrix, seed=seed)
    raise ValueError(f"unknown scheduler {name!r}; choose from {', '.join(SCHEDULER_NAMES)}")
