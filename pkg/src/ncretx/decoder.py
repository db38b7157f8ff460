"""Per-receiver XOR decoding: immediate decode, buffering and peeling search.

A receiver reduces every arriving coded packet by the packets it already
holds.  One remaining unknown means immediate recovery; two or more means
the packet waits in a buffer.  Each recovery triggers a search over the
buffer for packets that the new knowledge unlocks, peeling recursively
until nothing changes.  Decoding is symbolic (sets of packet ids); actual
payload bytes follow the same structure and are exercised end to end by
the harness payload check.
"""

from __future__ import annotations

from .model import CodedPacket


class ReceiverState:
    """What one receiver holds: recovered packets plus pending coded packets.

    ``have`` is the set of recovered packet ids, ``recovery_slot`` maps each
    to the slot it became known in, and ``buffer`` keeps the still-unknown
    constituent sets of coded packets that could not be decoded yet (each
    always has at least two unknowns).
    """

    def __init__(self) -> None:
        self.have: set[int] = set()
        self.buffer: list[set[int]] = []
        self.recovery_slot: dict[int, int] = {}

    def receive_original(self, k: int, slot: int) -> list[int]:
        """An original transmission arrived intact."""
        if k in self.have:
            return []
        return self._learn(k, slot)

    def receive(self, packet: CodedPacket) -> list[int]:
        """Process a (losslessly delivered) coded packet.

        Returns every packet id newly recovered, including any unlocked from
        the buffer by the peeling search.
        """
        unknowns = set(packet.constituents) - self.have
        if not unknowns:
            return []  # nothing new in it
        if len(unknowns) == 1:
            return self._learn(unknowns.pop(), packet.slot)
        self.buffer.append(unknowns)
        return []

    def decode_search(self, newly: int, slot: int) -> list[int]:
        """Peel the buffer after ``newly`` became known; returns further recoveries."""
        if newly not in self.have:
            raise ValueError(f"packet {newly} has not been recovered")
        recovered: list[int] = []
        frontier = [newly]
        while frontier:
            known = frontier.pop()
            remaining: list[set[int]] = []
            for unknowns in self.buffer:
                unknowns.discard(known)
                if len(unknowns) == 1:
                    k = unknowns.pop()
                    if k not in self.have:
                        self.have.add(k)
                        self.recovery_slot[k] = slot
                        recovered.append(k)
                        frontier.append(k)
                elif len(unknowns) >= 2:
                    remaining.append(unknowns)
                # sets reduced to zero unknowns carried no new information
            self.buffer = remaining
        return recovered

    def _learn(self, k: int, slot: int) -> list[int]:
        self.have.add(k)
        self.recovery_slot[k] = slot
        return [k] + self.decode_search(k, slot)
