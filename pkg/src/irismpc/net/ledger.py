"""Party identities and per-phase communication counters."""

from dataclasses import asdict, dataclass

from irismpc import const


@dataclass(frozen=True)
class PartyId:
    index: int

    def __post_init__(self):
        if self.index not in const.PARTY_IDS:
            raise ValueError(f"Party index must be one of {const.PARTY_IDS}, got {self.index}")

    @property
    def next(self):
        return PartyId(self.index % 3 + 1)

    @property
    def prev(self):
        return self.next.next

    def __int__(self):
        return self.index


@dataclass
class PhaseCounters:
    bytes_sent: int = 0
    bytes_received: int = 0
    messages_sent: int = 0
    rounds: int = 0


class CommLedger:
    """Payload bytes, messages and rounds per protocol phase.

    Framing headers are not counted.
    """

    def __init__(self):
        self._phases = {phase: PhaseCounters() for phase in const.PHASES}

    def _counters(self, phase):
        try:
            return self._phases[phase]
        except KeyError:
            raise ValueError(f"Unknown phase: {phase}") from None

    def record_send(self, phase, nbytes):
        counters = self._counters(phase)
        counters.bytes_sent += nbytes
        counters.messages_sent += 1

    def record_recv(self, phase, nbytes):
        self._counters(phase).bytes_received += nbytes

    def record_round(self, phase):
        self._counters(phase).rounds += 1

    def phase(self, phase):
        return self._counters(phase)

    def bytes_sent(self, phase=None):
        if phase is not None:
            return self._counters(phase).bytes_sent
        return sum(c.bytes_sent for c in self._phases.values())

    def bytes_received(self, phase=None):
        if phase is not None:
            return self._counters(phase).bytes_received
        return sum(c.bytes_received for c in self._phases.values())

    def rounds(self, phase=None):
        if phase is not None:
            return self._counters(phase).rounds
        return sum(c.rounds for c in self._phases.values())

    def as_dict(self):
        return {phase: asdict(counters) for phase, counters in self._phases.items()}

    def reset(self):
        for phase in self._phases:
            self._phases[phase] = PhaseCounters()
