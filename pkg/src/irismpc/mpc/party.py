"""Per-party protocol state and the in-process three-party runner."""

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from irismpc import const
from irismpc.core.errors import LeakageError, TransportError
from irismpc.core.randomness import Prf, deal_seeds
from irismpc.net.ledger import PartyId
from irismpc.net.transport import InProcessNetwork

logger = logging.getLogger(__name__)


@dataclass
class GateStats:
    """AND gates evaluated (one per lane), rounds, and bits sent by this party."""

    and_gates: int = 0
    rounds: int = 0
    bits_sent: int = 0

    def __add__(self, other):
        return GateStats(self.and_gates + other.and_gates, self.rounds + other.rounds,
                         self.bits_sent + other.bits_sent)


class Party:
    """State of one party: identity, transport, PRFs and instrumentation.

    Not thread-safe; each party runs in its own execution context.
    """

    def __init__(self, party_id, transport, seeds, debug=False):
        self.pid = PartyId(party_id)
        self.transport = transport
        self.prf_own = Prf(seeds.seed_own)
        self.prf_prev = Prf(seeds.seed_prev)
        self.debug = debug
        self.gates = defaultdict(GateStats)
        self.macs = 0
        self.open_hooks = []
        self._phase = "setup"

    @property
    def id(self):
        return self.pid.index

    @property
    def next_id(self):
        return self.pid.next.index

    @property
    def prev_id(self):
        return self.pid.prev.index

    @property
    def ledger(self):
        return self.transport.ledger

    @property
    def current_phase(self):
        return self._phase

    @contextmanager
    def phase(self, name):
        outer = self._phase
        self._phase = name
        if name != outer:
            logger.debug("Party %d enters phase %s", self.id, name)
        try:
            yield self
        finally:
            self._phase = outer

    def send(self, to, payload):
        self.transport.send(to, payload, self._phase)

    def recv(self, frm):
        return self.transport.recv(frm, self._phase)

    def round_barrier(self):
        self.transport.round_barrier(self._phase)

    def reshare(self, payload):
        """Send to the next party and receive from the previous one: one round."""
        self.send(self.next_id, payload)
        received = self.recv(self.prev_id)
        self.round_barrier()
        return received

    def zero_share(self, ring, shape):
        """Share of zero: F(seed_own) - F(seed_prev) sums to 0 over the parties."""
        return ring.sub(self.prf_own.draw(ring, shape, "zero"),
                        self.prf_prev.draw(ring, shape, "zero"))

    def zero_bits(self, shape):
        return self.prf_own.draw_words(shape, "zero-bits") ^ self.prf_prev.draw_words(shape, "zero-bits")

    def record_gates(self, and_gates, rounds, bits_sent):
        self.gates[self._phase] += GateStats(and_gates, rounds, bits_sent)

    def gate_totals(self):
        total = GateStats()
        for stats in self.gates.values():
            total = total + stats
        return total

    def authorize_open(self, kind, count):
        """Run open hooks; per-row opens are only legal in debug mode."""
        for hook in self.open_hooks:
            hook(self.id, kind, count)
        if kind != "aggregate" and not self.debug:
            raise LeakageError(f"Refusing to open {count} {kind} value(s) outside debug mode")


@dataclass
class PartyRun:
    results: dict
    parties: dict = field(repr=False)

    def ledger(self, party_id):
        return self.parties[party_id].ledger

    def max_bytes(self, phase=None):
        return max(p.ledger.bytes_sent(phase) for p in self.parties.values())

    def rounds(self, phase=None, party_id=1):
        return self.parties[party_id].ledger.rounds(phase)


def make_parties(network=None, seeds=None, rng=None, debug=False, timeout=const.DEFAULT_TIMEOUT):
    network = network or InProcessNetwork(timeout)
    seeds = seeds or deal_seeds(rng if rng is not None else np.random.default_rng())
    return network, {i: Party(i, network.transport(i), seeds[i], debug=debug) for i in const.PARTY_IDS}


def run_parties(target, inputs=None, seeds=None, rng=None, debug=False,
                timeout=const.DEFAULT_TIMEOUT, parties=None, network=None):
    """Run ``target(party[, inputs[i]])`` for parties 1..3 on three threads.

    If one party raises, the network is aborted so the others fail fast; the
    root-cause exception is re-raised. Parties passed in without their network
    have their transports closed instead.

    Returns:
        PartyRun with per-party results and the Party objects
    """
    if parties is None:
        network, parties = make_parties(network, seeds, rng, debug, timeout)

    def abort():
        if network is not None:
            network.abort()
        else:
            for party in parties.values():
                party.transport.close()

    def guarded(i):
        try:
            if inputs is None:
                return target(parties[i])
            return target(parties[i], inputs[i])
        except Exception:
            abort()
            raise

    results, errors = {}, {}
    with ThreadPoolExecutor(max_workers=len(const.PARTY_IDS)) as pool:
        futures = {i: pool.submit(guarded, i) for i in const.PARTY_IDS}
        for i, future in futures.items():
            try:
                results[i] = future.result()
            except Exception as exc:
                errors[i] = exc
    if errors:
        root = [e for e in errors.values() if not isinstance(e, TransportError)]
        raise (root or list(errors.values()))[0]
    return PartyRun(results, parties)
