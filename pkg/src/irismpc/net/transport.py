"""Framed point-to-point messaging between the three parties.

Frames are a 4-byte big-endian payload length, a 1-byte phase tag and the
payload. The ledger is updated by :class:`Transport` itself, so every backing
produces the same counts for the same protocol trace.
"""

import logging
import queue
import struct
import threading
from abc import ABC, abstractmethod

from irismpc import const
from irismpc.core.errors import TransportError
from irismpc.net.ledger import CommLedger, PartyId

logger = logging.getLogger(__name__)

FRAME_HEADER = struct.Struct(">IB")
PHASE_TAGS = {phase: i for i, phase in enumerate(const.PHASES)}

_ABORT = object()


def encode_frame(tag, payload):
    return FRAME_HEADER.pack(len(payload), tag) + payload


def send_frame(sock, tag, payload):
    sock.sendall(encode_frame(tag, payload))


def recv_exact(sock, n):
    chunks = []
    remaining = n
    while remaining:
        chunk = sock.recv(min(remaining, 1 << 20))
        if not chunk:
            raise TransportError("Peer closed the connection")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def recv_frame(sock):
    length, tag = FRAME_HEADER.unpack(recv_exact(sock, FRAME_HEADER.size))
    return tag, recv_exact(sock, length) if length else b""


class Transport(ABC):
    """Messaging endpoint of one party."""

    def __init__(self, party_id, timeout=const.DEFAULT_TIMEOUT):
        self.party = PartyId(party_id)
        self.timeout = timeout
        self.ledger = CommLedger()

    def _check_peer(self, peer):
        peer = PartyId(int(peer))
        if peer == self.party:
            raise ValueError(f"Party {self.party.index} cannot message itself")
        return peer

    def send(self, to, payload, phase):
        to = self._check_peer(to)
        self._send(to.index, PHASE_TAGS[phase], bytes(payload))
        self.ledger.record_send(phase, len(payload))
        logger.debug("Party %d sent %d bytes to party %d in %s",
                     self.party.index, len(payload), to.index, phase)

    def recv(self, frm, phase):
        frm = self._check_peer(frm)
        tag, payload = self._recv(frm.index)
        if tag != PHASE_TAGS[phase]:
            raise TransportError(
                f"Party {self.party.index} expected a {phase} frame from {frm.index}, "
                f"got {const.PHASES[tag] if tag < len(const.PHASES) else tag}"
            )
        self.ledger.record_recv(phase, len(payload))
        return payload

    def round_barrier(self, phase):
        self.ledger.record_round(phase)
        logger.debug("Party %d finished %s round %d", self.party.index, phase, self.ledger.rounds(phase))

    @abstractmethod
    def _send(self, to, tag, payload):
        pass

    @abstractmethod
    def _recv(self, frm):
        pass

    def close(self):
        pass


class InProcessNetwork:
    """Six directed queues connecting three in-process parties."""

    def __init__(self, timeout=const.DEFAULT_TIMEOUT):
        self.timeout = timeout
        self.aborted = threading.Event()
        self._queues = {(a, b): queue.Queue()
                        for a in const.PARTY_IDS for b in const.PARTY_IDS if a != b}

    def transport(self, party_id):
        return InProcessTransport(party_id, self)

    def channel(self, frm, to):
        return self._queues[(frm, to)]

    def abort(self):
        """Wake every blocked receiver with a TransportError."""
        self.aborted.set()
        for q in self._queues.values():
            q.put(_ABORT)


class InProcessTransport(Transport):

    def __init__(self, party_id, network):
        super().__init__(party_id, network.timeout)
        self.network = network

    def _send(self, to, tag, payload):
        if self.network.aborted.is_set():
            raise TransportError("In-process network was aborted")
        self.network.channel(self.party.index, to).put((tag, payload))

    def _recv(self, frm):
        try:
            item = self.network.channel(frm, self.party.index).get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(f"Timed out after {self.timeout}s waiting for party {frm}") from None
        if item is _ABORT:
            raise TransportError("In-process network was aborted")
        return item
