"""TCP backing for :class:`Transport`.

Every pair of parties shares one socket. Party i dials the parties with a
smaller index and accepts the others. Outgoing frames are handed to one
sender thread per peer and incoming frames are drained by one reader thread
per peer, so a ring of simultaneous sends cannot deadlock on full buffers.
"""

import logging
import queue
import socket
import threading
import time

from irismpc import const
from irismpc.core.errors import TransportError
from irismpc.net.transport import Transport, encode_frame, recv_frame

logger = logging.getLogger(__name__)

_STOP = object()


def parse_endpoint(endpoint):
    """'host:port' -> (host, port)."""
    if isinstance(endpoint, (tuple, list)):
        return endpoint[0], int(endpoint[1])
    host, _, port = endpoint.rpartition(":")
    if not host or not port:
        raise ValueError(f"Endpoint must look like host:port, got {endpoint!r}")
    return host, int(port)


def _configure(sock, timeout):
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    sock.settimeout(None)
    return sock


def dial(endpoint, timeout):
    """Connect to ``endpoint``, retrying until ``timeout`` elapses."""
    host, port = parse_endpoint(endpoint)
    deadline = time.monotonic() + timeout
    while True:
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
            return _configure(sock, timeout)
        except OSError as exc:
            if time.monotonic() >= deadline:
                raise TransportError(f"Could not reach {host}:{port}: {exc}") from exc
            time.sleep(0.05)


class TcpTransport(Transport):

    def __init__(self, party_id, sockets, timeout=const.DEFAULT_TIMEOUT):
        super().__init__(party_id, timeout)
        self._sockets = sockets
        self._outboxes = {}
        self._inboxes = {}
        self._threads = []
        self._errors = {}
        for peer, sock in sockets.items():
            self._outboxes[peer] = queue.Queue()
            self._inboxes[peer] = queue.Queue()
            for target in (self._sender, self._reader):
                thread = threading.Thread(target=target, args=(peer, sock), daemon=True,
                                          name=f"party{party_id}-{target.__name__[1:]}-{peer}")
                thread.start()
                self._threads.append(thread)

    @classmethod
    def connect(cls, party_id, endpoints, timeout=const.DEFAULT_TIMEOUT, listener=None):
        """Build the full mesh.

        Args:
            party_id: this party's index
            endpoints: mapping party index -> 'host:port' for all three parties
            timeout: seconds to wait for peers and for each receive
            listener: optional already-bound listening socket for this party

        Returns:
            Connected TcpTransport
        """
        if listener is None:
            listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            listener.bind(parse_endpoint(endpoints[party_id]))
            listener.listen(len(const.PARTY_IDS))
        listener.settimeout(timeout)
        sockets = {}
        try:
            for peer in const.PARTY_IDS:
                if peer < party_id:
                    sock = dial(endpoints[peer], timeout)
                    sock.sendall(bytes([party_id]))
                    sockets[peer] = sock
            while len(sockets) < len(const.PARTY_IDS) - 1:
                conn, addr = listener.accept()
                _configure(conn, timeout)
                hello = conn.recv(1)
                if not hello or hello[0] not in const.PARTY_IDS or hello[0] <= party_id:
                    conn.close()
                    raise TransportError(f"Unexpected peer hello from {addr}")
                sockets[hello[0]] = conn
        except socket.timeout as exc:
            for sock in sockets.values():
                sock.close()
            raise TransportError(f"Party {party_id} timed out building the mesh") from exc
        finally:
            listener.close()
        logger.info("Party %d connected to peers %s", party_id, sorted(sockets))
        return cls(party_id, sockets, timeout)

    def _sender(self, peer, sock):
        outbox = self._outboxes[peer]
        while True:
            frame = outbox.get()
            if frame is _STOP:
                return
            try:
                sock.sendall(frame)
            except OSError as exc:
                self._errors[peer] = exc
                logger.error("Send to party %d failed: %s", peer, exc)
                return

    def _reader(self, peer, sock):
        inbox = self._inboxes[peer]
        while True:
            try:
                inbox.put(recv_frame(sock))
            except (OSError, TransportError) as exc:
                inbox.put(exc)
                return

    def _send(self, to, tag, payload):
        if to in self._errors:
            raise TransportError(f"Channel to party {to} failed: {self._errors[to]}")
        self._outboxes[to].put(encode_frame(tag, payload))

    def _recv(self, frm):
        try:
            item = self._inboxes[frm].get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(f"Timed out after {self.timeout}s waiting for party {frm}") from None
        if isinstance(item, Exception):
            self._inboxes[frm].put(item)
            raise TransportError(f"Channel from party {frm} closed: {item}")
        return item

    def close(self):
        for outbox in self._outboxes.values():
            outbox.put(_STOP)
        for thread in self._threads:
            if thread.name.split("-")[1] == "sender":
                thread.join(timeout=self.timeout)
        for sock in self._sockets.values():
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            sock.close()
