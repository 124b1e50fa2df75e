import socket
import struct
import threading
import unittest

import numpy as np

from irismpc import const
from irismpc.core.errors import TransportError
from irismpc.core.randomness import deal_seeds
from irismpc.mpc.binary import msb, or_tree
from irismpc.mpc.party import Party, run_parties
from irismpc.mpc.replicated import open_bits_to, share
from irismpc.net.tcp import TcpTransport, parse_endpoint
from irismpc.net.transport import InProcessNetwork

SEQ = struct.Struct(">I")


def _ring_exchange(transports, phase="dot"):
    """Every party sends its id to the next party and reads from the previous one."""
    for i, t in transports.items():
        t.send(i % 3 + 1, bytes([i]) * 10, phase)
    received = {}
    for i, t in transports.items():
        received[i] = t.recv((i + 1) % 3 + 1, phase)
        t.round_barrier(phase)
    return received


def _tcp_mesh(timeout=5.0):
    """Connected TcpTransports for parties 1..3 over ephemeral loopback ports."""
    listeners, endpoints = {}, {}
    for i in const.PARTY_IDS:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind(("127.0.0.1", 0))
        sock.listen(3)
        listeners[i] = sock
        endpoints[i] = f"127.0.0.1:{sock.getsockname()[1]}"
    transports, errors = {}, []

    def connect(i):
        try:
            transports[i] = TcpTransport.connect(i, endpoints, timeout, listeners[i])
        except Exception as exc:
            errors.append(exc)

    threads = [threading.Thread(target=connect, args=(i,)) for i in const.PARTY_IDS]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join(timeout=2 * timeout)
    if errors:
        raise errors[0]
    return transports


def _fifo_audit(transports, count, rng):
    """Send ``count`` numbered payloads on every directed channel, then check order and content."""
    sent = {}
    for i, t in transports.items():
        for peer in const.PARTY_IDS:
            if peer == i:
                continue
            sizes = rng.integers(0, 48, size=count)
            payloads = [SEQ.pack(seq) + rng.bytes(int(size)) for seq, size in enumerate(sizes)]
            for payload in payloads:
                t.send(peer, payload, "dot")
            sent[(i, peer)] = payloads
    mismatches = 0
    for i, t in transports.items():
        for peer in const.PARTY_IDS:
            if peer == i:
                continue
            for seq, expected in enumerate(sent[(peer, i)]):
                got = t.recv(peer, "dot")
                if SEQ.unpack(got[:SEQ.size])[0] != seq or got != expected:
                    mismatches += 1
    return sent, mismatches


def _trace(party, x):
    """A short protocol: sign bits, their OR, opened to party 1."""
    with party.phase("msb"):
        bits = msb(party, x)
    with party.phase("or_tree"):
        any_bit = or_tree(party, bits)
    return open_bits_to(party, any_bit, 1)


class TestInProcessTransport(unittest.TestCase):
    """Queues between three in-process parties."""

    def setUp(self):
        self.rng = np.random.default_rng(7)
        self.network = InProcessNetwork(timeout=2.0)
        self.transports = {i: self.network.transport(i) for i in const.PARTY_IDS}

    def test_ring_exchange_and_ledger(self):
        received = _ring_exchange(self.transports)
        self.assertEqual(received[2], bytes([1]) * 10)
        self.assertEqual(received[1], bytes([3]) * 10)
        for t in self.transports.values():
            self.assertEqual(t.ledger.bytes_sent("dot"), 10)
            self.assertEqual(t.ledger.bytes_received("dot"), 10)
            self.assertEqual(t.ledger.rounds("dot"), 1)

    def test_phase_tag_mismatch(self):
        self.transports[1].send(2, b"x", "msb")
        with self.assertRaises(TransportError):
            self.transports[2].recv(1, "lift")

    def test_self_message(self):
        with self.assertRaises(ValueError):
            self.transports[1].send(1, b"x", "dot")

    def test_timeout(self):
        network = InProcessNetwork(timeout=0.05)
        with self.assertRaises(TransportError):
            network.transport(1).recv(2, "dot")

    def test_abort_wakes_receivers(self):
        errors = []

        def wait():
            try:
                self.transports[2].recv(1, "dot")
            except TransportError as exc:
                errors.append(exc)

        thread = threading.Thread(target=wait)
        thread.start()
        self.network.abort()
        thread.join(timeout=2.0)
        self.assertEqual(len(errors), 1)
        with self.assertRaises(TransportError):
            self.transports[1].send(2, b"x", "dot")

    def test_sends_and_rounds_are_logged(self):
        with self.assertLogs("irismpc.net.transport", level="DEBUG") as logs:
            _ring_exchange(self.transports, "msb")
        self.assertIn("Party 1 sent 10 bytes to party 2 in msb", logs.output[0])
        self.assertTrue(any("finished msb round 1" in line for line in logs.output))

    def test_fifo_order(self):
        sent, mismatches = _fifo_audit(self.transports, 10_000, self.rng)
        self.assertEqual(mismatches, 0)
        self.assertEqual(len(sent), 6)
        total = sum(len(p) for (frm, _), payloads in sent.items() if frm == 1 for p in payloads)
        self.assertEqual(self.transports[1].ledger.bytes_sent("dot"), total)


class TestTcpTransport(unittest.TestCase):
    """Three parties over loopback sockets."""

    def setUp(self):
        self.rng = np.random.default_rng(8)
        self.transports = _tcp_mesh()

    def tearDown(self):
        for t in self.transports.values():
            t.close()

    def test_ring_exchange(self):
        received = _ring_exchange(self.transports, "msb")
        self.assertEqual(received[3], bytes([2]) * 10)
        self.assertEqual(self.transports[1].ledger.bytes_sent("msb"), 10)

    def test_large_simultaneous_sends(self):
        payload = bytes(4 << 20)
        for i, t in self.transports.items():
            t.send(i % 3 + 1, payload, "dot")
            t.send((i + 1) % 3 + 1, payload, "dot")
        for i, t in self.transports.items():
            self.assertEqual(len(t.recv(i % 3 + 1, "dot")), len(payload))
            self.assertEqual(len(t.recv((i + 1) % 3 + 1, "dot")), len(payload))

    def test_fifo_order(self):
        _, mismatches = _fifo_audit(self.transports, 10_000, self.rng)
        self.assertEqual(mismatches, 0)

    def test_parse_endpoint(self):
        self.assertEqual(parse_endpoint("localhost:9000"), ("localhost", 9000))
        with self.assertRaises(ValueError):
            parse_endpoint("9000")


class TestProtocolLedgers(unittest.TestCase):
    """Ledgers of a full protocol trace across backings and runs."""

    def setUp(self):
        self.rng = np.random.default_rng(9)
        self.seeds = deal_seeds(np.random.default_rng(10))
        x = self.rng.integers(0, 1 << 16, size=500).astype(np.uint16)
        self.inputs = share(x, 16, self.rng)
        self.expected = bool(np.any(x >= 1 << 15))

    def _in_process(self):
        return run_parties(_trace, self.inputs, seeds=self.seeds, timeout=5.0)

    def test_fixed_seeds_give_identical_ledgers(self):
        first, second = self._in_process(), self._in_process()
        for i in const.PARTY_IDS:
            self.assertEqual(first.ledger(i).as_dict(), second.ledger(i).as_dict(), f"party {i}")
        self.assertEqual(bool(first.results[1][0]), self.expected)
        np.testing.assert_array_equal(first.results[1], second.results[1])

    def test_tcp_and_in_process_ledgers_agree(self):
        in_process = self._in_process()
        transports = _tcp_mesh()
        try:
            parties = {i: Party(i, transports[i], self.seeds[i]) for i in const.PARTY_IDS}
            over_tcp = run_parties(_trace, self.inputs, parties=parties)
        finally:
            for t in transports.values():
                t.close()
        for i in const.PARTY_IDS:
            self.assertEqual(over_tcp.ledger(i).as_dict(), in_process.ledger(i).as_dict(), f"party {i}")
        self.assertGreater(over_tcp.ledger(1).bytes_sent("msb"), 0)
        np.testing.assert_array_equal(over_tcp.results[1], in_process.results[1])


if __name__ == "__main__":
    unittest.main()
