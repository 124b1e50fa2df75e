import unittest

from irismpc.net.ledger import CommLedger, PartyId


class TestPartyId(unittest.TestCase):

    def test_ring_order(self):
        self.assertEqual(PartyId(1).next, PartyId(2))
        self.assertEqual(PartyId(3).next, PartyId(1))
        self.assertEqual(PartyId(1).prev, PartyId(3))
        self.assertEqual(int(PartyId(2)), 2)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            PartyId(4)


class TestCommLedger(unittest.TestCase):
    """Per-phase counters."""

    def test_counts_by_phase(self):
        ledger = CommLedger()
        ledger.record_send("msb", 100)
        ledger.record_send("msb", 50)
        ledger.record_send("dot", 2)
        ledger.record_recv("msb", 30)
        ledger.record_round("msb")
        self.assertEqual(ledger.bytes_sent("msb"), 150)
        self.assertEqual(ledger.bytes_sent(), 152)
        self.assertEqual(ledger.bytes_received(), 30)
        self.assertEqual(ledger.phase("msb").messages_sent, 2)
        self.assertEqual(ledger.rounds("msb"), 1)
        self.assertEqual(ledger.as_dict()["dot"]["bytes_sent"], 2)

    def test_unknown_phase(self):
        with self.assertRaises(ValueError):
            CommLedger().record_send("warmup", 1)

    def test_reset(self):
        ledger = CommLedger()
        ledger.record_send("lift", 8)
        ledger.reset()
        self.assertEqual(ledger.bytes_sent(), 0)


if __name__ == "__main__":
    unittest.main()
