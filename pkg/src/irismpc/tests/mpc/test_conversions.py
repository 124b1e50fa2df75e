import unittest

import numpy as np

from irismpc import const
from irismpc.core.ring import get_ring
from irismpc.mpc.conversions import OtRequest, bit_inject, const_lift, lift, three_ot
from irismpc.mpc.party import run_parties
from irismpc.mpc.replicated import RepShare, reconstruct, share, share_bits


class TestConversions(unittest.TestCase):
    """Ring-changing gadgets."""

    def setUp(self):
        self.rng = np.random.default_rng(42)

    def test_const_lift(self):
        x = get_ring(16).random(self.rng, (100,))
        lifted = {i: const_lift(s, 4) for i, s in share(x, 16, self.rng).items()}
        self.assertEqual(lifted[1].k, 18)
        np.testing.assert_array_equal(reconstruct(lifted), x.astype(np.uint32) * 4)
        with self.assertRaises(ValueError):
            const_lift(lifted[1], 3)

    def test_three_ot(self):
        ring = get_ring(16)
        m0, m1 = ring.random(self.rng, (50,)), ring.random(self.rng, (50,))
        choice = self.rng.integers(0, 2, size=50, dtype=np.uint8)

        def target(party):
            if party.id == const.OT_SENDER:
                request = OtRequest(16, 50, m0=m0, m1=m1)
            else:
                request = OtRequest(16, 50, choice=choice)
            return three_ot(party, [request])[0]

        run = run_parties(target, rng=self.rng)
        np.testing.assert_array_equal(run.results[const.OT_RECEIVER], np.where(choice == 1, m1, m0))
        self.assertIsNone(run.results[const.OT_SENDER])
        self.assertEqual(run.ledger(const.OT_SENDER).bytes_sent("ot"), 2 * 50 * 2)
        self.assertEqual(run.ledger(const.OT_HELPER).bytes_sent("ot"), 50 * 2)
        self.assertEqual(run.rounds("ot"), 1)

    def test_bit_inject(self):
        bits = [self.rng.integers(0, 2, size=70, dtype=np.uint8) for _ in range(2)]
        shared = [share_bits(b, self.rng) for b in bits]
        inputs = {i: [s[i] for s in shared] for i in const.PARTY_IDS}
        run = run_parties(lambda party, xs: bit_inject(party, xs, [15, 16]), inputs, rng=self.rng)
        for j, (width, b) in enumerate(zip((15, 16), bits)):
            result = {i: run.results[i][j] for i in const.PARTY_IDS}
            self.assertEqual(result[1].k, width)
            np.testing.assert_array_equal(reconstruct(result), b)
        self.assertEqual(run.rounds(), 2)

    def test_lift(self):
        x = get_ring(16).random(self.rng, (300,))
        run = run_parties(lambda party, s: lift(party, s, 16), share(x, 16, self.rng), rng=self.rng)
        self.assertEqual(run.results[1].k, 32)
        np.testing.assert_array_equal(reconstruct(run.results), x.astype(np.uint32))
        self.assertEqual(run.parties[1].gate_totals().and_gates, 33 * 300)
        self.assertEqual(run.rounds(), 19)
        self.assertEqual(run.ledger(1).bytes_sent("ot"), 2 * 2 * 2 * 300)

    def test_lift_exhaustive_small_ring(self):
        """Every x in Z_16 under every split (x1, x2, x - x1 - x2) lifts to x in Z_256."""
        x, x1, x2 = (a.ravel().astype(np.uint16) for a in np.meshgrid(*[np.arange(16)] * 3, indexing="ij"))
        x3 = (x - x1 - x2) % 16
        components = {1: x1, 2: x2, 3: x3.astype(np.uint16)}
        inputs = {i: RepShare(components[i], components[(i - 2) % 3 + 1], 4) for i in const.PARTY_IDS}
        np.testing.assert_array_equal(reconstruct(inputs), x)
        sums = x1.astype(np.int64) + x2 + x3
        self.assertEqual(set(np.unique(sums // 16)), {0, 1, 2})

        run = run_parties(lambda party, s: lift(party, s, 4), inputs, rng=self.rng)
        self.assertEqual(run.results[1].k, 8)
        np.testing.assert_array_equal(reconstruct(run.results), x)

    def test_lift_needs_two_bits(self):
        shares = share(np.array([1]), 16, self.rng)
        with self.assertRaises(ValueError):
            run_parties(lambda party, s: lift(party, s, 1), shares, rng=self.rng)


if __name__ == "__main__":
    unittest.main()
