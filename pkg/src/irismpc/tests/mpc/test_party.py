import unittest

import numpy as np

from irismpc.core.errors import LeakageError
from irismpc.mpc.party import GateStats, run_parties


class TestPartyRunner(unittest.TestCase):
    """Thread runner and per-party bookkeeping."""

    def setUp(self):
        self.rng = np.random.default_rng(42)

    def test_results_by_party(self):
        run = run_parties(lambda party: (party.id, party.next_id, party.prev_id), rng=self.rng)
        self.assertEqual(run.results, {1: (1, 2, 3), 2: (2, 3, 1), 3: (3, 1, 2)})

    def test_root_cause_is_raised(self):
        def target(party):
            if party.id == 2:
                raise LeakageError("boom")
            return party.recv(2)

        with self.assertRaises(LeakageError):
            run_parties(target, rng=self.rng, timeout=5.0)

    def test_phases_nest(self):
        def target(party):
            with party.phase("lift"):
                with party.phase("ot"):
                    inner = party.current_phase
                outer = party.current_phase
            return inner, outer, party.current_phase

        run = run_parties(target, rng=self.rng)
        self.assertEqual(run.results[1], ("ot", "lift", "setup"))

    def test_gate_stats_add(self):
        total = GateStats(1, 2, 3) + GateStats(10, 20, 30)
        self.assertEqual(total, GateStats(11, 22, 33))


if __name__ == "__main__":
    unittest.main()
