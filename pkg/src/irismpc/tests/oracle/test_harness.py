import json
import os
import unittest

import numpy as np

from irismpc.core.iris import MatchParams
from irismpc.oracle.harness import (EquivalenceGrid, boundary_instance, evaluate_instance,
                                    random_instance, run_equivalence)
from irismpc.oracle.naive import naive_counts


class TestEquivalenceHarness(unittest.TestCase):
    """The protocols agree with the naive predicate."""

    def setUp(self):
        self.params = MatchParams.from_ratio(0.375)

    def test_random_instances_are_reproducible(self):
        a, b = random_instance(3, 64, 4), random_instance(3, 64, 4)
        np.testing.assert_array_equal(a.db.codes, b.db.codes)
        self.assertEqual(a.query, b.query)

    def test_boundary_instances_straddle_threshold(self):
        offsets = set()
        for seed in range(30):
            instance = boundary_instance(seed, 64, 1, self.params)
            hd, ml = naive_counts(instance.query, instance.db.row(0))
            # first non-matching distance at this ml
            h0 = next(h for h in range(ml + 2) if not self.params.matches(h, ml))
            offsets.add(hd - h0)
        self.assertTrue(offsets <= {-1, 0, 1})
        self.assertGreater(len(offsets), 1)

    def test_all_unusable_bits(self):
        instance = random_instance(0, 8, 4)
        instance.query.mask[:] = 0
        got = evaluate_instance(instance, "replicated", ("plain-mask", "no-lift"), self.params)
        self.assertEqual(got["plain-mask"], (False, [False] * 4))
        self.assertEqual(got["no-lift"], (False, [False] * 4))

    def test_reduced_grid(self):
        grid = EquivalenceGrid(lengths=(8, 64), sizes=(1, 4), seeds=3, boundary=4)
        report = run_equivalence(grid, progress=False)
        self.assertTrue(report.ok, report.summary())
        self.assertEqual(report.runs, 2 * 4 * (2 * 2 * 3 + 4))
        self.assertEqual(json.loads(report.to_json())["mismatch_count"], 0)

    @unittest.skipUnless(os.environ.get("IRISMPC_FULL"), "full equivalence grid is slow")
    def test_full_grid(self):
        report = run_equivalence(EquivalenceGrid(), progress=False)
        self.assertTrue(report.ok, report.summary())


if __name__ == "__main__":
    unittest.main()
