import unittest

import numpy as np

from irismpc import const
from irismpc.core.errors import ConfigMismatch, LeakageError
from irismpc.core.iris import IrisDb, IrisRecord, MatchParams, expand_rotations, plain_row_matches
from irismpc.engine.backends.factory import BackendFactory
from irismpc.engine.dealer import Dealer
from irismpc.engine.protocol import (handshake, inner_batch_pairs, membership_plain_masks,
                                     membership_shared_masks, open_result, open_rows, run_query)
from irismpc.mpc.party import run_parties


def expected_batch(persons, db, params, public, rotations):
    """Plaintext batch semantics: database rows plus centers of earlier persons."""
    out, centers = [], []
    for left, right in persons:
        codes = expand_rotations(left, rotations) + expand_rotations(right, rotations)
        hit = False
        for code in codes:
            if db.s and plain_row_matches(code, db, params, public).any():
                hit = True
            if centers and plain_row_matches(code, IrisDb.from_records(centers), params, public).any():
                hit = True
        out.append(hit)
        centers.extend([left, right])
    return out


class TestRunQuery(unittest.TestCase):
    """Batch membership end to end over the in-process network."""

    def setUp(self):
        self.rng = np.random.default_rng(42)
        self.params = MatchParams.from_ratio(0.375)

    def _person(self, l=64):
        return IrisRecord.random(l, self.rng), IrisRecord.random(l, self.rng)

    def _run(self, backend_key, variant, persons, db, rotations, debug=False):
        backend = BackendFactory().create_backend(backend_key)
        dealer = Dealer(backend, (const.CODE_WIDTH, self.params.comparison_width), self.rng)
        dbs = dealer.share_database(db)
        queries = dealer.share_batch(persons, rotations)

        def target(party, material):
            db_share, query_share = material
            return run_query(party, query_share, db_share, self.params, variant, backend)

        return run_parties(target, {i: (dbs[i], queries[i]) for i in const.PARTY_IDS},
                           seeds=dealer.deal_seeds(), debug=debug)

    def test_batch_matches_plaintext(self):
        persons = [self._person() for _ in range(3)]
        persons.append(persons[0])
        db = IrisDb.from_records([IrisRecord.random(64, self.rng) for _ in range(4)] + [persons[2][0]])
        for backend in const.BACKENDS:
            for variant in const.VARIANTS:
                run = self._run(backend, variant, persons, db, rotations=3)
                public = variant == "plain-mask"
                expected = expected_batch(persons, db, self.params, public, 3)
                self.assertEqual(run.results[1].matches, expected, f"{backend}/{variant}")
                self.assertTrue(expected[2], "Planted row must match")
                self.assertTrue(expected[3], "Repeated person must match inside the batch")
                self.assertIsNone(run.results[2].matches)

    def test_duplicate_person_with_empty_db(self):
        person = self._person()
        empty = IrisDb.from_records([], l=64)
        for variant in ("plain-mask", "mpc-lift"):
            run = self._run("replicated", variant, [person, person], empty, rotations=31)
            self.assertEqual(run.results[1].matches, [False, True])

    def test_single_person_empty_db(self):
        run = self._run("shamir-galois", "no-lift", [self._person()], IrisDb.from_records([], l=64), 3)
        self.assertEqual(run.results[1].matches, [False])

    def test_thirty_two_person_batch(self):
        persons = [self._person() for _ in range(32)]
        db = IrisDb.random(1, 64, self.rng)
        run = self._run("replicated", "plain-mask", persons, db, rotations=31)
        stats = run.results[1].stats
        inner = sum(62 * 2 * p for p in range(32))
        self.assertEqual(stats["comparisons"], 1984 + inner)
        self.assertEqual(stats["batch"], 32)
        self.assertEqual(stats["phase_bytes"]["dot"], 2 * stats["comparisons"])
        self.assertEqual(run.results[1].matches, expected_batch(persons, db, self.params, True, 31))

    def test_debug_row_matches(self):
        persons = [self._person()]
        db = IrisDb.random(5, 64, self.rng)
        run = self._run("replicated", "const-lift", persons, db, rotations=3, debug=True)
        rows = run.results[1].row_matches["db"]
        self.assertEqual(rows.shape, (6, 5))
        codes = expand_rotations(persons[0][0], 3) + expand_rotations(persons[0][1], 3)
        for q, code in enumerate(codes):
            np.testing.assert_array_equal(rows[q], plain_row_matches(code, db, self.params).astype(np.uint8))
        production = self._run("replicated", "const-lift", persons, db, rotations=3)
        self.assertIsNone(production.results[1].row_matches)

    def test_only_aggregates_are_opened(self):
        persons = [self._person() for _ in range(2)]
        db = IrisDb.random(3, 64, self.rng)
        backend = BackendFactory().create_backend("replicated")
        dealer = Dealer(backend, (16, 32), self.rng)
        dbs, queries = dealer.share_database(db), dealer.share_batch(persons, 3)
        opened = []

        def target(party, material):
            party.open_hooks.append(lambda pid, kind, count: opened.append((kind, count)))
            return run_query(party, material[1], material[0], self.params, "mpc-lift", backend)

        run_parties(target, {i: (dbs[i], queries[i]) for i in const.PARTY_IDS})
        self.assertEqual(opened, [("aggregate", 2)] * 3)


class TestMembership(unittest.TestCase):
    """Single-query entry points."""

    def setUp(self):
        self.rng = np.random.default_rng(5)
        self.params = MatchParams.from_ratio(0.375)
        self.db = IrisDb.random(8, 32, self.rng)
        self.query = self.db.row(6)

    def test_membership_and_row_open(self):
        backend = BackendFactory().create_backend("shamir-galois")
        dealer = Dealer(backend, (16, 32), self.rng)
        dbs, queries = dealer.share_database(self.db), dealer.share_queries([self.query])

        def target(party, material):
            db, query = material
            plain = membership_plain_masks(party, query, db, self.params, backend)
            shared = membership_shared_masks(party, query, db, self.params, "no-lift", backend)
            return (open_result(party, plain, 3), open_result(party, shared, 3),
                    open_rows(party, shared, 3))

        run = run_parties(target, {i: (dbs[i], queries[i]) for i in const.PARTY_IDS}, debug=True)
        plain, shared, rows = run.results[3]
        self.assertEqual(plain, [True])
        self.assertEqual(shared, [True])
        np.testing.assert_array_equal(rows, plain_row_matches(self.query, self.db, self.params))

    def test_rows_refused_in_production(self):
        backend = BackendFactory().create_backend("replicated")
        dealer = Dealer(backend, (16, 32), self.rng)
        dbs, queries = dealer.share_database(self.db), dealer.share_queries([self.query])

        def target(party, material):
            result = membership_shared_masks(party, material[1], material[0], self.params, "mpc-lift", backend)
            return open_rows(party, result, 1)

        with self.assertRaises(LeakageError):
            run_parties(target, {i: (dbs[i], queries[i]) for i in const.PARTY_IDS})

    def test_plain_variant_rejected_for_shared_masks(self):
        backend = BackendFactory().create_backend("replicated")
        dealer = Dealer(backend, (16,), self.rng)
        dbs, queries = dealer.share_database(self.db), dealer.share_queries([self.query])

        def target(party, material):
            return membership_shared_masks(party, material[1], material[0], self.params, "plain-mask", backend)

        with self.assertRaises(ValueError):
            run_parties(target, {i: (dbs[i], queries[i]) for i in const.PARTY_IDS})


class TestBatchLayout(unittest.TestCase):

    def test_inner_batch_pairs(self):
        backend = BackendFactory().create_backend("replicated")
        rng = np.random.default_rng(0)
        persons = [(IrisRecord.random(64, rng), IrisRecord.random(64, rng)) for _ in range(3)]
        queries = Dealer(backend, (16,), rng).share_batch(persons, 3)[1]
        np.testing.assert_array_equal(queries.center_indices(), [1, 4, 7, 10, 13, 16])
        query_idx, center_idx, sizes = inner_batch_pairs(queries)
        self.assertEqual(sizes, [0, 12, 24])
        self.assertTrue(np.all(center_idx[query_idx < 12] < 2))
        self.assertEqual(query_idx.size, 36)

    def test_handshake_mismatch(self):
        digests = {1: b"a" * 32, 2: b"a" * 32, 3: b"b" * 32}
        with self.assertRaises(ConfigMismatch):
            run_parties(handshake, digests, timeout=5.0)
        run = run_parties(handshake, {i: b"same" for i in const.PARTY_IDS})
        self.assertEqual(run.ledger(1).bytes_sent("setup"), 8)


if __name__ == "__main__":
    unittest.main()
