import hashlib
import os
import tempfile
import unittest

import numpy as np

from irismpc import const
from irismpc.core.formats import DB_HEADER, SECTION_HEADER, read_db, read_sections
from irismpc.core.iris import encode_masked
from irismpc.engine.backends.factory import BackendFactory
from irismpc.scripts.cli import main
from irismpc.scripts.config import share_file_name


def _digest(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


class TestCli(unittest.TestCase):
    """Dealer-side subcommands."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def _gen(self, name, size, length=64, seed=1):
        path = os.path.join(self.dir, name)
        code = main(["gen-db", "--size", str(size), "--length", str(length), "--seed", str(seed),
                     "--out", path, "-q"])
        self.assertEqual(code, const.EXIT_OK)
        return path

    def test_gen_db(self):
        path = self._gen("a.irm", 3)
        self.assertEqual(os.path.getsize(path), DB_HEADER.size + 2 * 3 * 64 // 8)
        self.assertEqual(_digest(path), _digest(self._gen("b.irm", 3)))
        empty = self._gen("empty.irm", 0)
        self.assertEqual(read_db(empty).s, 0)

    def test_share_reconstructs(self):
        db_path = self._gen("db.irm", 4)
        db = read_db(db_path)
        for backend_key in const.BACKENDS:
            out = os.path.join(self.dir, backend_key)
            self.assertEqual(main(["share", "--db", db_path, "--backend", backend_key, "--out-dir", out,
                                   "--seed", "3", "-q"]), const.EXIT_OK)
            backend = BackendFactory().create_backend(backend_key)
            sections = {i: read_sections(os.path.join(out, share_file_name(i))) for i in const.PARTY_IDS}
            for j, section in enumerate(sections[1]):
                shares = {i: backend.from_section(sections[i][j]) for i in const.PARTY_IDS}
                plain = backend.reconstruct(shares, db.l)
                if section.kind == const.SECTION_CODE:
                    expected = encode_masked(db.codes, db.masks, section.k)
                else:
                    expected = db.masks
                np.testing.assert_array_equal(plain, expected, f"{backend_key} section {j}")

    def test_share_file_sizes(self):
        db_path = self._gen("db.irm", 5)
        sizes = {}
        for backend_key in const.BACKENDS:
            out = os.path.join(self.dir, backend_key)
            main(["share", "--db", db_path, "--backend", backend_key, "--out-dir", out, "-q"])
            sizes[backend_key] = os.path.getsize(os.path.join(out, share_file_name(2))) - 4 * SECTION_HEADER.size
        self.assertEqual(sizes["replicated"], 2 * sizes["shamir-galois"])

    def test_empty_db_shares_to_headers(self):
        db_path = self._gen("empty.irm", 0)
        out = os.path.join(self.dir, "shares")
        main(["share", "--db", db_path, "--out-dir", out, "-q"])
        self.assertEqual(os.path.getsize(os.path.join(out, share_file_name(1))), 4 * SECTION_HEADER.size)

    def test_exit_codes(self):
        out = os.path.join(self.dir, "shares")
        self.assertEqual(main(["share", "--db", os.path.join(self.dir, "missing.irm"), "--out-dir", out, "-q"]),
                         const.EXIT_CONFIG)
        bad = os.path.join(self.dir, "bad.irm")
        with open(bad, "wb") as f:
            f.write(b"NOPE" + bytes(40))
        self.assertEqual(main(["share", "--db", bad, "--out-dir", out, "-q"]), const.EXIT_CONFIG)
        self.assertEqual(main(["bench", "--comparisons", "10", "--length", "20000", "-q"]), const.EXIT_BOUNDS)

    def test_bench_and_equivalence(self):
        stats = os.path.join(self.dir, "bench.json")
        plot = os.path.join(self.dir, "bench.png")
        self.assertEqual(main(["bench", "--comparisons", "500", "--length", "64", "--stats", stats,
                               "--plot", plot, "-q"]), const.EXIT_OK)
        self.assertTrue(os.path.exists(stats))
        self.assertTrue(os.path.exists(plot))
        self.assertEqual(main(["bench", "--phase", "dot", "--comparisons", "62", "--length", "64", "-q"]),
                         const.EXIT_OK)
        report = os.path.join(self.dir, "equivalence.json")
        self.assertEqual(main(["equivalence", "--seeds", "1", "--boundary", "1", "--lengths", "8",
                               "--sizes", "2", "--report", report, "-q"]), const.EXIT_OK)
        self.assertTrue(os.path.exists(report))


if __name__ == "__main__":
    unittest.main()
