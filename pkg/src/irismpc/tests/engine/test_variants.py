import unittest

import numpy as np

from irismpc import const
from irismpc.core.errors import BoundsViolation
from irismpc.core.iris import MatchParams
from irismpc.core.ring import get_ring
from irismpc.engine.variants.factory import VariantFactory
from irismpc.mpc.party import run_parties
from irismpc.mpc.replicated import reconstruct_bits, share


class TestVariants(unittest.TestCase):
    """Every variant's sign bit agrees with the row predicate."""

    def setUp(self):
        self.rng = np.random.default_rng(42)
        hd, ml = [], []
        for m in range(41):
            for h in range(m + 1):
                hd.append(h)
                ml.append(m)
        self.hd = np.array(hd, np.int64)
        self.ml = np.array(ml, np.int64)

    def _compare(self, variant):
        dot = self.ml - 2 * self.hd
        dots = share(get_ring(variant.code_width).from_ints(dot), variant.code_width, self.rng)
        if variant.shared_masks:
            mls = share(get_ring(variant.mask_width).from_ints(self.ml), variant.mask_width, self.rng)
            inputs = {i: (dots[i], mls[i]) for i in const.PARTY_IDS}
        else:
            inputs = {i: (dots[i], self.ml) for i in const.PARTY_IDS}
        run = run_parties(lambda party, m: variant.compare(party, *m), inputs, rng=self.rng)
        return reconstruct_bits(run.results), run

    def test_all_variants(self):
        for ratio in (0.375, 0.2, 0.5):
            params = MatchParams.from_ratio(ratio)
            for key in const.VARIANTS:
                variant = VariantFactory().create_variant(key, params)
                bits, _ = self._compare(variant)
                expected = params.matches(self.hd, self.ml, public_masks=not variant.shared_masks)
                np.testing.assert_array_equal(bits, expected.astype(np.uint8),
                                              f"{key} disagrees at ratio {ratio}")

    def test_explicit_fraction(self):
        params = MatchParams.from_fraction(1, 4)
        for key in const.SHARED_MASK_VARIANTS:
            variant = VariantFactory().create_variant(key, params)
            bits, _ = self._compare(variant)
            np.testing.assert_array_equal(bits, params.matches(self.hd, self.ml).astype(np.uint8))

    def test_widths(self):
        params = MatchParams.from_ratio(0.375)
        factory = VariantFactory()
        widths = {key: (factory.create_variant(key, params).code_width,
                        factory.create_variant(key, params).mask_width) for key in const.VARIANTS}
        self.assertEqual(widths, {"plain-mask": (16, 16), "mpc-lift": (16, 16),
                                  "const-lift": (16, 32), "no-lift": (32, 32)})
        self.assertEqual(factory.create_variant("plain-mask", params).comparison_width, 16)

    def test_mpc_lift_phases(self):
        variant = VariantFactory().create_variant("mpc-lift", MatchParams.from_ratio(0.375))
        _, run = self._compare(variant)
        gates = run.parties[1].gates
        lanes = self.hd.size
        self.assertEqual(gates["lift"].and_gates, 33 * lanes)
        self.assertEqual(gates["msb"].and_gates, 61 * lanes)
        self.assertEqual(run.rounds("lift") + run.rounds("ot"), 19)
        self.assertEqual(run.rounds("msb"), 31)

    def test_bounds(self):
        params = MatchParams.from_ratio(0.375)
        with self.assertRaises(BoundsViolation):
            VariantFactory().create_variant("no-lift", params).check_bounds(16384)
        with self.assertRaises(BoundsViolation):
            VariantFactory().create_variant("plain-mask", params).check_bounds(20000)
        VariantFactory().create_variant("plain-mask", params).check_bounds(12800)

    def test_factory(self):
        variant = VariantFactory().create_variant("const-lift", MatchParams())
        self.assertEqual(variant.name, "ConstLift")
        with self.assertRaises(ValueError):
            VariantFactory().create_variant("lift-all", MatchParams())


if __name__ == "__main__":
    unittest.main()
