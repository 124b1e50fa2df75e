from irismpc.engine.variants.base import ComparisonVariant
from irismpc.mpc.conversions import const_lift, lift


class MpcLiftVariant(ComparisonVariant):
    """dot and ml in Z_2^16; ml is lifted by MPC, dot for free by the factor b."""

    key = "mpc-lift"

    def comparison_values(self, party, code_dots, mask_input):
        with party.phase("lift"):
            ml = lift(party, mask_input, self.params.precision_bits)
        return ml.mul_public(self.params.a) - const_lift(code_dots, self.params.b)
