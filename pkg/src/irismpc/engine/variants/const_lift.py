from irismpc.engine.variants.base import ComparisonVariant
from irismpc.mpc.conversions import const_lift


class ConstLiftVariant(ComparisonVariant):
    """ml computed directly in Z_2^(16+m); dot in Z_2^16 lifted for free by b."""

    key = "const-lift"

    @property
    def mask_width(self):
        return self.comparison_width

    def comparison_values(self, party, code_dots, mask_input):
        return mask_input.mul_public(self.params.a) - const_lift(code_dots, self.params.b)
