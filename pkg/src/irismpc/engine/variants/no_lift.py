from irismpc.engine.variants.base import ComparisonVariant


class NoLiftVariant(ComparisonVariant):
    """Both products computed in the comparison ring."""

    key = "no-lift"

    @property
    def code_width(self):
        return self.comparison_width

    @property
    def mask_width(self):
        return self.comparison_width

    def comparison_values(self, party, code_dots, mask_input):
        return mask_input.mul_public(self.params.a) - code_dots.mul_public(self.params.b)
