import numpy as np

from irismpc.core.iris import check_public_bounds
from irismpc.engine.variants.base import ComparisonVariant
from irismpc.mpc.replicated import add_public


class PlainMaskVariant(ComparisonVariant):
    """Public masks: ceil(f*ml) is computed in the clear, MSB(ceil(f*ml) - dot) in Z_2^16."""

    key = "plain-mask"
    shared_masks = False

    @property
    def comparison_width(self):
        return self.code_width

    def check_bounds(self, l):
        check_public_bounds(l, self.code_width)

    def comparison_values(self, party, code_dots, mask_input):
        threshold = self.params.public_threshold(np.asarray(mask_input).reshape(code_dots.shape))
        return add_public(party, -code_dots, threshold)
