from abc import ABC, abstractmethod

from irismpc import const
from irismpc.mpc.binary import msb


class ComparisonVariant(ABC):
    """Base class for the ways a row comparison turns dot products into a match bit.

    Every variant produces a shared value whose sign bit is 1 exactly for
    matching lanes; they differ in the rings the code and mask products are
    computed in and in how those are brought to a common ring.
    """

    key = None
    shared_masks = True

    def __init__(self, params):
        self.params = params

    @property
    def code_width(self):
        return const.CODE_WIDTH

    @property
    def mask_width(self):
        return const.CODE_WIDTH

    @property
    def comparison_width(self):
        return self.params.comparison_width

    def check_bounds(self, l):
        self.params.validate(l)

    @abstractmethod
    def comparison_values(self, party, code_dots, mask_input):
        """Shared value whose MSB is the match bit, one lane per comparison.

        Args:
            party: Party
            code_dots: RepShare of masked code dot products (ml - 2hd)
            mask_input: RepShare of ml, or public ml counts for public masks
        """
        pass

    def compare(self, party, code_dots, mask_input):
        values = self.comparison_values(party, code_dots, mask_input)
        with party.phase("msb"):
            return msb(party, values)

    @property
    def name(self):
        name = self.__class__.__name__
        if name.endswith("Variant"):
            name = name[:-7]
        return name
