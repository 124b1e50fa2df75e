from irismpc.core.ring import get_ring
from irismpc.engine.backends.base import DotProductBackend
from irismpc.mpc import replicated


class ReplicatedBackend(DotProductBackend):
    """Replicated shares; the enrolled side is kept preprocessed as (x_i + x_{i-1}, x_{i-1})."""

    key = "replicated"

    def share(self, values, k, rng):
        return replicated.share(values, k, rng)

    def prepare_rows(self, party_id, shares):
        if isinstance(shares, replicated.PrepShare):
            return shares
        return replicated.PrepShare.from_share(shares)

    def local_products(self, party, rows, queries):
        return replicated.local_dot(party, rows, queries)

    def select(self, shares, index):
        return shares[index]

    def reconstruct(self, shares, length):
        return replicated.reconstruct(shares)[..., :length]

    def section_arrays(self, shares):
        if isinstance(shares, replicated.PrepShare):
            # persisted as the raw pair; preprocessing is redone at load
            ring = get_ring(shares.k)
            return [ring.sub(shares.own_sum, shares.prev), shares.prev]
        return [shares.own, shares.prev]

    def from_section(self, section):
        own, prev = section.arrays
        return replicated.RepShare(own, prev, section.k)
