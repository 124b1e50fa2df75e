from irismpc.engine.backends.base import DotProductBackend
from irismpc.mpc import shamir


class ShamirGaloisBackend(DotProductBackend):
    """Packed Shamir shares over the Galois ring, Lagrange weight folded into the enrolled side."""

    key = "shamir-galois"

    def share(self, values, k, rng):
        return shamir.shamir_share_packed(values, rng, k)

    def prepare_rows(self, party_id, shares):
        return shamir.premultiply_lambda(shares, party_id)

    def local_products(self, party, rows, queries):
        return shamir.dot_product_ct(party, rows, queries)

    def select(self, shares, index):
        return shares[index]

    def reconstruct(self, shares, length):
        return shamir.reconstruct_packed(shares, length)

    def section_arrays(self, shares):
        values = shares.values
        return [values.reshape(values.shape[0], values.shape[1] * 2)]

    def from_section(self, section):
        (values,) = section.arrays
        return shamir.GaloisShare(values.reshape(section.s, section.l // 2, 2), section.k, section.lambda_scaled)
