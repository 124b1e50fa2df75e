"""Packed degree-1 Shamir sharing over GR(2^k, 2).

Two consecutive ring values are packed into one Galois element. Shares are
evaluations at the canonical points 1, X, 1+X. Once one factor is scaled by
the holder's Lagrange coefficient, the constant term of a local product is an
additive share of the dot product.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from irismpc import const
from irismpc.core.galois import ExceptionalSeq, GaloisRing, lagrange_coeffs
from irismpc.mpc.replicated import reshare_additive


@dataclass
class GaloisShare:
    """One party's evaluations, shape (..., l/2, 2)."""

    values: np.ndarray
    k: int = const.CODE_WIDTH
    lambda_scaled: bool = False

    @property
    def length(self):
        return self.values.shape[-2] * 2

    def __getitem__(self, index):
        return GaloisShare(self.values[index], self.k, self.lambda_scaled)


@lru_cache(maxsize=None)
def galois_ring(k):
    return GaloisRing(k)


@lru_cache(maxsize=None)
def party_lambdas(k):
    return lagrange_coeffs(ExceptionalSeq.canonical(k), const.PARTY_IDS)


def shamir_share_packed(values, rng, k=const.CODE_WIDTH):
    """Share a (..., l) array of ring values; odd lengths are padded with 0.

    Returns:
        dict party id -> GaloisShare with l/2 packed elements per row
    """
    gr = galois_ring(k)
    secret = gr.pack(gr.base.from_ints(values))
    slope = gr.base.random(rng, secret.shape)
    shares = {}
    for i in const.PARTY_IDS:
        point = gr.points.party_point(i)
        shares[i] = GaloisShare(gr.add(secret, gr.mul_elem(slope, point)), k)
    return shares


def premultiply_lambda(share, party_id):
    """Scale by the holder's Lagrange coefficient for interpolation at 0."""
    if share.lambda_scaled:
        return share
    gr = galois_ring(share.k)
    return GaloisShare(gr.mul_elem(share.values, party_lambdas(share.k)[party_id - 1]), share.k, True)


def dot_product_ct(party, xs, ys):
    """Additive shares of <x_n, y_q> for all pairs, shape (q, n).

    Only constant terms of the products are formed: one length-l product per
    pair on the interleaved coefficients.
    """
    if not xs.lambda_scaled:
        raise ValueError("Database side must be lambda-scaled before the dot product")
    gr = galois_ring(xs.k)
    x = xs.values if xs.values.ndim == 3 else xs.values[np.newaxis]
    y = ys.values if ys.values.ndim == 3 else ys.values[np.newaxis]
    party.macs += y.shape[0] * x.shape[0] * x.shape[1] * 2
    return gr.constant_term_dot(x, y)


def additive_to_replicated(party, z, k=const.CODE_WIDTH):
    return reshare_additive(party, np.asarray(z), k)


def reconstruct_packed(shares, length=None):
    """Interpolate packed secrets at 0 from all three parties and unpack."""
    k = shares[1].k
    gr = galois_ring(k)
    lambdas = party_lambdas(k)
    total = None
    for i in const.PARTY_IDS:
        values = shares[i].values
        term = values if shares[i].lambda_scaled else gr.mul_elem(values, lambdas[i - 1])
        total = term if total is None else gr.add(total, term)
    return gr.unpack(total, length)
