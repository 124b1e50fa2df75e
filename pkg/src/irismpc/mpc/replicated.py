"""Three-party replicated secret sharing over Z_2^k and F_2.

Party i holds (x_i, x_{i-1}) with x = x_1 + x_2 + x_3 (or XOR for bits).
Shares are vectorized: ``own`` and ``prev`` are arrays of any shape.
"""

import logging
from dataclasses import dataclass

import numpy as np

from irismpc import const
from irismpc.core.errors import InconsistentShare
from irismpc.core.ring import get_ring

logger = logging.getLogger(__name__)


@dataclass
class RepShare:
    own: np.ndarray
    prev: np.ndarray
    k: int

    @property
    def ring(self):
        return get_ring(self.k)

    @property
    def shape(self):
        return self.own.shape

    def _same(self, other):
        if other.k != self.k:
            raise ValueError(f"Width mismatch: {self.k} vs {other.k}")

    def __add__(self, other):
        self._same(other)
        ring = self.ring
        return RepShare(ring.add(self.own, other.own), ring.add(self.prev, other.prev), self.k)

    def __sub__(self, other):
        self._same(other)
        ring = self.ring
        return RepShare(ring.sub(self.own, other.own), ring.sub(self.prev, other.prev), self.k)

    def __neg__(self):
        return RepShare(self.ring.neg(self.own), self.ring.neg(self.prev), self.k)

    def __getitem__(self, index):
        return RepShare(self.own[index], self.prev[index], self.k)

    def mul_public(self, c):
        """Multiply by a public scalar or an array of public values."""
        ring = self.ring
        if np.isscalar(c):
            return RepShare(ring.mul_scalar(self.own, c), ring.mul_scalar(self.prev, c), self.k)
        c = ring.from_ints(c)
        return RepShare(ring.mul(self.own, c), ring.mul(self.prev, c), self.k)

    def reshape(self, *shape):
        return RepShare(self.own.reshape(*shape), self.prev.reshape(*shape), self.k)

    def convert(self, k):
        """Reinterpret both components as representatives in Z_2^k."""
        src, dst = self.ring, get_ring(k)
        return RepShare(src.convert(self.own, dst), src.convert(self.prev, dst), k)

    @classmethod
    def concatenate(cls, shares, axis=0):
        k = shares[0].k
        return cls(np.concatenate([s.own for s in shares], axis=axis),
                   np.concatenate([s.prev for s in shares], axis=axis), k)

    @classmethod
    def zeros(cls, shape, k):
        ring = get_ring(k)
        return cls(ring.zeros(shape), ring.zeros(shape), k)


@dataclass
class PrepShare:
    """(x_i + x_{i-1}, x_{i-1}), ready for the two-product dot product."""

    own_sum: np.ndarray
    prev: np.ndarray
    k: int

    @classmethod
    def from_share(cls, x):
        return cls(x.ring.add(x.own, x.prev), x.prev, x.k)

    @property
    def shape(self):
        return self.own_sum.shape

    def __getitem__(self, index):
        return PrepShare(self.own_sum[index], self.prev[index], self.k)


def share(x, k, rng):
    """Split plaintext values into replicated shares for parties 1..3."""
    ring = get_ring(k)
    x = ring.from_ints(x)
    x1 = ring.random(rng, x.shape)
    x2 = ring.random(rng, x.shape)
    x3 = ring.sub(ring.sub(x, x1), x2)
    comps = {1: x1, 2: x2, 3: x3}
    return {i: RepShare(comps[i], comps[(i - 2) % 3 + 1], k) for i in const.PARTY_IDS}


def inp_local(party_id, x, holder, k, shape=None):
    """Sharing of a value known to parties ``holder`` and ``holder + 1``, no communication.

    x_holder = x and the other components are zero. Parties that do not know x
    pass ``x=None`` together with ``shape``.
    """
    ring = get_ring(k)
    if x is not None:
        x = ring.from_ints(x)
        shape = x.shape
    zero = ring.zeros(shape)
    if party_id == holder:
        return RepShare(x, zero, k)
    if party_id == holder % 3 + 1:
        return RepShare(zero.copy(), x, k)
    return RepShare(zero, zero.copy(), k)


def add_public(party, x, c):
    """Add a public constant into component x_1."""
    ring = x.ring
    c = ring.from_ints(c) if not np.isscalar(c) else ring.scalar(c)
    own, prev = x.own, x.prev
    if party.id == 1:
        own = ring.add(own, c)
    elif party.id == 2:
        prev = ring.add(prev, c)
    return RepShare(np.broadcast_to(own, x.shape).copy(), np.broadcast_to(prev, x.shape).copy(), x.k)


def reshare_additive(party, z, k):
    """Turn an additive share z_i into a replicated one: rerandomize, send z_i to party i+1."""
    ring = get_ring(k)
    z = ring.add(ring.reduce(z), party.zero_share(ring, z.shape))
    received = party.reshare(ring.to_bytes(z))
    return RepShare(z, ring.from_bytes(received, z.shape), k)


def mul_reshare(party, x, y):
    ring = x.ring
    z = ring.add(ring.add(ring.mul(x.own, y.own), ring.mul(x.prev, y.own)), ring.mul(x.own, y.prev))
    return reshare_additive(party, z, x.k)


def local_dot(party, xs, ys):
    """Additive shares of <ys[q], xs[n]> for every pair, shape (q, n).

    Two plain matrix products over the preprocessed shares; the rows of ``xs``
    are a PrepShare and ``ys`` a RepShare.
    """
    ring = get_ring(xs.k)
    y_sum = ring.add(ys.own, ys.prev)
    z = ring.sub(ring.matmul(y_sum, xs.own_sum.T), ring.matmul(ys.prev, xs.prev.T))
    party.macs += 2 * y_sum.shape[0] * xs.own_sum.shape[0] * xs.own_sum.shape[-1]
    return z


def dot_product(party, xs, ys):
    """Replicated shares of <x, y>; one reshare regardless of vector length.

    Accepts single vectors (1-D) or batches (2-D rows).
    """
    single = xs.own_sum.ndim == 1
    if single:
        xs, ys = xs[np.newaxis], ys[np.newaxis]
    result = reshare_additive(party, local_dot(party, xs, ys), xs.k)
    return result.reshape(()) if single else result


def reconstruct(shares):
    """Recover the plaintext from all three parties' shares.

    Raises:
        InconsistentShare: if some party's prev differs from its predecessor's own
    """
    for i in const.PARTY_IDS:
        before = (i - 2) % 3 + 1
        if not np.array_equal(shares[i].prev, shares[before].own):
            raise InconsistentShare(f"Party {i}'s prev component disagrees with party {before}")
    ring = shares[1].ring
    return ring.add(ring.add(shares[1].own, shares[2].own), shares[3].own)


def open_to(party, x, to, kind="aggregate"):
    """Reveal x to party ``to`` only; the others return None.

    The two other parties both send the component ``to`` is missing, and
    ``to`` checks that the copies agree.
    """
    ring = x.ring
    count = int(np.prod(x.shape, dtype=np.int64))
    party.authorize_open(kind, count)
    logger.debug("Party %d opens %d %s value(s) to party %d", party.id, count, kind, to)
    with party.phase("open"):
        value = None
        if party.id == to:
            first = ring.from_bytes(party.recv(party.next_id), x.shape)
            second = ring.from_bytes(party.recv(party.prev_id), x.shape)
            if not np.array_equal(first, second):
                raise InconsistentShare(f"Party {to} received diverging copies while opening")
            value = ring.add(ring.add(x.own, x.prev), first)
        elif party.next_id == to:
            party.send(to, ring.to_bytes(x.prev))
        else:
            party.send(to, ring.to_bytes(x.own))
        party.round_barrier()
    return value


# Binary sharing over F_2, 64 lanes per word

def pack_bits(bits):
    """Pack the last axis of a 0/1 array into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    lanes = bits.shape[-1]
    words = (lanes + const.LANE_BITS - 1) // const.LANE_BITS
    padded = np.zeros(bits.shape[:-1] + (words * const.LANE_BITS,), dtype=np.uint8)
    padded[..., :lanes] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_bits(words, lanes):
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :lanes]


@dataclass
class BitRepShare:
    """XOR replicated shares of ``lanes`` bits per row, packed into uint64 words."""

    own: np.ndarray
    prev: np.ndarray
    lanes: int

    @property
    def rows(self):
        return self.own.shape[:-1]

    def __xor__(self, other):
        return BitRepShare(self.own ^ other.own, self.prev ^ other.prev, self.lanes)

    def __getitem__(self, index):
        return BitRepShare(self.own[index], self.prev[index], self.lanes)

    def unpacked(self):
        return unpack_bits(self.own, self.lanes), unpack_bits(self.prev, self.lanes)

    @classmethod
    def from_bits(cls, own_bits, prev_bits):
        return cls(pack_bits(own_bits), pack_bits(prev_bits), np.asarray(own_bits).shape[-1])

    @classmethod
    def stack(cls, shares):
        return cls(np.stack([s.own for s in shares]), np.stack([s.prev for s in shares]), shares[0].lanes)

    @classmethod
    def zeros(cls, rows, lanes):
        words = (lanes + const.LANE_BITS - 1) // const.LANE_BITS
        shape = tuple(rows) + (words,)
        return cls(np.zeros(shape, np.uint64), np.zeros(shape, np.uint64), lanes)


def share_bits(bits, rng):
    bits = np.asarray(bits, dtype=np.uint8) & 1
    x1 = rng.integers(0, 2, size=bits.shape, dtype=np.uint8)
    x2 = rng.integers(0, 2, size=bits.shape, dtype=np.uint8)
    comps = {1: x1, 2: x2, 3: bits ^ x1 ^ x2}
    return {i: BitRepShare.from_bits(comps[i], comps[(i - 2) % 3 + 1]) for i in const.PARTY_IDS}


def reconstruct_bits(shares):
    for i in const.PARTY_IDS:
        before = (i - 2) % 3 + 1
        if not np.array_equal(shares[i].prev, shares[before].own):
            raise InconsistentShare(f"Party {i}'s prev bits disagree with party {before}")
    words = shares[1].own ^ shares[2].own ^ shares[3].own
    return unpack_bits(words, shares[1].lanes)


def xor_public(party, x, bits):
    c = pack_bits(bits)
    own, prev = x.own, x.prev
    if party.id == 1:
        own = own ^ c
    elif party.id == 2:
        prev = prev ^ c
    return BitRepShare(own, prev, x.lanes)


def and_gate(party, x, y):
    """Lane-wise AND of packed sharings; all rows ride one message and one round."""
    z = (x.own & y.own) ^ (x.prev & y.own) ^ (x.own & y.prev) ^ party.zero_bits(x.own.shape)
    received = party.reshare(z.astype("<u8").tobytes())
    prev = np.frombuffer(received, dtype="<u8").astype(np.uint64).reshape(z.shape)
    gates = int(np.prod(x.rows, dtype=np.int64)) * x.lanes
    party.record_gates(gates, 1, gates)
    return BitRepShare(z, prev, x.lanes)


def open_bits_to(party, x, to, kind="aggregate"):
    """Reveal packed bits to party ``to``; returns 0/1 lanes there, None elsewhere."""
    count = int(np.prod(x.rows, dtype=np.int64)) * x.lanes
    party.authorize_open(kind, count)
    logger.debug("Party %d opens %d %s bit(s) to party %d", party.id, count, kind, to)
    with party.phase("open"):
        value = None
        if party.id == to:
            first = np.frombuffer(party.recv(party.next_id), dtype="<u8").reshape(x.own.shape)
            second = np.frombuffer(party.recv(party.prev_id), dtype="<u8").reshape(x.own.shape)
            if not np.array_equal(first, second):
                raise InconsistentShare(f"Party {to} received diverging copies while opening")
            value = unpack_bits(x.own ^ x.prev ^ first.astype(np.uint64), x.lanes)
        elif party.next_id == to:
            party.send(to, x.prev.astype("<u8").tobytes())
        else:
            party.send(to, x.own.astype("<u8").tobytes())
        party.round_barrier()
    return value
