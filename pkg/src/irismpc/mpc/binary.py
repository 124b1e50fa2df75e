"""Binary circuits on packed XOR-replicated shares.

Every gadget works on BitRepShare rows (one row per bit position) whose lanes
are independent comparisons; an AND layer over any number of rows and lanes
costs one message and one round. Gate counts are recorded on the party under
its current phase.
"""

import logging

import numpy as np

from irismpc import const
from irismpc.mpc.replicated import BitRepShare, and_gate, pack_bits

logger = logging.getLogger(__name__)


def share_split(party, x, nbits=None):
    """Binary sharings of the three additive components of x, bits 0..nbits-1.

    Local only. Component j is shared as party j holding (x_j, 0) and party
    j+1 holding (0, x_j).

    Returns:
        Tuple of three BitRepShare with rows (nbits,) and one lane per element of x
    """
    nbits = nbits or x.k
    ring = x.ring
    own = x.own.ravel()
    lanes = own.size
    own_planes = pack_bits(ring.bit_planes(own, nbits))
    prev_planes = pack_bits(ring.bit_planes(x.prev.ravel(), nbits))
    zero = np.zeros_like(own_planes)
    components = []
    for j in const.PARTY_IDS:
        if party.id == j:
            components.append(BitRepShare(own_planes, zero, lanes))
        elif party.id == j % 3 + 1:
            components.append(BitRepShare(zero, prev_planes, lanes))
        else:
            components.append(BitRepShare(zero, zero.copy(), lanes))
    return tuple(components)


def full_adder(party, a, b, c):
    """(a xor b xor c, majority(a, b, c)) with a single AND."""
    t1 = a ^ c
    t2 = b ^ c
    return t1 ^ b, and_gate(party, t1, t2) ^ c


def bin_add(party, a, b, full_output=True):
    """Ripple-carry sum of two w-bit sharings (rows are bit positions, LSB first).

    With ``full_output`` the w+1 bit sum costs w ANDs; otherwise only bits
    0..w-1 are produced and the final carry is skipped (w-1 ANDs).
    """
    w = a.own.shape[0]
    carries_needed = w if full_output else w - 1
    sums = [a[0] ^ b[0]]
    carry = and_gate(party, a[0], b[0]) if carries_needed >= 1 else None
    for i in range(1, w):
        sums.append(a[i] ^ b[i] ^ carry)
        if i < carries_needed:
            carry = and_gate(party, a[i] ^ carry, b[i] ^ carry) ^ carry
    if full_output:
        sums.append(carry)
    return BitRepShare.stack(sums)


def bit_extract(party, x, indices):
    """Binary sharings of the requested bits of the integer x_1 + x_2 + x_3.

    A full-adder layer reduces the three components to two (carries for
    positions 0..max-1 only), then a truncated ripple-carry adder produces
    positions 1..max. Indices may exceed k-1 when x has been reinterpreted in
    a wider ring, which exposes the overflow bits of the component sum.

    Returns:
        List of BitRepShare, one per index, each with one lane per element of x
    """
    indices = list(indices)
    top = max(indices)
    if min(indices) < 0 or top >= x.k:
        raise ValueError(f"Bit indices {indices} out of range for k={x.k}")
    a, b, c = share_split(party, x, top + 1)
    t1 = a ^ c
    t2 = b ^ c
    sums = t1 ^ b
    bits = [sums[0]]
    if top > 0:
        carries = and_gate(party, t1[:top], t2[:top]) ^ c[:top]
        added = bin_add(party, carries, sums[1:top + 1], full_output=False)
        bits.extend(added[i] for i in range(top))
    return [bits[i] for i in indices]


def msb(party, x):
    """Sign bit of x in Z_2^k: 2k-3 ANDs in k-1 rounds per lane."""
    logger.debug("Party %d extracts the MSB over Z_2^%d for %d lane(s)", party.id, x.k, x.own.size)
    return bit_extract(party, x, [x.k - 1])[0]


def or_tree(party, x, group_sizes=None):
    """OR of the lanes of x, per contiguous group of lanes.

    Groups are padded to a common length with public zeros and reduced by a
    balanced tree: ceil(log2 n) rounds, n-1 ANDs per group of padded length n.

    Args:
        party: Party
        x: BitRepShare with a single row of lanes
        group_sizes: lengths of consecutive lane groups, one group by default

    Returns:
        BitRepShare with one lane per group
    """
    own_bits, prev_bits = x.unpacked()
    group_sizes = [x.lanes] if group_sizes is None else list(group_sizes)
    if sum(group_sizes) != x.lanes or any(size < 1 for size in group_sizes):
        raise ValueError(f"Group sizes {group_sizes} do not partition {x.lanes} lanes")
    width = max(group_sizes)
    logger.debug("Party %d ORs %d group(s) of up to %d lane(s)", party.id, len(group_sizes), width)
    own = np.zeros((len(group_sizes), width), dtype=np.uint8)
    prev = np.zeros_like(own)
    start = 0
    for g, size in enumerate(group_sizes):
        own[g, :size] = own_bits[start:start + size]
        prev[g, :size] = prev_bits[start:start + size]
        start += size
    while own.shape[1] > 1:
        half = own.shape[1] // 2
        left = BitRepShare.from_bits(own[:, :half], prev[:, :half])
        right = BitRepShare.from_bits(own[:, half:2 * half], prev[:, half:2 * half])
        merged = left ^ right ^ and_gate(party, left, right)
        merged_own, merged_prev = merged.unpacked()
        own = np.concatenate([merged_own, own[:, 2 * half:]], axis=1)
        prev = np.concatenate([merged_prev, prev[:, 2 * half:]], axis=1)
    return BitRepShare.from_bits(own[:, 0], prev[:, 0])
