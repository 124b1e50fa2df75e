"""Moving sharings between rings: constant lifting, 3-party OT, bit injection, lifting."""

import logging
from dataclasses import dataclass

import numpy as np

from irismpc import const
from irismpc.core.ring import get_ring
from irismpc.mpc.binary import bit_extract
from irismpc.mpc.replicated import RepShare

logger = logging.getLogger(__name__)


def const_lift(x, d):
    """d*x over Z_{2^k * d} from x over Z_2^k, without interaction.

    d must be a power of two so the target is again a power-of-two ring.
    """
    d = int(d)
    if d < 1 or d & (d - 1):
        raise ValueError(f"Lift factor must be a power of two, got {d}")
    target = x.k + d.bit_length() - 1
    return x.convert(target).mul_public(d)


@dataclass
class OtRequest:
    """One batch of 1-out-of-2 transfers in Z_2^k.

    The sender fills ``m0``/``m1``; receiver and helper fill ``choice``.
    """

    k: int
    lanes: int
    m0: np.ndarray = None
    m1: np.ndarray = None
    choice: np.ndarray = None


def _ot_pads(prf, request):
    ring = get_ring(request.k)
    return prf.draw(ring, (request.lanes,), "ot"), prf.draw(ring, (request.lanes,), "ot")


def three_ot(party, requests):
    """OT with party 1 as sender, 2 as receiver and 3 as helper, in one round.

    The sender and helper derive the pads w0, w1 from the seed they share.
    The sender sends (w0 ^ m0, w1 ^ m1), the helper sends w_c, and the receiver
    unmasks m_c. All requests travel in a single message per sender.

    Returns:
        List with m_c per request at the receiver, None entries elsewhere
    """
    outputs = [None] * len(requests)
    logger.debug("Party %d runs %d OT batch(es), %d transfer(s)", party.id, len(requests),
                 sum(r.lanes for r in requests))
    with party.phase("ot"):
        if party.id == const.OT_SENDER:
            payload = []
            for request in requests:
                ring = get_ring(request.k)
                w0, w1 = _ot_pads(party.prf_prev, request)
                payload.append(ring.to_bytes(w0 ^ ring.from_ints(request.m0)))
                payload.append(ring.to_bytes(w1 ^ ring.from_ints(request.m1)))
            party.send(const.OT_RECEIVER, b"".join(payload))
        elif party.id == const.OT_HELPER:
            payload = []
            for request in requests:
                ring = get_ring(request.k)
                w0, w1 = _ot_pads(party.prf_own, request)
                payload.append(ring.to_bytes(np.where(request.choice.astype(bool), w1, w0)))
            party.send(const.OT_RECEIVER, b"".join(payload))
        else:
            masked = party.recv(const.OT_SENDER)
            pads = party.recv(const.OT_HELPER)
            masked_offset = pad_offset = 0
            for idx, request in enumerate(requests):
                ring = get_ring(request.k)
                size = request.lanes * ring.nbytes
                k0 = ring.from_bytes(masked[masked_offset:masked_offset + size])
                k1 = ring.from_bytes(masked[masked_offset + size:masked_offset + 2 * size])
                w_c = ring.from_bytes(pads[pad_offset:pad_offset + size])
                masked_offset += 2 * size
                pad_offset += size
                outputs[idx] = np.where(request.choice.astype(bool), k1, k0) ^ w_c
        party.round_barrier()
    return outputs


def bit_inject(party, bits, widths):
    """Arithmetic sharings over Z_2^w of binary-shared bits, in two rounds.

    Party 1 knows x1 and x3, so it offers m_j = (j ^ x1 ^ x3) - c1 - c3 for
    j in {0, 1}, with c1 and c3 drawn from the seeds it shares with parties 2
    and 3. Party 2 obtains c2 = m_{x2} by OT and forwards it to party 3.

    Args:
        party: Party
        bits: list of BitRepShare with a single row each
        widths: target width per entry of ``bits``

    Returns:
        List of RepShare, one lane per bit
    """
    requests, draws = [], []
    for x, k in zip(bits, widths):
        ring = get_ring(k)
        own, prev = (b.astype(np.uint8) for b in x.unpacked())
        shape = (x.lanes,)
        c1 = c3 = None
        if party.id == 1:
            c1 = party.prf_own.draw(ring, shape, "inject")
            c3 = party.prf_prev.draw(ring, shape, "inject")
            base = own ^ prev
            m0 = ring.sub(ring.sub(ring.from_ints(base), c1), c3)
            m1 = ring.sub(ring.sub(ring.from_ints(base ^ 1), c1), c3)
            requests.append(OtRequest(k, x.lanes, m0=m0, m1=m1))
        elif party.id == 2:
            c1 = party.prf_prev.draw(ring, shape, "inject")
            requests.append(OtRequest(k, x.lanes, choice=own))
        else:
            c3 = party.prf_own.draw(ring, shape, "inject")
            requests.append(OtRequest(k, x.lanes, choice=prev))
        draws.append((c1, c3))

    received = three_ot(party, requests)

    results = []
    if party.id == 2:
        party.send(3, b"".join(get_ring(k).to_bytes(c2) for c2, k in zip(received, widths)))
        for c2, (c1, _), k in zip(received, draws, widths):
            results.append(RepShare(get_ring(k).reduce(c2), c1, k))
    elif party.id == 3:
        payload = party.recv(2)
        offset = 0
        for x, (_, c3), k in zip(bits, draws, widths):
            ring = get_ring(k)
            size = x.lanes * ring.nbytes
            c2 = ring.from_bytes(payload[offset:offset + size])
            offset += size
            results.append(RepShare(c3, c2, k))
    else:
        for (c1, c3), k in zip(draws, widths):
            results.append(RepShare(c1, c3, k))
    party.round_barrier()
    return results


def lift(party, x, m):
    """Same integers as x, shared over Z_{2^(k+m)} (plaintext must be below 2^k).

    The component sum x1 + x2 + x3 overflows 2^k by j in {0, 1, 2}. Bits k and
    k+1 of the unreduced sum give j, which is injected into Z_2^(m-1) and
    Z_2^m, lifted by 2^(k+1) and 2^k and subtracted.
    """
    if m < 2:
        raise ValueError(f"Lifting needs at least 2 extra bits, got {m}")
    k = x.k
    logger.debug("Party %d lifts %d lane(s) from Z_2^%d to Z_2^%d", party.id, x.own.size, k, k + m)
    wide = x.convert(k + m)
    high, low = bit_extract(party, wide, [k + 1, k])
    high_arith, low_arith = bit_inject(party, [high, low], [m - 1, m])
    correction = (const_lift(high_arith, 1 << (k + 1)) + const_lift(low_arith, 1 << k)).reshape(x.shape)
    return wide - correction
