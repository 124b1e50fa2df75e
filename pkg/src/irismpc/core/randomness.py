"""Correlated randomness from pairwise seeds.

Seed i is known to parties i and i+1, so party i holds (seed_i, seed_{i-1}),
mirroring the replicated share topology. Each seed keys an AES-128 counter
mode PRF; two holders that request the same (tag, counter) sequence obtain
identical streams without talking to each other.
"""

import hashlib
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from irismpc import const

SEED_BYTES = 16


@dataclass(frozen=True)
class SeedPair:
    seed_own: bytes
    seed_prev: bytes

    def __post_init__(self):
        for seed in (self.seed_own, self.seed_prev):
            if len(seed) != SEED_BYTES:
                raise ValueError(f"Seeds must be {SEED_BYTES} bytes, got {len(seed)}")


def deal_seeds(rng):
    """Seed pairs for parties 1..3 from a numpy Generator."""
    seeds = [rng.bytes(SEED_BYTES) for _ in const.PARTY_IDS]
    return {i: SeedPair(seeds[i - 1], seeds[(i - 2) % 3]) for i in const.PARTY_IDS}


class Prf:
    """AES-128-CTR keyed by a seed, with an independent draw counter per tag."""

    def __init__(self, key):
        if len(key) != SEED_BYTES:
            raise ValueError(f"PRF key must be {SEED_BYTES} bytes")
        self._key = key
        self._counters = defaultdict(int)

    def counter(self, tag):
        return self._counters[tag]

    def draw_bytes(self, tag, nbytes):
        ctr = self._counters[tag]
        self._counters[tag] += 1
        # tag || draw counter || block counter
        nonce = (hashlib.blake2b(tag.encode(), digest_size=4).digest()
                 + ctr.to_bytes(4, "big") + bytes(8))
        encryptor = Cipher(algorithms.AES(self._key), modes.CTR(nonce)).encryptor()
        return encryptor.update(bytes(nbytes)) + encryptor.finalize()

    def draw(self, ring, shape, tag):
        """Uniform elements of ``ring`` with the given shape."""
        count = int(np.prod(shape, dtype=np.int64))
        data = self.draw_bytes(tag, count * ring.dtype.itemsize)
        words = np.frombuffer(data, dtype=ring.dtype).reshape(shape)
        return ring.reduce(words.copy())

    def draw_words(self, shape, tag):
        """Uniform 64-bit words for packed binary lanes."""
        count = int(np.prod(shape, dtype=np.int64))
        data = self.draw_bytes(tag, count * 8)
        return np.frombuffer(data, dtype=np.uint64).reshape(shape).copy()

    def draw_bits(self, shape, tag):
        count = int(np.prod(shape, dtype=np.int64))
        data = self.draw_bytes(tag, (count + 7) // 8)
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")[:count]
        return bits.reshape(shape)
