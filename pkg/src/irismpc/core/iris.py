"""Plaintext iris codes, the masked ternary encoding and the match predicate.

A masked bit combines a code bit a and its mask bit m as m - 2*(a AND m), i.e.
-1 for a set valid bit, +1 for a clear valid bit and 0 for an unusable bit.
For two masked vectors the dot product equals ml - 2*hd, where ml counts the
bits valid in both and hd counts valid disagreements.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2

import numpy as np

from irismpc import const
from irismpc.core.errors import BoundsViolation
from irismpc.core.ring import RingElem, get_ring


def check_public_bounds(l, t_bits=const.CODE_WIDTH):
    """Raise BoundsViolation unless l < t/4 and l < t - 2^(ceil(log2 t) - 1)."""
    _check_range(l, l, t_bits)


def check_shared_bounds(l, b, t_bits):
    """Raise BoundsViolation unless b*l < t/4 and b*l < t - 2^(ceil(log2 t) - 1)."""
    _check_range(l, b * l, t_bits)


def _check_range(l, magnitude, t_bits):
    t = 1 << t_bits
    if not (4 * magnitude < t and magnitude < t - (1 << (ceil(log2(t)) - 1))):
        raise BoundsViolation(
            f"Code length {l} does not fit the comparison ring Z_2^{t_bits} "
            f"(magnitude {magnitude} must stay below {t // 4})"
        )


class IrisRecord:
    """A code bitvector with its mask, both of length l."""

    def __init__(self, code, mask, comparison_width=const.CODE_WIDTH):
        self.code = np.asarray(code, dtype=np.uint8).ravel() & 1
        self.mask = np.asarray(mask, dtype=np.uint8).ravel() & 1
        if self.code.shape != self.mask.shape:
            raise ValueError(f"Code and mask lengths differ: {self.code.size} vs {self.mask.size}")
        check_public_bounds(self.l, comparison_width)

    @property
    def l(self):
        return self.code.size

    @classmethod
    def random(cls, l, rng, mask_density=const.DEFAULT_MASK_DENSITY):
        code = rng.integers(0, 2, size=l, dtype=np.uint8)
        mask = (rng.random(l) < mask_density).astype(np.uint8)
        return cls(code, mask)

    def rotate(self, shift):
        return IrisRecord(np.roll(self.code, shift), np.roll(self.mask, shift))

    def masked(self):
        return MaskedVector.from_record(self)

    def __eq__(self, other):
        return (isinstance(other, IrisRecord)
                and np.array_equal(self.code, other.code)
                and np.array_equal(self.mask, other.mask))

    def __repr__(self):
        return f"IrisRecord(l={self.l}, valid={int(self.mask.sum())})"


class IrisDb:
    """s enrolled codes and masks stored as row-major bit matrices."""

    def __init__(self, codes, masks):
        codes = np.asarray(codes, dtype=np.uint8)
        masks = np.asarray(masks, dtype=np.uint8)
        if codes.ndim != 2 or codes.shape != masks.shape:
            raise ValueError(f"Codes {codes.shape} and masks {masks.shape} must be equal s x l matrices")
        self.codes = codes & 1
        self.masks = masks & 1

    @property
    def s(self):
        return self.codes.shape[0]

    @property
    def l(self):
        return self.codes.shape[1]

    @classmethod
    def random(cls, s, l, rng, mask_density=const.DEFAULT_MASK_DENSITY):
        codes = rng.integers(0, 2, size=(s, l), dtype=np.uint8)
        masks = (rng.random((s, l)) < mask_density).astype(np.uint8)
        return cls(codes, masks)

    @classmethod
    def from_records(cls, records, l=None):
        records = list(records)
        if not records:
            l = l if l is not None else const.DEFAULT_CODE_LENGTH
            return cls(np.zeros((0, l), np.uint8), np.zeros((0, l), np.uint8))
        return cls(np.stack([r.code for r in records]), np.stack([r.mask for r in records]))

    def row(self, i):
        return IrisRecord(self.codes[i], self.masks[i])

    def __iter__(self):
        return (self.row(i) for i in range(self.s))

    def __len__(self):
        return self.s


@dataclass
class MaskedVector:
    """Masked ternary encoding over Z_2^16 (entries -1, 0, 1)."""

    entries: np.ndarray

    @classmethod
    def from_record(cls, record):
        return cls(encode_masked(record.code, record.mask))

    @property
    def l(self):
        return self.entries.shape[-1]

    def signed(self):
        return get_ring(const.CODE_WIDTH).signed(self.entries)


def encode_masked(code, mask, k=const.CODE_WIDTH):
    """Vectorized masked encoding of bit arrays into Z_2^k."""
    code = np.asarray(code).astype(np.int64)
    mask = np.asarray(mask).astype(np.int64)
    return get_ring(k).from_ints(mask - 2 * (code & mask))


def to_masked(bit, mask_bit):
    return RingElem(mask_bit - 2 * (bit & mask_bit), const.CODE_WIDTH)


def count_ones_masked(v):
    """Number of -1 entries, as half the sum of v*v - v."""
    signed = v.signed()
    return int(np.sum(signed * signed - signed)) // 2


def hamming_distance_ring(a, b, k=32):
    """Hamming distance of 0/1 ring vectors as sum(a) + sum(b) - 2<a, b> in Z_2^k."""
    ring = get_ring(k)
    a = ring.from_ints(a)
    b = ring.from_ints(b)
    total = RingElem(int(a.sum(dtype=np.uint64)), k) + int(b.sum(dtype=np.uint64))
    total = total - 2 * int(ring.matmul(a[np.newaxis], b[:, np.newaxis])[0, 0])
    return total.value


@dataclass(frozen=True)
class MatchParams:
    """Match threshold: hd/ml < match_ratio, approximated by a/b = 1 - 2*match_ratio.

    Either give match_ratio (a and b are derived with b = 2^precision_bits) or
    give a and b directly, in which case b must be a power of two.
    """

    match_ratio: float = const.DEFAULT_MATCH_RATIO
    precision_bits: int = const.DEFAULT_PRECISION_BITS
    a: int = None
    b: int = None
    threshold: Fraction = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.a is None and self.b is None:
            if not 0.0 <= self.match_ratio <= 1.0:
                raise ValueError(f"match_ratio must lie in [0, 1], got {self.match_ratio}")
            f = 1 - 2 * Fraction(self.match_ratio).limit_denominator(1 << 24)
            b = 1 << self.precision_bits
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "a", round(f * b))
            object.__setattr__(self, "threshold", f)
        else:
            if self.a is None or self.b is None:
                raise ValueError("a and b must be given together")
            if self.b <= 0 or self.b & (self.b - 1):
                raise ValueError(f"b must be a power of two, got {self.b}")
            object.__setattr__(self, "precision_bits", self.b.bit_length() - 1)
            object.__setattr__(self, "threshold", Fraction(self.a, self.b))
            object.__setattr__(self, "match_ratio", float((1 - self.threshold) / 2))
        if not -self.b <= self.a <= self.b:
            raise ValueError(f"|a| must not exceed b, got a={self.a} b={self.b}")

    @classmethod
    def from_ratio(cls, match_ratio, precision_bits=const.DEFAULT_PRECISION_BITS):
        return cls(match_ratio=match_ratio, precision_bits=precision_bits)

    @classmethod
    def from_fraction(cls, a, b):
        return cls(a=a, b=b)

    @property
    def comparison_width(self):
        """Width of the ring the shared-mask comparison a*ml - b*dot lives in."""
        return const.CODE_WIDTH + self.precision_bits

    def validate(self, l):
        check_public_bounds(l, const.CODE_WIDTH)
        check_shared_bounds(l, self.b, self.comparison_width)

    def public_threshold(self, ml):
        """ceil(f * ml) for public mask counts."""
        ml = np.asarray(ml, dtype=np.int64)
        num, den = self.threshold.numerator, self.threshold.denominator
        return -((-num * ml) // den)

    def matches(self, hd, ml, public_masks=False):
        """Row predicate on Hamming distance and valid-bit count.

        Shared masks match when b*(ml - 2hd) > a*ml; public masks match when
        ml - 2hd > ceil(f*ml). Rows with ml = 0 never match.
        """
        hd = np.asarray(hd, dtype=np.int64)
        ml = np.asarray(ml, dtype=np.int64)
        dot = ml - 2 * hd
        if public_masks:
            return dot > self.public_threshold(ml)
        return self.b * dot > self.a * ml


def plain_membership(query, db, params, public_masks=False):
    """True iff some database row matches the query."""
    return bool(np.any(plain_row_matches(query, db, params, public_masks)))


def plain_row_matches(query, db, params, public_masks=False):
    valid = db.masks & query.mask
    hd = np.count_nonzero((db.codes ^ query.code) & valid, axis=1)
    ml = np.count_nonzero(valid, axis=1)
    return params.matches(hd, ml, public_masks)


def plain_masked_comparison(query_mv, db_mv, params, public_masks=False):
    """Masked-vector form of the row predicate, evaluated in Z_2^16."""
    ring = get_ring(const.CODE_WIDTH)
    q = query_mv.entries[np.newaxis]
    d = db_mv.entries[:, np.newaxis]
    dot = int(ring.signed(ring.matmul(q, d))[0, 0])
    ml = int(ring.signed(ring.matmul(ring.mul(q, q), ring.mul(d, d)))[0, 0])
    if public_masks:
        return dot > int(params.public_threshold(ml))
    return params.b * dot > params.a * ml


def rotation_stride(l):
    return max(1, l // const.ROTATION_STEPS)


def rotation_offsets(r):
    if r < 1 or r % 2 == 0:
        raise ValueError(f"Rotation count must be a positive odd number, got {r}")
    half = (r - 1) // 2
    return list(range(-half, half + 1))


def expand_rotations(query, r=const.DEFAULT_ROTATIONS):
    """The query rotated by offsets -(r-1)/2 .. (r-1)/2 strides of l/64 bits."""
    stride = rotation_stride(query.l)
    return [query.rotate(offset * stride) for offset in rotation_offsets(r)]
