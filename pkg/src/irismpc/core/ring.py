"""Fixed-width arithmetic over Z_{2^k}.

Scalars are :class:`RingElem` values. Protocol code works on whole numpy arrays
through :class:`Ring`, which stores width-k elements in the smallest unsigned
word that holds them (16, 32 or 64 bits) and masks after every operation when
k is narrower than the word.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class RingElem:
    """A single element of Z_{2^k}."""

    value: int
    k: int = 16

    def __post_init__(self):
        if not 1 <= self.k <= 64:
            raise ValueError(f"Unsupported ring width: {self.k}")
        object.__setattr__(self, "value", int(self.value) % (1 << self.k))

    def _check(self, other):
        if isinstance(other, RingElem):
            if other.k != self.k:
                raise ValueError(f"Width mismatch: {self.k} vs {other.k}")
            return other.value
        return int(other)

    def __add__(self, other):
        return RingElem(self.value + self._check(other), self.k)

    __radd__ = __add__

    def __sub__(self, other):
        return RingElem(self.value - self._check(other), self.k)

    def __rsub__(self, other):
        return RingElem(self._check(other) - self.value, self.k)

    def __mul__(self, other):
        return RingElem(self.value * self._check(other), self.k)

    __rmul__ = __mul__

    def __neg__(self):
        return RingElem(-self.value, self.k)

    @property
    def signed(self):
        """Canonical signed representative in [-2^(k-1), 2^(k-1))."""
        half = 1 << (self.k - 1)
        return self.value - (1 << self.k) if self.value >= half else self.value

    @property
    def msb(self):
        return self.value >> (self.k - 1)


class Ring:
    """Vectorized Z_{2^k} arithmetic on numpy arrays."""

    def __init__(self, k):
        if not 1 <= k <= 64:
            raise ValueError(f"Unsupported ring width: {k}")
        self.k = k
        if k <= 16:
            self.dtype = np.dtype(np.uint16)
        elif k <= 32:
            self.dtype = np.dtype(np.uint32)
        else:
            self.dtype = np.dtype(np.uint64)
        self.modulus = 1 << k
        self.mask = self.modulus - 1
        self.native = k == self.dtype.itemsize * 8
        self.nbytes = (k + 7) // 8
        self._mask_word = self.dtype.type(self.mask)

    def __repr__(self):
        return f"Ring(k={self.k})"

    def __eq__(self, other):
        return isinstance(other, Ring) and other.k == self.k

    def __hash__(self):
        return hash(("Ring", self.k))

    def reduce(self, arr):
        """Bring an array of this ring's dtype back into [0, 2^k)."""
        arr = np.asarray(arr, dtype=self.dtype)
        if self.native:
            return arr
        return arr & self._mask_word

    def from_ints(self, values):
        """Embed (possibly negative) integers into the ring."""
        arr = np.asarray(values)
        if arr.dtype == object:
            flat = [int(v) % self.modulus for v in arr.ravel()]
            wide = np.array(flat, dtype=np.uint64).reshape(arr.shape)
        elif arr.dtype.kind in "bi":
            wide = arr.astype(np.int64).astype(np.uint64)
        else:
            wide = arr.astype(np.uint64)
        return (wide & np.uint64(self.mask)).astype(self.dtype)

    def scalar(self, c):
        return self.dtype.type(int(c) % self.modulus)

    def zeros(self, shape):
        return np.zeros(shape, dtype=self.dtype)

    def random(self, rng, shape):
        """Uniform elements drawn from a numpy Generator."""
        words = rng.integers(0, np.iinfo(self.dtype).max, size=shape,
                             dtype=self.dtype, endpoint=True)
        return self.reduce(words)

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(np.negative(a))

    def mul(self, a, b):
        return self.reduce(a * b)

    def mul_scalar(self, a, c):
        return self.reduce(a * self.scalar(c))

    def matmul(self, a, b):
        return self.reduce(np.matmul(a, b))

    def signed(self, arr):
        """Signed view as int64 (k <= 63)."""
        wide = np.asarray(arr).astype(np.int64)
        half = 1 << (self.k - 1)
        return np.where(wide >= half, wide - self.modulus, wide)

    def msb(self, arr):
        return ((np.asarray(arr) >> self.dtype.type(self.k - 1)) & self.dtype.type(1)).astype(np.uint8)

    def bit_planes(self, arr, nbits):
        """Bits 0..nbits-1 of each element, shape (nbits,) + arr.shape."""
        arr = np.asarray(arr).astype(np.uint64)
        shifts = np.arange(nbits, dtype=np.uint64).reshape((nbits,) + (1,) * arr.ndim)
        return ((arr[np.newaxis] >> shifts) & np.uint64(1)).astype(np.uint8)

    def convert(self, arr, target):
        """Reinterpret the representatives of ``arr`` in another ring."""
        return target.reduce(np.asarray(arr).astype(target.dtype))

    def to_bytes(self, arr):
        """Little-endian encoding with ceil(k/8) bytes per element."""
        arr = np.ascontiguousarray(arr, dtype=self.dtype).ravel()
        if self.nbytes == self.dtype.itemsize:
            return arr.astype(self.dtype.newbyteorder("<")).tobytes()
        wide = arr.astype("<u8").view(np.uint8).reshape(-1, 8)
        return wide[:, :self.nbytes].tobytes()

    def from_bytes(self, data, shape=None):
        if len(data) % self.nbytes:
            raise ValueError(f"Payload of {len(data)} bytes is not a multiple of {self.nbytes}")
        if self.nbytes == self.dtype.itemsize:
            arr = np.frombuffer(data, dtype=self.dtype.newbyteorder("<")).astype(self.dtype)
        else:
            raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, self.nbytes)
            wide = np.zeros((raw.shape[0], 8), dtype=np.uint8)
            wide[:, :self.nbytes] = raw
            arr = wide.view("<u8").ravel().astype(self.dtype)
        arr = self.reduce(arr)
        return arr.reshape(shape) if shape is not None else arr


@lru_cache(maxsize=None)
def get_ring(k):
    """Shared :class:`Ring` instance for width k."""
    return Ring(k)
