"""Degree-2 Galois ring GR(2^k, 2) = Z_{2^k}[X]/(X^2 - X - 1).

Elements are c0 + c1*X. In array form an element occupies the last axis of
size 2, so a packed vector of shape (n, 2) flattens back to the 2n ring
values it was built from.
"""

from dataclasses import dataclass
from math import ceil, log2

import numpy as np

from irismpc.core.errors import NonUnit
from irismpc.core.ring import get_ring

# Inverses in F_4 = F_2[X]/(X^2 + X + 1), keyed by (c0 mod 2, c1 mod 2)
_F4_INVERSE = {(1, 0): (1, 0), (0, 1): (1, 1), (1, 1): (0, 1)}


@dataclass(frozen=True)
class GrElem:
    c0: int
    c1: int
    k: int = 16

    def __post_init__(self):
        mod = 1 << self.k
        object.__setattr__(self, "c0", int(self.c0) % mod)
        object.__setattr__(self, "c1", int(self.c1) % mod)

    @classmethod
    def constant(cls, c, k=16):
        return cls(c, 0, k)

    def __add__(self, other):
        return GrElem(self.c0 + other.c0, self.c1 + other.c1, self.k)

    def __sub__(self, other):
        return GrElem(self.c0 - other.c0, self.c1 - other.c1, self.k)

    def __neg__(self):
        return GrElem(-self.c0, -self.c1, self.k)

    def __mul__(self, other):
        return gr_mul(self, other)

    @property
    def is_unit(self):
        return (self.c0 & 1, self.c1 & 1) != (0, 0)

    def to_array(self):
        return get_ring(self.k).from_ints([self.c0, self.c1])


def gr_mul(a, b):
    """Product reduced with X^2 = X + 1."""
    if a.k != b.k:
        raise ValueError(f"Width mismatch: {a.k} vs {b.k}")
    c0 = a.c0 * b.c0 + a.c1 * b.c1
    c1 = a.c0 * b.c1 + a.c1 * b.c0 + a.c1 * b.c1
    return GrElem(c0, c1, a.k)


def gr_inverse(a):
    """Multiplicative inverse, lifted from F_4 by Newton iteration.

    Raises:
        NonUnit: if ``a`` projects to zero in F_4.
    """
    if not a.is_unit:
        raise NonUnit(f"{a.c0} + {a.c1}X is not a unit")
    y = GrElem(*_F4_INVERSE[(a.c0 & 1, a.c1 & 1)], a.k)
    two = GrElem.constant(2, a.k)
    for _ in range(max(1, ceil(log2(a.k)))):
        y = y * (two - a * y)
    return y


@dataclass(frozen=True)
class ExceptionalSeq:
    """Evaluation points with pairwise unit differences; index 0 holds the secret."""

    points: tuple

    def __post_init__(self):
        if len(self.points) != 4:
            raise ValueError(f"Exceptional sequence needs 4 points, got {len(self.points)}")
        for i, x in enumerate(self.points):
            for y in self.points[i + 1:]:
                if not (x - y).is_unit:
                    raise NonUnit(f"Difference of {x} and {y} is not a unit")

    @classmethod
    def canonical(cls, k=16):
        """The points 0, 1, X, 1+X; party i evaluates at point i."""
        return cls((GrElem(0, 0, k), GrElem(1, 0, k), GrElem(0, 1, k), GrElem(1, 1, k)))

    @property
    def k(self):
        return self.points[0].k

    def party_point(self, party_id):
        return self.points[party_id]


def lagrange_coeffs(points, holders=(1, 2, 3), target=None):
    """Weights interpolating the value at ``target`` from the holders' evaluations.

    Args:
        points: ExceptionalSeq
        holders: indices into ``points`` of the three evaluating parties
        target: GrElem to interpolate at, the secret point 0 by default

    Returns:
        List of GrElem, one per holder
    """
    if len(set(holders)) != len(holders):
        raise ValueError(f"Holders must be distinct: {holders}")
    target = target if target is not None else points.points[0]
    coeffs = []
    for i in holders:
        xi = points.points[i]
        lam = GrElem.constant(1, points.k)
        for j in holders:
            if j == i:
                continue
            xj = points.points[j]
            lam = lam * (target - xj) * gr_inverse(xi - xj)
        coeffs.append(lam)
    return coeffs


class GaloisRing:
    """Vectorized GR(2^k, 2) arithmetic over arrays with a trailing axis of 2."""

    def __init__(self, k=16):
        self.k = k
        self.base = get_ring(k)
        self.points = ExceptionalSeq.canonical(k)

    def pack(self, values):
        """Pair consecutive ring values (c_{2i}, c_{2i+1}) into elements."""
        values = np.asarray(values, dtype=self.base.dtype)
        if values.shape[-1] % 2:
            pad = [(0, 0)] * (values.ndim - 1) + [(0, 1)]
            values = np.pad(values, pad)
        return values.reshape(values.shape[:-1] + (values.shape[-1] // 2, 2))

    def unpack(self, elems, length=None):
        flat = elems.reshape(elems.shape[:-2] + (elems.shape[-2] * 2,))
        return flat if length is None else flat[..., :length]

    def broadcast(self, elem, shape):
        out = np.empty(tuple(shape) + (2,), dtype=self.base.dtype)
        out[..., 0] = self.base.scalar(elem.c0)
        out[..., 1] = self.base.scalar(elem.c1)
        return out

    def add(self, a, b):
        return self.base.reduce(a + b)

    def mul(self, a, b):
        a0, a1 = a[..., 0], a[..., 1]
        b0, b1 = b[..., 0], b[..., 1]
        out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=self.base.dtype)
        out[..., 0] = a0 * b0 + a1 * b1
        out[..., 1] = a0 * b1 + a1 * b0 + a1 * b1
        return self.base.reduce(out)

    def mul_elem(self, a, elem):
        return self.mul(a, self.broadcast(elem, a.shape[:-1]))

    def constant_term_dot(self, a, b):
        """Constant term of sum_i a_i * b_i, i.e. sum_i a_i.c0*b_i.c0 + a_i.c1*b_i.c1.

        ``a`` is (n, m, 2) and ``b`` is (q, m, 2); the result is (q, n). The
        interleaved layout makes this a single length-2m product per pair.
        """
        lhs = b.reshape(b.shape[0], b.shape[1] * 2)
        rhs = a.reshape(a.shape[0], a.shape[1] * 2)
        return self.base.matmul(lhs, rhs.T)
