"""On-disk containers.

IRMP holds a plaintext database: header then packed code bits then packed
mask bits, row-major, little-endian bit order. IRS1 holds one party's share
material as a sequence of sections, each with its own header followed by
little-endian share words of ceil(k/8) bytes.
"""

import json
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from irismpc import const
from irismpc.core.errors import FormatError
from irismpc.core.iris import IrisDb
from irismpc.core.randomness import SeedPair
from irismpc.core.ring import get_ring

logger = logging.getLogger(__name__)

DB_HEADER = struct.Struct("<4sHIQ")
SECTION_HEADER = struct.Struct("<4sHBBBBBIQ")

FLAG_LAMBDA_SCALED = 0x01

# Number of (s, l) word arrays a section carries per backend
_ARRAYS_PER_BACKEND = {"replicated": 2, "shamir-galois": 1}
_BACKEND_NAMES = {v: k for k, v in const.BACKEND_IDS.items()}


def encode_bits(bits):
    return np.packbits(np.asarray(bits, dtype=np.uint8).ravel(), bitorder="little").tobytes()


def decode_bits(data, count):
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return bits[:count]


def db_to_bytes(db):
    header = DB_HEADER.pack(const.DB_MAGIC, const.DB_VERSION, db.l, db.s)
    return header + encode_bits(db.codes) + encode_bits(db.masks)


def db_from_bytes(data):
    if len(data) < DB_HEADER.size:
        raise FormatError(f"Database file too short: {len(data)} bytes")
    magic, version, l, s = DB_HEADER.unpack_from(data)
    if magic != const.DB_MAGIC:
        raise FormatError(f"Bad database magic {magic!r}")
    if version != const.DB_VERSION:
        raise FormatError(f"Unsupported database version {version}")
    section = (s * l + 7) // 8
    if len(data) != DB_HEADER.size + 2 * section:
        raise FormatError(f"Database size {len(data)} does not match s={s}, l={l}")
    body = data[DB_HEADER.size:]
    codes = decode_bits(body[:section], s * l).reshape(s, l)
    masks = decode_bits(body[section:], s * l).reshape(s, l)
    return IrisDb(codes, masks)


def write_db(db, path):
    with open(path, "wb") as f:
        f.write(db_to_bytes(db))
    logger.info("Wrote database s=%d l=%d to %s", db.s, db.l, path)


def read_db(path):
    with open(path, "rb") as f:
        return db_from_bytes(f.read())


@dataclass
class ShareSection:
    """One party's shares of an s x l matrix in Z_2^k.

    Replicated sections carry (own, prev); Shamir sections carry the packed
    Galois evaluations flattened back to length l.
    """

    backend: str
    kind: int
    k: int
    party: int
    arrays: list
    lambda_scaled: bool = False
    l: int = field(init=False)
    s: int = field(init=False)

    def __post_init__(self):
        expected = _ARRAYS_PER_BACKEND.get(self.backend)
        if expected is None:
            raise ValueError(f"Unknown backend: {self.backend}")
        if len(self.arrays) != expected:
            raise ValueError(f"{self.backend} sections carry {expected} arrays, got {len(self.arrays)}")
        self.s, self.l = self.arrays[0].shape

    def to_bytes(self):
        ring = get_ring(self.k)
        flags = FLAG_LAMBDA_SCALED if self.lambda_scaled else 0
        header = SECTION_HEADER.pack(const.SHARE_MAGIC, const.SHARE_VERSION,
                                     const.BACKEND_IDS[self.backend], self.kind, self.k,
                                     self.party, flags, self.l, self.s)
        return header + b"".join(ring.to_bytes(a) for a in self.arrays)


def sections_from_bytes(data):
    sections = []
    offset = 0
    while offset < len(data):
        if len(data) - offset < SECTION_HEADER.size:
            raise FormatError("Truncated share section header")
        magic, version, backend_id, kind, k, party, flags, l, s = SECTION_HEADER.unpack_from(data, offset)
        if magic != const.SHARE_MAGIC:
            raise FormatError(f"Bad share magic {magic!r}")
        if version != const.SHARE_VERSION:
            raise FormatError(f"Unsupported share version {version}")
        backend = _BACKEND_NAMES.get(backend_id)
        if backend is None:
            raise FormatError(f"Unknown backend id {backend_id}")
        offset += SECTION_HEADER.size
        ring = get_ring(k)
        size = s * l * ring.nbytes
        arrays = []
        for _ in range(_ARRAYS_PER_BACKEND[backend]):
            chunk = data[offset:offset + size]
            if len(chunk) != size:
                raise FormatError("Truncated share section payload")
            arrays.append(ring.from_bytes(chunk, (s, l)))
            offset += size
        sections.append(ShareSection(backend, kind, k, party, arrays, bool(flags & FLAG_LAMBDA_SCALED)))
    return sections


def write_sections(sections, path):
    with open(path, "wb") as f:
        for section in sections:
            f.write(section.to_bytes())


def read_sections(path):
    with open(path, "rb") as f:
        return sections_from_bytes(f.read())


def write_public_masks(masks, path):
    masks = np.asarray(masks, dtype=np.uint8)
    header = DB_HEADER.pack(const.DB_MAGIC, const.DB_VERSION, masks.shape[1], masks.shape[0])
    with open(path, "wb") as f:
        f.write(header + encode_bits(masks))


def read_public_masks(path):
    with open(path, "rb") as f:
        data = f.read()
    magic, _, l, s = DB_HEADER.unpack_from(data)
    if magic != const.DB_MAGIC:
        raise FormatError(f"Bad mask file magic {magic!r}")
    return decode_bits(data[DB_HEADER.size:], s * l).reshape(s, l)


def write_seed_file(seed_pair, party, path):
    with open(path, "w") as f:
        json.dump({"party": party, "seed_own": seed_pair.seed_own.hex(),
                   "seed_prev": seed_pair.seed_prev.hex()}, f, indent=2)


def read_seed_file(path):
    with open(path) as f:
        payload = json.load(f)
    try:
        return payload["party"], SeedPair(bytes.fromhex(payload["seed_own"]),
                                          bytes.fromhex(payload["seed_prev"]))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"Bad seed file {path}: {exc}") from exc
