"""Input sharing for the enrolled database and for query batches.

The dealer plays the role of the capture device: it sees plaintext iris codes
and hands each party only its shares. Codes are shared in their masked
ternary form, masks as 0/1 vectors, each at every width a variant may need.
"""

import logging
from dataclasses import dataclass

import numpy as np

from irismpc import const
from irismpc.core.formats import ShareSection
from irismpc.core.iris import encode_masked, expand_rotations
from irismpc.core.randomness import deal_seeds

logger = logging.getLogger(__name__)


@dataclass
class PreparedRows:
    """Enrolled side of a comparison, as one party holds it after ingestion."""

    codes: dict
    masks: dict
    public_masks: np.ndarray
    count: int


@dataclass
class PartyDatabase:
    party_id: int
    backend: str
    l: int
    rows: PreparedRows

    @property
    def s(self):
        return self.rows.count

    def sections(self, backend):
        """Share sections for persisting, the enrolled side already prepared."""
        out = []
        for kind, table in ((const.SECTION_CODE, self.rows.codes), (const.SECTION_MASK, self.rows.masks)):
            for k, shares in sorted(table.items()):
                out.append(share_section(backend, kind, k, self.party_id, shares))
        return out

    @classmethod
    def from_sections(cls, party_id, backend, sections, public_masks):
        codes, masks = {}, {}
        for section in sections:
            if section.party != party_id:
                raise ValueError(f"Section belongs to party {section.party}, not {party_id}")
            shares = backend.prepare_rows(party_id, backend.from_section(section))
            target = codes if section.kind == const.SECTION_CODE else masks
            target[section.k] = shares
        s = public_masks.shape[0]
        return cls(party_id, backend.key, public_masks.shape[1], PreparedRows(codes, masks, public_masks, s))


def share_section(backend, kind, k, party_id, shares):
    return ShareSection(backend.key, kind, k, party_id, backend.section_arrays(shares),
                        lambda_scaled=bool(getattr(shares, "lambda_scaled", False)))


@dataclass
class PartyQueries:
    """One party's shares of a set of query codes.

    For a batch the codes are ordered person, eye (left, right), rotation.
    """

    party_id: int
    l: int
    codes: dict
    masks: dict
    public_masks: np.ndarray
    persons: int = 1
    rotations: int = 1
    eyes: int = 1

    @property
    def n(self):
        return self.public_masks.shape[0]

    @property
    def per_person(self):
        return self.eyes * self.rotations

    def center_indices(self):
        """Index of the unrotated code of every (person, eye)."""
        centers = np.arange(self.persons * self.eyes) * self.rotations + self.rotations // 2
        return centers.astype(np.int64)

    def as_rows(self, backend, index):
        """The selected query codes prepared as an enrolled side."""
        codes = {k: backend.prepare_rows(self.party_id, backend.select(v, index)) for k, v in self.codes.items()}
        masks = {k: backend.prepare_rows(self.party_id, backend.select(v, index)) for k, v in self.masks.items()}
        return PreparedRows(codes, masks, self.public_masks[index], len(index))


class Dealer:
    """Shares plaintext inputs for a given backend and set of ring widths."""

    def __init__(self, backend, widths=(const.CODE_WIDTH, const.CODE_WIDTH + const.DEFAULT_PRECISION_BITS),
                 rng=None):
        self.backend = backend
        self.widths = tuple(sorted(set(widths)))
        self.rng = rng if rng is not None else np.random.default_rng()

    def deal_seeds(self):
        return deal_seeds(self.rng)

    def share_matrix(self, codes, masks):
        """Shares of masked codes and masks at every width.

        Returns:
            (codes, masks): dicts party id -> {k: shares}
        """
        code_shares = {i: {} for i in const.PARTY_IDS}
        mask_shares = {i: {} for i in const.PARTY_IDS}
        for k in self.widths:
            masked = encode_masked(codes, masks, k)
            for i, share in self.backend.share(masked, k, self.rng).items():
                code_shares[i][k] = share
            for i, share in self.backend.share(np.asarray(masks, dtype=np.uint8), k, self.rng).items():
                mask_shares[i][k] = share
        return code_shares, mask_shares

    def share_database(self, db):
        code_shares, mask_shares = self.share_matrix(db.codes, db.masks)
        out = {}
        for i in const.PARTY_IDS:
            codes = {k: self.backend.prepare_rows(i, v) for k, v in code_shares[i].items()}
            masks = {k: self.backend.prepare_rows(i, v) for k, v in mask_shares[i].items()}
            out[i] = PartyDatabase(i, self.backend.key, db.l, PreparedRows(codes, masks, db.masks.copy(), db.s))
        logger.debug("Shared database s=%d l=%d at widths %s", db.s, db.l, self.widths)
        return out

    def share_queries(self, records, persons=1, rotations=1, eyes=1):
        records = list(records)
        codes = np.stack([r.code for r in records])
        masks = np.stack([r.mask for r in records])
        code_shares, mask_shares = self.share_matrix(codes, masks)
        return {i: PartyQueries(i, codes.shape[1], code_shares[i], mask_shares[i], masks.copy(),
                                persons, rotations, eyes)
                for i in const.PARTY_IDS}

    def share_batch(self, persons, rotations=const.DEFAULT_ROTATIONS):
        """Share a batch of (left, right) iris pairs with all their rotations."""
        records = []
        for left, right in persons:
            records.extend(expand_rotations(left, rotations))
            records.extend(expand_rotations(right, rotations))
        return self.share_queries(records, persons=len(persons), rotations=rotations, eyes=2)

    def share_database_sections(self, db):
        """Share sections per party as the dealer writes them, not yet prepared."""
        code_shares, mask_shares = self.share_matrix(db.codes, db.masks)
        out = {}
        for i in const.PARTY_IDS:
            out[i] = [share_section(self.backend, kind, k, i, shares)
                      for kind, table in ((const.SECTION_CODE, code_shares[i]),
                                          (const.SECTION_MASK, mask_shares[i]))
                      for k, shares in sorted(table.items())]
        return out
