"""Membership queries over a secret-shared database.

Per comparison lane the parties compute the masked code dot product and the
valid-bit count ml, turn them into a value whose sign is the match bit, and
OR all lanes of a query (or of a person in a batch) together. Only those
aggregates are opened.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from irismpc.core.errors import ConfigMismatch
from irismpc.engine.stats import gate_snapshot, query_stats
from irismpc.engine.variants.factory import VariantFactory
from irismpc.mpc.binary import or_tree
from irismpc.mpc.replicated import BitRepShare, RepShare, open_bits_to

logger = logging.getLogger(__name__)


@dataclass
class MatchResultShare:
    """Aggregated match bits; per-lane bits are kept in debug mode only."""

    aggregated: BitRepShare
    rows: BitRepShare = None


@dataclass
class QueryOutcome:
    matches: list
    stats: dict
    row_matches: dict = None


def handshake(party, digest):
    """Exchange configuration digests with both peers.

    Raises:
        ConfigMismatch: if any peer's digest differs from ours
    """
    with party.phase("setup"):
        party.send(party.next_id, digest)
        party.send(party.prev_id, digest)
        received = {party.next_id: party.recv(party.next_id), party.prev_id: party.recv(party.prev_id)}
        party.round_barrier()
    for peer, theirs in received.items():
        if theirs != digest:
            raise ConfigMismatch(f"Party {party.id} and party {peer} disagree on the configuration")


def lane_products(party, variant, backend, rows, queries, pairs=None):
    """Code dot products and ml for the selected (query, row) lanes.

    Returns:
        (code_dots, mask_input) where mask_input is shared for shared-mask
        variants and a public int64 array otherwise
    """
    with party.phase("dot"):
        k = variant.code_width
        code_dots = backend.dot(party, rows.codes[k], queries.codes[k], k, pairs)
        if variant.shared_masks:
            k = variant.mask_width
            mask_input = backend.dot(party, rows.masks[k], queries.masks[k], k, pairs)
        else:
            ml = queries.public_masks.astype(np.int64) @ rows.public_masks.astype(np.int64).T
            mask_input = ml[pairs] if pairs is not None else ml.reshape(-1)
    return code_dots, mask_input


def _concat_inputs(parts):
    codes = RepShare.concatenate([p[0] for p in parts])
    if isinstance(parts[0][1], RepShare):
        return codes, RepShare.concatenate([p[1] for p in parts])
    return codes, np.concatenate([p[1] for p in parts])


def _membership(party, queries, db, variant, backend):
    variant.check_bounds(db.l)
    if db.s == 0 or queries.n == 0:
        return MatchResultShare(BitRepShare.zeros((), 1))
    bits = variant.compare(party, *lane_products(party, variant, backend, db.rows, queries))
    with party.phase("or_tree"):
        aggregated = or_tree(party, bits)
    return MatchResultShare(aggregated, bits if party.debug else None)


def membership_plain_masks(party, queries, db, params, backend):
    """Does any (query code, enrolled row) pair match, with public masks."""
    return _membership(party, queries, db, VariantFactory().create_variant("plain-mask", params), backend)


def membership_shared_masks(party, queries, db, params, variant, backend):
    """Does any (query code, enrolled row) pair match, with masks kept secret."""
    variant = VariantFactory().create_variant(variant, params)
    if not variant.shared_masks:
        raise ValueError(f"{variant.name} does not use shared masks")
    return _membership(party, queries, db, variant, backend)


def open_result(party, result, to):
    """Open the aggregate bits to party ``to``; booleans there, None elsewhere."""
    bits = open_bits_to(party, result.aggregated, to, "aggregate")
    return None if bits is None else [bool(b) for b in bits]


def open_rows(party, result, to):
    """Open per-lane bits; only permitted in debug mode."""
    if result.rows is None:
        party.authorize_open("row", 0)
        return None
    return open_bits_to(party, result.rows, to, "row")


def inner_batch_pairs(queries):
    """(query, center) lanes comparing each person against all earlier persons.

    Every code of person p (all eyes and rotations) meets the unrotated codes
    of both eyes of every person before p.

    Returns:
        (query_idx, center_idx, sizes) with sizes[p] the lane count of person p
    """
    per, eyes = queries.per_person, queries.eyes
    query_idx, center_idx, sizes = [], [], []
    for p in range(queries.persons):
        q = np.arange(p * per, (p + 1) * per)
        c = np.arange(p * eyes)
        qq, cc = np.meshgrid(q, c, indexing="ij")
        query_idx.append(qq.ravel())
        center_idx.append(cc.ravel())
        sizes.append(qq.size)
    return (np.concatenate(query_idx).astype(np.int64), np.concatenate(center_idx).astype(np.int64), sizes)


def _group_lanes(bits, db_lanes, per_db, inner_sizes):
    """Reorder lanes person by person and pad empty persons with a zero lane."""
    own, prev = bits.unpacked() if bits is not None else (np.zeros(0, np.uint8), np.zeros(0, np.uint8))
    own_parts, prev_parts, sizes = [], [], []
    inner_start = db_lanes
    for p, inner in enumerate(inner_sizes):
        idx = np.concatenate([np.arange(p * per_db, (p + 1) * per_db),
                              np.arange(inner_start, inner_start + inner)]).astype(np.int64)
        inner_start += inner
        if idx.size == 0:
            own_parts.append(np.zeros(1, np.uint8))
            prev_parts.append(np.zeros(1, np.uint8))
            sizes.append(1)
            continue
        own_parts.append(own[idx])
        prev_parts.append(prev[idx])
        sizes.append(idx.size)
    return BitRepShare.from_bits(np.concatenate(own_parts), np.concatenate(prev_parts)), sizes


def run_query(party, queries, db, params, variant, backend, output_party=1, digest=None):
    """Batch membership: one boolean per person, revealed at ``output_party``.

    A person matches if any of its codes matches any enrolled row, or any
    inner-batch pairing with an earlier person matches.
    """
    started = time.perf_counter()
    ledger_before = party.ledger.as_dict()
    gates_before = gate_snapshot(party)
    macs_before = party.macs
    if digest is not None:
        handshake(party, digest)
    variant_key = variant
    variant = VariantFactory().create_variant(variant, params)
    variant.check_bounds(db.l)

    per_db = queries.per_person * db.s
    db_lanes = queries.n * db.s
    parts = []
    if db_lanes:
        parts.append(lane_products(party, variant, backend, db.rows, queries))
    query_idx, center_idx, inner_sizes = inner_batch_pairs(queries)
    if query_idx.size:
        centers = queries.as_rows(backend, queries.center_indices())
        parts.append(lane_products(party, variant, backend, centers, queries, (query_idx, center_idx)))

    bits = variant.compare(party, *_concat_inputs(parts)) if parts else None
    grouped, sizes = _group_lanes(bits, db_lanes, per_db, inner_sizes)
    with party.phase("or_tree"):
        aggregated = or_tree(party, grouped, sizes)

    result = MatchResultShare(aggregated, bits if party.debug else None)
    matches = open_result(party, result, output_party)
    row_matches = None
    if party.debug and bits is not None:
        opened = open_rows(party, result, output_party)
        if opened is not None:
            row_matches = {"db": opened[:db_lanes].reshape(queries.n, db.s),
                           "inner": opened[db_lanes:]}

    wall_ms = (time.perf_counter() - started) * 1000.0
    comparisons = db_lanes + int(query_idx.size)
    stats = query_stats(party, ledger_before, gates_before, variant_key, backend.key, db.s, db.l,
                        queries.persons, comparisons, wall_ms, party.macs - macs_before)
    logger.info("Party %d ran %s/%s over %d lanes: %d bytes sent in %.1f ms",
                party.id, variant_key, backend.key, comparisons, stats["total_bytes"], wall_ms)
    return QueryOutcome(matches, stats, row_matches)
