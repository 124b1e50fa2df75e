"""Randomized equivalence between the three-party protocols and the naive predicate."""

import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from tqdm import tqdm

from irismpc import const
from irismpc.core.iris import IrisDb, IrisRecord, MatchParams
from irismpc.engine.backends.factory import BackendFactory
from irismpc.engine.dealer import Dealer
from irismpc.engine.protocol import (membership_plain_masks, membership_shared_masks, open_result,
                                     open_rows)
from irismpc.mpc.party import run_parties
from irismpc.oracle.naive import naive_counts, naive_membership

logger = logging.getLogger(__name__)


@dataclass
class TestInstance:
    seed: int
    l: int
    s: int
    mask_density: float
    match_ratio: float
    query: IrisRecord = field(repr=False)
    db: IrisDb = field(repr=False)
    boundary: bool = False

    def expected(self, params, public_masks):
        return naive_membership(self.query, self.db, params, public_masks)

    def describe(self):
        return {"seed": self.seed, "l": self.l, "s": self.s, "mask_density": self.mask_density,
                "match_ratio": self.match_ratio, "boundary": self.boundary,
                "query_code": self.query.code.tolist(), "query_mask": self.query.mask.tolist(),
                "db_codes": self.db.codes.tolist(), "db_masks": self.db.masks.tolist()}


def random_instance(seed, l, s, mask_density=const.DEFAULT_MASK_DENSITY,
                    match_ratio=const.DEFAULT_MATCH_RATIO):
    """Random database; half of the queries are a noisy copy of some row."""
    rng = np.random.default_rng(seed)
    db = IrisDb.random(s, l, rng, mask_density)
    if s and rng.random() < 0.5:
        source = db.row(int(rng.integers(s)))
        noise = (rng.random(l) < rng.uniform(0.0, 0.5)).astype(np.uint8)
        query = IrisRecord(source.code ^ noise, (rng.random(l) < mask_density).astype(np.uint8))
    else:
        query = IrisRecord.random(l, rng, mask_density)
    return TestInstance(seed, l, s, mask_density, match_ratio, query, db)


def _threshold_hd(params, ml, public_masks):
    """Smallest Hamming distance that no longer matches at this ml."""
    for hd in range(ml + 1):
        dot = ml - 2 * hd
        if public_masks:
            matched = dot > int(params.public_threshold(ml))
        else:
            matched = params.b * dot > params.a * ml
        if not matched:
            return hd
    return ml + 1


def boundary_instance(seed, l, s, params, mask_density=const.DEFAULT_MASK_DENSITY, public_masks=False):
    """Row 0 sits one bit below, at, or one bit above the match threshold."""
    rng = np.random.default_rng(seed)
    db = IrisDb.random(max(s, 1), l, rng, mask_density)
    mask = (rng.random(l) < mask_density).astype(np.uint8)
    valid = np.flatnonzero(mask & db.masks[0])
    h0 = _threshold_hd(params, valid.size, public_masks)
    target = int(np.clip(h0 + int(rng.integers(-1, 2)), 0, valid.size))
    code = db.codes[0].copy()
    flips = rng.choice(valid, size=target, replace=False) if target else np.zeros(0, np.int64)
    code[flips] ^= 1
    query = IrisRecord(code, mask)
    return TestInstance(seed, l, db.s, mask_density, params.match_ratio, query, db, boundary=True)


@dataclass
class EquivalenceGrid:
    backends: tuple = const.BACKENDS
    variants: tuple = const.VARIANTS
    lengths: tuple = (8, 64)
    sizes: tuple = (1, 4, 64)
    seeds: int = 100
    boundary: int = 100
    match_ratio: float = const.DEFAULT_MATCH_RATIO
    mask_density: float = const.DEFAULT_MASK_DENSITY


@dataclass
class EquivalenceReport:
    runs: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches

    def to_json(self):
        return json.dumps({"runs": self.runs, "mismatch_count": len(self.mismatches),
                           "mismatches": self.mismatches}, indent=2)

    def summary(self):
        status = "OK" if self.ok else "FAILED"
        lines = [f"{status}: {self.runs} protocol runs, {len(self.mismatches)} mismatches"]
        for m in self.mismatches[:10]:
            lines.append(f"  {m['backend']}/{m['variant']} seed={m['instance']['seed']} "
                         f"l={m['instance']['l']} s={m['instance']['s']} "
                         f"expected={m['expected']} got={m['got']}")
        return "\n".join(lines)


def evaluate_instance(instance, backend_key, variants, params, seed=0):
    """Run every variant on one dealt instance.

    Returns:
        dict variant -> (aggregate bool, per-row bools) as opened at party 1
    """
    backend = BackendFactory().create_backend(backend_key)
    rng = np.random.default_rng(seed)
    dealer = Dealer(backend, (const.CODE_WIDTH, params.comparison_width), rng)
    dbs = dealer.share_database(instance.db)
    queries = dealer.share_queries([instance.query])

    def evaluate(party, material):
        db, query = material
        out = {}
        for variant in variants:
            if variant == "plain-mask":
                result = membership_plain_masks(party, query, db, params, backend)
            else:
                result = membership_shared_masks(party, query, db, params, variant, backend)
            aggregate = open_result(party, result, 1)
            rows = open_rows(party, result, 1)
            if aggregate is not None:
                out[variant] = (aggregate[0], None if rows is None else [bool(b) for b in rows])
        return out

    inputs = {i: (dbs[i], queries[i]) for i in const.PARTY_IDS}
    run = run_parties(evaluate, inputs, seeds=dealer.deal_seeds(), debug=True)
    return run.results[1]


def _check(report, instance, backend, variants, params):
    got = evaluate_instance(instance, backend, variants, params, seed=instance.seed)
    report.runs += len(variants)
    for variant in variants:
        public = variant == "plain-mask"
        expected, expected_rows = instance.expected(params, public)
        aggregate, rows = got[variant]
        if aggregate != expected or (rows is not None and rows != expected_rows):
            counts = [naive_counts(instance.query, row) for row in instance.db]
            report.mismatches.append({
                "backend": backend, "variant": variant, "expected": expected, "got": aggregate,
                "expected_rows": expected_rows, "got_rows": rows, "counts": counts,
                "instance": instance.describe(),
            })


def run_equivalence(grid=None, progress=True):
    """Execute the protocols on every grid instance and diff against the naive path.

    Mismatches are collected in the report rather than raised.
    """
    grid = grid or EquivalenceGrid()
    params = MatchParams.from_ratio(grid.match_ratio)
    jobs = []
    for backend in grid.backends:
        for l in grid.lengths:
            for s in grid.sizes:
                for seed in range(grid.seeds):
                    jobs.append((backend, random_instance(seed, l, s, grid.mask_density, grid.match_ratio)))
        for seed in range(grid.boundary):
            l = grid.lengths[seed % len(grid.lengths)]
            s = grid.sizes[seed % len(grid.sizes)]
            jobs.append((backend, boundary_instance(10_000 + seed, l, s, params, grid.mask_density,
                                                    public_masks=bool(seed % 2))))
    report = EquivalenceReport()
    for backend, instance in tqdm(jobs, desc="equivalence", disable=not progress):
        _check(report, instance, backend, grid.variants, params)
    logger.info("Equivalence grid: %d runs, %d mismatches", report.runs, len(report.mismatches))
    return report
