#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Command-line entry point: deal shares, run parties, query, benchmark, verify.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from irismpc import const
from irismpc.core.errors import IrisMpcError
from irismpc.core.formats import read_db, write_db, write_public_masks, write_sections, write_seed_file
from irismpc.core.iris import IrisDb, MatchParams
from irismpc.engine.backends.factory import BackendFactory
from irismpc.engine.dealer import Dealer
from irismpc.oracle.harness import EquivalenceGrid, run_equivalence
from irismpc.scripts import bench
from irismpc.scripts.config import (PUBLIC_MASK_FILE, Config, seed_file_name,
                                    share_file_name)
from irismpc.scripts.server import PartyServer, QueryClient

logger = logging.getLogger(__name__)

LOG_FORMAT = "[%(asctime)s] %(levelname)s [%(name)s.%(funcName)s:%(lineno)d] %(message)s"


def configure_logging(verbosity=0):
    level = logging.INFO
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def _params(args):
    if getattr(args, "a", None) is not None or getattr(args, "b", None) is not None:
        return MatchParams.from_fraction(args.a, args.b)
    return MatchParams.from_ratio(args.match_ratio, args.precision_bits)


def cmd_gen_db(args):
    rng = np.random.default_rng(args.seed)
    db = IrisDb.random(args.size, args.length, rng, args.mask_density)
    write_db(db, args.out)
    return const.EXIT_OK


def cmd_share(args):
    db = read_db(args.db)
    params = _params(args)
    backend = BackendFactory().create_backend(args.backend)
    dealer = Dealer(backend, (const.CODE_WIDTH, params.comparison_width), np.random.default_rng(args.seed))
    os.makedirs(args.out_dir, exist_ok=True)
    sections = dealer.share_database_sections(db)
    seeds = dealer.deal_seeds()
    for i in const.PARTY_IDS:
        path = os.path.join(args.out_dir, share_file_name(i))
        write_sections(sections[i], path)
        write_seed_file(seeds[i], i, os.path.join(args.out_dir, seed_file_name(i)))
        logger.info("Party %d share file %s: %d bytes", i, path, os.path.getsize(path))
    write_public_masks(db.masks, os.path.join(args.out_dir, PUBLIC_MASK_FILE))
    return const.EXIT_OK


def cmd_party(args):
    config = Config.from_file(args.config)
    server = PartyServer(config).load().connect()
    served = server.serve()
    logger.info("Party %d served %d request(s)", config.party_id, served)
    return const.EXIT_OK


def _load_persons(args, l):
    """(left, right) pairs from an IRMP file, or random persons if none is given."""
    if args.queries:
        db = read_db(args.queries)
        if db.s % 2:
            raise ValueError(f"Query file must hold (left, right) pairs, got {db.s} rows")
        records = list(db)
        persons = [(records[i], records[i + 1]) for i in range(0, len(records), 2)]
    else:
        rng = np.random.default_rng(args.seed)
        persons = [(r.row(0), r.row(1)) for r in (IrisDb.random(2, l, rng) for _ in range(args.batch or 1))]
    return persons[:args.batch] if args.batch else persons


def cmd_query(args):
    config = Config.from_file(args.config)
    client = QueryClient(config, np.random.default_rng(args.seed))
    persons = _load_persons(args, config.l)
    variants = const.SHARED_MASK_VARIANTS if args.variant == "all" else (args.variant or config.variant,)
    outputs, all_stats = {}, {}
    for variant in variants:
        matches, stats = client.query(persons, variant, args.rotations)
        outputs[variant] = matches
        all_stats[variant] = stats
    if len({tuple(m) for m in outputs.values()}) > 1:
        raise IrisMpcError(f"Variants disagree: {outputs}")
    for p, matched in enumerate(next(iter(outputs.values()))):
        print(f"person {p}: {'match' if matched else 'no match'}")
    if args.stats:
        with open(args.stats, "w") as f:
            json.dump(all_stats if len(variants) > 1 else all_stats[variants[0]], f, indent=2, sort_keys=True)
    if args.shutdown:
        client.shutdown()
    return const.EXIT_OK


def cmd_bench(args):
    rng = np.random.default_rng(args.seed)
    params = _params(args)
    if args.phase == "dot":
        results = []
        queries = const.DEFAULT_ROTATIONS
        rows = max(1, args.comparisons // queries)
        for backend in const.BACKENDS:
            for k in (const.CODE_WIDTH, params.comparison_width):
                results.append(bench.bench_dot(backend, k, rows, queries, args.length, rng))
        print(bench.format_dot_table(results))
        report = {"dot": results}
    else:
        variants = const.VARIANTS if args.variant == "all" else (args.variant,)
        rows, best = bench.run_comparison_bench(variants, params, args.comparisons, args.length,
                                                args.repeat, rng, progress=not args.quiet)
        print(bench.format_comparison_table(rows))
        extrapolated = bench.dot_bytes(bench.EXTRAPOLATED_SIZE, const.CODE_WIDTH)
        print(f"dot phase at s={bench.EXTRAPOLATED_SIZE}: {extrapolated / 1e6:.1f} MB per party and query")
        report = {"comparison": rows, "stats": best}
        if args.plot:
            bench.plot_comparison(rows, args.plot)
    if args.stats:
        with open(args.stats, "w") as f:
            json.dump(report, f, indent=2, sort_keys=True)
    return const.EXIT_OK


def cmd_equivalence(args):
    grid = EquivalenceGrid(
        backends=tuple(args.backend) if args.backend else const.BACKENDS,
        variants=tuple(args.variant) if args.variant else const.VARIANTS,
        lengths=tuple(args.lengths),
        sizes=tuple(args.sizes),
        seeds=args.seeds,
        boundary=args.boundary,
        match_ratio=args.match_ratio,
    )
    report = run_equivalence(grid, progress=not args.quiet)
    if args.report:
        with open(args.report, "w") as f:
            f.write(report.to_json())
    print(report.summary())
    return const.EXIT_OK if report.ok else const.EXIT_FAILURE


def _add_threshold_args(parser):
    parser.add_argument("--match-ratio", type=float, default=const.DEFAULT_MATCH_RATIO,
                        help="Match when hd/ml is below this ratio")
    parser.add_argument("--precision-bits", type=int, default=const.DEFAULT_PRECISION_BITS,
                        help="Threshold precision m; b = 2^m")
    parser.add_argument("--a", type=int, default=None, help="Explicit threshold numerator")
    parser.add_argument("--b", type=int, default=None, help="Explicit threshold denominator (power of two)")


def parse_args(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(prog="irismpc", description="Three-party iris code membership")
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only, no progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-db", parents=[verbosity], help="Write a synthetic plaintext database")
    p.add_argument("--size", type=int, required=True, help="Number of enrolled codes s")
    p.add_argument("--length", type=int, default=const.DEFAULT_CODE_LENGTH, help="Code length l")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mask-density", type=float, default=const.DEFAULT_MASK_DENSITY,
                   help="Probability that a bit is valid")
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(func=cmd_gen_db)

    p = sub.add_parser("share", parents=[verbosity], help="Deal share and seed files for the parties")
    p.add_argument("--db", type=str, required=True)
    p.add_argument("--backend", choices=const.BACKENDS, default="replicated")
    p.add_argument("--out-dir", type=str, required=True)
    p.add_argument("--seed", type=int, default=None)
    _add_threshold_args(p)
    p.set_defaults(func=cmd_share)

    p = sub.add_parser("party", parents=[verbosity], help="Run one party until a client shuts it down")
    p.add_argument("--config", type=str, required=True)
    p.set_defaults(func=cmd_party)

    p = sub.add_parser("query", parents=[verbosity], help="Query a batch of persons")
    p.add_argument("--config", type=str, required=True)
    p.add_argument("--queries", "--query", dest="queries", type=str, default=None,
                   help="IRMP file; consecutive rows are the (left, right) eyes of one person")
    p.add_argument("--batch", type=int, default=None, help="Number of persons")
    p.add_argument("--variant", choices=const.VARIANTS + ("all",), default=None)
    p.add_argument("--rotations", type=int, default=const.DEFAULT_ROTATIONS)
    p.add_argument("--stats", type=str, default=None, help="Write the stats JSON here")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--shutdown", action="store_true", help="Stop the parties afterwards")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", parents=[verbosity], help="Communication and throughput benchmarks")
    p.add_argument("--comparisons", type=int, default=100_000)
    p.add_argument("--variant", choices=const.VARIANTS + ("all",), default="all")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--phase", choices=("comparison", "dot"), default="comparison")
    p.add_argument("--length", type=int, default=const.DEFAULT_CODE_LENGTH)
    p.add_argument("--plot", type=str, default=None, help="Save a bar chart here")
    p.add_argument("--stats", type=str, default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_threshold_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("equivalence", parents=[verbosity], help="Compare the protocols with the naive predicate")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--boundary", type=int, default=100)
    p.add_argument("--lengths", type=int, nargs="+", default=[8, 64])
    p.add_argument("--sizes", type=int, nargs="+", default=[1, 4, 64])
    p.add_argument("--backend", choices=const.BACKENDS, action="append")
    p.add_argument("--variant", choices=const.VARIANTS, action="append")
    p.add_argument("--match-ratio", type=float, default=const.DEFAULT_MATCH_RATIO)
    p.add_argument("--report", type=str, default=None, help="Write the JSON report here")
    p.set_defaults(func=cmd_equivalence)

    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    configure_logging(1 if args.verbose else -1 if args.quiet else 0)
    try:
        return args.func(args)
    except IrisMpcError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return const.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
