"""Communication and throughput benchmarks.

The comparison benchmark starts from synthesized dot-product shares, so its
numbers cover the lift, MSB and OR phases only. The dot benchmark times the
local product kernels of the backends.
"""

import logging
import time

import numpy as np
from tqdm import tqdm

from irismpc import const
from irismpc.core.iris import IrisDb
from irismpc.core.ring import get_ring
from irismpc.engine.backends.factory import BackendFactory
from irismpc.engine.dealer import Dealer
from irismpc.engine.stats import gate_snapshot, merge_party_stats, query_stats
from irismpc.engine.variants.factory import VariantFactory
from irismpc.mpc import replicated
from irismpc.mpc.binary import or_tree
from irismpc.mpc.party import run_parties

logger = logging.getLogger(__name__)

EXTRAPOLATED_SIZE = 10 ** 6


def synthesize_lanes(n, l, rng):
    """Random consistent (dot, ml) pairs: 0 <= hd <= ml <= l."""
    ml = rng.integers(0, l + 1, size=n, dtype=np.int64)
    hd = np.floor(rng.random(n) * (ml + 1)).astype(np.int64)
    return ml - 2 * hd, ml


def bench_comparison(variant_key, params, n, l=const.DEFAULT_CODE_LENGTH, rng=None):
    """One batch of n comparisons followed by one OR over all of them.

    Returns:
        merged stats block (see merge_party_stats)
    """
    rng = rng if rng is not None else np.random.default_rng()
    variant = VariantFactory().create_variant(variant_key, params)
    variant.check_bounds(l)
    dot, ml = synthesize_lanes(n, l, rng)
    dot_shares = replicated.share(get_ring(variant.code_width).from_ints(dot), variant.code_width, rng)
    if variant.shared_masks:
        ml_shares = replicated.share(get_ring(variant.mask_width).from_ints(ml), variant.mask_width, rng)
        inputs = {i: (dot_shares[i], ml_shares[i]) for i in const.PARTY_IDS}
    else:
        inputs = {i: (dot_shares[i], ml) for i in const.PARTY_IDS}

    def run(party, material):
        ledger_before = party.ledger.as_dict()
        gates_before = gate_snapshot(party)
        started = time.perf_counter()
        bits = variant.compare(party, *material)
        with party.phase("or_tree"):
            or_tree(party, bits)
        wall_ms = (time.perf_counter() - started) * 1000.0
        return query_stats(party, ledger_before, gates_before, variant_key, "replicated", n, l, 1, n,
                           wall_ms, 0)

    run_result = run_parties(run, inputs, rng=rng)
    return merge_party_stats(run_result.results.values())


def comparison_row(stats):
    """Table row: per-party kB of the comparison phases and throughput."""
    party1 = stats["parties"]["1"]["phase_bytes"]
    comparison = max(st["phase_bytes"]["lift"] + st["phase_bytes"]["msb"]
                     for st in stats["parties"].values())
    seconds = max(stats["wall_ms"], 1e-6) / 1000.0
    return {
        "variant": stats["variant"],
        "comparisons": stats["comparisons"],
        "lift_kb": party1["lift"] / 1000.0,
        "msb_kb": party1["msb"] / 1000.0,
        "comparison_kb": comparison / 1000.0,
        "or_tree_kb": stats["phase_bytes"]["or_tree"] / 1000.0,
        "bytes_per_comparison": comparison / max(stats["comparisons"], 1),
        "rounds": stats["rounds"]["lift"] + stats["rounds"]["msb"],
        "or_rounds": stats["rounds"]["or_tree"],
        "throughput": stats["comparisons"] / seconds,
    }


def dot_bytes(s, k, queries=1):
    """Bytes one party sends in the dot phase: one reshared word per product."""
    return s * queries * get_ring(k).nbytes


def layer_bytes(n):
    """Bytes one party sends for one AND layer over n lanes."""
    return -(-n // const.LANE_BITS) * (const.LANE_BITS // 8)


def expected_comparison_bytes(variant_key, params, n):
    """Bytes party 1 sends in the lift and msb phases, counted from the circuits.

    The MSB over Z_2^w takes 2w-3 AND layers. Lifting ml out of Z_2^k extracts
    bits k and k+1 with 2k+1 layers, and party 1 sends both OT messages of the
    injections into Z_2^(m-1) and Z_2^m.
    """
    variant = VariantFactory().create_variant(variant_key, params)
    total = (2 * variant.comparison_width - 3) * layer_bytes(n)
    if variant.key == "mpc-lift":
        k, m = variant.mask_width, params.precision_bits
        total += (2 * k + 1) * layer_bytes(n)
        total += 2 * n * (get_ring(m - 1).nbytes + get_ring(m).nbytes)
    return total


def bench_dot(backend_key, k, rows, queries, l=const.DEFAULT_CODE_LENGTH, rng=None):
    """Time the local product kernel for ``rows`` x ``queries`` dot products of length l."""
    rng = rng if rng is not None else np.random.default_rng()
    backend = BackendFactory().create_backend(backend_key)
    dealer = Dealer(backend, (k,), rng)
    db = IrisDb.random(rows, l, rng)
    query_db = IrisDb.random(queries, l, rng)
    enrolled = dealer.share_database(db)
    shared_queries = dealer.share_queries(query_db)

    def run(party, material):
        db_share, query_share = material
        macs_before = party.macs
        started = time.perf_counter()
        backend.local_products(party, db_share.rows.codes[k], query_share.codes[k])
        elapsed = time.perf_counter() - started
        return elapsed, party.macs - macs_before

    run_result = run_parties(run, {i: (enrolled[i], shared_queries[i]) for i in const.PARTY_IDS}, rng=rng)
    elapsed = max(r[0] for r in run_result.results.values())
    products = rows * queries
    return {
        "backend": backend_key,
        "k": k,
        "l": l,
        "products": products,
        "seconds": elapsed,
        "products_per_second": products / max(elapsed, 1e-9),
        "macs": run_result.results[1][1],
        "dot_bytes": dot_bytes(rows, k, queries),
        "dot_bytes_extrapolated": dot_bytes(EXTRAPOLATED_SIZE, k, queries),
    }


def run_comparison_bench(variants, params, n, l, repeat, rng, progress=True):
    rows = []
    jobs = [(v, r) for v in variants for r in range(repeat)]
    best = {}
    for variant, _ in tqdm(jobs, desc="bench", disable=not progress):
        stats = bench_comparison(variant, params, n, l, rng)
        if variant not in best or stats["wall_ms"] < best[variant]["wall_ms"]:
            best[variant] = stats
    for variant in variants:
        row = comparison_row(best[variant])
        row["expected_kb"] = expected_comparison_bytes(variant, params, n) / 1000.0
        rows.append(row)
    return rows, best


def format_comparison_table(rows):
    header = (f"{'variant':<12}{'lift kB':>10}{'msb kB':>10}{'total kB':>10}{'circuit kB':>12}{'B/cmp':>8}"
              f"{'rounds':>8}{'cmp/s':>12}")
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(f"{row['variant']:<12}{row['lift_kb']:>10.1f}{row['msb_kb']:>10.1f}"
                     f"{row['comparison_kb']:>10.1f}{row.get('expected_kb', 0.0):>12.1f}"
                     f"{row['bytes_per_comparison']:>8.2f}"
                     f"{row['rounds']:>8d}{row['throughput']:>12.0f}")
    if rows:
        row = rows[0]
        lines.append(f"{'or-tree':<12}{'':>10}{'':>10}{row['or_tree_kb']:>10.1f}"
                     f"{'':>12}{'':>8}{row['or_rounds']:>8d}")
    return "\n".join(lines)


def format_dot_table(results):
    header = f"{'backend':<15}{'k':>4}{'products/s':>14}{'MACs':>16}{'dot kB':>10}{'dot kB @1e6':>14}"
    lines = [header, "-" * len(header)]
    for r in results:
        lines.append(f"{r['backend']:<15}{r['k']:>4}{r['products_per_second']:>14.0f}{r['macs']:>16d}"
                     f"{r['dot_bytes'] / 1000.0:>10.1f}{r['dot_bytes_extrapolated'] / 1000.0:>14.1f}")
    return "\n".join(lines)


def plot_comparison(rows, path):
    """Bar chart of per-party comparison communication by variant."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    names = [r["variant"] for r in rows]
    ax.bar(names, [r["lift_kb"] for r in rows], label="lift")
    ax.bar(names, [r["msb_kb"] for r in rows], bottom=[r["lift_kb"] for r in rows], label="msb")
    ax.set_ylabel("kB sent by party 1")
    ax.set_title(f"{rows[0]['comparisons']} comparisons" if rows else "")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info("Wrote plot to %s", path)
