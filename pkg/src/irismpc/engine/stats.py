"""Per-query statistics derived from the ledger and gate counters."""

from dataclasses import asdict

from irismpc import const


def ledger_delta(before, after):
    return {phase: {key: after[phase][key] - before[phase][key] for key in after[phase]}
            for phase in after}


def gate_snapshot(party):
    return {phase: asdict(stats) for phase, stats in party.gates.items()}


def _reported(delta, key):
    out = {phase: delta[phase][key] for phase in const.REPORTED_PHASES}
    out["lift"] += delta["ot"][key]
    out["open"] = delta["open"][key]
    out["setup"] = delta["setup"][key]
    return out


def query_stats(party, ledger_before, gates_before, variant, backend, s, l, batch,
                comparisons, wall_ms, macs):
    """Stats block of one party for one query.

    ``lift`` includes the OT messages of the bit injections.
    """
    delta = ledger_delta(ledger_before, party.ledger.as_dict())
    gates = {}
    for phase, counts in gate_snapshot(party).items():
        base = gates_before.get(phase, {key: 0 for key in counts})
        gates[phase] = {key: counts[key] - base[key] for key in counts}
    return {
        "party": party.id,
        "variant": variant,
        "backend": backend,
        "s": s,
        "l": l,
        "batch": batch,
        "comparisons": comparisons,
        "phase_bytes": _reported(delta, "bytes_sent"),
        "rounds": _reported(delta, "rounds"),
        "total_bytes": sum(d["bytes_sent"] for d in delta.values()),
        "gates": gates,
        "macs": macs,
        "wall_ms": round(wall_ms, 3),
    }


def merge_party_stats(per_party):
    """Combine the three parties' blocks; bytes are the per-party maximum."""
    per_party = sorted(per_party, key=lambda st: st["party"])
    first = per_party[0]
    merged = {key: first[key] for key in ("variant", "backend", "s", "l", "batch", "comparisons")}
    merged["phase_bytes"] = {phase: max(st["phase_bytes"][phase] for st in per_party)
                             for phase in first["phase_bytes"]}
    merged["rounds"] = {phase: max(st["rounds"][phase] for st in per_party) for phase in first["rounds"]}
    merged["total_bytes"] = max(st["total_bytes"] for st in per_party)
    merged["wall_ms"] = max(st["wall_ms"] for st in per_party)
    merged["parties"] = {str(st["party"]): st for st in per_party}
    return merged
