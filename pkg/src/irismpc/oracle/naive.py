"""Brute-force match predicate on Python integer bitsets.

Deliberately independent of the ring and masked-vector code: codes become
integers, distances are popcounts, thresholds are integer comparisons.
"""


def bits_to_int(bits):
    value = 0
    for i, bit in enumerate(bits):
        if bit:
            value |= 1 << i
    return value


def popcount(value):
    return bin(value).count("1")


def naive_counts(query, db_row):
    """(hd, ml) of two records."""
    valid = bits_to_int(query.mask) & bits_to_int(db_row.mask)
    diff = (bits_to_int(query.code) ^ bits_to_int(db_row.code)) & valid
    return popcount(diff), popcount(valid)


def naive_predicate(query, db_row, params, public_masks=False):
    """Does ``db_row`` match ``query``.

    Shared masks: 2*b*hd < (b - a)*ml, i.e. b*(ml - 2hd) > a*ml.
    Public masks: ml - 2hd > ceil(f*ml) with f the exact threshold fraction.
    No usable bits (ml = 0) never match.
    """
    hd, ml = naive_counts(query, db_row)
    if ml == 0:
        return False
    if public_masks:
        num, den = params.threshold.numerator, params.threshold.denominator
        threshold = -((-num * ml) // den)
        return ml - 2 * hd > threshold
    return 2 * params.b * hd < (params.b - params.a) * ml


def naive_membership(query, db, params, public_masks=False):
    rows = [naive_predicate(query, row, params, public_masks) for row in db]
    return any(rows), rows
