"""Reference growth-exponent table, row by row (r = 3..10)."""
PRINTED = {
    (2, "eta"): [.768, .836, .872, .896, .912, .924, .933, .940],
    (2, "23"): [.837, .873, .896, .912, .923, .932, .939, .945],
    (2, "34"): [.879, .906, .924, .936, .945, .951, .956, .961],
    (3, "eta"): [None, .890, .916, .932, .943, .951, .957, .961],
    (3, "34"): [None, .939, .951, .959, .964, .969, .972, .975],
    (4, "eta"): [None, None, .932, .945, .954, .960, .965, .969],
    (4, "34"): [None, None, .960, .967, .972, .975, .977, .980],
    (5, "eta"): [None, None, None, .952, .960, .966, .970, .973],
    (5, "34"): [None, None, None, .972, .976, .979, .981, .983],
}


def entries():
    for (q, kind), vals in PRINTED.items():
        for i, v in enumerate(vals):
            if v is not None:
                yield q, kind, i + 3, v


def mismatches(table):
    """(q, kind, r, computed, printed) for every differing cell."""
    got = {(row["q"], row["estimate"]): row["values"] for row in table}
    out = []
    for q, kind, r, v in entries():
        c = got[(q, kind)].get(r)
        if c is None or abs(c - v) > 1e-9:
            out.append((q, kind, r, c, v))
    return out
