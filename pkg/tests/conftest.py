import pytest

# 50-term composition of 80 used in the chart-fidelity tests
CHART_A = [0, 0, 2, 3, 1, 0, 1, 5, 0, 0, 0, 3, 2, 0, 1, 1, 2, 2, 2, 0,
           4, 3, 0, 0, 4, 4, 4, 4, 1, 0, 3, 1, 5, 1, 6, 3, 3, 0, 1, 0,
           0, 0, 0, 1, 0, 1, 1, 2, 1, 2]

# 24-term composition used in the pattern-count tests
CHART_B = [2, 0, 2, 0, 3, 1, 0, 2, 0, 2, 0, 3, 1, 0, 2, 0, 3, 1, 0, 2,
           0, 2, 0, 2]


@pytest.fixture
def chart_a():
    return list(CHART_A)


@pytest.fixture
def chart_b():
    return list(CHART_B)


def naive_match_count(terms, spec, strict=False):
    """Brute force over all block placements; the authoritative reference."""
    from compevo.core import BlockStructure, PatternKind

    terms = list(terms)
    k = spec.length
    n = len(terms)
    blocks = spec.blocks
    pat = spec.terms
    lens = [len(b) for b in blocks]
    strict = strict and spec.structure is BlockStructure.VINCULAR

    def ok_pair(v, r):
        if spec.kind is PatternKind.EXACT:
            return v == r
        if spec.kind is PatternKind.UPPER:
            return v >= r
        if spec.kind is PatternKind.LOWER:
            return v <= r
        return True

    count = 0

    def rec(bi, minstart, chosen):
        nonlocal count
        if bi == len(blocks):
            idxs = []
            for st, b in zip(chosen, blocks):
                idxs += list(range(st, st + len(b)))
            vals = [terms[i] for i in idxs]
            if spec.kind is PatternKind.ORDERING:
                ok = all((vals[a] < vals[b]) == (pat[a] < pat[b])
                         and (vals[a] == vals[b]) == (pat[a] == pat[b])
                         for a in range(k) for b in range(k))
            else:
                ok = all(ok_pair(v, r) for v, r in zip(vals, pat))
            if ok:
                count += 1
            return
        lo = minstart + (1 if (strict and bi > 0) else 0)
        for st in range(lo, n - lens[bi] + 1):
            rec(bi + 1, st + lens[bi], chosen + [st])

    rec(0, 0, [])
    return count


def naive_stats(terms):
    """Independent single-pass-free reimplementation of the statistics."""
    terms = list(terms)
    n = len(terms)

    def runs(pred):
        out = []
        i = 0
        while i < n:
            if pred(terms[i]):
                j = i
                while j < n and pred(terms[j]):
                    j += 1
                out.append((i + 1, j - i))
                i = j
            else:
                i += 1
        return out

    comp = runs(lambda t: t > 0)
    gap = runs(lambda t: t == 0)
    eq = []
    i = 0
    while i < n:
        j = i
        while j < n and terms[j] == terms[i]:
            j += 1
        eq.append((i + 1, j - i, terms[i]))
        i = j
    squares = {}
    best_sq = 0
    for _, length, v in eq:
        if 1 <= v <= length:
            best_sq = max(best_sq, v)
            if v >= 2:
                squares[v] = squares.get(v, 0) + length - v + 1
    inc = best = 1
    for i in range(1, n):
        inc = inc + 1 if terms[i] > terms[i - 1] else 1
        best = max(best, inc)
    from collections import Counter
    mult = max(Counter(terms).values())
    return {
        "components": len(comp),
        "gaps": len(gap),
        "cmax": max((l for _, l in comp), default=0),
        "cmin": min((l for _, l in comp), default=0),
        "gmax": max((l for _, l in gap), default=0),
        "gmin": min((l for _, l in gap), default=0),
        "tmax": max(terms),
        "tmin": min(terms),
        "largest_square": best_sq,
        "square_counts": squares,
        "longest_increasing_run": best if n else 0,
        "is_carlitz": all(terms[i] != terms[i - 1] for i in range(1, n)),
        "max_multiplicity": mult,
    }
