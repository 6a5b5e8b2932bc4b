"""Deterministic single-composition statistics.

Components (maximal nonzero runs), gaps (maximal zero runs), equal runs,
squares, increasing runs, extreme terms, Carlitz and multiplicity checks.
All statistics are single-pass over the terms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import TermsLike, as_terms


@dataclass(frozen=True)
class Run:
    start: int  # 1-based index of the first term of the run
    length: int


@dataclass(frozen=True)
class RunReport:
    kind: str  # "component" | "gap" | "equal-run" | "increasing-run"
    runs: tuple[Run, ...]

    @property
    def count(self) -> int:
        return len(self.runs)

    @property
    def longest(self) -> int:
        return max((r.length for r in self.runs), default=0)

    @property
    def shortest(self) -> int:
        return min((r.length for r in self.runs), default=0)


def _boolean_runs(mask: np.ndarray) -> list[Run]:
    """Maximal runs of True in a boolean array, as 1-based (start, length)."""
    if mask.size == 0:
        return []
    padded = np.concatenate(([False], mask, [False]))
    edges = np.diff(padded.astype(np.int8))
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    return [Run(int(s) + 1, int(e - s)) for s, e in zip(starts, ends)]


def components(c: TermsLike) -> RunReport:
    """Maximal runs of nonzero terms, in order."""
    terms = as_terms(c)
    return RunReport("component", tuple(_boolean_runs(terms > 0)))


def gaps(c: TermsLike) -> RunReport:
    """Maximal runs of zero terms, in order."""
    terms = as_terms(c)
    return RunReport("gap", tuple(_boolean_runs(terms == 0)))


def equal_runs(c: TermsLike, nonzero_only: bool = False) -> RunReport:
    """Maximal runs of equal terms; zero runs excluded when nonzero_only."""
    terms = as_terms(c)
    runs: list[Run] = []
    start = 0
    n = terms.shape[0]
    for i in range(1, n + 1):
        if i == n or terms[i] != terms[start]:
            if not (nonzero_only and terms[start] == 0):
                runs.append(Run(start + 1, i - start))
            start = i
    return RunReport("equal-run", tuple(runs))


@dataclass(frozen=True)
class Extremes:
    cmax: int  # longest component length; 0 when the composition is all zero
    cmin: int  # shortest component length; 0 when there are no components
    gmax: int  # longest gap length; 0 when every term is nonzero
    gmin: int  # shortest gap length; 0 when there are no gaps
    tmax: int  # largest term
    tmin: int  # smallest term


def extremes(c: TermsLike) -> Extremes:
    terms = as_terms(c)
    comp = components(terms)
    gap = gaps(terms)
    return Extremes(
        cmax=comp.longest, cmin=comp.shortest,
        gmax=gap.longest, gmin=gap.shortest,
        tmax=int(terms.max()), tmin=int(terms.min()),
    )


def square_counts(c: TermsLike) -> dict[int, int]:
    """Occurrence counts of k-squares (k consecutive terms equal to k), k >= 2.

    Counted by start position: an equal-run of value v and length L contains
    L - v + 1 v-squares when v <= L.  The trivial 1-squares (any term equal
    to 1) are excluded from the multiset.
    """
    counts: Counter[int] = Counter()
    for run in equal_runs(c, nonzero_only=True).runs:
        v = int(as_terms(c)[run.start - 1])
        if 2 <= v <= run.length:
            counts[v] += run.length - v + 1
    return dict(counts)


def largest_square(c: TermsLike) -> int:
    """Largest k such that k consecutive terms all equal k; 0 if none."""
    terms = as_terms(c)
    best = 0
    for run in equal_runs(terms, nonzero_only=True).runs:
        v = int(terms[run.start - 1])
        if v <= run.length:
            best = max(best, v)
    return best


def longest_increasing_run(c: TermsLike) -> int:
    """Length of the longest strictly increasing run of consecutive terms."""
    terms = as_terms(c)
    if terms.shape[0] == 1:
        return 1
    rising = terms[1:] > terms[:-1]
    best = max((r.length for r in _boolean_runs(rising)), default=0)
    return best + 1


def is_carlitz(c: TermsLike) -> bool:
    """True iff no two adjacent terms are equal."""
    terms = as_terms(c)
    return bool(np.all(terms[1:] != terms[:-1]))


def max_multiplicity(c: TermsLike) -> int:
    """Largest number of times any single value occurs among the terms."""
    terms = as_terms(c)
    _, counts = np.unique(terms, return_counts=True)
    return int(counts.max())


def stats_report(c: TermsLike) -> dict:
    """All statistics of one composition, as a plain dict (CLI surface)."""
    terms = as_terms(c)
    ex = extremes(terms)
    return {
        "n": int(terms.shape[0]),
        "size": int(terms.sum()),
        "components": components(terms).count,
        "gaps": gaps(terms).count,
        "cmax": ex.cmax,
        "cmin": ex.cmin,
        "gmax": ex.gmax,
        "gmin": ex.gmin,
        "tmax": ex.tmax,
        "tmin": ex.tmin,
        "largest_square": largest_square(terms),
        "square_counts": {str(k): v for k, v in sorted(square_counts(terms).items())},
        "longest_increasing_run": longest_increasing_run(terms),
        "is_carlitz": is_carlitz(terms),
        "max_multiplicity": max_multiplicity(terms),
    }
