"""Core domain types: compositions, model parameters, pattern specs, estimates.

Everything here is immutable after construction and free of I/O and
randomness, so values can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence, Union

import numpy as np

TermsLike = Union["Composition", Sequence[int], np.ndarray]


class GuardExceeded(RuntimeError):
    """An operation was refused because it would exceed a configured size guard."""


class UnsupportedProperty(ValueError):
    """The requested property cannot be handled by this operation."""


class Composition:
    """A finite sequence of nonnegative integers (an n-term weak composition).

    Terms are stored in a read-only int64 array.  ``size`` is the sum of the
    terms, which may differ from the length ``n``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: TermsLike):
        if isinstance(terms, Composition):
            self._terms = terms._terms
            return
        arr = np.asarray(terms, dtype=np.int64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("a composition needs at least one term")
        if np.any(arr < 0):
            raise ValueError("composition terms must be nonnegative")
        arr = arr.copy()
        arr.flags.writeable = False
        self._terms = arr

    @property
    def terms(self) -> np.ndarray:
        return self._terms

    @property
    def n(self) -> int:
        return self._terms.shape[0]

    @property
    def size(self) -> int:
        return int(self._terms.sum())

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return iter(self._terms.tolist())

    def __getitem__(self, i):
        return int(self._terms[i]) if np.isscalar(i) or isinstance(i, int) else self._terms[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, Composition):
            return np.array_equal(self._terms, other._terms)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._terms.tobytes())

    def __repr__(self) -> str:
        return f"Composition({self._terms.tolist()})"

    def with_increment(self, j: int) -> "Composition":
        """Return a copy with one ball added to term ``j`` (the C^{+j} step)."""
        arr = self._terms.copy()
        arr[j] += 1
        return Composition(arr)


def as_terms(c: TermsLike) -> np.ndarray:
    """Coerce a composition-like value to a 1-d int64 array."""
    if isinstance(c, Composition):
        return c.terms
    return np.asarray(c, dtype=np.int64)


def composition_size(c: TermsLike) -> int:
    """Sum of the terms (the size of the composition, not its length)."""
    return int(as_terms(c).sum())


def count_compositions(n: int, m: int) -> int:
    """Number of n-term weak compositions of m: binom(m+n-1, m), exact."""
    if n < 1:
        raise ValueError("n must be positive")
    if m < 0:
        raise ValueError("m must be nonnegative")
    return math.comb(m + n - 1, m)


@dataclass(frozen=True)
class UniformModel:
    """Uniform distribution over all n-term weak compositions of m."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m < 0:
            raise ValueError("m must be nonnegative")


@dataclass(frozen=True)
class GeometricModel:
    """n i.i.d. terms with P(term = k) = (1-p) * p**k; undefined at p = 1."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not (0.0 <= self.p < 1.0):
            raise ValueError("p must satisfy 0 <= p < 1 (the model is undefined at p = 1)")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def mean_size(self) -> float:
        """Mean of the (negative binomial) size: n*p/q."""
        return self.n * self.p / self.q


ModelParams = Union[UniformModel, GeometricModel]


class PatternKind(Enum):
    EXACT = "e"
    UPPER = "u"
    LOWER = "l"
    ORDERING = "o"


class BlockStructure(Enum):
    CONSECUTIVE = "consecutive"
    VINCULAR = "vincular"
    NONCONSECUTIVE = "nonconsecutive"


@dataclass(frozen=True)
class PatternSpec:
    """A parsed pattern: comparison kind plus block structure.

    Each block is a run of terms that must appear consecutively; distinct
    blocks may be separated by intervening positions.
    """

    kind: PatternKind
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.blocks or any(len(b) == 0 for b in self.blocks):
            raise ValueError("pattern must have at least one nonempty block")
        if any(t < 0 for b in self.blocks for t in b):
            raise ValueError("pattern terms must be nonnegative")
        if self.kind is PatternKind.ORDERING:
            values = sorted({t for b in self.blocks for t in b})
            if values != list(range(len(values))):
                raise ValueError(
                    "ordering pattern values must form an initial segment 0..r "
                    f"(got {values})"
                )

    @property
    def terms(self) -> tuple[int, ...]:
        return tuple(t for b in self.blocks for t in b)

    @property
    def length(self) -> int:
        """Total number of terms, across all blocks."""
        return sum(len(b) for b in self.blocks)

    @property
    def size(self) -> int:
        """Sum of all terms (NOT the length)."""
        return sum(self.terms)

    @property
    def structure(self) -> BlockStructure:
        if len(self.blocks) == 1:
            return BlockStructure.CONSECUTIVE
        if all(len(b) == 1 for b in self.blocks):
            return BlockStructure.NONCONSECUTIVE
        return BlockStructure.VINCULAR

    def __str__(self) -> str:
        parts = []
        for b in self.blocks:
            if len(b) == 1 and len(self.blocks) > 1:
                parts.append(str(b[0]))
            else:
                parts.append("[" + ",".join(map(str, b)) + "]")
        return f"{self.kind.value}:" + ",".join(parts)


@dataclass(frozen=True)
class EstimateResult:
    """A Monte Carlo point estimate with its confidence interval."""

    point: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    confidence: float = 0.95

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not (self.ci_low <= self.point + 1e-12 and self.point <= self.ci_high + 1e-12):
            raise ValueError("interval must contain the point estimate")
