"""Random composition generators.

Three models plus the coupling bridge:

* geometric: n i.i.d. terms, P(term = k) = q * p**k, by inverse CDF;
* uniform via stars and bars: a uniform (n-1)-subset of [m+n-1] read off as
  gap sizes (Floyd's subset sampling, O(n) memory);
* uniform via the evolutionary chain: m single-ball steps of the Polya urn,
  whose marginal at time m is the same uniform distribution;
* bridge: the independent increment whose term-wise sum turns a geometric
  composition with parameter p1 into one with parameter p2.

All samplers are pure given an RngStream.  Batch variants return a
(count, n) matrix and are the fast path for Monte Carlo work.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Composition
from .rng import RngStream


def _check_p(p: float) -> None:
    if not (0.0 <= p < 1.0):
        raise ValueError(f"p must satisfy 0 <= p < 1, got {p}")


def geometric_terms(n: int, p: float, rng: RngStream, count: int | None = None) -> np.ndarray:
    """i.i.d. geometric terms; shape (n,) or (count, n)."""
    _check_p(p)
    shape = (n,) if count is None else (count, n)
    if p == 0.0:
        return np.zeros(shape, dtype=np.int64)
    u = rng.generator.random(shape)
    # 1-u is in (0, 1], so the log is finite; floor(log(U)/log(p)) is the
    # inverse CDF of P(term = k) = q p^k.
    return np.floor(np.log1p(-u) / math.log(p)).astype(np.int64)


def sample_geometric(n: int, p: float, rng: RngStream) -> Composition:
    """One composition from the geometric model C(n, p)."""
    return Composition(geometric_terms(n, p, rng))


def _floyd_subset(k: int, upper: int, gen: np.random.Generator) -> np.ndarray:
    """Uniform k-subset of {1, ..., upper} by Floyd's algorithm; O(k) memory."""
    chosen: set[int] = set()
    for t in range(upper - k + 1, upper + 1):
        j = int(gen.integers(1, t + 1))
        chosen.add(t if j in chosen else j)
    return np.fromiter(chosen, dtype=np.int64, count=k)


def _bars_to_terms(bars: np.ndarray, n: int, m: int) -> np.ndarray:
    bars.sort()
    out = np.empty(n, dtype=np.int64)
    out[0] = bars[0] - 1
    out[1:-1] = np.diff(bars) - 1
    out[-1] = (m + n - 1) - bars[-1]
    return out


def sample_uniform_bars(n: int, m: int, rng: RngStream) -> Composition:
    """Uniform composition via a random placement of n-1 bars among m stars."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if n == 1:
        return Composition([m])
    bars = _floyd_subset(n - 1, m + n - 1, rng.generator)
    return Composition(_bars_to_terms(bars, n, m))


def uniform_bars_batch(n: int, m: int, count: int, rng: RngStream) -> np.ndarray:
    """(count, n) matrix of independent uniform compositions of m."""
    if n == 1:
        return np.full((count, 1), m, dtype=np.int64)
    if m == 0:
        return np.zeros((count, n), dtype=np.int64)
    gen = rng.generator
    total = m + n - 1
    # rank trick: the positions of the ksel smallest of `total` i.i.d. uniforms
    # are a uniform ksel-subset; select whichever of stars/bars is fewer
    pick_stars = m < n - 1
    ksel = m if pick_stars else n - 1
    out = np.empty((count, n), dtype=np.int64)
    chunk = max(1, int(5e7) // total)  # bound the uniform matrix size
    done = 0
    while done < count:
        c = min(chunk, count - done)
        u = gen.random((c, total))
        idx = np.argpartition(u, ksel - 1, axis=1)[:, :ksel]
        idx.sort(axis=1)
        if pick_stars:
            # star slot minus its rank gives the 0-based box index
            boxes = idx - np.arange(ksel)
            flat = boxes + np.arange(c)[:, None] * n
            out[done:done + c] = np.bincount(
                flat.ravel(), minlength=c * n).reshape(c, n)
        else:
            idx1 = idx + 1
            out[done:done + c, 0] = idx1[:, 0] - 1
            out[done:done + c, 1:-1] = np.diff(idx1, axis=1) - 1
            out[done:done + c, -1] = total - idx1[:, -1]
        done += c
    return out


def sample_uniform_chain(n: int, m: int, rng: RngStream) -> Composition:
    """Uniform composition via m steps of the evolutionary Markov chain.

    Implemented as the multicoloured Polya urn: keep one token per box plus
    one token per ball already placed; each step copies a uniformly chosen
    token.  Each step is O(1), the whole draw O(n + m).
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    gen = rng.generator
    terms = np.zeros(n, dtype=np.int64)
    tokens = list(range(n))
    for t in range(m):
        j = tokens[int(gen.integers(0, n + t))]
        terms[j] += 1
        tokens.append(j)
    return Composition(terms)


def evolve_step(c: Composition, rng: RngStream) -> Composition:
    """One chain step: add a ball to box j with probability (c(j)+1)/(n+t)."""
    terms = c.terms
    weights = np.cumsum(terms + 1)
    r = int(rng.generator.integers(0, weights[-1]))
    j = int(np.searchsorted(weights, r, side="right"))
    return c.with_increment(j)


def bridge_terms(n: int, p1: float, p2: float, rng: RngStream, count: int | None = None) -> np.ndarray:
    """i.i.d. increment terms: P(0) = q2/q1, P(k) = (q2/q1)(1 - p1/p2) p2^k for k >= 1."""
    _check_p(p1)
    _check_p(p2)
    if not p1 < p2:
        raise ValueError(f"bridge requires p1 < p2, got p1={p1}, p2={p2}")
    q1, q2 = 1.0 - p1, 1.0 - p2
    shape = (n,) if count is None else (count, n)
    gen = rng.generator
    u = gen.random(shape)
    v = gen.random(shape)
    # conditioned on being nonzero the law is 1 + geometric(1-p2)
    nonzero = u >= q2 / q1
    tail = 1 + np.floor(np.log1p(-v) / math.log(p2)).astype(np.int64)
    return np.where(nonzero, tail, 0)


def sample_bridge(n: int, p1: float, p2: float, rng: RngStream) -> Composition:
    """One composition from the coupling increment law between C(n,p1) and C(n,p2)."""
    return Composition(bridge_terms(n, p1, p2, rng))


def sample_geometric_conditioned(n: int, p: float, m: int, rng: RngStream,
                                 max_attempts: int = 10_000_000) -> Composition:
    """Rejection-sample C(n, p) conditioned on size m (test-scale only)."""
    _check_p(p)
    batch = 256
    done = 0
    while done < max_attempts:
        draws = geometric_terms(n, p, rng, count=batch)
        sizes = draws.sum(axis=1)
        hits = np.nonzero(sizes == m)[0]
        if hits.size:
            return Composition(draws[hits[0]])
        done += batch
    raise RuntimeError(f"rejection sampling failed to hit size {m} in {max_attempts} attempts")
