"""Mandelbrot percolation: keyed-hash simulation, Galton-Watson analytics,
the dimension formulas conditioned on non-extinction, and the full-subtree
tangent-witness search.

Each cube at level k is kept independently with exact probability p via a
hash of (seed, level, coordinate), so survival is independent of enumeration
order and the whole construction is reproducible and parallelisable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._core import expand_level, survives_to_depth
from .errors import (InvalidInputError, NotApplicableError,
                     RetriesExhaustedError)

FIXED_POINT_TOL = 1e-12
_MAX_ITER = 2_000_000


@dataclass(frozen=True)
class PercConfig:
    n: int
    d: int
    p: Fraction
    seed: int

    def __post_init__(self):
        if self.n < 2 or self.d < 1:
            raise InvalidInputError("need n >= 2 and d >= 1")
        p = Fraction(self.p)
        if not 0 < p < 1:
            raise InvalidInputError("p must lie in (0,1)")
        if p.denominator >= 1 << 63:
            raise InvalidInputError("p denominator too large for the exact keep-test")
        object.__setattr__(self, "p", p)

    @property
    def offspring(self) -> int:
        return self.n**self.d

    @property
    def supercritical(self) -> bool:
        return self.p > Fraction(1, self.offspring)


@dataclass
class PercLevels:
    """Per-level surviving cube coordinates; level k is an (N, d) int64 array."""

    n: int
    d: int
    levels: list[np.ndarray]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def nonempty_to(self, depth: int) -> bool:
        return depth <= self.depth and len(self.levels[depth]) > 0


@dataclass(frozen=True)
class TangentWitness:
    level: int
    coord: tuple[int, ...]
    m: int
    distance_bound: float  # sqrt(d) * n^-m


def simulate(config: PercConfig, depth: int) -> PercLevels:
    """Expand the percolation tree level by level to `depth`.

    Extinct realisations simply return empty arrays at the higher levels.
    """
    if depth < 0:
        raise InvalidInputError("depth must be >= 0")
    levels = [np.zeros((1, config.d), dtype=np.int64)]
    p_num, p_den = config.p.numerator, config.p.denominator
    for k in range(1, depth + 1):
        if len(levels[-1]) == 0:
            levels.append(np.zeros((0, config.d), dtype=np.int64))
            continue
        levels.append(expand_level(config.seed, k, levels[-1],
                                   config.n, p_num, p_den))
    return PercLevels(config.n, config.d, levels)


def extinction_probability(n: int, d: int, p) -> tuple[float, float]:
    """(q, 1-q): least fixed point of q -> (1-p+pq)^{n^d} by monotone
    iteration from 0; q = 1 in the (sub)critical regime p <= 1/n^d."""
    N = n**d
    pf = float(Fraction(p))
    if pf <= 1.0 / N:
        return 1.0, 0.0
    q = 0.0
    for _ in range(_MAX_ITER):
        nxt = (1.0 - pf + pf * q) ** N
        if nxt - q < FIXED_POINT_TOL * 1e-3:
            q = nxt
            break
        q = nxt
    return q, 1.0 - q


def survival_probability_by_depth(n: int, d: int, p, depth: int) -> float:
    """P(some level-`depth` cube survives): 1 - g^depth(0) for the offspring
    generating function g; exact oracle for finite-depth Monte Carlo."""
    N = n**d
    pf = float(Fraction(p))
    q = 0.0
    for _ in range(depth):
        q = (1.0 - pf + pf * q) ** N
    return 1.0 - q


def hausdorff_dim_percolation(n: int, d: int, p) -> float:
    """Almost-sure Hausdorff (and packing) dimension log(n^d p)/log n,
    conditioned on non-extinction; requires p > 1/n^d."""
    pf = float(Fraction(p))
    if pf < 1.0 / n**d:
        raise NotApplicableError("subcritical: conditioning event is null")
    return math.log(n**d * pf) / math.log(n)


def assouad_dim_percolation(n: int, d: int, p) -> int:
    """Almost surely d, conditioned on non-extinction; independent of p."""
    if Fraction(p) <= Fraction(1, n**d):
        raise NotApplicableError("subcritical: conditioning event is null")
    return d


def projection_assouad(n: int, d: int, p, k: int) -> int:
    """Almost surely every orthogonal projection to R^k has Assouad dimension
    k (so the set embeds in no lower-dimensional Euclidean space)."""
    if not 1 <= k <= d:
        raise InvalidInputError("need 1 <= k <= d")
    if Fraction(p) <= Fraction(1, n**d):
        raise NotApplicableError("subcritical: conditioning event is null")
    return k


@dataclass(frozen=True)
class LemmaQuantities:
    L: int
    p_hat: float
    k_of_m: Optional[int]
    saturated: bool
    log_p_hat: float


def lemma_quantities(N: int, m: int, p, p_noext: float) -> LemmaQuantities:
    """Toss count L_N^m = (N^{m+1}-N)/(N-1) - m, full-subtree probability
    p_hat = p^L * p_noext^{N^m - 1}, and block length k(m).

    When p_hat underflows, k(m) is reported as saturated together with the
    exact log expression.
    """
    if N < 2 or m < 1:
        raise InvalidInputError("need N >= 2 and m >= 1")
    pf = float(Fraction(p))
    L = (N ** (m + 1) - N) // (N - 1) - m
    log_p_hat = L * math.log(pf) + (N**m - 1) * math.log(p_noext) \
        if p_noext > 0 else -math.inf
    if log_p_hat < -700:
        return LemmaQuantities(L, 0.0, None, True, log_p_hat)
    p_hat = math.exp(log_p_hat)
    k_of_m = m * math.ceil(-math.log(2) / math.log1p(-p_hat))
    return LemmaQuantities(L, p_hat, k_of_m, False, log_p_hat)


def _encode(coords: np.ndarray, stride: int) -> np.ndarray:
    key = coords[:, 0].astype(np.int64).copy()
    for a in range(1, coords.shape[1]):
        key = key * stride + coords[:, a]
    return key


def tangent_witness_search(levels: PercLevels, m_target: int
                           ) -> Optional[TangentWitness]:
    """Largest full surviving m-subtree, m <= m_target.

    Scans every cube at every level k with k + m <= depth; ties broken by
    smallest level then lexicographically smallest coordinate.  By parent
    closure, a cube whose n^{dm} depth-(k+m) descendants all survive has a
    complete subtree, and its blow-up is within sqrt(d) n^-m of the cube in
    Hausdorff distance.
    """
    if m_target < 1:
        raise InvalidInputError("m_target must be >= 1")
    n, d = levels.n, levels.d
    for m in range(min(m_target, levels.depth), 0, -1):
        full_count = n ** (d * m)
        for k in range(0, levels.depth - m + 1):
            leaves = levels.levels[k + m]
            if len(leaves) < full_count:
                continue
            anc = leaves // (n**m)
            stride = n**k
            if d * math.log2(max(stride, 2)) > 62:
                raise InvalidInputError("coordinates too large to encode")
            keys, counts = np.unique(_encode(anc, stride), return_counts=True)
            hits = keys[counts == full_count]
            if len(hits) == 0:
                continue
            best = int(hits.min())  # lexicographic min under the encoding
            coord = [0] * d
            for a in range(d - 1, -1, -1):
                coord[a] = best % stride
                best //= stride
            return TangentWitness(k, tuple(coord), m,
                                  math.sqrt(d) * n ** (-m))
    return None


def conditioned_sample(config: PercConfig, depth: int,
                       max_retries: int = 1000) -> tuple[PercLevels, int]:
    """Rejection-sample seeds (seed, seed+1, ...) until level-`depth` is
    non-empty; returns (levels, retries used)."""
    if not config.supercritical:
        raise NotApplicableError("conditioning requires p > 1/n^d")
    if max_retries < 1:
        raise InvalidInputError("max_retries must be >= 1")
    p_num, p_den = config.p.numerator, config.p.denominator
    for attempt in range(max_retries):
        seed = config.seed + attempt
        if survives_to_depth(seed, config.n, config.d, p_num, p_den, depth):
            cfg = PercConfig(config.n, config.d, config.p, seed)
            return simulate(cfg, depth), attempt + 1
    _, p_noext = extinction_probability(config.n, config.d, config.p)
    raise RetriesExhaustedError(max_retries, p_noext)
