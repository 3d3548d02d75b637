"""Symbolic sample space: words over a finite alphabet, cylinder measures,
the 2^-k ultrametric, seeded sampling and good-word splicers.

Letters are 1-based.  Infinite realisations are represented by a
:class:`RealizationStream` (a generation rule) from which finite prefixes are
drawn; every operation that conceptually consumes an infinite word takes a
prefix length instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ._core import mix64
from .errors import InvalidInputError, InvalidScheduleError

Word = tuple[int, ...]

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
_TWO64 = 1 << 64


def probability_vector(probs: Sequence[Fraction | str | int]) -> tuple[Fraction, ...]:
    """Validate a strictly positive rational vector summing to 1 exactly."""
    p = tuple(Fraction(x) for x in probs)
    if not p:
        raise InvalidInputError("probability vector is empty")
    if any(x <= 0 for x in p):
        raise InvalidInputError("probabilities must be strictly positive")
    if sum(p) != 1:
        raise InvalidInputError(f"probabilities sum to {sum(p)}, not 1")
    return p


def check_letters(word: Sequence[int], alphabet_size: int) -> Word:
    w = tuple(int(x) for x in word)
    for x in w:
        if not 1 <= x <= alphabet_size:
            raise InvalidInputError(f"letter {x} outside 1..{alphabet_size}")
    return w


def cylinder_measure(w: Sequence[int], p: Sequence[Fraction]) -> Fraction:
    """Bernoulli measure of the cylinder [w]: the exact product of p_{w_k}."""
    p = probability_vector(p)
    w = check_letters(w, len(p))
    out = Fraction(1)
    for x in w:
        out *= p[x - 1]
    return out


def word_metric(u: Sequence[int], v: Sequence[int]) -> float:
    """d(u, v) = 2^-(length of the common prefix); equal finite words get 2^-len."""
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return 2.0 ** (-k)


class _SplitMix:
    """splitmix64 stream; the per-step output is mix64 of the advanced state."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return mix64(self.state)


@dataclass
class RealizationStream:
    """Deterministic generator of one infinite word.

    mode is one of "iid", "periodic", "constant", "spliced".  Splices are
    1-based (start, letters) overrides applied on top of the base stream.
    """

    mode: str
    probs: Optional[tuple[Fraction, ...]] = None
    seed: Optional[int] = None
    pattern: Optional[Word] = None
    base: Optional["RealizationStream"] = None
    splices: tuple[tuple[int, Word], ...] = ()
    _cache: list[int] = field(default_factory=list, repr=False)
    _rng: Optional[_SplitMix] = field(default=None, repr=False)

    @classmethod
    def iid(cls, probs: Sequence, seed: int) -> "RealizationStream":
        return cls(mode="iid", probs=probability_vector(probs), seed=int(seed))

    @classmethod
    def periodic(cls, pattern: Sequence[int]) -> "RealizationStream":
        pat = tuple(int(x) for x in pattern)
        if not pat or any(x < 1 for x in pat):
            raise InvalidInputError("pattern must be a non-empty word")
        return cls(mode="periodic", pattern=pat)

    @classmethod
    def constant(cls, letter: int) -> "RealizationStream":
        return cls.periodic((letter,))

    @classmethod
    def spliced(cls, base: "RealizationStream",
                splices: Sequence[tuple[int, Sequence[int]]]) -> "RealizationStream":
        sp = tuple(sorted((int(s), tuple(int(x) for x in ls)) for s, ls in splices))
        for (s1, l1), (s2, _) in zip(sp, sp[1:]):
            if s1 + len(l1) > s2:
                raise InvalidScheduleError(f"splices at {s1} and {s2} overlap")
        if sp and sp[0][0] < 1:
            raise InvalidScheduleError("splice positions are 1-based")
        return cls(mode="spliced", base=base, splices=sp)

    def letter(self, k: int) -> int:
        """The k-th letter, 1-based."""
        if k < 1:
            raise InvalidInputError("letter index is 1-based")
        if self.mode == "periodic":
            return self.pattern[(k - 1) % len(self.pattern)]
        if self.mode == "spliced":
            for start, letters in self.splices:
                if start <= k < start + len(letters):
                    return letters[k - start]
            return self.base.letter(k)
        # iid: grow the cached prefix from the seeded stream
        while len(self._cache) < k:
            self._cache.append(self._draw())
        return self._cache[k - 1]

    def _draw(self) -> int:
        if self._rng is None:
            self._rng = _SplitMix(self.seed)
        z = self._rng.next_u64()
        # inverse CDF over exact cumulative rationals: letter i iff z/2^64 < cum_i
        cum = Fraction(0)
        for i, pi in enumerate(self.probs, start=1):
            cum += pi
            if z * cum.denominator < cum.numerator * _TWO64:
                return i
        return len(self.probs)  # unreachable: cum == 1 > z/2^64

    def prefix(self, length: int) -> Word:
        if length < 0:
            raise InvalidInputError("length must be >= 0")
        return tuple(self.letter(k) for k in range(1, length + 1))


def sample_realization(seed: int, p: Sequence, length: int) -> Word:
    """An i.i.d. prefix of length `length`, letter i with probability p_i."""
    return RealizationStream.iid(p, seed).prefix(length)


def good_word_selfsimilar(base: RealizationStream, i: int,
                          run_lengths: Sequence[int],
                          run_positions: Sequence[int],
                          length: Optional[int] = None) -> Word:
    """Base word with the letter i written on each block [pos, pos+len).

    The output is (a finite truncation of) a member of the good set of words
    containing arbitrarily long constant-i runs.
    """
    if len(run_lengths) != len(run_positions):
        raise InvalidScheduleError("run_lengths and run_positions differ in length")
    runs = list(zip(run_positions, run_lengths))
    for (p1, l1), (p2, _) in zip(runs, runs[1:]):
        if p2 <= p1:
            raise InvalidScheduleError("run positions must be strictly increasing")
        if p1 + l1 > p2:
            raise InvalidScheduleError(f"runs at {p1} and {p2} overlap")
    if any(l < 1 or p < 1 for p, l in runs):
        raise InvalidScheduleError("positions and lengths must be >= 1")
    needed = max((p + l - 1 for p, l in runs), default=0)
    n = max(length or 0, needed)
    spliced = RealizationStream.spliced(base, [(p, (i,) * l) for p, l in runs])
    return spliced.prefix(n)


def omega_hausdorff_dim(N: int) -> float:
    """Hausdorff dimension of the full shift on N letters under d = 2^-(common prefix)."""
    if N < 1:
        raise InvalidInputError("alphabet size must be >= 1")
    return math.log(N) / math.log(2)


def exceptional_dim_lower(N: int, N_nonmax: int, n: int) -> float:
    """Lower bound for the dimension of the exceptional set at run cap n.

    alpha_n = log(N^h - N_nonmax^h) / (h log 2) with h = ceil(n/2); monotone
    non-decreasing in n with limit log N / log 2.
    """
    _check_exceptional_args(N, N_nonmax, n)
    h = -(-n // 2)
    count = N**h - N_nonmax**h
    return math.log(count) / (h * math.log(2))


def mass_distribution_check(N: int, N_nonmax: int, n: int, k: int):
    """Exact identity nu(U_k) = |U_k|^alpha_n behind the dimension bound.

    Returns (nu_value, diam_pow_alpha, discrepancy) where the discrepancy is
    |log nu - alpha_n log |U_k|| evaluated on exact integer inputs.
    """
    _check_exceptional_args(N, N_nonmax, n)
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    h = -(-n // 2)
    count = N**h - N_nonmax**h
    nu = Fraction(1, count**k)
    alpha = math.log(count) / (h * math.log(2))
    log_diam = -k * h * math.log(2)
    diam_pow_alpha = math.exp(alpha * log_diam)
    # log nu computed on the integer count to avoid float underflow at big k
    discrepancy = abs(-k * math.log(count) - alpha * log_diam)
    return nu, diam_pow_alpha, discrepancy


def _check_exceptional_args(N: int, N_nonmax: int, n: int) -> None:
    if N < 2 or not 1 <= N_nonmax < N:
        raise InvalidInputError("need 1 <= N_nonmax < N with N >= 2")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
