"""Random self-similar systems: exact homothetic IFS specifications,
Moran-equation solvers, separation checks, composed-period diagnostics and
exact attractor box approximations.

All map data are rational and all geometry (box disjointness, containment,
blow-ups) is decided in exact arithmetic; floats appear only in dimension
values returned by the root finders.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import sympy

from .errors import InvalidInputError
from .words import Word, check_letters, probability_vector

BISECTION_TOL = 1e-12

UOSC_VERIFIED = "verified"
UOSC_REFUTED = "refuted-for-unit-cube"
UOSC_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SimilarityMap:
    """Homothety x -> ratio*x + translation mapping [0,1]^d into itself."""

    ratio: Fraction
    translation: tuple[Fraction, ...]

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise InvalidInputError(f"ratio {self.ratio} not in (0,1)")
        for t in self.translation:
            if t < 0 or t + self.ratio > 1:
                raise InvalidInputError(
                    "map image must stay inside the unit cube"
                )

    @property
    def dim(self) -> int:
        return len(self.translation)

    def compose(self, other: "SimilarityMap") -> "SimilarityMap":
        # (self . other)(x) = c1*(c2*x + t2) + t1
        return SimilarityMap(
            self.ratio * other.ratio,
            tuple(self.ratio * t2 + t1
                  for t1, t2 in zip(self.translation, other.translation)),
        )

    def box(self) -> tuple[tuple[Fraction, ...], Fraction]:
        """Image of [0,1]^d: (lower corner, side length)."""
        return self.translation, self.ratio


@dataclass(frozen=True)
class SimilarityIFS:
    maps: tuple[SimilarityMap, ...]

    def __post_init__(self):
        if not self.maps:
            raise InvalidInputError("IFS must be non-empty")
        if len({m.dim for m in self.maps}) != 1:
            raise InvalidInputError("maps must share the ambient dimension")

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def ratios(self) -> tuple[Fraction, ...]:
        return tuple(m.ratio for m in self.maps)


@dataclass(frozen=True)
class SimilarityRIFS:
    ifss: tuple[SimilarityIFS, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.ifss) != len(self.probs):
            raise InvalidInputError("one probability per IFS required")
        probability_vector(self.probs)
        if len({ifs.dim for ifs in self.ifss}) != 1:
            raise InvalidInputError("IFSs must share the ambient dimension")

    @property
    def dim(self) -> int:
        return self.ifss[0].dim

    @property
    def alphabet_size(self) -> int:
        return len(self.ifss)


@dataclass(frozen=True)
class BoxSet:
    """Finite-depth attractor approximation: exact level-k image boxes."""

    depth: int
    boxes: tuple[tuple[tuple[Fraction, ...], Fraction], ...]


def _bisect_decreasing(f, hi0: float, tol: float = BISECTION_TOL) -> float:
    """Root of a strictly decreasing f with f(0) >= 0, growing the bracket."""
    if f(0.0) <= 0.0:
        return 0.0
    hi = hi0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise InvalidInputError("root finder failed to bracket")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def similarity_dimension(ratios: Sequence[Fraction]) -> float:
    """Unique s >= 0 with sum c_i^s = 1 (bisection, |residual| ~ 1e-12)."""
    cs = [Fraction(c) for c in ratios]
    if not cs:
        raise InvalidInputError("ratio list is empty")
    if any(not 0 < c < 1 for c in cs):
        raise InvalidInputError("ratios must lie in (0,1)")
    fl = [float(c) for c in cs]
    return _bisect_decreasing(lambda s: sum(c**s for c in fl) - 1.0, 2.0)


def almost_sure_hausdorff(rifs: SimilarityRIFS) -> float:
    """Unique s with sum_i p_i log(sum_j c_{i,j}^s) = 0 (a.s. Hausdorff value)."""
    ps = [float(p) for p in rifs.probs]
    cs = [[float(c) for c in ifs.ratios] for ifs in rifs.ifss]

    def g(s: float) -> float:
        return sum(p * math.log(sum(c**s for c in row))
                   for p, row in zip(ps, cs))

    return _bisect_decreasing(g, 2.0)


def check_uosc(rifs: SimilarityRIFS) -> str:
    """Three-valued UOSC check against the candidate open set U = (0,1)^d.

    verified: every IFS maps U to pairwise-disjoint open boxes inside U.
    refuted-for-unit-cube: some pair of open image boxes overlaps.  A refuted
    verdict never claims UOSC fails for every open set, only for this one.
    """
    overlap_found = False
    for ifs in rifs.ifss:
        for m1, m2 in itertools.combinations(ifs.maps, 2):
            if _open_boxes_overlap(m1, m2):
                overlap_found = True
    if overlap_found:
        return UOSC_REFUTED
    # containment in (0,1)^d: images of the open cube are open boxes
    # (t, t+c) which always sit inside [0,1]; that suffices for the
    # invariance U-image subset U of the open set condition.
    return UOSC_VERIFIED


def _open_boxes_overlap(m1: SimilarityMap, m2: SimilarityMap) -> bool:
    for t1, t2 in zip(m1.translation, m2.translation):
        if t1 + m1.ratio <= t2 or t2 + m2.ratio <= t1:
            return False
    return True


def sure_assouad_upper(rifs: SimilarityRIFS):
    """max_i of the per-IFS similarity dimensions, with its applicability flag.

    Returns (value, uosc_verdict); the value is a bound valid for every
    realisation only when the verdict is "verified".
    """
    value = max(similarity_dimension(ifs.ratios) for ifs in rifs.ifss)
    return value, check_uosc(rifs)


def as_assouad_selfsimilar(rifs: SimilarityRIFS):
    """Same value as sure_assouad_upper; the almost-sure Assouad dimension
    when the UOSC verdict is "verified"."""
    return sure_assouad_upper(rifs)


def _exponent_vector(c: Fraction) -> dict[int, int]:
    vec: dict[int, int] = {}
    for prime, e in sympy.factorint(c.numerator).items():
        vec[int(prime)] = vec.get(int(prime), 0) + e
    for prime, e in sympy.factorint(c.denominator).items():
        vec[int(prime)] = vec.get(int(prime), 0) - e
    return {p: e for p, e in vec.items() if e}


def multiplicative_dependence(c1: Fraction, c2: Fraction) -> bool:
    """True iff log c1 / log c2 is rational, decided exactly.

    Writes each ratio as a signed prime-exponent vector; the logs are
    rationally dependent iff the two vectors are parallel over Q.
    """
    c1, c2 = Fraction(c1), Fraction(c2)
    if not (0 < c1 < 1 and 0 < c2 < 1):
        raise InvalidInputError("ratios must lie in (0,1)")
    v1, v2 = _exponent_vector(c1), _exponent_vector(c2)
    if set(v1) != set(v2):
        return False
    primes = sorted(v1)
    p0 = primes[0]
    a, b = v1[p0], v2[p0]
    return all(v1[p] * b == v2[p] * a for p in primes)


def compose_period(rifs: SimilarityRIFS, pattern: Sequence[int]) -> SimilarityIFS:
    """IFS of all compositions S_{w1,i1} o ... o S_{wp,ip} over one period."""
    pattern = check_letters(pattern, rifs.alphabet_size)
    if not pattern:
        raise InvalidInputError("pattern must be non-empty")
    maps = [rifs.ifss[pattern[0] - 1].maps]
    for letter in pattern[1:]:
        maps.append(rifs.ifss[letter - 1].maps)
    composed = []
    for combo in itertools.product(*maps):
        m = combo[0]
        for nxt in combo[1:]:
            m = m.compose(nxt)
        composed.append(m)
    return SimilarityIFS(tuple(composed))


@dataclass(frozen=True)
class PeriodicProbe:
    """Best composed-period similarity dimension plus the overlap witness."""

    value: float
    best_pattern: Word
    independent_witness: Optional[tuple[Fraction, Fraction]]
    patterns_checked: int


def periodic_sup_probe(rifs: SimilarityRIFS, max_period: int,
                       max_patterns: int = 4096) -> PeriodicProbe:
    """Sup of composed-period similarity dimensions over patterns of length
    <= max_period.

    Under separation this is the sup over periodic attractors; under overlaps
    it is only an upper envelope for Hausdorff dimension, and the interesting
    signal is a multiplicatively independent pair of composed ratios, which
    witnesses the dimension jump of the overlapping construction.
    """
    if max_period < 1:
        raise InvalidInputError("max_period must be >= 1")
    best = -1.0
    best_pattern: Word = ()
    witness = None
    checked = 0
    for period in range(1, max_period + 1):
        for pattern in itertools.product(range(1, rifs.alphabet_size + 1),
                                         repeat=period):
            checked += 1
            if checked > max_patterns:
                raise InvalidInputError(
                    f"pattern budget {max_patterns} exceeded; lower max_period"
                )
            composed = compose_period(rifs, pattern)
            value = similarity_dimension(composed.ratios)
            if value > best:
                best, best_pattern = value, pattern
            if witness is None:
                for a, b in itertools.combinations(
                        sorted(set(composed.ratios), reverse=True), 2):
                    if not multiplicative_dependence(a, b):
                        witness = (a, b)
                        break
    return PeriodicProbe(best, best_pattern, witness, checked)


def attractor_boxes(rifs: SimilarityRIFS, word: Sequence[int], depth: int) -> BoxSet:
    """All depth-`depth` composition images of [0,1]^d with exact corners."""
    word = check_letters(word, rifs.alphabet_size)
    if depth < 0 or depth > len(word):
        raise InvalidInputError("need 0 <= depth <= len(word)")
    # level 0: the unit cube itself
    current: list[tuple[tuple[Fraction, ...], Fraction]] = [
        ((Fraction(0),) * rifs.dim, Fraction(1))
    ]
    for k in range(depth):
        ifs = rifs.ifss[word[k] - 1]
        nxt = []
        for lo, side in current:
            for m in ifs.maps:
                nxt.append((
                    tuple(l + side * t for l, t in zip(lo, m.translation)),
                    side * m.ratio,
                ))
        current = nxt
    return BoxSet(depth, tuple(current))


def blowup_boxes(boxes: BoxSet, window_lo: Sequence[Fraction],
                 window_side: Fraction) -> frozenset:
    """Renormalise the boxes inside a cubical window to the unit frame, exactly.

    Used to verify the discrete shift inclusion: blowing up the depth-(k+N)
    boxes over a depth-k cylinder box reproduces the depth-N boxes of the
    shifted word.
    """
    window_lo = tuple(Fraction(x) for x in window_lo)
    side = Fraction(window_side)
    if side <= 0:
        raise InvalidInputError("window side must be positive")
    out = set()
    for lo, bside in boxes.boxes:
        rel = tuple((l - w) / side for l, w in zip(lo, window_lo))
        if all(0 <= r and r + bside / side <= 1 for r in rel):
            out.add((rel, bside / side))
    return frozenset(out)
