"""Weak-tangent experiments: blow up a scheduled approximate square of a
carpet good word against its product-grid target, and blow up a full
percolation subtree against the full grid.

These orchestrate carpet/percolation constructions with the estimate-module
blow-up and distance operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .carpet import (ApproxSquare, CarpetRIFS, approximate_squares,
                     carpet_grid, good_word_carpet, k_scales,
                     tangent_product_target)
from .errors import ScaleError
from .estimate import (GridSet, blowup, from_carpet_grid, from_percolation,
                       full_grid, hausdorff_distance)
from .percolation import (PercConfig, TangentWitness, conditioned_sample,
                          tangent_witness_search)
from .words import RealizationStream, Word


@dataclass(frozen=True)
class CarpetTangentStage:
    R: Fraction
    n: int
    k1: int
    k2: int
    word: Word
    square: ApproxSquare
    blown: GridSet
    target: GridSet
    distance: float
    bound: float
    collar: float

    @property
    def dominated(self) -> bool:
        return self.distance <= self.bound + self.collar


def carpet_tangent_stage(rifs: CarpetRIFS, base: RealizationStream,
                         i: int, j: int, R: Fraction, n: int,
                         depth: int) -> CarpetTangentStage:
    """One blow-up of the scheduled approximate R-square of a good word.

    The word forces j on the run (k1, k1+n] and i on (k2, k2+n]; the square's
    digit path threads the maximal column of j on the j-run, so the blow-up
    approximates the product of the column projection of letter i with the
    maximal-column set of letter j at level n.
    """
    R = Fraction(R)
    word = good_word_carpet(rifs, base, i, j, [(R, n)], length=depth)
    k1, k2 = k_scales(word, rifs.grids, R)
    if depth < k2 + n:
        raise ScaleError(f"depth {depth} below the needed k2 + n = {k2 + n}")

    cj = rifs.ifss[j - 1]
    max_col, _ = cj.max_column()
    path = []
    for t in range(k2):
        digits = sorted(rifs.ifss[word[t] - 1].digits)
        if k1 <= t < k1 + n:
            digits = [d for d in digits if d[0] == max_col]
        path.append(digits[0])
    square = approximate_squares(word, rifs, R, path)

    (x_lo, x_hi), (y_lo, y_hi) = square.base, square.height
    grid = carpet_grid(word, rifs, depth, window=(x_lo, x_hi, y_lo, y_hi))
    blown = blowup(from_carpet_grid(grid), (x_lo, y_lo),
                   (x_hi - x_lo, y_hi - y_lo))
    target = from_carpet_grid(tangent_product_target(rifs, i, j, n))
    dist = hausdorff_distance(blown, target)
    m_i = rifs.ifss[i - 1].m
    n_j = cj.n
    bound = math.sqrt(m_i ** (-2 * n) + n_j ** (-2 * n))
    collar = 0.5 * blown.cell_diagonal() + 0.5 * target.cell_diagonal()
    return CarpetTangentStage(R, n, k1, k2, word, square, blown, target,
                              dist, bound, collar)


@dataclass(frozen=True)
class PercTangentResult:
    witness: TangentWitness
    retries: int
    blown: GridSet
    distance: float

    @property
    def dominated(self) -> bool:
        return self.distance <= self.witness.distance_bound


def percolation_tangent(config: PercConfig, depth: int, m_target: int,
                        max_retries: int = 1000) -> PercTangentResult:
    """Blow up the best full-subtree witness of a conditioned realisation.

    The blow-up of a level-k cube with a complete m-subtree equals the full
    n^m grid exactly, so the reported distance is 0 up to center quantisation
    and always within sqrt(d) n^-m of the unit cube.
    """
    levels, retries = conditioned_sample(config, depth, max_retries)
    witness = tangent_witness_search(levels, m_target)
    if witness is None:
        raise ScaleError("no full subtree of any order survives to depth")
    n, k, m = config.n, witness.level, witness.m
    gs = from_percolation(levels, k + m)
    lo = tuple(Fraction(c, n**k) for c in witness.coord)
    sides = (Fraction(1, n**k),) * config.d
    blown = blowup(gs, lo, sides)
    target = full_grid((n**m,) * config.d)
    dist = hausdorff_distance(blown, target)
    return PercTangentResult(witness, retries, blown, dist)
