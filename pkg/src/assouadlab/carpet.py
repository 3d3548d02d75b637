"""Random grid-aligned self-affine carpets: exact mixed-radix occupancy
grids, the column/row dimension formulas, approximate R-squares, the sure
covering bound, good-word splicing and the tangent product target.

A carpet IFS lives on an m x n mesh (n > m >= 2) with digits (a, b),
0 <= a < m, 0 <= b < n.  A = number of non-empty columns, B = maximal
occupancy of a single column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._core import mix64
from .errors import (InfeasibleScheduleError, InsufficientPrefixError,
                     InvalidInputError, InvalidScheduleError, NotApplicableError,
                     ScaleError)
from .words import RealizationStream, Word, check_letters, probability_vector

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CarpetIFS:
    m: int
    n: int
    digits: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not (self.n > self.m >= 2):
            raise InvalidInputError(f"need n > m >= 2, got m={self.m}, n={self.n}")
        if not self.digits:
            raise InvalidInputError("digit set must be non-empty")
        for a, b in self.digits:
            if not (0 <= a < self.m and 0 <= b < self.n):
                raise InvalidInputError(f"digit {(a, b)} outside the {self.m}x{self.n} grid")

    @property
    def columns(self) -> tuple[int, ...]:
        """Sorted distinct column indices in use."""
        return tuple(sorted({a for a, _ in self.digits}))

    @property
    def A(self) -> int:
        return len(self.columns)

    @property
    def B(self) -> int:
        return max(sum(1 for a, _ in self.digits if a == col)
                   for col in self.columns)

    def max_column(self) -> tuple[int, tuple[int, ...]]:
        """(column index, sorted rows) of a column attaining B; lowest index wins ties."""
        for col in self.columns:
            rows = tuple(sorted(b for a, b in self.digits if a == col))
            if len(rows) == self.B:
                return col, rows
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class CarpetRIFS:
    ifss: tuple[CarpetIFS, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.ifss) != len(self.probs):
            raise InvalidInputError("one probability per IFS required")
        probability_vector(self.probs)

    @property
    def alphabet_size(self) -> int:
        return len(self.ifss)

    @property
    def grids(self) -> tuple[tuple[int, int], ...]:
        return tuple((c.m, c.n) for c in self.ifss)

    @property
    def m_max(self) -> int:
        return max(c.m for c in self.ifss)

    @property
    def n_max(self) -> int:
        return max(c.n for c in self.ifss)


@dataclass(frozen=True)
class ApproxSquare:
    """Rectangle with base from depth k2 and height from depth k1 (exact)."""

    base: tuple[Fraction, Fraction]
    height: tuple[Fraction, Fraction]
    k1: int
    k2: int


@dataclass
class CarpetGrid:
    """Occupancy of the depth-k construction on the exact mixed-radix grid.

    width = prod m_{w_i}, height = prod n_{w_i}; occupied is an (N, 2) int64
    array of (column, row) cells, or exact Python-int pairs via `cells`.
    """

    depth: int
    width: int
    height: int
    occupied: np.ndarray

    def cells(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in self.occupied}

    def centers(self) -> np.ndarray:
        c = self.occupied.astype(np.float64)
        c[:, 0] = (c[:, 0] + 0.5) / self.width
        c[:, 1] = (c[:, 1] + 0.5) / self.height
        return c


def mackay_dim(c: CarpetIFS) -> float:
    """log A / log m + log B / log n for a deterministic carpet."""
    return math.log(c.A) / math.log(c.m) + math.log(c.B) / math.log(c.n)


def as_assouad_carpet(rifs: CarpetRIFS):
    """Almost-sure Assouad value max_i log A_i/log m_i + max_j log B_j/log n_j.

    Returns (value, (i, j)) with the attaining letters (1-based; ties broken
    by lowest index), which feed the good-word and tangent constructions.
    """
    col_terms = [math.log(c.A) / math.log(c.m) for c in rifs.ifss]
    row_terms = [math.log(c.B) / math.log(c.n) for c in rifs.ifss]
    i = max(range(len(col_terms)), key=lambda k: (col_terms[k], -k)) + 1
    j = max(range(len(row_terms)), key=lambda k: (row_terms[k], -k)) + 1
    return max(col_terms) + max(row_terms), (i, j)


def sure_upper_carpet(rifs: CarpetRIFS) -> float:
    """Same value as as_assouad_carpet, valid as a bound for every realisation."""
    value, _ = as_assouad_carpet(rifs)
    return value


def gui_li_average(rifs: CarpetRIFS, per_ifs_dims: Sequence[float]) -> float:
    """Probability-weighted average of caller-supplied per-IFS dimensions.

    Only meaningful on a uniform grid (all m_i equal, all n_i equal); the
    per-IFS Hausdorff/packing/box values are standard deterministic formulas
    supplied by the caller, not computed here.
    """
    if len({c.m for c in rifs.ifss}) != 1 or len({c.n for c in rifs.ifss}) != 1:
        raise NotApplicableError("weighted average requires a uniform grid")
    if len(per_ifs_dims) != rifs.alphabet_size:
        raise InvalidInputError("one dimension value per IFS required")
    return float(sum(float(p) * float(d)
                     for p, d in zip(rifs.probs, per_ifs_dims)))


def k_scales(word: Sequence[int], grids: Sequence[tuple[int, int]],
             R: Fraction) -> tuple[int, int]:
    """The unique (k1, k2) with prod_{i<=k1} n^{-1} <= R < prod_{i<=k1-1} n^{-1}
    and the same sandwich for k2 with the m's.

    Both sandwiches are re-verified in exact rational arithmetic; raises
    InsufficientPrefixError when the word prefix cannot resolve R.
    """
    R = Fraction(R)
    if not 0 < R < 1:
        raise InvalidInputError("R must lie in (0,1)")
    k1 = _least_k(word, [n for _, n in grids], R)
    k2 = _least_k(word, [m for m, _ in grids], R)
    assert k2 >= k1  # since m_i < n_i
    return k1, k2


def _least_k(word: Sequence[int], bases: Sequence[int], R: Fraction) -> int:
    prod = 1  # denominator of the running product of 1/base
    k = 0
    while Fraction(1, prod) > R:
        if k >= len(word):
            raise InsufficientPrefixError(
                k + 1, f"prefix of length {len(word)} cannot resolve R={R}")
        prod *= bases[word[k] - 1]
        k += 1
    # sandwich re-check: prod_{i<=k} <= R < prod_{i<=k-1}
    assert Fraction(1, prod) <= R
    if k > 0:
        assert R < Fraction(bases[word[k - 1] - 1], prod)
    return k


def approximate_squares(word: Sequence[int], rifs: CarpetRIFS, R: Fraction,
                        digit_path: Sequence[tuple[int, int]]) -> ApproxSquare:
    """Random approximate R-square along a digit path.

    Base = x-interval of the depth-k2 composition, height = y-interval of
    the depth-k1 composition; the common digit path must be valid per letter
    and have length >= k2.
    """
    word = check_letters(word, rifs.alphabet_size)
    k1, k2 = k_scales(word, rifs.grids, R)
    if len(digit_path) < k2:
        raise InvalidInputError(f"digit path must have length >= k2 = {k2}")
    lo_x, wid = Fraction(0), Fraction(1)
    lo_y, hei = Fraction(0), Fraction(1)
    for t in range(k2):
        c = rifs.ifss[word[t] - 1]
        a, b = digit_path[t]
        if (a, b) not in c.digits:
            raise InvalidInputError(
                f"digit {(a, b)} at position {t + 1} invalid for letter {word[t]}")
        lo_x += wid * Fraction(a, c.m)
        wid /= c.m
        if t < k1:
            lo_y += hei * Fraction(b, c.n)
            hei /= c.n
    square = ApproxSquare((lo_x, lo_x + wid), (lo_y, lo_y + hei), k1, k2)
    # side-length memberships: base in (R/m_max, R], height in (R/n_max, R]
    assert R / rifs.m_max < wid <= R
    assert R / rifs.n_max < hei <= R
    return square


def carpet_grid(word: Sequence[int], rifs: CarpetRIFS, depth: int,
                window: Optional[tuple[Fraction, Fraction, Fraction, Fraction]] = None
                ) -> CarpetGrid:
    """Occupancy of the depth-k construction.

    With `window` = (x_lo, x_hi, y_lo, y_hi), only digit paths whose boxes
    intersect the window are expanded (exact pruning), which makes deep
    zoom-ins affordable.
    """
    word = check_letters(word, rifs.alphabet_size)
    if depth < 0 or depth > len(word):
        raise InvalidInputError("need 0 <= depth <= len(word)")
    if window is None:
        return _carpet_grid_full(word, rifs, depth)
    return _carpet_grid_windowed(word, rifs, depth, window)


def _carpet_grid_full(word: Word, rifs: CarpetRIFS, depth: int) -> CarpetGrid:
    occ = np.zeros((1, 2), dtype=np.int64)
    width = height = 1
    for k in range(depth):
        c = rifs.ifss[word[k] - 1]
        digits = np.array(sorted(c.digits), dtype=np.int64)
        base = occ * np.array([c.m, c.n], dtype=np.int64)
        occ = (base[:, None, :] + digits[None, :, :]).reshape(-1, 2)
        width *= c.m
        height *= c.n
        if math.log2(width) + math.log2(height) > 62:
            raise ScaleError("grid coordinates would overflow int64")
    return CarpetGrid(depth, width, height, occ)


def _carpet_grid_windowed(word: Word, rifs: CarpetRIFS, depth: int,
                          window) -> CarpetGrid:
    x_lo, x_hi, y_lo, y_hi = (Fraction(v) for v in window)
    cells: list[tuple[int, int]] = [(0, 0)]
    width = height = 1
    for k in range(depth):
        c = rifs.ifss[word[k] - 1]
        digits = sorted(c.digits)
        width *= c.m
        height *= c.n
        nxt = []
        for x, y in cells:
            for a, b in digits:
                cx, cy = x * c.m + a, y * c.n + b
                # box (cx/width, (cx+1)/width) x (cy/height, ...) meets window?
                if (cx < x_hi * width and x_lo * width < cx + 1
                        and cy < y_hi * height and y_lo * height < cy + 1):
                    nxt.append((cx, cy))
        cells = nxt
    occ = np.array(cells, dtype=np.int64).reshape(len(cells), 2)
    return CarpetGrid(depth, width, height, occ)


@dataclass(frozen=True)
class CoveringReport:
    exponent: float
    n_samples: int
    max_ratio: float
    violations: tuple


def make_covering_samples(grid: CarpetGrid, count: int, seed: int,
                          rho: float = 0.25) -> list[tuple[int, float, float]]:
    """Deterministic (center index, R, r) triples for the covering check.

    R is log-uniform in [rho/4, rho]; r log-uniform in [R/64, R/2], floored
    at the cell height so every sample is resolvable.
    """
    if len(grid.occupied) == 0:
        raise InvalidInputError("grid is empty")
    state = seed & _MASK
    out = []
    h_min = 1.0 / grid.height
    for _ in range(count):
        zs = []
        for _ in range(3):
            state = (state + _GOLDEN) & _MASK
            zs.append(mix64(state) / 2.0**64)
        idx = int(zs[0] * len(grid.occupied)) % len(grid.occupied)
        R = rho * 4.0 ** (-zs[1])
        r = max(h_min, R * 2.0 ** (-1 - 5 * zs[2]))
        if r >= R:
            r = R
        out.append((idx, R, r))
    return out


def covering_upper_check(grid: CarpetGrid, rifs: CarpetRIFS,
                         samples: Sequence[tuple[int, float, float]]) -> CoveringReport:
    """Check the sure covering bound N_r(B(x,R)) <= m_max n_max (R/r)^s.

    s is the almost-sure Assouad value; N_r counts axis-aligned r-squares
    containing at least one occupied-cell center within Euclidean distance R
    of the chosen center.
    """
    s, _ = as_assouad_carpet(rifs)
    const = rifs.m_max * rifs.n_max
    centers = grid.centers()
    h_min = 1.0 / grid.height
    max_ratio = 0.0
    violations = []
    for idx, R, r in samples:
        if r < h_min:
            raise ScaleError(f"r={r} below the cell height {h_min}")
        x = centers[idx]
        sel = centers[np.sum((centers - x) ** 2, axis=1) <= R * R]
        squares = np.unique(np.floor(sel / r).astype(np.int64), axis=0)
        count = len(squares)
        bound = const * (R / r) ** s
        ratio = count / bound
        max_ratio = max(max_ratio, ratio)
        if count > bound:
            violations.append((idx, R, r, count, bound))
    return CoveringReport(s, len(samples), max_ratio, tuple(violations))


def tangent_product_target(rifs: CarpetRIFS, i: int, j: int, level: int) -> CarpetGrid:
    """Level-`level` grid of (column projection of letter i) x (maximal column
    set of letter j), the tangent target of the lower-bound construction."""
    value, (bi, bj) = as_assouad_carpet(rifs)
    if (i, j) != (bi, bj):
        raise InvalidInputError(
            f"letters {(i, j)} do not attain the maxima; expected {(bi, bj)}")
    if level < 0:
        raise InvalidInputError("level must be >= 0")
    ci, cj = rifs.ifss[i - 1], rifs.ifss[j - 1]
    cols = ci.columns
    _, rows = cj.max_column()
    xs = [0]
    for _ in range(level):
        xs = [x * ci.m + a for x in xs for a in cols]
    ys = [0]
    for _ in range(level):
        ys = [y * cj.n + b for y in ys for b in rows]
    occ = np.array([(x, y) for x in xs for y in ys], dtype=np.int64)
    occ = occ.reshape(len(xs) * len(ys), 2)
    return CarpetGrid(level, ci.m**level, cj.n**level, occ)


def good_word_carpet(rifs: CarpetRIFS, base: RealizationStream, i: int, j: int,
                     schedule: Sequence[tuple[Fraction, int]],
                     length: Optional[int] = None) -> Word:
    """Constructive left-to-right splicer for the two-run good set.

    For each scheduled (R_l, n_l): computes k1, k2 from the word built so
    far (they depend only on the prefix), writes j on positions
    k1+1..k1+n_l and i on k2+1..k2+n_l, then fills everything else from the
    base stream.  Colliding forced letters are an error, never silently
    resolved.
    """
    check_letters((i, j), rifs.alphabet_size)
    rs = [Fraction(R) for R, _ in schedule]
    ns = [int(n) for _, n in schedule]
    if any(not 0 < R < 1 for R in rs):
        raise InvalidScheduleError("every R_l must lie in (0,1)")
    if any(r2 >= r1 for r1, r2 in zip(rs, rs[1:])):
        raise InvalidScheduleError("R_l must be strictly decreasing")
    if any(n2 <= n1 for n1, n2 in zip(ns, ns[1:])):
        raise InvalidScheduleError("n_l must be strictly increasing")
    if any(n < 1 for n in ns):
        raise InvalidScheduleError("n_l must be >= 1")

    forced: dict[int, int] = {}

    def letter_at(k: int) -> int:
        return forced.get(k, base.letter(k))

    def force(lo: int, n: int, letter: int, stage: int) -> None:
        for k in range(lo + 1, lo + n + 1):
            if forced.get(k, letter) != letter:
                raise InfeasibleScheduleError(
                    stage, f"position {k} already forced to {forced[k]}")
            forced[k] = letter

    needed = 0
    # virtual infinite word for the k-scale walks
    class _View:
        def __len__(self):
            return 1 << 62

        def __getitem__(self, k):
            return letter_at(k + 1)

    view = _View()
    for stage, (R, n) in enumerate(zip(rs, ns), start=1):
        k1 = _least_k(view, [g[1] for g in rifs.grids], R)
        force(k1, n, j, stage)
        k2 = _least_k(view, [g[0] for g in rifs.grids], R)
        if n > k2 - k1:
            raise InfeasibleScheduleError(
                stage, f"n_l={n} exceeds k2-k1={k2 - k1} at R={R}")
        force(k2, n, i, stage)
        needed = max(needed, k2 + n)
    total = max(length or 0, needed)
    return tuple(letter_at(k) for k in range(1, total + 1))


def schedule_quantities(rifs: CarpetRIFS, i: int, j: int, n: int) -> dict:
    """Read-only proof-schedule quantities: the block count l(n), eccentricity
    ratio theta, and the K recursion up to n (all real-valued)."""
    check_letters((i, j), rifs.alphabet_size)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    p_i = float(rifs.probs[i - 1])
    p_j = float(rifs.probs[j - 1])
    theta = (max(math.log(c.n) for c in rifs.ifss)
             / min(math.log(c.m) for c in rifs.ifss))

    def l_of(nn: int) -> int:
        return math.ceil(-math.log(2) / math.log1p(-((p_j * p_i) ** nn)))

    K = {1: 1.0}
    K_n = {}
    for nn in range(1, n + 1):
        ln = l_of(nn)
        row = [K[nn]]
        for _ in range(ln):
            row.append(theta * row[-1] + nn)
        K_n[nn] = tuple(row)
        K[nn + 1] = row[-1]
    return {"theta": theta, "l": {nn: l_of(nn) for nn in range(1, n + 1)},
            "K": K, "K_n": K_n}
