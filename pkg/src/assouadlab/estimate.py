"""Scale analysis on discretised sets: local covering counts, two-scale
Assouad exponent fits, Hausdorff and directed (pseudo-Hausdorff) distances,
and exact blow-up maps for weak-tangent experiments.

A GridSet is an occupancy pattern on a product grid over the unit frame
[0,1]^d; the per-axis resolutions may differ (carpet grids are anisotropic).
All counting and distance work happens on cell centers; blow-ups are exact
integer renormalisations of grid-aligned rational windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from ._core import mix64
from .errors import InvalidInputError, ScaleError

_GOLDEN = 0x9E3779B97F4A7C15

DEFAULT_RHO = 0.25


@dataclass(frozen=True)
class GridSet:
    """Occupied cells of a product grid over [0,1]^d.

    resolution[a] is the number of cells along axis a; occupied is an (N, d)
    int64 array with 0 <= occupied[:, a] < resolution[a].
    """

    resolution: tuple[int, ...]
    occupied: np.ndarray

    def __post_init__(self):
        res = tuple(int(r) for r in self.resolution)
        if not res or any(r < 1 for r in res):
            raise InvalidInputError("resolutions must be positive integers")
        occ = np.asarray(self.occupied, dtype=np.int64)
        if occ.ndim != 2 or occ.shape[1] != len(res):
            raise InvalidInputError("occupied must be an (N, d) array")
        if len(occ) and (occ.min() < 0 or (occ >= np.array(res)).any()):
            raise InvalidInputError("cell coordinates outside the resolution")
        object.__setattr__(self, "resolution", res)
        object.__setattr__(self, "occupied", occ)

    @property
    def dim(self) -> int:
        return len(self.resolution)

    @property
    def size(self) -> int:
        return len(self.occupied)

    def centers(self) -> np.ndarray:
        c = self.occupied.astype(np.float64) + 0.5
        return c / np.array(self.resolution, dtype=np.float64)

    def cell_diagonal(self) -> float:
        return math.sqrt(sum((1.0 / r) ** 2 for r in self.resolution))

    def min_cell_side(self) -> float:
        return 1.0 / max(self.resolution)

    def max_cell_side(self) -> float:
        return 1.0 / min(self.resolution)


def from_carpet_grid(grid) -> GridSet:
    """GridSet view of a carpet occupancy (axis 0 horizontal, axis 1 vertical)."""
    return GridSet((grid.width, grid.height), grid.occupied)


def from_percolation(levels, level: int) -> GridSet:
    """GridSet view of one level of a percolation realisation."""
    if not 0 <= level <= levels.depth:
        raise InvalidInputError(f"level {level} outside 0..{levels.depth}")
    return GridSet((levels.n**level,) * levels.d, levels.levels[level])


def full_grid(resolution: Sequence[int]) -> GridSet:
    """Every cell occupied; the maximal GridSet at this resolution."""
    res = tuple(int(r) for r in resolution)
    grids = np.meshgrid(*[np.arange(r, dtype=np.int64) for r in res],
                        indexing="ij")
    occ = np.stack([g.ravel() for g in grids], axis=1)
    return GridSet(res, occ)


@dataclass(frozen=True)
class ScaleLadder:
    """(R, r) pairs with 0 < r < R <= rho; rho caps the outer scale."""

    pairs: tuple[tuple[float, float], ...]
    rho: float = DEFAULT_RHO

    def __post_init__(self):
        pairs = tuple((float(R), float(r)) for R, r in self.pairs)
        if not pairs:
            raise InvalidInputError("ladder is empty")
        for R, r in pairs:
            if not 0 < r < R <= self.rho:
                raise InvalidInputError(
                    f"ladder pair ({R}, {r}) violates 0 < r < R <= {self.rho}"
                )
        object.__setattr__(self, "pairs", pairs)

    def check_resolvable(self, grid: GridSet) -> None:
        floor = grid.max_cell_side()
        for _, r in self.pairs:
            if r < floor:
                raise ScaleError(
                    f"inner scale {r} below the cell side {floor}"
                )

    def span_decades(self) -> float:
        ratios = [R / r for R, r in self.pairs]
        return math.log10(max(ratios) / min(ratios))


def geometric_ladder(rho: float, ratios: Sequence[float]) -> ScaleLadder:
    """Ladder with fixed outer scale rho and inner scales rho/ratio."""
    return ScaleLadder(tuple((rho, rho / q) for q in ratios), rho)


@dataclass(frozen=True)
class AssouadEstimate:
    counts: tuple[tuple[float, float, int], ...]  # (R, r, sup count)
    exponent: float
    residual: float
    ladder: ScaleLadder


def local_count(grid: GridSet, x: Sequence[int], R: float, r: float) -> int:
    """Number of side-r grid squares covering the occupied cell centers
    within Euclidean distance R of the center of cell x."""
    x = tuple(int(v) for v in x)
    cells = grid.occupied
    if not ((cells == np.array(x, dtype=np.int64)).all(axis=1)).any():
        raise InvalidInputError(f"center cell {x} is not occupied")
    if r < grid.max_cell_side():
        raise ScaleError(f"inner scale {r} below the cell side "
                         f"{grid.max_cell_side()}")
    centers = grid.centers()
    x_center = (np.array(x, dtype=np.float64) + 0.5) / np.array(
        grid.resolution, dtype=np.float64)
    return _local_count_at(centers, x_center, float(R), float(r))


def _local_count_at(centers: np.ndarray, x_center: np.ndarray,
                    R: float, r: float) -> int:
    d2 = ((centers - x_center) ** 2).sum(axis=1)
    inside = centers[d2 <= R * R]
    if len(inside) == 0:
        return 0
    boxes = np.floor(inside / r).astype(np.int64)
    return len(np.unique(boxes, axis=0))


def _sample_indices(n: int, k: int, seed: int) -> np.ndarray:
    state = seed & ((1 << 64) - 1)
    out = []
    for _ in range(k):
        state = (state + _GOLDEN) & ((1 << 64) - 1)
        out.append(mix64(state) % n)
    return np.unique(np.array(out, dtype=np.int64))


def assouad_estimate(grid: GridSet, ladder: ScaleLadder,
                     centers: Union[str, tuple[int, int]] = "all"
                     ) -> AssouadEstimate:
    """Fit sup_x N_r(B(x,R)) ~ C (R/r)^alpha over the ladder.

    centers is "all" (sup over every occupied cell) or (k, seed) for a
    deterministic sample of k cells.  The exponent is the least-squares slope
    of log M against log(R/r); the multiplicative constant is absorbed by the
    intercept and the residual is the rms log-misfit.
    """
    if grid.size == 0:
        raise InvalidInputError("grid is empty")
    ladder.check_resolvable(grid)
    pts = grid.centers()
    if centers == "all":
        chosen = pts
    else:
        k, seed = centers
        if k < 1:
            raise InvalidInputError("sample size must be >= 1")
        chosen = pts[_sample_indices(grid.size, k, seed)]
    rows = []
    for R, r in ladder.pairs:
        M = 0
        for x_center in chosen:
            M = max(M, _local_count_at(pts, x_center, R, r))
        rows.append((R, r, M))
    xs = np.log([R / r for R, r, _ in rows])
    ys = np.log([max(m, 1) for _, _, m in rows])
    A = np.stack([xs, np.ones_like(xs)], axis=1)
    (slope, _), res, _, _ = np.linalg.lstsq(A, ys, rcond=None)
    residual = math.sqrt(res[0] / len(rows)) if len(res) else 0.0
    return AssouadEstimate(tuple(rows), float(slope), residual, ladder)


def hausdorff_distance(a: GridSet, b: GridSet) -> float:
    """max of the two directed center-set distances."""
    return max(pseudo_hausdorff(a, b), pseudo_hausdorff(b, a))


def pseudo_hausdorff(a: GridSet, b: GridSet) -> float:
    """sup_{x in a} inf_{y in b} |x - y| on cell centers (directed)."""
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("distance requires non-empty sets")
    if a.dim != b.dim:
        raise InvalidInputError("sets live in different ambient dimensions")
    dists, _ = cKDTree(b.centers()).query(a.centers(), k=1)
    return float(np.max(dists))


def blowup(grid: GridSet, window_lo: Sequence, window_sides: Sequence) -> GridSet:
    """Renormalise the cells inside a grid-aligned rational window to the
    unit frame.

    The window corners must lie on the grid (lo * resolution and
    side * resolution integral per axis), so the renormalisation is exact;
    per-axis scale factors may differ (diagonal affine map).
    """
    lo = tuple(Fraction(x) for x in window_lo)
    sides = tuple(Fraction(s) for s in window_sides)
    if len(lo) != grid.dim or len(sides) != grid.dim:
        raise InvalidInputError("window dimension mismatch")
    if any(s <= 0 for s in sides):
        raise InvalidInputError("window sides must be positive")
    if any(x < 0 or x + s > 1 for x, s in zip(lo, sides)):
        raise InvalidInputError("window outside the unit frame")
    lo_cells, lengths = [], []
    for a, (x, s) in enumerate(zip(lo, sides)):
        cl = x * grid.resolution[a]
        ln = s * grid.resolution[a]
        if cl.denominator != 1 or ln.denominator != 1:
            raise InvalidInputError(
                f"window is not grid-aligned on axis {a}"
            )
        lo_cells.append(int(cl))
        lengths.append(int(ln))
    lo_arr = np.array(lo_cells, dtype=np.int64)
    len_arr = np.array(lengths, dtype=np.int64)
    occ = grid.occupied
    mask = ((occ >= lo_arr) & (occ < lo_arr + len_arr)).all(axis=1)
    if not mask.any():
        raise ScaleError("window does not intersect the occupied set")
    return GridSet(tuple(lengths), occ[mask] - lo_arr)


@dataclass(frozen=True)
class TangentConvergence:
    distances: tuple[float, ...]
    bounds: Optional[tuple[float, ...]]
    collars: tuple[float, ...]
    dominated: Optional[bool]


def tangent_convergence(stages: Sequence[GridSet],
                        targets: Union[GridSet, Sequence[GridSet]],
                        bounds: Optional[Sequence[float]] = None
                        ) -> TangentConvergence:
    """Hausdorff distances of blown-up stages to their targets, with an
    optional dominance check against caller-supplied theoretical bounds.

    Distances are between cell centers, so each bound gets a collar of half
    a cell diagonal from each side before the dominance comparison.
    """
    if len(stages) < 2:
        raise InvalidInputError("need at least 2 stages")
    if isinstance(targets, GridSet):
        targets = [targets] * len(stages)
    if len(targets) != len(stages):
        raise InvalidInputError("one target per stage required")
    dists = tuple(hausdorff_distance(s, t) for s, t in zip(stages, targets))
    collars = tuple(0.5 * s.cell_diagonal() + 0.5 * t.cell_diagonal()
                    for s, t in zip(stages, targets))
    if bounds is None:
        return TangentConvergence(dists, None, collars, None)
    if len(bounds) != len(stages):
        raise InvalidInputError("one bound per stage required")
    bounds = tuple(float(b) for b in bounds)
    ok = all(d <= b + c for d, b, c in zip(dists, bounds, collars))
    return TangentConvergence(dists, bounds, collars, ok)
