import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assouadlab import estimate as est
from assouadlab.errors import InvalidInputError, ScaleError

cell_lists = st.lists(
    st.tuples(st.integers(0, 15), st.integers(0, 15)),
    min_size=1, max_size=30, unique=True)


def _gs(cells, res=(16, 16)) -> est.GridSet:
    return est.GridSet(res, np.array(sorted(cells), dtype=np.int64))


def test_gridset_validation():
    with pytest.raises(InvalidInputError):
        est.GridSet((4, 4), np.array([[4, 0]], dtype=np.int64))
    with pytest.raises(InvalidInputError):
        est.GridSet((0,), np.zeros((1, 1), dtype=np.int64))
    g = _gs([(0, 0), (15, 15)])
    assert g.dim == 2 and g.size == 2
    assert g.cell_diagonal() == pytest.approx(math.sqrt(2) / 16)


def test_local_count_single_cell():
    g = _gs([(3, 3)])
    assert est.local_count(g, (3, 3), 0.2, 0.1) == 1
    with pytest.raises(InvalidInputError):
        est.local_count(g, (0, 0), 0.2, 0.1)
    with pytest.raises(ScaleError):
        est.local_count(g, (3, 3), 0.2, 0.001)


def test_local_count_full_grid_square_law():
    g = est.full_grid((64, 64))
    count = est.local_count(g, (32, 32), 0.25, 1 / 32)
    # within a factor-4 collar of (R/r)^2 = 64
    assert 16 <= count <= 256


def test_local_count_line_scales_linearly():
    g = est.GridSet((64, 64), np.array([[i, 0] for i in range(64)],
                                       dtype=np.int64))
    c1 = est.local_count(g, (32, 0), 0.25, 1 / 16)
    c2 = est.local_count(g, (32, 0), 0.25, 1 / 32)
    assert c2 == pytest.approx(2 * c1, abs=2)


@given(cell_lists, st.integers(1, 3), st.integers(0, 2))
@settings(max_examples=80, deadline=None)
def test_local_count_monotone_in_R_and_nested_r(cells, i, j):
    g = _gs(cells)
    x = tuple(int(v) for v in g.occupied[0])
    rs = [1 / 4, 1 / 8, 1 / 16]  # nested scales: each divides the previous
    Rs = [0.1, 0.2, 0.4]
    c_small = est.local_count(g, x, Rs[j], rs[i - 1])
    c_large = est.local_count(g, x, Rs[j], rs[0])
    assert c_small >= c_large  # finer r never decreases the count
    if j < 2:
        assert est.local_count(g, x, Rs[j + 1], rs[i - 1]) >= c_small


@given(cell_lists)
@settings(max_examples=50, deadline=None)
def test_counts_monotone_under_set_inclusion(cells):
    g = _gs(cells)
    sub = _gs(cells[:max(1, len(cells) // 2)])
    x = tuple(int(v) for v in sub.occupied[0])
    for R, r in [(0.2, 1 / 8), (0.1, 1 / 16)]:
        assert est.local_count(g, x, R, r) >= est.local_count(sub, x, R, r)


def test_assouad_estimate_full_grid_is_two():
    g = est.full_grid((256, 256))
    ladder = est.geometric_ladder(0.25, [8, 16, 32, 64])
    res = est.assouad_estimate(g, ladder, (8, 1))
    assert res.exponent == pytest.approx(2.0, abs=0.2)


def test_assouad_estimate_requires_resolvable_ladder():
    g = est.full_grid((8, 8))
    ladder = est.geometric_ladder(0.25, [2, 4, 8, 16, 32])
    with pytest.raises(ScaleError):
        est.assouad_estimate(g, ladder)


def test_hausdorff_distance_cases():
    a = _gs([(0, 0)], res=(1, 1))
    assert est.hausdorff_distance(a, a) == 0.0
    b = est.GridSet((2, 1), np.array([[0, 0]], dtype=np.int64))
    c = est.GridSet((2, 1), np.array([[1, 0]], dtype=np.int64))
    assert est.hausdorff_distance(b, c) == pytest.approx(0.5)


@given(cell_lists, cell_lists, cell_lists)
@settings(max_examples=60, deadline=None)
def test_hausdorff_metric_axioms(xs, ys, zs):
    a, b, c = _gs(xs), _gs(ys), _gs(zs)
    dab = est.hausdorff_distance(a, b)
    assert dab == est.hausdorff_distance(b, a)
    same_cells = set(map(tuple, a.occupied.tolist())) \
        == set(map(tuple, b.occupied.tolist()))
    assert (dab == 0) == same_cells
    assert dab <= est.hausdorff_distance(a, c) + est.hausdorff_distance(c, b) + 1e-12


@given(cell_lists, cell_lists)
@settings(max_examples=60, deadline=None)
def test_pseudo_hausdorff_bounded_by_hausdorff(xs, ys):
    a, b = _gs(xs), _gs(ys)
    assert est.pseudo_hausdorff(a, b) <= est.hausdorff_distance(a, b) + 1e-15


def test_pseudo_hausdorff_asymmetry():
    a = _gs([(0, 0), (15, 15)])
    b = _gs([(0, 0)])
    assert est.pseudo_hausdorff(b, a) == 0.0
    gap = math.sqrt(2) * 15 / 16
    assert est.pseudo_hausdorff(a, b) == pytest.approx(gap)


def test_pseudo_hausdorff_containment():
    big = est.full_grid((8, 8))
    small = _gs([(0, 0), (3, 5)], res=(8, 8))
    assert est.pseudo_hausdorff(small, big) == 0.0


def test_blowup_identity_and_errors():
    g = _gs([(0, 0), (5, 9)])
    same = est.blowup(g, (F(0), F(0)), (F(1), F(1)))
    assert same.resolution == g.resolution
    assert np.array_equal(same.occupied, g.occupied)
    with pytest.raises(InvalidInputError):
        est.blowup(g, (F(1, 2), F(0)), (F(3, 4), F(1)))
    with pytest.raises(InvalidInputError):
        est.blowup(g, (F(1, 3), F(0)), (F(1, 3), F(1)))  # not grid-aligned
    with pytest.raises(ScaleError):
        est.blowup(g, (F(1, 2), F(1, 2)), (F(1, 4), F(1, 4)))


def test_blowup_quarter_window():
    g = est.full_grid((8, 8))
    sub = est.blowup(g, (F(1, 2), F(0)), (F(1, 4), F(1, 4)))
    assert sub.resolution == (2, 2)
    assert sub.size == 4


def test_tangent_convergence_reports_domination():
    a = est.full_grid((4, 4))
    b = est.full_grid((8, 8))
    target = est.full_grid((16, 16))
    out = est.tangent_convergence([a, b], target, bounds=[0.2, 0.1])
    assert len(out.distances) == 2
    assert out.dominated is not None
