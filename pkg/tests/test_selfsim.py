import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from assouadlab.errors import InvalidInputError
from assouadlab.selfsim import (UOSC_REFUTED, UOSC_VERIFIED, SimilarityIFS,
                                SimilarityMap, SimilarityRIFS,
                                almost_sure_hausdorff, attractor_boxes,
                                blowup_boxes, check_uosc, compose_period,
                                multiplicative_dependence, periodic_sup_probe,
                                similarity_dimension, sure_assouad_upper)

rationals = st.fractions(min_value=F(1, 64), max_value=F(63, 64))


def test_map_validation():
    with pytest.raises(InvalidInputError):
        SimilarityMap(F(3, 2), (F(0),))
    with pytest.raises(InvalidInputError):
        SimilarityMap(F(1, 2), (F(3, 4),))
    m = SimilarityMap(F(1, 2), (F(1, 4), F(1, 2)))
    assert m.dim == 2


def test_compose_is_function_composition():
    a = SimilarityMap(F(1, 2), (F(1, 2),))
    b = SimilarityMap(F(1, 3), (F(1, 3),))
    ab = a.compose(b)
    # a(b(x)) = (x/3 + 1/3)/2 + 1/2
    assert ab.ratio == F(1, 6)
    assert ab.translation == (F(2, 3),)


def test_similarity_dimension_exact_cases():
    # equal ratios 1/m with k maps: s = log k / log m
    assert similarity_dimension([F(1, 3)] * 2) == \
        pytest.approx(math.log(2) / math.log(3), abs=1e-10)
    assert similarity_dimension([F(1, 2), F(1, 2)]) == \
        pytest.approx(1.0, abs=1e-10)
    # the Moran equation residual vanishes at the returned root
    s = similarity_dimension([F(1, 2), F(1, 4), F(1, 16)])
    assert abs(0.5**s + 0.25**s + 0.0625**s - 1) < 1e-10


@given(st.lists(rationals, min_size=1, max_size=4))
def test_similarity_dimension_residual_property(ratios):
    s = similarity_dimension(ratios)
    assert s >= 0
    assert abs(sum(float(c)**s for c in ratios) - 1) < 1e-8 or s == 0


def test_almost_sure_hausdorff_between_extremes(selfsim_pair):
    h = almost_sure_hausdorff(selfsim_pair)
    s1 = similarity_dimension(selfsim_pair.ifss[0].ratios)
    s2 = similarity_dimension(selfsim_pair.ifss[1].ratios)
    assert min(s1, s2) < h < max(s1, s2)
    assert abs(0.5 * math.log(sum(float(c)**h for c in selfsim_pair.ifss[0].ratios))
               + 0.5 * math.log(sum(float(c)**h for c in selfsim_pair.ifss[1].ratios))) < 1e-9


def test_uosc_verdicts(selfsim_pair):
    assert check_uosc(selfsim_pair) == UOSC_REFUTED
    disjoint = SimilarityRIFS(
        (SimilarityIFS((SimilarityMap(F(1, 3), (F(0),)),
                        SimilarityMap(F(1, 3), (F(2, 3),)))),),
        (F(1),))
    assert check_uosc(disjoint) == UOSC_VERIFIED
    value, verdict = sure_assouad_upper(disjoint)
    assert verdict == UOSC_VERIFIED
    assert value == pytest.approx(math.log(2) / math.log(3), abs=1e-10)


def test_multiplicative_dependence_cases():
    assert multiplicative_dependence(F(1, 2), F(1, 4))
    assert multiplicative_dependence(F(4, 9), F(2, 3))
    assert not multiplicative_dependence(F(1, 2), F(1, 3))
    assert not multiplicative_dependence(F(1, 18), F(1, 12))
    assert not multiplicative_dependence(F(1, 6), F(1, 12))


@given(rationals, st.integers(1, 4), st.integers(1, 4))
def test_powers_always_dependent(c, a, b):
    assert multiplicative_dependence(c**a, c**b)


def test_compose_period_sizes(selfsim_pair):
    composed = compose_period(selfsim_pair, (1, 2))
    assert len(composed.maps) == 9
    assert F(1, 18) in composed.ratios and F(1, 12) in composed.ratios


def test_periodic_sup_probe_finds_witness(selfsim_pair):
    probe = periodic_sup_probe(selfsim_pair, max_period=2)
    assert probe.independent_witness is not None
    a, b = probe.independent_witness
    assert not multiplicative_dependence(a, b)
    assert probe.value >= similarity_dimension(selfsim_pair.ifss[1].ratios)


def test_attractor_boxes_exact_counts(selfsim_pair):
    boxes = attractor_boxes(selfsim_pair, (1, 2, 1), 2)
    assert boxes.depth == 2
    assert len(boxes.boxes) == 9
    for lo, side in boxes.boxes:
        assert 0 <= lo[0] and lo[0] + side <= 1


def test_blowup_boxes_identity(selfsim_pair):
    boxes = attractor_boxes(selfsim_pair, (1,), 1)
    blown = blowup_boxes(boxes, (F(0),), F(1))
    assert blown == frozenset(boxes.boxes)
