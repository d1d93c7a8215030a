import numpy as np
import pytest
from hypothesis import given, strategies as st

from savbc import geometry
from savbc.regions import RateRegion, region_distance

points = st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=30)


def test_hull_drops_interior_and_collinear():
    h = geometry.convex_hull([(0, 0), (1, 0), (0.5, 0), (0, 1), (0.2, 0.2), (1, 0)])
    assert {tuple(v) for v in h} == {(0, 0), (1, 0), (0, 1)}
    assert geometry.area(h) == pytest.approx(0.5)


def test_degenerate_hulls():
    assert len(geometry.convex_hull([(0.3, 0.3)] * 3)) == 1
    seg = geometry.convex_hull([(0, 0), (0, 0.5), (0, 1)])
    assert len(seg) == 2
    assert geometry.contains(seg, (0, 0.7), 1e-12)
    assert not geometry.contains(seg, (0.1, 0.7), 1e-3)


def test_translation_distance():
    tri = np.array([(0, 0), (1, 0), (0, 1)], float)
    assert geometry.hausdorff(tri, tri + [0.25, 0]) == pytest.approx(0.25)


def test_extra_exterior_vertex():
    rect = RateRegion.hull([(0, 0), (1, 0), (1, 1), (0, 1)])
    bigger = RateRegion.hull(list(rect.vertices) + [(1.3, 0.5)])
    assert region_distance(rect, bigger) == pytest.approx(0.3)
    assert region_distance(rect, rect) == 0.0


@given(points)
def test_hull_contains_its_points(pts):
    h = geometry.convex_hull(pts)
    for p in pts:
        assert geometry.contains(h, p, 1e-9)
    assert geometry.area(h) >= -1e-15


@given(points, points, points)
def test_hausdorff_is_a_metric(a, b, c):
    A, B, C = (geometry.convex_hull(x) for x in (a, b, c))
    ab = geometry.hausdorff(A, B)
    assert ab == pytest.approx(geometry.hausdorff(B, A), abs=1e-12)
    assert ab <= geometry.hausdorff(A, C) + geometry.hausdorff(C, B) + 1e-9


def test_nearly_collinear_extremes_survive():
    # a 3e-16 offset once made the chain drop the far end of the segment
    h = geometry.convex_hull([(0, 0), (3.2e-16, 0.326), (0, 0.763)])
    assert max(v[1] for v in h) == 0.763
    assert geometry.hausdorff(h, np.array([(0, 0), (0, 0.763)])) < 1e-12
