from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from syzkit import amoeba as am
from syzkit import subdivision as sd
from syzkit.lattice import standard_triangle
from syzkit.subdivision import WeightFunction

STD = sd.standard_chart_weight()


def flat(d=5):
    return WeightFunction.from_function(standard_triangle(d), lambda p: 0)


def test_moment_map_symmetric_point():
    x, y = am.moment_map_2d((1, 1), flat(), 0.5)
    pts = standard_triangle()
    assert x == pytest.approx(sum(p[0] for p in pts) / 21, abs=1e-14)
    assert y == pytest.approx(sum(p[1] for p in pts) / 21, abs=1e-14)


def test_moment_map_large_x1_goes_to_vertex():
    x, y = am.moment_map_2d((1e8, 1.0), flat(), 0.5)
    assert x == pytest.approx(5, abs=1e-9) and y == pytest.approx(0, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),
       st.sampled_from([0.1, 0.03, 0.01]))
def test_moment_map_torus_invariance(l1, l2, a, b, t):
    base = am.moment_map_2d((math.exp(l1), math.exp(l2)), STD, t)
    rot = am.moment_map_2d((cmath.rect(math.exp(l1), a), cmath.rect(math.exp(l2), b)), STD, t)
    assert max(abs(base[0] - rot[0]), abs(base[1] - rot[1])) <= 1e-10
    assert 0 <= base[0] and 0 <= base[1] and base[0] + base[1] <= 5 + 1e-12


def test_curve_spec_validation():
    spec = am.CurveSpec.from_weight(STD, 0.1)
    assert spec.degree == 5 and len(spec.points) == 21
    with pytest.raises(am.AmoebaError):
        am.CurveSpec.from_weight(STD, 1.5)


def test_line_amoeba_hugs_the_y():
    w = flat(1)
    spec = am.CurveSpec.from_weight(w, 0.5)
    cloud = am.sample_curve(spec, (120, 60), seed=3)
    segs = am.graph_segments(w)
    assert len(segs) == 3
    gd = am.hausdorff_to_graph(cloud, segs, 0.25)
    assert gd.all_covered
    # the line's image is exactly the triangle-inequality region, so nothing pokes out
    assert am.limit_region_excess(cloud, w) < 1e-9
    assert cloud.residual < 1e-8


def test_empty_grid():
    cloud = am.sample_curve(am.CurveSpec.from_weight(STD, 0.1), (0, 10))
    assert len(cloud) == 0
    with pytest.raises(am.AmoebaError):
        am.hausdorff_to_graph(cloud, am.graph_segments(STD))


def test_distance_controls():
    segs = am.graph_segments(STD)
    g = am.face_graph(sd.regular_subdivision(STD))
    verts = np.array([[float(c) for c in v.coords] for v in g.vertices])
    gd = am.hausdorff_to_graph(am.AmoebaCloud(verts), segs, 0.25)
    assert gd.sup == pytest.approx(0, abs=1e-12) and gd.all_covered
    far = np.vstack([verts, [[5.0, 5.0]]])
    expect = min(_seg_dist((5.0, 5.0), a, b) for a, b in segs)
    gd = am.hausdorff_to_graph(am.AmoebaCloud(far), segs, 0.25)
    assert gd.sup == pytest.approx(expect, abs=1e-12)


def _seg_dist(p, a, b):
    p, a, b = map(np.asarray, (p, a, b))
    s = np.clip(np.dot(p - a, b - a) / np.dot(b - a, b - a), 0, 1)
    return float(np.linalg.norm(p - a - s * (b - a)))


def test_segment_count():
    # 30 interior edges contribute two straight pieces each, 15 legs one each
    assert len(am.graph_segments(STD)) == 75


def test_standard_sampling_small_grid():
    spec = am.CurveSpec.from_weight(STD, 0.03)
    cloud = am.sample_curve(spec, (60, 40), seed=1)
    assert cloud.meta["roots"] == 60 * 40 * 5
    assert cloud.residual <= 1e-8
    again = am.sample_curve(spec, (60, 40), seed=1)
    assert np.array_equal(cloud.points, again.points)
    gd = am.hausdorff_to_graph(cloud, am.graph_segments(STD), 0.25)
    assert gd.all_covered


def test_csv_roundtrip_exact():
    pts = np.array([[1 / 3, 2 / 7], [math.pi, math.e]])
    rows = am.AmoebaCloud(pts).to_csv().splitlines()
    assert rows[0] == "x,y"
    back = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    assert np.array_equal(back, pts)


def test_svg_has_segments():
    svg = am.to_svg(am.AmoebaCloud(np.array([[1.0, 1.0]])), am.graph_segments(STD))
    assert svg.startswith("<svg") and svg.count("<line") == 75
