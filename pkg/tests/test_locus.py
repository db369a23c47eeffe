from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from syzkit import chambers, dualbase, locus, subdivision as sd
from syzkit.lattice import standard_triangle, two_faces
from syzkit.subdivision import WeightFunction


def test_degree_one_triangle_is_a_y():
    t = sd.regular_subdivision(WeightFunction.from_function(standard_triangle(1), lambda p: 0))
    g = locus.face_graph(t)
    assert len(g.vertices) == 1 and g.vertices[0].kind == locus.II
    assert g.edges == [] and len(g.legs) == 3
    assert g.vertices[0].coords == (Fraction(1, 3), Fraction(1, 3))
    assert g.regions == 3


def test_standard_face_counts():
    g = locus.face_graph(sd.regular_subdivision(sd.standard_chart_weight()))
    # 75 cell sides = 2 * interior + boundary, with 15 boundary unit edges
    assert (len(g.vertices), len(g.edges), len(g.legs)) == (25, (75 - 15) // 2, 15)
    assert g.regions == 21 == len(standard_triangle())
    assert all(d == 3 for d in g.degrees())


def test_alt_face_same_counts_other_adjacency():
    std = locus.face_graph(sd.regular_subdivision(sd.standard_chart_weight()))
    alt = locus.face_graph(sd.regular_subdivision(chambers.alt_chart_weight()))
    assert (len(alt.vertices), len(alt.edges), len(alt.legs), alt.regions) == (25, 30, 15, 21)
    assert alt.adjacency() != std.adjacency()


def test_global_counts(std_locus):
    assert std_locus.counts() == {"II": 250, "III": 50, "edges": 450}
    # degree oracle: every site is 3-valent
    assert 3 * (250 + 50) == 2 * 450
    strata = std_locus.stratification()
    assert len(strata["Gamma2"]) == 250 and len(strata["Gamma3"]) == 50 and len(strata["Gamma1"]) == 450


@pytest.mark.parametrize("seed", [1, 2])
def test_counts_chamber_independent(seed):
    w = chambers.random_generic_weight(seed)
    g = locus.singular_locus(w)
    assert g.counts() == {"II": 250, "III": 50, "edges": 450}
    assert set(locus.face_regions(w).values()) == {21}


def test_single_face_is_rejected():
    g = locus.face_graph(sd.regular_subdivision(sd.standard_chart_weight()))
    with pytest.raises(locus.LocusError, match="dangling"):
        locus.assemble_global({(0, 1): g})
    with pytest.raises(locus.LocusError):
        g.stratification()


def test_iii_sites_sit_on_unit_segment_midpoints(std_locus):
    for v in std_locus.vertices:
        if v.kind == locus.III:
            _, zeros, seg = v.host
            assert len(zeros) == 3
            mid = tuple(Fraction(a + b, 2) - 1 for a, b in zip(*seg))
            assert v.coords == mid


def test_mirror_locus_constant_weight():
    keys = sd.skeleton_keys()
    dw = dualbase.build_delta_w(WeightFunction.from_function(keys, lambda p: 1))
    gp = locus.mirror_locus(dw, dualbase.face_map_pi(dw))
    # simplex: edges map to edges (III), 2-faces to 2-faces (II); each edge lies in three 2-faces
    assert gp.counts() == {"II": 10, "III": 10, "edges": 30}


def test_mirror_locus_standard(std_mirror):
    gp = std_mirror[3]
    assert gp.side == "mirror"
    assert gp.counts() == {"II": 50, "III": 250, "edges": 450}


jitter = st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=40), min_size=21, max_size=21)


@settings(max_examples=25, deadline=None)
@given(jitter)
def test_face_graph_invariants(j):
    pts = standard_triangle()
    w = WeightFunction(tuple(pts), tuple(4 * (p[0] ** 2 + p[0] * p[1] + p[1] ** 2) + x for p, x in zip(pts, j)))
    t = sd.regular_subdivision(w)
    if not t.generic:
        with pytest.raises(locus.LocusError):
            locus.face_graph(t)
        return
    g = locus.face_graph(t)
    assert (len(g.vertices), len(g.edges), len(g.legs), g.regions) == (25, 30, 15, 21)
    assert all(d == 3 for d in g.degrees())
    # each edge passes through the midpoint of the cell side it crosses
    for e in g.edges:
        assert len(e.path) == 3
