from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from syzkit import chambers, subdivision as sd
from syzkit.lattice import MPoint, standard_triangle, two_faces
from syzkit.subdivision import WeightFunction


def chart(f, d=5):
    return WeightFunction.from_function(standard_triangle(d), f)


def quad(p):
    return p[0] ** 2 + p[0] * p[1] + p[1] ** 2


def brute_lower_cells(w):
    """Independent oracle: triangles whose lifted plane lies weakly below every lifted point."""
    pts = list(w.points)
    cells = set()
    for a, b, c in combinations(pts, 3):
        det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if det == 0:
            continue
        # plane alpha x + beta y + gamma through the three lifted points
        m = [[a[0], a[1], 1], [b[0], b[1], 1], [c[0], c[1], 1]]
        rhs = [w[a], w[b], w[c]]
        sol = _solve3(m, rhs)
        if all(sol[0] * q[0] + sol[1] * q[1] + sol[2] <= w[q] for q in pts):
            inside = [q for q in pts if _in_triangle(q, a, b, c)]
            if len(inside) == 3:
                cells.add(frozenset((a, b, c)))
    return cells


def _solve3(m, r):
    m = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(m, r)]
    for i in range(3):
        piv = next(k for k in range(i, 3) if m[k][i] != 0)
        m[i], m[piv] = m[piv], m[i]
        for k in range(3):
            if k != i:
                f = m[k][i] / m[i][i]
                m[k] = [x - f * y for x, y in zip(m[k], m[i])]
    return [m[i][3] / m[i][i] for i in range(3)]


def _in_triangle(q, a, b, c):
    def o(p1, p2, p3):
        return (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p2[1] - p1[1]) * (p3[0] - p1[0])
    s = [o(a, b, q), o(b, c, q), o(c, a, q)]
    return all(x >= 0 for x in s) or all(x <= 0 for x in s)


def test_convexity_examples():
    assert sd.is_convex_2d(chart(lambda p: 0))
    rep = sd.is_convex_2d(chart(quad))
    assert rep.convex
    for p, plane in rep.certificates.items():
        assert sd.check_affine_certificate(chart(quad), p, plane)
    # +1 at (1,1) lands exactly on the plane through its neighbours; +2 is a genuine violation
    bumped1 = chart(lambda p: quad(p) + (p == (1, 1)))
    assert sd.is_convex_2d(bumped1).convex
    assert not sd.regular_subdivision(bumped1).generic
    rep2 = sd.is_convex_2d(chart(lambda p: quad(p) + 2 * (p == (1, 1))))
    assert not rep2.convex and rep2.violator == (1, 1)


def test_standard_face_triangulation_matches_grid_split():
    t = sd.regular_subdivision(sd.standard_chart_weight())
    assert t.unimodular() and len(t.cells) == 25
    expected = set()
    for i in range(5):
        for j in range(5 - i):
            expected.add(frozenset({(i, j), (i + 1, j), (i, j + 1)}))
            if i + j <= 3:
                expected.add(frozenset({(i + 1, j), (i, j + 1), (i + 1, j + 1)}))
    assert set(t.cell_points()) == expected
    assert set(t.cell_points()) == brute_lower_cells(sd.standard_chart_weight())


def test_degree_one_and_paraboloid():
    t = sd.regular_subdivision(chart(lambda p: 7, d=1))
    assert len(t.cells) == 1 and t.simplicial
    par = sd.regular_subdivision(chart(lambda p: p[0] ** 2 + p[1] ** 2))
    assert not par.simplicial
    assert any(len(c) == 4 for c in par.flat_cells())


def test_rel_skeleton_examples():
    keys = sd.skeleton_keys()
    # supports are linear functions n with n(m) <= w'_m; a constant +1 is supported by n = 0 at every point
    assert sd.is_convex_rel_skeleton(WeightFunction.from_function(keys, lambda p: 1))
    # a constant -1 is not: convexity forces w'(0) = w'(m0) <= average of the vertex weights
    assert not sd.is_convex_rel_skeleton(WeightFunction.from_function(keys, lambda p: -1))
    red = {p: MPoint(p).to_reduced().exponents for p in keys}
    quad5 = WeightFunction.from_function(keys, lambda p: sum(x * x for x in red[p]))
    # with zero weight at the origin a quadratic has no linear support at the far vertices
    assert not sd.is_convex_rel_skeleton(quad5)
    lifted = quad5.with_m0(sd.lemma_threshold(quad5)).shifted()
    rep = sd.is_convex_rel_skeleton(lifted)
    assert rep.convex
    for p, n in rep.certificates.items():
        assert sd.check_linear_certificate(lifted, p, n)
    pushed = lifted.map_values(lambda p, v: v + 50 * (p == (2, 3, 0, 0, 0)))
    rep = sd.is_convex_rel_skeleton(pushed)
    assert not rep.convex and rep.violator == (2, 3, 0, 0, 0)


def test_lemma_threshold_validates():
    keys = sd.skeleton_keys()
    for w in (WeightFunction.from_function(keys, lambda p: 0), sd.standard_weight()):
        W = sd.lemma_threshold(w)
        assert sd.is_convex_rel_skeleton(w.with_m0(W).shifted())
        assert sd.is_convex_rel_skeleton(w.with_m0(W - 3).shifted())
    assert sd.lemma_threshold(sd.standard_weight()) == -32


def test_lemma_threshold_names_bad_face():
    w = sd.standard_weight().map_values(lambda p, v: v + 40 * (p == (0, 0, 1, 2, 2)))
    with pytest.raises(sd.ConvexityError) as exc:
        sd.lemma_threshold(w)
    assert exc.value.face == (0, 1)


def test_same_chamber_examples(std_weight):
    lin = (3, -1, 2, 0)
    shifted = std_weight.map_values(lambda p, v: v + sum(a * b for a, b in zip(MPoint(p).coords4(), lin)) + 7)
    assert sd.same_chamber(std_weight, shifted)
    assert sd.same_chamber(std_weight, std_weight.scaled(2))
    assert not sd.same_chamber(std_weight, chambers.alt_weight())


def test_alt_chart_weights_give_distinct_unimodular_triangulation():
    t = sd.regular_subdivision(chambers.alt_chart_weight())
    std = sd.regular_subdivision(sd.standard_chart_weight())
    assert t.unimodular() and len(t.cells) == 25
    assert set(t.cell_points()) != set(std.cell_points())
    edges = {frozenset((t.points[a], t.points[b])) for a, b in t.edges()}
    assert frozenset({(0, 1), (2, 0)}) in edges and frozenset({(1, 1), (2, 2)}) in edges
    assert set(t.cell_points()) == brute_lower_cells(chambers.alt_chart_weight())
    glob = chambers.alt_weight()
    assert set(sd.regular_subdivision(sd.restrict_to_face(glob, chambers.ALT_FACE)).cell_points()) == set(t.cell_points())
    for z in two_faces():
        if z != chambers.ALT_FACE:
            assert set(sd.global_subdivision(glob)[z].cell_points()) == set(std.cell_points())


def test_non_generic_reports_cell():
    w = sd.standard_weight().map_values(lambda p, v: v + (p == (0, 0, 1, 1, 3)) * 0)
    par = WeightFunction.from_function(sd.skeleton_keys(), lambda p: sum(e * e for e in p[:2]) + p[2] * p[2])
    assert sd.is_generic(w)
    with pytest.raises((sd.NonGenericError, sd.ConvexityError)):
        sd.chamber_key(par)


def test_skeleton_domain_required():
    with pytest.raises(ValueError):
        sd.global_subdivision(sd.standard_chart_weight())


jitter = st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=50), min_size=21, max_size=21)


@settings(max_examples=20, deadline=None)
@given(jitter, st.fractions(min_value=Fraction(1, 3), max_value=5, max_denominator=7),
       st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)))
def test_chart_subdivision_properties(j, lam, aff):
    pts = standard_triangle()
    w = WeightFunction(tuple(pts), tuple(Fraction(4 * quad(p)) + x for p, x in zip(pts, j)))
    t = sd.regular_subdivision(w)
    # certificates: each cell's plane is exact on its corners and below every other lifted point
    for cell, plane in zip(t.cells, t.certificates):
        for i in cell:
            assert sd.check_affine_certificate(w, t.points[i], plane)
    moved = w.map_values(lambda p, v: lam * v + aff[0] * p[0] + aff[1] * p[1] + aff[2])
    assert set(sd.regular_subdivision(moved).cell_points()) == set(t.cell_points())
    if t.generic:
        assert t.unimodular() and len(t.cells) == 25
        assert set(t.cell_points()) == brute_lower_cells(w)
