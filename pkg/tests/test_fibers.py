from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from syzkit import fibers as fb
from syzkit.locus import LocusGraph


def test_standard_assignment(std_locus):
    q = fb.assign_fibers(std_locus, "quintic")
    assert q.counts[("Gamma2", fb.FiberType("II", (1, 1)))] == 250
    assert q.counts[("Gamma3", fb.FiberType("III", (1,)))] == 50
    assert q.counts[("Gamma1", fb.FiberType("I", (1,)))] == 450
    assert fb.euler_characteristic(q) == -250 + 50 == -200
    m = fb.assign_fibers(std_locus, "mirror")
    assert m.sites() == {"II": 50, "III": 250}
    assert fb.euler_characteristic(m) == 200


def test_hodge_oracle():
    assert fb.hodge_euler(1, 101) == -200
    assert fb.hodge_euler(101, 1) == 200


def test_empty_graph():
    s = fb.assign_fibers(LocusGraph([], []))
    assert fb.euler_characteristic(s) == 0
    assert s.sites() == {"II": 0, "III": 0}


def test_fermat_quotient_multiset():
    sites = {fb.FiberType("II", (5, 5)): 10, fb.FiberType("III", (5,)): 10, fb.FiberType("I", (5,)): 30}
    assert fb.euler_characteristic(fb.summary_from_sites(sites)) == -200


def test_fiber_euler_numbers():
    assert fb.euler_of_fiber(fb.FiberType("III", (5,))) == 5
    assert fb.euler_of_fiber(fb.FiberType("II", (5, 5))) == -25
    assert fb.euler_of_fiber(fb.FiberType("I", (7,))) == 0


@pytest.mark.parametrize("n", [1, 2, 5])
def test_cell_models_match_formula(n):
    assert fb.euler_of_cells(fb.cell_model_III(n)) == n
    assert fb.euler_of_cells(fb.cell_model_I(n)) == 0
    assert fb.euler_of_cells(fb.cell_model_II(n, n)) == -n * n


def test_rejections():
    with pytest.raises(fb.FiberError):
        fb.FiberType("II", (1,))
    with pytest.raises(fb.FiberError):
        fb.FiberType("IV")
    with pytest.raises(fb.FiberError):
        fb.FibrationSummary("quintic").add("Gamma2", fb.FiberType("IItilde", (1, 1)))
    with pytest.raises(fb.FiberError):
        fb.assign_fibers(LocusGraph([], []), "other")


@given(st.integers(0, 400), st.integers(0, 400))
def test_mirror_negates_chi(a, b):
    s = fb.summary_from_sites({fb.FiberType("II", (1, 1)): a, fb.FiberType("III", (1,)): b})
    t = fb.summary_from_sites({fb.FiberType("II", (1, 1)): b, fb.FiberType("III", (1,)): a})
    assert fb.euler_characteristic(s) == -fb.euler_characteristic(t) == b - a
