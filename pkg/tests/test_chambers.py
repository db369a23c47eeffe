from __future__ import annotations

from syzkit import chambers, subdivision as sd


def test_random_weights_are_generic_and_reproducible():
    a, b = chambers.random_generic_weight(3), chambers.random_generic_weight(3)
    assert a == b
    assert sd.is_generic(a)
    assert sd.is_convex_rel_skeleton(a.with_m0(sd.lemma_threshold(a)).shifted())


def test_several_distinct_chambers(std_weight):
    ws = [std_weight, chambers.alt_weight()] + [chambers.random_generic_weight(s) for s in range(4)]
    assert chambers.distinct_chambers(ws) == len(ws)
