"""Concrete weights for a few distinct chambers of the 2-skeleton.

The alternative-chart weights below realise a triangulation of the degree-5
triangle with the long edges (0,1)-(2,0) and (1,1)-(2,2).  The integers were
found offline by a small linear program and are frozen here; the tests recompute
the triangulation from them rather than trusting them.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .subdivision import (ConvexityError, NonGenericError, WeightFunction, chamber_key, skeleton_keys,
                          standard_weight)

# chart point (m1, m2) -> weight
ALT_CHART_WEIGHTS = {
    (0, 0): 13, (0, 1): 4, (0, 2): 4, (0, 3): 6, (0, 4): 10, (0, 5): 16,
    (1, 0): 7, (1, 1): 0, (1, 2): 1, (1, 3): 4, (1, 4): 9,
    (2, 0): 2, (2, 1): 0, (2, 2): 0, (2, 3): 4,
    (3, 0): 3, (3, 1): 2, (3, 2): 3,
    (4, 0): 6, (4, 1): 6,
    (5, 0): 11,
}

ALT_FACE = (3, 4)

# the alternative chart on face ALT_FACE, the standard chamber on the other nine faces
_ALT_GLOBAL = """
00005:8 00014:4 00023:2 00032:2 00041:4 00050:8 00104:4 00113:1 00122:0 00131:1 00140:4
00203:2 00212:0 00221:0 00230:2 00302:2 00311:1 00320:2 00401:8 00410:8 00500:20 01004:4
01013:1 01022:0 01031:1 01040:4 01103:1 01130:1 01202:0 01220:0 01301:1 01310:1 01400:8
02003:2 02012:0 02021:0 02030:2 02102:0 02120:0 02201:0 02210:0 02300:6 03002:2 03011:1
03020:2 03101:1 03110:1 03200:6 04001:6 04010:6 04100:8 05000:14 10004:4 10013:1 10022:0
10031:1 10040:4 10103:1 10130:1 10202:0 10220:0 10301:1 10310:1 10400:12 11003:1 11030:1
11300:3 12002:0 12020:0 12200:2 13001:1 13010:1 13100:3 14000:6 20003:2 20012:0 20021:0
20030:2 20102:0 20120:0 20201:0 20210:0 20300:6 21002:0 21020:0 21200:2 22001:0 22010:0
22100:0 23000:2 30002:2 30011:1 30020:2 30101:1 30110:1 30200:6 31001:1 31010:1 31100:3
32000:2 40001:6 40010:6 40100:8 41000:6 50000:14
"""


def alt_chart_weight() -> WeightFunction:
    return WeightFunction.from_mapping(ALT_CHART_WEIGHTS)


def alt_weight() -> WeightFunction:
    vals = {}
    for item in _ALT_GLOBAL.split():
        key, v = item.split(":")
        vals[tuple(int(c) for c in key)] = int(v)
    return WeightFunction.from_mapping(vals)


def random_generic_weight(seed: int, amplitude: Fraction = Fraction(1), max_tries: int = 100) -> WeightFunction:
    """Sum of squares plus a seeded rational jitter in [-amplitude, amplitude].

    Draws again (deterministically) until the result is convex and generic.
    """
    rng = random.Random(seed)
    keys = skeleton_keys()
    base = standard_weight()
    for _ in range(max_tries):
        jitter = {p: Fraction(rng.randint(-1000, 1000), 1000) * amplitude for p in keys}
        w = base.map_values(lambda p, v: v + jitter[p])
        try:
            chamber_key(w)
        except (NonGenericError, ConvexityError):
            continue
        return w
    raise ValueError(f"no generic weight found in {max_tries} draws")


def distinct_chambers(weights) -> int:
    return len({chamber_key(w) for w in weights})
