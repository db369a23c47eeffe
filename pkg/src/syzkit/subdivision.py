"""Weight functions, lifting-based convexity tests and regular subdivisions.

Sign convention: a weight lifts each point *up* to height w_m and the induced
subdivision is read off the *lower* hull.  A point is supported when some
affine (or, on the 2-skeleton, linear) function touches it from below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .lattice import (
    FaceChart2D,
    MPoint,
    NPoint,
    face_chart,
    minimal_face_zeros,
    two_faces,
    two_skeleton_points,
)
from .polytope import extreme_rays, integer_row


class ConvexityError(ValueError):
    """A weight is not convex; ``point`` (and ``face`` if known) name the culprit."""

    def __init__(self, msg: str, point=None, face=None):
        super().__init__(msg)
        self.point = point
        self.face = face


class NonGenericError(ValueError):
    """A weight sits on a chamber wall; ``cell`` is the offending cell."""

    def __init__(self, msg: str, cell=None, face=None):
        super().__init__(msg)
        self.cell = cell
        self.face = face


@dataclass(frozen=True)
class WeightFunction:
    """Exact rational weights on an ordered list of lattice points."""

    points: tuple[tuple[int, ...], ...]
    values: tuple[Fraction, ...]
    w_m0: Fraction | None = None

    def __post_init__(self):
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        vals = tuple(Fraction(v) for v in self.values)
        if len(pts) != len(vals):
            raise ValueError("points and values differ in length")
        if len(set(pts)) != len(pts):
            raise ValueError("repeated point in weight domain")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        if self.w_m0 is not None:
            object.__setattr__(self, "w_m0", Fraction(self.w_m0))

    @classmethod
    def from_mapping(cls, mapping: Mapping, w_m0=None) -> "WeightFunction":
        items = sorted((tuple(k), v) for k, v in mapping.items())
        return cls(tuple(k for k, _ in items), tuple(v for _, v in items), w_m0)

    @classmethod
    def from_function(cls, points: Iterable, f: Callable, w_m0=None) -> "WeightFunction":
        pts = [tuple(p) for p in points]
        return cls(tuple(pts), tuple(Fraction(f(p)) for p in pts), w_m0)

    def __getitem__(self, p) -> Fraction:
        return self._lookup()[tuple(p)]

    def _lookup(self) -> dict:
        d = self.__dict__.get("_d")
        if d is None:
            d = dict(zip(self.points, self.values))
            object.__setattr__(self, "_d", d)
        return d

    def as_dict(self) -> dict:
        return dict(self._lookup())

    def map_values(self, f: Callable) -> "WeightFunction":
        return WeightFunction(self.points, tuple(Fraction(f(p, v)) for p, v in zip(self.points, self.values)), self.w_m0)

    def scaled(self, lam) -> "WeightFunction":
        lam = Fraction(lam)
        return WeightFunction(self.points, tuple(lam * v for v in self.values),
                              None if self.w_m0 is None else lam * self.w_m0)

    def with_m0(self, w_m0) -> "WeightFunction":
        return WeightFunction(self.points, self.values, w_m0)

    def shifted(self) -> "WeightFunction":
        """w' = w - w_{m0} on the same domain."""
        if self.w_m0 is None:
            raise ValueError("w_m0 not set")
        return WeightFunction(self.points, tuple(v - self.w_m0 for v in self.values))


# ---- the Delta_5 chart ---------------------------------------------------------

def triangle_degree(points: Sequence[Sequence[int]]) -> int:
    """d if ``points`` is exactly {(i, j) : i, j >= 0, i + j <= d}; else raises."""
    pts = set(tuple(p) for p in points)
    d = max((p[0] + p[1] for p in pts), default=-1)
    want = {(i, j) for i in range(d + 1) for j in range(d + 1 - i)}
    if d < 1 or pts != want:
        raise ValueError(f"domain is not a full lattice triangle (got {len(pts)} points)")
    return d


def _orient(a, b, c) -> int:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


@dataclass(frozen=True)
class LowerFacet:
    """A lower-hull plane z = alpha*x + beta*y + gamma and the points it carries."""

    plane: tuple[Fraction, Fraction, Fraction]
    on_plane: tuple[int, ...]
    corners: tuple[int, ...]


def _lower_hull(pts: Sequence[tuple[int, int]], vals: Sequence[Fraction]) -> list[LowerFacet]:
    n = len(pts)
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    zs = [int(v * den) for v in vals]
    planes: dict[tuple, LowerFacet] = {}
    for i, j, k in combinations(range(n), 3):
        a, b, c = pts[i], pts[j], pts[k]
        o = _orient(a, b, c)
        if o == 0:
            continue
        ux, uy, uz = b[0] - a[0], b[1] - a[1], zs[j] - zs[i]
        vx, vy, vz = c[0] - a[0], c[1] - a[1], zs[k] - zs[i]
        # normal (cross product) gives the 3D orientation of any fourth lifted point
        nx, ny, nz = uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx
        on = []
        ok = True
        for t in range(n):
            h = nx * (pts[t][0] - a[0]) + ny * (pts[t][1] - a[1]) + nz * (zs[t] - zs[i])
            if h * o < 0:
                ok = False
                break
            if h == 0:
                on.append(t)
        if not ok:
            continue
        key = tuple(on)
        if key in planes:
            continue
        alpha = Fraction(-nx, nz * den)
        beta = Fraction(-ny, nz * den)
        gamma = vals[i] - alpha * a[0] - beta * a[1]
        planes[key] = LowerFacet((alpha, beta, gamma), key, tuple(_convex_corners(pts, on)))
    return sorted(planes.values(), key=lambda f: f.corners)


def _convex_corners(pts, idx: Sequence[int]) -> list[int]:
    """Indices of the extreme points of a planar point subset (sorted)."""
    out = []
    for t in idx:
        p = pts[t]
        others = [pts[s] for s in idx if s != t]
        if not _in_hull_2d(p, others):
            out.append(t)
    return sorted(out)


def _in_hull_2d(p, others) -> bool:
    if len(others) < 1:
        return False
    for a, b, c in combinations(others, 3):
        o = _orient(a, b, c)
        if o == 0:
            continue
        s1, s2, s3 = _orient(a, b, p), _orient(b, c, p), _orient(c, a, p)
        if o > 0 and s1 >= 0 and s2 >= 0 and s3 >= 0:
            return True
        if o < 0 and s1 <= 0 and s2 <= 0 and s3 <= 0:
            return True
    for a, b in combinations(others, 2):
        if _orient(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
            return True
    return False


@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    certificates: dict = field(default_factory=dict)
    violator: tuple | None = None

    def __bool__(self) -> bool:
        return self.convex


def is_convex_2d(w: WeightFunction) -> ConvexityReport:
    """Every lifted point lies on the lower hull; certificates are affine (alpha, beta, gamma)."""
    triangle_degree(w.points)
    pts = list(w.points)
    facets = _lower_hull(pts, w.values)
    certs = {}
    for f in facets:
        for t in f.on_plane:
            certs.setdefault(pts[t], f.plane)
    for p in pts:
        if p not in certs:
            return ConvexityReport(False, certs, p)
    return ConvexityReport(True, certs, None)


def check_affine_certificate(w: WeightFunction, p, plane) -> bool:
    alpha, beta, gamma = plane
    ok_eq = alpha * p[0] + beta * p[1] + gamma == w[p]
    return ok_eq and all(alpha * q[0] + beta * q[1] + gamma <= v for q, v in zip(w.points, w.values))


@dataclass(frozen=True)
class Triangulation:
    """Regular subdivision of a lattice triangle, with lifting certificates."""

    points: tuple[tuple[int, int], ...]
    cells: tuple[tuple[int, ...], ...]
    certificates: tuple[tuple[Fraction, Fraction, Fraction], ...]
    used_points: frozenset[int]

    @property
    def simplicial(self) -> bool:
        return all(len(c) == 3 for c in self.cells)

    @property
    def generic(self) -> bool:
        return self.simplicial and len(self.used_points) == len(self.points)

    def flat_cells(self) -> list[tuple[int, ...]]:
        return [c for c in self.cells if len(c) != 3]

    def edges(self) -> list[tuple[int, int]]:
        es = set()
        for c in self.cells:
            ring = self._ring(c)
            for a, b in zip(ring, ring[1:] + ring[:1]):
                es.add((min(a, b), max(a, b)))
        return sorted(es)

    def _ring(self, cell) -> list[int]:
        """Cell corners in counterclockwise order."""
        pts = [self.points[i] for i in cell]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        return sorted(cell, key=lambda i: math.atan2(self.points[i][1] - cy, self.points[i][0] - cx))

    def area2(self, cell) -> int:
        a, b, c = (self.points[i] for i in cell)
        return abs(_orient(a, b, c))

    def unimodular(self) -> bool:
        return self.simplicial and all(self.area2(c) == 1 for c in self.cells)

    def cell_points(self) -> list[frozenset]:
        return [frozenset(self.points[i] for i in c) for c in self.cells]


def regular_subdivision(w: WeightFunction) -> Triangulation:
    """Project the lower hull of the lifted points; flat cells are kept as-is."""
    rep = is_convex_2d(w)
    if not rep:
        raise ConvexityError(f"weight is not convex at {rep.violator}", point=rep.violator)
    pts = list(w.points)
    facets = _lower_hull(pts, w.values)
    used = frozenset(i for f in facets for i in f.corners)
    return Triangulation(tuple(pts), tuple(f.corners for f in facets), tuple(f.plane for f in facets), used)


# ---- the 2-skeleton of Delta -----------------------------------------------------

def skeleton_keys() -> list[tuple[int, ...]]:
    return [m.exponents for m in two_skeleton_points()]


def restrict_to_face(w: WeightFunction, zeros) -> WeightFunction:
    chart = face_chart(zeros)
    return WeightFunction.from_mapping({chart.to_chart(MPoint(p)): w[p] for p in w.points
                                        if all(p[i] == 0 for i in chart.zeros)})


def standard_chart_weight(degree: int = 5) -> WeightFunction:
    """m1^2 + m1 m2 + m2^2 on the lattice triangle."""
    return WeightFunction.from_function(
        [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)],
        lambda p: p[0] ** 2 + p[0] * p[1] + p[1] ** 2,
    )


def standard_weight(w_m0=None) -> WeightFunction:
    """Sum of squared exponents on the 2-skeleton; twice the chart quadratic on every face, up to affine terms."""
    return WeightFunction.from_function(skeleton_keys(), lambda p: sum(e * e for e in p), w_m0)


def _check_skeleton_domain(w: WeightFunction) -> None:
    if set(w.points) != set(skeleton_keys()):
        raise ValueError("weight domain must be the 105 points of the 2-skeleton (degree form)")


def global_subdivision(w: WeightFunction) -> dict[tuple[int, int], Triangulation]:
    _check_skeleton_domain(w)
    out = {}
    for z in two_faces():
        wf = restrict_to_face(w, z)
        rep = is_convex_2d(wf)
        if not rep:
            raise ConvexityError(f"face {z} not convex at chart point {rep.violator}", point=rep.violator, face=z)
        out[z] = regular_subdivision(wf)
    return out


def chamber_key(w: WeightFunction) -> frozenset:
    """The induced subdivision Z as a set of cells in ambient exponent coordinates."""
    cells = set()
    for z, t in global_subdivision(w).items():
        if not t.generic:
            bad = t.flat_cells()[0] if t.flat_cells() else None
            chart = face_chart(z)
            cell = None if bad is None else [chart.lattice_point(t.points[i]).exponents for i in bad]
            unused = [chart.lattice_point(t.points[i]).exponents for i in range(len(t.points)) if i not in t.used_points]
            raise NonGenericError(f"face {z}: non-generic (flat cell {cell}, unused {unused})", cell=cell or unused, face=z)
        chart = face_chart(z)
        for c in t.cells:
            cells.add(frozenset(chart.lattice_point(t.points[i]).exponents for i in c))
    return frozenset(cells)


def same_chamber(w1: WeightFunction, w2: WeightFunction) -> bool:
    return chamber_key(w1) == chamber_key(w2)


def is_generic(w: WeightFunction) -> bool:
    try:
        chamber_key(w)
    except (NonGenericError, ConvexityError):
        return False
    return True


# ---- convexity relative to the 2-skeleton -------------------------------------------

def is_convex_rel_skeleton(w: WeightFunction) -> ConvexityReport:
    """Every point of the 2-skeleton has a linear support n with n(m) <= w'_m.

    Exact: the admissible supports (n, -1) are the functionals of the cone dual to
    the lifted points; we enumerate its extreme rays and test each point against
    the rays with negative last coordinate.  Certificates are N-points scaled to
    rationals (4-coordinate tuples).
    """
    _check_skeleton_domain(w)
    keys = list(w.points)
    lifted = [tuple(MPoint(p).coords4()) + (w[p],) for p in keys]
    rows = [tuple(-x for x in integer_row(v)) for v in lifted]
    rows.append((0, 0, 0, 0, -1))
    rays = [r for r in extreme_rays(rows) if r[4] < 0]
    certs = {}
    for p, v in zip(keys, lifted):
        for r in rays:
            if sum(a * b for a, b in zip(v, r)) == 0:
                certs[p] = tuple(Fraction(x, -r[4]) for x in r[:4])
                break
    for p in keys:
        if p not in certs:
            return ConvexityReport(False, certs, p)
    return ConvexityReport(True, certs, None)


def check_linear_certificate(w: WeightFunction, p, n4) -> bool:
    def ev(q):
        return sum(a * b for a, b in zip(MPoint(q).coords4(), n4))

    return ev(p) == w[p] and all(ev(q) <= v for q, v in zip(w.points, w.values))


def facet_support(m: MPoint) -> tuple[Fraction, ...]:
    """A linear function equal to -1 exactly on the smallest face containing m."""
    zeros = sorted(minimal_face_zeros(m))
    acc = [Fraction(0)] * 5
    for j in zeros:
        e = NPoint.basis_vector(j + 1).coords
        acc = [a + Fraction(b, len(zeros)) for a, b in zip(acc, e)]
    return tuple(x - acc[4] for x in acc[:4])


def _chart_plane_to_linear(chart: FaceChart2D, plane) -> tuple[Fraction, ...]:
    """Linear n on M whose restriction to the face is alpha*m_a + beta*m_b + gamma."""
    alpha, beta, gamma = plane
    a, b, _ = chart.free
    n = [Fraction(0)] * 5
    n[a] += alpha
    n[b] += beta
    # reduced coordinates are m - 1; m_i = 0 on the face for i in zeros, so m_bar_i = -1 there
    n[chart.zeros[0]] -= gamma + alpha + beta
    return tuple(x - n[4] for x in n[:4])


def lemma_threshold(w: WeightFunction) -> Fraction:
    """A W with: every w_m0 <= W makes w - w_m0 convex relative to the 2-skeleton.

    Built from per-face supports lifted by the facet support of the smallest
    face, exactly as large negative w_m0 needs.
    """
    _check_skeleton_domain(w)
    charts = {z: face_chart(z) for z in two_faces()}
    reports = {}
    for z in two_faces():
        rep = is_convex_2d(restrict_to_face(w, z))
        if not rep:
            raise ConvexityError(f"face {z} is not convex at chart point {rep.violator}", point=rep.violator, face=z)
        reports[z] = rep
    worst = None
    for p in w.points:
        m = MPoint(p)
        zeros = minimal_face_zeros(m)
        z = next(zz for zz in two_faces() if set(zz) <= zeros)
        chart = charts[z]
        n1 = _chart_plane_to_linear(chart, reports[z].certificates[chart.to_chart(m)])
        nm = facet_support(m)
        for q in w.points:
            if minimal_face_zeros(MPoint(q)) >= zeros:
                continue  # q lies in the smallest face of p; n1 already works there
            c4 = MPoint(q).coords4()
            g = 1 + sum(a * b for a, b in zip(c4, nm))
            excess = (sum(a * b for a, b in zip(c4, n1)) - w[q]) / g
            if worst is None or excess > worst:
                worst = excess
    return -worst if worst is not None else Fraction(0)
