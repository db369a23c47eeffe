"""Exact polytopes in Q^d: double description, facet enumeration, face posets.

All arithmetic is over Python integers and ``fractions.Fraction``; nothing here
touches floating point.  Inequalities are stored as ``<normal, x> >= rhs``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class PolytopeError(ValueError):
    """Raised when an input does not describe a full-dimensional polytope."""


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def integer_row(v: Iterable) -> tuple[int, ...]:
    """Clear denominators of a rational vector (positive multiple, primitive)."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = _lcm(den, x.denominator)
    return _primitive([int(x * den) for x in v])


def rank(vectors: Sequence[Sequence]) -> int:
    """Exact rank of a list of rational vectors."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square system ``a x = b`` exactly; raises on singular input."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            raise PolytopeError("singular system")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def extreme_rays(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{y : r . y >= 0 for r in rows}``.

    Double description with the combinatorial adjacency test.  The rows must
    span the ambient space (pointedness); otherwise ``PolytopeError``.
    """
    rows = [tuple(int(x) for x in r) for r in rows]
    if not rows:
        raise PolytopeError("no constraints")
    dim = len(rows[0])

    # initial simplicial cone from a greedy independent subset
    basis: list[int] = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in basis] + [r]) > len(basis):
            basis.append(i)
            if len(basis) == dim:
                break
    if len(basis) < dim:
        raise PolytopeError("constraints do not span; cone is not pointed")

    bmat = [rows[i] for i in basis]
    rays: list[tuple[int, ...]] = []
    zeros: list[int] = []
    for k in range(dim):
        target = [1 if j == k else 0 for j in range(dim)]
        col = integer_row(solve(bmat, target))
        rays.append(col)
        z = 0
        for j, bi in enumerate(basis):
            if j != k:
                z |= 1 << bi
        zeros.append(z)

    in_basis = set(basis)
    for k, row in enumerate(rows):
        if k in in_basis:
            continue
        vals = [_dot(row, r) for r in rays]
        pos = [i for i, s in enumerate(vals) if s > 0]
        neg = [i for i, s in enumerate(vals) if s < 0]
        bit = 1 << k
        new_rays = []
        new_zeros = []
        for i, s in enumerate(vals):
            if s >= 0:
                new_rays.append(rays[i])
                new_zeros.append(zeros[i] | bit if s == 0 else zeros[i])
        if neg:
            need = dim - 2
            for p in pos:
                zp = zeros[p]
                for q in neg:
                    common = zp & zeros[q]
                    if common.bit_count() < need:
                        continue
                    adjacent = True
                    for t, zt in enumerate(zeros):
                        if t != p and t != q and zt & common == common:
                            adjacent = False
                            break
                    if not adjacent:
                        continue
                    sp, sq = vals[p], vals[q]
                    ray = _primitive([sp * b - sq * a for a, b in zip(rays[p], rays[q])])
                    new_rays.append(ray)
                    new_zeros.append(common | bit)
        rays, zeros = new_rays, new_zeros
    return rays


@dataclass(frozen=True)
class Face:
    """A nonempty proper face, encoded by vertex and facet bitmasks."""

    dim: int
    vertices: int
    facets: int

    def vertex_indices(self) -> tuple[int, ...]:
        return _bits(self.vertices)

    def facet_indices(self) -> tuple[int, ...]:
        return _bits(self.facets)


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass
class FaceLattice:
    """Full-dimensional polytope with exact H- and V-representation.

    ``facets[j] = (normal, rhs)`` means ``<normal, x> >= rhs``.  ``faces`` lists
    every nonempty proper face, sorted by dimension then vertex mask.
    """

    vertices: tuple[tuple[Fraction, ...], ...]
    facets: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    faces: tuple[Face, ...] = field(repr=False)
    dim: int = 0

    # ---- construction -------------------------------------------------
    @classmethod
    def from_vertices(cls, points: Sequence[Sequence]) -> "FaceLattice":
        """Convex hull of a point set; non-extreme points are discarded."""
        pts = [tuple(Fraction(x) for x in p) for p in points]
        if not pts:
            raise PolytopeError("empty point set")
        d = len(pts[0])
        rows = [integer_row(list(p) + [1]) for p in pts]
        facets = []
        for ray in extreme_rays(rows):
            normal, b = ray[:-1], ray[-1]
            if all(x == 0 for x in normal):
                continue  # the trivial inequality 1 >= 0
            facets.append((tuple(Fraction(x) for x in normal), Fraction(-b)))
        verts = _extreme_points(pts, facets, d)
        return cls._build(verts, facets, d)

    @classmethod
    def from_inequalities(cls, normals: Sequence[Sequence], rhs: Sequence) -> "FaceLattice":
        """Polytope ``{x : <a_j, x> >= r_j}``; must be bounded and full-dimensional."""
        if not normals:
            raise PolytopeError("no inequalities")
        d = len(normals[0])
        rows = [integer_row(list(a) + [-Fraction(r)]) for a, r in zip(normals, rhs)]
        rows.append(tuple([0] * d + [1]))
        verts = []
        for ray in extreme_rays(rows):
            t = ray[-1]
            if t == 0:
                raise PolytopeError("unbounded polyhedron")
            verts.append(tuple(Fraction(x, t) for x in ray[:-1]))
        if rank([[a - b for a, b in zip(v, verts[0])] for v in verts[1:]]) < d:
            raise PolytopeError("polytope is not full-dimensional")
        verts.sort()
        facets = []
        seen = set()
        for a, r in zip(normals, rhs):
            a = tuple(Fraction(x) for x in a)
            r = Fraction(r)
            tight = frozenset(i for i, v in enumerate(verts) if _dot(a, v) == r)
            if tight in seen:
                continue
            if len(tight) >= d and rank([[x - y for x, y in zip(verts[i], verts[min(tight)])] for i in tight]) == d - 1:
                seen.add(tight)
                facets.append((a, r))
        return cls._build(verts, facets, d)

    @classmethod
    def _build(cls, verts, facets, d) -> "FaceLattice":
        verts = tuple(sorted(verts))
        facets = tuple(sorted(facets, key=lambda f: tuple(_bits(_tight_mask(f, verts)))))
        inc = [_tight_mask(f, verts) for f in facets]
        faces = _face_poset(verts, inc, d)
        return cls(vertices=verts, facets=facets, faces=tuple(faces), dim=d)

    # ---- queries -------------------------------------------------------
    def facet_vertex_mask(self, j: int) -> int:
        return _tight_mask(self.facets[j], self.vertices)

    def faces_of_dim(self, k: int) -> list[Face]:
        return [f for f in self.faces if f.dim == k]

    def face_by_vertices(self, mask: int) -> Face | None:
        return self._index().get(mask)

    def _index(self) -> dict[int, Face]:
        idx = self.__dict__.get("_vidx")
        if idx is None:
            idx = {f.vertices: f for f in self.faces}
            self.__dict__["_vidx"] = idx
        return idx

    def barycenter(self, face: Face) -> tuple[Fraction, ...]:
        ids = face.vertex_indices()
        return tuple(sum(self.vertices[i][c] for i in ids) / len(ids) for c in range(self.dim))

    def contains(self, x: Sequence) -> bool:
        return all(_dot(a, x) >= r for a, r in self.facets)

    def has_origin_in_interior(self) -> bool:
        return all(r < 0 for _, r in self.facets)

    def polar_vertices(self) -> list[tuple[Fraction, ...]]:
        """Vertices of the polar ``{y : <x, y> >= -1 on self}``, one per facet."""
        if not self.has_origin_in_interior():
            raise PolytopeError("origin is not interior; polar undefined")
        return [tuple(x / -r for x in a) for a, r in self.facets]

    def dual_face(self, face: Face, other: "FaceLattice") -> Face | None:
        """The face ``{y in other : <x, y> = -1 for all x in face}``.

        Returns ``None`` for the empty face.
        """
        rows = self._pairing_rows(other)
        mask = (1 << len(other.vertices)) - 1
        for i in face.vertex_indices():
            mask &= rows[i]
        if mask == 0:
            return None
        found = other.face_by_vertices(mask)
        if found is None:
            raise PolytopeError("dual vertex set is not a face; polytopes are not polar")
        return found

    def _pairing_rows(self, other: "FaceLattice") -> list[int]:
        """Per vertex of self, the bitmask of vertices of other pairing to -1 with it."""
        cache = self.__dict__.setdefault("_prows", {})
        rows = cache.get(id(other))
        if rows is None or rows[0] is not other:
            masks = []
            for x in self.vertices:
                m = 0
                for j, y in enumerate(other.vertices):
                    if _dot(x, y) == -1:
                        m |= 1 << j
                masks.append(m)
            rows = (other, masks)
            cache[id(other)] = rows
        return rows[1]


def _tight_mask(facet, verts) -> int:
    a, r = facet
    m = 0
    for i, v in enumerate(verts):
        if _dot(a, v) == r:
            m |= 1 << i
    return m


def _extreme_points(pts, facets, d):
    """Keep the points that are vertices: their tight facets pin them down."""
    out = set()
    for p in pts:
        tight = [a for a, r in facets if _dot(a, p) == r]
        if len(tight) >= d and rank(tight) == d:
            out.add(p)
    return sorted(out)


def _face_poset(verts, inc, d) -> list[Face]:
    nf = len(inc)

    def facet_mask(vmask: int) -> int:
        m = 0
        for j in range(nf):
            if inc[j] & vmask == vmask:
                m |= 1 << j
        return m

    level = {m: facet_mask(m) for m in set(inc)}
    faces = [Face(d - 1, v, f) for v, f in level.items()]
    for k in range(d - 2, -1, -1):
        nxt: dict[int, int] = {}
        for vmask, fmask in level.items():
            cands = set()
            for j in range(nf):
                if fmask >> j & 1:
                    continue
                c = vmask & inc[j]
                if c:
                    cands.add(c)
            for c in cands:
                if not any(c != o and c & o == c for o in cands):
                    nxt[c] = 0
        for c in nxt:
            nxt[c] = facet_mask(c)
        faces.extend(Face(k, v, f) for v, f in nxt.items())
        level = nxt
    faces.sort(key=lambda f: (f.dim, _bits(f.vertices)))
    for f in faces:
        vs = [verts[i] for i in _bits(f.vertices)]
        if rank([[x - y for x, y in zip(v, vs[0])] for v in vs[1:]]) != f.dim:
            raise PolytopeError("face dimension mismatch; input is degenerate")
    return faces
