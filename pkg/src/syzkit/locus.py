"""Singular-locus graphs on the 2-skeleton of Delta and on the boundary of Delta_w.

Per face, the graph is the union of barycentric-subdivision segments that
avoid lattice points: triangle barycentres joined through midpoints of edges.
Midpoints of interior unit edges are smooth points of an edge polyline, not
vertices.  Assembled over the ten faces, the dangling legs meet in threes at
midpoints of unit segments on edges of Delta.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .lattice import face_chart, two_faces
from .subdivision import Triangulation, WeightFunction, global_subdivision, chamber_key, _orient

II = "II"
III = "III"


class LocusError(ValueError):
    pass


@dataclass(frozen=True)
class LocusVertex:
    coords: tuple[Fraction, ...]
    kind: str
    host: tuple


@dataclass(frozen=True)
class LocusEdge:
    ends: tuple[int, int]
    path: tuple[tuple[Fraction, ...], ...]
    hosts: tuple = ()


@dataclass
class LocusGraph:
    """Embedded graph with 3-valent sites; edge polylines carry the smooth points.

    ``side`` says which fibration the kinds describe ("quintic" for the locus on
    the boundary of Delta, "mirror" for the one on the boundary of Delta_w).
    ``legs`` holds half-open segments of an unassembled face fragment.
    """

    vertices: list[LocusVertex]
    edges: list[LocusEdge]
    side: str = "quintic"
    legs: list[tuple[int, tuple, tuple]] = field(default_factory=list)
    regions: int | None = None

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for e in self.edges:
            deg[e.ends[0]] += 1
            deg[e.ends[1]] += 1
        for v, _, _ in self.legs:
            deg[v] += 1
        return deg

    def counts(self) -> dict[str, int]:
        return {
            II: sum(v.kind == II for v in self.vertices),
            III: sum(v.kind == III for v in self.vertices),
            "edges": len(self.edges),
        }

    def stratification(self) -> dict[str, list]:
        """Gamma^2 (II-sites), Gamma^3 (III-sites), Gamma^1 (open edges)."""
        if self.legs:
            raise LocusError("graph has dangling legs; assemble it first")
        return {
            "Gamma2": [i for i, v in enumerate(self.vertices) if v.kind == II],
            "Gamma3": [i for i, v in enumerate(self.vertices) if v.kind == III],
            "Gamma1": list(range(len(self.edges))),
        }

    def check(self) -> None:
        """Every site 3-valent, no isolated vertices, total degree = 2 * edges."""
        deg = self.degrees()
        for i, d in enumerate(deg):
            if d != 3:
                raise LocusError(f"vertex {i} ({self.vertices[i].kind}) has degree {d}")
        if sum(deg) != 2 * len(self.edges) + len(self.legs):
            raise LocusError("degree sum mismatch")

    def adjacency(self) -> frozenset:
        """Edge set keyed by vertex coordinates; comparable across constructions."""
        return frozenset(frozenset((self.vertices[e.ends[0]].coords, self.vertices[e.ends[1]].coords, e.path[len(e.path) // 2]))
                         for e in self.edges)


def _mid(a, b):
    return tuple(Fraction(x + y, 2) for x, y in zip(a, b))


def _bary(pts):
    return tuple(sum(Fraction(p[k]) for p in pts) / len(pts) for k in range(len(pts[0])))


def face_graph(t: Triangulation) -> LocusGraph:
    """Graph of one triangulated lattice triangle, in chart coordinates."""
    if not t.simplicial:
        raise LocusError(f"non-simplicial cell {t.flat_cells()[0]}")
    if len(t.used_points) != len(t.points):
        raise LocusError("triangulation leaves lattice points unused")
    pts = t.points
    verts = []
    edge_cells: dict[tuple[int, int], list[int]] = defaultdict(list)
    for ci, cell in enumerate(t.cells):
        a, b, c = (pts[i] for i in cell)
        ring = list(cell) if _orient(a, b, c) > 0 else [cell[0], cell[2], cell[1]]
        verts.append(LocusVertex(_bary([pts[i] for i in cell]), II, ("cell", tuple(pts[i] for i in ring))))
        for x, y in zip(ring, ring[1:] + ring[:1]):
            edge_cells[(min(x, y), max(x, y))].append(ci)
    edges, legs = [], []
    for (x, y), cs in sorted(edge_cells.items()):
        mid = _mid(pts[x], pts[y])
        seg = (pts[x], pts[y])
        if len(cs) == 2:
            i, j = cs
            edges.append(LocusEdge((i, j), (verts[i].coords, mid, verts[j].coords), (("cell", i), ("seg", seg), ("cell", j))))
        elif len(cs) == 1:
            legs.append((cs[0], mid, seg))
        else:
            raise LocusError(f"edge {seg} is shared by {len(cs)} cells")
    return LocusGraph(verts, edges, legs=legs, regions=_count_regions(t, edge_cells))


def _count_regions(t: Triangulation, edge_cells) -> int:
    """Components of (triangle minus graph) via the barycentric small triangles."""
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    # small triangle (v, e, c): vertex v of cell c, edge e of c through v
    for ci, cell in enumerate(t.cells):
        for v in cell:
            es = [tuple(sorted((v, u))) for u in cell if u != v]
            union((v, es[0], ci), (v, es[1], ci))  # share segment [v, barycentre]
    for e, cs in edge_cells.items():
        if len(cs) == 2:
            for v in e:
                union((v, e, cs[0]), (v, e, cs[1]))  # share half-edge [v, midpoint]
    return len({find(k) for k in list(parent)})


def assemble_global(fragments: Mapping[tuple[int, int], LocusGraph]) -> LocusGraph:
    """Glue per-face fragments (chart coordinates) into the locus on the boundary of Delta.

    Coordinates become reduced M-coordinates (5-tuples summing to 0).
    """
    if set(fragments) != set(two_faces()):
        missing = sorted(set(two_faces()) - set(fragments))
        raise LocusError(f"dangling legs: fragments missing for faces {missing}")
    verts: list[LocusVertex] = []
    edges: list[LocusEdge] = []
    legs_at: dict[tuple, list] = defaultdict(list)
    for z in two_faces():
        chart = face_chart(z)
        g = fragments[z]
        off = len(verts)
        for v in g.vertices:
            ring = tuple(chart.lattice_point(p).exponents for p in v.host[1])
            verts.append(LocusVertex(chart.from_chart_reduced(v.coords), II, ("cell", z, ring)))
        for e in g.edges:
            path = tuple(chart.from_chart_reduced(p) for p in e.path)
            seg = tuple(chart.lattice_point(p).exponents for p in e.hosts[1][1])
            edges.append(LocusEdge((e.ends[0] + off, e.ends[1] + off), path, (z, seg)))
        for vi, mid, seg in g.legs:
            amb = chart.from_chart_reduced(mid)
            ends = tuple(sorted(chart.lattice_point(p).exponents for p in seg))
            legs_at[amb].append((vi + off, z, ends))
    for mid in sorted(legs_at):
        group = legs_at[mid]
        if len(group) != 3:
            raise LocusError(f"{len(group)} legs meet at {mid}; expected 3")
        seg = group[0][2]
        zeros = tuple(i for i in range(5) if seg[0][i] == 0 and seg[1][i] == 0)
        k = len(verts)
        verts.append(LocusVertex(mid, III, ("segment", zeros, seg)))
        for vi, z, _ in group:
            edges.append(LocusEdge((vi, k), (verts[vi].coords, mid), (z, seg)))
    g = LocusGraph(verts, edges, side="quintic")
    g.check()
    return g


def singular_locus(w: WeightFunction) -> LocusGraph:
    """Gamma_Z for a generic weight on the 2-skeleton."""
    chamber_key(w)  # raises on non-generic weights with the offending cell
    tri = global_subdivision(w)
    return assemble_global({z: face_graph(t) for z, t in tri.items()})


def face_regions(w: WeightFunction) -> dict[tuple[int, int], int]:
    return {z: face_graph(t).regions for z, t in global_subdivision(w).items()}


def mirror_locus(dw, pi) -> LocusGraph:
    """Gamma' on the boundary of Delta_w.

    ``dw`` is a :class:`syzkit.dualbase.DeltaW`; ``pi`` maps each face of Delta_w
    to a face of the dual simplex (``None`` for the empty face).  Barycentres of
    edges and 2-faces whose image is not a vertex are joined along incidences;
    2-valent ones become smooth points.  Kinds are geometric: an image that is an
    edge of the dual simplex marks a III-site, a 2-face image a II-site.
    """
    lat = dw.lattice
    keep = {}
    for f in lat.faces:
        if f.dim not in (1, 2):
            continue
        if f not in pi:
            raise LocusError(f"face map undefined on face {f.vertex_indices()}")
        img = pi[f]
        if img is None or img.dim == 0:
            continue
        keep[f] = img
    raw_adj: dict = defaultdict(list)
    for e in (f for f in keep if f.dim == 1):
        for f2 in (f for f in keep if f.dim == 2):
            if e.vertices & f2.vertices == e.vertices:
                raw_adj[e].append(f2)
                raw_adj[f2].append(e)
    sites = [f for f in keep if len(raw_adj[f]) == 3]
    bad = [f for f in keep if len(raw_adj[f]) not in (2, 3)]
    if bad:
        raise LocusError(f"barycentric vertex of valence {len(raw_adj[bad[0]])} on face {bad[0].vertex_indices()}")
    sites.sort(key=lambda f: (f.dim, f.vertex_indices()))
    index = {f: i for i, f in enumerate(sites)}
    verts = []
    for f in sites:
        kind = III if keep[f].dim == 1 else II
        verts.append(LocusVertex(_n5(lat.barycenter(f)), kind, ("face", f)))
    edges = []
    seen = set()
    for f in sites:
        for g in raw_adj[f]:
            path_faces = [f, g]
            prev, cur = f, g
            while cur not in index:
                nxt = [h for h in raw_adj[cur] if h != prev]
                prev, cur = cur, nxt[0]
                path_faces.append(cur)
            key = frozenset((path_faces[0], path_faces[-1], path_faces[len(path_faces) // 2]))
            if key in seen:
                continue
            seen.add(key)
            edges.append(LocusEdge((index[path_faces[0]], index[path_faces[-1]]),
                                   tuple(_n5(lat.barycenter(h)) for h in path_faces), tuple(path_faces)))
    g = LocusGraph(verts, edges, side="mirror")
    g.check()
    return g


def _n5(c4: Sequence) -> tuple[Fraction, ...]:
    return tuple(c4) + (Fraction(0),)
