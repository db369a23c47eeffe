"""Delta_w, its dual, the face map to the dual simplex and the base identification.

Everything lives in four-coordinate charts: N-points drop their (zero) fifth
coordinate and M-points drop the last reduced coordinate, so the pairing is the
dot product.  Weights here are the shifted, normalised weights (positive, equal
at the five vertices of Delta).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .lattice import MPoint, delta_vertex, dual_simplex, m_from4, minimal_face_zeros, two_faces
from .locus import II, III, LocusGraph
from .polytope import Face, FaceLattice, PolytopeError
from .subdivision import WeightFunction, _check_skeleton_domain, chamber_key, face_chart, global_subdivision, lemma_threshold


class DualBaseError(ValueError):
    pass


def normalize_vertices(w: WeightFunction) -> WeightFunction:
    """Add the linear function making all five vertex weights equal to their mean."""
    vals = [w[delta_vertex(i).to_degree().exponents] for i in range(1, 6)]
    # <m^i, n> = 5 n_i - sum(n) with n_5 = 0; n_i = (w_5 - w_i) / 5 equalises
    n = [(vals[4] - vals[i]) / 5 for i in range(4)] + [Fraction(0)]

    def shift(p, v):
        red = MPoint(p).to_reduced().exponents
        return v + sum(a * b for a, b in zip(red, n))

    return w.map_values(shift)


def kahler_weight(w: WeightFunction, w_m0=None) -> WeightFunction:
    """Shift by w_m0 (default: the convexity threshold) and normalise the vertices."""
    if w_m0 is None:
        w_m0 = w.w_m0 if w.w_m0 is not None else lemma_threshold(w)
    return normalize_vertices(w.with_m0(w_m0).shifted())


def _vertex_weight(w: WeightFunction) -> Fraction:
    vals = {w[delta_vertex(i).to_degree().exponents] for i in range(1, 6)}
    if len(vals) != 1:
        raise DualBaseError(f"vertex weights differ ({sorted(vals)}); normalise first")
    return vals.pop()


@dataclass
class DeltaW:
    """{n : <m, n> >= -w_m for m in the 2-skeleton}, with every constraint kept."""

    lattice: FaceLattice
    weights: WeightFunction
    w0: Fraction
    facet_index: dict[int, tuple[int, ...]]
    redundant: tuple[tuple[int, ...], ...]

    def monomials(self, face: Face) -> frozenset:
        return frozenset(self.facet_index[j] for j in face.facet_indices())


def build_delta_w(w: WeightFunction, w0=None) -> DeltaW:
    _check_skeleton_domain(w)
    v0 = _vertex_weight(w)
    if w0 is not None and Fraction(w0) != v0:
        raise DualBaseError(f"vertex weight {v0} differs from requested w0={w0}")
    keys = list(w.points)
    normals = [MPoint(p).coords4() for p in keys]
    rhs = [-w[p] for p in keys]
    try:
        lat = FaceLattice.from_inequalities(normals, rhs)
    except PolytopeError as exc:
        raise DualBaseError(f"Delta_w is empty or degenerate: {exc}") from exc
    by_row = {}
    for p, a, r in zip(keys, normals, rhs):
        by_row.setdefault((tuple(Fraction(x) for x in a), Fraction(r)), p)
    facet_index = {j: by_row[f] for j, f in enumerate(lat.facets)}
    used = set(facet_index.values())
    redundant = tuple(p for p in keys if p not in used)
    return DeltaW(lat, w, v0, facet_index, redundant)


@dataclass
class DeltaWDual:
    """conv{ w_m^{-1} m : m in the 2-skeleton } in reduced M-coordinates."""

    lattice: FaceLattice
    weights: WeightFunction
    vertex_index: dict[int, tuple[int, ...]]

    def monomials(self, face: Face) -> frozenset:
        return frozenset(self.vertex_index[i] for i in face.vertex_indices())

    def face_of_monomials(self, ms) -> Face | None:
        where = {m: i for i, m in self.vertex_index.items()}
        mask = 0
        for m in ms:
            if m not in where:
                return None
            mask |= 1 << where[m]
        return self.lattice.face_by_vertices(mask)


def build_delta_w_dual(w: WeightFunction) -> DeltaWDual:
    _check_skeleton_domain(w)
    if any(v <= 0 for v in w.values):
        raise DualBaseError("weights must be positive for the dual hull")
    pts = {p: tuple(Fraction(x) / w[p] for x in MPoint(p).coords4()) for p in w.points}
    lat = FaceLattice.from_vertices(list(pts.values()))
    where = {c: p for p, c in pts.items()}
    return DeltaWDual(lat, w, {i: where[v] for i, v in enumerate(lat.vertices)})


@dataclass
class PLMap:
    """Face-level assignment extended over barycentric simplices."""

    pairs: dict
    point: Callable | None = field(default=None, repr=False)
    order: str = "preserving"

    def __getitem__(self, face):
        return self.pairs[face]

    def __contains__(self, face) -> bool:
        return face in self.pairs

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def _delta_face_from_zeros(zeros: frozenset) -> Face | None:
    delta, _ = dual_simplex()
    mask = 0
    for j, v in enumerate(delta.vertices):
        deg = MPoint(m_from4(tuple(int(x) for x in v)), reduced=True).to_degree().exponents
        if all(deg[i] == 0 for i in zeros):
            mask |= 1 << j
    if mask == 0 or mask == (1 << len(delta.vertices)) - 1:
        return None  # empty face or all of Delta; callers handle both
    return delta.face_by_vertices(mask)


def face_map_pi(dw: DeltaW) -> PLMap:
    """F -> (smallest face of Delta containing F's facet monomials)*."""
    delta, dual = dual_simplex()
    pairs = {}
    for f in dw.lattice.faces:
        zeros = frozenset(range(5))
        for m in dw.monomials(f):
            zeros &= minimal_face_zeros(MPoint(m))
        beta = _delta_face_from_zeros(zeros)
        # beta = Delta itself has empty dual; proper faces always carry monomials
        pairs[f] = None if beta is None else delta.dual_face(beta, dual)
    return PLMap(pairs, order="preserving")


def pl_dual_homeo(p: FaceLattice, dual: FaceLattice | None = None) -> PLMap:
    """alpha -> alpha*, barycentre to barycentre, order reversing."""
    if dual is None:
        dual = FaceLattice.from_vertices(p.polar_vertices())
    pairs = {}
    for f in p.faces:
        g = p.dual_face(f, dual)
        if g is None or f.dim + g.dim != p.dim - 1:
            raise DualBaseError(f"dual face of {f.vertex_indices()} has wrong dimension")
        pairs[f] = g
    return PLMap(pairs, point=lambda f: dual.barycenter(pairs[f]), order="reversing")


@dataclass
class HMap:
    """m -> m / w_m on the 2-skeleton, affine on the cells of the induced subdivision."""

    weights: WeightFunction
    target: DeltaWDual
    cell_faces: dict[frozenset, Face]

    def point(self, m) -> tuple[Fraction, ...]:
        return tuple(Fraction(x) / self.weights[m] for x in MPoint(m).coords4())

    def inverse_barycenter(self, face: Face) -> tuple[Fraction, ...]:
        """Preimage of a face barycentre: barycentre of its monomials in reduced M-coordinates."""
        ms = self.target.monomials(face)
        return tuple(sum(Fraction(x) for x in col) / len(ms) for col in zip(*(MPoint(m).to_reduced().exponents for m in ms)))


def map_h(w: WeightFunction, target: DeltaWDual | None = None) -> HMap:
    """Check that every cell of the subdivision (and its edges) lands on a face of the dual."""
    chamber_key(w)
    if target is None:
        target = build_delta_w_dual(w)
    if set(target.vertex_index.values()) != set(w.points):
        missing = sorted(set(w.points) - set(target.vertex_index.values()))
        raise DualBaseError(f"point {missing[0]} is not a vertex of the dual hull")
    cell_faces = {}
    for z, t in global_subdivision(w).items():
        chart = face_chart(z)
        cells = [frozenset(chart.lattice_point(t.points[i]).exponents for i in c) for c in t.cells]
        cells += [frozenset(chart.lattice_point(t.points[i]).exponents for i in e) for e in t.edges()]
        for cell in cells:
            f = target.face_of_monomials(cell)
            if f is None or f.dim != len(cell) - 1:
                raise DualBaseError(f"cell {sorted(cell)} is not mapped onto a face of the dual hull")
            cell_faces[cell] = f
    return HMap(w, target, cell_faces)


def base_identification_s(dw: DeltaW, dwd: DeltaWDual, h: HMap | None = None) -> PLMap:
    """s = h^{-1} o (barycentric duality of Delta_w); lands in reduced M-coordinates."""
    if h is None:
        h = map_h(dw.weights, dwd)
    duality = pl_dual_homeo(dw.lattice, dwd.lattice)
    pairs = {f: dwd.monomials(duality[f]) for f in dw.lattice.faces}

    def point(f: Face):
        return h.inverse_barycenter(duality[f])

    return PLMap(pairs, point=point, order="reversing")


@dataclass
class MatchCertificate:
    ok: bool
    vertex_map: dict = field(default_factory=dict)
    edge_map: dict = field(default_factory=dict)
    mismatch: str | None = None

    def __bool__(self) -> bool:
        return self.ok


_SWAP = {II: III, III: II}


def verify_locus_match(gp: LocusGraph, g: LocusGraph, s: PLMap) -> MatchCertificate:
    """Push Gamma' through s and match it to Gamma vertex-by-vertex and edge-by-edge."""
    where = {v.coords: i for i, v in enumerate(g.vertices)}
    vmap = {}
    for i, v in enumerate(gp.vertices):
        img = s.point(v.host[1])
        j = where.get(img)
        if j is None:
            return MatchCertificate(False, vmap, {}, f"vertex {i} of Gamma' maps to {img}, not a site of Gamma")
        if g.vertices[j].kind != _SWAP[v.kind]:
            return MatchCertificate(False, vmap, {}, f"vertex {i}: kind {v.kind} meets {g.vertices[j].kind}, expected the swap")
        if j in vmap.values():
            return MatchCertificate(False, vmap, {}, f"vertex {i}: site {j} hit twice")
        vmap[i] = j
    if len(vmap) != len(g.vertices):
        return MatchCertificate(False, vmap, {}, f"{len(g.vertices) - len(vmap)} sites of Gamma not hit")

    edges_g = {}
    for k, e in enumerate(g.edges):
        lo, hi = sorted(e.ends)
        edges_g[(lo, hi, _from(e.path, g.vertices[lo].coords))] = k
    emap = {}
    for k, e in enumerate(gp.edges):
        lo, hi = sorted((vmap[e.ends[0]], vmap[e.ends[1]]))
        path = tuple(s.point(f) for f in e.hosts)
        hit = edges_g.get((lo, hi, _from(path, g.vertices[lo].coords)))
        if hit is None or hit in emap.values():
            return MatchCertificate(False, vmap, emap, f"edge {k} of Gamma' ({e.ends}) has no partner in Gamma")
        emap[k] = hit
    if len(emap) != len(g.edges):
        return MatchCertificate(False, vmap, emap, f"{len(g.edges) - len(emap)} edges of Gamma not hit")
    return MatchCertificate(True, vmap, emap, None)


def _from(path, start):
    """The polyline read from ``start``."""
    return path if path[0] == start else path[::-1]
