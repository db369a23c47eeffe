"""Singular fibre types and Euler-characteristic bookkeeping over the locus strata."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product

from .locus import II, III, LocusError, LocusGraph

SMOOTH, TYPE_I, TYPE_II, TYPE_IITILDE, TYPE_III = "Smooth", "I", "II", "IItilde", "III"
STRATA = ("complement", "Gamma1", "Gamma2", "Gamma3")
_ARITY = {SMOOTH: 0, TYPE_I: 1, TYPE_II: 2, TYPE_IITILDE: 2, TYPE_III: 1}


class FiberError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class FiberType:
    tag: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if self.tag not in _ARITY:
            raise FiberError(f"unknown fibre tag {self.tag!r}")
        if len(self.params) != _ARITY[self.tag] or any(int(p) < 1 for p in self.params):
            raise FiberError(f"{self.tag} needs {_ARITY[self.tag]} positive parameters, got {self.params}")

    def __str__(self) -> str:
        if not self.params:
            return self.tag
        return f"{self.tag}({','.join(map(str, self.params))})"


def euler_of_fiber(t: FiberType) -> int:
    if t.tag in (SMOOTH, TYPE_I):
        return 0
    if t.tag in (TYPE_II, TYPE_IITILDE):
        n, m = t.params
        return -n * m
    return t.params[0]


@dataclass
class FibrationSummary:
    side: str
    counts: Counter = field(default_factory=Counter)

    def add(self, stratum: str, ftype: FiberType, k: int = 1) -> None:
        if stratum not in STRATA:
            raise FiberError(f"unknown stratum {stratum!r}")
        if ftype.tag == TYPE_IITILDE:
            raise FiberError("IItilde fibres do not arise from these constructions; refusing the assignment")
        self.counts[(stratum, ftype)] += k

    def sites(self) -> dict[str, int]:
        out = {II: 0, III: 0}
        for (stratum, ft), k in self.counts.items():
            if stratum in ("Gamma2", "Gamma3"):
                out[ft.tag] = out.get(ft.tag, 0) + k
        return out

    def to_json(self) -> dict:
        return {"sites": self.sites(), "chi": euler_characteristic(self)}


_SWAP = {II: III, III: II}
_SITE_FIBER = {II: FiberType(TYPE_II, (1, 1)), III: FiberType(TYPE_III, (1,))}


def assign_fibers(g: LocusGraph, side: str = "quintic") -> FibrationSummary:
    """Fibre type per stratum; kinds are swapped when ``side`` is not the graph's own side."""
    if side not in ("quintic", "mirror"):
        raise FiberError(f"side must be 'quintic' or 'mirror', not {side!r}")
    try:
        strata = g.stratification()
    except LocusError as exc:
        raise FiberError(f"graph is not stratified: {exc}") from exc
    s = FibrationSummary(side)
    s.add("complement", FiberType(SMOOTH))
    for i in strata["Gamma2"] + strata["Gamma3"]:
        kind = g.vertices[i].kind
        if side != g.side:
            kind = _SWAP[kind]
        s.add("Gamma2" if kind == II else "Gamma3", _SITE_FIBER[kind])
    if strata["Gamma1"]:
        s.add("Gamma1", FiberType(TYPE_I, (1,)), len(strata["Gamma1"]))
    return s


def summary_from_sites(sites: dict[FiberType, int], side: str = "quintic") -> FibrationSummary:
    """Summary from a supplied multiset of site fibres (e.g. a coarse quotient model)."""
    s = FibrationSummary(side)
    for ft, k in sites.items():
        stratum = {TYPE_II: "Gamma2", TYPE_IITILDE: "Gamma2", TYPE_III: "Gamma3", TYPE_I: "Gamma1"}.get(ft.tag, "complement")
        s.add(stratum, ft, k)
    return s


def euler_characteristic(s: FibrationSummary) -> int:
    # compactly supported additivity; only the sites carry non-zero fibre Euler numbers
    return sum(k * euler_of_fiber(ft) for (_, ft), k in s.counts.items() if ft.tag not in (SMOOTH, TYPE_I))


def hodge_euler(h11: int, h21: int) -> int:
    """Euler number of a Calabi-Yau threefold from its Hodge numbers."""
    return 2 * (h11 - h21)


# ---- explicit cell models -----------------------------------------------------------

Cell = tuple


def _circle(n: int) -> list[Cell]:
    return [("v", k) for k in range(n)] + [("e", k) for k in range(n)]


def _dim(cell) -> int:
    if isinstance(cell[0], tuple):
        return sum(_dim(c) for c in cell)
    return {"v": 0, "e": 1, "f": 2}[cell[0]]


def _torus_square(n: int, m: int) -> list[Cell]:
    return [(a, b) for a, b in product(_circle(n), _circle(m))]


def _torus_hex(n: int, m: int) -> tuple[list[Cell], list[Cell]]:
    """Honeycomb cell structure on T^2 covering the theta graph n*m times; returns (cells, 1-skeleton)."""
    verts = [("v", (i, j, s)) for i in range(n) for j in range(m) for s in (0, 1)]
    edges = [("e", (i, j, d)) for i in range(n) for j in range(m) for d in range(3)]
    faces = [("f", (i, j)) for i in range(n) for j in range(m)]
    return verts + edges + faces, verts + edges


def euler_of_cells(cells) -> int:
    return sum((-1) ** _dim(c) for c in cells)


def cell_model_III(n: int) -> list[Cell]:
    """T^3 = T^2 x S^1 (n cells around the circle) with the n tori T^2 x {vertex} crushed to points."""
    t2 = _torus_square(1, 1)
    cells = [(a, b) for a in t2 for b in _circle(n)]
    crushed = {(a, ("v", k)) for a in t2 for k in range(n)}
    return [c for c in cells if c not in crushed] + [("v", ("pinch", k)) for k in range(n)]


def cell_model_II(n: int, m: int) -> list[Cell]:
    """S^1 x T^2 with the circle crushed over the honeycomb graph of the n x m cover."""
    t2, graph = _torus_hex(n, m)
    cells = [(a, b) for a in _circle(1) for b in t2]
    crushed = {(a, b) for a in _circle(1) for b in graph}
    return [c for c in cells if c not in crushed] + list(graph)


def cell_model_I(n: int) -> list[Cell]:
    """S^1 x (torus with n disjoint meridians crushed)."""
    pinched = [c for c in _torus_square(n, 1) if c[0][0] != "v"] + [("v", ("pinch", k)) for k in range(n)]
    return [(a, b) for a in _circle(1) for b in pinched]
