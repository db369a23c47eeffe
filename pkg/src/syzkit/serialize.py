"""JSON shapes for weights, polytopes, triangulations and graphs.

Rationals are written as "p/q" strings.  Readers raise InputError naming the
offending field so the CLI can report malformed files precisely.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .lattice import LatticeError, frac_str, m_from4, n_from4, parse_frac
from .locus import LocusGraph
from .polytope import FaceLattice
from .subdivision import Triangulation, WeightFunction


class InputError(ValueError):
    pass


def _num(x) -> Any:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else frac_str(x)


def weights_to_json(w: WeightFunction, phases: Mapping | None = None) -> dict:
    out = {"points": [list(p) for p in w.points], "weights": [frac_str(v) for v in w.values]}
    if w.w_m0 is not None:
        out["w_m0"] = frac_str(w.w_m0)
    if phases:
        out["phases"] = {",".join(map(str, p)): frac_str(v) for p, v in sorted(phases.items())}
    return out


def weights_from_json(data: Mapping) -> tuple[WeightFunction, dict]:
    """Returns the weight and the (possibly empty) phase table."""
    if not isinstance(data, Mapping):
        raise InputError("top level: expected an object")
    for key in ("points", "weights"):
        if key not in data:
            raise InputError(f"missing field '{key}'")
    pts, vals = data["points"], data["weights"]
    if len(pts) != len(vals):
        raise InputError(f"'points' has {len(pts)} entries but 'weights' has {len(vals)}")
    parsed_pts = []
    for i, p in enumerate(pts):
        if not isinstance(p, list) or not all(isinstance(x, int) for x in p):
            raise InputError(f"points[{i}]: expected a list of integers, got {p!r}")
        parsed_pts.append(tuple(p))
    parsed_vals = []
    for i, v in enumerate(vals):
        try:
            parsed_vals.append(parse_frac(v))
        except (ValueError, ZeroDivisionError, LatticeError) as exc:
            raise InputError(f"weights[{i}]: {exc}") from exc
    w_m0 = None
    if data.get("w_m0") is not None:
        try:
            w_m0 = parse_frac(data["w_m0"])
        except (ValueError, ZeroDivisionError, LatticeError) as exc:
            raise InputError(f"w_m0: {exc}") from exc
    phases = {}
    for key, v in (data.get("phases") or {}).items():
        try:
            phases[tuple(int(x) for x in key.split(","))] = parse_frac(v)
        except (ValueError, ZeroDivisionError, LatticeError) as exc:
            raise InputError(f"phases[{key!r}]: {exc}") from exc
    try:
        w = WeightFunction(tuple(parsed_pts), tuple(parsed_vals), w_m0)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return w, phases


def load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def polytope_to_json(lat: FaceLattice, normals_in: str = "M") -> dict:
    """``normals_in`` says which lattice holds the facet normals ("M" or "N")."""
    lift = m_from4 if normals_in == "M" else n_from4
    return {
        "hrep": [{"normal": [_num(x) for x in lift(tuple(normal))], "rhs": frac_str(rhs)} for normal, rhs in lat.facets],
        "vrep": [[frac_str(x) for x in v] for v in lat.vertices],
    }


def triangulation_to_json(t: Triangulation) -> dict:
    return {"points": [list(p) for p in t.points], "cells": [list(c) for c in t.cells]}


def graph_to_json(g: LocusGraph) -> dict:
    verts = []
    for v in g.vertices:
        verts.append({"coords": [frac_str(x) for x in v.coords], "kind": v.kind, "host": _host_json(v.host)})
    return {"side": g.side, "vertices": verts, "edges": [list(e.ends) for e in g.edges],
            "paths": [[[frac_str(x) for x in p] for p in e.path] for e in g.edges]}


def _host_json(host) -> Any:
    if isinstance(host, tuple):
        return [_host_json(h) for h in host]
    if hasattr(host, "vertex_indices"):
        return {"dim": host.dim, "vertices": list(host.vertex_indices())}
    if isinstance(host, Fraction):
        return frac_str(host)
    return host


def graph_from_json(data: Mapping) -> tuple[list[tuple], list[str], list[tuple[int, int]]]:
    """(coords, kinds, edge ends) read back from graph JSON."""
    try:
        coords = [tuple(Fraction(x) for x in v["coords"]) for v in data["vertices"]]
        kinds = [v["kind"] for v in data["vertices"]]
        edges = [tuple(e) for e in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"graph JSON: {exc}") from exc
    return coords, kinds, edges
