"""Command-line entry point: ``syzkit <command> [options]``.

Exit status is 0 on success, 1 when the mathematics rejects the input (the
diagnostic goes to stderr), 2 on unreadable or malformed files.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import amoeba, chambers, dualbase, fibers, lattice, locus, moduli, monodromy, serialize, subdivision
from .lattice import frac_str


def _positive(kind):
    def conv(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v
    return conv


def _grid(s: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(x) for x in s.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like AxBxC, got {s!r}") from None
    if len(parts) != 3 or any(p < 0 for p in parts):
        raise argparse.ArgumentTypeError(f"grid must look like AxBxC with non-negative parts, got {s!r}")
    return parts


def _frac(s: str) -> Fraction:
    try:
        return lattice.parse_frac(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(","))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weights", metavar="FILE", help="weight JSON (default: sum of squares on the 2-skeleton)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "svg", "text"), default=None)
    common.add_argument("--t", type=_positive(float), default=0.01)
    common.add_argument("--grid", type=_grid, default=(200, 200, 5), help="moduli x phases x roots, e.g. 200x200x5")
    common.add_argument("--tol", type=_positive(float), default=1e-12)
    common.add_argument("--delta", type=_positive(float), default=0.25)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--w0", type=_frac, default=None, help="common vertex weight of the dual polytope (rational; default from the convexity threshold)")

    p = argparse.ArgumentParser(prog="syzkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("points", parents=[common], help="lattice points of the simplex and its 2-skeleton")
    sp = sub.add_parser("subdivide", parents=[common], help="regular subdivision per 2-face")
    sp.add_argument("--face", type=_ints, help="0-based zero pair, e.g. 3,4 (svg output needs one)")
    sp = sub.add_parser("locus", parents=[common], help="singular-locus graph")
    sp.add_argument("--side", choices=("quintic", "mirror"), default="quintic")
    sub.add_parser("dualbase", parents=[common], help="polytope of the weight and the base identification check")
    sp = sub.add_parser("monodromy", parents=[common], help="monodromy along n, m, n', m'")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=_ints, default=(0, 0, 5, 0, 0))
    sp.add_argument("--n2", type=int, default=2)
    sp.add_argument("--m2", type=_ints, default=(0, 0, 4, 1, 0))
    sp.add_argument("--sites", action="store_true", help="check every site of the locus instead")
    sp = sub.add_parser("euler", parents=[common], help="Euler characteristic from the site counts")
    sp.add_argument("--side", choices=("quintic", "mirror"), default="quintic")
    sp = sub.add_parser("amoeba", parents=[common], help="sample a face curve and compare with its graph")
    sp.add_argument("--face", type=_ints, default=(3, 4))
    sp = sub.add_parser("slice", parents=[common], help="reduce a quintic to the slice")
    sp.add_argument("--input", metavar="FILE", help="polynomial JSON (default: a seeded random quintic)")
    sp.add_argument("--psi", type=complex, default=10)
    sp.add_argument("--max-iter", type=int, default=40)
    sub.add_parser("mirrormap", parents=[common], help="coefficients from weights and phases")
    return p


def _load_weights(path):
    if path is None:
        return subdivision.standard_weight(), {}
    return serialize.weights_from_json(serialize.load_json(path))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj) + "\n"


def _face_weight(w, face):
    if len(w.points[0]) == 2:
        return w
    return subdivision.restrict_to_face(w, face)


def cmd_points(args) -> str:
    delta = [list(m.exponents) for m in lattice.enumerate_delta_points()]
    skel = [list(m.exponents) for m in lattice.two_skeleton_points()]
    if args.fmt == "csv":
        return "m1,m2,m3,m4,m5,on_skeleton\n" + "".join(
            ",".join(map(str, m)) + f",{int(m in skel)}\n" for m in delta)
    return _json({"delta": delta, "skeleton": skel})


def cmd_subdivide(args) -> str:
    w, _ = _load_weights(args.weights)
    if len(w.points[0]) == 2:
        t = subdivision.regular_subdivision(w)
        if args.fmt == "svg":
            return _triangulation_svg(t)
        return _json(serialize.triangulation_to_json(t))
    tris = subdivision.global_subdivision(w)
    if args.fmt == "svg":
        if args.face is None:
            raise ValueError("svg output draws one face; pass --face")
        return _triangulation_svg(tris[tuple(sorted(args.face))])
    key = subdivision.chamber_key(w) if all(t.generic for t in tris.values()) else None
    out = {"faces": {f"{a},{b}": serialize.triangulation_to_json(t) for (a, b), t in tris.items()},
           "generic": key is not None}
    return _json(out)


def _triangulation_svg(t, size: int = 400) -> str:
    d = max(p[0] + p[1] for p in t.points)
    s = size / d

    def xy(p):
        return f"{p[0] * s + 10:.1f},{size - p[1] * s + 10:.1f}"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 20}" height="{size + 20}">']
    for a, b in t.edges():
        (x1, y1), (x2, y2) = (xy(t.points[a]).split(","), xy(t.points[b]).split(","))
        parts.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black"/>')
    g = locus.face_graph(t) if t.generic else None
    if g is not None:
        for e in g.edges:
            pts = " ".join(xy(p) for p in e.path)
            parts.append(f'<polyline points="{pts}" fill="none" stroke="#c33"/>')
        for vi, mid, _ in g.legs:
            parts.append(f'<polyline points="{xy(g.vertices[vi].coords)} {xy(mid)}" fill="none" stroke="#c33"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _mirror_pipeline(w, w0=None):
    w_m0 = None
    if w0 is not None:
        # normalising the vertices adds a linear function, which keeps their mean
        verts = [w[lattice.delta_vertex(i).to_degree().exponents] for i in range(1, 6)]
        w_m0 = sum(verts) / 5 - w0
    kw = dualbase.kahler_weight(w, w_m0)
    if w0 is not None and not subdivision.is_convex_rel_skeleton(kw):
        raise ValueError(f"w0={w0} is too small: the shifted weight is not convex relative to the 2-skeleton")
    dw = dualbase.build_delta_w(kw, w0)
    dwd = dualbase.build_delta_w_dual(kw)
    gp = locus.mirror_locus(dw, dualbase.face_map_pi(dw))
    return kw, dw, dwd, gp


def cmd_locus(args) -> str:
    w, _ = _load_weights(args.weights)
    if args.side == "mirror":
        _, _, _, g = _mirror_pipeline(w, args.w0)
    else:
        g = locus.singular_locus(w)
    out = serialize.graph_to_json(g)
    out["counts"] = g.counts()
    return _json(out)


def cmd_dualbase(args) -> str:
    w, _ = _load_weights(args.weights)
    kw, dw, dwd, gp = _mirror_pipeline(w, args.w0)
    g = locus.singular_locus(w)
    s = dualbase.base_identification_s(dw, dwd)
    cert = dualbase.verify_locus_match(gp, g, s)
    out = serialize.polytope_to_json(dw.lattice, "M")
    out["facet_index"] = {f"facet_{j}": list(m) for j, m in dw.facet_index.items()}
    out["redundant"] = [list(m) for m in dw.redundant]
    out["w0"] = frac_str(dw.w0)
    out["match"] = {"ok": cert.ok, "vertices": len(cert.vertex_map), "edges": len(cert.edge_map),
                    "mismatch": cert.mismatch}
    if not cert.ok:
        raise ValueError(f"locus match failed: {cert.mismatch}")
    return _json(out)


def cmd_monodromy(args) -> str:
    if args.sites:
        w, _ = _load_weights(args.weights)
        g = locus.singular_locus(w)
        kinds = {"II": 0, "III": 0}
        for v in g.vertices:
            kinds[monodromy.vertex_triple(v).kind] += 1
        ops = monodromy.edge_operators(g)
        bad = [o for o in ops if o.det() != 1 or not o.unipotent()]
        if bad:
            raise ValueError(f"edge operator {bad[0].matrix.tolist()} is not a unipotent unimodular matrix")
        return _json({"sites": kinds, "edges": len(ops), "products_identity": True})
    op = monodromy.monodromy(args.n, args.m, args.n2, args.m2)
    if args.fmt == "json":
        return _json(op.to_json())
    return "\n".join(" ".join(f"{int(x):3d}" for x in row) for row in op.matrix) + "\n"


def cmd_euler(args) -> str:
    w, _ = _load_weights(args.weights)
    g = locus.singular_locus(w)
    s = fibers.assign_fibers(g, args.side)
    sites = s.sites()
    if args.fmt == "json":
        return _json(s.to_json())
    return f"chi={fibers.euler_characteristic(s)} (sites II={sites['II']} III={sites['III']})\n"


def cmd_amoeba(args) -> str:
    w, _ = _load_weights(args.weights)
    wf = _face_weight(w, tuple(sorted(args.face)))
    spec = amoeba.CurveSpec.from_weight(wf, args.t)
    n_mod, n_phase, n_roots = args.grid
    if n_roots != spec.degree:
        raise ValueError(f"grid asks for {n_roots} roots per slice but the curve has degree {spec.degree}")
    cloud = amoeba.sample_curve(spec, (n_mod, n_phase), seed=args.seed)
    segs = amoeba.graph_segments(wf)
    if args.fmt == "csv":
        return "".join(["x,y\n"] + [f"{x:.17g},{y:.17g}\n" for x, y in cloud.points])
    if args.fmt == "svg":
        return amoeba.to_svg(cloud, segs, degree=spec.degree)
    gd = amoeba.hausdorff_to_graph(cloud, segs, args.delta)
    return _json({"t": args.t, "points": len(cloud), "sup_distance": gd.sup, "segments": len(segs),
                  "covered": sum(gd.covered), "dense_covered": sum(gd.dense_covered),
                  "root_residual": cloud.residual, "limit_excess": amoeba.limit_region_excess(cloud, wf)})


def cmd_slice(args) -> str:
    if args.input:
        p = moduli.QuinticPolynomial.from_json(serialize.load_json(args.input))
    else:
        p = moduli.random_quintic(np.random.default_rng(args.seed), args.psi)
    try:
        r = moduli.reduce_to_slice(p, args.tol, args.max_iter)
    except moduli.SliceDivergence as exc:
        sys.stderr.write(_json({"diverged": str(exc), "history": exc.history}))
        raise
    out = r.p0.to_json()
    out["history"] = r.history
    out["steps"] = r.steps
    out["L"] = [[[repr(float(x.real)), repr(float(x.imag))] for x in row] for row in r.L.matrix]
    out["scale"] = [repr(float(r.scale.real)), repr(float(r.scale.imag))]
    return _json(out)


def cmd_mirrormap(args) -> str:
    w, phases = _load_weights(args.weights)
    p = moduli.monomial_divisor_map(phases, w)
    out = p.to_json()
    out["same_chamber"] = moduli.polynomial_chamber(p) == subdivision.chamber_key(w)
    return _json(out)


COMMANDS = {
    "points": cmd_points, "subdivide": cmd_subdivide, "locus": cmd_locus, "dualbase": cmd_dualbase,
    "monodromy": cmd_monodromy, "euler": cmd_euler, "amoeba": cmd_amoeba, "slice": cmd_slice,
    "mirrormap": cmd_mirrormap,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.fmt is None:
        args.fmt = "text" if args.command in ("euler", "monodromy") else "json"
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.out)
    except (serialize.InputError, OSError) as exc:
        sys.stderr.write(f"syzkit {args.command}: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"syzkit {args.command}: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
