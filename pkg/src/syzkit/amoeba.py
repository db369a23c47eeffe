"""Numerical images of plane curves under the weighted moment map.

A curve on one 2-face is p(x1, x2) = sum a_m x1^i x2^j over the lattice
triangle of degree d, with |a_m| = t^{w_m}.  Sampling x1 on a log-modulus x
phase grid and solving for x2 gives points of the curve; their images under
F(x) = sum |t^{w_m} x^m|^2 m / sum |t^{w_m} x^m|^2 should crowd around the
graph of the induced triangulation as t shrinks.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .locus import face_graph
from .subdivision import WeightFunction, regular_subdivision, triangle_degree

log = logging.getLogger(__name__)


class AmoebaError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    """Coefficients a_m = t^{w_m} exp(2 pi i eta_m) on the chart points of a lattice triangle."""

    points: tuple[tuple[int, int], ...]
    weights: np.ndarray
    t: float
    phases: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def from_weight(cls, w: WeightFunction, t: float, phases: Mapping | None = None) -> "CurveSpec":
        if not 0 < t < 1:
            raise AmoebaError(f"t must lie in (0, 1), got {t}")
        triangle_degree(w.points)
        pts = tuple(tuple(p) for p in w.points)
        wv = np.array([float(v) for v in w.values])
        eta = np.array([float((phases or {}).get(p, 0.0)) for p in pts])
        coef = np.exp(wv * math.log(t) + 2j * math.pi * eta)
        spec = cls(pts, wv, float(t), eta, coef)
        spec.check()
        return spec

    @property
    def degree(self) -> int:
        return max(i + j for i, j in self.points)

    def check(self, tol: float = 1e-12) -> None:
        want = np.exp(self.weights * math.log(self.t))
        if np.any(np.abs(np.abs(self.coefficients) - want) > tol * np.maximum(want, 1.0)):
            raise AmoebaError("coefficient moduli differ from t^w")

    def slice_coefficients(self, x1: np.ndarray) -> np.ndarray:
        """c[k, j] with p(x1[k], y) = sum_j c[k, j] y^j."""
        d = self.degree
        x1 = np.asarray(x1, dtype=complex)
        c = np.zeros((x1.size, d + 1), dtype=complex)
        for (i, j), a in zip(self.points, self.coefficients):
            c[:, j] += a * x1 ** i
        return c

    def evaluate(self, x1, x2) -> tuple[np.ndarray, np.ndarray]:
        """p(x1, x2) and the scale sum |a_m x^m| used for relative residuals."""
        x1, x2 = np.asarray(x1, dtype=complex), np.asarray(x2, dtype=complex)
        val = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        scale = np.zeros(val.shape)
        for (i, j), a in zip(self.points, self.coefficients):
            term = a * x1 ** i * x2 ** j
            val += term
            scale += np.abs(term)
        return val, scale


def _log_moment(log_r1: np.ndarray, log_r2: np.ndarray, pts, w, t: float) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    w = np.asarray(w, dtype=float)
    expo = 2.0 * (w[None, :] * math.log(t) + log_r1[:, None] * pts[None, :, 0] + log_r2[:, None] * pts[None, :, 1])
    expo -= expo.max(axis=1, keepdims=True)
    mu = np.exp(expo)
    mu /= mu.sum(axis=1, keepdims=True)
    return mu @ pts


def moment_map_2d(x, w: WeightFunction, t: float) -> tuple[float, float]:
    """F_{t^w}(x) for a point x = (x1, x2) of the torus chart."""
    x1, x2 = complex(x[0]), complex(x[1])
    if x1 == 0 or x2 == 0:
        raise AmoebaError("point is off the torus chart")
    out = _log_moment(np.array([math.log(abs(x1))]), np.array([math.log(abs(x2))]),
                      list(w.points), [float(v) for v in w.values], t)
    return float(out[0, 0]), float(out[0, 1])


@dataclass
class AmoebaCloud:
    points: np.ndarray
    meta: dict = field(default_factory=dict)
    residual: float = 0.0

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        rows = ["x,y"] + [f"{x:.17g},{y:.17g}" for x, y in self.points]
        return "\n".join(rows) + "\n"


def log_modulus_range(c: CurveSpec, margin: float | None = None) -> tuple[float, float]:
    """Range of log|x1| covering every vertex of the tropical curve, plus a margin.

    Vertices sit at the slopes of the lifting planes; the margin (in units of
    log 1/t) makes the neglected monomials smaller than 1e-3 at the ends.
    """
    w = WeightFunction(c.points, tuple(float(v) for v in c.weights))
    tri = regular_subdivision(_exact(w))
    slopes = [float(plane[0]) for plane in tri.certificates]
    if margin is None:
        margin = max(1.0, 3.0 / math.log10(1.0 / c.t))
    scale = math.log(1.0 / c.t)
    return (min(slopes) - margin) * scale, (max(slopes) + margin) * scale


def _exact(w: WeightFunction) -> WeightFunction:
    return WeightFunction(w.points, tuple(Fraction(v).limit_denominator(10 ** 9) for v in w.values))


def _batched_roots(c: np.ndarray) -> np.ndarray:
    """Roots of each row polynomial sum_j c[k, j] y^j via companion-matrix eigenvalues."""
    n, d1 = c.shape
    d = d1 - 1
    lead = c[:, d]
    comp = np.zeros((n, d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -c[:, :d] / lead[:, None]
    return np.linalg.eigvals(comp)


def _polish(c: np.ndarray, y: np.ndarray, steps: int = 3) -> np.ndarray:
    d = c.shape[1] - 1
    for _ in range(steps):
        p = np.zeros_like(y)
        dp = np.zeros_like(y)
        for j in range(d, -1, -1):
            dp = dp * y + p
            p = p * y + c[:, j:j + 1]
        ok = (np.abs(dp) > 0) & np.isfinite(dp)
        y = np.where(ok, y - np.where(ok, p / np.where(ok, dp, 1), 0), y)
    return y


def sample_curve(c: CurveSpec, grid: tuple[int, int], seed: int = 0,
                 log_range: tuple[float, float] | None = None) -> AmoebaCloud:
    """Points F(x1, x2) for x1 on a log-modulus x phase grid and every root x2."""
    n_mod, n_phase = grid
    meta = {"grid": [n_mod, n_phase], "seed": seed, "t": c.t}
    if n_mod == 0 or n_phase == 0:
        return AmoebaCloud(np.zeros((0, 2)), meta)
    lo, hi = log_range if log_range is not None else log_modulus_range(c)
    meta["log_range"] = [lo, hi]
    rng = np.random.default_rng(seed)
    # a seeded offset keeps the phase grid off the real axis, where positive coefficients have no roots
    offset = rng.uniform(0, 2 * math.pi / n_phase)
    radii = np.linspace(lo, hi, n_mod)
    phases = offset + 2 * math.pi * np.arange(n_phase) / n_phase
    logr1 = np.repeat(radii, n_phase)
    x1 = np.exp(logr1 + 1j * np.tile(phases, n_mod))

    coeffs = c.slice_coefficients(x1)
    mags = np.abs(coeffs)
    top = mags.max(axis=1)
    alive = top > 0
    if not np.all(alive):
        log.info("skipping %d identically-zero slices", int((~alive).sum()))
    coeffs, x1, logr1, mags, top = coeffs[alive], x1[alive], logr1[alive], mags[alive], top[alive]
    coeffs = coeffs / top[:, None]
    mags = mags / top[:, None]

    xs1, ys = [], []
    d = coeffs.shape[1] - 1
    while d >= 1 and len(coeffs):
        keep = mags[:, d] > 1e-300
        if np.any(~keep) and d == c.degree:
            log.info("leading coefficient underflow on %d slices; reducing degree", int((~keep).sum()))
        if np.any(keep):
            part = coeffs[keep, : d + 1]
            roots = _polish(part, _batched_roots(part))
            xs1.append(np.repeat(x1[keep], d))
            ys.append(roots.reshape(-1))
        coeffs, x1, mags = coeffs[~keep], x1[~keep], mags[~keep]
        d -= 1
    if not xs1:
        return AmoebaCloud(np.zeros((0, 2)), meta)
    xa = np.concatenate(xs1)
    ya = np.concatenate(ys)
    good = np.isfinite(ya) & (ya != 0)
    xa, ya = xa[good], ya[good]
    val, scale = c.evaluate(xa, ya)
    rel = np.abs(val) / np.where(scale > 0, scale, 1.0)
    pts = _log_moment(np.log(np.abs(xa)), np.log(np.abs(ya)), c.points, c.weights, c.t)
    meta["roots"] = int(len(ya))
    return AmoebaCloud(pts, meta, float(rel.max()) if len(rel) else 0.0)


def graph_segments(w: WeightFunction) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Straight pieces of the face graph: barycentre to edge midpoint, once per (cell, edge)."""
    g = face_graph(regular_subdivision(w))
    segs = []
    for e in g.edges:
        a, m, b = e.path
        segs += [(a, m), (m, b)]
    for vi, mid, _ in g.legs:
        segs.append((g.vertices[vi].coords, mid))
    return [(tuple(map(float, a)), tuple(map(float, b))) for a, b in segs]


def _dist_to_segments(p: np.ndarray, segs: np.ndarray, chunk: int = 20000) -> np.ndarray:
    """Distance matrix rows: each point against every segment (n, s)."""
    a = segs[:, 0, :]
    ab = segs[:, 1, :] - a
    ab2 = np.maximum((ab ** 2).sum(axis=1), 1e-300)
    out = np.empty((len(p), len(segs)))
    for k in range(0, len(p), chunk):
        q = p[k:k + chunk, None, :] - a[None, :, :]
        s = np.clip((q * ab[None]).sum(axis=2) / ab2[None], 0.0, 1.0)
        out[k:k + chunk] = np.sqrt(((q - s[..., None] * ab[None]) ** 2).sum(axis=2))
    return out


@dataclass
class GraphDistance:
    sup: float
    covered: list[bool]
    dense_covered: list[bool]

    @property
    def all_covered(self) -> bool:
        return all(self.covered)


def hausdorff_to_graph(cloud: AmoebaCloud, segments: Sequence, delta: float = 0.25) -> GraphDistance:
    """Sup of cloud-to-graph distance, plus per-segment coverage at radius delta.

    ``covered[k]``: some cloud point lies within delta of segment k.
    ``dense_covered[k]``: every sample of segment k (spacing delta/2) has a cloud point within delta.
    """
    if len(cloud) == 0:
        raise AmoebaError("empty cloud")
    segs = np.asarray(segments, dtype=float)
    dist = _dist_to_segments(cloud.points, segs)
    sup = float(dist.min(axis=1).max())
    covered = list(bool(x) for x in (dist.min(axis=0) <= delta))
    dense = []
    for a, b in segs:
        k = max(2, int(math.ceil(np.linalg.norm(b - a) / (delta / 2))) + 1)
        samples = a[None, :] + np.linspace(0, 1, k)[:, None] * (b - a)[None, :]
        ok = True
        for s in samples:
            if np.min(((cloud.points - s) ** 2).sum(axis=1)) > delta ** 2:
                ok = False
                break
        dense.append(ok)
    return GraphDistance(sup, covered, dense)


def to_svg(cloud: AmoebaCloud, segments: Sequence, size: int = 500, degree: int = 5) -> str:
    s = size / degree

    def xy(p):
        return f"{p[0] * s:.2f},{size - p[1] * s:.2f}"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             f'<polygon points="{xy((0, 0))} {xy((degree, 0))} {xy((0, degree))}" fill="none" stroke="#999"/>']
    step = max(1, len(cloud) // 20000)
    for p in cloud.points[::step]:
        parts.append(f'<circle cx="{p[0] * s:.2f}" cy="{size - p[1] * s:.2f}" r="0.6" fill="#36c"/>')
    for a, b in segments:
        parts.append(f'<line x1="{a[0] * s:.2f}" y1="{size - a[1] * s:.2f}" x2="{b[0] * s:.2f}" y2="{size - b[1] * s:.2f}" stroke="#c33"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def limit_region_excess(cloud: AmoebaCloud, w: WeightFunction) -> float:
    """How far the cloud pokes out of its t -> 0 limit.

    In a triangle with corners m1, m2, m3 the limit image is the set of
    barycentric points (r1^2, r2^2, r3^2) / sum where r1, r2, r3 are side
    lengths of a (possibly degenerate) triangle.  A point's excess is the worst
    triangle-inequality violation sqrt(b_i) - sqrt(b_j) - sqrt(b_k), minimised
    over the cells holding it; returns the maximum over the cloud.
    """
    if len(cloud) == 0:
        raise AmoebaError("empty cloud")
    tri = regular_subdivision(w)
    pts = cloud.points
    best = np.full(len(pts), np.inf)
    homog = np.vstack([pts.T, np.ones(len(pts))])
    for cell in tri.cells:
        corners = np.array([tri.points[i] for i in cell], dtype=float)
        bary = np.linalg.solve(np.vstack([corners.T, np.ones(3)]), homog)
        inside = (bary >= -1e-9).all(axis=0)
        sq = np.sqrt(np.clip(bary, 0.0, None))
        excess = np.maximum(np.max(2 * sq - sq.sum(axis=0), axis=0), 0.0)
        best = np.where(inside, np.minimum(best, excess), best)
    if np.any(np.isinf(best)):
        raise AmoebaError("cloud point outside the lattice triangle")
    return float(best.max())
