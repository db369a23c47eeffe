"""Quintic coefficient vectors, the slicing iteration and the monomial-divisor map.

Coefficient vectors are indexed by the 126 degree-5 exponents in lexicographic
order.  The slice consists of quintics supported on the 2-skeleton plus the
centre monomial; the 20 off-slice exponents are exactly m0 - e_j + e_k, j != k.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .lattice import M0, enumerate_delta_points, parse_frac
from .subdivision import (ConvexityError, WeightFunction, _check_skeleton_domain, chamber_key,
                          global_subdivision, skeleton_keys)


class ModuliError(ValueError):
    pass


class SliceDivergence(ModuliError):
    def __init__(self, msg: str, last: "QuinticPolynomial", history: list[float]):
        super().__init__(msg)
        self.last = last
        self.history = history


# ---- monomial bookkeeping -------------------------------------------------------

@lru_cache(maxsize=None)
def _monomials(deg: int) -> tuple[tuple[int, ...], ...]:
    if deg == 5:
        return tuple(m.exponents for m in enumerate_delta_points())
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for a in range(left, -1, -1):
            rec(prefix + (a,), left - a, slots - 1)

    rec((), deg, 5)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _index(deg: int) -> dict:
    return {m: i for i, m in enumerate(_monomials(deg))}


@lru_cache(maxsize=None)
def _times_variable(deg: int) -> np.ndarray:
    """table[u, k] = index of monomial u * z_k in degree deg + 1."""
    nxt = _index(deg + 1)
    mons = _monomials(deg)
    tab = np.empty((len(mons), 5), dtype=np.int64)
    for u, m in enumerate(mons):
        for k in range(5):
            tab[u, k] = nxt[tuple(m[i] + (i == k) for i in range(5))]
    return tab


MONOMIALS = _monomials(5)
INDEX = _index(5)
CENTER = INDEX[M0]
OFF_SLICE = tuple(i for i, m in enumerate(MONOMIALS) if m != M0 and sum(e == 0 for e in m) < 2)
SKELETON = tuple(i for i, m in enumerate(MONOMIALS) if sum(e == 0 for e in m) >= 2)


def off_slice_exponent(j: int, k: int) -> tuple[int, ...]:
    """m0 - e_j + e_k (0-based, j != k)."""
    if j == k:
        raise ModuliError("j and k must differ")
    return tuple(1 - (i == j) + (i == k) for i in range(5))


# ---- polynomials ---------------------------------------------------------------

@dataclass(frozen=True)
class QuinticPolynomial:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (len(MONOMIALS),):
            raise ModuliError(f"need {len(MONOMIALS)} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ModuliError("non-finite coefficient")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "QuinticPolynomial":
        c = np.zeros(len(MONOMIALS), dtype=complex)
        for m, a in mapping.items():
            m = tuple(int(x) for x in m)
            if m not in INDEX:
                raise ModuliError(f"{m} is not a degree-5 exponent")
            c[INDEX[m]] = a
        return cls(c)

    @property
    def psi(self) -> complex:
        return complex(self.coeffs[CENTER])

    def __getitem__(self, m) -> complex:
        return complex(self.coeffs[INDEX[tuple(m)]])

    def off_slice_norm(self) -> float:
        return float(np.max(np.abs(self.coeffs[list(OFF_SLICE)])))

    def on_slice(self, tol: float = 0.0) -> bool:
        return self.off_slice_norm() <= tol

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """p at each row of z (shape (k, 5))."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        mons = np.array(MONOMIALS)
        vals = np.prod(z[:, None, :] ** mons[None, :, :], axis=2)
        return vals @ self.coeffs

    def permuted(self, perm: Sequence[int]) -> "QuinticPolynomial":
        """The S5 action z_i -> z_{perm[i]}."""
        c = np.zeros_like(self.coeffs)
        for i, m in enumerate(MONOMIALS):
            c[INDEX[tuple(m[perm.index(k)] for k in range(5))]] = self.coeffs[i]
        return QuinticPolynomial(c)

    def to_json(self) -> dict:
        return {"coeffs": {",".join(map(str, m)): [repr(float(a.real)), repr(float(a.imag))]
                           for m, a in zip(MONOMIALS, self.coeffs) if a != 0}}

    @classmethod
    def from_json(cls, data: Mapping) -> "QuinticPolynomial":
        out = {}
        for key, (re, im) in data["coeffs"].items():
            out[tuple(int(x) for x in key.split(","))] = complex(float(re), float(im))
        return cls.from_mapping(out)


@dataclass(frozen=True)
class LinearChange:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.shape != (5, 5):
            raise ModuliError("linear change must be 5x5")
        object.__setattr__(self, "matrix", a)

    @classmethod
    def identity(cls) -> "LinearChange":
        return cls(np.eye(5))

    def __matmul__(self, other: "LinearChange") -> "LinearChange":
        return LinearChange(self.matrix @ other.matrix)


def substitution_matrix(L: LinearChange) -> np.ndarray:
    """S with coeffs(p o L) = S @ coeffs(p): column m holds the expansion of (Lz)^m."""
    a = L.matrix
    if abs(np.linalg.det(a)) < 1e-14 * max(1.0, np.abs(a).max()) ** 5:
        raise ModuliError("linear change is singular")
    # powers[d][u] = expansion of (Lz)^u for u of degree d, as a vector over degree-d monomials
    powers = {0: np.ones((1, 1), dtype=complex)}
    for d in range(1, 6):
        prev = powers[d - 1]
        tab = _times_variable(d - 1)
        mons = _monomials(d)
        idx_prev = _index(d - 1)
        cur = np.zeros((len(mons), len(mons)), dtype=complex)
        for u, m in enumerate(mons):
            j = next(i for i in range(5) if m[i])
            base = prev[idx_prev[tuple(m[i] - (i == j) for i in range(5))]]
            # multiply by the linear form (Lz)_j = sum_k a[j, k] z_k
            vec = np.zeros(len(mons), dtype=complex)
            for k in range(5):
                np.add.at(vec, tab[:, k], base * a[j, k])
            cur[u] = vec
        powers[d] = cur
    return powers[5].T


def apply_linear_change(p: QuinticPolynomial, L: LinearChange) -> QuinticPolynomial:
    """Coefficients of z -> p(Lz)."""
    return QuinticPolynomial(substitution_matrix(L) @ p.coeffs)


# ---- slicing ---------------------------------------------------------------------

def slice_step(p: QuinticPolynomial) -> tuple[LinearChange, QuinticPolynomial, complex]:
    """One step z -> (I - B/psi) z with b_jk = a_{m0 - e_j + e_k}.

    Returns (L, p', c) with p o L = c * p' and p' having the same psi as p.
    """
    psi = p.psi
    if psi == 0:
        raise ModuliError("psi = 0: the centre coefficient must be non-zero")
    b = np.zeros((5, 5), dtype=complex)
    for j in range(5):
        for k in range(5):
            if j != k:
                b[j, k] = p[off_slice_exponent(j, k)]
    if not np.any(b):
        return LinearChange.identity(), p, 1.0
    L = LinearChange(np.eye(5) - b / psi)
    q = apply_linear_change(p, L)
    c = q.psi / psi
    if c == 0:
        raise ModuliError("centre coefficient vanished after the step")
    return L, QuinticPolynomial(q.coeffs / c), c


@dataclass
class SliceResult:
    L: LinearChange
    p0: QuinticPolynomial
    history: list[float]
    scale: complex = 1.0
    steps: int = 0

    def consistency(self, p: QuinticPolynomial, z: np.ndarray) -> float:
        """max |p(L z) - scale * p0(z)| over the rows of z."""
        lz = np.atleast_2d(z) @ self.L.matrix.T
        return float(np.max(np.abs(p.evaluate(lz) - self.scale * self.p0.evaluate(z))))


def reduce_to_slice(p: QuinticPolynomial, tol: float = 1e-12, max_iter: int = 40,
                    psi_min: float | None = None) -> SliceResult:
    """Iterate slice_step until the off-slice sup-norm drops below tol.

    Divergence (the residual rising twice, or a non-finite iterate) raises
    SliceDivergence carrying the last iterate and the residual history.
    """
    if p.psi == 0:
        raise ModuliError("psi = 0")
    if psi_min is not None:
        others = np.abs(np.delete(p.coeffs, CENTER)).max()
        if abs(p.psi) < psi_min * max(others, 1e-300):
            raise ModuliError(f"|psi| = {abs(p.psi):.3g} is below the threshold {psi_min} x coefficient scale")
    L = LinearChange.identity()
    scale = 1.0 + 0j
    cur = p
    history = [cur.off_slice_norm()]
    rises = 0
    steps = 0
    while history[-1] >= tol and steps < max_iter:
        try:
            step, nxt, c = slice_step(cur)
        except ModuliError as exc:
            raise SliceDivergence(str(exc), cur, history) from exc
        L = L @ step
        scale *= c
        cur = nxt
        steps += 1
        history.append(cur.off_slice_norm())
        if not math.isfinite(history[-1]):
            raise SliceDivergence("iterate overflowed", cur, history)
        if history[-1] > history[-2]:
            rises += 1
            if rises >= 2:
                raise SliceDivergence(f"off-slice residual rose twice (now {history[-1]:.3g})", cur, history)
    if history[-1] >= tol:
        raise SliceDivergence(f"no convergence in {max_iter} steps (residual {history[-1]:.3g})", cur, history)
    return SliceResult(L, cur, history, scale, steps)


def random_quintic(rng: np.random.Generator, psi: complex = 10.0, off_scale: float = 1.0) -> QuinticPolynomial:
    """Unit-scale random coefficients on the skeleton, off-slice perturbation of size off_scale."""
    c = np.exp(2j * math.pi * rng.random(len(MONOMIALS))) * rng.uniform(0.5, 1.0, len(MONOMIALS))
    c[list(OFF_SLICE)] *= off_scale
    c[CENTER] = psi
    return QuinticPolynomial(c)


def convergence_rate(history: Sequence[float]) -> float:
    """Least-squares slope of log(residual) against step number."""
    ys = [math.log(h) for h in history if h > 0]
    if len(ys) < 2:
        raise ModuliError("need two positive residuals")
    xs = list(range(len(ys)))
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


# ---- mirror map ----------------------------------------------------------------------

def monomial_divisor_map(eta: Mapping | None, w: WeightFunction) -> QuinticPolynomial:
    """a_m = exp(2 pi i eta_m) exp(-2 pi w_m) on the skeleton, a_{m0} = 1."""
    _check_skeleton_domain(w)
    try:
        global_subdivision(w)  # per-face convexity; a low enough w_m0 then puts w - w_m0 in the cone
    except ConvexityError as exc:
        raise ModuliError(f"weight is outside the cone: {exc}") from exc
    eta = eta or {}
    c = np.zeros(len(MONOMIALS), dtype=complex)
    for p, v in zip(w.points, w.values):
        phase = float(parse_frac(eta.get(p, 0)))
        c[INDEX[p]] = cmath.exp(2j * math.pi * phase) * math.exp(-2 * math.pi * float(v))
    c[CENTER] = 1.0
    return QuinticPolynomial(c)


def weight_of_polynomial(p: QuinticPolynomial) -> WeightFunction:
    """-log|a_m| / 2 pi on the skeleton, as exact binary rationals of the float values."""
    vals = {}
    for m in skeleton_keys():
        a = abs(p[m])
        if a == 0:
            raise ModuliError(f"coefficient at {m} vanishes; no weight")
        vals[m] = Fraction(-math.log(a) / (2 * math.pi))
    return WeightFunction.from_mapping(vals)


def polynomial_chamber(p: QuinticPolynomial) -> frozenset:
    return chamber_key(weight_of_polynomial(p))
