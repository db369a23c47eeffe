"""The lattices M and N of the quintic, the simplex Delta and its dual.

M-points are exponent vectors.  They live either in *degree* form (entries sum
to 5, a monomial of the quintic) or in *reduced* form (the centre m0 subtracted,
entries sum to 0).  N = Z^5 / Z(1,1,1,1,1); its canonical representative has
fifth coordinate 0.  Polytope computations use the first four coordinates of
both, which makes the pairing an ordinary dot product.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .polytope import FaceLattice

DEGREE = 5
M0 = (1, 1, 1, 1, 1)


class LatticeError(ValueError):
    pass


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float):
        raise LatticeError(f"refusing float {s!r}; give an exact rational")
    return Fraction(str(s).strip())


@dataclass(frozen=True, order=True)
class MPoint:
    exponents: tuple[int, ...]
    reduced: bool = False

    def __post_init__(self):
        if len(self.exponents) != 5 or not all(isinstance(e, (int, np.integer)) for e in self.exponents):
            raise LatticeError(f"M-point needs 5 integers, got {self.exponents!r}")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        want = 0 if self.reduced else DEGREE
        if sum(self.exponents) != want:
            form = "reduced" if self.reduced else "degree"
            raise LatticeError(f"{form}-form M-point must sum to {want}: {self.exponents}")

    def to_reduced(self) -> "MPoint":
        if self.reduced:
            return self
        return MPoint(tuple(a - b for a, b in zip(self.exponents, M0)), reduced=True)

    def to_degree(self) -> "MPoint":
        if not self.reduced:
            return self
        return MPoint(tuple(a + b for a, b in zip(self.exponents, M0)), reduced=False)

    def coords4(self) -> tuple[int, ...]:
        """First four reduced coordinates (a basis of the sum-zero lattice)."""
        return self.to_reduced().exponents[:4]


@dataclass(frozen=True, order=True)
class NPoint:
    coords: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coords)
        if len(c) != 5:
            raise LatticeError(f"N-point needs 5 integers, got {self.coords!r}")
        object.__setattr__(self, "coords", tuple(x - c[4] for x in c))

    @classmethod
    def basis_vector(cls, i: int) -> "NPoint":
        """The class [e^i], 1-based."""
        return cls(tuple(1 if j == i - 1 else 0 for j in range(5)))

    def __add__(self, other: "NPoint") -> "NPoint":
        return NPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "NPoint":
        return NPoint(tuple(-a for a in self.coords))

    def scale(self, k: int) -> "NPoint":
        return NPoint(tuple(k * a for a in self.coords))

    def coords4(self) -> tuple[int, ...]:
        return self.coords[:4]


def m_from4(x: Sequence) -> tuple:
    """Reduced 5-tuple from the first four coordinates."""
    return tuple(x) + (-sum(x),)


def n_from4(x: Sequence) -> tuple:
    return tuple(x) + (0,)


def pairing(m: MPoint, n: NPoint) -> int:
    if not m.reduced:
        raise LatticeError("pairing needs a reduced-form M-point; degree form depends on the N representative")
    return sum(a * b for a, b in zip(m.exponents, n.coords))


@lru_cache(maxsize=None)
def _delta_tuples() -> tuple[tuple[int, ...], ...]:
    out = []
    for bars in combinations(range(DEGREE + 4), 4):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(DEGREE + 4 - prev - 1)
        out.append(tuple(parts))
    return tuple(sorted(out))


def enumerate_delta_points() -> list[MPoint]:
    """All degree-5 exponent vectors, lexicographically sorted."""
    return [MPoint(t) for t in _delta_tuples()]


def two_skeleton_points() -> list[MPoint]:
    """Points of Delta on some 2-face (two or more zero exponents)."""
    return [MPoint(t) for t in _delta_tuples() if t.count(0) >= 2]


def minimal_face_zeros(m: MPoint) -> frozenset[int]:
    """Zero-index set (0-based) cutting out the smallest face of Delta holding m."""
    return frozenset(i for i, e in enumerate(m.to_degree().exponents) if e == 0)


def delta_vertex(i: int) -> MPoint:
    """m^i = 5 e_i - m0, reduced form, 1-based."""
    return MPoint(tuple(5 * (j == i - 1) - 1 for j in range(5)), reduced=True)


@lru_cache(maxsize=None)
def dual_simplex() -> tuple[FaceLattice, FaceLattice]:
    """(Delta, Delta^dual) in four-coordinate charts, each hulled independently."""
    delta = FaceLattice.from_vertices([delta_vertex(i).coords4() for i in range(1, 6)])
    dual = FaceLattice.from_vertices([NPoint.basis_vector(i).coords4() for i in range(1, 6)])
    return delta, dual


# ---- integer linear algebra -------------------------------------------------

def smith_normal_form(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (D, U, V) with U A V = D diagonal, divisibility chain, U, V unimodular.

    Entries are Python integers (object arrays) so nothing overflows.
    """
    a = np.array(a, dtype=object)
    if a.ndim != 2:
        raise LatticeError("matrix must be two-dimensional")
    for x in a.flat:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise LatticeError(f"non-integer entry {x}")
        elif not isinstance(x, (int, np.integer)) or isinstance(x, bool):
            if not (isinstance(x, float) and x.is_integer()):
                raise LatticeError(f"non-integer entry {x!r}")
    d = np.array([[int(x) for x in row] for row in a], dtype=object).reshape(a.shape)
    rows, cols = d.shape
    u = np.array([[int(i == j) for j in range(rows)] for i in range(rows)], dtype=object).reshape(rows, rows)
    v = np.array([[int(i == j) for j in range(cols)] for i in range(cols)], dtype=object).reshape(cols, cols)

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(d[i, j]), i, j) for i in range(t, rows) for j in range(t, cols) if d[i, j] != 0]
            if not nz:
                return d, u, v
            _, pi, pj = min(nz)
            d[[t, pi], :] = d[[pi, t], :]
            u[[t, pi], :] = u[[pi, t], :]
            d[:, [t, pj]] = d[:, [pj, t]]
            v[:, [t, pj]] = v[:, [pj, t]]
            p = d[t, t]
            dirty = False
            for i in range(t + 1, rows):
                q = d[i, t] // p
                if q:
                    d[i, :] -= q * d[t, :]
                    u[i, :] -= q * u[t, :]
                dirty |= d[i, t] != 0
            for j in range(t + 1, cols):
                q = d[t, j] // p
                if q:
                    d[:, j] -= q * d[:, t]
                    v[:, j] -= q * v[:, t]
                dirty |= d[t, j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i, j] % p), None)
            if bad is None:
                break
            d[t, :] += d[bad[0], :]
            u[t, :] += u[bad[0], :]
        if d[t, t] < 0:
            d[t, :] = -d[t, :]
            u[t, :] = -u[t, :]
    return d, u, v


def smith_quotient(a) -> list[int]:
    """Elementary divisors of the cokernel Z^rows / A Z^cols (zeros for free rank)."""
    d, _, _ = smith_normal_form(a)
    rows, cols = d.shape
    return [int(d[i, i]) if i < cols else 0 for i in range(rows)]


def quotient_map_matrix() -> list[list[int]]:
    """Columns: images of the basis [e^1..e^4] of N under n^i -> m^i, in M's four-coordinate basis."""
    cols = [delta_vertex(i).coords4() for i in range(1, 5)]
    return [[cols[j][i] for j in range(4)] for i in range(4)]


# ---- face charts ------------------------------------------------------------

def two_faces() -> list[tuple[int, int]]:
    """The ten 2-faces, named by the 0-based pair of vanishing exponents."""
    return list(combinations(range(5), 2))


@dataclass(frozen=True)
class FaceChart2D:
    zeros: tuple[int, int]

    def __post_init__(self):
        z = tuple(sorted(self.zeros))
        if len(z) != 2 or len(set(z)) != 2 or not all(0 <= i < 5 for i in z):
            raise LatticeError(f"not a 2-face: {self.zeros!r}")
        object.__setattr__(self, "zeros", z)

    @property
    def free(self) -> tuple[int, int, int]:
        return tuple(i for i in range(5) if i not in self.zeros)

    def to_chart(self, m: MPoint):
        e = m.to_degree().exponents
        if any(e[i] != 0 for i in self.zeros):
            raise LatticeError(f"{e} is not on the face with zeros {self.zeros}")
        a, b, _ = self.free
        return (e[a], e[b])

    def from_chart(self, p) -> tuple:
        """Degree-form exponents (possibly rational) of a chart point."""
        a, b, c = self.free
        out = [Fraction(0)] * 5
        out[a], out[b] = Fraction(p[0]), Fraction(p[1])
        out[c] = DEGREE - out[a] - out[b]
        return tuple(out)

    def from_chart_reduced(self, p) -> tuple:
        return tuple(x - 1 for x in self.from_chart(p))

    def lattice_point(self, p) -> MPoint:
        return MPoint(tuple(int(x) for x in self.from_chart(p)))

    def linear_part_det(self) -> int:
        # chart is a coordinate projection restricted to the face plane; its inverse has
        # columns e_a - e_c, e_b - e_c; the 2x2 minor on (a, b) is the identity
        a, b, c = self.free
        cols = [[int(i == a) - int(i == c) for i in range(5)], [int(i == b) - int(i == c) for i in range(5)]]
        minor = [[cols[0][a], cols[1][a]], [cols[0][b], cols[1][b]]]
        return minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0]

    def points(self) -> list[MPoint]:
        return [m for m in two_skeleton_points() if all(m.exponents[i] == 0 for i in self.zeros)]


def face_chart(zeros: Sequence[int]) -> FaceChart2D:
    return FaceChart2D(tuple(zeros))


def standard_triangle(d: int = DEGREE) -> list[tuple[int, int]]:
    return [(i, j) for i in range(d + 1) for j in range(d + 1 - i)]
