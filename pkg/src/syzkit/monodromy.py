"""Fiber lattices over the base, transfer maps and monodromy operators.

Over the interior of the facet cut out by a vertex n of the dual simplex the
fiber lattice is N/Zn; over the region around a lattice point m it is m-perp.
Passing from the first to the second lifts x to x + <m,x> n.  Composing these
around a loop gives an integral operator on N/Zn written in a fixed basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .lattice import MPoint, NPoint, m_from4, n_from4, pairing, smith_normal_form, smith_quotient
from .locus import II, III, LocusVertex


class MonodromyError(ValueError):
    pass


def _vertex_index(n: NPoint) -> int:
    for i in range(1, 6):
        if n == NPoint.basis_vector(i):
            return i
    raise MonodromyError(f"{n.coords} is not a vertex of the dual simplex")


def standard_basis(n: NPoint) -> tuple[NPoint, NPoint, NPoint]:
    """Classes [e^j] for the three smallest j other than the index of n."""
    i = _vertex_index(n)
    js = [j for j in range(1, 6) if j != i][:3]
    return tuple(NPoint.basis_vector(j) for j in js)


def basis_is_unimodular(n: NPoint) -> bool:
    """The basis together with n spans N: Smith form of the 4x4 matrix is all ones."""
    cols = [b.coords4() for b in standard_basis(n)] + [n.coords4()]
    return smith_quotient([[c[r] for c in cols] for r in range(4)]) == [1, 1, 1, 1]


def _kernel_basis(row: Sequence[int]) -> list[tuple[int, ...]]:
    """Lattice basis of {x in Z^4 : row . x = 0}."""
    d, _, v = smith_normal_form([list(row)])
    r = 1 if any(d[0, j] for j in range(4)) else 0
    return [tuple(int(v[i, j]) for i in range(4)) for j in range(r, 4)]


def _complement_basis(vec: Sequence[int]) -> list[tuple[int, ...]]:
    """Three vectors completing a primitive vec to a basis of Z^4."""
    d, u, _ = smith_normal_form([[x] for x in vec])
    if abs(int(d[0, 0])) != 1:
        raise MonodromyError(f"{tuple(vec)} is not primitive")
    # U vec = +-e1, so the columns of U^{-1} are vec (up to sign) followed by a completion
    uinv = _unimodular_inverse([[int(x) for x in row] for row in u])
    return [tuple(uinv[i][j] for i in range(4)) for j in range(1, 4)]


def _unimodular_inverse(a: list[list[int]]) -> list[list[int]]:
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    out = [[x for x in row[n:]] for row in aug]
    if any(x.denominator != 1 for row in out for x in row):
        raise MonodromyError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


@dataclass(frozen=True)
class FiberLattice:
    """A rank-3 lattice attached to a base region, with a declared basis.

    ``kind`` is one of "N/n" (over the facet of a vertex n), "m-perp" (over the
    region of a lattice point m), and their mirror analogues "n-perp" (inside M)
    and "M/m".  Elements are N- or M-points; ``coordinates`` reads off a class in
    the declared basis.  ``phase`` optionally records a torsor shift.
    """

    kind: str
    anchor: object
    basis: tuple
    phase: tuple | None = None

    @classmethod
    def over_vertex(cls, n) -> "FiberLattice":
        n = _as_n(n)
        return cls("N/n", n, standard_basis(n))

    @classmethod
    def over_point(cls, m) -> "FiberLattice":
        m = _as_m(m)
        return cls("m-perp", m, tuple(NPoint(n_from4(v)) for v in _kernel_basis(m.coords4())))

    @classmethod
    def mirror_over_vertex(cls, n) -> "FiberLattice":
        n = _as_n(n)
        return cls("n-perp", n, tuple(MPoint(m_from4(v), reduced=True) for v in _kernel_basis(n.coords4())))

    @classmethod
    def mirror_over_point(cls, m) -> "FiberLattice":
        m = _as_m(m)
        g = _gcd(m.coords4())
        prim = tuple(x // g for x in m.coords4())
        return cls("M/m", m, tuple(MPoint(m_from4(v), reduced=True) for v in _complement_basis(prim)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def _vectors4(self) -> list[tuple[int, ...]]:
        vs = [b.coords4() for b in self.basis]
        if self.kind == "N/n":
            vs.append(self.anchor.coords4())
        elif self.kind == "M/m":
            g = _gcd(self.anchor.coords4())
            vs.append(tuple(x // g for x in self.anchor.coords4()))
        return vs

    def is_lattice_basis(self) -> bool:
        """Smith check: quotient lattices need basis + anchor to span Z^4; sublattices need saturation."""
        vs = self._vectors4()
        mat = [[v[r] for v in vs] for r in range(4)]
        divs = smith_quotient(mat)
        if self.kind in ("N/n", "M/m"):
            return divs == [1, 1, 1, 1]
        return divs[:3] == [1, 1, 1]

    def coordinates(self, x) -> list[int]:
        if self.kind == "N/n":
            return coordinates(_as_n(x), self.anchor)
        vs = self._vectors4()
        target = x.coords4() if hasattr(x, "coords4") else tuple(x)[:4]
        cols = [[Fraction(v[r]) for v in vs] + [Fraction(target[r])] for r in range(4)]
        sol = _solve_overdetermined(cols, len(vs))
        if sol is None or any(c.denominator != 1 for c in sol):
            raise MonodromyError(f"{target} is not in the lattice")
        return [int(c) for c in sol[:3]]


def _gcd(v) -> int:
    from math import gcd
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g or 1


def _solve_overdetermined(aug: list[list[Fraction]], k: int) -> list[Fraction] | None:
    rows = [r[:] for r in aug]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[k] != 0 for row in rows[r:]):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][k]
    return sol


def _as_m(m) -> MPoint:
    if isinstance(m, MPoint):
        return m.to_reduced()
    return MPoint(tuple(m)).to_reduced()


def _as_n(n) -> NPoint:
    if isinstance(n, NPoint):
        return n
    if isinstance(n, int):
        return NPoint.basis_vector(n)
    return NPoint(tuple(n))


def path_valid(n, m, n2, m2) -> bool:
    n, n2, m, m2 = _as_n(n), _as_n(n2), _as_m(m), _as_m(m2)
    return all(pairing(a, b) == -1 for a in (m, m2) for b in (n, n2))


def transfer(x: NPoint, m, n) -> NPoint:
    """Lift the class of x in N/Zn into m-perp: x + <m,x> n."""
    m, n = _as_m(m), _as_n(n)
    if pairing(m, n) != -1:
        raise MonodromyError(f"<m,n> = {pairing(m, n)}, transfer needs -1")
    return x + n.scale(pairing(m, x))


def transport(seq: Sequence, x: NPoint) -> NPoint:
    """Carry x around a closed chain n0, m1, n1, m2, ..., n0 (no final reduction)."""
    if len(seq) < 3 or len(seq) % 2 == 0:
        raise MonodromyError("chain must alternate n, m, ..., n")
    if _as_n(seq[0]) != _as_n(seq[-1]):
        raise MonodromyError("chain is not closed")
    for k in range(1, len(seq), 2):
        n_prev, m, n_next = _as_n(seq[k - 1]), _as_m(seq[k]), _as_n(seq[k + 1])
        if pairing(m, n_next) != -1:
            raise MonodromyError(f"<m,n'> = {pairing(m, n_next)} along the chain")
        x = transfer(x, m, n_prev)
    return x


def coordinates(x: NPoint, n: NPoint) -> list[int]:
    """Coordinates of [x] in N/Zn with respect to standard_basis(n)."""
    i = _vertex_index(n)
    js = [j for j in range(1, 6) if j != i]
    c = list(x.coords)
    # kill e^i, then the last remaining index using sum_{k != i} e^k = 0 in N/Zn
    c = [c[k] - (c[i - 1] if k == i - 1 else 0) for k in range(5)]
    last = js[3] - 1
    c = [c[k] - c[last] if k != i - 1 else 0 for k in range(5)]
    return [c[j - 1] for j in js[:3]]


def chain_matrix(seq: Sequence) -> np.ndarray:
    """Monodromy of a closed chain as a 3x3 integer matrix on N/Z n0."""
    n = _as_n(seq[0])
    cols = [coordinates(transport(seq, b), n) for b in standard_basis(n)]
    return np.array(cols, dtype=np.int64).T


@dataclass(frozen=True)
class MonodromyOperator:
    matrix: np.ndarray
    base: NPoint
    path: tuple
    dual: bool = False

    def det(self) -> int:
        return _det3(self.matrix)

    def to_json(self) -> dict:
        lat = FiberLattice.over_vertex(self.base)
        basis = [list(b.coords) for b in lat.basis]
        out = {"basis": basis, "matrix": [[int(x) for x in row] for row in self.matrix]}
        if self.path:
            n, m, n2, m2 = self.path
            out["path"] = {"n": _vertex_index(n), "m": list(m.to_degree().exponents),
                           "n2": _vertex_index(n2), "m2": list(m2.to_degree().exponents)}
        if self.dual:
            out["dual"] = True
        return out

    def unipotent(self) -> bool:
        d = self.matrix - np.eye(3, dtype=np.int64)
        return not np.any(d @ d)


def _det3(a) -> int:
    a = [[int(x) for x in row] for row in a]
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def monodromy(n, m, n2, m2) -> MonodromyOperator:
    """[x] -> [x] + <m2 - m, x>[n2] on N/Zn, by composing the four transfers."""
    if not path_valid(n, m, n2, m2):
        raise MonodromyError("invalid path: all four pairings must be -1")
    n, n2 = _as_n(n), _as_n(n2)
    mat = chain_matrix([n, m, n2, m2, n])
    return MonodromyOperator(mat, n, (n, _as_m(m), n2, _as_m(m2)))


def closed_formula(n, m, n2, m2) -> np.ndarray:
    """The same operator from the closed formula (independent route)."""
    n, n2, m, m2 = _as_n(n), _as_n(n2), _as_m(m), _as_m(m2)
    d = MPoint(tuple(a - b for a, b in zip(m2.exponents, m.exponents)), reduced=True)
    cols = []
    for b in standard_basis(n):
        img = b + n2.scale(pairing(d, b))
        cols.append(coordinates(img, n))
    return np.array(cols, dtype=np.int64).T


# ---- sites -------------------------------------------------------------------------

def site_loops(site: LocusVertex) -> list[list]:
    """Three closed chains around the legs of a site, oriented consistently.

    II-site on the face cut by n, n' (n < n'): loops (n, a, n', b) over the
    counterclockwise edges (a, b) of the triangle.  III-site on a unit segment
    [m, m'] of the Delta-edge with facets a < b < c: loops around the legs in the
    faces ab, bc, ca, all based at a.
    """
    if site.kind == II:
        _, zeros, ring = site.host
        n, n2 = zeros[0] + 1, zeros[1] + 1
        a, b, c = ring
        return [[n, x, n2, y, n] for x, y in ((a, b), (b, c), (c, a))]
    if site.kind == III:
        _, zeros, seg = site.host
        a, b, c = (z + 1 for z in zeros)
        m, m2 = seg
        return [[a, m, b, m2, a], [a, m, b, m, c, m2, b, m, a], [a, m2, c, m, a]]
    raise MonodromyError(f"unknown site kind {site.kind!r}")


def classify(ops: Sequence[np.ndarray]) -> str:
    """II when all T - I share an image line, III when they share a kernel plane.

    Both notions are basis independent: conjugation moves image and kernel along.
    """
    ds = [np.asarray(t, dtype=np.int64) - np.eye(3, dtype=np.int64) for t in ops]
    if any(np.linalg.matrix_rank(d.astype(float)) != 1 for d in ds):
        raise MonodromyError("an operator is not a transvection")
    stacked_cols = np.hstack(ds)
    stacked_rows = np.vstack(ds)
    same_image = np.linalg.matrix_rank(stacked_cols.astype(float)) == 1
    same_kernel = np.linalg.matrix_rank(stacked_rows.astype(float)) == 1
    if same_image and not same_kernel:
        return II
    if same_kernel and not same_image:
        return III
    raise MonodromyError("operators share neither a unique image nor a unique kernel")


@dataclass(frozen=True)
class VertexTriple:
    operators: tuple[np.ndarray, np.ndarray, np.ndarray]
    kind: str
    base: int


def vertex_triple(site: LocusVertex, loops: Sequence[Sequence] | None = None) -> VertexTriple:
    loops = site_loops(site) if loops is None else loops
    ops = tuple(chain_matrix(l) for l in loops)
    prod = ops[0] @ ops[1] @ ops[2]
    if not np.array_equal(prod, np.eye(3, dtype=np.int64)):
        raise MonodromyError(f"leg loops multiply to {prod.tolist()}, not the identity")
    return VertexTriple(ops, classify(ops), _vertex_index(_as_n(loops[0][0])))


def edge_operators(graph) -> list[MonodromyOperator]:
    """One loop per edge of Gamma: around the unit segment the edge crosses."""
    out = []
    for e in graph.edges:
        z, seg = e.hosts
        out.append(monodromy(z[0] + 1, seg[0], z[1] + 1, seg[1]))
    return out


# ---- duality -----------------------------------------------------------------------

def integer_inverse(t: np.ndarray) -> np.ndarray:
    a = [[int(x) for x in row] for row in t]
    det = _det3(a)
    if abs(det) != 1:
        raise MonodromyError(f"determinant {det}; not unimodular")
    adj = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[a[r][c] for c in range(3) if c != j] for r in range(3) if r != i]
            adj[j][i] = (-1) ** (i + j) * (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0])
    return np.array(adj, dtype=np.int64) * det


def dual_monodromy(t):
    """Contragredient (T^T)^{-1}: preserves the pairing between the lattice and its dual.

    Returns an operator when given one, a bare matrix otherwise.
    """
    if isinstance(t, MonodromyOperator):
        return MonodromyOperator(integer_inverse(t.matrix.T), t.base, t.path, not t.dual)
    return integer_inverse(np.asarray(t, dtype=np.int64).T)


# ---- matching the reference triples ------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    """g T_{order[k]} g^{-1} == reference[k] for k = 0, 1, 2, with g in SL(3, Z)."""

    change: np.ndarray
    order: tuple[int, int, int]
    kind: str


def _row_type_conjugator(ops, ref) -> np.ndarray | None:
    """g with g T_i g^-1 = R_i for transvections I + u v_i^T sharing u."""
    d = [np.asarray(t, dtype=np.int64) - np.eye(3, dtype=np.int64) for t in ops]
    col = next(c for c in d[0].T if np.any(c))
    u = col // _gcd(col)
    vs = []
    for di in d:
        j = int(np.flatnonzero(u)[0])
        vs.append(di[j] // u[j])
        if not np.array_equal(np.outer(u, vs[-1]), di):
            return None
    rv = [np.asarray(r, dtype=np.int64)[0] - np.eye(3, dtype=np.int64)[0] for r in ref]
    # h = g^{-1} has first column u and satisfies v_i . h_k = rv_i[k] for k = 2, 3
    sys = [list(map(int, vs[0])), list(map(int, vs[1]))]
    dd, uu, ww = smith_normal_form(sys)
    cols = []
    for k in (1, 2):
        b = [int(rv[0][k]), int(rv[1][k])]
        ub = [sum(int(uu[i, j]) * b[j] for j in range(2)) for i in range(2)]
        y = []
        for i in range(2):
            di = int(dd[i, i])
            if di == 0 or ub[i] % di:
                return None
            y.append(ub[i] // di)
        y.append(0)
        cols.append([sum(int(ww[r, c]) * y[c] for c in range(3)) for r in range(3)])
    h = np.array([list(map(int, u)), cols[0], cols[1]], dtype=np.int64).T
    if abs(_det3(h)) != 1:
        return None
    g = integer_inverse(h) if _det3(h) == 1 else integer_inverse(-h)  # -1 is central in odd rank
    ginv = integer_inverse(g)
    if all(np.array_equal(g @ np.asarray(t) @ ginv, r) for t, r in zip(ops, ref)):
        return g
    return None


def normal_form(triple: Sequence[np.ndarray]) -> NormalForm:
    """Find a unimodular basis change and leg ordering matching the reference triple.

    Row-type (II) triples go to TYPE_II_TRIPLE, column-type (III) ones to
    TYPE_III_TRIPLE, which is handled through transposes.
    """
    ops = [np.asarray(t, dtype=np.int64) for t in triple]
    kind = classify(ops)
    for order in permutations(range(3)):
        seq = [ops[i] for i in order]
        if kind == II:
            g = _row_type_conjugator(seq, TYPE_II_TRIPLE)
        else:
            gt = _row_type_conjugator([t.T for t in seq], [r.T for r in TYPE_III_TRIPLE])
            g = None if gt is None else integer_inverse(gt.T)
        if g is not None:
            return NormalForm(g, order, kind)
    raise MonodromyError(f"no unimodular basis change brings the {kind} triple to the reference shape")


TYPE_II_TRIPLE = tuple(np.array(m, dtype=np.int64) for m in (
    [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
    [[1, 0, -1], [0, 1, 0], [0, 0, 1]],
    [[1, -1, 1], [0, 1, 0], [0, 0, 1]],
))

TYPE_III_TRIPLE = tuple(np.array(m, dtype=np.int64) for m in (
    [[1, 0, 0], [1, 1, 0], [0, 0, 1]],
    [[1, 0, 0], [0, 1, 0], [-1, 0, 1]],
    [[1, 0, 0], [-1, 1, 0], [1, 0, 1]],
))
