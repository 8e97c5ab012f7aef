"""Coboundaries, their weighted adjoints, and Hodge Laplacians.

Matrices act on cochains written as vectors over the canonical face order of
one dimension. The production path forms the Laplacians as products of
coboundary matrices; :func:`hodge_entrywise` assembles the same operators
coefficient by coefficient and serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .complex import Face, WeightedComplex

PARTS = ("up", "down", "full")


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Real sparse matrix whose rows and columns are indexed by faces.

    Entries are stored as coordinate triplets sorted by (row, col), with no
    duplicates and no explicit zeros.
    """

    row_faces: tuple[Face, ...]
    col_faces: tuple[Face, ...]
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    symmetric: bool = False

    @classmethod
    def from_matrix(cls, matrix, row_faces, col_faces) -> "SparseOperator":
        coo = sp.coo_matrix(matrix, shape=(len(row_faces), len(col_faces)))
        coo.sum_duplicates()
        keep = coo.data != 0
        rows, cols, vals = coo.row[keep], coo.col[keep], coo.data[keep].astype(float)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order].astype(np.int64), cols[order].astype(np.int64), vals[order]
        symmetric = False
        if len(row_faces) == len(col_faces):
            m = sp.csr_matrix((vals, (rows, cols)), shape=(len(row_faces), len(col_faces)))
            symmetric = (m != m.T).nnz == 0
        return cls(tuple(row_faces), tuple(col_faces), rows, cols, vals, symmetric)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_faces), len(self.col_faces)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def tocsr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.values, (self.rows, self.cols)), shape=self.shape)

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.rows, self.cols] = self.values
        return out

    def entries(self):
        for r, c, v in zip(self.rows, self.cols, self.values):
            yield self.row_faces[r], self.col_faces[c], float(v)

    def __matmul__(self, x):
        return self.tocsr() @ x

    def __repr__(self) -> str:
        return f"SparseOperator(shape={self.shape}, nnz={self.nnz}, symmetric={self.symmetric})"


def _check_dim(K: WeightedComplex, i: int, lo: int) -> None:
    if not lo <= i <= K.dim:
        raise ValueError(f"dimension {i} out of range {lo}..{K.dim}")


def coboundary(K: WeightedComplex, i: int) -> SparseOperator:
    """delta_i : C^i -> C^{i+1}; entry (Fbar, F) is the incidence sign.

    ``i = -1`` gives the column of ones over the vertices in reduced mode and
    an empty-column matrix otherwise; ``i = dim K`` gives an empty-row matrix.
    """
    _check_dim(K, i, -1)
    rows_f, cols_f = K.faces(i + 1), K.faces(i)
    rows, cols, vals = [], [], []
    if cols_f:
        for r, top in enumerate(rows_f):
            for s, sub in K.boundary(top):
                rows.append(r)
                cols.append(K.index(sub))
                vals.append(float(s))
    m = sp.coo_matrix((vals, (rows, cols)), shape=(len(rows_f), len(cols_f)))
    return SparseOperator.from_matrix(m, rows_f, cols_f)


def adjoint_coboundary(K: WeightedComplex, i: int) -> SparseOperator:
    """delta_i^* : C^{i+1} -> C^i with respect to the weighted inner products.

    Computed as W_i^{-1} delta_i^T W_{i+1}.
    """
    d = coboundary(K, i).tocsr()
    m = sp.diags(1.0 / K.weights(i)) @ d.T @ sp.diags(K.weights(i + 1))
    return SparseOperator.from_matrix(m, K.faces(i), K.faces(i + 1))


def hodge_up(K: WeightedComplex, i: int) -> SparseOperator:
    _check_dim(K, i, 0)
    m = adjoint_coboundary(K, i).tocsr() @ coboundary(K, i).tocsr()
    return SparseOperator.from_matrix(m, K.faces(i), K.faces(i))


def hodge_down(K: WeightedComplex, i: int) -> SparseOperator:
    _check_dim(K, i, 0)
    m = coboundary(K, i - 1).tocsr() @ adjoint_coboundary(K, i - 1).tocsr()
    return SparseOperator.from_matrix(m, K.faces(i), K.faces(i))


def hodge_full(K: WeightedComplex, i: int) -> SparseOperator:
    _check_dim(K, i, 0)
    m = hodge_up(K, i).tocsr() + hodge_down(K, i).tocsr()
    return SparseOperator.from_matrix(m, K.faces(i), K.faces(i))


def hodge(K: WeightedComplex, i: int, part: str = "full") -> SparseOperator:
    if part == "up":
        return hodge_up(K, i)
    if part == "down":
        return hodge_down(K, i)
    if part == "full":
        return hodge_full(K, i)
    raise ValueError(f"unknown Laplacian part {part!r}; expected one of {PARTS}")


def hodge_entrywise(K: WeightedComplex, i: int, part: str = "full") -> SparseOperator:
    """Assemble the Hodge Laplacian coefficient by coefficient.

    up:   diagonal sum_Fbar w(Fbar)/w(F), off-diagonal (w(Fbar)/w(F)) s(F,Fbar) s(F',Fbar)
    down: diagonal sum_E w(F)/w(E),       off-diagonal (w(F')/w(E)) s(E,F) s(E,F')
    """
    _check_dim(K, i, 0)
    if part not in PARTS:
        raise ValueError(f"unknown Laplacian part {part!r}; expected one of {PARTS}")
    faces = K.faces(i)
    acc: dict[tuple[int, int], list[float]] = {}

    def add(r, c, v):
        acc.setdefault((r, c), []).append(v)

    for r, F in enumerate(faces):
        wF = K.weight(F)
        if part in ("up", "full"):
            for top in K.cofaces(F):
                ratio = K.weight(top) / wF
                add(r, r, ratio)
                for s_other, other in K.boundary(top):
                    if other != F:
                        add(r, K.index(other), ratio * _sgn(F, top) * s_other)
        if part in ("down", "full"):
            for s_F, E in K.boundary(F):
                wE = K.weight(E)
                add(r, r, wF / wE)
                for G in K.cofaces(E):
                    if G != F:
                        add(r, K.index(G), K.weight(G) / wE * s_F * _sgn(E, G))
    rows, cols, vals = [], [], []
    for (r, c), parts in acc.items():
        rows.append(r)
        cols.append(c)
        vals.append(math.fsum(parts))
    m = sp.coo_matrix((vals, (rows, cols)), shape=(len(faces), len(faces)))
    return SparseOperator.from_matrix(m, faces, faces)


def _sgn(face: Face, coface: Face) -> int:
    k = 0
    while k < len(face) and face[k] == coface[k]:
        k += 1
    return -1 if k % 2 else 1


def symmetrized(K: WeightedComplex, i: int, op: SparseOperator) -> sp.csr_matrix:
    """W^{1/2} A W^{-1/2}; symmetric when A is self-adjoint for the weighted product."""
    r = np.sqrt(K.weights(i))
    return (sp.diags(r) @ op.tocsr() @ sp.diags(1.0 / r)).tocsr()


def reorient(op: SparseOperator, row_signs, col_signs) -> SparseOperator:
    """Conjugate ``op`` by diagonal sign matrices (orientation change of faces)."""
    m = sp.diags(np.asarray(row_signs, float)) @ op.tocsr() @ sp.diags(np.asarray(col_signs, float))
    return SparseOperator.from_matrix(m, op.row_faces, op.col_faces)


def inner(K: WeightedComplex, i: int, f, g) -> float:
    """Weighted inner product (f, g) on i-cochains."""
    return float(np.dot(np.asarray(f, float) * np.asarray(g, float), K.weights(i)))


@dataclass(frozen=True, eq=False)
class PairWeights:
    """Pair weights between i-faces.

    ``tau`` maps (F, E, F') to w(F) w(F') / w(E) for distinct down-neighbours
    F, F' sharing E. ``w_up``, ``w_down`` and ``w_total`` are symmetric sparse
    matrices over the i-faces with zero diagonal; ``deg_ratio[k]`` is
    deg F / w(F) for the k-th i-face.
    """

    dim: int
    faces: tuple[Face, ...]
    tau: dict
    w_up: sp.csr_matrix
    w_down: sp.csr_matrix
    w_total: sp.csr_matrix
    deg_ratio: np.ndarray

    def total(self) -> np.ndarray:
        """Row sums of w_total: sum over F' of w_{FF'}."""
        return np.asarray(self.w_total.sum(axis=1)).ravel()

    def adjacent(self, a: int, b: int) -> bool:
        return self.w_total[a, b] != 0


def pair_weights(K: WeightedComplex, i: int) -> PairWeights:
    _check_dim(K, i, 0)
    faces = K.faces(i)
    n = len(faces)
    up_r, up_c, up_v = [], [], []
    dn_r, dn_c, dn_v = [], [], []
    tau = {}
    for a, b, shared, kind in K.coface_pairs(i):
        ia, ib = K.index(a), K.index(b)
        if kind == "up":
            v = K.weight(shared)
            up_r += [ia, ib]
            up_c += [ib, ia]
            up_v += [v, v]
        else:
            v = K.weight(a) * K.weight(b) / K.weight(shared)
            tau[(a, shared, b)] = v
            tau[(b, shared, a)] = v
            dn_r += [ia, ib]
            dn_c += [ib, ia]
            dn_v += [v, v]
    w_up = sp.csr_matrix((up_v, (up_r, up_c)), shape=(n, n))
    w_down = sp.csr_matrix((dn_v, (dn_r, dn_c)), shape=(n, n))
    deg = np.array([K.degree(F) / K.weight(F) for F in faces], dtype=float)
    return PairWeights(i, faces, tau, w_up, w_down, (w_up + w_down).tocsr(), deg)


@dataclass(frozen=True)
class BoundB:
    value: float
    face: Face | None


def bound_b(K: WeightedComplex, i: int) -> BoundB:
    """Largest deg F / w(F) over the i-faces and (i-1)-faces."""
    _check_dim(K, i, 0)
    best, arg = 0.0, None
    for j in (i, i - 1):
        for F in K.faces(j):
            r = K.degree(F) / K.weight(F)
            if arg is None or r > best:
                best, arg = r, F
    return BoundB(best, arg)


@dataclass(frozen=True)
class GreenCheck:
    lhs: float
    rhs: float
    residual: float


def greens_formula_check(K: WeightedComplex, i: int, f, g) -> GreenCheck:
    """Compare (L_i f, g) with (delta_i f, delta_i g) + (delta_{i-1}^* f, delta_{i-1}^* g)."""
    f = np.asarray(f, float)
    g = np.asarray(g, float)
    n = K.n_faces(i)
    if f.shape != (n,) or g.shape != (n,):
        raise ValueError(f"cochains must have length {n}")
    lhs = inner(K, i, hodge_full(K, i) @ f, g)
    d = coboundary(K, i)
    rhs = inner(K, i + 1, d @ f, d @ g)
    ds = adjoint_coboundary(K, i - 1)
    rhs += inner(K, i - 1, ds @ f, ds @ g)
    return GreenCheck(lhs, rhs, abs(lhs - rhs) / max(1.0, abs(lhs)))

