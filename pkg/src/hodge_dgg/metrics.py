"""Intrinsic metrics on the i-faces of a weighted complex.

Two constructions are provided. ``mu`` is the path metric whose hop length
between neighbours F ~ F' is

    min{ sqrt(w(F) / sum_G w_{FG}), sqrt(w(F') / sum_G w_{F'G}), 1 },

and ``canonical`` charges 1 / ((i+1) sqrt(b)) per hop, b being the
boundedness constant of :func:`hodge_dgg.operators.bound_b`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .complex import Face, WeightedComplex, face_label
from .operators import PairWeights, bound_b, pair_weights

KINDS = ("mu", "canonical")
INTRINSIC_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class MetricTable:
    """All-pairs distances between the i-faces, with the jump size."""

    dim: int
    kind: str
    reduced: bool
    faces: tuple[Face, ...]
    dist: np.ndarray
    jump: float
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self._index is None:
            object.__setattr__(self, "_index", {f: k for k, f in enumerate(self.faces)})

    def index(self, face: Face) -> int:
        try:
            return self._index[face]
        except KeyError:
            raise ValueError(f"face {face_label(face)} is not a {self.dim}-face of this table") from None

    def distance(self, a: Face, b: Face) -> float:
        return float(self.dist[self.index(a), self.index(b)])

    def column(self, face: Face) -> np.ndarray:
        return self.dist[:, self.index(face)]


def _hop_graph(pw: PairWeights) -> sp.csr_matrix:
    return sp.csr_matrix(pw.w_total != 0, dtype=float)


def mu_weight(K: WeightedComplex, i: int, a: Face, b: Face, pw: PairWeights | None = None) -> float:
    pw = pw if pw is not None else pair_weights(K, i)
    ia, ib = K.index(a), K.index(b)
    if len(a) != i + 1 or len(b) != i + 1 or pw.w_total[ia, ib] == 0:
        raise ValueError(f"{face_label(a)} and {face_label(b)} are not neighbouring {i}-faces")
    tot = pw.total()
    return min(math.sqrt(K.weight(a) / tot[ia]), math.sqrt(K.weight(b) / tot[ib]), 1.0)


def _mu_lengths(K: WeightedComplex, pw: PairWeights) -> sp.csr_matrix:
    w = np.array([K.weight(F) for F in pw.faces])
    tot = pw.total()
    with np.errstate(divide="ignore"):
        own = np.minimum(np.sqrt(w / tot), 1.0)
    adj = sp.triu(pw.w_total, k=1).tocoo()
    vals = np.minimum(own[adj.row], own[adj.col])
    n = len(pw.faces)
    return sp.csr_matrix((vals, (adj.row, adj.col)), shape=(n, n))


def metric_table(K: WeightedComplex, i: int, kind: str = "mu", pw: PairWeights | None = None) -> MetricTable:
    if kind not in KINDS:
        raise ValueError(f"unknown metric kind {kind!r}; expected one of {KINDS}")
    if not 0 <= i <= K.dim:
        raise ValueError(f"dimension {i} out of range 0..{K.dim}")
    pw = pw if pw is not None else pair_weights(K, i)
    n = len(pw.faces)
    if kind == "mu":
        lengths = _mu_lengths(K, pw)
    else:
        b = bound_b(K, i).value
        hop = 1.0 / ((i + 1) * math.sqrt(b)) if b > 0 else math.inf
        lengths = sp.triu(_hop_graph(pw), k=1).tocsr() * hop
    if n:
        dist = dijkstra(lengths, directed=False)
        # per-source runs can differ in the last bit; keep the table exactly symmetric
        dist = np.minimum(dist, dist.T)
    else:
        dist = np.zeros((0, 0))
    adj = sp.triu(pw.w_total, k=1).tocoo()
    jump = float(dist[adj.row, adj.col].max()) if adj.nnz else math.inf
    return MetricTable(i, kind, K.reduced, pw.faces, dist, jump)


@dataclass(frozen=True)
class IntrinsicReport:
    worst_face: Face | None
    worst_ratio: float
    ratios: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1.0 + INTRINSIC_RTOL


def verify_intrinsic(
    K: WeightedComplex, i: int, table: MetricTable, pw: PairWeights | None = None
) -> IntrinsicReport:
    """Evaluate sum_F' w_{FF'} rho(F,F')^2 / w(F) for every i-face F."""
    if table.faces != K.faces(i):
        raise ValueError("metric table does not match the i-faces of the complex")
    if table.reduced != K.reduced:
        raise ValueError("metric table was built for a different reduced flag")
    pw = pw if pw is not None else pair_weights(K, i)
    coo = pw.w_total.tocoo()
    d = table.dist[coo.row, coo.col]
    contrib = np.bincount(coo.row, weights=coo.data * d * d, minlength=len(table.faces))
    ratios = contrib / K.weights(i)
    if len(ratios) == 0:
        return IntrinsicReport(None, 0.0, ratios)
    k = int(np.argmax(ratios))
    return IntrinsicReport(table.faces[k], float(ratios[k]), ratios)


def set_distance(table: MetricTable, A, B) -> float:
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("set_distance needs two nonempty face sets")
    ia = [table.index(F) for F in A]
    ib = [table.index(F) for F in B]
    return float(table.dist[np.ix_(ia, ib)].min())


def ball(table: MetricTable, center: Face, radius: float) -> list[Face]:
    """Faces within ``radius`` of ``center``, in canonical order."""
    col = table.column(center)
    return [F for F, d in zip(table.faces, col) if d <= radius]
