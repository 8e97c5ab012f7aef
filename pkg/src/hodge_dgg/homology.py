"""Betti numbers from exact integer boundary ranks, and Hodge kernel dimensions."""

from __future__ import annotations

from math import gcd

import numpy as np

from .complex import WeightedComplex, boundary
from .operators import hodge_full, symmetrized


def boundary_rows(K: WeightedComplex, i: int) -> list[dict[int, int]]:
    """Integer boundary matrix d_i : C_i -> C_{i-1}, one sparse row per i-face."""
    if i < 0 or i > K.dim:
        return []
    if i == 0 and not K.reduced:
        return []
    return [{K.index(e): s for s, e in boundary(F)} for F in K.faces(i)]


def integer_rank(rows: list[dict[int, int]]) -> int:
    """Rank over the rationals by fraction-free elimination on integer rows."""
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        while row:
            col = min(row)
            if col not in pivots:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                pivots[col] = {c: v // g for c, v in row.items()}
                rank += 1
                break
            piv = pivots[col]
            a, b = piv[col], row[col]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {c: ma * v for c, v in row.items()}
            for c, v in piv.items():
                nv = new.get(c, 0) - mb * v
                if nv:
                    new[c] = nv
                else:
                    new.pop(c, None)
            if new:
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                new = {c: v // g for c, v in new.items()}
            row = new
    return rank


def betti_numbers(K: WeightedComplex) -> dict[int, int]:
    """Betti numbers over the reals for dimensions 0..dim K.

    Reduced Betti numbers when ``K.reduced`` is set (the empty face is part of
    the chain complex), ordinary ones otherwise.
    """
    ranks = {i: integer_rank(boundary_rows(K, i)) for i in range(0, K.dim + 2)}
    return {i: K.n_faces(i) - ranks[i] - ranks[i + 1] for i in range(0, K.dim + 1)}


def kernel_dimension(K: WeightedComplex, i: int, rtol: float = 1e-8) -> int:
    """Number of eigenvalues of L_i below ``rtol * ||L_i||``."""
    n = K.n_faces(i)
    if n == 0:
        return 0
    S = symmetrized(K, i, hodge_full(K, i)).toarray()
    S = 0.5 * (S + S.T)
    evals = np.linalg.eigvalsh(S)
    scale = np.abs(evals).max() or 1.0
    return int(np.sum(evals < rtol * scale))
