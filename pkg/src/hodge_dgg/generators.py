"""Deterministic test-corpus complexes."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .complex import EMPTY, ComplexError, WeightedComplex, boundary, build_complex

WEIGHT_RANGE = (0.1, 10.0)


def _weighted(faces, policy, reduced, name, rng=None):
    faces = sorted(set(faces), key=lambda f: (len(f), f))
    if policy == "unit":
        return build_complex(faces, policy="unit", mode="strict", reduced=reduced, name=name)
    lo, hi = math.log(WEIGHT_RANGE[0]), math.log(WEIGHT_RANGE[1])
    if policy == "explicit":
        if rng is None:
            raise ComplexError("explicit weights need a seed")
        all_faces = ([EMPTY] if reduced else []) + faces
        weights = np.exp(rng.uniform(lo, hi, size=len(all_faces)))
        entries = [(f, float(w)) for f, w in zip(all_faces, weights)]
        return build_complex(entries, policy="explicit", mode="strict", reduced=reduced, name=name)
    inner = {e for f in faces for _, e in boundary(f)}
    entries = []
    for f in faces:
        if f in inner or rng is None:
            entries.append(f)
        else:
            entries.append((f, float(np.exp(rng.uniform(lo, hi)))))
    return build_complex(entries, policy=policy, mode="strict", reduced=reduced, name=name)


def _closure(maximal) -> list[tuple[int, ...]]:
    out = set()
    for face in maximal:
        for k in range(1, len(face) + 1):
            out.update(combinations(face, k))
    return list(out)


def full_simplex(n: int, policy: str = "unit", reduced: bool = True, seed: int | None = None) -> WeightedComplex:
    """The simplex on vertices 0..n-1 with all its faces."""
    if n < 1:
        raise ComplexError("full simplex needs n >= 1")
    rng = None if seed is None else np.random.default_rng(seed)
    return _weighted(_closure([tuple(range(n))]), policy, reduced, f"full-simplex({n})", rng)


def sphere_boundary(n: int, policy: str = "unit", reduced: bool = True, seed: int | None = None) -> WeightedComplex:
    """Boundary of the simplex on n vertices: a combinatorial (n-2)-sphere."""
    if n < 2:
        raise ComplexError("sphere boundary needs n >= 2")
    rng = None if seed is None else np.random.default_rng(seed)
    maximal = list(combinations(range(n), n - 1))
    return _weighted(_closure(maximal), policy, reduced, f"sphere-boundary({n})", rng)


def octahedron_boundary(policy: str = "unit", reduced: bool = True, seed: int | None = None) -> WeightedComplex:
    """Boundary of the octahedron (antipodal pairs 0-1, 2-3, 4-5)."""
    maximal = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    rng = None if seed is None else np.random.default_rng(seed)
    return _weighted(_closure(maximal), policy, reduced, "octahedron-boundary", rng)


def random_flag(n: int, p: float, seed: int, policy: str = "explicit", reduced: bool = True,
                max_dim: int | None = None) -> WeightedComplex:
    """Clique complex of a G(n, p) random graph, weights log-uniform in [0.1, 10]."""
    if n < 1:
        raise ComplexError("random flag complex needs n >= 1")
    if not 0.0 <= p <= 1.0:
        raise ComplexError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    nbrs: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in combinations(range(n), 2):
        if rng.random() < p:
            nbrs[a].add(b)
            nbrs[b].add(a)
    faces = [(v,) for v in range(n)]
    layer = list(faces)
    d = 0
    while layer and (max_dim is None or d < max_dim):
        nxt = []
        for f in layer:
            common = set.intersection(*(nbrs[v] for v in f))
            nxt.extend(f + (v,) for v in sorted(common) if v > f[-1])
        faces.extend(nxt)
        layer = nxt
        d += 1
    return _weighted(faces, policy, reduced, f"random-flag({n},{p},{seed})", rng)


def graph_complex(edges, vertex_weights=None, n: int | None = None, reduced: bool = False,
                  name: str = "graph") -> WeightedComplex:
    """One-dimensional complex from ``(u, v)`` or ``(u, v, weight)`` edges.

    Vertex weights default to 1 (as does the empty face in reduced mode).
    """
    entries = []
    seen = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        w = float(e[2]) if len(e) > 2 else 1.0
        if u == v:
            raise ComplexError(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ComplexError(f"duplicate edge {key}")
        seen.add(key)
        entries.append((key, w))
    verts = set(range(n)) if n is not None else set()
    for a, b in seen:
        verts.update((a, b))
    vw = vertex_weights or {}
    for v in sorted(verts):
        entries.append(((v,), float(vw.get(v, 1.0)) if isinstance(vw, dict) else float(vw[v])))
    return build_complex(entries, policy="explicit", mode="strict", reduced=reduced, name=name)


def random_graph(n: int, p: float, seed: int, reduced: bool = False) -> WeightedComplex:
    """G(n, p) with log-uniform vertex and edge weights."""
    rng = np.random.default_rng(seed)
    lo, hi = math.log(WEIGHT_RANGE[0]), math.log(WEIGHT_RANGE[1])
    edges = [(a, b, float(np.exp(rng.uniform(lo, hi)))) for a, b in combinations(range(n), 2) if rng.random() < p]
    vw = {v: float(np.exp(rng.uniform(lo, hi))) for v in range(n)}
    return graph_complex(edges, vw, n=n, reduced=reduced, name=f"random-graph({n},{p},{seed})")


GENERATORS = {
    "full-simplex": full_simplex,
    "sphere-boundary": sphere_boundary,
    "octahedron": octahedron_boundary,
    "random-flag": random_flag,
    "graph": graph_complex,
    "random-graph": random_graph,
}


def generate(kind: str, *args, **kwargs) -> WeightedComplex:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise ComplexError(f"unknown generator {kind!r}; expected one of {sorted(GENERATORS)}") from None
    return fn(*args, **kwargs)
