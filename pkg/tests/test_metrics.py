import heapq
import math

import numpy as np
import pytest
from hypothesis import given

from hodge_dgg import build_complex
from hodge_dgg.generators import random_graph
from hodge_dgg.metrics import MetricTable, ball, metric_table, mu_weight, set_distance, verify_intrinsic
from hodge_dgg.operators import bound_b
from strategies import weighted_complexes


def raw_pair_weight(K, F, G):
    """w_{FF'} straight from the face weights, without the library's pair tables."""
    if F == G:
        return 0.0
    union = tuple(sorted(set(F) | set(G)))
    common = tuple(sorted(set(F) & set(G)))
    total = 0.0
    if len(union) == len(F) + 1 and union in K:
        total += K.weight(union)
    if len(common) == len(F) - 1 and common in K:
        total += K.weight(F) * K.weight(G) / K.weight(common)
    return total


def dijkstra_oracle(n, edges):
    adj = {k: [] for k in range(n)}
    for a, b, length in edges:
        adj[a].append((b, length))
        adj[b].append((a, length))
    out = np.full((n, n), math.inf)
    for src in range(n):
        out[src, src] = 0.0
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > out[src, u]:
                continue
            for v, length in adj[u]:
                nd = d + length
                if nd < out[src, v]:
                    out[src, v] = nd
                    heapq.heappush(heap, (nd, v))
    return out


def oracle_table(K, i, kind):
    faces = K.faces(i)
    n = len(faces)
    W = np.array([[raw_pair_weight(K, F, G) for G in faces] for F in faces]).reshape(n, n)
    tot = W.sum(axis=1)
    degs = [K.degree(F) / K.weight(F) for j in (i, i - 1) for F in K.faces(j)]
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if W[a, b] != 0:
                if kind == "mu":
                    length = min(math.sqrt(K.weight(faces[a]) / tot[a]), math.sqrt(K.weight(faces[b]) / tot[b]), 1.0)
                else:
                    length = 1.0 / ((i + 1) * math.sqrt(max(degs)))
                edges.append((a, b, length))
    return W, dijkstra_oracle(n, edges), edges


def test_triangle_mu_metric(tri):
    table = metric_table(tri, 1, "mu")
    off = table.dist[~np.eye(3, dtype=bool)]
    assert np.all(off == 0.5)
    assert table.jump == 0.5
    assert mu_weight(tri, 1, (0, 1), (0, 2)) == 0.5
    rep = verify_intrinsic(tri, 1, table)
    assert np.allclose(rep.ratios, 1.0, rtol=0, atol=1e-15) and rep.passed


def test_triangle_canonical_metric(tri):
    table = metric_table(tri, 1, "canonical")
    hop = 1 / (2 * math.sqrt(2))
    assert table.distance((0, 1), (1, 2)) == pytest.approx(hop, rel=1e-15)
    assert table.jump == pytest.approx(hop, rel=1e-15)
    assert verify_intrinsic(tri, 1, table).passed


def test_disjoint_triangles_are_infinitely_far():
    K = build_complex([[0, 1, 2], [3, 4, 5]])
    table = metric_table(K, 1)
    assert table.distance((0, 1), (3, 4)) == math.inf
    assert set_distance(table, [(0, 1)], [(3, 4), (4, 5)]) == math.inf


def test_constant_ten_metric_fails(tri):
    faces = tri.faces(1)
    dist = 10.0 * (1 - np.eye(3))
    table = MetricTable(1, "mu", True, faces, dist, 10.0)
    rep = verify_intrinsic(tri, 1, table)
    assert rep.worst_ratio == pytest.approx(400.0)
    assert not rep.passed


def test_set_distance_and_ball(tri):
    table = metric_table(tri, 1)
    assert set_distance(table, [(0, 1)], [(0, 1), (1, 2)]) == 0
    assert set_distance(table, [(0, 1)], [(1, 2)]) == 0.5
    with pytest.raises(ValueError):
        set_distance(table, [], [(1, 2)])
    assert ball(table, (0, 1), 0.1) == [(0, 1)]
    assert ball(table, (0, 1), 0.5) == list(tri.faces(1))


def test_mu_weight_rejects_non_neighbours():
    K = build_complex([[0, 1], [2, 3]])
    with pytest.raises(ValueError):
        mu_weight(K, 1, (0, 1), (2, 3))


def test_no_adjacent_pairs_gives_infinite_jump():
    K = build_complex([[0, 1], [2, 3]], reduced=False)
    assert metric_table(K, 1).jump == math.inf


def test_canonical_metric_reduced_vertices_counterexample(tri):
    """At the vertex level with the empty face, the per-hop length is too long to be intrinsic."""
    rep = verify_intrinsic(tri, 0, metric_table(tri, 0, "canonical"))
    assert rep.worst_ratio == pytest.approx(4 / 3)
    assert not rep.passed
    assert verify_intrinsic(build_complex([[0, 1, 2]], reduced=False), 0,
                            metric_table(build_complex([[0, 1, 2]], reduced=False), 0, "canonical")).passed


@given(weighted_complexes())
def test_tables_match_heapq_oracle(K):
    for i in range(K.dim + 1):
        for kind in ("mu", "canonical"):
            _, ref, edges = oracle_table(K, i, kind)
            table = metric_table(K, i, kind)
            finite = np.isfinite(ref)
            assert np.array_equal(finite, np.isfinite(table.dist))
            assert np.allclose(table.dist[finite], ref[finite], rtol=1e-12, atol=0)
            if edges:
                assert table.jump == pytest.approx(max(ref[a, b] for a, b, _ in edges), rel=1e-12)
            else:
                assert table.jump == math.inf


@given(weighted_complexes())
def test_pseudo_metric_axioms(K):
    for i in range(K.dim + 1):
        D = metric_table(K, i).dist
        assert np.all(np.diag(D) == 0)
        assert np.array_equal(D, D.T)
        n = len(D)
        for k in range(n):
            with np.errstate(invalid="ignore"):
                via = D[:, [k]] + D[[k], :]
            assert np.all(D <= via * (1 + 1e-12) + 1e-15)


@given(weighted_complexes())
def test_mu_metric_intrinsic_and_single_hop(K):
    for i in range(K.dim + 1):
        table = metric_table(K, i, "mu")
        assert verify_intrinsic(K, i, table).passed
        for a, b, length in oracle_table(K, i, "mu")[2]:
            assert table.dist[a, b] <= length * (1 + 1e-12)


@given(weighted_complexes())
def test_canonical_metric_intrinsic_where_defined(K):
    for i in range(K.dim + 1):
        rep = verify_intrinsic(K, i, metric_table(K, i, "canonical"))
        if i >= 1 or not K.reduced:
            assert rep.passed


@pytest.mark.parametrize("seed", range(5))
def test_graph_case_formula(seed):
    K = random_graph(8, 0.5, seed)
    table = metric_table(K, 0, "mu")
    faces = K.faces(0)
    edges = []
    for a in range(len(faces)):
        for b in range(a + 1, len(faces)):
            e = (faces[a][0], faces[b][0])
            if e in K:
                Deg = [K.degree(faces[x]) / K.weight(faces[x]) for x in (a, b)]
                edges.append((a, b, max(Deg[0], Deg[1], 1.0) ** -0.5))
    ref = dijkstra_oracle(len(faces), edges)
    finite = np.isfinite(ref)
    assert np.array_equal(finite, np.isfinite(table.dist))
    assert np.abs(table.dist[finite] - ref[finite]).max() < 1e-12
    assert bound_b(K, 0).value > 0
