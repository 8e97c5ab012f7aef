import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from hodge_dgg import build_complex
from hodge_dgg.dgg import (
    DggContext,
    asinh_factor,
    dgg_functional_check,
    dgg_pairing_check,
    gaussian_constant,
    gaussian_corollary_check,
    pointwise_kernel_check,
    zeta_closed,
    zeta_variational,
)
from hodge_dgg.generators import graph_complex, random_graph
from hodge_dgg.operators import hodge_full
from strategies import weighted_complexes

pos = st.floats(1e-2, 1e2)
dist = st.floats(0.0, 50.0)
jump = st.sampled_from([0.1, 0.5, 1.0, 2.0])


def test_zeta_examples():
    assert zeta_closed(1, 1, 0) == 0
    assert zeta_closed(1, 1, 1) == pytest.approx(math.asinh(1) - math.sqrt(2) + 1, rel=1e-15)
    assert zeta_closed(1, 1, 1) == pytest.approx(0.467160, abs=5e-7)
    assert zeta_closed(0.5, 2.0, math.inf) == math.inf
    for bad in ((0, 1, 1), (1, 0, 1), (-1, 1, 1), (1, 1, -1)):
        with pytest.raises(ValueError):
            zeta_closed(*bad)


def test_zeta_variational_examples():
    val, k = zeta_variational(1, 1, 0)
    assert val == 0 and k == 0
    val, k = zeta_variational(1, 1, 1)
    assert k == pytest.approx(2 * math.asinh(1), abs=1e-6)
    assert val == pytest.approx(zeta_closed(1, 1, 1), abs=1e-8)


def test_zeta_against_scipy_minimizer():
    for s, t, r in [(1, 1, 1), (0.1, 0.01, 50), (2, 100, 0.3), (0.5, 3, 7)]:
        f = lambda k: (t / s**2) * (math.cosh(k * s / 2) - 1) - k * r / 2
        k0 = 2 / s * math.asinh(r * s / t)
        res = minimize_scalar(f, bracket=(0.5 * k0, k0, 2 * k0 + 1e-3), tol=1e-14)
        assert zeta_closed(s, t, r) == pytest.approx(-res.fun, rel=1e-8, abs=1e-10)


@given(jump, pos, dist)
def test_zeta_scaling_and_upper_bound(s, t, r):
    z = zeta_closed(s, t, r)
    assert z >= 0
    assert z == pytest.approx(zeta_closed(1.0, t / s**2, r / s), rel=1e-14, abs=1e-300)
    assert z <= r * r / (2 * t) * (1 + 1e-14)


@given(jump, pos, dist, st.floats(0.01, 5.0))
def test_zeta_monotone_and_convex(s, t, r, dr):
    assert zeta_closed(s, t, r + dr) >= zeta_closed(s, t, r)
    assert zeta_closed(s, t * 1.5, r) <= zeta_closed(s, t, r) * (1 + 1e-14)
    mid = zeta_closed(s, t, r + dr)
    ends = 0.5 * (zeta_closed(s, t, r) + zeta_closed(s, t, r + 2 * dr))
    assert mid <= ends * (1 + 1e-12) + 1e-12


@given(jump, pos, dist)
def test_variational_matches_closed(s, t, r):
    val, k = zeta_variational(s, t, r)
    z = zeta_closed(s, t, r)
    assert abs(val - z) <= 1e-8 * max(1.0, z)
    if r > 0:
        k0 = 2 / s * math.asinh(r * s / t)
        assert abs(k - k0) <= 1e-6 * max(1.0, k0)


def test_gaussian_constant_values():
    assert gaussian_constant(1) == pytest.approx(0.93432, abs=1e-5)
    assert gaussian_constant(100) > 0.999
    assert gaussian_constant(1e-3) > 0
    with pytest.raises(ValueError):
        gaussian_constant(0)


@pytest.mark.parametrize("h", [0.05, 0.3, 1.0, 2.0, 10.0])
def test_gaussian_constant_is_the_hypothesis_region_infimum(h):
    C = gaussian_constant(h)
    assert C >= asinh_factor(h) * (1 - 1e-12)
    for u in np.linspace(1e-6, 1 / h, 200):
        t, r = 1.0, u
        assert zeta_closed(1.0, t, r) >= C * r * r / (2 * t) * (1 - 1e-12)


def test_tightness_witness(tri):
    rep = dgg_pairing_check(tri, 1, tri.faces(1), tri.faces(1), 1.0)
    assert rep.rho == 0 and rep.zeta == 0
    assert rep.rhs == pytest.approx(3 * math.exp(-3), rel=1e-14)
    assert rep.lhs / rep.rhs >= 1 - 1e-9
    assert rep.passed


def test_off_diagonal_kernel_vanishes(tri):
    rep = dgg_pairing_check(tri, 1, [(0, 1)], [(1, 2)], 1.0)
    assert rep.lhs == 0 and rep.passed


def test_pointwise_diagonal_is_tight(tri):
    rep = pointwise_kernel_check(tri, 1, (0, 1), (0, 1), 1.0)
    assert rep.lhs == pytest.approx(math.exp(-3), rel=1e-14)
    assert rep.rhs == pytest.approx(math.exp(-3), rel=1e-14)


def test_infinite_distance_requires_exact_zero():
    K = build_complex([[0, 1, 2], [3, 4, 5]])
    rep = dgg_pairing_check(K, 1, [(0, 1)], [(3, 4)], 0.5)
    assert rep.rho == math.inf and rep.rhs == 0 and rep.lhs == 0 and rep.passed


def test_invalid_hypotheses_are_reported():
    K = build_complex([[0, 1], [2, 3]], reduced=False)
    rep = dgg_pairing_check(K, 1, [(0, 1)], [(2, 3)], 1.0)
    assert not rep.valid and "infinite" in rep.reason and not rep.computed
    tri = build_complex([[0, 1, 2]])
    rep = dgg_pairing_check(tri, 0, [(0,)], [(1,)], 1.0, kind="canonical")
    assert not rep.valid and "intrinsic" in rep.reason


def test_functional_support_violation(tri):
    f = np.array([1.0, 1.0, 0.0])
    with pytest.raises(ValueError, match="support"):
        dgg_functional_check(tri, 1, f, f, [(0, 1)], [(0, 1), (0, 2)], 1.0)


def test_input_errors(tri):
    with pytest.raises(ValueError):
        dgg_pairing_check(tri, 1, [], [(0, 1)], 1.0)
    with pytest.raises(ValueError):
        dgg_pairing_check(tri, 1, [(0, 1)], [(0, 1)], 0.0)
    with pytest.raises(ValueError):
        dgg_pairing_check(tri, 1, [(0,)], [(0, 1)], 1.0)
    ctx = DggContext(tri, 1, "mu")
    with pytest.raises(ValueError):
        dgg_pairing_check(tri, 1, [(0, 1)], [(0, 1)], 1.0, kind="canonical", ctx=ctx)


def test_corollary_hypothesis_and_zero_distance(tri, tetra):
    rep = gaussian_corollary_check(tri, 1, [(0, 1)], [(0, 1)], 0.5, 1.0)
    assert rep.rho == 0 and rep.passed
    with pytest.raises(ValueError, match="hypothesis"):
        gaussian_corollary_check(tetra, 1, [(0, 1)], [(2, 3)], 1e-3, 1.0)


@pytest.mark.parametrize("t", [0.01, 0.1, 1.0])
def test_multiprecision_escalation_on_a_long_path(t):
    """End-to-end pairing on a 30-vertex path is far below float64 rounding at short times."""
    K = graph_complex([(k, k + 1) for k in range(29)])
    rep = dgg_pairing_check(K, 0, [(0,)], [(29,)], t)
    assert rep.precision.startswith("mp") and rep.passed
    L = hodge_full(K, 0).toarray()
    with mpmath.workdps(120):
        P = mpmath.expm(-mpmath.mpf(t) * mpmath.matrix(L.tolist()))
        exact = float(P[0, 29])
    assert rep.lhs == pytest.approx(exact, rel=1e-12)
    assert rep.lhs <= rep.rhs


@given(weighted_complexes(max_n=7), st.sampled_from(["mu", "canonical"]), st.floats(1e-2, 1e2),
       st.integers(0, 2**32 - 1))
def test_bound_holds_for_valid_reports(K, kind, t, seed):
    rng = np.random.default_rng(seed)
    for i in range(K.dim + 1):
        faces = K.faces(i)
        ctx = DggContext(K, i, kind)
        A = [faces[j] for j in rng.choice(len(faces), rng.integers(1, len(faces) + 1), replace=False)]
        B = [faces[j] for j in rng.choice(len(faces), rng.integers(1, len(faces) + 1), replace=False)]
        reports = [dgg_pairing_check(K, i, A, B, t, kind, ctx)]
        f = np.zeros(len(faces))
        g = np.zeros(len(faces))
        for F in A:
            f[K.index(F)] = rng.standard_normal()
        for G in B:
            g[K.index(G)] = rng.standard_normal()
        reports.append(dgg_functional_check(K, i, f, g, A, B, t, kind, ctx))
        reports.append(pointwise_kernel_check(K, i, A[0], B[0], t, kind, ctx))
        for rep in reports:
            if rep.valid:
                assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("seed", range(5))
def test_graph_specialization(seed):
    K = random_graph(10, 0.4, seed)
    ctx = DggContext(K, 0, "mu")
    rng = np.random.default_rng(seed)
    faces = K.faces(0)
    for t in (0.05, 1.0, 20.0):
        f = rng.standard_normal(len(faces)) * (rng.random(len(faces)) < 0.3)
        g = rng.standard_normal(len(faces)) * (rng.random(len(faces)) < 0.3)
        f[0] = g[-1] = 1.0
        A = [F for F, v in zip(faces, f) if v != 0]
        B = [F for F, v in zip(faces, g) if v != 0]
        rep = dgg_functional_check(K, 0, f, g, A, B, t, "mu", ctx)
        assert not rep.valid or rep.passed
