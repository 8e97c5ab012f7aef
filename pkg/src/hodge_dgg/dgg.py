"""Heat-kernel off-diagonal bounds and the rate function zeta_s.

For an intrinsic metric rho with jump size s, face sets A, B and t > 0 the
checks here compare

    |<exp(-t L_i) f, g>|  <=  exp(-lambda t - zeta_s(t, rho(A, B))) ||f|| ||g||

(``f``, ``g`` supported in A, B) and its indicator form
sum_{A x B} p_t w w <= sqrt(w(A) w(B)) exp(-lambda t - zeta_s).
Each check returns a :class:`DggReport`.

The left side is a float64 computation with an a-posteriori error bound.
When that bound cannot separate lhs from rhs at the report tolerance (tiny
right-hand sides for far-apart sets at short times), the pairing is
recomputed with a Taylor series of exp(-t L_i) in multiprecision
arithmetic, which keeps the exact zero pattern of far entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse.csgraph import connected_components

from .complex import Face, WeightedComplex, face_label
from .heat import HeatSemigroup
from .metrics import IntrinsicReport, MetricTable, metric_table, set_distance, verify_intrinsic
from .operators import PairWeights, pair_weights

MARGIN_RTOL = 1e-9
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_EPS = np.finfo(float).eps


def _check_st(s: float, t: float) -> None:
    if not (s > 0 and math.isfinite(s)):
        raise ValueError(f"jump size must be finite and positive, got {s}")
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"time must be finite and positive, got {t}")


def zeta_closed(s: float, t: float, r: float) -> float:
    """(1/s^2) (r s asinh(r s / t) - sqrt(t^2 + r^2 s^2) + t); +inf for r = +inf."""
    _check_st(s, t)
    if not r >= 0:
        raise ValueError(f"distance must be nonnegative, got {r}")
    if math.isinf(r):
        return math.inf
    x = r * s
    # sqrt(t^2 + x^2) - t rewritten to avoid cancellation for x << t
    return (x * math.asinh(x / t) - x * x / (math.hypot(t, x) + t)) / (s * s)


def zeta_variational(s: float, t: float, r: float, tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Minimize (t/s^2)(cosh(k s/2) - 1) - k r/2 over k > 0 by golden-section search.

    Returns the negated infimum and the minimizer (0 when r = 0, where the
    infimum is only approached as k -> 0+).
    """
    _check_st(s, t)
    if not (r >= 0 and math.isfinite(r)):
        raise ValueError(f"distance must be finite and nonnegative, got {r}")
    c = t / (s * s)

    def objective(k: float) -> float:
        return 2.0 * c * math.sinh(0.25 * k * s) ** 2 - 0.5 * k * r

    k0 = (2.0 / s) * math.asinh(r * s / t)
    a, b = 1e-12, 4.0 * k0 + 1.0
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(x1)):
            break
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = objective(x2)
    k = 0.5 * (a + b)
    best = min(objective(k), f1, f2)
    return max(0.0, -best), (0.0 if r == 0 else k)


def _gauss_ratio(u: float) -> float:
    # zeta_1(1, u) / (u^2 / 2)
    return 2.0 * (math.asinh(u) - u / (math.hypot(1.0, u) + 1.0)) / u


def gaussian_constant(h: float) -> float:
    """Largest C with zeta_s(t, r) >= C r^2 / (2t) whenever t >= s h r.

    Computed as the infimum of zeta_1(1, u) / (u^2/2) over u in (0, 1/h].
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"h must be finite and positive, got {h}")
    umax = 1.0 / h
    res = minimize_scalar(_gauss_ratio, bounds=(1e-12, umax), method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, _gauss_ratio(umax)))


def asinh_factor(h: float) -> float:
    """h * asinh(1/h): the closed-form lower-bound factor read with asinh."""
    return h * math.asinh(1.0 / h)


class DggContext:
    """Shared, read-only ingredients for checks on one (complex, dimension, metric kind)."""

    def __init__(self, K: WeightedComplex, i: int, kind: str = "mu", method: str = "auto",
                 table: MetricTable | None = None):
        self.K = K
        self.dim = i
        self.kind = kind if table is None else table.kind
        self.pw: PairWeights = pair_weights(K, i)
        self.table = table if table is not None else metric_table(K, i, kind, self.pw)
        self.intrinsic: IntrinsicReport = verify_intrinsic(K, i, self.table, self.pw)
        self.heat = HeatSemigroup(K, i, method)
        self.w = self.heat.w
        self._lam = None
        self._components = None
        self._mp_rows = None

    @property
    def lam(self) -> float:
        if self._lam is None:
            self._lam = self.heat.spectral().lambda_min
        return self._lam

    @property
    def s(self) -> float:
        return self.table.jump

    def hypothesis_problem(self) -> str:
        s = self.s
        if s == 0:
            return "jump size is 0"
        if math.isinf(s):
            return "jump size is infinite (no neighbouring faces)"
        if not self.intrinsic.passed:
            return (f"metric is not intrinsic: ratio {self.intrinsic.worst_ratio:.6g} at "
                    f"{face_label(self.intrinsic.worst_face)}")
        return ""

    def indicator(self, faces) -> np.ndarray:
        v = np.zeros(self.heat.n)
        for F in faces:
            v[self._idx(F)] = 1.0
        return v

    def _idx(self, F: Face) -> int:
        if len(F) != self.dim + 1 or F not in self.K:
            raise ValueError(f"face {face_label(F)} is not a {self.dim}-face of the complex")
        return self.K.index(F)

    def norm(self, f) -> float:
        return math.sqrt(float(np.dot(f * f, self.w)))

    def pairing(self, f: np.ndarray, g: np.ndarray, t: float, rhs: float) -> tuple[float, str]:
        """<exp(-t L) f, g>_w, escalated to multiprecision when float64 cannot decide."""
        val = float(np.dot(self.heat.apply(t, f) * g, self.w))
        if rhs <= 0:
            return val, "float64"
        err = 64.0 * max(self.heat.n, 1) * _EPS * (1.0 + t * self.heat.norm)
        if self.heat.method == "krylov":
            err += 1e-12
        err *= math.exp(-self.lam * t) * self.norm(f) * self.norm(g)
        if err <= 1e-10 * rhs or rhs - abs(val) > err:
            return val, "float64"
        mp_val = self._pairing_mp(f, g, t, rhs)
        if mp_val is None:
            return val, "float64-unresolved"
        return mp_val[0], mp_val[1]

    def _pairing_mp(self, f, g, t, rhs):
        L = self.heat.L
        if self._components is None:
            self._components = connected_components(L, directed=False)[1]
        labels = self._components
        active = np.isin(labels, np.unique(labels[f != 0]))
        idx = np.flatnonzero(active)
        if not len(idx):
            return 0.0, "float64"
        sub = L[idx][:, idx].tocsr()
        linf = float(abs(sub).sum(axis=1).max())
        growth = t * linf
        if growth > 400:
            return None
        fv, gv, wv = f[idx], g[idx], self.w[idx]
        scale = np.abs(fv).max() * float(np.dot(np.abs(gv), wv))
        digits = (growth + math.log(scale / rhs)) / math.log(10.0)
        dps = int(20 + max(0.0, digits))
        with mpmath.workdps(dps):
            rows = [
                [(int(sub.indices[p]), mpmath.mpf(float(sub.data[p]))) for p in range(sub.indptr[r], sub.indptr[r + 1])]
                for r in range(len(idx))
            ]
            mt = mpmath.mpf(t)
            term = [mpmath.mpf(float(x)) for x in fv]
            total = list(term)
            bound = mpmath.mpf(10) ** (-(dps - 3)) * mpmath.mpf(float(np.abs(fv).max()))
            k = 0
            while True:
                k += 1
                c = -mt / k
                term = [c * mpmath.fsum(v * term[j] for j, v in row) for row in rows]
                total = [a + b for a, b in zip(total, term)]
                if k > 2 * growth and max(abs(x) for x in term) < bound:
                    break
            val = mpmath.fsum(total[j] * mpmath.mpf(float(gv[j])) * mpmath.mpf(float(wv[j])) for j in range(len(idx)))
            return float(val), f"mp{dps}"


@dataclass
class DggReport:
    form: str
    dim: int
    A: list
    B: list
    t: float
    kind: str
    rho: float = math.nan
    s: float = math.nan
    lam: float = math.nan
    zeta: float = math.nan
    lhs: float = math.nan
    rhs: float = math.nan
    margin: float = math.nan
    valid: bool = True
    reason: str = ""
    precision: str = "float64"
    extra: dict = field(default_factory=dict)

    @property
    def computed(self) -> bool:
        return not math.isnan(self.lhs)

    @property
    def passed(self) -> bool:
        if not self.computed:
            return False
        if self.rhs == 0:
            return self.lhs == 0
        return self.margin >= -MARGIN_RTOL * self.rhs

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "dim": self.dim,
            "A": [face_label(F) for F in self.A],
            "B": [face_label(F) for F in self.B],
            "t": self.t,
            "kind": self.kind,
            "rho": self.rho,
            "s": self.s,
            "lambda": self.lam,
            "zeta": self.zeta,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "valid": self.valid,
            "passed": self.passed,
            "reason": self.reason,
            "precision": self.precision,
            **self.extra,
        }


def _context(K, i, kind, ctx) -> DggContext:
    if ctx is None:
        return DggContext(K, i, kind)
    if ctx.K is not K or ctx.dim != i or ctx.kind != kind:
        raise ValueError("context was built for a different complex, dimension or metric kind")
    return ctx


def _start(form, K, i, A, B, t, kind, ctx):
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"time must be finite and positive, got {t}")
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("face sets A and B must be nonempty")
    ctx = _context(K, i, kind, ctx)
    for F in A + B:
        ctx._idx(F)
    report = DggReport(form, i, A, B, float(t), ctx.kind)
    report.s = ctx.s
    problem = ctx.hypothesis_problem()
    if problem:
        report.valid = False
        report.reason = problem
    return ctx, report


def _finish(ctx: DggContext, report: DggReport, f, g, scale_lhs: float = 1.0, scale_rhs_norms=None):
    s = report.s
    if not (s > 0 and math.isfinite(s)):
        return report
    rho = set_distance(ctx.table, report.A, report.B)
    lam = ctx.lam
    zeta = zeta_closed(s, report.t, rho)
    norms = scale_rhs_norms if scale_rhs_norms is not None else ctx.norm(f) * ctx.norm(g)
    rhs = 0.0 if math.isinf(zeta) else norms * math.exp(-lam * report.t - zeta)
    val, precision = ctx.pairing(f, g, report.t, rhs)
    report.rho, report.lam, report.zeta = rho, lam, zeta
    report.lhs = abs(val) * scale_lhs
    report.rhs = rhs * scale_lhs
    report.margin = report.rhs - report.lhs
    report.precision = precision
    return report


def dgg_pairing_check(K: WeightedComplex, i: int, A, B, t: float, kind: str = "mu",
                      ctx: DggContext | None = None) -> DggReport:
    """|sum_{F in A, F' in B} p_t(F, F') w(F) w(F')| against sqrt(w(A) w(B)) exp(-lambda t - zeta)."""
    ctx, report = _start("pairing", K, i, A, B, t, kind, ctx)
    return _finish(ctx, report, ctx.indicator(report.A), ctx.indicator(report.B))


def dgg_functional_check(K: WeightedComplex, i: int, f, g, A, B, t: float, kind: str = "mu",
                         ctx: DggContext | None = None) -> DggReport:
    """|<exp(-t L_i) f, g>_w| against exp(-lambda t - zeta) ||f|| ||g||, supp f in A, supp g in B."""
    ctx, report = _start("functional", K, i, A, B, t, kind, ctx)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    for name, v, S in (("f", f, report.A), ("g", g, report.B)):
        if v.shape != (ctx.heat.n,):
            raise ValueError(f"{name} must have length {ctx.heat.n}")
        outside = v * (1.0 - ctx.indicator(S))
        if np.any(outside != 0):
            bad = ctx.heat.faces[int(np.flatnonzero(outside)[0])]
            raise ValueError(f"support of {name} leaves its face set at {face_label(bad)}")
    return _finish(ctx, report, f, g)


def pointwise_kernel_check(K: WeightedComplex, i: int, F: Face, G: Face, t: float, kind: str = "mu",
                           ctx: DggContext | None = None) -> DggReport:
    """|p_t(F, G)| against exp(-lambda t - zeta_s(t, rho(F, G))) / sqrt(w(F) w(G)).

    With the canonical metric this is the bound with s = 1/((i+1) sqrt(b)).
    """
    ctx, report = _start("pointwise", K, i, [F], [G], t, kind, ctx)
    wF, wG = K.weight(F), K.weight(G)
    return _finish(ctx, report, ctx.indicator([F]), ctx.indicator([G]),
                   scale_lhs=1.0 / (wF * wG), scale_rhs_norms=math.sqrt(wF * wG))


@dataclass
class CorollaryReport:
    h: float
    C: float
    t: float
    rho: float
    s: float
    lam: float
    lhs: float
    bound: float
    zeta_lower_ok: bool
    valid: bool
    reason: str = ""
    precision: str = "float64"

    @property
    def passed(self) -> bool:
        if self.bound == 0:
            return self.lhs == 0 and self.zeta_lower_ok
        return self.zeta_lower_ok and self.bound - self.lhs >= -MARGIN_RTOL * self.bound

    def to_dict(self) -> dict:
        return {**self.__dict__, "passed": self.passed}


def gaussian_corollary_check(K: WeightedComplex, i: int, A, B, t: float, h: float, kind: str = "mu",
                             ctx: DggContext | None = None) -> CorollaryReport:
    """Gaussian form sqrt(w(A) w(B)) exp(-lambda t) exp(-C rho^2 / (4t)) for t >= s h rho."""
    ctx, report = _start("gaussian", K, i, A, B, t, kind, ctx)
    s = report.s
    if not (s > 0 and math.isfinite(s)):
        raise ValueError(f"jump size {s} violates the hypotheses")
    rho = set_distance(ctx.table, report.A, report.B)
    if not t >= s * h * rho:
        raise ValueError(f"hypothesis t >= s h rho violated: t={t}, s*h*rho={s * h * rho}")
    C = gaussian_constant(h)
    zeta = zeta_closed(s, t, rho)
    zeta_ok = zeta >= C * rho * rho / (2.0 * t) * (1.0 - 1e-12)
    f, g = ctx.indicator(report.A), ctx.indicator(report.B)
    lam = ctx.lam
    bound = math.sqrt(ctx.norm(f) ** 2 * ctx.norm(g) ** 2) * math.exp(-lam * t - C * rho * rho / (4.0 * t))
    val, precision = ctx.pairing(f, g, t, bound)
    return CorollaryReport(h, C, float(t), rho, s, lam, abs(val), bound, bool(zeta_ok),
                           report.valid, report.reason, precision)
