"""Command-line interface.

Exit status: 0 on success, 1 on bad input (or theorem hypotheses not met),
2 when a checked bound is violated.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import dgg, generators, heat, homology, metrics, operators
from .complex import ComplexError, WeightedComplex, face_label
from .io import (
    ComplexFile,
    ComplexFileError,
    fmt,
    heat_state_to_csv,
    metric_table_to_csv,
    operator_to_matrix_market,
    parse_complex,
    parse_face_set,
    reports_to_csv,
    to_json,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2

# library operation -> the subcommand that exposes it
OPERATIONS = {
    "build_complex": "validate",
    "parse_complex": "validate",
    "generate": "validate",
    "sign": "validate",
    "face_degree": "validate",
    "coface_pairs": "validate",
    "coboundary": "laplacian",
    "adjoint_coboundary": "laplacian",
    "hodge_up": "laplacian",
    "hodge_down": "laplacian",
    "hodge_full": "laplacian",
    "pair_weights": "laplacian",
    "greens_formula_check": "laplacian",
    "spectral_bottom": "spectrum",
    "betti_numbers": "betti",
    "kernel_dimension": "betti",
    "bound_b": "metric",
    "mu_weight": "metric",
    "metric_table": "metric",
    "verify_intrinsic": "metric",
    "set_distance": "metric",
    "apply_semigroup": "heat",
    "heat_kernel_column": "heat",
    "energy_functional": "heat",
    "dgg_pairing_check": "dgg-check",
    "dgg_functional_check": "dgg-check",
    "pointwise_kernel_check": "dgg-check",
    "gaussian_corollary_check": "dgg-check",
    "zeta_closed": "zeta",
    "zeta_variational": "zeta",
    "gaussian_constant": "zeta",
    "sweep": "sweep",
}

SUBCOMMANDS = ("validate", "laplacian", "spectrum", "betti", "metric", "heat", "dgg-check", "zeta", "sweep")


class InputError(Exception):
    pass


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(spec: str) -> list[float]:
    try:
        return [float(x) for x in spec.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad number list {spec!r}") from None


def _load(args) -> WeightedComplex:
    if not args.complex:
        raise InputError("--complex PATH is required")
    return parse_complex(args.complex)


def _dim(args, K: WeightedComplex) -> int:
    if args.dim is None:
        raise InputError("--dim is required")
    if not 0 <= args.dim <= K.dim:
        raise InputError(f"dimension {args.dim} out of range 0..{K.dim}")
    return args.dim


_BALL = re.compile(r"^\s*ball\(\s*(\{[^}]*\})\s*,\s*([^)]+)\)\s*$")


def _face_set(spec: str, K: WeightedComplex, i: int, kind: str, table=None) -> list:
    if spec is None:
        raise InputError("face set missing (--set-a / --set-b)")
    if spec.strip() == "all":
        return list(K.faces(i))
    m = _BALL.match(spec)
    try:
        if m:
            center = parse_face_set(m.group(1))[0]
            table = table if table is not None else metrics.metric_table(K, i, kind)
            return metrics.ball(table, center, float(m.group(2)))
        faces = parse_face_set(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    for F in faces:
        if len(F) != i + 1 or F not in K:
            raise InputError(f"face {face_label(F)} is not a {i}-face of the complex")
    return faces


def cmd_validate(args) -> int:
    if args.generate:
        K = _generated(args)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(ComplexFile.from_complex(K).to_json())
            return EXIT_OK
    else:
        K = _load(args)
    info = K.summary()
    if args.dim is not None:
        i = _dim(args, K)
        pairs = list(K.coface_pairs(i))
        info["dimension"] = i
        info["up_pairs"] = sum(1 for p in pairs if p[3] == "up")
        info["down_pairs"] = sum(1 for p in pairs if p[3] == "down")
        info["degrees"] = {face_label(F): K.degree(F) for F in K.faces(i)}
        info["boundary_signs"] = {
            face_label(F): {face_label(E): s for s, E in K.boundary(F)} for F in K.faces(i)
        }
    sys.stdout.write(to_json(info))
    return EXIT_OK


def _generated(args) -> WeightedComplex:
    kind = args.generate
    reduced = not args.nonreduced
    if kind == "random-flag":
        return generators.random_flag(args.n, args.p, args.seed, policy=args.policy or "explicit",
                                      reduced=reduced, max_dim=args.max_dim)
    if kind == "random-graph":
        return generators.random_graph(args.n, args.p, args.seed, reduced=reduced)
    if kind in ("full-simplex", "sphere-boundary"):
        return generators.generate(kind, args.n, policy=args.policy or "unit", reduced=reduced,
                                   seed=args.seed if (args.policy or "unit") != "unit" else None)
    if kind == "octahedron":
        return generators.octahedron_boundary(policy=args.policy or "unit", reduced=reduced)
    raise InputError(f"unknown generator {kind!r}")


def cmd_laplacian(args) -> int:
    K = _load(args)
    i = _dim(args, K)
    if args.green_trials:
        rng = np.random.default_rng(args.seed)
        rows = [["trial", "lhs", "rhs", "residual"]]
        worst = 0.0
        for k in range(args.green_trials):
            f, g = rng.standard_normal((2, K.n_faces(i)))
            chk = operators.greens_formula_check(K, i, f, g)
            worst = max(worst, chk.residual)
            rows.append([str(k), fmt(chk.lhs), fmt(chk.rhs), fmt(chk.residual)])
        _emit(args, "\n".join(",".join(r) for r in rows) + "\n")
        return EXIT_OK if worst < 1e-10 else EXIT_VIOLATION
    part = args.part
    if part == "pair-weights":
        pw = operators.pair_weights(K, i)
        op = operators.SparseOperator.from_matrix(pw.w_total, pw.faces, pw.faces)
    elif part == "coboundary":
        op = operators.coboundary(K, i)
    elif part == "adjoint":
        op = operators.adjoint_coboundary(K, i)
    else:
        op = operators.hodge(K, i, part)
    if args.format == "json":
        _emit(args, to_json({
            "rows": [face_label(F) for F in op.row_faces],
            "cols": [face_label(F) for F in op.col_faces],
            "entries": [[int(r), int(c), float(v)] for r, c, v in zip(op.rows, op.cols, op.values)],
        }))
    else:
        _emit(args, operator_to_matrix_market(op))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    K = _load(args)
    i = _dim(args, K)
    data = heat.spectral_bottom(K, i)
    if args.format == "json":
        out = data.to_dict()
        if data.eigenvalues is not None:
            out["eigenvalues"] = data.eigenvalues
        _emit(args, to_json(out))
    else:
        values = data.eigenvalues if data.eigenvalues is not None else [data.lambda_min]
        _emit(args, "".join(fmt(v) + "\n" for v in values))
    return EXIT_OK


def cmd_betti(args) -> int:
    K = _load(args)
    betti = homology.betti_numbers(K)
    dims = [args.dim] if args.dim is not None else list(range(K.dim + 1))
    if args.dim is not None:
        _dim(args, K)
    rows = [{"dim": i, "betti": betti[i], "kernel_dim": homology.kernel_dimension(K, i)} for i in dims]
    if args.format == "json":
        _emit(args, to_json({"reduced": K.reduced, "dims": rows}))
    else:
        _emit(args, "dim,betti,kernel_dim\n" + "".join(f"{r['dim']},{r['betti']},{r['kernel_dim']}\n" for r in rows))
    return EXIT_OK if all(r["betti"] == r["kernel_dim"] for r in rows) else EXIT_VIOLATION


def cmd_metric(args) -> int:
    K = _load(args)
    i = _dim(args, K)
    pw = operators.pair_weights(K, i)
    table = metrics.metric_table(K, i, args.kind, pw)
    report = metrics.verify_intrinsic(K, i, table, pw)
    if args.set_a or args.set_b:
        A = _face_set(args.set_a, K, i, args.kind, table)
        B = _face_set(args.set_b, K, i, args.kind, table)
        _emit(args, to_json({"rho": metrics.set_distance(table, A, B), "kind": args.kind}))
        return EXIT_OK
    if args.format == "json":
        b = operators.bound_b(K, i)
        hops = {}
        coo = pw.w_total.tocoo()
        for r, c in zip(coo.row, coo.col):
            if r < c:
                F, G = pw.faces[r], pw.faces[c]
                hops[f"{face_label(F)}|{face_label(G)}"] = metrics.mu_weight(K, i, F, G, pw)
        _emit(args, to_json({
            "dim": i, "kind": args.kind, "reduced": K.reduced, "jump": table.jump,
            "b": b.value, "b_face": face_label(b.face) if b.face is not None else None,
            "intrinsic": {"passed": report.passed, "worst_ratio": report.worst_ratio,
                          "worst_face": face_label(report.worst_face) if report.worst_face is not None else None},
            "mu_weights": hops,
            "faces": [face_label(F) for F in table.faces],
            "dist": table.dist,
        }))
    else:
        _emit(args, metric_table_to_csv(table))
    return EXIT_OK


def cmd_heat(args) -> int:
    K = _load(args)
    i = _dim(args, K)
    times = _floats(args.t) if args.t else [1.0]
    if any(t < 0 for t in times):
        raise InputError("times must be nonnegative")
    semigroup = heat.HeatSemigroup(K, i)
    if args.face:
        faces = parse_face_set(args.face)
        F = faces[0]
        if len(F) != i + 1 or F not in K:
            raise InputError(f"face {face_label(F)} is not a {i}-face of the complex")
        states = [heat.HeatState(i, t, semigroup.kernel_column(t, F)) for t in times]
    else:
        A = _face_set(args.set_a or "all", K, i, args.kind)
        f0 = np.zeros(K.n_faces(i))
        for F in A:
            f0[K.index(F)] = 1.0
        states = [heat.HeatState(i, t, semigroup.apply(t, f0)) for t in times]
    energies = None
    if args.energy_center:
        center = parse_face_set(args.energy_center)[0]
        table = metrics.metric_table(K, i, args.kind)
        rho = np.minimum(table.column(center), args.cap)
        zeta = args.kappa * rho
        energies = [heat.energy_functional(K, i, s, zeta) for s in states]
    if args.format == "json":
        out = [{"t": s.time, "values": dict(zip((face_label(F) for F in K.faces(i)), s.values))} for s in states]
        if energies is not None:
            for o, e in zip(out, energies):
                o["energy"] = e
        _emit(args, to_json(out))
    else:
        parts = []
        for k, s in enumerate(states):
            header = f"# t={fmt(s.time)}" + (f" energy={fmt(energies[k])}" if energies else "")
            parts.append(header + "\n" + heat_state_to_csv(K, s))
        _emit(args, "".join(parts))
    return EXIT_OK


def _run_checks(K, i, kind, form, A, B, times, args, ctx=None) -> list:
    ctx = ctx or dgg.DggContext(K, i, kind)
    out = []
    for t in times:
        if form == "pairing":
            out.append(dgg.dgg_pairing_check(K, i, A, B, t, kind, ctx))
        elif form == "pointwise":
            for F in A:
                for G in B:
                    out.append(dgg.pointwise_kernel_check(K, i, F, G, t, kind, ctx))
        elif form == "functional":
            rng = np.random.default_rng(args.seed)
            f = np.zeros(K.n_faces(i))
            g = np.zeros(K.n_faces(i))
            for F in A:
                f[K.index(F)] = rng.standard_normal()
            for G in B:
                g[K.index(G)] = rng.standard_normal()
            out.append(dgg.dgg_functional_check(K, i, f, g, A, B, t, kind, ctx))
        else:
            out.append(dgg.gaussian_corollary_check(K, i, A, B, t, args.h, kind, ctx))
    return out


def _status(reports) -> int:
    if any(not r.valid for r in reports):
        return EXIT_INPUT
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_dgg(args) -> int:
    K = _load(args)
    i = _dim(args, K)
    times = _floats(args.t) if args.t else [1.0]
    if any(not t > 0 for t in times):
        raise InputError("times must be strictly positive")
    A = _face_set(args.set_a, K, i, args.kind)
    B = _face_set(args.set_b, K, i, args.kind)
    try:
        reports = _run_checks(K, i, args.kind, args.form, A, B, times, args)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.format == "csv" and args.form != "gaussian":
        _emit(args, reports_to_csv(reports))
    else:
        payload = [r.to_dict() for r in reports]
        _emit(args, to_json(payload[0] if len(payload) == 1 else payload))
    return _status(reports)


def cmd_zeta(args) -> int:
    if args.h is not None:
        try:
            _emit(args, to_json({"h": args.h, "C": dgg.gaussian_constant(args.h),
                                 "h_asinh_inv_h": dgg.asinh_factor(args.h)}))
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return EXIT_OK
    if args.s is None or args.t is None or args.r is None:
        raise InputError("zeta needs --s, --t and --r (or --h)")
    t = _floats(args.t)
    try:
        rows = []
        for tv in t:
            for rv in _floats(args.r):
                z = dgg.zeta_closed(args.s, tv, rv)
                if args.variational:
                    zv, k = dgg.zeta_variational(args.s, tv, rv)
                    rows.append({"s": args.s, "t": tv, "r": rv, "zeta": z, "zeta_variational": zv, "kappa_star": k})
                else:
                    rows.append({"s": args.s, "t": tv, "r": rv, "zeta": z})
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.format == "json":
        _emit(args, to_json(rows[0] if len(rows) == 1 else rows))
    elif len(rows) == 1 and not args.variational:
        _emit(args, fmt(rows[0]["zeta"]) + "\n")
    else:
        keys = list(rows[0])
        _emit(args, ",".join(keys) + "\n" + "".join(",".join(fmt(r[k]) for k in keys) + "\n" for r in rows))
    return EXIT_OK


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HODGE_DGG_THREADS", "1")))
    except ValueError:
        return 1


def sweep(seed: int, trials: int, n: int = 9, p: float = 0.5, kinds=("mu", "canonical"),
          complexes: int = 4, threads: int = 1) -> list:
    """Randomized pairing checks over random flag complexes; reports in a deterministic order."""
    rng = np.random.default_rng(seed)
    jobs = []
    for c in range(complexes):
        K = generators.random_flag(n, p, int(rng.integers(2**31)), max_dim=3)
        for i in range(K.dim + 1):
            if K.n_faces(i) < 2:
                continue
            for kind in kinds:
                jobs.append((K, i, kind))
    if not jobs:
        return []
    plan = []
    for k in range(trials):
        K, i, kind = jobs[int(rng.integers(len(jobs)))]
        faces = K.faces(i)
        na, nb = (int(x) for x in rng.integers(1, min(4, len(faces)) + 1, size=2))
        A = [faces[j] for j in sorted(rng.choice(len(faces), na, replace=False))]
        B = [faces[j] for j in sorted(rng.choice(len(faces), nb, replace=False))]
        t = float(10 ** rng.uniform(-2, 2))
        plan.append((K, i, kind, A, B, t))
    contexts = {}
    for K, i, kind in jobs:
        contexts[(id(K), i, kind)] = dgg.DggContext(K, i, kind)

    def run(item):
        K, i, kind, A, B, t = item
        return dgg.dgg_pairing_check(K, i, A, B, t, kind, contexts[(id(K), i, kind)])

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, plan))


def cmd_sweep(args) -> int:
    reports = sweep(args.seed, args.trials, n=args.n, p=args.p, complexes=args.complexes, threads=_threads())
    valid = [r for r in reports if r.valid]
    if args.format == "json":
        _emit(args, to_json([r.to_dict() for r in reports]))
    else:
        _emit(args, reports_to_csv(reports))
    return EXIT_OK if all(r.passed for r in valid) else EXIT_VIOLATION


HANDLERS = {
    "validate": cmd_validate,
    "laplacian": cmd_laplacian,
    "spectrum": cmd_spectrum,
    "betti": cmd_betti,
    "metric": cmd_metric,
    "heat": cmd_heat,
    "dgg-check": cmd_dgg,
    "zeta": cmd_zeta,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodge-dgg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="csv", dim=True):
        p.add_argument("--complex", metavar="PATH")
        if dim:
            p.add_argument("--dim", type=int)
        p.add_argument("--format", choices=("csv", "json", "mm"), default=fmt_default)
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--seed", type=int, default=0)
        return p

    p = common(sub.add_parser("validate", help="check a complex file or generate one"), "json")
    p.add_argument("--generate", choices=sorted(generators.GENERATORS))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--policy", choices=("unit", "explicit", "normalized"))
    p.add_argument("--max-dim", type=int)
    p.add_argument("--nonreduced", action="store_true")

    p = common(sub.add_parser("laplacian", help="export an operator"), "mm")
    p.add_argument("--part", choices=("up", "down", "full", "coboundary", "adjoint", "pair-weights"), default="full")
    p.add_argument("--green-trials", type=int, default=0)

    common(sub.add_parser("spectrum", help="eigenvalues and spectral bottom of L_i"))
    common(sub.add_parser("betti", help="Betti numbers vs Hodge kernel dimensions"))

    p = common(sub.add_parser("metric", help="intrinsic metric table"))
    p.add_argument("--kind", choices=metrics.KINDS, default="mu")
    p.add_argument("--set-a")
    p.add_argument("--set-b")

    p = common(sub.add_parser("heat", help="heat semigroup and kernel columns"))
    p.add_argument("--t")
    p.add_argument("--face")
    p.add_argument("--set-a")
    p.add_argument("--kind", choices=metrics.KINDS, default="mu")
    p.add_argument("--energy-center")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--cap", type=float, default=10.0)

    p = common(sub.add_parser("dgg-check", help="check the heat-kernel bound"), "json")
    p.add_argument("--set-a", required=True)
    p.add_argument("--set-b", required=True)
    p.add_argument("--t")
    p.add_argument("--kind", choices=metrics.KINDS, default="mu")
    p.add_argument("--form", choices=("pairing", "functional", "pointwise", "gaussian"), default="pairing")
    p.add_argument("--h", type=float, default=1.0)

    p = common(sub.add_parser("zeta", help="rate function zeta_s(t, r)"), dim=False)
    p.add_argument("--s", type=float)
    p.add_argument("--t")
    p.add_argument("--r")
    p.add_argument("--h", type=float)
    p.add_argument("--variational", action="store_true")

    p = common(sub.add_parser("sweep", help="randomized bound checks"), dim=False)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--complexes", type=int, default=4)
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--p", type=float, default=0.5)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return HANDLERS[args.command](args)
    except (InputError, ComplexError, ComplexFileError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
