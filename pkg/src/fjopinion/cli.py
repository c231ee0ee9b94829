"""Command-line surface: ingestion, metric runs, simulation, spectral
analysis, verification sweeps, and the desk-scale benchmark harness.

Exit codes: 1 input error, 2 numerical failure, 3 size guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from fjopinion.errors import GraphInputError, NumericalError, SizeGuardError
from fjopinion import verify as verify_mod
from fjopinion.dynamics import (
    DENSE_CAP,
    convergence_bound,
    simulate_until,
    spectral_radius,
)
from fjopinion.generate import (
    DISTRIBUTIONS,
    generate_opinions,
    generate_stubbornness,
    random_regular_graph,
)
from fjopinion.graph import (
    StubbornnessVector,
    eigen_bounds,
    load_edge_list,
    load_node_values,
)
from fjopinion.metrics import approxim, metrics_exact

EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_SIZE_GUARD = 3


def _load_graph(args):
    if not args.graph:
        raise GraphInputError("--graph is required")
    return load_edge_list(args.graph)


def _load_stubbornness(g, spec, seed):
    """file path | uniform:C | random:LO,HI (seeded)."""
    if spec.startswith("uniform:"):
        return StubbornnessVector.uniform(g.n, float(spec.split(":", 1)[1]))
    if spec.startswith("random:"):
        lo, hi = (float(x) for x in spec.split(":", 1)[1].split(","))
        return generate_stubbornness(g.n, lo, hi, seed)
    return StubbornnessVector.from_values(load_node_values(g=g, path=spec, name="stubbornness"))


def _load_opinions(g, args):
    if args.opinions:
        return load_node_values(args.opinions, g, name="opinion", lo=-1.0, hi=1.0)
    if args.dist:
        return generate_opinions(g.n, args.dist, args.seed)
    raise GraphInputError("provide --opinions FILE or --dist NAME")


def _write_out(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def cmd_metrics(args) -> int:
    g = _load_graph(args)
    k = _load_stubbornness(g, args.stubbornness, args.seed)
    s = _load_opinions(g, args)
    if args.mode == "exact":
        report = metrics_exact(g, k, s)
    else:
        report = approxim(g, k, s, args.eps)
    print(f"graph            {args.graph}  (n={g.n}, m={g.m})")
    print(f"mode             {report.mode}  certified={report.certified}")
    print(f"conflict         {report.conflict:.12g}")
    print(f"disagreement     {report.disagreement:.12g}")
    print(f"polarization     {report.polarization:.12g}")
    print(f"pd_index         {report.pd_index:.12g}")
    print(f"sum_z            {report.sum_z:.12g}")
    print(f"weighted_sum_z   {report.weighted_sum_z:.12g}")
    print(f"conservation     {report.conservation_residual:.3e}")
    print(f"timing           solve {report.solve_seconds:.3f}s  norms {report.norms_seconds:.3f}s")
    _write_out(args.out, report.to_json())
    return 0


def cmd_simulate(args) -> int:
    g = _load_graph(args)
    k = _load_stubbornness(g, args.stubbornness, args.seed)
    s = _load_opinions(g, args)
    state, trace = simulate_until(g, k, s, z0=s.copy(), eps=args.eps)
    est = spectral_radius(g, k) if g.m else None
    bound = (
        convergence_bound(est, trace.f_norms[0], args.eps)
        if est and 0.0 < est.rho_max < 1.0 and trace.f_norms[0] > args.eps
        else 0
    )
    print(f"stopped at t={state.t} (bound {bound}), |f| = {trace.f_norms[-1]:.3e}")
    if args.out:
        lines = [
            json.dumps({"t": t, "e_norm": e, "f_norm": f})
            for t, (e, f) in enumerate(zip(trace.e_norms, trace.f_norms))
        ]
        _write_out(args.out, "\n".join(lines))
    return 0


def cmd_spectrum(args) -> int:
    g = _load_graph(args)
    k = _load_stubbornness(g, args.stubbornness, args.seed)
    est = spectral_radius(g, k)
    bounds = eigen_bounds(g, k)
    print(f"rho_max          {est.rho_max:.12g}  (residual {est.residual:.2e}, "
          f"{est.iterations} iterations, converged={est.converged})")
    print(f"spectrum of L+K  [{bounds.lower:.6g}, {bounds.upper:.6g}]  "
          f"(coarse upper {bounds.coarse_upper:.6g})")
    if 0.0 < est.rho_max < 1.0:
        print(f"steps to 1e-6    {convergence_bound(est, 1.0, 1e-6)} (from |f(0)|=1)")
    _write_out(
        args.out,
        json.dumps(
            {
                "rho_max": est.rho_max,
                "residual": est.residual,
                "iterations": est.iterations,
                "converged": est.converged,
                "lower": bounds.lower,
                "upper": bounds.upper,
                "coarse_upper": bounds.coarse_upper,
            },
            indent=1,
            sort_keys=True,
        ),
    )
    return 0


def cmd_verify(args) -> int:
    results = verify_mod.run_suite(scale=args.scale, seed=args.seed)
    failed = 0
    for name, passed, total in results:
        status = "PASS" if passed == total else "FAIL"
        if passed != total:
            failed += 1
        print(f"[{status}] {name}: {passed}/{total}")
    if failed:
        print(f"{failed} properties failed")
        return EXIT_NUMERICAL
    print("all properties passed")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",")]
    rows = []
    for n in sizes:
        g = random_regular_graph(n, args.degree, args.seed)
        k = generate_stubbornness(g.n, 0.5, 2.0, args.seed + 1)
        s = generate_opinions(g.n, args.dist, args.seed + 2)
        if g.n <= DENSE_CAP:
            t0 = time.perf_counter()
            metrics_exact(g, k, s)
            exact_s = time.perf_counter() - t0
        else:
            exact_s = None  # refused above the dense cap
        t0 = time.perf_counter()
        report = approxim(g, k, s, args.eps)
        approx_s = time.perf_counter() - t0
        rows.append(
            {
                "n": g.n,
                "m": g.m,
                "exact_seconds": exact_s,
                "approx_seconds": approx_s,
                "solver_iterations": report.solver_iterations,
                "certified": report.certified,
            }
        )
        exact_str = f"{exact_s:10.3f}" if exact_s is not None else f"{'-':>10}"
        print(f"n={g.n:>8}  m={g.m:>9}  exact {exact_str}s  approx {approx_s:10.3f}s")
    exponent = None
    if len(rows) >= 2:
        logm = np.log([r["m"] for r in rows])
        logt = np.log([r["approx_seconds"] for r in rows])
        exponent = float(np.polyfit(logm, logt, 1)[0])
        print(f"approx time vs m: log-log slope {exponent:.3f}")
    _write_out(
        args.out,
        "\n".join(json.dumps(r, sort_keys=True) for r in rows)
        + ("\n" + json.dumps({"slope": exponent}) if exponent is not None else ""),
    )
    return 0


def cmd_gen_opinions(args) -> int:
    values = generate_opinions(args.n, args.dist, args.seed)
    lines = [f"{i} {float(v)!r}" for i, v in enumerate(values)]
    if args.out:
        _write_out(args.out, "\n".join(lines))
    else:
        print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjopinion",
        description="Opinion dynamics with heterogeneous stubbornness: metrics, "
        "simulation, spectral analysis, verification, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", help="edge-list file: 'u v [w]' per line")
            p.add_argument(
                "--stubbornness",
                default="uniform:1.0",
                help="file | uniform:C | random:LO,HI",
            )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write machine-readable report here")
        p.add_argument("--threads", type=int, default=1,
                       help="thread budget; 1 guarantees bit reproducibility")

    p = sub.add_parser("metrics", help="exact or approximate metric run")
    common(p)
    p.add_argument("--opinions", help="'node value' file, values in [-1, 1]")
    p.add_argument("--dist", choices=DISTRIBUTIONS)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="iterate the update rule to convergence")
    common(p)
    p.add_argument("--opinions")
    p.add_argument("--dist", choices=DISTRIBUTIONS)
    p.add_argument("--eps", type=float, default=1e-8)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="spectral radius and eigenvalue bounds")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run the cross-module property suites")
    common(p, graph=False)
    p.add_argument("--scale", choices=("small", "full"), default="small")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="timing table on synthetic regular graphs")
    common(p, graph=False)
    p.add_argument("--sizes", required=True, help="comma-separated node counts")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    p.add_argument("--eps", type=float, default=1e-6)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-opinions", help="write a seeded innate-opinion file")
    common(p, graph=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", choices=DISTRIBUTIONS, required=True)
    p.set_defaults(func=cmd_gen_opinions)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1):
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        return args.func(args)
    except (GraphInputError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
