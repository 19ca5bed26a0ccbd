"""Command-line front end: generate, validate, simulate, compare, bench."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import backend
from .errors import RcmcError
from .generator import GeneratorSpec, generate
from .instance_io import read_instance, read_raw_k, write_instance
from .model import RateConstantMatrix
from .reports import METHODS, divergence_index, make_p, run_method, run_step1

SPARSE_TRAJECTORY_ABOVE = 10_000


def _add_common(p):
    p.add_argument("--backend", choices=("auto", "python", "native"), default="auto",
                   help="kernel backend (default: native when built)")
    p.add_argument("--db-tol", type=float, default=1e-9,
                   help="detailed-balance relative tolerance for validation")
    p.add_argument("--raw-k", action="store_true",
                   help="input holds directed 'u v K_uv' triples instead of edge weights")


def _load(args) -> RateConstantMatrix:
    reader = read_raw_k if args.raw_k else read_instance
    return reader(args.instance, db_tol=args.db_tol)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, default=float)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_generate(args) -> int:
    spec = GeneratorSpec(
        n=args.n,
        degree=args.degree,
        seed=args.seed,
        weight_log10=(args.weight_range[0], args.weight_range[1]),
        pi_log10=(args.pi_range[0], args.pi_range[1]),
    )
    K = generate(spec)
    write_instance(K, args.out, header_lines=spec.header_lines())
    print(f"wrote {args.out}: n={K.n} edges={K.nnz // 2}")
    return 0


def cmd_validate(args) -> int:
    K = _load(args)
    print(f"valid: n={K.n} off-diagonal entries={K.nnz} "
          f"pi in [{K.pi.min():.3e}, {K.pi.max():.3e}]")
    return 0


def _trajectory_rows(trajectory, n):
    for j, t, q in trajectory.entries:
        if n > SPARSE_TRAJECTORY_ABOVE:
            pairs = " ".join(f"{v + 1}:{float(q.x[v])!r}" for v in np.flatnonzero(q.x))
            yield [j, repr(t), pairs]
        else:
            yield [j, repr(t)] + [repr(float(x)) for x in q.x]


def cmd_simulate(args) -> int:
    K = _load(args)
    p = make_p(args.p, K)
    report, result, factor, trajectory = run_method(
        args.method, K, args.t_max, eps_relax=args.eps_relax,
        p=p, mode=args.mode, full_pivots=args.full_pivots,
    )
    out = args.out or "trajectory"
    if args.format == "csv":
        traj_path = f"{out}.csv"
        with open(traj_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            if K.n > SPARSE_TRAJECTORY_ABOVE:
                writer.writerow(["j", "t_seconds", "q_pairs"])
            else:
                writer.writerow(["j", "t_seconds"] + [f"q_{v}" for v in range(1, K.n + 1)])
            writer.writerows(_trajectory_rows(trajectory, K.n))
    else:
        traj_path = f"{out}.json"
        _write_json(traj_path, {
            "mode": trajectory.mode,
            "entries": [
                {"j": j, "t_seconds": t, "q": [float(x) for x in q.x]}
                for j, t, q in trajectory.entries
            ],
        })
    _write_json(f"{out}.report.json", report.as_dict())
    print(f"method={args.method} k={report.k} step1={report.t_step1:.3f}s "
          f"step2={report.t_step2:.3f}s -> {traj_path}")
    return 0


def cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) < 2:
        raise SystemExit("compare needs at least 2 methods")
    for m in methods:
        if m not in METHODS:
            raise SystemExit(f"unknown method {m!r}; choose from {METHODS}")
    K = _load(args)
    # The dense greedy is always the divergence reference, whether listed or not.
    t0 = time.perf_counter()
    ref_result, ref_factor, _ = run_step1("greedy", K, args.t_max)
    ref_wall = time.perf_counter() - t0
    rows = []
    for m in methods:
        if m == "greedy":
            report, result = None, ref_result
            wall = ref_wall
        else:
            report, result, factor, _ = run_method(
                m, K, args.t_max, eps_relax=args.eps_relax, reference=ref_result
            )
            wall = report.t_step1
        rows.append({
            "method": m,
            "k": result.k,
            "t_step1": wall,
            "divergence_index": divergence_index(ref_result.pivots, result.pivots),
            "counters": report.counters if report else None,
        })
    payload = {
        "schema": "rcmc-compare",
        "version": 1,
        "backend": backend.current(),
        "n": K.n,
        "t_max": args.t_max,
        "reference": "greedy",
        "reference_k": ref_result.k,
        "methods": rows,
    }
    _write_json(args.out, payload)
    for row in rows:
        div = row["divergence_index"]
        print(f"{row['method']:>8}: k={row['k']:<6} step1={row['t_step1']:.3f}s "
              f"divergence={'none' if div is None else div}")
    return 0


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    backends = (
        list(backend.available()) if args.backend == "both" else [args.backend]
    )
    t_grid = [float(t) for t in args.t_max_grid.split(",")]
    fieldnames = [
        "backend", "instance", "method", "n", "k", "t_step1", "t_step2_full",
        "m_offdiag", "m_diag", "m_offdiag_lo", "m_offdiag_hi",
        "m_diag_lo", "m_diag_hi", "speedup_vs_greedy", "t_max",
    ]
    rows = []
    for instance in args.instances:
        args.instance = instance
        K = _load(args)
        p = make_p(args.p, K)
        for be in backends:
            backend.use(None if be == "auto" else be)
            for t_max in t_grid:
                greedy_time = None
                for m in methods:
                    report, result, factor, _ = run_method(
                        m, K, t_max, eps_relax=args.eps_relax, p=p, mode="full"
                    )
                    if m == "greedy":
                        greedy_time = report.t_step1
                    c = report.counters or {}
                    env_off = c.get("m_offdiag_envelope") or [None, None]
                    env_diag = c.get("m_diag_envelope") or [None, None]
                    rows.append({
                        "backend": backend.current(),
                        "instance": instance,
                        "method": m,
                        "n": K.n,
                        "k": report.k,
                        "t_step1": report.t_step1,
                        "t_step2_full": report.t_step2,
                        "m_offdiag": c.get("m_offdiag"),
                        "m_diag": c.get("m_diag"),
                        "m_offdiag_lo": env_off[0],
                        "m_offdiag_hi": env_off[1],
                        "m_diag_lo": env_diag[0],
                        "m_diag_hi": env_diag[1],
                        "speedup_vs_greedy": (
                            greedy_time / report.t_step1
                            if greedy_time and m != "greedy" and report.t_step1 > 0
                            else None
                        ),
                        "t_max": t_max,
                    })
        backend.use(None)
    outfh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(outfh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            outfh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rcmc",
        description="Rate constant matrix contraction: greedy steady-state "
                    "selection plus yield projection on reaction networks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded synthetic instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--degree", type=float, default=3.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--weight-range", type=float, nargs=2, default=(0.0, 6.0),
                   metavar=("LO", "HI"), help="log10 range of edge weights")
    g.add_argument("--pi-range", type=float, nargs=2, default=(0.0, 0.0),
                   metavar=("LO", "HI"), help="log10 range of stationary entries")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="parse and validate an instance file")
    v.add_argument("instance")
    _add_common(v)
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="run one method and project yields")
    s.add_argument("instance")
    s.add_argument("--t-max", type=float, default=86400.0)
    s.add_argument("--method", choices=METHODS, default="relaxed")
    s.add_argument("--mode", choices=("full", "last"), default="full")
    s.add_argument("--eps-relax", type=float, default=None)
    s.add_argument("--p", default="point:1")
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--full-pivots", action="store_true")
    _add_common(s)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="run methods against the greedy reference")
    c.add_argument("instance")
    c.add_argument("--t-max", type=float, default=86400.0)
    c.add_argument("--methods", default=",".join(METHODS))
    c.add_argument("--eps-relax", type=float, default=None)
    c.add_argument("--out", default=None)
    _add_common(c)
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="timing/counter CSV over instances")
    b.add_argument("instances", nargs="+")
    b.add_argument("--t-max-grid", default="86400")
    b.add_argument("--methods", default=",".join(METHODS))
    b.add_argument("--eps-relax", type=float, default=None)
    b.add_argument("--p", default="point:1")
    b.add_argument("--out", default=None)
    b.add_argument("--backend", choices=("auto", "python", "native", "both"),
                   default="auto")
    b.add_argument("--db-tol", type=float, default=1e-9)
    b.add_argument("--raw-k", action="store_true")
    b.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "backend", "auto") in ("python", "native"):
        backend.use(args.backend)
    try:
        return args.func(args)
    except RcmcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        backend.use(None)


if __name__ == "__main__":
    sys.exit(main())
