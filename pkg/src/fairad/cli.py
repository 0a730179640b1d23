"""Command-line interface: ``fairad generate | cluster | bench``.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""
import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .algebraic import RelaxationConfig, default_beta
from .baseline import SCConfig, run_sc
from .coarsening import CoarseningConfig
from .errors import FairADError, StageError, ValidationError
from .fairness import GroupPartition, load_groups
from .graph import largest_connected_component, load_edge_list, write_id_map
from .kernels import BACKEND
from .metrics import compile_report
from .msbm import MsbmConfig, config_dict, load_labels, msbm_generate, write_instance, write_manifest
from .solver import FairADConfig, run_fairad

log = logging.getLogger("fairad")


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def cmd_generate(args):
    cfg = MsbmConfig(n=args.n, h=args.h, k=args.k, a=args.a, b=args.b, c=args.c, d=args.d,
                     seed=args.seed)
    inst = msbm_generate(cfg)
    files = write_instance(inst, args.out)
    manifest = {"command": "generate", "version": __version__, "config": config_dict(cfg),
                "edges": inst.graph.num_edges, "files": [os.path.basename(f) for f in files]}
    write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    print(f"wrote {inst.graph.n} nodes / {inst.graph.num_edges} edges to {args.out}")
    return 0


def fairad_config(args, n):
    """Resolve the FairAD configuration; beta is fixed here from the post-LCC size."""
    beta = args.beta if args.beta is not None else default_beta(n)
    relax = RelaxationConfig(R=args.R, tau=args.tau, mu=args.mu, beta=beta, seed=args.seed)
    return FairADConfig(relaxation=relax, coarsening=CoarseningConfig(alpha=args.alpha),
                        m=args.m, tol=args.tol)


def _resolved(args, n, beta):
    return {"method": args.method, "k": args.k, "mu": args.mu, "alpha": args.alpha, "R": args.R,
            "tau": args.tau, "beta": beta, "m": args.m, "seed": args.seed, "tol": args.tol,
            "edges": args.edges, "groups": args.groups, "truth": args.truth, "out": args.out,
            "delimiter": args.delimiter, "n_clustered": n}


def cmd_cluster(args):
    if args.method == "fairad" and not args.groups:
        raise ValidationError("--groups is required for --method fairad")
    groups = load_groups(args.groups) if args.groups else None
    truth = load_labels(args.truth) if args.truth is not None else None
    n_hint = max(groups.n if groups else 0, len(truth) if truth is not None else 0)
    g = load_edge_list(args.edges, delimiter=args.delimiter, n=n_hint or None)
    for name, lab in (("groups", groups), ("truth", truth)):
        size = None if lab is None else (lab.n if name == "groups" else len(lab))
        if size is not None and size != g.n:
            raise ValidationError(f"{name} file covers {size} nodes, edge list spans {g.n}")
    if truth is not None and (truth.min() < 0 or truth.max() >= args.k):
        raise ValidationError(f"truth labels must lie in [0, {args.k})")

    meta = [lab for lab in ((groups.group_of if groups else None), truth) if lab is not None]
    sub, old_ids, filtered = largest_connected_component(g, meta or None)
    filtered = list(filtered or [])
    sub_groups = GroupPartition.from_labels(filtered.pop(0)) if groups else None
    sub_truth = filtered.pop(0) if truth is not None else None

    os.makedirs(args.out, exist_ok=True)
    write_id_map(os.path.join(args.out, "id_map.csv"), old_ids)
    beta = None
    timings = {}
    if args.method == "fairad":
        cfg = fairad_config(args, sub.n)
        beta = cfg.relaxation.beta
        artifacts = {}
        assignment, diag = run_fairad(sub, sub_groups, args.k, cfg, artifacts=artifacts)
        timings = diag["timings_ms"]
        _write_json(os.path.join(args.out, "diagnostics.json"), diag)
        if args.dump_test_vectors:
            np.savetxt(os.path.join(args.out, "test_vectors.csv"), artifacts["test_vectors"],
                       delimiter=",", fmt="%.17g")
        if args.dump_hierarchy:
            artifacts["hierarchy"].dump_json(os.path.join(args.out, "hierarchy.json"))
        if args.dump_anchors:
            artifacts["anchors"].dump_csv(os.path.join(args.out, "anchors.csv"), node_names=old_ids)
    else:
        t0 = time.perf_counter()
        assignment = run_sc(sub, SCConfig(k=args.k, seed=args.seed))
        timings = {"sc": (time.perf_counter() - t0) * 1e3}

    with open(os.path.join(args.out, "labels.csv"), "w", encoding="utf-8") as fh:
        fh.write("node_id,cluster\n")
        for node, lab in zip(old_ids.tolist(), assignment.labels.tolist()):
            fh.write(f"{node},{lab}\n")
    report = compile_report(assignment, sub_groups, sub, sub_truth, timings)
    with open(os.path.join(args.out, "metrics.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    manifest = {"command": "cluster", "version": __version__, "backend": BACKEND,
                "n_input": g.n, "config": _resolved(args, sub.n, beta)}
    write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    msg = f"{args.method}: {sub.n} nodes, cluster sizes {report.cluster_sizes}"
    if report.error_rate is not None:
        msg += f", error rate {report.error_rate:.4f}"
    if report.average_balance is not None:
        msg += f", average balance {report.average_balance:.4f}"
    print(msg)
    return 0


BENCH_FIELDS = ["n", "h", "k", "seed", "method", "error_rate", "average_balance", "runtime_ms",
                "status"]


def bench_cell(n, h, k, seed, methods, overrides=None):
    """Run every method on one mSBM instance; failures become rows, not exceptions."""
    rows = []
    base = {"n": n, "h": h, "k": k, "seed": seed}
    try:
        inst = msbm_generate(MsbmConfig(n=n, h=h, k=k, seed=seed))
        g, _, (grp, truth) = largest_connected_component(
            inst.graph, [inst.groups.group_of, inst.truth])
        p = GroupPartition.from_labels(grp)
    except Exception as exc:  # noqa: BLE001 - recorded per row
        return [dict(base, method=m, error_rate=None, average_balance=None, runtime_ms=None,
                     status=f"error: {exc}") for m in methods]
    for method in methods:
        t0 = time.perf_counter()
        try:
            if method == "fairad":
                relax = RelaxationConfig(seed=seed, **(overrides or {}))
                a, _ = run_fairad(g, p, k, FairADConfig(relaxation=relax))
            else:
                a = run_sc(g, SCConfig(k=k, seed=seed))
            ms = (time.perf_counter() - t0) * 1e3
            rep = compile_report(a, p, None, truth)
            rows.append(dict(base, method=method, error_rate=rep.error_rate,
                             average_balance=rep.average_balance, runtime_ms=ms, status="ok"))
        except Exception as exc:  # noqa: BLE001 - recorded per row
            rows.append(dict(base, method=method, error_rate=None, average_balance=None,
                             runtime_ms=None, status=f"error: {exc}"))
    return rows


def _bench_task(args):
    return bench_cell(*args)


def summarize(rows):
    """Per-(n, h, k, method) means over successful rows."""
    cells = {}
    for r in rows:
        cells.setdefault((r["n"], r["h"], r["k"], r["method"]), []).append(r)
    out = []
    for (n, h, k, method), rs in sorted(cells.items()):
        ok = [r for r in rs if r["status"] == "ok"]

        def mean(key):
            return float(np.mean([r[key] for r in ok])) if ok else None

        out.append({"n": n, "h": h, "k": k, "method": method, "runs": len(rs), "ok": len(ok),
                    "mean_error_rate": mean("error_rate"),
                    "mean_average_balance": mean("average_balance"),
                    "mean_runtime_ms": mean("runtime_ms")})
    return out


def run_bench(ns, hs, ks, seeds, methods, jobs=1):
    tasks = [(n, h, k, s, tuple(methods)) for n in ns for h in hs for k in ks for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_bench_task, tasks))
    else:
        results = [_bench_task(t) for t in tasks]
    return [row for rows in results for row in rows]


def _write_csv(path, rows, fields):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r[k]) for k in fields})


def cmd_bench(args):
    rows = run_bench(args.n, args.h, args.k, args.seeds, args.methods, args.jobs)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "results.csv"), rows, BENCH_FIELDS)
    summary = summarize(rows)
    _write_csv(os.path.join(args.out, "summary.csv"), summary,
               ["n", "h", "k", "method", "runs", "ok", "mean_error_rate",
                "mean_average_balance", "mean_runtime_ms"])
    write_manifest(os.path.join(args.out, "manifest.json"), {
        "command": "bench", "version": __version__, "backend": BACKEND, "n": args.n,
        "h": args.h, "k": args.k, "seeds": args.seeds, "methods": args.methods,
        "jobs": args.jobs})
    for s in summary:
        err = "-" if s["mean_error_rate"] is None else f"{s['mean_error_rate']:.4f}"
        bal = "-" if s["mean_average_balance"] is None else f"{s['mean_average_balance']:.4f}"
        print(f"n={s['n']} h={s['h']} k={s['k']} {s['method']:>6}: error {err} "
              f"balance {bal} ({s['ok']}/{s['runs']} ok)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="fairad", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample an mSBM instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--h", type=int, default=2)
    gen.add_argument("--k", type=int, default=2)
    for p in "abcd":
        gen.add_argument(f"--{p}", type=float, default=None,
                         help="edge probability (default: scaled from n)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate)

    cl = sub.add_parser("cluster", help="cluster a graph from files")
    cl.add_argument("--method", choices=["fairad", "sc"], default="fairad")
    cl.add_argument("--k", type=int, required=True)
    cl.add_argument("--edges", required=True)
    cl.add_argument("--groups")
    cl.add_argument("--truth")
    cl.add_argument("--out", default=".")
    cl.add_argument("--delimiter", default=None, help="field separator (default: whitespace)")
    cl.add_argument("--mu", type=float, default=1e9)
    cl.add_argument("--alpha", type=float, default=1e-4)
    cl.add_argument("--R", type=int, default=10)
    cl.add_argument("--tau", type=int, default=10)
    cl.add_argument("--beta", type=float, default=None, help="default: n/ln(n) after LCC")
    cl.add_argument("--m", type=int, default=30)
    cl.add_argument("--seed", type=int, default=0)
    cl.add_argument("--tol", type=float, default=1e-8)
    cl.add_argument("--dump-test-vectors", action="store_true")
    cl.add_argument("--dump-hierarchy", action="store_true")
    cl.add_argument("--dump-anchors", action="store_true")
    cl.set_defaults(func=cmd_cluster)

    b = sub.add_parser("bench", help="sweep mSBM sizes and compare methods")
    b.add_argument("--n", type=int, nargs="+", required=True)
    b.add_argument("--h", type=int, nargs="+", default=[2])
    b.add_argument("--k", type=int, nargs="+", default=[2])
    b.add_argument("--seeds", type=int, nargs="+", default=[0])
    b.add_argument("--methods", nargs="+", choices=["fairad", "sc"], default=["fairad", "sc"])
    b.add_argument("--jobs", type=int, default=int(os.environ.get("FAIRAD_JOBS", "1")))
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"fairad: error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        # bad input detected inside a stage (e.g. graph smaller than m) is still a usage error
        print(f"fairad: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, ValidationError) else 1
    except FileNotFoundError as exc:
        print(f"fairad: error: {exc}", file=sys.stderr)
        return 2
    except (FairADError, ArithmeticError, OSError) as exc:
        print(f"fairad: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
