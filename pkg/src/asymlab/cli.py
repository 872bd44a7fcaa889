"""Command-line front end: ``asymlab <command> [--input bundle.json] [flags]``.

Exit codes: 0 success (including negative mathematical verdicts), 2 usage
error or unknown command, 3 unreadable or malformed input, 4 unresolved id
reference.
"""
import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__
from .bundle import InstanceBundle
from .covering import cover_vs_net_rows, greedy_net
from .duality import (
    DEFAULT_GRID_DENSITY,
    dual_continuity_radius,
    dual_operator,
    func_norm,
    polar,
    schauder_certificate,
)
from .errors import AsymlabError, PreconditionFailed, UnresolvedReference
from .norms import validate_norm, variant
from .operators import is_bounded, is_compact, norm_report
from .sequences import check_chain, classify
from .suite import run_suite

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_REFERENCE = 0, 2, 3, 4
DEFAULT_EPSILON = 0.5
MAX_SWEEP = 20


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return "inf" if x == math.inf else float(x)
    return x


def _map(fn, items, jobs):
    """Apply ``fn`` to every ``(id, payload)`` item; results keep item order."""
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return dict(zip((k for k, _ in items), ex.map(fn, [v for _, v in items])))
    return {k: fn(v) for k, v in items}


def _eps(opts):
    return opts.epsilon[0] if opts.epsilon else DEFAULT_EPSILON


# per-instance workers (module level so worker processes can import them)

def _validate(p):
    return validate_norm(p).to_json()


def _eval(item):
    space, pts = item
    if hasattr(space, "norm"):
        p = space.norm
        return {"p": p.evaluate(pts), "pbar": p.conjugate().evaluate(pts),
                "ps": p.symmetrize().evaluate(pts)}
    return {"distances": space.pairwise(pts, pts)}


def _op_norm(A):
    return norm_report(A).to_json()


def _bounded(A, mu, nu):
    ok, beta = is_bounded(A, mu, nu)
    return {"bounded": ok, "beta": beta, "mu": mu, "nu": nu}


def _compact(A, mu, nu, tol, eps, seed):
    verdict = is_compact(A, mu, nu, tol=tol)
    out = verdict.to_json()
    if verdict.compact and eps is not None:
        from .operators import default_sample
        net = verdict.net(eps, sample=default_sample(variant(A.domain, mu), seed=seed))
        ok, worst = net.check(tol)
        out["net"] = {"epsilon": eps, "size": net.size, "centers": net.centers,
                      "verified": ok, "max_deficit": worst, "samples": len(net.points)}
    return out


def _build_net(item, eps):
    space, pts = item
    net = greedy_net(space, pts, eps)
    ok, worst = net.verify(space)
    out = net.to_json()
    out.update({"verified": ok, "max_deficit": worst})
    return out


def _classify(s, eps):
    report = classify(s, eps)
    ok, violations = check_chain(report)
    out = report.to_json()
    out["chain"] = {"ok": ok, "violations": violations}
    return out


def _polar(p, density):
    P = polar(p)
    return {"vertices": P.vertices, "validated": P.validate(), "grid_size": len(P.grid(density))}


def _dual_op(item, eps):
    A, funcs = item
    out = {}
    for fid, psi in funcs:
        phi = dual_operator(A, psi)
        out[fid] = {"covector": phi, "norm_codomain": func_norm(psi, A.codomain),
                    "norm_domain": func_norm(phi, A.domain)}
    try:
        radius = dual_continuity_radius(A, eps)
    except PreconditionFailed as exc:
        radius = {"precondition_failed": str(exc)}
    return {"functionals": out, "epsilon": eps, "continuity_radius": radius}


def _schauder(A, eps, density, tol):
    try:
        rep = schauder_certificate(A, eps, density=density, tol=tol)
    except PreconditionFailed as exc:
        return {"precondition_failed": str(exc), "witness": exc.witness}
    return rep.to_json()


def _sweep_epsilons(space, pts, opts):
    if opts.epsilon:
        return sorted(set(opts.epsilon))
    D = space.pairwise(pts, pts)
    vals = np.unique(D[D > 0])
    if vals.size > MAX_SWEEP:
        vals = vals[np.linspace(0, vals.size - 1, MAX_SWEEP).round().astype(int)]
    return [float(v) for v in vals] or [DEFAULT_EPSILON]


def run_command(command, bundle, opts):
    """Results section of the report for ``command``."""
    jobs = opts.jobs
    if command == "validate-norm":
        return _map(_validate, list(bundle.norms.items()), jobs)
    if command == "eval":
        return _map(_eval, [(k, (s, pts)) for k, (_, s, pts) in bundle.point_sets.items()], jobs)
    if command == "op-norm":
        return _map(_op_norm, list(bundle.operators.items()), jobs)
    if command == "check-bounded":
        return _map(partial(_bounded, mu=opts.mu, nu=opts.nu), list(bundle.operators.items()), jobs)
    if command == "check-compact":
        fn = partial(_compact, mu=opts.mu, nu=opts.nu, tol=opts.tol,
                     eps=opts.epsilon[0] if opts.epsilon else None, seed=opts.seed)
        return _map(fn, list(bundle.operators.items()), jobs)
    if command == "build-net":
        items = [(k, (s, pts)) for k, (_, s, pts) in bundle.point_sets.items()]
        return _map(partial(_build_net, eps=_eps(opts)), items, jobs)
    if command == "cover-vs-net":
        return {k: cover_vs_net_rows(s, pts, _sweep_epsilons(s, pts, opts))
                for k, (_, s, pts) in bundle.point_sets.items()}
    if command == "classify-sequence":
        return _map(partial(_classify, eps=_eps(opts)), list(bundle.sequences.items()), jobs)
    if command == "polar":
        return _map(partial(_polar, density=opts.grid_density), list(bundle.norms.items()), jobs)
    if command == "dual-op":
        items = []
        for k, A in bundle.operators.items():
            funcs = [(f, psi) for f, psi in bundle.functionals.items() if psi.shape[0] == A.shape[0]]
            items.append((k, (A, funcs)))
        return _map(partial(_dual_op, eps=_eps(opts)), items, jobs)
    if command == "schauder-check":
        fn = partial(_schauder, eps=_eps(opts), density=opts.grid_density, tol=opts.tol)
        return _map(fn, list(bundle.operators.items()), jobs)
    if command == "property-suite":
        return run_suite(opts.seed, jobs=jobs, scale=opts.scale)
    raise ValueError(f"unknown command {command!r}")


COMMANDS = ("validate-norm", "eval", "op-norm", "check-bounded", "check-compact", "build-net",
            "cover-vs-net", "classify-sequence", "polar", "dual-op", "schauder-check",
            "property-suite")


def build_parser():
    ap = argparse.ArgumentParser(prog="asymlab",
                                 description="Asymmetric norms, quasi-metrics and their operators.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", help="instance bundle (JSON); '-' reads stdin")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--epsilon", type=float, action="append",
                    help="radius; repeat to give cover-vs-net a sweep")
    ap.add_argument("--grid-density", type=int, default=DEFAULT_GRID_DENSITY)
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--mu", choices=("p", "pbar", "ps"), default="p")
    ap.add_argument("--nu", choices=("q", "qbar", "qs"), default="q")
    ap.add_argument("--scale", type=float, default=1.0,
                    help="property-suite: multiply every instance count")
    ap.add_argument("--timing", action="store_true", help="add wall time to the report")
    ap.add_argument("--output", help="write the report here instead of stdout")
    return ap


def _csv(command, results):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "cover-vs-net":
        w.writerow(["instance", "epsilon", "net_size_greedy", "net_size_exact", "cover_size_exact"])
        for k, rows in results.items():
            for r in rows:
                w.writerow([k, repr(r["epsilon"]), r["net_size_greedy"],
                            "" if r["net_size_exact"] is None else r["net_size_exact"],
                            "" if r["cover_size_exact"] is None else r["cover_size_exact"]])
    else:
        w.writerow(["check", "instances", "passed", "failed"])
        for k, r in results.items():
            w.writerow([k, r["instances"], r["passed"], r["failed"]])
    return buf.getvalue()


def main(argv=None):
    ap = build_parser()
    opts = ap.parse_args(argv)
    if "ASYMLAB_SEED" in os.environ:
        try:
            opts.seed = int(os.environ["ASYMLAB_SEED"])
        except ValueError:
            ap.error("ASYMLAB_SEED must be an integer")
    if opts.jobs < 1:
        ap.error("--jobs must be at least 1")
    if opts.epsilon and any(not e > 0 for e in opts.epsilon):
        ap.error("--epsilon must be positive")
    if opts.format == "csv" and opts.command not in ("cover-vs-net", "property-suite"):
        ap.error(f"--format csv is not available for {opts.command}")
    if opts.command != "property-suite" and opts.input is None:
        ap.error(f"{opts.command} needs --input")

    start = time.perf_counter()
    digest = None
    try:
        if opts.input is None:
            bundle = InstanceBundle.empty()
        else:
            text = sys.stdin.read() if opts.input == "-" else open(opts.input, encoding="utf-8").read()
            digest = hashlib.sha256(text.encode()).hexdigest()
            bundle = InstanceBundle.from_text(text)
        results = run_command(opts.command, bundle, opts)
    except UnresolvedReference as exc:
        print(f"asymlab: unresolved reference: {exc}", file=sys.stderr)
        return EXIT_REFERENCE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"asymlab: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AsymlabError, ValueError, TypeError) as exc:
        print(f"asymlab: malformed instance: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if opts.format == "csv":
        text = _csv(opts.command, results)
    else:
        report = {
            "command": opts.command,
            "tool": "asymlab",
            "version": __version__,
            "seed": opts.seed,
            "tolerance": opts.tol,
            "input_sha256": digest,
            "results": _jsonable(results),
        }
        if opts.timing:
            report["wall_time"] = time.perf_counter() - start
        text = json.dumps(report, indent=2) + "\n"
    if opts.output:
        with open(opts.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
