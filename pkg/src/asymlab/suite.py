"""Seeded property battery over random instances.

Each check is a function ``(seed, index) -> (ok, detail)`` evaluated on one
instance drawn from ``rng_for(seed, check_id, index)``.  :func:`run_suite`
fans the (check, index) tasks out over worker processes and folds them back
in index order, so the summary does not depend on ``jobs``.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .covering import min_cover_size, min_net_size
from .duality import schauder_certificate, verify_dual_continuity, wflat_pullback
from .instances import (
    convergent_family,
    random_bounded_operator,
    random_compact_operator,
    random_compact_pair,
    random_norm,
    random_operator,
    random_sequence,
    random_space,
    rng_for,
)
from .norms import validate_norm
from .operators import (
    combine_nets,
    is_compact,
    limit_of_compacts_net,
    op_norm,
    operator_net,
    saturation_oracle,
    sym_op_norm,
    verify_witness_ray,
)
from .quasimetric import InducedQuasiMetric, TabularQuasiMetric
from .sequences import SequencePrefix, check_chain, classify

TOL = 1e-9


def _slack(*values):
    return TOL * max([1.0] + [float(np.max(np.abs(v))) for v in values])


def check_axioms(seed, i, pairs=100):
    rng = rng_for(seed, 1, i)
    p = random_norm(rng, 1 + i % 4)
    report = validate_norm(p)
    X = rng.normal(scale=3.0, size=(pairs, p.dim))
    Y = rng.normal(scale=3.0, size=(pairs, p.dim))
    alpha = rng.uniform(0.0, 5.0, size=pairs)
    px, py = p.evaluate(X), p.evaluate(Y)
    ps = p.symmetrize()
    sub = np.max(p.evaluate(X + Y) - px - py)
    hom = np.max(np.abs(p.evaluate(alpha[:, None] * X) - alpha * px))
    lip = np.max(np.abs(px - py) - ps.evaluate(X - Y))
    s = _slack(px, py, alpha * px)
    ok = report.valid and sub <= s and hom <= s and lip <= s
    return bool(ok), {"dim": p.dim, "subadditivity": float(sub), "homogeneity": float(hom),
                      "lipschitz": float(lip)}


def check_flat_le_sym(seed, i):
    """The inequality as commonly stated: ``||A| <= ||A||`` for bounded ``A``."""
    A = random_bounded_operator(rng_for(seed, 3, i))
    flat, sym = op_norm(A), sym_op_norm(A)
    return bool(flat <= sym + _slack(flat, sym)), {"flat": flat, "sym": sym}


def check_sym_le_flat(seed, i):
    """The direction that always holds: ``||A|| <= ||A|`` (``q_s(Ax) <= ||A| p_s(x)``)."""
    A = random_bounded_operator(rng_for(seed, 3, i))
    flat, sym = op_norm(A), sym_op_norm(A)
    return bool(sym <= flat + _slack(flat, sym)), {"flat": flat, "sym": sym}


def check_compact_oracle(seed, i):
    rng = rng_for(seed, 4, i)
    d1, d2 = rng.integers(1, 3, size=2)
    A = random_operator(rng, random_norm(rng, int(d1)), random_norm(rng, int(d2)))
    verdict = is_compact(A)
    oracle = saturation_oracle(A)
    ok = verdict.compact == oracle.compact
    if not verdict.compact:
        ok = ok and verify_witness_ray(A, verdict.witness_ray)
    if verdict.compact:
        ok = ok and op_norm(A) < math.inf
    detail = {"compact": verdict.compact, "oracle": oracle.compact}
    if verdict.witness_ray is not None:
        detail["witness_ray"] = verdict.witness_ray.tolist()
    return bool(ok), detail


def check_combine(seed, i):
    rng = rng_for(seed, 5, i)
    A1, A2 = random_compact_pair(rng)
    eps = float(rng.uniform(0.2, 1.0))
    net = combine_nets(operator_net(A1, eps), operator_net(A2, eps))
    ok = net.meta["verified"] and net.meta["max_deficit"] <= 2 * eps + TOL
    return bool(ok), {"epsilon": eps, "size": net.size, "max_deficit": net.meta["max_deficit"]}


def check_limit(seed, i):
    rng = rng_for(seed, 6, i)
    A, family = convergent_family(rng)
    eps = float(rng.uniform(0.2, 1.0))
    net = limit_of_compacts_net(A, family, eps)
    ok = net.meta["verified"] and net.meta["max_deficit"] <= 3 * eps + TOL
    return bool(ok), {"epsilon": eps, "n0": net.meta["n0"], "max_deficit": net.meta["max_deficit"]}


def check_schauder(seed, i):
    rng = rng_for(seed, 7, i)
    A = random_compact_operator(rng)
    eps = float(rng.uniform(0.1, 0.5))
    rep = schauder_certificate(A, eps)
    ok = rep.verified and rep.max_deficit <= 3 * eps + TOL
    return bool(ok), {"epsilon": eps, "size": len(rep.net), "max_deficit": rep.max_deficit,
                      "samples": rep.samples}


def check_chain_instance(seed, i):
    rng = rng_for(seed, 8, i)
    space = random_space(rng)
    n = int(rng.integers(4, 31))
    pts = random_sequence(rng, space, n)
    pool = None
    if isinstance(space, InducedQuasiMetric) and rng.uniform() < 0.5:
        pool = rng.normal(scale=3.0, size=(5, space.dim))
    s = SequencePrefix(space, pts, pool)
    D = space.pairwise(s.points, s.points)
    positive = D[D > 0]
    eps = float(np.quantile(positive, rng.uniform(0.1, 0.9))) if positive.size else 1.0
    report = classify(s, eps)
    ok, violations = check_chain(report)
    return ok, {"n": n, "epsilon": eps, "verdicts": report.verdicts, "violations": violations}


def check_covering(seed, i):
    rng = rng_for(seed, 9, i)
    space = random_space(rng)
    if isinstance(space, TabularQuasiMetric):
        Y = list(space.labels)
    else:
        Y = rng.normal(scale=2.0, size=(int(rng.integers(2, 11)), space.dim))
    D = space.pairwise(Y, Y)
    eps = float(np.quantile(D, rng.uniform(0.05, 0.95)))
    net = min_net_size(space, Y, eps)
    cover = min_cover_size(space, Y, eps)
    cover_s = min_cover_size(space.symmetrized(), Y, eps)
    ok = net <= cover and cover == cover_s
    return bool(ok), {"epsilon": eps, "net": net, "cover": cover, "cover_sym": cover_s}


def check_dual(seed, i, pairs=200):
    rng = rng_for(seed, 10, i)
    A = random_bounded_operator(rng, dims=(1, 2))
    eps = float(rng.uniform(0.1, 2.0))
    ok, delta, worst = verify_dual_continuity(A, eps, n_pairs=pairs, seed=int(rng.integers(2**31)))
    return bool(ok), {"epsilon": eps, "delta": delta, "worst": worst}


def check_pullback(seed, i):
    """One exact pullback check; ``ok`` is the implication premise => conclusion."""
    rng = rng_for(seed, 11, i)
    A = random_operator(rng, random_norm(rng, int(rng.integers(1, 4))),
                        random_norm(rng, int(rng.integers(1, 4))))
    X = rng.normal(size=(int(rng.integers(1, 6)), A.domain.dim))
    psi1 = rng.normal(size=A.codomain.dim)
    psi2 = psi1 + rng.normal(scale=0.3, size=A.codomain.dim)
    eps = float(rng.uniform(0.05, 1.0))
    premise, conclusion = wflat_pullback(A, X, eps, psi1, psi2)
    return bool(conclusion or not premise), {"premise": premise, "conclusion": conclusion}


CHECKS = {
    "axioms": (check_axioms, 1000),
    "flat_le_sym": (check_flat_le_sym, 500),
    "sym_le_flat": (check_sym_le_flat, 500),
    "compact_oracle": (check_compact_oracle, 200),
    "combine_nets": (check_combine, 100),
    "limit_of_compacts": (check_limit, 50),
    "schauder": (check_schauder, 50),
    "cauchy_chain": (check_chain_instance, 500),
    "covering_gap": (check_covering, 100),
    "dual_continuity": (check_dual, 50),
    "wflat_pullback": (check_pullback, 200),
}


def _task(args):
    name, seed, i = args
    fn = CHECKS[name][0]
    try:
        ok, detail = fn(seed, i)
    except Exception as exc:  # a crash counts as a failed instance
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return name, i, ok, detail


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return "inf" if x == math.inf else float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def run_suite(seed, jobs=1, scale=1.0, checks=None):
    """Run the battery; returns ``{check: {instances, passed, failed, failures}}``.

    ``scale`` multiplies every instance count (at least one instance each).
    """
    names = list(checks or CHECKS)
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}")
    tasks = [(name, seed, i) for name in names
             for i in range(max(1, int(round(CHECKS[name][1] * scale))))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_task, tasks, chunksize=8))
    else:
        results = [_task(t) for t in tasks]
    summary = {}
    for name, i, ok, detail in results:
        entry = summary.setdefault(name, {"instances": 0, "passed": 0, "failed": 0, "failures": []})
        entry["instances"] += 1
        if ok:
            entry["passed"] += 1
        else:
            entry["failed"] += 1
            if len(entry["failures"]) < 5:
                entry["failures"].append({"index": i, "detail": _jsonable(detail)})
    return {name: summary[name] for name in names}
