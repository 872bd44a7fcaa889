"""Cauchy-type notions for finite sequence prefixes in a quasi-metric space.

The seven notions (left/right rho-Cauchy, rho-Cauchy, left/right K-Cauchy,
weakly left/right K-Cauchy) are asymptotic; here each is truncated to a
prefix ``x_1..x_N`` at a fixed ``eps``.  The existential tail start ``n0``
ranges over ``1 .. N - min_tail + 1`` so that every tail inspected keeps at
least ``min_tail`` terms (default ``N // 2``); without that floor every
notion would hold trivially with ``n0 = N``.  Indices in reports are 1-based.

Comparisons are strict (``rho < eps``), applied as ``rho < eps - 1e-12``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInstance

NOTIONS = (
    "left-rho",
    "right-rho",
    "rho",
    "left-K",
    "right-K",
    "weakly-left-K",
    "weakly-right-K",
)
CHAIN = (
    ("left-K", "weakly-left-K"),
    ("weakly-left-K", "left-rho"),
    ("right-K", "weakly-right-K"),
    ("weakly-right-K", "right-rho"),
)
STRICT_GUARD = 1e-12

HOLDS, FAILS, UNDECIDABLE = "holds", "fails", "undecidable"


@dataclass(frozen=True)
class SequencePrefix:
    """Points ``x_1..x_N`` of ``space`` plus a finite pool of candidate limits.

    ``witness_pool=None`` means "the prefix points themselves".  A supplied
    pool is always extended by the prefix points (they lie in the space, so
    the finite restriction never drops them); an explicitly empty pool turns
    the left/right rho-Cauchy notions off (reported undecidable).
    """

    space: object
    points: object
    witness_pool: object = None

    def __post_init__(self):
        pts = self.space.coerce(self.points)
        if len(pts) < 2:
            raise InvalidInstance("a sequence prefix needs at least two points")
        object.__setattr__(self, "points", pts)
        if self.witness_pool is not None:
            object.__setattr__(self, "witness_pool", self.space.coerce(self.witness_pool))

    def __len__(self):
        return len(self.points)

    def pool(self):
        if self.witness_pool is None:
            return self.points
        if len(self.witness_pool) == 0:
            return self.witness_pool
        if isinstance(self.points, np.ndarray):
            return np.vstack([self.witness_pool, self.points])
        return list(self.witness_pool) + list(self.points)


@dataclass
class CauchyReport:
    epsilon: float
    horizon: int
    min_tail: int
    verdicts: dict
    witnesses: dict = field(default_factory=dict)

    def holds(self, notion):
        return self.verdicts[notion] == HOLDS

    def to_json(self):
        return {
            "epsilon": self.epsilon,
            "horizon": self.horizon,
            "min_tail": self.min_tail,
            "semantics": f"finite truncation: tail starts n0 <= {self.horizon - self.min_tail + 1}",
            "verdicts": dict(self.verdicts),
            "witnesses": self.witnesses,
        }


def _lt(d, eps):
    return d < eps - STRICT_GUARD


def _first_violation(bad_pairs):
    """Lexicographically first ``(k, n)`` (1-based) of a boolean pair matrix."""
    idx = np.argwhere(bad_pairs)
    if not idx.size:
        return None
    k, n = idx[0]
    return [int(k) + 1, int(n) + 1]


def classify(s, eps, min_tail=None):
    """Evaluate every Cauchy notion on the prefix ``s`` at tolerance ``eps``.

    Witnesses for a notion that holds give the smallest admissible ``n0``
    (and the pool index of the limit candidate for rho-notions).  For a
    notion that fails, ``pair`` is the first violating index pair of the
    whole prefix and ``tail_pair`` the first one inside the shortest
    admissible tail.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    N = len(s)
    if min_tail is None:
        min_tail = max(1, N // 2)
    if not 1 <= min_tail <= N:
        raise ValueError("min_tail must lie in 1..N")
    last = N - min_tail  # largest admissible 0-based tail start
    m = s.space
    D = m.pairwise(s.points, s.points)
    close = _lt(D, eps)
    upper = np.triu(np.ones((N, N), dtype=bool))  # k <= n

    verdicts, witnesses = {}, {}

    def record(name, ok_starts, bad_pairs):
        ok = np.flatnonzero(ok_starts[: last + 1])
        if ok.size:
            verdicts[name] = HOLDS
            witnesses[name] = {"n0": int(ok[0]) + 1}
        else:
            verdicts[name] = FAILS
            tail = np.zeros((N, N), dtype=bool)
            tail[last:, last:] = True
            witnesses[name] = {
                "pair": _first_violation(bad_pairs),
                "tail_pair": _first_violation(bad_pairs & tail),
            }

    def suffix_all(ok_rows):
        # ok_rows[k]: condition holds for every pair whose first index is k
        return np.flip(np.logical_and.accumulate(np.flip(ok_rows)))

    # left-K: rho(x_k, x_n) < eps for n >= k >= n0
    bad_left = upper & ~close
    record("left-K", suffix_all(~bad_left.any(axis=1)), bad_left)
    # right-K: rho(x_n, x_k) < eps for n >= k >= n0
    bad_right = upper & ~close.T
    record("right-K", suffix_all(~bad_right.any(axis=1)), bad_right)
    # rho-Cauchy: rho(x_n, x_k) < eps for all n, k >= n0
    bad_both = ~(close & close.T) & upper
    record("rho", suffix_all(~bad_both.any(axis=1)), bad_both)
    # weakly left-K: rho(x_n0, x_n) < eps for n >= n0
    weak_l = np.array([close[k, k:].all() for k in range(N)])
    record("weakly-left-K", weak_l, bad_left)
    weak_r = np.array([close[k:, k].all() for k in range(N)])
    record("weakly-right-K", weak_r, bad_right)

    pool = s.pool()
    if len(pool) == 0:
        for name in ("left-rho", "right-rho"):
            verdicts[name] = UNDECIDABLE
            witnesses[name] = {"reason": "empty witness pool"}
    else:
        for name, P in (("left-rho", m.pairwise(pool, s.points)),
                        ("right-rho", m.pairwise(s.points, pool).T)):
            # P[w, n] is rho(w, x_n) (left) or rho(x_n, w) (right)
            good = _lt(P, eps)
            tail_ok = np.flip(np.logical_and.accumulate(np.flip(good, axis=1), axis=1), axis=1)
            starts = tail_ok.any(axis=0)
            ok = np.flatnonzero(starts[: last + 1])
            if ok.size:
                n0 = int(ok[0])
                w = int(np.flatnonzero(tail_ok[:, n0])[0])
                verdicts[name] = HOLDS
                witnesses[name] = {"n0": n0 + 1, "pool_index": w}
            else:
                worst = P[:, last:].max(axis=1)
                w = int(np.argmin(worst))
                verdicts[name] = FAILS
                witnesses[name] = {"pool_index": w, "tail_max_distance": float(worst[w]),
                                   "tail_start": last + 1}

    return CauchyReport(eps, N, min_tail, {k: verdicts[k] for k in NOTIONS}, witnesses)


def check_chain(report):
    """Check ``K => weakly K => rho`` on both sides.

    Returns ``(ok, violations)`` where each violation names the broken link.
    Links into an undecidable notion are skipped.  The converse directions
    are not implications, so e.g. weakly-left-K without left-K is fine.
    """
    violations = []
    for a, b in CHAIN:
        va, vb = report.verdicts[a], report.verdicts[b]
        if UNDECIDABLE in (va, vb):
            continue
        if va == HOLDS and vb != HOLDS:
            violations.append({"premise": a, "conclusion": b})
    return not violations, violations


def converges_to(s, x, eps, tail=None, conjugate=False):
    """``rho(x, x_n) <= eps`` on the last ``tail`` terms (all terms by default).

    The limit comes first, as in the neighbourhoods ``B(x, r)`` of the
    topology generated by ``rho``.  ``conjugate=True`` probes convergence in
    the conjugate space instead, i.e. ``rho(x_n, x) <= eps``.
    """
    N = len(s)
    tail = N if tail is None else tail
    if not 1 <= tail <= N:
        raise ValueError("tail must lie in 1..N")
    m = s.space.conjugate() if conjugate else s.space
    d = m.distances_from(x, s.points)
    return bool(np.all(d[N - tail:] <= eps))
