"""Epsilon-nets and diameter covers of finite sets in quasi-metric spaces.

Orientation: a center ``z`` covers ``y`` when ``rho(z, y) <= eps``; for a
norm-induced space that is ``p(y - z) <= eps``.  Precompactness asks for a
finite set of such centers, total boundedness for a finite cover by sets of
diameter at most ``eps`` (the diameter ranges over ordered pairs, so it is
blind to orientation).  In quasi-metric spaces the second is strictly
stronger; :func:`min_net_size` and :func:`min_cover_size` make the gap
measurable on small sets.
"""
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import InvalidInstance, PreconditionFailed

NET_EXACT_LIMIT = 20
COVER_EXACT_LIMIT = 16


@dataclass
class EpsNetCertificate:
    """Centers covering ``points`` at radius ``epsilon``.

    ``assignment[j]`` is the index of the center claimed to cover
    ``points[j]``.  ``multiplier`` scales the claimed radius (a combined net
    of two operators claims ``2 * epsilon``, a lifted one ``3 * epsilon``).
    ``preimages`` is set for nets of operator images ``A(B)``.
    """

    centers: object
    epsilon: float
    assignment: np.ndarray
    points: object
    strict: bool = False
    multiplier: float = 1.0
    preimages: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.centers)

    @property
    def radius(self):
        return self.multiplier * self.epsilon

    def deficits(self, space):
        """``rho(assigned center, point)`` for every covered point."""
        D = space.pairwise(self.centers, self.points)
        return D[self.assignment, np.arange(D.shape[1])]

    def covering_radius(self, space):
        """``max_j min_i rho(center_i, point_j)``, the best achievable deficit."""
        return float(space.pairwise(self.centers, self.points).min(axis=0).max(initial=0.0))

    def verify(self, space, tol=1e-9):
        """Check every assignment; returns ``(ok, max_deficit)``."""
        d = self.deficits(space)
        worst = float(d.max(initial=0.0))
        slack = tol * max(1.0, self.radius)
        ok = worst < self.radius + slack if self.strict else worst <= self.radius + slack
        return bool(ok), worst

    def to_json(self):
        centers = self.centers.tolist() if isinstance(self.centers, np.ndarray) else list(self.centers)
        out = {
            "epsilon": self.epsilon,
            "radius": self.radius,
            "size": self.size,
            "centers": centers,
            "assignment": [int(a) for a in self.assignment],
        }
        if self.preimages is not None:
            out["preimages"] = self.preimages.tolist()
        out.update(self.meta)
        return out


@dataclass
class CoverCertificate:
    """Blocks (index lists into ``points``) of diameter at most ``epsilon``."""

    blocks: list
    epsilon: float
    points: object

    @property
    def size(self):
        return len(self.blocks)

    def verify(self, space, tol=1e-9):
        n = space.size(self.points)
        covered = set()
        worst = 0.0
        for b in self.blocks:
            covered.update(b)
            worst = max(worst, diameter(space, space.subset(self.points, b)))
        ok = covered == set(range(n)) and worst <= self.epsilon + tol * max(1.0, self.epsilon)
        return ok, worst

    def to_net(self, space):
        """One point per block is a center: ``rho(z, y) <= diam <= eps``."""
        n = space.size(self.points)
        heads = [b[0] for b in self.blocks]
        assignment = np.empty(n, dtype=int)
        for i, b in enumerate(self.blocks):
            for j in b:
                assignment[j] = i
        return EpsNetCertificate(space.subset(self.points, heads), self.epsilon,
                                 assignment, self.points)

    def to_json(self):
        return {"epsilon": self.epsilon, "size": self.size,
                "blocks": [list(map(int, b)) for b in self.blocks]}


def diameter(space, A):
    A = space.coerce(A)
    if len(A) == 0:
        return 0.0
    return float(space.pairwise(A, A).max())


def _covers(D, eps, strict):
    return D < eps if strict else D <= eps


def greedy_cover(covers, dist_row):
    """Farthest-point greedy over a coverage matrix.

    ``covers[c, y]`` says candidate ``c`` covers point ``y``; ``dist_row(c)``
    returns the distances from candidate ``c`` to all points.  Each round
    takes the uncovered point farthest from the centers chosen so far
    (lowest index on ties), then, among the candidates covering it, the one
    covering the most still-uncovered points (lowest index on ties).
    Returns the chosen candidate indices in selection order.
    """
    n_points = covers.shape[1]
    uncovered = np.ones(n_points, dtype=bool)
    mind = np.full(n_points, np.inf)
    chosen = []
    while uncovered.any():
        score = np.where(uncovered, mind, -1.0)
        y = int(np.argmax(score))
        cands = np.flatnonzero(covers[:, y])
        if not cands.size:
            raise PreconditionFailed(f"no candidate center covers point {y}", witness=y)
        gain = covers[np.ix_(cands, np.flatnonzero(uncovered))].sum(axis=1)
        c = int(cands[int(np.argmax(gain))])
        chosen.append(c)
        uncovered &= ~covers[c]
        np.minimum(mind, dist_row(c), out=mind)
    return chosen


def _assign(D, eps, strict):
    """For each point, the covering center at minimal distance."""
    masked = np.where(_covers(D, eps, strict), D, np.inf)
    return np.argmin(masked, axis=0)


def greedy_net(m, Y, eps, centers_from=None, strict=False):
    """Greedy ``eps``-net of the finite set ``Y``.

    Candidate centers are the points of ``Y`` unless ``centers_from`` gives
    an external pool; with an external pool some point may be uncoverable,
    which raises :class:`PreconditionFailed`.
    """
    if eps < 0 or (strict and eps == 0):
        raise ValueError("eps must be positive (or zero for non-strict nets)")
    Y = m.coerce(Y)
    pool = Y if centers_from is None else m.coerce(centers_from)
    D = m.pairwise(pool, Y)
    chosen = greedy_cover(_covers(D, eps, strict), lambda c: D[c])
    Dc = D[chosen]
    return EpsNetCertificate(m.subset(pool, chosen), eps, _assign(Dc, eps, strict), Y,
                             strict=strict)


def _exact_set_cover(sets, n):
    """Minimum number of the bitmask ``sets`` whose union is ``{0..n-1}``.

    Branch and bound: branch on the lowest uncovered element over the sets
    containing it (largest first), prune on ``len(partial) + ceil(rest/max)``.
    Returns the chosen set indices or ``None`` if no cover exists.
    """
    full = (1 << n) - 1
    if n == 0:
        return []
    # drop sets dominated by another set
    order = sorted(range(len(sets)), key=lambda i: (-bin(sets[i]).count("1"), i))
    kept = []
    for i in order:
        if not any(sets[i] | sets[j] == sets[j] for j in kept):
            kept.append(i)
    if _union(sets[i] for i in kept) != full:
        return None
    by_elem = [[i for i in kept if sets[i] >> e & 1] for e in range(n)]
    biggest = max(bin(sets[i]).count("1") for i in kept)
    best = [None]

    def search(covered, partial):
        if covered == full:
            if best[0] is None or len(partial) < len(best[0]):
                best[0] = list(partial)
            return
        rest = n - bin(covered).count("1")
        bound = len(partial) + -(-rest // biggest)
        if best[0] is not None and bound >= len(best[0]):
            return
        e = (~covered & full & -(~covered & full)).bit_length() - 1
        for i in by_elem[e]:
            partial.append(i)
            search(covered | sets[i], partial)
            partial.pop()

    search(0, [])
    return best[0]


def _union(masks):
    u = 0
    for s in masks:
        u |= s
    return u


def _mask_rows(B):
    return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in B]


def exact_net(m, Y, eps, strict=False):
    """Minimum-size net with centers in ``Y`` (exhaustive, ``|Y| <= 20``)."""
    Y = m.coerce(Y)
    n = len(Y)
    if n > NET_EXACT_LIMIT:
        raise PreconditionFailed(f"exact net search is limited to {NET_EXACT_LIMIT} points, got {n}")
    D = m.pairwise(Y, Y)
    chosen = _exact_set_cover(_mask_rows(_covers(D, eps, strict)), n)
    if chosen is None:
        raise PreconditionFailed("no net exists: some point is not covered even by itself")
    chosen = sorted(chosen)
    Dc = D[chosen]
    return EpsNetCertificate(m.subset(Y, chosen), eps, _assign(Dc, eps, strict), Y, strict=strict)


def min_net_size(m, Y, eps, strict=False):
    return exact_net(m, Y, eps, strict).size


def exact_cover(m, Y, eps):
    """Minimum cover of ``Y`` by blocks of diameter ``<= eps`` (``|Y| <= 16``).

    A block has diameter ``<= eps`` iff its points are pairwise within
    ``eps`` in the symmetrized distance, i.e. it is a clique of that
    compatibility graph; a minimum cover can always use maximal cliques, so
    the search is an exact set cover over them.
    """
    Y = m.coerce(Y)
    n = len(Y)
    if n > COVER_EXACT_LIMIT:
        raise PreconditionFailed(f"exact cover search is limited to {COVER_EXACT_LIMIT} points, got {n}")
    D = m.pairwise(Y, Y)
    S = np.maximum(D, D.T)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(i + 1, n) if S[i, j] <= eps)
    cliques = sorted(sorted(c) for c in nx.find_cliques(g))
    masks = [sum(1 << j for j in c) for c in cliques]
    chosen = _exact_set_cover(masks, n)
    blocks, seen = [], set()
    for i in sorted(chosen):
        b = [j for j in cliques[i] if j not in seen]  # turn the cover into a partition
        seen.update(b)
        blocks.append(b)
    return CoverCertificate(blocks, eps, Y)


def min_cover_size(m, Y, eps):
    return exact_cover(m, Y, eps).size


def is_precompact_sample(m, Y, eps, exact=None):
    """A finite set is always precompact; return the witnessing certificate.

    Uses the exact search when ``|Y|`` allows it (or ``exact=True``), the
    greedy net otherwise.
    """
    Y = m.coerce(Y)
    if exact is None:
        exact = len(Y) <= NET_EXACT_LIMIT
    cert = exact_net(m, Y, eps) if exact else greedy_net(m, Y, eps)
    ok, _ = cert.verify(m)
    return ok, cert


def is_totally_bounded_sample(m, Y, eps):
    Y = m.coerce(Y)
    if len(Y) <= COVER_EXACT_LIMIT:
        cert = exact_cover(m, Y, eps)
    else:
        cert = _greedy_diameter_cover(m, Y, eps)
    ok, _ = cert.verify(m)
    return ok, cert


def _greedy_diameter_cover(m, Y, eps):
    D = m.pairwise(Y, Y)
    S = np.maximum(D, D.T) <= eps
    left = list(range(len(Y)))
    blocks = []
    while left:
        block = [left[0]]
        for j in left[1:]:
            if all(S[j, b] for b in block):
                block.append(j)
        blocks.append(block)
        left = [j for j in left if j not in set(block)]
    return CoverCertificate(blocks, eps, Y)


def cover_vs_net_rows(m, Y, epsilons):
    """Rows ``(eps, net_size_greedy, net_size_exact, cover_size_exact)`` for an eps sweep.

    Exact columns are ``None`` when ``Y`` exceeds the exact-search limits.
    """
    Y = m.coerce(Y)
    n = len(Y)
    rows = []
    for eps in epsilons:
        rows.append({
            "epsilon": float(eps),
            "net_size_greedy": greedy_net(m, Y, eps).size,
            "net_size_exact": min_net_size(m, Y, eps) if n <= NET_EXACT_LIMIT else None,
            "cover_size_exact": min_cover_size(m, Y, eps) if n <= COVER_EXACT_LIMIT else None,
        })
    return rows


class EpsilonNet(BaseEstimator):
    """Estimator wrapper around :func:`greedy_net` for points in R^n.

    Parameters
    ----------
    norm : PolyAsymNorm
        Asymmetric norm inducing ``rho(x, y) = norm(y - x)``.
    epsilon : float
        Covering radius.
    strict : bool
        Use ``rho < epsilon`` instead of ``<=``.

    Attributes
    ----------
    centers_ : ndarray of shape (n_centers, n_features)
    certificate_ : EpsNetCertificate
    """

    def __init__(self, norm=None, epsilon=1.0, strict=False):
        self.norm = norm
        self.epsilon = epsilon
        self.strict = strict

    def _space(self):
        from .quasimetric import InducedQuasiMetric

        if self.norm is None:
            raise InvalidInstance("EpsilonNet needs a norm")
        return InducedQuasiMetric(self.norm)

    def fit(self, X, y=None):
        X = check_array(X)
        m = self._space()
        self.certificate_ = greedy_net(m, X, self.epsilon, strict=self.strict)
        self.centers_ = np.asarray(self.certificate_.centers)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Distances ``rho(center_i, x)`` as an ``(n_samples, n_centers)`` array."""
        check_is_fitted(self)
        X = check_array(X)
        return self._space().pairwise(self.centers_, X).T

    def predict(self, X):
        """Index of the closest center in the covering orientation."""
        return np.argmin(self.transform(X), axis=1)

    def score(self, X, y=None):
        """Fraction of ``X`` covered at radius ``epsilon``."""
        d = self.transform(X).min(axis=1)
        return float(np.mean(d < self.epsilon if self.strict else d <= self.epsilon))
