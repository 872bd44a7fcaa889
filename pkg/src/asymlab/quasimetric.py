"""Quasi-metrics, their balls, and the entourages of the induced quasi-uniformity.

Two concrete spaces share one small interface (``coerce``, ``subset``,
``pairwise``, ``conjugate``, ``symmetrized``):

* :class:`InducedQuasiMetric`: ``rho(x, y) = p(y - x)`` for a polyhedral
  asymmetric norm ``p``; points are rows of an ``(N, dim)`` array.
* :class:`TabularQuasiMetric`: an explicit distance table over labelled
  points, checked eagerly for the triangle inequality.

Everything downstream (sequences, covering) only talks to that interface.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_points, as_vector, check_exact_keys
from .errors import InvalidInstance

TABLE_EXHAUSTIVE_LIMIT = 512
PAIRWISE_BLOCK = 64


class QuasiMetric:
    """Common behaviour of the concrete quasi-metric spaces."""

    def dist(self, x, y):
        return float(self.pairwise(self.coerce([x]), self.coerce([y]))[0, 0])

    def distances_from(self, x, Y):
        return self.pairwise(self.coerce([x]), Y)[0]

    def distances_to(self, X, y):
        return self.pairwise(X, self.coerce([y]))[:, 0]

    def subset(self, points, idx):
        points = self.coerce(points)
        if isinstance(points, np.ndarray):
            return points[np.asarray(idx, dtype=int)]
        return [points[i] for i in idx]

    def size(self, points):
        return len(self.coerce(points))


@dataclass(frozen=True)
class InducedQuasiMetric(QuasiMetric):
    """``rho(x, y) = p(y - x)``."""

    norm: object

    @property
    def dim(self):
        return self.norm.dim

    def coerce(self, points):
        return as_points(points, self.dim)

    def dist(self, x, y):
        x = as_vector(x, self.dim)
        y = as_vector(y, self.dim)
        return self.norm(y - x)

    def pairwise(self, X, Y):
        """Matrix ``D[i, j] = rho(X[i], Y[j])``."""
        X = self.coerce(X)
        Y = self.coerce(Y)
        G = self.norm.generators
        GX = np.ascontiguousarray(G @ X.T)
        GY = np.ascontiguousarray(G @ Y.T)
        D = np.zeros((X.shape[0], Y.shape[0]))
        # row blocks keep the working set in cache
        for s in range(0, X.shape[0], PAIRWISE_BLOCK):
            blk = D[s:s + PAIRWISE_BLOCK]
            buf = np.empty_like(blk)
            for g in range(G.shape[0]):
                np.subtract(GY[g][None, :], GX[g, s:s + PAIRWISE_BLOCK, None], out=buf)
                np.maximum(blk, buf, out=blk)
        return D

    def conjugate(self):
        return InducedQuasiMetric(self.norm.conjugate())

    def symmetrized(self):
        return InducedQuasiMetric(self.norm.symmetrize())


@dataclass(frozen=True, eq=False)
class TabularQuasiMetric(QuasiMetric):
    """Finite quasi-(pseudo)metric given by a distance table.

    ``matrix[i][j]`` is the distance from ``labels[i]`` to ``labels[j]``.
    Construction rejects negative or non-finite entries, a nonzero diagonal
    and any triangle-inequality failure.  All triples are checked for up to
    512 points; larger tables are checked on ``10 * n**2`` seeded random
    triples.  A table where two distinct points are at distance zero in both
    directions is accepted as a quasi-pseudometric and flagged through
    :attr:`is_pseudo` / :attr:`qm1_witness`.
    """

    labels: tuple
    matrix: np.ndarray
    tol: float = 1e-9
    seed: int = 0
    qm1_witness: tuple = field(default=None, init=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        D = np.asarray(self.matrix, dtype=float)
        n = len(labels)
        if len(set(labels)) != n:
            raise InvalidInstance("point labels must be unique")
        if D.shape != (n, n):
            raise InvalidInstance(f"distance matrix must be {n}x{n}, got {D.shape}")
        if not np.all(np.isfinite(D)):
            raise InvalidInstance("distance matrix has non-finite entries")
        if np.any(D < 0):
            i, j = np.argwhere(D < 0)[0]
            raise InvalidInstance(f"negative distance from {labels[i]!r} to {labels[j]!r}")
        if np.any(np.diag(D) != 0):
            i = int(np.flatnonzero(np.diag(D))[0])
            raise InvalidInstance(f"nonzero self-distance at {labels[i]!r}")
        bad = _triangle_violation(D, self.tol, self.seed)
        if bad is not None:
            x, y, z = bad
            raise InvalidInstance(
                f"triangle inequality fails: rho({labels[x]!r},{labels[z]!r}) > "
                f"rho({labels[x]!r},{labels[y]!r}) + rho({labels[y]!r},{labels[z]!r})"
            )
        D = D.copy()
        D.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", D)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})
        zero = (D == 0) & (D.T == 0)
        np.fill_diagonal(zero, False)
        if zero.any():
            i, j = np.argwhere(zero)[0]
            object.__setattr__(self, "qm1_witness", (labels[i], labels[j]))

    @property
    def is_pseudo(self):
        return self.qm1_witness is not None

    def index(self, label):
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise InvalidInstance(f"unknown point label {label!r}") from None

    def coerce(self, points):
        points = list(points)
        for lab in points:
            self.index(lab)
        return points

    def dist(self, x, y):
        return float(self.matrix[self.index(x), self.index(y)])

    def pairwise(self, X, Y):
        ix = [self.index(x) for x in X]
        iy = [self.index(y) for y in Y]
        return self.matrix[np.ix_(ix, iy)]

    def conjugate(self):
        return TabularQuasiMetric(self.labels, self.matrix.T, self.tol, self.seed)

    def symmetrized(self):
        return TabularQuasiMetric(self.labels, np.maximum(self.matrix, self.matrix.T),
                                  self.tol, self.seed)

    def to_json(self):
        return {"points": list(self.labels), "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj):
        check_exact_keys(obj, ("points", "matrix"), what="tabular quasi-metric")
        if not isinstance(obj["points"], list) or not obj["points"]:
            raise InvalidInstance("'points' must be a nonempty list")
        return cls(tuple(obj["points"]), np.array(obj["matrix"], dtype=float))


def _triangle_violation(D, tol, seed):
    n = D.shape[0]
    slack = tol * max(1.0, float(D.max(initial=0.0)))
    if n <= TABLE_EXHAUSTIVE_LIMIT:
        for y in range(n):
            via = D[:, y, None] + D[None, y, :]
            bad = np.argwhere(D > via + slack)
            if bad.size:
                x, z = bad[0]
                return int(x), y, int(z)
        return None
    rng = np.random.default_rng(seed)
    T = rng.integers(0, n, size=(10 * n * n, 3))
    x, y, z = T.T
    bad = np.flatnonzero(D[x, z] > D[x, y] + D[y, z] + slack)
    if bad.size:
        i = bad[0]
        return int(x[i]), int(y[i]), int(z[i])
    return None


def ball(m, x, r, candidates, strict=False):
    """Candidates ``y`` with ``rho(x, y) <= r`` (``< r`` when ``strict``)."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    candidates = m.coerce(candidates)
    d = m.distances_from(x, candidates)
    keep = np.flatnonzero(d < r if strict else d <= r)
    return m.subset(candidates, keep)


@dataclass(frozen=True)
class Entourage:
    """The relation ``{(x, y) : rho(x, y) <= eps}`` (``< eps`` when strict).

    Sections and images are taken inside a finite candidate universe.
    """

    base: QuasiMetric
    eps: float
    strict: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("entourage radius must be positive")

    def _within(self, d):
        return d < self.eps if self.strict else d <= self.eps

    def contains(self, x, y):
        return bool(self._within(self.base.dist(x, y)))

    def section(self, x, universe):
        """``U(x) = {y : (x, y) in U}``."""
        return ball(self.base, x, self.eps, universe, strict=self.strict)

    def image(self, Z, universe):
        """``U[Z]``: union of the sections at the points of ``Z``."""
        universe = self.base.coerce(universe)
        D = self.base.pairwise(self.base.coerce(Z), universe)
        keep = np.flatnonzero(self._within(D).any(axis=0))
        return self.base.subset(universe, keep)

    def relation(self, universe):
        """Boolean matrix of the relation restricted to ``universe``."""
        universe = self.base.coerce(universe)
        return self._within(self.base.pairwise(universe, universe))


def compose(M, N):
    """Relational composition of boolean matrices: ``(x, z)`` with some ``y``."""
    M = np.asarray(M, dtype=bool)
    N = np.asarray(N, dtype=bool)
    return (M.astype(np.int64) @ N.astype(np.int64)) > 0


def contains_diagonal(R):
    return bool(np.all(np.diag(np.asarray(R, dtype=bool))))


def check_qu2(m, eps, universe, tol=1e-9):
    """Verify ``B_{eps/2} o B_{eps/2} ⊆ B_eps`` on a finite universe.

    Returns ``(True, None)`` or ``(False, (x, y, z))`` with a witness triple
    of universe indices.  The inclusion follows from the triangle
    inequality, so a failure means the input was not a quasi-metric.
    """
    universe = m.coerce(universe)
    D = m.pairwise(universe, universe)
    half = D <= eps / 2
    slack = tol * max(1.0, eps)
    for y in range(D.shape[0]):
        xs = np.flatnonzero(half[:, y])
        zs = np.flatnonzero(half[y, :])
        if xs.size and zs.size:
            sub = D[np.ix_(xs, zs)]
            bad = np.argwhere(sub > eps + slack)
            if bad.size:
                return False, (int(xs[bad[0, 0]]), y, int(zs[bad[0, 1]]))
    return True, None


def metric_axioms_hold(m, universe, tol=1e-9):
    """Symmetry, definiteness and triangle inequality of ``m`` on ``universe``."""
    universe = m.coerce(universe)
    D = m.pairwise(universe, universe)
    n = D.shape[0]
    if not np.allclose(D, D.T, atol=tol, rtol=0):
        return False
    off = ~np.eye(n, dtype=bool)
    if np.any(D[off] <= 0):
        return False
    slack = tol * max(1.0, float(D.max(initial=0.0)))
    return all(not np.any(D > D[:, y, None] + D[None, y, :] + slack) for y in range(n))

