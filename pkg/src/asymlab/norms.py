"""Polyhedral asymmetric norms on R^n.

A norm is given by a finite list of linear functionals (generators)
``a_1, ..., a_k`` and evaluates as ``p(x) = max(0, max_i <a_i, x>)``.  The
implicit zero generator makes ``p`` nonnegative; positive homogeneity and
subadditivity then hold by construction, and definiteness (``p(x) = p(-x) = 0``
only at ``x = 0``) is equivalent to the generators spanning R^n.

The closed unit ball ``B_p = {x : <a_i, x> <= 1 for all i}`` is a polyhedron
containing 0 in its interior, so every supremum of a linear form over it is a
linear program (:func:`ball_support`).
"""
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.linalg import null_space
from scipy.stats import qmc

from ._lp import lp_support
from ._validation import as_points, as_vector, check_exact_keys
from .errors import InvalidInstance

__all__ = [
    "PolyAsymNorm",
    "NormValidation",
    "BallVertices",
    "validate_norm",
    "ball_support",
    "variant",
    "sample_ball",
]


@dataclass(frozen=True, eq=False)
class PolyAsymNorm:
    """Asymmetric norm ``p(x) = max(0, max_i <a_i, x>)``.

    Zero generators are dropped and duplicates removed (first occurrence
    wins); a list with no nonzero generator is rejected.

    Examples
    --------
    >>> u = PolyAsymNorm([[1.0]])
    >>> u([3.0]), u([-2.0])
    (3.0, 0.0)
    """

    generators: np.ndarray

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float)
        if G.ndim == 1:
            G = G.reshape(1, -1)
        if G.ndim != 2 or G.shape[1] == 0:
            raise InvalidInstance(f"generators must be a (k, dim) array, got shape {G.shape}")
        if not np.all(np.isfinite(G)):
            raise InvalidInstance("generators have non-finite entries")
        G = G[np.any(G != 0.0, axis=1)]
        if G.shape[0] == 0:
            raise InvalidInstance("at least one nonzero generator is required")
        _, first = np.unique(G, axis=0, return_index=True)
        G = G[np.sort(first)]
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self):
        return self.generators.shape[1]

    def __call__(self, x):
        x = as_vector(x, self.dim)
        return max(0.0, float(np.max(self.generators @ x)))

    def evaluate(self, X):
        """Vectorised evaluation on the rows of ``X``."""
        X = as_points(X, self.dim)
        return np.maximum(0.0, (X @ self.generators.T).max(axis=1))

    def conjugate(self):
        """``x -> p(-x)``, obtained by negating every generator."""
        return PolyAsymNorm(-self.generators)

    def symmetrize(self):
        """``x -> max(p(x), p(-x))``: the union of generators and their negatives."""
        return PolyAsymNorm(np.vstack([self.generators, -self.generators]))

    def __eq__(self, other):
        if not isinstance(other, PolyAsymNorm):
            return NotImplemented
        a = self.generators[np.lexsort(self.generators.T[::-1])]
        b = other.generators[np.lexsort(other.generators.T[::-1])]
        return a.shape == b.shape and bool(np.array_equal(a, b))

    __hash__ = None

    def __repr__(self):
        return f"PolyAsymNorm(dim={self.dim}, generators={self.generators.tolist()})"

    @cached_property
    def ball_vertices(self):
        return BallVertices.from_norm(self)

    def to_json(self):
        return {"dim": self.dim, "generators": self.generators.tolist()}

    @classmethod
    def from_json(cls, obj):
        check_exact_keys(obj, ("dim", "generators"), what="norm")
        dim = obj["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise InvalidInstance("norm 'dim' must be a positive integer")
        gens = obj["generators"]
        if not isinstance(gens, list) or not gens:
            raise InvalidInstance("norm 'generators' must be a nonempty list")
        if any(not isinstance(g, list) or len(g) != dim for g in gens):
            raise InvalidInstance(f"every generator must be a list of {dim} numbers")
        return cls(np.array(gens, dtype=float))


def variant(p, kind):
    """Select ``p``, its conjugate or its symmetrization.

    ``kind`` is one of ``"p"``/``"q"`` (the norm itself), ``"pbar"``/``"qbar"``
    (conjugate) or ``"ps"``/``"qs"`` (symmetrization).
    """
    if kind in ("p", "q"):
        return p
    if kind in ("pbar", "qbar", "bar"):
        return p.conjugate()
    if kind in ("ps", "qs", "s"):
        return p.symmetrize()
    raise ValueError(f"unknown norm variant {kind!r}")


@dataclass(frozen=True)
class NormValidation:
    valid: bool
    dim: int
    rank: int
    witness: Optional[np.ndarray]
    subadditive: bool = True
    homogeneous: bool = True

    def to_json(self):
        return {
            "valid": self.valid,
            "dim": self.dim,
            "rank": self.rank,
            "AN1": self.valid,
            "AN2": self.homogeneous,
            "AN3": self.subadditive,
            "witness": None if self.witness is None else self.witness.tolist(),
        }


def validate_norm(p):
    """Check the definiteness axiom.

    ``p(x) = p(-x) = 0`` forces ``<a_i, x> = 0`` for every generator, so the
    axiom holds iff the generators have full rank.  On failure the witness is
    a unit vector from their null space.  Homogeneity and subadditivity hold
    structurally for a max of linear forms and are reported as such.
    """
    G = p.generators
    rank = int(np.linalg.matrix_rank(G))
    witness = None
    if rank < p.dim:
        witness = null_space(G)[:, 0]
        # deterministic sign: first nonzero entry positive
        nz = np.flatnonzero(np.abs(witness) > 1e-12)
        if nz.size and witness[nz[0]] < 0:
            witness = -witness
    return NormValidation(valid=rank == p.dim, dim=p.dim, rank=rank, witness=witness)


def ball_support(p, c):
    """``sup {<c, x> : x in B_p}`` as a :class:`~asymlab._lp.Support`.

    The value is ``math.inf`` when the LP is unbounded; the result then
    carries a ray ``d`` with ``<a_i, d> <= 0`` for all ``i`` and ``<c, d> > 0``.
    """
    c = as_vector(c, p.dim, name="c")
    return lp_support(p.generators, c)


@dataclass(frozen=True)
class BallVertices:
    """Vertex/extreme-ray description of ``B_p``.

    For a definite norm the ball is a pointed polyhedron, hence the convex
    hull of its vertices plus the cone spanned by its extreme rays.  Used for
    batched support-function evaluation and as an independent check on the LP.
    """

    vertices: np.ndarray
    rays: np.ndarray

    @classmethod
    def from_norm(cls, p):
        G = p.generators
        k, n = G.shape
        if np.linalg.matrix_rank(G) < n:
            raise InvalidInstance("vertex form needs a definite norm (full-rank generators)")
        gscale = max(1.0, float(np.abs(G).max()))
        verts = []
        for S in itertools.combinations(range(k), n):
            M = G[list(S)]
            if np.linalg.matrix_rank(M) < n:
                continue
            v = np.linalg.solve(M, np.ones(n))
            if np.max(G @ v) <= 1.0 + 1e-9 * max(1.0, np.abs(v).max()) * gscale:
                verts.append(v)
        rays = []
        for S in itertools.combinations(range(k), n - 1):
            M = G[list(S)] if S else np.zeros((0, n))
            N = np.eye(n) if M.shape[0] == 0 else null_space(M)
            if N.shape[1] != 1:
                continue
            d = N[:, 0] / np.abs(N[:, 0]).max()
            for s in (d, -d):
                if np.max(G @ s) <= 1e-9 * gscale:
                    rays.append(s)
        return cls(_dedupe(verts, n), _dedupe(rays, n))

    @property
    def bounded(self):
        return self.rays.shape[0] == 0

    def support(self, C, tol=1e-9):
        """Support values ``sup <c, x>`` over the ball for each row ``c`` of ``C``."""
        C = np.atleast_2d(np.asarray(C, dtype=float))
        vals = (C @ self.vertices.T).max(axis=1)
        if self.rays.shape[0]:
            gains = (C @ self.rays.T).max(axis=1)
            scale = np.maximum(1.0, np.abs(C).max(axis=1))
            vals = np.where(gains > tol * scale, math.inf, vals)
        return vals


def _dedupe(points, n):
    if not points:
        return np.zeros((0, n))
    P = np.array(points)
    keep = []
    for i, x in enumerate(P):
        if all(np.abs(x - P[j]).max() > 1e-9 * max(1.0, np.abs(x).max()) for j in keep):
            keep.append(i)
    return P[keep]


def sample_ball(p, n_points=2048, box=10.0, seed=0):
    """Deterministic low-discrepancy sample of ``B_p`` intersected with a box.

    Scrambled Sobol points fill ``[-box, box]^n``; points outside the ball are
    pulled radially onto its boundary (``x / p(x)``), which keeps them in the
    box and puts mass on the boundary where nets are tightest.  The origin is
    always the first sample.
    """
    sob = qmc.Sobol(d=p.dim, scramble=True, seed=seed)
    m = max(1, int(math.ceil(math.log2(max(n_points, 2)))))
    U = sob.random_base2(m)[: n_points - 1]
    X = (2.0 * U - 1.0) * box
    vals = p.evaluate(X)
    X = X / np.maximum(1.0, vals)[:, None]
    return np.vstack([np.zeros((1, p.dim)), X])


def support_value(p, c):
    """Shorthand for ``ball_support(p, c).value``."""
    return ball_support(p, c).value



def hit_and_run_sample(p, n_points=1024, box=10.0, seed=0, chains=64, thin=8, burn_in=4):
    """Approximately uniform sample of ``B_p ∩ [-box, box]^n`` by hit-and-run.

    ``chains`` walks start at the origin; each step draws a random direction
    and jumps to a uniform point of the chord cut out by ``Gx <= 1`` and the
    box.  Unlike :func:`sample_ball`, mass follows volume, so long thin
    recession directions of an unbounded ball are reached.
    """
    rng = np.random.default_rng(seed)
    G, n = p.generators, p.dim
    X = np.zeros((chains, n))
    rounds = -(-n_points // chains)
    out = []
    for step in range((rounds + burn_in) * thin):
        T = rng.normal(size=(chains, n))
        T /= np.linalg.norm(T, axis=1, keepdims=True)
        GT = T @ G.T
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (1.0 - X @ G.T) / GT
            up = np.where(T > 0, (box - X) / T, np.where(T < 0, (-box - X) / T, np.inf))
            down = np.where(T > 0, (-box - X) / T, np.where(T < 0, (box - X) / T, -np.inf))
        hi = np.minimum(np.where(GT > 1e-15, r, np.inf).min(axis=1), up.min(axis=1))
        lo = np.maximum(np.where(GT < -1e-15, r, -np.inf).max(axis=1), down.max(axis=1))
        X = X + (lo + (hi - lo) * rng.uniform(size=chains))[:, None] * T
        if step >= burn_in * thin and step % thin == 0:
            out.append(X.copy())
    return np.vstack(out)[:n_points]
