"""Dual cone, polar ball, dual operator and the Schauder-type certificate.

Functionals on R^n are covectors acting through the standard inner product.
The dual cone of ``(R^n, p)`` is the set of covectors ``phi`` with
``phi(x) <= beta p(x)``, i.e. with ``||phi|_p = sup_{B_p} phi`` finite.  On it
the asymmetric distance ``d(phi1, phi2) = sup_{B_p} (phi2 - phi1)`` (clamped
at 0) generates the dual quasi-uniformity; it takes the value ``+inf`` as soon
as ``phi2 - phi1`` increases along a recession direction of ``B_p``.
"""
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from ._validation import as_points, as_vector, check_exact_keys, scaled_tol
from .covering import _assign, greedy_cover
from .errors import InvalidInstance, PreconditionFailed
from .norms import ball_support
from .operators import LinOperator, is_compact, op_norm

DEFAULT_GRID_DENSITY = 12
MAX_SUBSET = 4


def functional_from_json(obj):
    check_exact_keys(obj, ("covector",), what="functional")
    if not isinstance(obj["covector"], list) or not obj["covector"]:
        raise InvalidInstance("'covector' must be a nonempty list")
    return as_vector(obj["covector"], name="covector")


def functional_to_json(phi):
    return {"covector": np.asarray(phi, dtype=float).tolist()}


def func_norm(phi, p):
    """``sup {phi(x) : p(x) <= 1}`` clamped at 0; finite iff ``phi`` is in the dual cone."""
    phi = as_vector(phi, p.dim, name="phi")
    return max(0.0, ball_support(p, phi).value)


def in_dual_cone(phi, p):
    return func_norm(phi, p) != math.inf


def dual_qdist(phi1, phi2, p):
    """``sup_{B_p} (phi2 - phi1)`` clamped at 0 (``math.inf`` allowed)."""
    phi1 = as_vector(phi1, p.dim, name="phi1")
    phi2 = as_vector(phi2, p.dim, name="phi2")
    return max(0.0, ball_support(p, phi2 - phi1).value)


class DualSpace:
    """The dual cone of ``(R^n, p)`` with the distance :func:`dual_qdist`.

    Exposes the same ``coerce``/``pairwise``/``subset`` interface as the
    quasi-metric spaces, evaluated in batch through the vertex/ray form of
    ``B_p`` instead of one LP per pair.
    """

    def __init__(self, p):
        self.norm = p
        self._vrep = p.ball_vertices

    def coerce(self, points):
        return as_points(points, self.norm.dim)

    def subset(self, points, idx):
        return self.coerce(points)[np.asarray(idx, dtype=int)]

    def size(self, points):
        return len(self.coerce(points))

    def pairwise(self, Phi1, Phi2, tol=1e-9):
        """``D[i, j] = d(Phi1[i], Phi2[j])``."""
        Phi1 = self.coerce(Phi1)
        Phi2 = self.coerce(Phi2)
        V, R = self._vrep.vertices, self._vrep.rays
        PV1, PV2 = Phi1 @ V.T, Phi2 @ V.T
        D = np.zeros((len(Phi1), len(Phi2)))
        for k in range(V.shape[0]):
            np.maximum(D, PV2[None, :, k] - PV1[:, k, None], out=D)
        if R.shape[0]:
            PR1, PR2 = Phi1 @ R.T, Phi2 @ R.T
            scale = max(1.0, float(np.abs(Phi1).max(initial=0.0)), float(np.abs(Phi2).max(initial=0.0)))
            unbounded = np.zeros_like(D, dtype=bool)
            for k in range(R.shape[0]):
                unbounded |= PR2[None, :, k] - PR1[:, k, None] > tol * scale
            D[unbounded] = math.inf
        return D

    def dist(self, phi1, phi2):
        return float(self.pairwise([phi1], [phi2])[0, 0])


@dataclass(frozen=True)
class PolarBall:
    """Polar of ``B_p`` in vertex form ``conv({0} ∪ generators of p)``.

    Every generator ``a_i`` satisfies ``<a_i, x> <= 1`` on ``B_p`` by
    definition, and Farkas' lemma gives the converse: ``phi <= 1`` on ``B_p``
    iff ``phi = sum lambda_i a_i`` with ``lambda >= 0``, ``sum lambda <= 1``.
    """

    base_norm: object
    vertices: np.ndarray

    def validate(self, tol=1e-9):
        """Every vertex has support at most 1 over ``B_p`` (checked by LP)."""
        return all(ball_support(self.base_norm, v).value <= 1.0 + scaled_tol(v, tol=tol)
                   for v in self.vertices)

    def contains(self, phi, tol=1e-9):
        """Membership through the vertex form (LP feasibility of a convex combination)."""
        phi = as_vector(phi, self.base_norm.dim, name="phi")
        k = self.vertices.shape[0]
        A_eq = np.vstack([self.vertices.T, np.ones((1, k))])
        b_eq = np.concatenate([phi, [1.0]])
        res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k,
                      method="highs", options={"primal_feasibility_tolerance": tol})
        return res.status == 0

    def contains_by_inequality(self, phi, tol=1e-9):
        """Membership through the defining inequality ``sup_{B_p} phi <= 1``."""
        return func_norm(phi, self.base_norm) <= 1.0 + tol

    def grid(self, density=DEFAULT_GRID_DENSITY, max_subset=MAX_SUBSET):
        """Barycentric grid: combinations of at most ``max_subset`` vertices
        with weights in ``{0, 1/density, ..., 1}``, deduplicated, in a fixed order."""
        return simplex_grid(self.vertices, density, max_subset)


def polar(p):
    V = np.vstack([np.zeros((1, p.dim)), p.generators])
    return PolarBall(p, V)


def _compositions(total, parts):
    """Tuples of ``parts`` positive integers summing to ``total``."""
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def simplex_grid(V, density, max_subset=MAX_SUBSET):
    V = np.asarray(V, dtype=float)
    k = V.shape[0]
    size = min(k, max_subset)
    pts = []
    for s in range(1, size + 1):
        for S in itertools.combinations(range(k), s):
            for w in _compositions(density, s):
                pts.append(np.asarray(w, dtype=float) @ V[list(S)] / density)
    P = np.array(pts)
    _, first = np.unique(np.round(P, 12), axis=0, return_index=True)
    return P[np.sort(first)]


def dual_operator(A, psi):
    """``A^flat psi = psi o A``, i.e. the covector ``A^T psi``."""
    M = A.matrix if isinstance(A, LinOperator) else np.asarray(A, dtype=float)
    psi = as_vector(psi, M.shape[0], name="psi")
    return M.T @ psi


@dataclass(frozen=True)
class WFlatNeighborhood:
    """``{phi : phi(x_i) - anchor(x_i) <= eps for all i}``."""

    anchor: np.ndarray
    points: np.ndarray
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        anchor = as_vector(self.anchor, name="anchor")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "points", as_points(self.points, anchor.shape[0]))

    def contains(self, phi):
        phi = as_vector(phi, self.anchor.shape[0], name="phi")
        return bool(np.all(self.points @ phi - self.points @ self.anchor <= self.eps))


def wflat_contains(N, phi):
    return N.contains(phi)


def in_wflat_entourage(points, eps, phi1, phi2):
    """``phi2(x_i) - phi1(x_i) <= eps`` for every test point (floating point)."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    return bool(np.all(X @ np.asarray(phi2) - X @ np.asarray(phi1) <= eps))


def _exact(a):
    return [Fraction(float(v)) for v in np.ravel(a)]


def _exact_dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def wflat_pullback(A, points, eps, psi1, psi2):
    """Check the entourage pullback for ``A^flat`` in exact rational arithmetic.

    Returns ``(premise, conclusion)`` where the premise is
    ``psi2(Ax_i) - psi1(Ax_i) <= eps`` for all test points ``x_i`` and the
    conclusion is ``(A^T psi2)(x_i) - (A^T psi1)(x_i) <= eps``.  All inputs are
    converted to exact fractions first, so the implication is checked with no
    rounding at all.
    """
    M = A.matrix if isinstance(A, LinOperator) else np.asarray(A, dtype=float)
    m, n = M.shape
    X = as_points(points, n)
    Mx = [_exact(M[r]) for r in range(m)]
    e = Fraction(float(eps))
    p1, p2 = _exact(psi1), _exact(psi2)
    cols = [[Mx[r][c] for r in range(m)] for c in range(n)]
    f1 = [_exact_dot(col, p1) for col in cols]
    f2 = [_exact_dot(col, p2) for col in cols]
    premise = conclusion = True
    for x in X:
        xe = _exact(x)
        Ax = [_exact_dot(row, xe) for row in Mx]
        premise &= _exact_dot(p2, Ax) - _exact_dot(p1, Ax) <= e
        conclusion &= _exact_dot(f2, xe) - _exact_dot(f1, xe) <= e
    return premise, conclusion


def dual_continuity_radius(A, eps):
    """``delta = eps / ||A|`` for the dual quasi-uniform continuity of ``A^flat``.

    If ``d_q(psi1, psi2) <= delta`` then ``d_p(A^T psi1, A^T psi2) <= eps``,
    because ``A(B_p) ⊆ ||A| B_q``.  A zero norm forces ``A = 0``, in which case
    every ``delta`` works and ``math.inf`` is returned.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    beta = op_norm(A, "p", "q")
    if beta == math.inf:
        raise PreconditionFailed("A is not bounded, so A^flat is not defined on the dual cone")
    if beta == 0.0:
        return math.inf
    return eps / beta


def verify_dual_continuity(A, eps, n_pairs=200, seed=0, tol=1e-9):
    """Sample pairs ``(psi1, psi2)`` at dual distance ``<= delta`` and measure
    the worst ``d_p(A^T psi1, A^T psi2)``.

    ``psi1`` ranges over the dual cone of ``q``; ``psi2 = psi1 + t delta theta``
    with ``theta`` in the polar of ``B_q`` and ``t in [0, 1]``.  Returns
    ``(ok, delta, worst)``.
    """
    delta = dual_continuity_radius(A, eps)
    q, p = A.codomain, A.domain
    rng = np.random.default_rng(seed)
    Gq = q.generators
    V = polar(q).vertices
    step = 1.0 if delta == math.inf else delta
    psi1 = rng.exponential(size=(n_pairs, Gq.shape[0])) @ Gq
    w = rng.dirichlet(np.ones(V.shape[0]), size=n_pairs)
    theta = w @ V
    t = rng.uniform(0.0, 1.0, size=(n_pairs, 1))
    psi2 = psi1 + t * step * theta
    Dp = DualSpace(p).pairwise(psi1 @ A.matrix, psi2 @ A.matrix)
    worst = float(np.diag(Dp).max(initial=0.0))
    if delta == math.inf:
        return worst <= tol, delta, worst
    return worst <= eps + tol * max(1.0, eps), delta, worst


@dataclass
class SchauderReport:
    epsilon: float
    net: np.ndarray
    max_deficit: float
    samples: int
    verified: bool

    def to_json(self):
        return {
            "epsilon": self.epsilon,
            "net": self.net.tolist(),
            "max_deficit": self.max_deficit,
            "samples": self.samples,
            "verified": self.verified,
        }


def schauder_certificate(A, eps, density=DEFAULT_GRID_DENSITY, max_subset=MAX_SUBSET, tol=1e-9):
    """Finite net of ``A^flat(B^flat_q)`` under the dual distance of ``p``.

    ``B^flat_q`` is sampled by the barycentric grid of its vertex form, the
    images ``A^T psi`` are covered greedily at radius ``eps``, and every
    sampled image is then checked to lie within ``3 eps`` of its center.
    Requires ``A`` to be ``(p, q)``-compact.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    verdict = is_compact(A, "p", "q")
    if not verdict.compact:
        raise PreconditionFailed("A is not (p, q)-compact", witness=verdict.witness_ray)
    Psi = polar(A.codomain).grid(density, max_subset)
    Phi = Psi @ A.matrix
    space = DualSpace(A.domain)
    D = space.pairwise(Phi, Phi)
    chosen = greedy_cover(D <= eps, lambda c: D[c])
    assignment = _assign(D[chosen], eps, False)
    deficits = D[np.asarray(chosen)[assignment], np.arange(len(Phi))]
    worst = float(deficits.max(initial=0.0))
    ok = worst <= 3 * eps + tol * max(1.0, eps)
    return SchauderReport(eps, Phi[chosen], worst, len(Phi), ok)

