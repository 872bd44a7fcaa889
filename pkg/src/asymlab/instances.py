"""Seeded random instances for property runs and the acceptance battery.

Every generator takes a ``numpy.random.Generator`` so that callers control
the stream; :func:`rng_for` derives independent per-instance streams from
one integer seed.
"""
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .norms import PolyAsymNorm
from .operators import LinOperator, is_compact, op_norm
from .quasimetric import InducedQuasiMetric, TabularQuasiMetric

MAX_TRIES = 200


def rng_for(seed, *keys):
    """Independent generator for instance ``keys`` under master ``seed``."""
    return np.random.default_rng([int(seed) & (2**63 - 1), *map(int, keys)])


def random_norm(rng, dim, n_generators=None, integer=False):
    """Random full-rank polyhedral asymmetric norm.

    With ``n_generators`` between ``dim`` and ``2 dim`` the unit ball is often
    unbounded; larger counts usually give a bounded ball.  Real generators
    have lengths in ``[0.5, 2]`` so that ball vertices stay at moderate range.
    """
    for _ in range(MAX_TRIES):
        k = n_generators or int(rng.integers(dim, 2 * dim + 3))
        if integer:
            G = rng.integers(-3, 4, size=(k, dim)).astype(float)
        else:
            G = rng.normal(size=(k, dim))
            G *= rng.uniform(0.5, 2.0, size=(k, 1)) / np.linalg.norm(G, axis=1, keepdims=True)
        if np.linalg.matrix_rank(G) == dim and np.any(G):
            return PolyAsymNorm(G)
    raise RuntimeError("could not draw a full-rank generator set")


def random_operator(rng, p, q, integer=False):
    shape = (q.dim, p.dim)
    M = rng.integers(-2, 3, size=shape).astype(float) if integer else rng.normal(size=shape)
    return LinOperator(M, p, q)


def _bounded_screen(A):
    # vertex-form support of A^T b_j over B_p; cheaper than one LP per generator
    return bool(np.all(np.isfinite(A.domain.ball_vertices.support(A.codomain.generators @ A.matrix))))


def random_bounded_operator(rng, dims=(1, 2, 3)):
    """Random ``A`` with ``||A|_{p,q}`` finite (rejection sampling)."""
    for _ in range(MAX_TRIES):
        p = random_norm(rng, int(rng.choice(dims)))
        q = random_norm(rng, int(rng.choice(dims)))
        A = random_operator(rng, p, q)
        if _bounded_screen(A) and op_norm(A) < np.inf:
            return A
    return LinOperator(np.zeros((q.dim, p.dim)), p, q)


def random_compact_operator(rng, dims=(1, 2), p=None, q=None):
    """Random ``(p, q)``-compact ``A``; falls back to the zero operator."""
    for _ in range(MAX_TRIES):
        p_ = p or random_norm(rng, int(rng.choice(dims)))
        q_ = q or random_norm(rng, int(rng.choice(dims)))
        A = random_operator(rng, p_, q_)
        if is_compact(A).compact:
            return A
    return LinOperator(np.zeros((q_.dim, p_.dim)), p_, q_)


def random_compact_pair(rng, dims=(1, 2)):
    """Two compact operators between the same pair of spaces."""
    A1 = random_compact_operator(rng, dims)
    A2 = random_compact_operator(rng, p=A1.domain, q=A1.codomain)
    return A1, A2


def convergent_family(rng, length=12, dims=(1, 2)):
    """Compact ``A`` and ``A_n = A + B / n`` with ``B`` compact and ``-B`` bounded,
    so ``sup_{B_p} q(Ax - A_n x) = ||-B| / n -> 0``.  ``B`` is scaled so that
    ``||-B| <= 1``."""
    A = random_compact_operator(rng, dims)
    B = A
    for _ in range(MAX_TRIES):
        C = random_compact_operator(rng, p=A.domain, q=A.codomain)
        if op_norm(-C) < np.inf:
            B = C
            break
    B = (1.0 / max(1.0, op_norm(-B))) * B
    return A, [A + (1.0 / n) * B for n in range(1, length + 1)]


def random_tabular(rng, n, density=0.5, scale=5.0):
    """Directed shortest-path closure of a random weighted digraph.

    The closure satisfies the triangle inequality by construction; missing
    connections are capped at the largest finite distance plus ``scale``,
    which keeps the triangle inequality.
    """
    W = rng.uniform(0.0, scale, size=(n, n)) * (rng.uniform(size=(n, n)) < density)
    np.fill_diagonal(W, 0.0)
    D = shortest_path(csr_matrix(W), directed=True)
    finite = D[np.isfinite(D)]
    cap = (finite.max() if finite.size else 0.0) + scale
    D[~np.isfinite(D)] = cap
    np.fill_diagonal(D, 0.0)
    return TabularQuasiMetric(tuple(f"v{i}" for i in range(n)), D)


def random_sequence(rng, space, n):
    """Mixture of constant, damped, drifting and oscillating prefixes."""
    kind = int(rng.integers(0, 4))
    if isinstance(space, TabularQuasiMetric):
        labels = space.labels
        if kind == 0:
            idx = [int(rng.integers(len(labels)))] * n
        elif kind == 1:
            tail = int(rng.integers(len(labels)))
            idx = [int(rng.integers(len(labels))) if i < n // 3 else tail for i in range(n)]
        elif kind == 2:
            a, b = rng.choice(len(labels), size=2, replace=len(labels) < 2)
            idx = [int(a) if i % 2 else int(b) for i in range(n)]
        else:
            idx = rng.integers(len(labels), size=n).tolist()
        return [labels[i] for i in idx]
    dim = space.dim
    t = np.arange(1, n + 1, dtype=float)[:, None]
    v = rng.normal(size=(1, dim))
    if kind == 0:
        return np.repeat(v, n, axis=0)
    if kind == 1:
        return v + rng.normal(size=(n, dim)) / t**2
    if kind == 2:
        return t * v
    return np.cumsum(rng.normal(size=(n, dim)), axis=0)


def random_space(rng):
    if rng.uniform() < 0.5:
        return random_tabular(rng, int(rng.integers(3, 9)))
    return InducedQuasiMetric(random_norm(rng, int(rng.integers(1, 3))))


def peak_then_oscillation(n=20):
    """Weakly left K-Cauchy but not left K-Cauchy under the ``u``-induced distance.

    ``x_1 = 10`` sits above every later term, so ``u(x_n - x_1) = 0``;
    the tail keeps alternating ``0, 1`` and ``u(1 - 0) = 1``.
    """
    u = PolyAsymNorm([[1.0]])
    pts = [10.0] + [float(i % 2) for i in range(n - 1)]
    return InducedQuasiMetric(u), np.asarray(pts)[:, None]
