"""Bounded and compact linear operators between polyhedral asymmetric normed spaces.

For ``A : (R^n, p) -> (R^m, q)`` and unit-ball/target selectors
``mu in {p, pbar, ps}``, ``nu in {q, qbar, qs}``::

    ||A|_{mu,nu} = sup { nu(Ax) : mu(x) <= 1 }
                 = max(0, max_j sup { <A^T b_j, x> : x in B_mu })

over the generators ``b_j`` of ``nu``: one support LP per generator.  The value
may be ``+inf`` (the extended norm); it is finite exactly when ``A`` is
``(mu, nu)``-bounded, and then it is the least semi-Lipschitz constant.

Compactness (``A(B_mu)`` is ``nu``-precompact) is decided through the
recession cone of ``B_mu``: ``A`` is compact iff ``nu(Ad) = 0`` for every
direction ``d`` with ``<a_i, d> <= 0`` for all generators of ``mu``.  Writing
``B_mu = P + R`` with ``P`` a polytope and ``R`` that cone, ``nu(Ax - Az) <=
nu(A(v - w)) + nu(Ad)`` covers ``A(B_mu)`` from a net of the compact
``A(P)``; conversely a direction with ``nu(Ad) > 0`` makes ``nu`` unbounded on
``A(B_mu)``, which no finite net can cover.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._lp import recession_ray
from ._validation import as_matrix, as_points, check_exact_keys, scaled_tol
from .covering import EpsNetCertificate, _assign, greedy_cover
from .errors import DimensionMismatch, InvalidInstance, PreconditionFailed
from .norms import PolyAsymNorm, ball_support, hit_and_run_sample, sample_ball, variant
from .quasimetric import InducedQuasiMetric

SELECTORS_MU = ("p", "pbar", "ps")
SELECTORS_NU = ("q", "qbar", "qs")
SAMPLE_POINTS = 2048
SAMPLE_BOX = 10.0


@dataclass(frozen=True, eq=False)
class LinOperator:
    """Matrix ``A`` (m x n) from ``(R^n, domain)`` to ``(R^m, codomain)``."""

    matrix: np.ndarray
    domain: PolyAsymNorm
    codomain: PolyAsymNorm

    def __post_init__(self):
        A = as_matrix(self.matrix).copy()
        if A.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"matrix shape {A.shape} does not map dim {self.domain.dim} to dim {self.codomain.dim}"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, X):
        X = as_points(X, self.domain.dim)
        return X @ self.matrix.T

    def _same_spaces(self, other):
        if self.shape != other.shape or self.domain != other.domain or self.codomain != other.codomain:
            raise DimensionMismatch("operators act between different spaces")

    def __add__(self, other):
        self._same_spaces(other)
        return LinOperator(self.matrix + other.matrix, self.domain, self.codomain)

    def __sub__(self, other):
        self._same_spaces(other)
        return LinOperator(self.matrix - other.matrix, self.domain, self.codomain)

    def __neg__(self):
        return LinOperator(-self.matrix, self.domain, self.codomain)

    def __rmul__(self, alpha):
        return LinOperator(float(alpha) * self.matrix, self.domain, self.codomain)

    def with_matrix(self, M):
        return LinOperator(M, self.domain, self.codomain)

    def to_json(self, domain_ref=None, codomain_ref=None):
        return {
            "matrix": self.matrix.tolist(),
            "domain": domain_ref if domain_ref is not None else self.domain.to_json(),
            "codomain": codomain_ref if codomain_ref is not None else self.codomain.to_json(),
        }

    @classmethod
    def from_json(cls, obj, resolve=None):
        """Build from ``{"matrix", "domain", "codomain"}``.

        Norm fields may be inline norm objects or string references, looked
        up through ``resolve``.
        """
        check_exact_keys(obj, ("matrix", "domain", "codomain"), what="operator")

        def norm(ref):
            if isinstance(ref, str):
                if resolve is None:
                    raise InvalidInstance(f"norm reference {ref!r} needs a bundle")
                return resolve(ref)
            return PolyAsymNorm.from_json(ref)

        return cls(np.array(obj["matrix"], dtype=float), norm(obj["domain"]), norm(obj["codomain"]))


def _norms(A, mu, nu):
    return variant(A.domain, mu), variant(A.codomain, nu)


@dataclass(frozen=True)
class OpNorm:
    """``sup nu(Ax)`` over ``B_mu`` with its certificate.

    For a finite value, ``argmax`` attains it; for ``+inf``, ``ray`` is a
    recession direction of ``B_mu`` along which ``nu(A . )`` grows.
    """

    value: float
    argmax: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None

    @property
    def bounded(self):
        return self.value != math.inf


def op_norm_details(A, mu="p", nu="q"):
    dom, cod = _norms(A, mu, nu)
    best = OpNorm(0.0, argmax=np.zeros(A.domain.dim))
    for b in cod.generators:
        c = A.matrix.T @ b
        # unit objective: solver tolerances are absolute, so tiny entries would read as zero
        scale = float(np.max(np.abs(c)))
        if scale == 0:
            continue
        s = ball_support(dom, c / scale)
        if not s.bounded:
            return OpNorm(math.inf, ray=s.ray)
        if scale * s.value > best.value:
            best = OpNorm(scale * s.value, argmax=s.point)
    return best


def op_norm(A, mu="p", nu="q"):
    """Extended asymmetric norm ``sup {nu(Ax) : x in B_mu}`` (``math.inf`` allowed)."""
    return op_norm_details(A, mu, nu).value


def is_bounded(A, mu="p", nu="q"):
    """``(bounded, beta)`` with ``beta`` the least constant in ``nu(Ax) <= beta mu(x)``."""
    beta = op_norm(A, mu, nu)
    return beta != math.inf, beta


def sym_op_norm(A):
    """Operator norm between the symmetrized spaces; always finite."""
    return op_norm(A, "ps", "qs")


def operator_qdist(A, B, mu="p", nu="q"):
    """Least ``eps`` with ``nu(Bx - Ax) <= eps`` on ``B_mu``; ``math.inf`` allowed."""
    return op_norm(B - A, mu, nu)


@dataclass
class OperatorNormReport:
    flat_norm: float
    sym_norm: float
    extended: dict = field(default_factory=dict)

    def to_json(self):
        enc = _ext_json
        return {
            "flat_norm": enc(self.flat_norm),
            "sym_norm": enc(self.sym_norm),
            "extended": {k: enc(v) for k, v in self.extended.items()},
            "bounded": {k: v != math.inf for k, v in self.extended.items()},
        }


def norm_report(A):
    ext = {f"{mu},{nu}": op_norm(A, mu, nu) for mu in SELECTORS_MU for nu in SELECTORS_NU}
    return OperatorNormReport(ext["p,q"], ext["ps,qs"], ext)


def _ext_json(v):
    return "inf" if v == math.inf else v


@dataclass
class CompactnessVerdict:
    """Outcome of :func:`is_compact`.

    ``witness_ray`` (when not compact) satisfies ``G_mu d <= 0`` and
    ``nu(Ad) > 0``.  When compact, :meth:`net` builds an ``eps``-net of
    ``A(B_mu)`` restricted to the deterministic sample of ``B_mu``.
    """

    compact: bool
    operator: LinOperator
    mu: str = "p"
    nu: str = "q"
    witness_ray: Optional[np.ndarray] = None
    witness_value: float = 0.0

    def net(self, eps, sample=None):
        if not self.compact:
            raise PreconditionFailed("operator is not compact", witness=self.witness_ray)
        return operator_net(self.operator, eps, self.mu, self.nu, sample=sample)

    def to_json(self):
        out = {"compact": self.compact, "mu": self.mu, "nu": self.nu}
        if self.witness_ray is not None:
            out["witness_ray"] = self.witness_ray.tolist()
            out["witness_growth"] = self.witness_value
        return out


def is_compact(A, mu="p", nu="q", tol=1e-9):
    """Decide ``(mu, nu)``-compactness through the recession cone of ``B_mu``.

    For each generator ``b_j`` of ``nu`` the box-normalised LP
    ``max <A^T b_j, d>`` over ``{G_mu d <= 0, |d|_inf <= 1}`` finds the worst
    recession direction; a positive value is the witness.
    """
    dom, cod = _norms(A, mu, nu)
    G = dom.generators
    for b in cod.generators:
        c = A.matrix.T @ b
        d, gain = recession_ray(G, c)
        if gain > scaled_tol(c, tol=tol):
            d = _clean_ray(G, d)
            return CompactnessVerdict(False, A, mu, nu, witness_ray=d,
                                      witness_value=cod(A.matrix @ d))
    return CompactnessVerdict(True, A, mu, nu)


def _clean_ray(G, d):
    # snap solver noise so the certificate satisfies G d <= 0 to rounding
    d = np.where(np.abs(d) < 1e-12, 0.0, d)
    return d / np.abs(d).max()


def verify_witness_ray(A, d, mu="p", nu="q", tol=1e-9):
    dom, cod = _norms(A, mu, nu)
    d = np.asarray(d, dtype=float)
    in_cone = np.max(dom.generators @ d) <= scaled_tol(dom.generators, tol=tol)
    return bool(in_cone and cod(A.matrix @ d) > tol and np.any(d))


def default_sample(norm, seed=0, n_points=SAMPLE_POINTS, box=SAMPLE_BOX):
    return sample_ball(norm, n_points=n_points, box=box, seed=seed)


@dataclass
class OperatorNet(EpsNetCertificate):
    """Net of ``A(S)`` for a sample ``S`` of ``B_mu``, measured in ``nu``."""

    operator: Optional[LinOperator] = None
    sample: Optional[np.ndarray] = None
    mu: str = "p"
    nu: str = "q"

    def space(self):
        return InducedQuasiMetric(variant(self.operator.codomain, self.nu))

    def check(self, tol=1e-9):
        return self.verify(self.space(), tol)


def operator_net(A, eps, mu="p", nu="q", sample=None):
    """Greedy ``eps``-net of ``A(S)`` for a sample ``S`` of ``B_mu``.

    Centers are images of sample points; their preimages are kept so that
    nets of different operators over the same sample can be combined.
    """
    dom, cod = _norms(A, mu, nu)
    S = default_sample(dom) if sample is None else as_points(sample, A.domain.dim)
    Y = A(S)
    D = InducedQuasiMetric(cod).pairwise(Y, Y)
    chosen = greedy_cover(D <= eps, lambda c: D[c])
    return OperatorNet(Y[chosen], eps, _assign(D[chosen], eps, False), Y,
                       preimages=S[chosen], operator=A, sample=S, mu=mu, nu=nu)


def combine_nets(net1, net2, tol=1e-9):
    """Net of ``(A1 + A2)(S)`` from nets of ``A1(S)`` and ``A2(S)``.

    Centers are all sums ``A1 x_i + A2 y_j``; a sample point assigned to
    ``x_i`` and ``y_j`` is assigned to that pair.  The triangle inequality
    gives radius ``2 eps``; the returned certificate carries the measured
    deficits in ``meta``.
    """
    if net1.epsilon != net2.epsilon:
        raise PreconditionFailed("nets must share the same eps")
    if (net1.mu, net1.nu) != (net2.mu, net2.nu):
        raise PreconditionFailed("nets must use the same (mu, nu)")
    A1, A2 = net1.operator, net2.operator
    A1._same_spaces(A2)
    if net1.sample.shape != net2.sample.shape or not np.array_equal(net1.sample, net2.sample):
        raise PreconditionFailed("nets must be built over the same sample of the domain ball")
    A = A1 + A2
    X, Yp = net1.preimages, net2.preimages
    centers = (X @ A1.matrix.T)[:, None, :] + (Yp @ A2.matrix.T)[None, :, :]
    centers = centers.reshape(-1, A.shape[0])
    n2 = len(Yp)
    assignment = net1.assignment * n2 + net2.assignment
    out = OperatorNet(centers, net1.epsilon, assignment, A(net1.sample), multiplier=2.0,
                       operator=A, sample=net1.sample, mu=net1.mu, nu=net1.nu)
    ok, worst = out.check(tol)
    out.meta.update({"verified": ok, "max_deficit": worst,
                     "covering_radius": out.covering_radius(out.space())})
    return out


def limit_of_compacts_net(A, family, eps, sample=None, tol=1e-9):
    """Lift an ``eps``-net of some ``A_n0(B_p)`` to a ``3 eps``-net of ``A(B_p)``.

    ``n0`` is the first index whose operator satisfies
    ``sup_{B_p} q(Ax - A_n0 x) <= eps`` (checked exactly by LP).  With
    ``x_1..x_m`` the preimages of the ``A_n0`` net, every ``x`` has
    ``q(Ax - Ax_i) <= q(Ax - A_n0 x) + q(A_n0 x - A_n0 x_i) + q(A_n0 x_i - Ax_i)
    <= 3 eps``.  Raises :class:`PreconditionFailed` with the worst point when
    no member of the family is close enough.
    """
    worst = None
    for n0, An in enumerate(family):
        det = op_norm_details(A - An, "p", "q")
        if det.value <= eps + scaled_tol(eps, tol=tol):
            break
        if worst is None or det.value < worst[0]:
            worst = (det.value, n0, det.argmax if det.bounded else det.ray)
    else:
        raise PreconditionFailed(
            f"no family member is within {eps} of A (best gap {worst[0] if worst else None})",
            witness=None if worst is None else worst[2],
        )
    if not is_compact(An).compact:
        raise PreconditionFailed(f"family member {n0} is not compact")
    base = operator_net(An, eps, sample=sample)
    S = base.sample
    out = OperatorNet(A(base.preimages), eps, base.assignment, A(S), multiplier=3.0,
                       preimages=base.preimages, operator=A, sample=S)
    ok, deficit = out.check(tol)
    out.meta.update({"n0": n0, "hypothesis_gap": det.value, "verified": ok,
                     "max_deficit": deficit})
    return out


@dataclass
class SaturationResult:
    compact: bool
    epsilon: float
    net_size: int
    gaps: tuple
    radii: tuple

    def to_json(self):
        return {"compact": self.compact, "epsilon": self.epsilon, "net_size": self.net_size,
                "gaps": list(self.gaps), "radii": list(self.radii)}


def saturation_oracle(A, mu="p", nu="q", base_box=10.0, radii=(1e3, 1e4), n_points=1024,
                      seed=0, growth=2.0):
    """Sampling test for compactness, independent of the recession LP.

    An ``eps``-net ``Z`` of ``A(S_0)`` is built on a sample of
    ``B_mu ∩ [-10, 10]^n`` (``eps`` is an eighth of the sample's ``nu_s``
    spread).  The net is then asked to cover samples from growing boxes;
    ``gap(R) = max_y min_z nu(y - z)`` stays put once the box holds the
    bounded part of the ball when ``A`` is compact, and grows linearly in
    ``R`` otherwise.  The verdict is "not compact" iff the last gap exceeds
    both ``eps`` and ``growth`` times the previous gap.
    """
    dom, cod = _norms(A, mu, nu)
    m = InducedQuasiMetric(cod)
    Y0 = A(hit_and_run_sample(dom, n_points, base_box, seed))
    spread = float(cod.symmetrize().evaluate(Y0).max(initial=0.0))
    if spread <= 1e-12:
        return SaturationResult(True, 0.0, 1, (0.0,) * len(radii), tuple(radii))
    eps = spread / 8
    D = m.pairwise(Y0, Y0)
    Z = Y0[greedy_cover(D <= eps, lambda c: D[c])]
    gaps = tuple(float(m.pairwise(Z, A(hit_and_run_sample(dom, n_points, R, seed + 1 + k)))
                       .min(axis=0).max())
                 for k, R in enumerate(radii))
    compact = not (gaps[-1] > eps and gaps[-1] > growth * gaps[-2])
    return SaturationResult(compact, eps, len(Z), gaps, tuple(radii))
