import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asymlab import (
    LinOperator,
    PolyAsymNorm,
    PreconditionFailed,
    combine_nets,
    is_bounded,
    is_compact,
    limit_of_compacts_net,
    norm_report,
    op_norm,
    operator_net,
    operator_qdist,
    saturation_oracle,
    sym_op_norm,
)
from asymlab._validation import ext_add
from asymlab.instances import (
    convergent_family,
    random_bounded_operator,
    random_compact_pair,
    random_norm,
    random_operator,
    rng_for,
)
from asymlab.norms import BallVertices, sample_ball, variant
from asymlab.operators import verify_witness_ray

TOL = 1e-9


def vertex_op_norm(A, mu="p", nu="q"):
    """sup over B_mu of nu(Ax) through the vertex/ray form of B_mu."""
    dom, cod = variant(A.domain, mu), variant(A.codomain, nu)
    vals = BallVertices.from_norm(dom).support(cod.generators @ A.matrix)
    return max(0.0, float(vals.max()))


@pytest.fixture
def ident(u):
    return LinOperator([[1.0]], u, u)


def test_plus_infinity_example(ident):
    assert op_norm(-ident) == math.inf
    assert op_norm(ident) == 1
    assert op_norm(0 * ident) == 0


def test_boundedness(ident):
    assert is_bounded(ident) == (True, 1.0)
    assert is_bounded(-ident) == (False, math.inf)
    assert is_bounded(3 * ident) == (True, 3.0)


def test_symmetric_norm_examples(ident):
    assert sym_op_norm(ident) == 1
    assert sym_op_norm(0 * ident) == 0


def test_flat_norm_can_exceed_symmetric_norm():
    # p = max(x, -x/10), q = max(y, -y/5): B_p = [-10, 1] and q(-10) = 2
    p = PolyAsymNorm([[1.0], [-0.1]])
    q = PolyAsymNorm([[1.0], [-0.2]])
    A = LinOperator([[1.0]], p, q)
    assert op_norm(A) == pytest.approx(2.0)
    assert sym_op_norm(A) == pytest.approx(1.0)


@given(st.integers(0, 100_000))
def test_symmetric_norm_is_below_flat_norm(seed):
    A = random_bounded_operator(rng_for(seed, 20))
    assert sym_op_norm(A) <= op_norm(A) + TOL * max(1.0, op_norm(A))


@given(st.integers(0, 100_000), st.sampled_from(["p", "pbar", "ps"]), st.sampled_from(["q", "qbar", "qs"]))
def test_op_norm_matches_vertex_oracle(seed, mu, nu):
    rng = rng_for(seed, 21)
    A = random_operator(rng, random_norm(rng, int(rng.integers(1, 4))), random_norm(rng, int(rng.integers(1, 4))))
    lp, vf = op_norm(A, mu, nu), vertex_op_norm(A, mu, nu)
    if vf == math.inf:
        assert lp == math.inf
    else:
        assert lp == pytest.approx(vf, rel=1e-7, abs=1e-9)


@given(st.integers(0, 100_000))
def test_flat_norm_is_least_semi_lipschitz_constant(seed):
    A = random_bounded_operator(rng_for(seed, 22), dims=(1, 2))
    beta = op_norm(A)
    X = np.random.default_rng(seed).normal(scale=4, size=(300, A.domain.dim))
    assert np.all(A.codomain.evaluate(A(X)) <= beta * A.domain.evaluate(X) + 1e-8 * max(1, beta))
    from asymlab.operators import op_norm_details
    det = op_norm_details(A)
    if beta > 0:
        x = det.argmax
        assert A.domain(x) <= 1 + 1e-7
        assert A.codomain(A(x[None])[0]) == pytest.approx(beta, rel=1e-7)


@given(st.integers(0, 100_000), st.floats(0, 5))
def test_cone_structure(seed, alpha):
    rng = rng_for(seed, 23)
    p, q = random_norm(rng, 2), random_norm(rng, 2)
    A, B = random_operator(rng, p, q), random_operator(rng, p, q)
    nA, nB = op_norm(A), op_norm(B)
    slack = TOL * max(1.0, 0 if math.isinf(nA + nB) else nA + nB)
    assert op_norm(A + B) <= ext_add(nA, nB) + slack
    expected = 0.0 if alpha == 0 else alpha * nA
    got = op_norm(alpha * A)
    assert got == expected or got == pytest.approx(expected, rel=1e-7, abs=1e-9)


def test_operator_qdist_examples(ident):
    zero = 0 * ident
    assert operator_qdist(ident, ident) == 0
    assert operator_qdist(zero, ident) == 1
    assert operator_qdist(ident, zero) == math.inf


@given(st.integers(0, 100_000))
def test_operator_qdist_triangle(seed):
    rng = rng_for(seed, 24)
    p, q = random_norm(rng, 2), random_norm(rng, 1)
    A, B, C = (random_operator(rng, p, q) for _ in range(3))
    ab, bc, ac = operator_qdist(A, B), operator_qdist(B, C), operator_qdist(A, C)
    assert ac <= ext_add(ab, bc) + TOL * max(1.0, 0 if math.isinf(ab + bc) else ab + bc)


def test_compactness_examples(ident, u):
    v = is_compact(ident)
    assert v.compact
    net = v.net(0.3)
    assert net.centers.ravel().tolist() == [1.0]
    assert net.check()[0]
    w = is_compact(-ident)
    assert not w.compact
    assert w.witness_ray.tolist() == [-1.0]
    assert verify_witness_ray(-ident, w.witness_ray)
    # every operator is compact on a bounded domain ball
    assert is_compact(-ident, mu="ps").compact


@given(st.integers(0, 100_000))
def test_compact_implies_bounded(seed):
    rng = rng_for(seed, 25)
    A = random_operator(rng, random_norm(rng, int(rng.integers(1, 4))), random_norm(rng, int(rng.integers(1, 4))))
    v = is_compact(A)
    if v.compact:
        assert op_norm(A) < math.inf
    else:
        assert verify_witness_ray(A, v.witness_ray)
    assert is_compact(A, mu="ps").compact


@pytest.mark.parametrize("seed", range(12))
def test_compactness_agrees_with_sampling_oracle(seed):
    rng = rng_for(seed, 26)
    A = random_operator(rng, random_norm(rng, int(rng.integers(1, 3))), random_norm(rng, int(rng.integers(1, 3))))
    assert is_compact(A).compact == saturation_oracle(A).compact


def test_combine_nets_example(ident):
    net = combine_nets(operator_net(ident, 0.25), operator_net(ident, 0.25))
    assert net.centers.ravel().tolist() == [2.0]
    assert net.meta["verified"] and net.radius == 0.5


def test_combine_with_zero_operator(ident):
    net1 = operator_net(ident, 0.25)
    net = combine_nets(net1, operator_net(0 * ident, 0.25))
    assert np.array_equal(net.centers, net1.centers)
    assert net.meta["max_deficit"] <= 0.25 + TOL


def test_combine_rejects_mismatched_radii(ident):
    with pytest.raises(PreconditionFailed):
        combine_nets(operator_net(ident, 0.25), operator_net(ident, 0.5))


@pytest.mark.parametrize("seed", range(6))
def test_combine_random_pairs(seed):
    rng = rng_for(seed, 27)
    A1, A2 = random_compact_pair(rng)
    eps = float(rng.uniform(0.2, 1.0))
    net = combine_nets(operator_net(A1, eps), operator_net(A2, eps))
    assert net.meta["verified"] and net.meta["max_deficit"] <= 2 * eps + TOL


def test_limit_of_compacts_example(ident):
    fam = [(1 - 1 / n) * ident for n in range(1, 30)]
    net = limit_of_compacts_net(ident, fam, 0.1)
    assert net.meta["n0"] + 1 == 10
    assert net.meta["verified"] and net.radius == pytest.approx(0.3)
    constant = limit_of_compacts_net(ident, [ident] * 3, 0.1)
    assert constant.meta["n0"] == 0 and constant.meta["max_deficit"] <= 0.1 + TOL


def test_limit_of_compacts_rejects_far_family(ident):
    with pytest.raises(PreconditionFailed) as exc:
        limit_of_compacts_net(ident, [0.5 * ident], 0.1)
    assert exc.value.witness is not None


@pytest.mark.parametrize("seed", range(4))
def test_limit_of_compacts_random(seed):
    rng = rng_for(seed, 28)
    A, fam = convergent_family(rng)
    eps = float(rng.uniform(0.2, 1.0))
    net = limit_of_compacts_net(A, fam, eps)
    assert net.meta["verified"] and net.meta["max_deficit"] <= 3 * eps + TOL


def test_norm_report_json(ident):
    js = norm_report(-ident).to_json()
    assert js["flat_norm"] == "inf"
    assert js["extended"]["ps,qs"] == 1.0


def test_operator_json_roundtrip(ident, u):
    obj = ident.to_json()
    B = LinOperator.from_json(obj)
    assert np.array_equal(B.matrix, ident.matrix)
    B = LinOperator.from_json({"matrix": [[2.0]], "domain": "u", "codomain": "u"}, {"u": u}.__getitem__)
    assert op_norm(B) == 2


def test_sample_contains_origin_and_stays_in_ball(u):
    S = sample_ball(u)
    assert len(S) == 2048 and S[0, 0] == 0 and np.all(S <= 1)
