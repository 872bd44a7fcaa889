import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asymlab import Entourage, InducedQuasiMetric, InvalidInstance, PolyAsymNorm, TabularQuasiMetric, ball, check_qu2
from asymlab.instances import random_norm, random_tabular, rng_for
from asymlab.quasimetric import compose, contains_diagonal, metric_axioms_hold
from conftest import norms, vectors


@pytest.fixture
def m(u):
    return InducedQuasiMetric(u)


def test_induced_distances(m):
    assert m.dist([0], [5]) == 5
    assert m.dist([5], [0]) == 0
    assert m.dist([2], [2]) == 0


def test_balls(m):
    cands = [-10, 0, 0.5, 1, 2]
    assert ball(m, [0], 1, cands).ravel().tolist() == [-10, 0, 0.5, 1]
    assert ball(m.conjugate(), [0], 1, cands).ravel().tolist() == [0, 0.5, 1, 2]
    assert [0.0] in ball(m, [0], 0, cands).tolist()


def test_entourage_sections(m):
    U = Entourage(m, 1.0)
    assert U.section([0], [-2, 0, 2]).ravel().tolist() == [-2, 0]
    assert np.array_equal(U.image([[0]], [-2, 0, 2]), U.section([0], [-2, 0, 2]))
    small = Entourage(m, 0.5).section([0], np.linspace(-3, 3, 25))
    large = Entourage(m, 2.0).section([0], np.linspace(-3, 3, 25))
    assert set(small.ravel()) <= set(large.ravel())


def test_entourage_relation_contains_diagonal(m):
    R = Entourage(m, 0.3).relation(np.linspace(-1, 1, 9))
    assert contains_diagonal(R)


def test_qu2_on_random_universe():
    rng = rng_for(0, 99)
    m = InducedQuasiMetric(random_norm(rng, 2))
    ok, witness = check_qu2(m, 0.8, rng.normal(size=(50, 2)))
    assert ok and witness is None


def test_qu2_composition_matches_relations():
    rng = rng_for(0, 98)
    m = random_tabular(rng, 12)
    eps = 2.0
    half = Entourage(m, eps / 2).relation(m.labels)
    full = Entourage(m, eps).relation(m.labels)
    assert np.all(~compose(half, half) | full)


def test_tabular_validation():
    with pytest.raises(InvalidInstance):
        TabularQuasiMetric(("a", "b", "c"), [[0, 1, 5], [1, 0, 1], [1, 1, 0]])
    with pytest.raises(InvalidInstance):
        TabularQuasiMetric(("a", "b"), [[0, -1], [1, 0]])
    with pytest.raises(InvalidInstance):
        TabularQuasiMetric(("a", "b"), [[1, 1], [1, 0]])
    with pytest.raises(InvalidInstance):
        TabularQuasiMetric(("a", "a"), [[0, 1], [1, 0]])
    t = TabularQuasiMetric(("a", "b", "c"), [[0, 0, 1], [0, 0, 1], [2, 2, 0]])
    assert t.is_pseudo and t.qm1_witness == ("a", "b")
    assert TabularQuasiMetric.from_json(t.to_json()).to_json() == t.to_json()
    with pytest.raises(InvalidInstance):
        t.dist("a", "z")


def test_tabular_large_uses_sampled_triangle_check():
    rng = np.random.default_rng(0)
    n = 520
    x = np.sort(rng.uniform(size=n))
    D = np.maximum(x[None, :] - x[:, None], 0) + 0.5 * np.maximum(x[:, None] - x[None, :], 0)
    t = TabularQuasiMetric(tuple(range(n)), D)
    assert t.dist(0, 1) == pytest.approx(D[0, 1])


@given(st.integers(0, 10_000))
def test_symmetrization_is_metric_on_tabular(seed):
    t = random_tabular(rng_for(seed, 0), 7)
    if not t.is_pseudo:
        assert metric_axioms_hold(t.symmetrized(), t.labels)
    C = t.conjugate()
    for a, b in itertools.product(t.labels, repeat=2):
        assert C.dist(a, b) == t.dist(b, a)


@given(norms(dims=(1, 2)), vectors(2, 10), vectors(2, 10), vectors(2))
def test_translation_invariance_and_triangle(p, X, Y, v):
    m = InducedQuasiMetric(p)
    X, Y, v = X[:, : p.dim], Y[:, : p.dim], v[: p.dim]
    D = m.pairwise(X, Y)
    assert np.allclose(m.pairwise(X + v, Y + v), D, atol=1e-9)
    DXX, DXY = m.pairwise(X, X), D
    # rho(x, y) <= rho(x, x') + rho(x', y)
    assert np.all(DXY[:, None, :] <= DXX[:, :, None] + DXY[None, :, :] + 1e-9)
    assert np.allclose(m.conjugate().pairwise(X, Y), m.pairwise(Y, X).T)


@given(norms(dims=(1, 2)), vectors(2), vectors(2, 30), st.floats(0, 3), st.floats(1e-6, 1))
def test_strict_and_closed_balls_nest(p, x, Y, r, delta):
    m = InducedQuasiMetric(p)
    x, Y = x[: p.dim], Y[:, : p.dim]
    strict = {tuple(y) for y in ball(m, x, r, Y, strict=True)}
    closed = {tuple(y) for y in ball(m, x, r, Y)}
    wider = {tuple(y) for y in ball(m, x, r + delta, Y, strict=True)}
    assert strict <= closed <= wider


def test_pairwise_matches_pointwise():
    p = PolyAsymNorm([[1, 2], [-1, 0.5], [0, -1]])
    m = InducedQuasiMetric(p)
    X = np.random.default_rng(1).normal(size=(130, 2))
    D = m.pairwise(X, X[:7])
    for i, j in [(0, 0), (5, 3), (129, 6), (64, 2)]:
        assert D[i, j] == pytest.approx(p(X[j] - X[i]), abs=1e-12)
