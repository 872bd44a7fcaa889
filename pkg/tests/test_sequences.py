import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asymlab import InducedQuasiMetric, SequencePrefix, TabularQuasiMetric, check_chain, classify, converges_to
from asymlab.instances import peak_then_oscillation, random_sequence, random_space, rng_for
from asymlab.sequences import FAILS, HOLDS, NOTIONS, UNDECIDABLE

GUARD = 1e-12


def literal(space, pts, pool, eps, min_tail):
    """Direct transcription of the seven definitions at a finite horizon."""
    N = len(pts)
    rho = lambda a, b: space.dist(a, b)
    lt = lambda d: d < eps - GUARD
    starts = range(N - min_tail + 1)
    later = lambda n0: [(k, n) for k in range(n0, N) for n in range(k, N)]
    out = {
        "left-K": any(all(lt(rho(pts[k], pts[n])) for k, n in later(n0)) for n0 in starts),
        "right-K": any(all(lt(rho(pts[n], pts[k])) for k, n in later(n0)) for n0 in starts),
        "rho": any(all(lt(rho(pts[n], pts[k])) and lt(rho(pts[k], pts[n])) for k, n in later(n0))
                   for n0 in starts),
        "weakly-left-K": any(all(lt(rho(pts[n0], pts[n])) for n in range(n0, N)) for n0 in starts),
        "weakly-right-K": any(all(lt(rho(pts[n], pts[n0])) for n in range(n0, N)) for n0 in starts),
        "left-rho": any(all(lt(rho(w, pts[n])) for n in range(n0, N)) for w in pool for n0 in starts),
        "right-rho": any(all(lt(rho(pts[n], w)) for n in range(n0, N)) for w in pool for n0 in starts),
    }
    return {k: HOLDS if v else FAILS for k, v in out.items()}


@pytest.fixture
def decreasing(u):
    return SequencePrefix(InducedQuasiMetric(u), -np.arange(1, 51, dtype=float))


def test_decreasing_sequence(decreasing):
    r = classify(decreasing, 0.1)
    assert r.verdicts["left-K"] == HOLDS
    assert r.verdicts["right-K"] == FAILS
    assert r.witnesses["right-K"]["pair"] == [1, 2]
    assert check_chain(r) == (True, [])


def test_constant_sequence_everything_holds(u):
    s = SequencePrefix(InducedQuasiMetric(u), [4.0] * 10)
    for eps in (1e-6, 0.1, 10):
        assert all(v == HOLDS for v in classify(s, eps).verdicts.values())


def test_harmonic_sequence_symmetric_table():
    x = 1.0 / np.arange(1, 21)
    labels = tuple(f"x{i}" for i in range(1, 21))
    t = TabularQuasiMetric(labels, np.abs(x[:, None] - x[None, :]))
    r = classify(SequencePrefix(t, labels), 0.5)
    assert all(v == HOLDS for v in r.verdicts.values())


def test_weakly_left_without_left_is_legal():
    space, pts = peak_then_oscillation()
    r = classify(SequencePrefix(space, pts), 0.5)
    assert r.verdicts["weakly-left-K"] == HOLDS
    assert r.verdicts["left-K"] == FAILS
    assert check_chain(r)[0]


def test_empty_pool_is_undecidable(u):
    s = SequencePrefix(InducedQuasiMetric(u), [1.0, 2.0, 3.0], witness_pool=np.zeros((0, 1)))
    r = classify(s, 0.5)
    assert r.verdicts["left-rho"] == UNDECIDABLE == r.verdicts["right-rho"]
    assert check_chain(r)[0]


def test_chain_checker_flags_a_broken_link(decreasing):
    r = classify(decreasing, 0.1)
    r.verdicts["weakly-left-K"] = FAILS
    ok, violations = check_chain(r)
    assert not ok and violations == [{"premise": "left-K", "conclusion": "weakly-left-K"}]


def test_converges_to(decreasing, u):
    assert converges_to(decreasing, [0], 0.1)
    assert not converges_to(decreasing, [0], 0.1, conjugate=True)
    c = SequencePrefix(InducedQuasiMetric(u), [2.0] * 5)
    assert converges_to(c, [2.0], 1e-9)


def test_report_json_mentions_horizon(decreasing):
    js = classify(decreasing, 0.1).to_json()
    assert js["horizon"] == 50 and js["min_tail"] == 25
    assert set(js["verdicts"]) == set(NOTIONS)


@given(st.integers(0, 100_000))
def test_classify_matches_literal_definitions(seed):
    rng = rng_for(seed, 1)
    space = random_space(rng)
    pts = random_sequence(rng, space, int(rng.integers(2, 9)))
    s = SequencePrefix(space, pts)
    D = space.pairwise(s.points, s.points)
    eps = float(np.quantile(D, rng.uniform())) + 1e-3
    r = classify(s, eps)
    assert r.verdicts == literal(space, list(s.points), list(s.pool()), eps, r.min_tail)
    assert check_chain(r)[0]


@given(st.integers(0, 100_000))
def test_symmetric_tables_left_right_agree(seed):
    rng = rng_for(seed, 2)
    x = rng.normal(size=6)
    labels = tuple(range(6))
    t = TabularQuasiMetric(labels, np.abs(x[:, None] - x[None, :]))
    r = classify(SequencePrefix(t, random_sequence(rng, t, 10)), float(rng.uniform(0.1, 2)))
    assert r.verdicts["left-K"] == r.verdicts["right-K"]
    assert r.verdicts["weakly-left-K"] == r.verdicts["weakly-right-K"]


@given(st.integers(0, 100_000))
def test_convergent_prefix_is_left_rho_cauchy(seed):
    # rho(x, x_n) <= eps on the whole prefix makes x a left rho-Cauchy witness at 2 eps
    rng = rng_for(seed, 3)
    space = random_space(rng)
    pts = random_sequence(rng, space, 8)
    s = SequencePrefix(space, pts)
    x = s.points[0]
    eps = float(space.distances_from(x, s.points).max()) + 1e-3
    assert converges_to(s, x, eps)
    s2 = SequencePrefix(space, pts, witness_pool=space.coerce([x]))
    assert classify(s2, 2 * eps).verdicts["left-rho"] == HOLDS


@given(st.integers(0, 100_000))
def test_symmetric_convergence_gives_rho_cauchy(seed):
    # with rho_s(x, x_n) <= eps every pair of terms is within 2 eps both ways
    rng = rng_for(seed, 4)
    space = random_space(rng)
    s = SequencePrefix(space, random_sequence(rng, space, 8))
    x = s.points[-1]
    eps = float(space.symmetrized().distances_from(x, s.points).max()) + 1e-3
    assert classify(s, 2 * eps + 1e-9).verdicts["rho"] == HOLDS


def test_convergent_prefix_need_not_be_right_k(decreasing):
    # x_n = -n converges to 0 yet is not right K-Cauchy, so convergence alone
    # does not give the two-sided notion
    assert converges_to(decreasing, [0], 0.1)
    assert classify(decreasing, 0.2).verdicts["rho"] == FAILS


def test_rejects_short_prefix(u):
    with pytest.raises(ValueError):
        SequencePrefix(InducedQuasiMetric(u), [1.0])
    with pytest.raises(ValueError):
        classify(SequencePrefix(InducedQuasiMetric(u), [1.0, 2.0]), 0)
