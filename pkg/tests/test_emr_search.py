import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmmimo.channel import ChannelRealization
from rmmimo.emr_search import (PrecodingSetup, SearchConfig, channel_objective, exhaustive_emr_search,
                               exhaustive_search, greedy_emr_search, greedy_search, random_emr_search,
                               random_search)
from rmmimo.errors import ConfigError, SearchRefused


class Counter:
    """Objective wrapper that counts calls."""

    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, mu):
        self.calls += 1
        return self.f(mu)


def table_objective(seed, n, P):
    table = np.random.default_rng(seed).normal(size=(P,) * n)
    return lambda mu: float(table[tuple(mu)])


def separable_objective(weights):
    w = np.asarray(weights)
    return lambda mu: float(sum(w[i, p] for i, p in enumerate(mu)))


@pytest.mark.parametrize("n, P, T", [(32, 4, 3), (8, 4, 1), (5, 3, 2)])
def test_budget_without_early_exit(n, P, T):
    obj = Counter(lambda mu: float(np.sin(np.dot(mu, np.arange(1, len(mu) + 1)))))
    res = greedy_search(obj, n, P, SearchConfig(t_iter=T, early_exit=False))
    assert res.evaluations == obj.calls == n * P * T
    assert res.iterations == T
    assert len(res.trace) == T + 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 4), st.integers(1, 4))
def test_budget_never_exceeded_and_monotone(seed, n, P, T):
    obj = Counter(table_objective(seed, n, P))
    res = greedy_search(obj, n, P, SearchConfig(t_iter=T))
    assert res.evaluations == obj.calls <= n * P * T
    assert all(b >= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.trace[0] == obj.f([0] * n)
    assert res.se == obj.f(list(res.mu))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(2, 3))
def test_greedy_between_legacy_and_exhaustive(seed, n, P):
    obj = table_objective(seed, n, P)
    g = greedy_search(obj, n, P)
    e = exhaustive_search(obj, n, P)
    assert obj([0] * n) <= g.se <= e.se
    assert e.evaluations == P ** n
    assert e.se == max(obj(list(m)) for m in itertools.product(range(P), repeat=n))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 4))
def test_greedy_exact_on_separable(seed, n, P):
    w = np.random.default_rng(seed).normal(size=(n, P))
    obj = separable_objective(w)
    g = greedy_search(obj, n, P, SearchConfig(t_iter=1))
    assert g.se == pytest.approx(w.max(axis=1).sum(), abs=1e-12)


def test_tie_keeps_incumbent_then_lowest_index():
    g = greedy_search(lambda mu: 0.0, 4, 3, SearchConfig(legacy_index=2))
    assert g.mu == (2, 2, 2, 2)
    assert g.iterations == 1
    # patterns 1 and 2 tie above the incumbent -> pick 1
    g = greedy_search(lambda mu: float(sum(m > 0 for m in mu)), 3, 3)
    assert g.mu == (1, 1, 1)


def test_early_exit_after_quiet_sweep():
    obj = Counter(separable_objective(np.arange(12.0).reshape(4, 3)))
    res = greedy_search(obj, 4, 3, SearchConfig(t_iter=5))
    assert res.iterations == 2
    assert res.evaluations == 2 * 4 * 3


def test_single_pattern_costs_one_sweep():
    obj = Counter(lambda mu: 1.0)
    assert greedy_search(obj, 6, 1, SearchConfig(t_iter=3)).evaluations == 6
    assert greedy_search(obj, 6, 1, SearchConfig(t_iter=3, early_exit=False)).evaluations == 18


def test_truncated_by_max_evaluations():
    obj = Counter(separable_objective(np.arange(12.0).reshape(4, 3)))
    res = greedy_search(obj, 4, 3, SearchConfig(max_evaluations=7))
    assert res.truncated
    assert res.evaluations == obj.calls == 6
    assert res.mu == (2, 2, 0, 0)
    assert res.trace[-1] == res.se


def test_non_deterministic_objective_detected():
    state = iter(range(10**6))
    with pytest.raises(RuntimeError):
        greedy_search(lambda mu: float(next(state)), 3, 2)


def test_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig(t_iter=0)
    with pytest.raises(ConfigError):
        SearchConfig(max_evaluations=0)
    with pytest.raises(ConfigError):
        greedy_search(lambda mu: 0.0, 3, 2, SearchConfig(legacy_index=2))


def test_exhaustive_refuses_large_instances():
    with pytest.raises(SearchRefused):
        exhaustive_search(lambda mu: 0.0, 32, 4)


def test_random_search_reproducible():
    obj = table_objective(1, 4, 3)
    a = random_search(obj, 4, 3, 20, seed=5)
    b = random_search(obj, 4, 3, 20, seed=5)
    assert a == b
    assert a.trace[0] == obj([0] * 4)
    assert a.se >= obj([0] * 4)


def _toy_channel(seed, U=2, N=4, P=2):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(U, 2, N, P)) + 1j * rng.normal(size=(U, 2, N, P))
    return ChannelRealization(c, 0.1)


def test_channel_wrappers_agree():
    ch = _toy_channel(0)
    setup = PrecodingSetup("SCA_R", 1.0, n_rf=2)
    g = greedy_emr_search(ch, setup)
    e = exhaustive_emr_search(ch, setup)
    r = random_emr_search(ch, setup, 16, seed=0)
    obj = channel_objective(ch, setup)
    assert obj([0] * 4) <= g.se <= e.se + 1e-12
    assert r.se <= e.se + 1e-12
    assert g.histogram(2) == np.bincount(g.mu, minlength=2).tolist()


def test_singular_assignment_scores_minus_inf():
    c = np.zeros((2, 1, 2, 2), dtype=complex)
    c[:, :, :, 1] = [[[1.0, 0.0]], [[0.0, 1.0]]]
    c[:, :, :, 0] = 1.0
    ch = ChannelRealization(c, 1.0)
    obj = channel_objective(ch, PrecodingSetup("FDA_T", 1.0))
    assert obj([0, 0]) == -np.inf
    assert greedy_emr_search(ch, PrecodingSetup("FDA_T", 1.0)).se > 0


def test_pattern_independent_channel_is_fixed_point():
    rng = np.random.default_rng(4)
    base = rng.normal(size=(2, 2, 4, 1)) + 1j * rng.normal(size=(2, 2, 4, 1))
    ch = ChannelRealization(np.repeat(base, 3, axis=3), 0.1)
    res = greedy_emr_search(ch, PrecodingSetup("SCA_R", 1.0, n_rf=2))
    assert res.mu == (0, 0, 0, 0) and res.iterations == 1


def test_exhaustive_small_cases():
    assert exhaustive_search(lambda mu: 1.0, 5, 1).mu == (0,) * 5
    assert exhaustive_search(lambda mu: 0.0, 4, 2).evaluations == 16
    # ties go to the lexicographically smallest assignment
    assert exhaustive_search(lambda mu: float(sum(mu) > 0), 3, 2).mu == (0, 0, 1)
    with pytest.raises(SearchRefused):
        exhaustive_search(lambda mu: 0.0, 20, 4)


def test_random_search_budget_one_and_full():
    obj = table_objective(3, 3, 2)
    assert random_search(obj, 3, 2, 1, seed=0).mu == (0, 0, 0)
    assert random_search(obj, 3, 2, 8, seed=0).se <= exhaustive_search(obj, 3, 2).se


def test_greedy_deterministic():
    ch = _toy_channel(6)
    setup = PrecodingSetup("SCA_R", 1.0, n_rf=2)
    assert greedy_emr_search(ch, setup) == greedy_emr_search(ch, setup)
