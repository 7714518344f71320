"""
Pattern (EMR precoder) selection.

The pattern assignment ``mu`` picks one radiation pattern per antenna.  Its
quality is the sum rate achieved by the regular hybrid precoder on the
channel ``H(mu)``, so the search is a discrete black-box maximization over
``P ** N`` assignments.

* :func:`greedy_emr_search` -- coordinate-wise search from the all-legacy
  assignment, ``N * P`` evaluations per sweep.
* :func:`exhaustive_emr_search` -- brute force, small instances only.
* :func:`random_emr_search` -- best of uniformly drawn assignments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .arch import Architecture
from .channel import ChannelRealization
from .errors import ConfigError, SearchRefused, SingularChannelError
from .precoding import hybrid_precode


@dataclass(frozen=True)
class PrecodingSetup:
    """Everything besides the channel that the hybrid precoder needs."""

    architecture: Architecture = Architecture.SCA_R
    tx_power: float = 1.0
    n_rf: int | None = None
    phase_bits: int | None = 4

    def __post_init__(self):
        object.__setattr__(self, "architecture", Architecture.parse(self.architecture))

    def sum_rate(self, H, noise_power: float) -> float:
        _, _, rec = hybrid_precode(H, self.architecture, self.tx_power, noise_power,
                                   self.n_rf, self.phase_bits)
        return rec.se


def channel_objective(channel: ChannelRealization, setup: PrecodingSetup) -> Callable:
    """``mu -> sum rate``; rank-deficient assignments score ``-inf``."""

    def objective(mu) -> float:
        try:
            return setup.sum_rate(channel.matrix(mu), channel.noise_power)
        except SingularChannelError:
            return -np.inf

    return objective


@dataclass(frozen=True)
class SearchConfig:
    t_iter: int = 3
    early_exit: bool = True
    max_evaluations: int | None = None
    legacy_index: int = 0

    def __post_init__(self):
        if self.t_iter < 1:
            raise ConfigError("t_iter must be >= 1")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be >= 1")
        if self.legacy_index < 0:
            raise ConfigError("legacy index must be non-negative")


@dataclass(frozen=True)
class SearchResult:
    mu: tuple
    se: float
    evaluations: int
    trace: tuple
    iterations: int = 0
    truncated: bool = False

    def histogram(self, n_patterns: int) -> list:
        return np.bincount(np.asarray(self.mu, dtype=int), minlength=n_patterns).tolist()


def greedy_search(objective: Callable, n: int, P: int, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Greedy coordinate search over ``{0..P-1}^n`` starting from all-legacy.

    Antennas are visited in ascending order.  At each one, all ``P`` patterns
    are scored with the others held fixed and the best is kept; the current
    pattern wins ties, then the lowest index.  A sweep that changes nothing
    ends the search when ``cfg.early_exit`` is set.

    ``trace[0]`` is the all-legacy value, followed by the value after each
    sweep.
    """
    if P < 1 or n < 1:
        raise ConfigError("need at least one antenna and one pattern")
    if cfg.legacy_index >= P:
        raise ConfigError(f"legacy index {cfg.legacy_index} not in a set of {P} patterns")
    mu = [cfg.legacy_index] * n
    best = None
    trace = []
    evaluations = 0
    iterations = 0
    truncated = False
    for _ in range(cfg.t_iter):
        changed = False
        for ant in range(n):
            if cfg.max_evaluations is not None and evaluations + P > cfg.max_evaluations:
                truncated = True
                break
            scores = []
            for p in range(P):
                cand = list(mu)
                cand[ant] = p
                scores.append(float(objective(cand)))
            evaluations += P
            current = scores[mu[ant]]
            if best is None:
                best = current
                trace.append(best)
            elif current != best:
                raise RuntimeError("objective is not deterministic: incumbent re-scored differently")
            top = max(scores)
            if top > current:
                mu[ant] = scores.index(top)
                best = top
                changed = True
        if truncated:
            if best is not None:
                trace.append(best)
            break
        iterations += 1
        trace.append(best)
        if cfg.early_exit and not changed:
            break
    if best is None:
        best = float(objective(mu))
        trace.append(best)
    return SearchResult(tuple(mu), best, evaluations, tuple(trace), iterations, truncated)


def exhaustive_search(objective: Callable, n: int, P: int, limit: int = 10**6) -> SearchResult:
    """Global maximum by enumeration in lexicographic order (first maximizer wins)."""
    if P ** n > limit:
        raise SearchRefused(f"{P}^{n} assignments exceed the limit of {limit}")
    best, best_mu = -np.inf, None
    count = 0
    for mu in itertools.product(range(P), repeat=n):
        val = float(objective(list(mu)))
        count += 1
        if best_mu is None or val > best:
            best, best_mu = val, mu
    return SearchResult(tuple(best_mu), best, count, (best,), 1, False)


def random_search(objective: Callable, n: int, P: int, budget: int, seed: int,
                  legacy_index: int = 0) -> SearchResult:
    """Best of ``budget`` assignments drawn uniformly with replacement; draw 0 is all-legacy."""
    if budget < 1:
        raise ConfigError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    best_mu = (legacy_index,) * n
    best = float(objective(list(best_mu)))
    trace = [best]
    for _ in range(budget - 1):
        mu = tuple(int(x) for x in rng.integers(0, P, n))
        val = float(objective(list(mu)))
        if val > best:
            best, best_mu = val, mu
        trace.append(best)
    return SearchResult(best_mu, best, budget, tuple(trace), 1, False)


def greedy_emr_search(channel: ChannelRealization, setup: PrecodingSetup,
                      cfg: SearchConfig = SearchConfig()) -> SearchResult:
    return greedy_search(channel_objective(channel, setup), channel.n_elements,
                         channel.n_patterns, cfg)


def exhaustive_emr_search(channel: ChannelRealization, setup: PrecodingSetup,
                          limit: int = 10**6) -> SearchResult:
    return exhaustive_search(channel_objective(channel, setup), channel.n_elements,
                             channel.n_patterns, limit)


def random_emr_search(channel: ChannelRealization, setup: PrecodingSetup, budget: int, seed: int,
                      legacy_index: int = 0) -> SearchResult:
    return random_search(channel_objective(channel, setup), channel.n_elements,
                         channel.n_patterns, budget, seed, legacy_index)
