"""Top-Two sampling rules: EB-TC with its variants, T3C, EB-TCI and TTUCB."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .._streams import BufferedStream
from .base import Sampler
from .core import IDS, FixedBeta, IDSMultiplicative, TrackingTable, _tc_fast, _tcm_fast, argmax


class EBTC(Sampler):
    """Empirical-best leader, transportation-cost challenger, pairwise tracking.

    Args:
        K: number of arms.
        eps0: slack used inside the challenger costs.
        mode: ``FixedBeta(beta)``, ``IDS()`` or ``IDSMultiplicative(eps0)``.
        multiplicative: use the multiplicative transportation cost.

    The rule is deterministic given the observed rewards.
    """

    name = "ebtc"

    def __init__(self, K: int, eps0: float, mode=None, multiplicative: bool = False):
        super().__init__(K)
        if multiplicative:
            if not 0.0 <= eps0 < 1.0:
                raise ValueError(f"multiplicative slack must lie in [0, 1), got {eps0}")
        elif not eps0 >= 0:
            raise ValueError(f"slack must be nonnegative, got {eps0}")
        self.eps0 = float(eps0)
        self.mode = mode if mode is not None else IDS()
        self.multiplicative = multiplicative
        self.stopping = "multiplicative" if multiplicative else "additive"
        self.table = TrackingTable(K)
        self.last_pair: tuple[int, int] | None = None
        # resolve the proportion rule once to keep the step loop lean
        if isinstance(self.mode, FixedBeta):
            self._fixed = self.mode.beta
            self._scale = None
        elif isinstance(self.mode, IDSMultiplicative):
            self._fixed = None
            self._scale = (1.0 - self.mode.eps0) ** 2
        elif isinstance(self.mode, IDS):
            self._fixed = None
            self._scale = 1.0
        else:
            raise ValueError(f"unknown proportion mode {self.mode!r}")

    def current_slack(self) -> float:
        return self.eps0

    def _select(self) -> int:
        stats = self.stats
        means = stats.means
        counts = stats.counts
        leader = max(range(self.K), key=means.__getitem__)
        if self.multiplicative:
            challenger = _tcm_fast(means, counts, leader, self.current_slack())
        else:
            challenger = _tc_fast(means, counts, leader, self.current_slack())
        self.last_pair = (leader, challenger)
        if self._fixed is not None:
            beta = self._fixed
        else:
            n_c = counts[challenger]
            beta = n_c / (self._scale * counts[leader] + n_c)
        table = self.table
        row_t = table.pair_counts[leader]
        t_new = row_t[challenger] + 1
        row_t[challenger] = t_new
        row_b = table.beta_bar[leader]
        b = (row_b[challenger] * (t_new - 1) + beta) / t_new
        row_b[challenger] = b
        row_n = table.challenger_pulls[leader]
        if row_n[challenger] <= (1.0 - b) * t_new:
            row_n[challenger] += 1
            return challenger
        return leader


class EBTCSlack(EBTC):
    """EB-TC whose slack shrinks with the round index, ``eps_n = schedule(n)``."""

    name = "ebtc-slack"

    def __init__(self, K: int, schedule: Callable[[int], float], mode=None):
        super().__init__(K, 1.0, mode if mode is not None else FixedBeta(0.5))
        self.schedule = schedule

    def current_slack(self) -> float:
        return self.schedule(self.stats.t + 1)


class T3C(Sampler):
    """Thompson-sampling leader, transportation-cost challenger, ``beta`` coin.

    The posterior draw uses ``N(mu_i, 1 / N_i)`` per arm. The coin and the
    posterior draws come from ``rng``, kept apart from the reward streams.
    """

    name = "t3c"

    def __init__(self, K: int, eps: float, beta: float, rng: np.random.Generator):
        super().__init__(K)
        self.eps = float(eps)
        self.beta = float(beta)
        normal_rng, coin_rng = rng.spawn(2)
        self._normal = BufferedStream(normal_rng, "normal")
        self._coin = BufferedStream(coin_rng, "uniform")

    def ts_leader(self) -> int:
        stats = self.stats
        z = self._normal.take(self.K)
        theta = [m + x / math.sqrt(c) for m, x, c in zip(stats.means, z, stats.counts)]
        return argmax(theta)

    def _select(self) -> int:
        leader = self.ts_leader()
        if self._coin.next() < self.beta:
            return leader
        return _tc_fast(self.stats.means, self.stats.counts, leader, self.eps)


def tci_challenger(means, counts, leader: int, eps: float) -> int:
    """``argmin 1{mu_B > mu_i} (mu_B - mu_i + eps)^2 / (2 (1/N_B + 1/N_i)) + ln N_i``."""
    m_b = means[leader]
    inv_b = 1.0 / counts[leader]
    best = math.inf
    arm = -1
    for i in range(len(means)):
        if i == leader:
            continue
        cost = math.log(counts[i])
        if m_b > means[i]:
            d = m_b - means[i] + eps
            cost += d * d / (2.0 * (inv_b + 1.0 / counts[i]))
        if cost < best:
            best = cost
            arm = i
    return arm


class EBTCI(Sampler):
    """Empirical-best leader, penalised transportation-cost challenger, ``beta`` coin."""

    name = "ebtci"

    def __init__(self, K: int, eps: float, beta: float, rng: np.random.Generator):
        super().__init__(K)
        self.eps = float(eps)
        self.beta = float(beta)
        self._coin = BufferedStream(rng, "uniform")

    def _select(self) -> int:
        stats = self.stats
        leader = argmax(stats.means)
        if self._coin.next() < self.beta:
            return leader
        return tci_challenger(stats.means, stats.counts, leader, self.eps)


def default_bonus(n: int) -> float:
    return 2.0 * math.log(1.0 + n)


class TTUCB(Sampler):
    """UCB leader, transportation-cost challenger, one tracking procedure per leader.

    Leader ``B`` is pulled iff ``N^B_B <= beta * T(B)``, where ``T(B)`` counts the
    rounds (including this one) in which ``B`` was leader and ``N^B_B`` how often it
    was pulled in those rounds.
    """

    name = "ttucb"

    def __init__(self, K: int, eps: float, beta: float = 0.5,
                 bonus: Callable[[int], float] = default_bonus):
        super().__init__(K)
        self.eps = float(eps)
        self.beta = float(beta)
        self.bonus = bonus
        self.leader_rounds = [0] * K
        self.leader_pulls = [0] * K

    def ucb_leader(self) -> int:
        stats = self.stats
        g = self.bonus(stats.t + 1)
        ucb = [m + math.sqrt(g / c) for m, c in zip(stats.means, stats.counts)]
        return argmax(ucb)

    def _select(self) -> int:
        leader = self.ucb_leader()
        rounds = self.leader_rounds[leader] + 1
        self.leader_rounds[leader] = rounds
        if self.leader_pulls[leader] <= self.beta * rounds:
            self.leader_pulls[leader] += 1
            return leader
        return _tc_fast(self.stats.means, self.stats.counts, leader, self.eps)

    def tracking_deviation(self, leader: int) -> float:
        return self.leader_pulls[leader] - self.beta * self.leader_rounds[leader]
