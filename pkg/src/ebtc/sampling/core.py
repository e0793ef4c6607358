"""Per-arm statistics, leader/challenger rules and the pairwise tracking procedure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class UnpulledArmError(ValueError):
    """An empirical quantity was requested for an arm that has never been pulled."""


class ArmStatistics:
    """Pull counts, reward sums and empirical means of every arm.

    ``t`` is the number of samples collected so far, so the round about to be
    played is ``step = t + 1``.
    """

    __slots__ = ("K", "counts", "sums", "means", "t")

    def __init__(self, K: int):
        self.K = K
        self.counts = [0] * K
        self.sums = [0.0] * K
        self.means = [0.0] * K
        self.t = 0

    @classmethod
    def from_values(cls, means: Sequence[float], counts: Sequence[int]) -> "ArmStatistics":
        stats = cls(len(means))
        stats.counts = [int(c) for c in counts]
        stats.means = [float(m) for m in means]
        stats.sums = [m * c for m, c in zip(stats.means, stats.counts)]
        stats.t = sum(stats.counts)
        return stats

    @property
    def step(self) -> int:
        return self.t + 1

    def add(self, arm: int, reward: float) -> None:
        c = self.counts[arm] + 1
        s = self.sums[arm] + reward
        self.counts[arm] = c
        self.sums[arm] = s
        self.means[arm] = s / c
        self.t += 1

    def require_pulled(self) -> None:
        if min(self.counts) < 1:
            missing = [i + 1 for i, c in enumerate(self.counts) if c < 1]
            raise UnpulledArmError(f"arms {missing} have no samples yet")


def argmax(values: Sequence[float]) -> int:
    """Index of the largest value, lowest index on ties."""
    return max(range(len(values)), key=values.__getitem__)


def eb_leader(stats: ArmStatistics) -> int:
    """Empirical best arm."""
    stats.require_pulled()
    return argmax(stats.means)


def tc_cost(stats: ArmStatistics, leader: int, i: int, eps0: float) -> float:
    return ((stats.means[leader] - stats.means[i] + eps0)
            / math.sqrt(1.0 / stats.counts[leader] + 1.0 / stats.counts[i]))


def tcm_cost(stats: ArmStatistics, leader: int, i: int, eps0: float) -> float:
    s = 1.0 - eps0
    return ((stats.means[leader] - s * stats.means[i])
            / math.sqrt(1.0 / stats.counts[leader] + s * s / stats.counts[i]))


def _tc_fast(means: list, counts: list, leader: int, eps0: float) -> int:
    m_b = means[leader]
    inv_b = 1.0 / counts[leader]
    best = math.inf
    arm = -1
    for i in range(len(means)):
        if i == leader:
            continue
        v = (m_b - means[i] + eps0) / math.sqrt(inv_b + 1.0 / counts[i])
        if v < best:
            best = v
            arm = i
    return arm


def _tcm_fast(means: list, counts: list, leader: int, eps0: float) -> int:
    s = 1.0 - eps0
    s2 = s * s
    m_b = means[leader]
    inv_b = 1.0 / counts[leader]
    best = math.inf
    arm = -1
    for i in range(len(means)):
        if i == leader:
            continue
        v = (m_b - s * means[i]) / math.sqrt(inv_b + s2 / counts[i])
        if v < best:
            best = v
            arm = i
    return arm


def tc_challenger(stats: ArmStatistics, leader: int, eps0: float) -> int:
    """Arm minimising ``(mu_B - mu_i + eps0) / sqrt(1/N_B + 1/N_i)`` over ``i != B``."""
    stats.require_pulled()
    return _tc_fast(stats.means, stats.counts, leader, eps0)


def tcm_challenger(stats: ArmStatistics, leader: int, eps0: float) -> int:
    """Multiplicative variant: ``(mu_B - (1-eps0) mu_i) / sqrt(1/N_B + (1-eps0)^2/N_i)``."""
    stats.require_pulled()
    if not 0.0 <= eps0 < 1.0:
        raise ValueError(f"multiplicative slack must lie in [0, 1), got {eps0}")
    return _tcm_fast(stats.means, stats.counts, leader, eps0)


@dataclass(frozen=True)
class FixedBeta:
    beta: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")

    def proportion(self, counts: Sequence[int], leader: int, challenger: int) -> float:
        return self.beta


@dataclass(frozen=True)
class IDS:
    """Information-directed proportion ``N_C / (N_B + N_C)``."""

    def proportion(self, counts: Sequence[int], leader: int, challenger: int) -> float:
        n_c = counts[challenger]
        return n_c / (counts[leader] + n_c)


@dataclass(frozen=True)
class IDSMultiplicative:
    """``N_C / ((1 - eps0)^2 N_B + N_C)``."""

    eps0: float

    def proportion(self, counts: Sequence[int], leader: int, challenger: int) -> float:
        s = 1.0 - self.eps0
        n_c = counts[challenger]
        return n_c / (s * s * counts[leader] + n_c)


class TrackingTable:
    """Counters of the ``K (K - 1)`` leader/challenger tracking procedures.

    ``pair_counts[i][j]`` is how often ``(i, j)`` was the (leader, challenger)
    pair, ``challenger_pulls[i][j]`` how often ``j`` was pulled in that role, and
    ``beta_bar[i][j]`` the running average of the target leader proportions.
    """

    __slots__ = ("K", "pair_counts", "challenger_pulls", "beta_bar")

    def __init__(self, K: int):
        self.K = K
        self.pair_counts = [[0] * K for _ in range(K)]
        self.challenger_pulls = [[0] * K for _ in range(K)]
        self.beta_bar = [[0.0] * K for _ in range(K)]

    def deviation(self, i: int, j: int) -> float:
        """``N^i_j - (1 - beta_bar(i, j)) T(i, j)``; stays in ``[-1/2, 1]``."""
        return self.challenger_pulls[i][j] - (1.0 - self.beta_bar[i][j]) * self.pair_counts[i][j]

    def max_bracket_violation(self) -> float:
        """How far the worst pair sits outside ``[-1/2, 1]`` (0 when all are inside)."""
        worst = 0.0
        for i in range(self.K):
            for j in range(self.K):
                if i == j:
                    continue
                d = self.deviation(i, j)
                worst = max(worst, -0.5 - d, d - 1.0)
        return worst


def tracking_select(table: TrackingTable, leader: int, challenger: int, mode,
                    stats: ArmStatistics) -> tuple[int, TrackingTable]:
    """One step of the pairwise tracking; updates ``table`` in place.

    The pair counter is incremented, ``beta_bar`` absorbs the new proportion, and
    the challenger is pulled iff ``N^B_C <= (1 - beta_bar) T(B, C)``.
    """
    if leader == challenger:
        raise ValueError("leader and challenger must differ")
    beta = mode.proportion(stats.counts, leader, challenger)
    row_t = table.pair_counts[leader]
    t_new = row_t[challenger] + 1
    row_t[challenger] = t_new
    row_b = table.beta_bar[leader]
    b = (row_b[challenger] * (t_new - 1) + beta) / t_new
    row_b[challenger] = b
    row_n = table.challenger_pulls[leader]
    if row_n[challenger] <= (1.0 - b) * t_new:
        row_n[challenger] += 1
        return challenger, table
    return leader, table


@dataclass(frozen=True)
class PolyHalf:
    """Slack ``n^(-alpha/2)``."""

    alpha: float = 0.5

    def __call__(self, n: int) -> float:
        return n ** (-0.5 * self.alpha)


@dataclass(frozen=True)
class LogHalf:
    """Slack ``log(n)^(-alpha/2)``, held at 1 while ``log n <= 1``."""

    alpha: float = 0.5

    def __call__(self, n: int) -> float:
        ln = math.log(n)
        if ln <= 1.0:
            return 1.0
        return ln ** (-0.5 * self.alpha)
