"""Fixed-budget elimination rules and their anytime doubling wrappers."""

from __future__ import annotations

import math
from typing import Callable, Iterator

from .base import Sampler


def log_bar(K: int) -> float:
    return 0.5 + sum(1.0 / i for i in range(2, K + 1))


def sr_schedule(K: int, budget: int) -> list[int]:
    """Cumulative per-arm pull targets ``n_1 <= ... <= n_{K-1}`` of Successive Rejects."""
    lb = log_bar(K)
    return [math.ceil((budget - K) / (lb * (K + 1 - k))) for k in range(1, K)]


def sh_schedule(K: int, budget: int) -> list[tuple[int, int]]:
    """``(active arms, pulls per arm)`` for each phase of Sequential Halving."""
    rounds = max(1, math.ceil(math.log2(K)))
    plan = []
    size = K
    for _ in range(rounds):
        plan.append((size, budget // (size * rounds)))
        size = math.ceil(size / 2)
        if size == 1:
            break
    return plan


class _PhasedSampler(Sampler):
    """Drives a phase plan written as a generator of arms.

    The generator resumes only when the next arm is requested, i.e. after the
    previous reward has been recorded, so it can read statistics between phases.
    """

    stopping = None

    def __init__(self, K: int, budget: int):
        super().__init__(K)
        if budget < K:
            raise ValueError(f"budget {budget} is smaller than the number of arms {K}")
        self.budget = int(budget)
        self.active = list(range(K))
        self._plan: Iterator[int] = self._arms()

    def _arms(self) -> Iterator[int]:
        raise NotImplementedError

    def select(self) -> int:
        return next(self._plan)

    @property
    def done(self) -> bool:
        return self.stats.t >= self.budget

    def _leftover(self) -> Iterator[int]:
        while True:
            yield self.active[0]


class SuccessiveRejects(_PhasedSampler):
    """Round-robin on the active arms, dropping the worst empirical mean after each phase."""

    name = "sr"

    def _arms(self) -> Iterator[int]:
        stats = self.stats
        for target in sr_schedule(self.K, self.budget):
            while True:
                lagging = [i for i in self.active if stats.counts[i] < target]
                if not lagging:
                    break
                yield from lagging
            # worst mean goes; among ties the highest index goes
            worst = min(reversed(self.active), key=stats.means.__getitem__)
            self.active.remove(worst)
        yield from self._leftover()

    def recommend(self) -> int:
        means = self.stats.means
        return max(self.active, key=means.__getitem__)


class SequentialHalving(_PhasedSampler):
    """Halves the active set each phase, using only that phase's samples."""

    name = "sh"

    def __init__(self, K: int, budget: int):
        super().__init__(K, budget)
        self.phase_counts = [0] * K
        self.phase_sums = [0.0] * K

    def update(self, arm: int, reward: float) -> None:
        self.stats.add(arm, reward)
        self.phase_counts[arm] += 1
        self.phase_sums[arm] += reward

    def _phase_mean(self, i: int) -> float:
        c = self.phase_counts[i]
        return self.phase_sums[i] / c if c else -math.inf

    def _arms(self) -> Iterator[int]:
        for size, pulls in sh_schedule(self.K, self.budget):
            self.phase_counts = [0] * self.K
            self.phase_sums = [0.0] * self.K
            for _ in range(max(1, pulls)):
                yield from list(self.active)
            keep = math.ceil(len(self.active) / 2)
            ranked = sorted(self.active, key=lambda i: (-self._phase_mean(i), i))
            self.active = sorted(ranked[:keep])
        yield from self._leftover()

    def recommend(self) -> int:
        return max(self.active, key=self._phase_mean)


def doubling_budgets(K: int) -> Iterator[int]:
    """``T_1 = 2 K ceil(log2 K)``, then doubling."""
    budget = 2 * K * max(1, math.ceil(math.log2(K)))
    while True:
        yield budget
        budget *= 2


class Doubling(Sampler):
    """Anytime version of a fixed-budget rule by restarting with doubled budgets.

    Each inner instance starts from scratch. The recommendation is the output of
    the last completed instance, and arm 0 before the first one completes.
    """

    stopping = None

    def __init__(self, K: int, factory: Callable[[int, int], _PhasedSampler], name: str):
        super().__init__(K)
        self.factory = factory
        self.name = name
        self._budgets = doubling_budgets(K)
        self.inner = factory(K, next(self._budgets))
        self.completed: list[tuple[int, int]] = []
        self._current = 0

    def select(self) -> int:
        return self.inner.select()

    def update(self, arm: int, reward: float) -> None:
        self.stats.add(arm, reward)
        inner = self.inner
        inner.update(arm, reward)
        if inner.stats.t >= inner.budget:
            self._current = inner.recommend()
            self.completed.append((self.stats.t, self._current))
            self.inner = self.factory(self.K, next(self._budgets))

    def recommend(self) -> int:
        return self._current
