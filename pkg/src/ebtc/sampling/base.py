"""Common step interface of all sampling rules."""

from __future__ import annotations

import math

from .core import ArmStatistics


class Sampler:
    """A sequential sampling rule driven by ``select`` / ``update`` / ``recommend``.

    The first ``K`` rounds pull every arm once in index order; subclasses only
    implement ``_select`` for the later rounds.

    Attributes:
        stopping: which stopping rule fits this sampler in the fixed-confidence
            setting: ``"additive"``, ``"multiplicative"``, ``"own"`` (the sampler
            exposes ``own_stop``) or ``None`` for fixed-budget rules.
    """

    name = "sampler"
    stopping: str | None = "additive"

    def __init__(self, K: int):
        if K < 2:
            raise ValueError(f"need at least 2 arms, got {K}")
        self.K = K
        self.stats = ArmStatistics(K)

    def select(self) -> int:
        t = self.stats.t
        if t < self.K:
            return t
        return self._select()

    def _select(self) -> int:
        raise NotImplementedError

    def update(self, arm: int, reward: float) -> None:
        self.stats.add(arm, reward)

    def recommend(self) -> int:
        """Empirical best arm among pulled arms, lowest index on ties."""
        stats = self.stats
        best = -1
        top = -math.inf
        for i, (c, m) in enumerate(zip(stats.counts, stats.means)):
            if c > 0 and m > top:
                best, top = i, m
        return max(best, 0)
