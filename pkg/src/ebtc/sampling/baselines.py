"""Uniform sampling, LUCB and Track-and-Stop."""

from __future__ import annotations

import math
from collections import deque
from typing import Callable, Sequence

from ..oracle import solve_eps
from .base import Sampler
from .core import argmax


class Uniform(Sampler):
    """Round-robin over the arms."""

    name = "uniform"

    def select(self) -> int:
        return self.stats.t % self.K


class LUCB(Sampler):
    """Pulls the empirical best arm and its most optimistic competitor.

    Indices are ``mu_i +/- sqrt(2 c(n - 1, delta) / N_i)`` with ``c`` the supplied
    threshold. Each logical round consumes two samples, and the rule stops itself
    once ``L_best + eps >= max_{i != best} U_i``.
    """

    name = "lucb"
    stopping = "own"

    def __init__(self, K: int, eps: float, threshold: Callable[[float], float]):
        super().__init__(K)
        self.eps = float(eps)
        self.threshold = threshold
        self._queue: deque[int] = deque()
        self._indices: tuple[int, int, bool] | None = None

    def _compute(self) -> tuple[int, int, bool]:
        stats = self.stats
        c = self.threshold(stats.t)
        means, counts = stats.means, stats.counts
        best = argmax(means)
        top_u = -math.inf
        rival = -1
        for i in range(self.K):
            if i == best:
                continue
            u = means[i] + math.sqrt(2.0 * c / counts[i])
            if u > top_u:
                top_u, rival = u, i
        lower = means[best] - math.sqrt(2.0 * c / counts[best])
        return best, rival, lower + self.eps >= top_u

    def own_stop(self) -> bool:
        """True when a logical round is complete and the LUCB stopping rule fires."""
        if self.stats.t < self.K or self._queue:
            return False
        if self._indices is None:
            self._indices = self._compute()
        return self._indices[2]

    def _select(self) -> int:
        if not self._queue:
            indices = self._indices if self._indices is not None else self._compute()
            self._queue.extend(indices[:2])
        return self._queue.popleft()

    def update(self, arm: int, reward: float) -> None:
        self.stats.add(arm, reward)
        self._indices = None


class TaS(Sampler):
    """Track-and-Stop on the epsilon-BAI allocation with C-tracking.

    Each round the optimal weights of the empirical means are computed. An arm
    with ``N_i < sqrt(n) - K/2`` is pulled first (forced exploration); otherwise
    the arm maximising ``sum_t w_t - N`` is pulled. When the oracle fails (for
    instance on empirical ties at ``eps = 0``) uniform weights are used.
    """

    name = "tas"

    def __init__(self, K: int, eps: float,
                 weights_fn: Callable[[Sequence[float]], Sequence[float]] | None = None):
        super().__init__(K)
        self.eps = float(eps)
        self.weights_fn = weights_fn
        self.cum_weights = [0.0] * K

    def _weights(self) -> Sequence[float]:
        if self.weights_fn is not None:
            return self.weights_fn(self.stats.means)
        try:
            return solve_eps(self.stats.means, self.eps).weights
        except (ValueError, RuntimeError):
            return [1.0 / self.K] * self.K

    def _select(self) -> int:
        stats = self.stats
        w = self._weights()
        cum = self.cum_weights
        for i in range(self.K):
            cum[i] += w[i]
        n = stats.t + 1
        counts = stats.counts
        if min(counts) < math.sqrt(n) - 0.5 * self.K:
            return min(range(self.K), key=counts.__getitem__)
        return argmax([cum[i] - counts[i] for i in range(self.K)])
