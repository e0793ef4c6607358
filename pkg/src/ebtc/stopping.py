"""GLR stopping rules for additive and multiplicative epsilon-best-arm identification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from .sampling.core import ArmStatistics

ThresholdLike = Union[Callable[[float], float], float]


@dataclass(frozen=True)
class StopDecision:
    stop: bool
    statistic: float
    threshold: float


def glr_statistic(means, counts, eps: float) -> float:
    """``min_{i != best} (mu_best - mu_i + eps) / sqrt(1/N_best + 1/N_i)``, signed."""
    best = max(range(len(means)), key=means.__getitem__)
    m_b = means[best]
    inv_b = 1.0 / counts[best]
    low = math.inf
    for i in range(len(means)):
        if i == best:
            continue
        v = (m_b - means[i] + eps) / math.sqrt(inv_b + 1.0 / counts[i])
        if v < low:
            low = v
    return low


def glr_statistic_multiplicative(means, counts, eps: float) -> float:
    """``min_{i != best} (mu_best - (1-eps) mu_i) / sqrt(1/N_best + (1-eps)^2/N_i)``."""
    s = 1.0 - eps
    s2 = s * s
    best = max(range(len(means)), key=means.__getitem__)
    m_b = means[best]
    inv_b = 1.0 / counts[best]
    low = math.inf
    for i in range(len(means)):
        if i == best:
            continue
        v = (m_b - s * means[i]) / math.sqrt(inv_b + s2 / counts[i])
        if v < low:
            low = v
    return low


def glr_reaches(means, counts, eps: float, level: float, multiplicative: bool = False) -> bool:
    """Whether the GLR statistic is at least ``level``; exits at the first arm below it.

    Evaluates exactly the same per-arm costs as ``glr_statistic``, so the decision
    is identical, but most rounds of a run end after one or two arms.
    """
    best = max(range(len(means)), key=means.__getitem__)
    m_b = means[best]
    inv_b = 1.0 / counts[best]
    if multiplicative:
        s = 1.0 - eps
        s2 = s * s
        for i in range(len(means)):
            if i != best and (m_b - s * means[i]) / math.sqrt(inv_b + s2 / counts[i]) < level:
                return False
        return True
    for i in range(len(means)):
        if i != best and (m_b - means[i] + eps) / math.sqrt(inv_b + 1.0 / counts[i]) < level:
            return False
    return True


def _threshold_at(kind: ThresholdLike, n_minus_one: int) -> float:
    c = kind(n_minus_one) if callable(kind) else float(kind)
    return math.sqrt(2.0 * c)


def glr_check(stats: ArmStatistics, eps: float, kind: ThresholdLike) -> StopDecision:
    """Stop once the statistic reaches ``sqrt(2 c(n - 1, delta))``.

    ``kind`` is a threshold callable ``c(n)`` or a constant ``c``. With ``t``
    samples collected the current round is ``n = t + 1``, so ``c`` is evaluated
    at ``t``.
    """
    stats.require_pulled()
    if not eps >= 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    stat = glr_statistic(stats.means, stats.counts, eps)
    thr = _threshold_at(kind, stats.t)
    return StopDecision(stat >= thr, stat, thr)


def glr_check_multiplicative(stats: ArmStatistics, eps: float, kind: ThresholdLike) -> StopDecision:
    stats.require_pulled()
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"multiplicative eps must lie in [0, 1), got {eps}")
    stat = glr_statistic_multiplicative(stats.means, stats.counts, eps)
    thr = _threshold_at(kind, stats.t)
    return StopDecision(stat >= thr, stat, thr)
