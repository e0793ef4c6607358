"""Stopping thresholds ``c(n, delta)`` and the ``W_{-1}``-type inverse used in bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from ._numerics import golden_section, riemann_zeta
from .instances import InvalidParameterError

_LAMBDA_LO = 0.5 + 1e-9
_LAMBDA_HI = 1.0 - 1e-9


def lambert_wbar(x: float, tol: float = 1e-12) -> float:
    """The unique ``w >= 1`` solving ``w - ln(w) = x``, for ``x >= 1``.

    The root is known to lie in ``[x + ln x, x + ln x + min(1/2, 1/sqrt(x))]``,
    so plain bisection on that bracket is enough.
    """
    if not x >= 1.0:
        raise ValueError(f"lambert_wbar needs x >= 1, got {x}")
    if x == 1.0:
        return 1.0
    lo = x + math.log(x)
    hi = lo + min(0.5, 1.0 / math.sqrt(x))
    # h(w) = w - ln w - x is increasing for w > 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid - math.log(mid) < x:
            lo = mid
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo <= 2.0 * math.ulp(hi):
            break
    return 0.5 * (lo + hi)


def g_gaussian(lam: float) -> float:
    """``2 lam - 2 lam ln(4 lam) + ln zeta(2 lam) - ln(1 - lam) / 2`` on ``(1/2, 1)``."""
    return (2.0 * lam - 2.0 * lam * math.log(4.0 * lam)
            + math.log(riemann_zeta(2.0 * lam)) - 0.5 * math.log(1.0 - lam))


def _objective(lam: float, x: float) -> float:
    if not _LAMBDA_LO <= lam <= _LAMBDA_HI:
        return math.inf
    return (g_gaussian(lam) + x) / lam


@lru_cache(maxsize=4096)
def c_gaussian(x: float) -> float:
    """``min_{lam in (1/2, 1]} (g_gaussian(lam) + x) / lam``.

    A coarse grid locates the basin, then golden-section search refines it. The
    objective blows up at both ends of the interval, so the grid never picks an
    endpoint for moderate ``x``.
    """
    if not x > 0:
        raise InvalidParameterError(f"c_gaussian needs x > 0, got {x}")
    grid = [0.5 + 1e-3 * k for k in range(1, 500)]
    values = [_objective(lam, x) for lam in grid]
    k = min(range(len(grid)), key=values.__getitem__)
    lo = grid[k - 1] if k > 0 else _LAMBDA_LO
    hi = grid[k + 1] if k + 1 < len(grid) else _LAMBDA_HI
    _, best = golden_section(lambda lam: _objective(lam, x), lo, hi, tol=1e-12)
    return min(best, values[k])


@dataclass(frozen=True)
class Threshold:
    """A stopping threshold ``c(n, delta)``; call it with ``n``.

    ``kind`` is ``"heuristic"`` (``ln((1 + ln n) / delta)``) or ``"proven"``
    (``2 c_gaussian(ln((K - 1) / delta) / 2) + 4 ln(4 + ln(n / 2))``).
    """

    kind: str
    delta: float
    K: int = 2

    KINDS = ("heuristic", "proven")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise InvalidParameterError(f"unknown threshold kind {self.kind!r}")
        if not 0.0 < self.delta < 1.0:
            raise InvalidParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if self.kind == "proven" and self.K < 2:
            raise InvalidParameterError("proven threshold needs K >= 2")

    @property
    def constant_part(self) -> float:
        if self.kind == "heuristic":
            return -math.log(self.delta)
        return 2.0 * c_gaussian(0.5 * math.log((self.K - 1) / self.delta))

    def __call__(self, n: float) -> float:
        return threshold_value(self, n)


def heuristic(delta: float) -> Threshold:
    return Threshold("heuristic", delta)


def proven(K: int, delta: float) -> Threshold:
    return Threshold("proven", delta, K)


def threshold_value(kind: Threshold, n: float) -> float:
    if not n >= 2:
        raise ValueError(f"threshold needs n >= 2, got {n}")
    if kind.kind == "heuristic":
        return math.log((1.0 + math.log(n)) / kind.delta)
    return kind.constant_part + 4.0 * math.log(4.0 + math.log(n / 2.0))
