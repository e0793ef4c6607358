"""Characteristic times, optimal allocations and hardness constants for Gaussian arms.

The characteristic time of an instance is the inverse of

    max_w min_{j != i*} (mu_{i*} - mu_j)^2 / (2 (1/w_{i*} + 1/w_j))

over the simplex. At the optimum all the pairwise transportation costs are equal,
which turns the problem into a one-dimensional root search in the common cost
level ``r``. The additive slack version is the plain problem on a shifted instance,
and the multiplicative version only changes the gaps and a scale factor ``c``, so
one routine serves all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._numerics import decreasing_convex_root, golden_section
from .instances import InvalidParameterError, eps_good_set, gap_structure


class NonUniqueBestArmError(ValueError):
    """The instance has several arms sharing the top mean."""


class ArmNotEpsGoodError(ValueError):
    """The requested reference arm is not epsilon-good."""


@dataclass(frozen=True)
class Allocation:
    """Optimal sampling proportions and the matching characteristic time."""

    weights: tuple[float, ...]
    time: float
    beta: float | None = None

    def to_dict(self) -> dict:
        return {"time": self.time, "weights": list(self.weights), "beta": self.beta}


@dataclass(frozen=True)
class HardnessConstants:
    """``h_eps`` for a given slack, ``h_levels[i - 1]`` for gap level ``i``."""

    h_eps: float
    h_levels: tuple[float, ...]


def _unique_best(means: Sequence[float]) -> int:
    top = max(means)
    best = [i for i, m in enumerate(means) if m == top]
    if len(best) > 1:
        raise NonUniqueBestArmError(f"arms {[b + 1 for b in best]} share the best mean")
    return best[0]


def _check_means(means: Sequence[float]) -> list[float]:
    means = [float(m) for m in means]
    if len(means) < 2:
        raise InvalidParameterError(f"need at least 2 arms, got {len(means)}")
    if not all(math.isfinite(m) for m in means):
        raise InvalidParameterError("arm means must be finite")
    return means


def _check_beta(beta: float) -> float:
    if not 0.0 < beta < 1.0:
        raise InvalidParameterError(f"beta must lie in (0, 1), got {beta}")
    return float(beta)


def _gaps(means: Sequence[float], best: int) -> list[float]:
    top = means[best]
    return [top - m for j, m in enumerate(means) if j != best]


def _pole(gaps: Sequence[float]) -> float:
    return 1.0 / min(gaps) ** 2


def _check_r(gaps: Sequence[float], r: float) -> None:
    if not r > _pole(gaps):
        raise ValueError(f"r = {r} is at or below the pole {_pole(gaps)}")


def psi_value(means: Sequence[float], r: float) -> float:
    """``sum_{i != i*} 1 / (r D_i^2 - 1)^2 - 1``; convex decreasing beyond its pole."""
    means = _check_means(means)
    gaps = _gaps(means, _unique_best(means))
    _check_r(gaps, r)
    return math.fsum(1.0 / (r * d * d - 1.0) ** 2 for d in gaps) - 1.0


def phi_value(means: Sequence[float], beta: float, r: float) -> float:
    """``sum_{i != i*} 1 / (r D_i^2 - 1) - (1 - beta) / beta``."""
    means = _check_means(means)
    beta = _check_beta(beta)
    gaps = _gaps(means, _unique_best(means))
    _check_r(gaps, r)
    return math.fsum(1.0 / (r * d * d - 1.0) for d in gaps) - (1.0 - beta) / beta


def _solve_beta(gaps: Sequence[float], best: int, K: int, beta: float, c: float) -> Allocation:
    """Equalise ``a_j^2 / (1/beta + c/w_j)`` over ``j`` with ``w_best = beta``.

    Writing the common cost as ``beta / r`` gives ``w_j = c beta / (r a_j^2 - 1)``,
    and summing to one leaves ``sum_j c / (r a_j^2 - 1) = (1 - beta) / beta``.
    """
    sq = [a * a for a in gaps]
    target = (1.0 - beta) / beta

    def f(r: float) -> float:
        return math.fsum(c / (r * s - 1.0) for s in sq) - target

    def df(r: float) -> float:
        return -math.fsum(c * s / (r * s - 1.0) ** 2 for s in sq)

    def scale(r: float) -> float:
        return max(target, math.fsum(c / (r * s - 1.0) for s in sq))

    r = decreasing_convex_root(f, df, 1.0 / min(sq), scale=scale)
    others = iter(c * beta / (r * s - 1.0) for s in sq)
    weights = tuple(beta if j == best else next(others) for j in range(K))
    return Allocation(weights, 2.0 * r / beta, beta)


def _solve_free(gaps: Sequence[float], best: int, K: int, c: float) -> Allocation:
    """Unconstrained optimum: the equalised costs plus ``sum_j (w_j / w_best)^2 = c``."""
    sq = [a * a for a in gaps]

    def f(r: float) -> float:
        return math.fsum(c / (r * s - 1.0) ** 2 for s in sq) - 1.0

    def df(r: float) -> float:
        return -2.0 * math.fsum(c * s / (r * s - 1.0) ** 3 for s in sq)

    def scale(r: float) -> float:
        return math.fsum(c / (r * s - 1.0) ** 2 for s in sq)

    r = decreasing_convex_root(f, df, 1.0 / min(sq), scale=scale)
    ratios = [c / (r * s - 1.0) for s in sq]
    total = 1.0 + math.fsum(ratios)
    w_best = 1.0 / total
    others = iter(x / total for x in ratios)
    weights = tuple(w_best if j == best else next(others) for j in range(K))
    # equal costs: 2 / T = a_j^2 / (1/w_best + c/w_j) = w_best / r
    return Allocation(weights, 2.0 * r * total, None)


def solve_bai_beta(means: Sequence[float], beta: float) -> Allocation:
    """Optimal allocation with the best arm's weight pinned to ``beta``."""
    means = _check_means(means)
    beta = _check_beta(beta)
    best = _unique_best(means)
    return _solve_beta(_gaps(means, best), best, len(means), beta, 1.0)


def solve_bai(means: Sequence[float]) -> Allocation:
    """Unconstrained optimal allocation; satisfies ``w_{i*}^2 = sum_{i != i*} w_i^2``."""
    means = _check_means(means)
    best = _unique_best(means)
    return _solve_free(_gaps(means, best), best, len(means), 1.0)


def modified_instance(means: Sequence[float], eps: float, i: int) -> tuple[float, ...]:
    """Keep arm ``i`` and lower every other arm by ``eps``."""
    return tuple(float(m) if j == i else float(m) - eps for j, m in enumerate(means))


def _reference_arm(means: Sequence[float], eps: float, i: int | None) -> int:
    if i is None:
        return _lowest_best(means)
    if not 0 <= i < len(means):
        raise InvalidParameterError(f"arm index {i} out of range")
    if i not in eps_good_set(means, eps):
        raise ArmNotEpsGoodError(f"arm {i + 1} is not {eps}-good")
    return i


def _lowest_best(means: Sequence[float]) -> int:
    top = max(means)
    return next(j for j, m in enumerate(means) if m == top)


def solve_eps(means: Sequence[float], eps: float, beta: float | None = None,
              i: int | None = None) -> Allocation:
    """Allocation for identifying an ``eps``-good arm, relative to reference arm ``i``.

    For ``eps > 0`` this is the plain problem on ``modified_instance(means, eps, i)``,
    with ``i`` defaulting to the lowest-index best arm. For ``eps = 0`` the instance
    must have a unique best arm.
    """
    means = _check_means(means)
    if not eps >= 0:
        raise InvalidParameterError(f"eps must be nonnegative, got {eps}")
    if eps == 0:
        best = _unique_best(means)
        if i is not None and i != best:
            raise ArmNotEpsGoodError(f"arm {i + 1} is not the best arm")
        target = means
    else:
        target = modified_instance(means, eps, _reference_arm(means, eps, i))
    return solve_bai(target) if beta is None else solve_bai_beta(target, beta)


def _multiplicative_gaps(means: Sequence[float], eps: float) -> tuple[int, list[float], float]:
    means = _check_means(means)
    if not 0.0 <= eps < 1.0:
        raise InvalidParameterError(f"multiplicative eps must lie in [0, 1), got {eps}")
    if min(means) <= 0.0:
        raise InvalidParameterError("multiplicative slack needs strictly positive means")
    best = _unique_best(means)
    top = means[best]
    scale = 1.0 - eps
    gaps = [top - scale * m for j, m in enumerate(means) if j != best]
    return best, gaps, scale * scale


def solve_eps_multiplicative(means: Sequence[float], eps: float,
                             beta: float | None = None) -> Allocation:
    """Allocation for finding an arm with mean at least ``(1 - eps) * max(mu)``.

    The costs are ``(mu_i - (1 - eps) mu_j)^2 / (1/w_i + (1 - eps)^2 / w_j)``.
    Without ``beta`` the best arm's weight is chosen by golden-section search.
    At ``eps = 0`` the result coincides bit-for-bit with the additive solver.
    """
    best, gaps, c = _multiplicative_gaps(means, eps)
    K = len(gaps) + 1
    if beta is not None:
        return _solve_beta(gaps, best, K, _check_beta(beta), c)
    b, t = golden_section(lambda x: _solve_beta(gaps, best, K, x, c).time,
                          1e-9, 1.0 - 1e-9, tol=1e-8)
    # the search cannot resolve beta much below sqrt(machine eps) on the flat
    # minimum; the overall-balance root pins it exactly
    polished = _solve_free(gaps, best, K, c)
    if polished.time <= t * (1.0 + 1e-9):
        return polished
    alloc = _solve_beta(gaps, best, K, b, c)
    return Allocation(alloc.weights, alloc.time, None)


def solve_eps_multiplicative_exact(means: Sequence[float], eps: float) -> Allocation:
    """Unconstrained multiplicative optimum from the overall-balance root directly."""
    best, gaps, c = _multiplicative_gaps(means, eps)
    return _solve_free(gaps, best, len(gaps) + 1, c)


def hardness_constants(means: Sequence[float], eps0: float, eps_tilde: float = 0.0) -> HardnessConstants:
    """Closed-form complexity constants of the fixed-beta Top-Two analysis.

    ``h_eps`` is the constant governing how long the empirical leader can stay
    outside the ``eps_tilde``-good set; ``h_levels[i - 1]`` is the constant for
    gap level ``i = 1 .. C - 1`` controlling the error probability at slack in
    ``[D_i, D_{i+1})``. ``h_levels[0]`` equals ``K (2 / D_min + 3 / eps0)^2``.
    """
    means = _check_means(means)
    if not eps0 > 0:
        raise InvalidParameterError(f"eps0 must be positive, got {eps0}")
    if not eps_tilde >= 0:
        raise InvalidParameterError(f"eps_tilde must be nonnegative, got {eps_tilde}")
    K = len(means)
    top = max(means)
    n_best = sum(1 for m in means if m == top)
    inv0 = 1.0 / eps0

    good = eps_good_set(means, eps_tilde)
    outside = [top - m for j, m in enumerate(means) if j not in good]
    d_eps = min(outside) if outside else math.inf
    c_eps = max(2.0 / d_eps - inv0, inv0)
    h_eps = (2.0 * n_best / d_eps ** 2
             + (len(good) - n_best) * c_eps ** 2
             + math.fsum(max(c_eps, math.sqrt(2.0) / d) ** 2 for d in outside))

    gs = gap_structure(means)
    # 1-based level arrays: D[1] = 0, sizes[k] = |class k|
    D = (None,) + gs.distinct_gaps
    sizes = (None,) + gs.class_sizes()
    cm = gs.c_mu

    def C1(i: int) -> float:
        return 2.0 / D[i] - inv0

    def C2(i: int, j: int) -> float:
        return 2.0 * (D[j] * inv0 + 1.0) / (D[i] - D[j]) + 3.0 * inv0

    def size_sum(a: int, b: int) -> int:
        return sum(sizes[k] for k in range(a, b + 1))

    levels = []
    for i in range(1, cm):
        candidates = []
        for j in range(1, i + 1):
            cj, cij = C1(j + 1), C2(i + 1, j)
            h_bar = (n_best * max(math.sqrt(2.0) / D[j + 1], cij) ** 2
                     + max(cj, cij) ** 2 * (size_sum(2, j) + size_sum(i + 1, cm))
                     + math.fsum(sizes[k] * max(cj, cij, math.sqrt(2.0) / D[k]) ** 2
                                 for k in range(j + 1, i + 1)))
            h_tilde = (2.0 * n_best / D[j + 1] ** 2
                       + max(cj, inv0) ** 2 * size_sum(2, j)
                       + 2.0 * size_sum(1, j) / (D[i + 1] - D[j]) ** 2
                       + math.fsum(sizes[k] * max(cj, inv0, math.sqrt(2.0) / D[k]) ** 2
                                   for k in range(j + 1, cm + 1)))
            candidates.append(max(h_bar, h_tilde))
        levels.append(min(candidates))
    return HardnessConstants(h_eps, tuple(levels))


def hardness_bracket(means: Sequence[float], eps0: float, level: int) -> tuple[float, float]:
    """Lower and upper bounds on ``h_levels[level - 1]`` stated alongside the constants."""
    gs = gap_structure(means)
    D = (None,) + gs.distinct_gaps
    K = len(means)
    i = level
    lower = 2.0 * K / D[i + 1] ** 2
    upper = K * min(max(2.0 / D[j + 1], 2.0 * (D[j] / eps0 + 1.0) / (D[i + 1] - D[j]) + 3.0 / eps0) ** 2
                    for j in range(1, i + 1))
    return lower, upper
