"""Sampling rules behind a common ``select`` / ``update`` / ``recommend`` interface.

``make_sampler`` builds any rule from its registry name; see ``ALGORITHMS``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .base import Sampler
from .baselines import LUCB, TaS, Uniform
from .budget import (Doubling, SequentialHalving, SuccessiveRejects, doubling_budgets, log_bar,
                     sh_schedule, sr_schedule)
from .core import (IDS, ArmStatistics, FixedBeta, IDSMultiplicative, LogHalf, PolyHalf,
                   TrackingTable, UnpulledArmError, argmax, eb_leader, tc_challenger, tc_cost,
                   tcm_challenger, tcm_cost, tracking_select)
from .toptwo import EBTC, EBTCI, T3C, TTUCB, EBTCSlack, default_bonus, tci_challenger


@dataclass
class SamplerContext:
    """Problem-level settings a sampler may need besides its own parameters."""

    K: int
    eps: float = 0.0
    delta: float = 0.01
    threshold: Callable[[float], float] | None = None
    horizon: int | None = None
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))


def _eps0(ctx: SamplerContext, params: Mapping[str, Any]) -> float:
    # BAI runs (eps = 0) still need a positive slack inside the challenger
    return float(params.get("eps0", ctx.eps if ctx.eps > 0 else 0.1))


def _ebtc_ids(ctx, p):
    return EBTC(ctx.K, _eps0(ctx, p), IDS())


def _ebtc_fixed(ctx, p):
    return EBTC(ctx.K, _eps0(ctx, p), FixedBeta(float(p.get("beta", 0.5))))


def _ebtcm_ids(ctx, p):
    eps0 = _eps0(ctx, p)
    return EBTC(ctx.K, eps0, IDSMultiplicative(eps0), multiplicative=True)


def _slack(schedule_cls):
    def build(ctx, p):
        mode = IDS() if p.get("proportions") == "ids" else FixedBeta(float(p.get("beta", 0.5)))
        return EBTCSlack(ctx.K, schedule_cls(float(p.get("alpha", 0.5))), mode)
    return build


def _lucb(ctx, p):
    if ctx.threshold is None:
        raise ValueError("lucb needs a threshold")
    return LUCB(ctx.K, float(p.get("eps", ctx.eps)), ctx.threshold)


def _t3c(ctx, p):
    return T3C(ctx.K, float(p.get("eps", ctx.eps)), float(p.get("beta", 0.5)), ctx.rng)


def _ebtci(ctx, p):
    return EBTCI(ctx.K, float(p.get("eps", ctx.eps)), float(p.get("beta", 0.5)), ctx.rng)


def _ttucb(ctx, p):
    return TTUCB(ctx.K, float(p.get("eps", ctx.eps)), float(p.get("beta", 0.5)))


def _tas(ctx, p):
    return TaS(ctx.K, float(p.get("eps", ctx.eps)))


def _budget(ctx, p) -> int:
    budget = p.get("budget", ctx.horizon)
    if budget is None:
        raise ValueError("fixed-budget rules need a budget (or a horizon)")
    return int(budget)


def _sr(ctx, p):
    return SuccessiveRejects(ctx.K, _budget(ctx, p))


def _sh(ctx, p):
    return SequentialHalving(ctx.K, _budget(ctx, p))


def _dsr(ctx, p):
    return Doubling(ctx.K, SuccessiveRejects, "dsr")


def _dsh(ctx, p):
    return Doubling(ctx.K, SequentialHalving, "dsh")


ALGORITHMS: dict[str, Callable[[SamplerContext, Mapping[str, Any]], Sampler]] = {
    "ebtc-ids": _ebtc_ids,
    "ebtc-fixed": _ebtc_fixed,
    "ebtcm-ids": _ebtcm_ids,
    "ebtc-slack-poly": _slack(PolyHalf),
    "ebtc-slack-log": _slack(LogHalf),
    "uniform": lambda ctx, p: Uniform(ctx.K),
    "lucb": _lucb,
    "t3c": _t3c,
    "ebtci": _ebtci,
    "ttucb": _ttucb,
    "tas": _tas,
    "sr": _sr,
    "sh": _sh,
    "dsr": _dsr,
    "dsh": _dsh,
}

# rules that ignore the additive stopping rule
FIXED_BUDGET = frozenset({"sr", "sh", "dsr", "dsh"})
MULTIPLICATIVE = frozenset({"ebtcm-ids"})


def make_sampler(name: str, ctx: SamplerContext, params: Mapping[str, Any] | None = None) -> Sampler:
    try:
        build = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}") from None
    sampler = build(ctx, dict(params or {}))
    sampler.name = name
    return sampler


__all__ = [
    "ALGORITHMS", "ArmStatistics", "Doubling", "EBTC", "EBTCI", "EBTCSlack", "FIXED_BUDGET",
    "FixedBeta", "IDS", "IDSMultiplicative", "LUCB", "LogHalf", "MULTIPLICATIVE", "PolyHalf",
    "Sampler", "SamplerContext", "SequentialHalving", "SuccessiveRejects", "T3C", "TTUCB", "TaS",
    "TrackingTable", "Uniform", "UnpulledArmError", "argmax", "default_bonus", "doubling_budgets",
    "eb_leader", "log_bar", "make_sampler", "sh_schedule", "sr_schedule", "tc_challenger",
    "tc_cost", "tci_challenger", "tcm_challenger", "tcm_cost", "tracking_select",
]
