"""Bandit instances, the benchmark generators and the gap structure of a mean vector.

Arms are 0-based everywhere in the library; user-facing output adds one.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


class InvalidParameterError(ValueError):
    """A generator or instance received parameters outside its domain."""


class Family(str, Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class BanditInstance:
    """Arm means plus the reward law shared by all arms."""

    means: tuple[float, ...]
    family: Family = Family.GAUSSIAN

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "family", Family(self.family))
        if len(means) < 2:
            raise InvalidParameterError(f"need at least 2 arms, got {len(means)}")
        if not all(math.isfinite(m) for m in means):
            raise InvalidParameterError("arm means must be finite")
        if self.family is Family.BERNOULLI and not all(0.0 <= m <= 1.0 for m in means):
            raise InvalidParameterError("Bernoulli means must lie in [0, 1]")

    @property
    def K(self) -> int:
        return len(self.means)

    @property
    def best_mean(self) -> float:
        return max(self.means)

    @property
    def best_arms(self) -> frozenset[int]:
        return eps_good_set(self, 0.0)

    @property
    def gaps(self) -> tuple[float, ...]:
        top = self.best_mean
        return tuple(top - m for m in self.means)


@dataclass(frozen=True)
class GapStructure:
    """Distinct gaps ``0 = D_1 < D_2 < ...`` and the arms sitting at each gap."""

    distinct_gaps: tuple[float, ...]
    classes: tuple[frozenset[int], ...]

    @property
    def c_mu(self) -> int:
        return len(self.distinct_gaps)

    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)


@dataclass(frozen=True)
class InstanceSpec:
    """Configuration for one of the benchmark generators.

    ``kind`` is one of ``alpha``, ``sparse``, ``two_groups``, ``random_eps_good``
    or ``explicit``; ``params`` carries the generator arguments.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    family: Family = Family.GAUSSIAN

    KINDS = ("alpha", "sparse", "two_groups", "random_eps_good", "explicit")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "InstanceSpec":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind not in cls.KINDS:
            raise InvalidParameterError(f"unknown instance kind {kind!r}")
        family = Family(data.pop("family", "gaussian"))
        data.pop("id", None)
        return cls(kind=kind, params=data, family=family)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **dict(self.params), "family": self.family.value}

    @property
    def instance_id(self) -> str:
        p = self.params
        if self.kind == "alpha":
            return f"alpha{p['alpha']}-K{p['K']}"
        if self.kind == "sparse":
            return f"sparse-K{p['K']}"
        if self.kind == "two_groups":
            return f"2g-K{p['K']}-b{p['n_best']}"
        if self.kind == "random_eps_good":
            return f"rand-K{p['K']}-e{p['eps']}-g{p['n_good']}-s{p['seed']}"
        return "explicit-" + "_".join(f"{m:g}" for m in p["means"])


def _require_int(name: str, value: Any, low: int) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < low:
        raise InvalidParameterError(f"{name} must be >= {low}, got {value}")
    return value


def alpha_means(K: int, alpha: float) -> tuple[float, ...]:
    """``mu_i = 1 - ((i - 1) / (K - 1)) ** alpha`` for ``i = 1..K``."""
    K = _require_int("K", K, 2)
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    return tuple(1.0 - (i / (K - 1)) ** alpha for i in range(K))


def sparse_means(K: int) -> tuple[float, ...]:
    K = _require_int("K", K, 2)
    return (0.25,) + (0.0,) * (K - 1)


def two_groups_means(K: int, n_best: int, high: float = 0.6, low: float = 0.4) -> tuple[float, ...]:
    K = _require_int("K", K, 2)
    n_best = _require_int("n_best", n_best, 1)
    if n_best >= K:
        raise InvalidParameterError("two-groups instance needs at least one low arm")
    if not high > low:
        raise InvalidParameterError("high must exceed low")
    return (float(high),) * n_best + (float(low),) * (K - n_best)


def random_eps_good_means(K: int, eps: float, n_good: int, seed: int) -> tuple[float, ...]:
    """``mu_1 = 1``, ``n_good`` arms uniform on ``[1 - eps, 1]``, the rest on ``[0, 1 - eps)``."""
    K = _require_int("K", K, 2)
    n_good = _require_int("n_good", n_good, 1)
    if not 0.0 < eps < 1.0:
        raise InvalidParameterError(f"eps must lie in (0, 1), got {eps}")
    if n_good >= K:
        raise InvalidParameterError("n_good must be < K")
    rng = np.random.default_rng(seed)
    edge = 1.0 - eps
    good = rng.uniform(edge, 1.0, size=n_good)
    bad = []
    while len(bad) < K - 1 - n_good:
        x = float(rng.uniform(0.0, edge))
        if x < edge:
            bad.append(x)
    return (1.0,) + tuple(float(x) for x in good) + tuple(bad)


def generate_instance(spec: InstanceSpec) -> BanditInstance:
    p = dict(spec.params)
    try:
        if spec.kind == "alpha":
            means = alpha_means(p["K"], p["alpha"])
        elif spec.kind == "sparse":
            means = sparse_means(p["K"])
        elif spec.kind == "two_groups":
            means = two_groups_means(p["K"], p["n_best"], p.get("high", 0.6), p.get("low", 0.4))
        elif spec.kind == "random_eps_good":
            means = random_eps_good_means(p["K"], p["eps"], p["n_good"], p["seed"])
        elif spec.kind == "explicit":
            means = tuple(float(m) for m in p["means"])
        else:
            raise InvalidParameterError(f"unknown instance kind {spec.kind!r}")
    except KeyError as exc:
        raise InvalidParameterError(f"{spec.kind} instance is missing parameter {exc}") from None
    return BanditInstance(means, spec.family)


def _as_means(obj: BanditInstance | Sequence[float]) -> Sequence[float]:
    return obj.means if isinstance(obj, BanditInstance) else obj


def eps_good_set(instance: BanditInstance | Sequence[float], eps: float) -> frozenset[int]:
    """Arms whose mean is at least ``max(mu) - eps``."""
    if eps < 0:
        raise InvalidParameterError("eps must be nonnegative")
    means = _as_means(instance)
    floor = max(means) - eps
    return frozenset(i for i, m in enumerate(means) if m >= floor)


def gap_structure(instance: BanditInstance | Sequence[float], tol: float = 0.0) -> GapStructure:
    """Group arms by their gap to the best mean; ``tol > 0`` merges gaps closer than ``tol``.

    Arms are grouped on the computed gap ``max(mu) - mu_k`` rather than on the mean,
    so two means that round to the same gap share a class.
    """
    means = list(_as_means(instance))
    top = max(means)
    gaps = [top - m for m in means]
    order = sorted(range(len(means)), key=gaps.__getitem__)
    levels: list[float] = []
    classes: list[set[int]] = []
    for i in order:
        g = gaps[i]
        if levels and g - levels[-1] <= tol:
            classes[-1].add(i)
            continue
        levels.append(g)
        classes.append({i})
    return GapStructure(tuple(levels), tuple(frozenset(c) for c in classes))


def gap_index(gaps: GapStructure, eps: float) -> int:
    """1-based level ``i`` with ``D_i <= eps < D_{i+1}`` (``D_{C+1} = inf``)."""
    if eps < 0:
        raise InvalidParameterError("eps must be nonnegative")
    return bisect.bisect_right(gaps.distinct_gaps, eps)


def parse_means(text: str | Iterable[float]) -> tuple[float, ...]:
    if isinstance(text, str):
        parts = [t for t in text.replace(" ", "").split(",") if t]
        try:
            return tuple(float(t) for t in parts)
        except ValueError:
            raise InvalidParameterError(f"cannot parse means {text!r}") from None
    return tuple(float(t) for t in text)
