"""Seeded Monte-Carlo engine for fixed-confidence and anytime experiments.

Every run owns a ``RewardSource`` built from its seed: one independent stream per
arm (so the k-th pull of an arm sees the same noise whatever the algorithm) plus
one stream for the sampler's own randomness. Runs are therefore pure functions
of ``(config, seed)``, and the persisted output does not depend on the number of
worker processes.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from ._streams import BufferedStream
from .instances import BanditInstance, Family, InstanceSpec, generate_instance, gap_structure
from .sampling import FIXED_BUDGET, Sampler, SamplerContext, make_sampler
from .stopping import glr_reaches
from .thresholds import Threshold

FC_COLUMNS = ("run_id", "seed", "algo", "instance_id", "K", "epsilon", "delta", "threshold",
              "tau", "truncated", "recommended", "correct", "wall_ns")
ANYTIME_COLUMNS = ("run_id", "seed", "algo", "instance_id", "t", "recommended", "regret")
DEFAULT_CAP = 10_000_000


class ConfigError(ValueError):
    """An experiment configuration is invalid."""


def sample_reward(instance: BanditInstance, arm: int, rng: np.random.Generator) -> float:
    """One reward of ``arm``: ``N(mu, 1)`` or Bernoulli(``mu``)."""
    mu = instance.means[arm]
    if instance.family is Family.BERNOULLI:
        return 1.0 if rng.random() < mu else 0.0
    return mu + rng.standard_normal()


class RewardSource:
    """Per-arm reward streams and a sampler stream derived from one seed."""

    def __init__(self, instance: BanditInstance, seed: int):
        K = instance.K
        children = np.random.SeedSequence(seed).spawn(K + 1)
        bernoulli = instance.family is Family.BERNOULLI
        kind = "uniform" if bernoulli else "normal"
        self._bernoulli = bernoulli
        self._means = list(instance.means)
        self._streams = [BufferedStream(np.random.Generator(np.random.PCG64(c)), kind)
                         for c in children[:K]]
        self.sampler_rng = np.random.Generator(np.random.PCG64(children[K]))

    def draw(self, arm: int) -> float:
        x = self._streams[arm].next()
        if self._bernoulli:
            return 1.0 if x < self._means[arm] else 0.0
        return self._means[arm] + x


@dataclass(frozen=True)
class AlgoSpec:
    name: str
    params: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def parse(cls, obj: Any) -> "AlgoSpec":
        if isinstance(obj, AlgoSpec):
            return obj
        if isinstance(obj, str):
            return cls(obj)
        if isinstance(obj, Mapping) and "name" in obj:
            params = {k: v for k, v in obj.items() if k not in ("name", "label")}
            return cls(str(obj["name"]), params)
        raise ConfigError(f"cannot read algorithm entry {obj!r}")

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        extra = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}[{extra}]"


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    seed: int
    algo: str
    instance_id: str
    K: int
    epsilon: float
    delta: float
    threshold: str
    tau: int
    truncated: bool
    recommended: int
    correct: bool
    wall_ns: int


@dataclass(frozen=True)
class AnytimeTrace:
    """Recommendations after ``checkpoints[k]`` samples and their simple regrets.

    ``cumulative_regret[k]`` (when tracked) is the sum of the simple regrets of the
    recommendations after every sample up to ``checkpoints[k]``.
    """

    checkpoints: tuple[int, ...]
    recommendations: tuple[int, ...]
    regrets: tuple[float, ...]
    cumulative_regret: tuple[float, ...] | None = None

    def errors(self, eps: float) -> tuple[bool, ...]:
        """Whether each recommendation falls outside the ``eps``-good set."""
        return tuple(r > eps for r in self.regrets)


def _build(algo: AlgoSpec, instance: BanditInstance, eps: float, threshold: Threshold | None,
           horizon: int | None, rng: np.random.Generator) -> Sampler:
    ctx = SamplerContext(K=instance.K, eps=eps, delta=threshold.delta if threshold else 0.01,
                         threshold=threshold, horizon=horizon, rng=rng)
    try:
        return make_sampler(algo.name, ctx, algo.params)
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad parameters for {algo.name}: {exc}") from None


def is_correct(instance: BanditInstance, arm: int, eps: float, multiplicative: bool = False) -> bool:
    top = instance.best_mean
    if multiplicative:
        return instance.means[arm] >= (1.0 - eps) * top
    return instance.means[arm] >= top - eps


def run_fixed_confidence(algo: AlgoSpec | str, instance: BanditInstance, eps: float,
                         threshold: Threshold, seed: int, cap: int = DEFAULT_CAP,
                         stopping: str | None = None, run_id: int = 0,
                         instance_id: str = "instance") -> RunRecord:
    """Sample until the stopping rule matching the sampler fires, or ``cap`` samples.

    ``tau`` counts samples. ``stopping`` may name the rule (``"additive"`` or
    ``"multiplicative"``) to guard against pairing a sampler with the wrong rule.
    """
    algo = AlgoSpec.parse(algo)
    K = instance.K
    if cap <= K:
        raise ConfigError(f"cap must exceed K = {K}")
    if algo.name in FIXED_BUDGET:
        raise ConfigError(f"{algo.name} is a fixed-budget rule and has no stopping time")
    start = time.perf_counter_ns()
    source = RewardSource(instance, seed)
    sampler = _build(algo, instance, eps, threshold, None, source.sampler_rng)
    rule = sampler.stopping
    if stopping is not None and rule != "own" and stopping != rule:
        raise ConfigError(f"{algo.name} samples for {rule} slack but the stopping rule is {stopping}")
    multiplicative = rule == "multiplicative"
    if multiplicative:
        if min(instance.means) <= 0:
            raise ConfigError("multiplicative slack needs strictly positive means")
        if not 0.0 <= eps < 1.0:
            raise ConfigError("multiplicative eps must lie in [0, 1)")

    stats = sampler.stats
    means, counts = stats.means, stats.counts
    select, update, draw = sampler.select, sampler.update, source.draw
    own = rule == "own"
    stopped = False
    while stats.t < cap:
        arm = select()
        update(arm, draw(arm))
        t = stats.t
        if t < K:
            continue
        if own:
            if sampler.own_stop():
                stopped = True
                break
        elif glr_reaches(means, counts, eps, math.sqrt(2.0 * threshold(t)), multiplicative):
            stopped = True
            break
    rec = sampler.recommend()
    return RunRecord(run_id=run_id, seed=seed, algo=algo.label, instance_id=instance_id, K=K,
                     epsilon=eps, delta=threshold.delta, threshold=threshold.kind,
                     tau=stats.t, truncated=not stopped, recommended=rec,
                     correct=is_correct(instance, rec, eps, multiplicative),
                     wall_ns=time.perf_counter_ns() - start)


def run_anytime(algo: AlgoSpec | str, instance: BanditInstance, horizon: int,
                checkpoints: Iterable[int], seed: int, eps: float = 0.0,
                delta: float = 0.01, cumulative: bool = False) -> AnytimeTrace:
    """Sample for ``horizon`` rounds and record the recommendation at each checkpoint.

    ``eps`` is the slack handed to samplers that use one; ``delta`` only matters
    for LUCB, whose indices depend on it (heuristic threshold).
    """
    algo = AlgoSpec.parse(algo)
    K = instance.K
    if horizon <= K:
        raise ConfigError(f"horizon must exceed K = {K}")
    marks = sorted(set(int(c) for c in checkpoints))
    if not marks or marks[0] < 1 or marks[-1] > horizon:
        raise ConfigError("checkpoints must lie in [1, horizon]")
    source = RewardSource(instance, seed)
    threshold = Threshold("heuristic", delta)
    sampler = _build(algo, instance, eps, threshold, horizon, source.sampler_rng)
    top = instance.best_mean
    mu = instance.means
    stats = sampler.stats
    select, update, draw = sampler.select, sampler.update, source.draw
    recs: list[int] = []
    regrets: list[float] = []
    cums: list[float] = []
    running = 0.0
    t = 0
    for mark in marks:
        if cumulative:
            while t < mark:
                arm = select()
                update(arm, draw(arm))
                t += 1
                running += top - mu[sampler.recommend()]
            cums.append(running)
        else:
            while t < mark:
                arm = select()
                update(arm, draw(arm))
                t += 1
        rec = sampler.recommend()
        recs.append(rec)
        regrets.append(top - mu[rec])
    assert stats.t == marks[-1]
    return AnytimeTrace(tuple(marks), tuple(recs), tuple(regrets),
                        tuple(cums) if cumulative else None)


def log_checkpoints(start: int, horizon: int, ratio: float = 1.2) -> list[int]:
    """Geometric grid from ``start`` to ``horizon`` (rounded, deduplicated, horizon included)."""
    points = []
    x = float(start)
    while x < horizon:
        points.append(int(round(x)))
        x *= ratio
    points.append(horizon)
    return sorted(set(p for p in points if start <= p <= horizon))


def linear_checkpoints(start: int, horizon: int, count: int = 100) -> list[int]:
    step = max(1, (horizon - start) // count)
    points = list(range(start, horizon + 1, step))
    if points[-1] != horizon:
        points.append(horizon)
    return points


# ---------------------------------------------------------------------------
# aggregation


def summarize(values: Sequence[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    n = arr.size
    if n == 0:
        raise ValueError("no values to summarise")
    q25, q50, q75 = np.percentile(arr, [25, 50, 75])
    return {"mean": float(arr.mean()), "std": float(arr.std(ddof=1)) if n > 1 else 0.0,
            "q25": float(q25), "q50": float(q50), "q75": float(q75),
            "min": float(arr.min()), "max": float(arr.max()), "n": int(n)}


def error_curve(regrets: Sequence[float], eps_grid: Sequence[float]) -> list[float]:
    """Fraction of recommendations outside the ``eps``-good set, for each ``eps``."""
    n = len(regrets)
    return [sum(1 for r in regrets if r > e) / n for e in eps_grid]


def regret_from_error_curve(instance: BanditInstance, regrets: Sequence[float]) -> float:
    """``sum_i (D_{i+1} - D_i) P(regret > D_i)`` over the distinct gaps ``D``.

    Equals the empirical mean of ``regrets`` whenever they are gaps of ``instance``.
    """
    gaps = gap_structure(instance).distinct_gaps
    curve = error_curve(regrets, gaps[:-1])
    return math.fsum((gaps[i + 1] - gaps[i]) * p for i, p in enumerate(curve))


# ---------------------------------------------------------------------------
# configured experiments


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    instance: InstanceSpec
    algos: tuple[AlgoSpec, ...]
    epsilon: float = 0.0
    delta: float = 0.01
    threshold: str = "heuristic"
    runs: int = 100
    base_seed: int = 0
    cap: int = DEFAULT_CAP
    horizon: int | None = None
    checkpoints: Any = "log"
    workers: int = 1
    out: str | None = None
    eps_grid: tuple[float, ...] = ()
    cumulative_regret: bool = False

    KEYS = frozenset({"experiment", "instance", "algo", "epsilon", "delta", "threshold", "runs",
                      "base_seed", "cap", "horizon", "checkpoints", "workers", "out", "eps_grid",
                      "cumulative_regret", "description"})

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        unknown = set(data) - cls.KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            experiment = data["experiment"]
            if experiment not in ("fc", "anytime"):
                raise ConfigError(f"experiment must be 'fc' or 'anytime', got {experiment!r}")
            instance = InstanceSpec.from_dict(data["instance"])
            generate_instance(instance)
            algo = data["algo"]
            algos = tuple(AlgoSpec.parse(a) for a in (algo if isinstance(algo, list) else [algo]))
            runs = data.get("runs", 100)
            if not isinstance(runs, int) or isinstance(runs, bool) or runs < 1:
                raise ConfigError(f"runs must be a positive integer, got {runs!r}")
            workers = data.get("workers", 1)
            if not isinstance(workers, int) or workers < 1:
                raise ConfigError(f"workers must be a positive integer, got {workers!r}")
            base_seed = data.get("base_seed", 0)
            if not isinstance(base_seed, int) or base_seed < 0:
                raise ConfigError(f"base_seed must be a nonnegative integer, got {base_seed!r}")
            cfg = cls(experiment=experiment, instance=instance, algos=algos,
                      epsilon=float(data.get("epsilon", 0.0)), delta=float(data.get("delta", 0.01)),
                      threshold=str(data.get("threshold", "heuristic")), runs=runs,
                      base_seed=base_seed, cap=int(data.get("cap", DEFAULT_CAP)),
                      horizon=data.get("horizon"), checkpoints=data.get("checkpoints", "log"),
                      workers=workers, out=data.get("out"),
                      eps_grid=tuple(float(e) for e in data.get("eps_grid", ())),
                      cumulative_regret=bool(data.get("cumulative_regret", False)))
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        cfg = cls.from_dict(data)
        if cfg.out is not None and not os.path.isabs(cfg.out):
            base = os.path.dirname(os.path.abspath(path))
            cfg = ExperimentConfig(**{**cfg.__dict__, "out": os.path.join(base, cfg.out)})
        return cfg

    def validate(self) -> None:
        from .sampling import ALGORITHMS
        for a in self.algos:
            if a.name not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a.name!r}")
        if not self.epsilon >= 0:
            raise ConfigError("epsilon must be nonnegative")
        if self.threshold not in Threshold.KINDS:
            raise ConfigError(f"unknown threshold {self.threshold!r}")
        try:
            self.threshold_obj()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.experiment == "fc":
            if self.cap <= self.bandit.K:
                raise ConfigError("cap must exceed K")
            for a in self.algos:
                if a.name in FIXED_BUDGET:
                    raise ConfigError(f"{a.name} cannot run in the fixed-confidence setting")
        else:
            if not isinstance(self.horizon, int) or self.horizon <= self.bandit.K:
                raise ConfigError("anytime experiments need an integer horizon > K")
            self.checkpoint_list()

    @property
    def bandit(self) -> BanditInstance:
        return generate_instance(self.instance)

    def threshold_obj(self) -> Threshold:
        return Threshold(self.threshold, self.delta, self.bandit.K)

    def checkpoint_list(self) -> list[int]:
        K, horizon = self.bandit.K, self.horizon
        cp = self.checkpoints
        if cp == "log":
            return log_checkpoints(K + 1, horizon)
        if cp == "linear":
            return linear_checkpoints(K + 1, horizon)
        if isinstance(cp, list) and cp and all(isinstance(c, int) for c in cp):
            if min(cp) <= K or max(cp) > horizon:
                raise ConfigError("checkpoints must lie in (K, horizon]")
            return sorted(set(cp))
        raise ConfigError(f"bad checkpoints {cp!r}")


def _fc_task(args) -> RunRecord:
    cfg, algo, run_id = args
    seed = cfg.base_seed + run_id
    return run_fixed_confidence(algo, cfg.bandit, cfg.epsilon, cfg.threshold_obj(), seed,
                                cfg.cap, run_id=run_id, instance_id=cfg.instance.instance_id)


def _anytime_task(args) -> tuple[str, int, int, AnytimeTrace]:
    cfg, algo, run_id = args
    seed = cfg.base_seed + run_id
    trace = run_anytime(algo, cfg.bandit, cfg.horizon, cfg.checkpoint_list(), seed,
                        cfg.epsilon, cfg.delta, cfg.cumulative_regret)
    return algo.label, run_id, seed, trace


def _execute(fn, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord] = field(default_factory=list)
    traces: dict[str, list[tuple[int, int, AnytimeTrace]]] = field(default_factory=dict)
    summary: list[dict[str, Any]] = field(default_factory=list)


def monte_carlo(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every algorithm ``cfg.runs`` times (seed ``base_seed + i`` for run ``i``)."""
    tasks = [(cfg, algo, i) for algo in cfg.algos for i in range(cfg.runs)]
    result = ExperimentResult(cfg)
    order = {a.label: k for k, a in enumerate(cfg.algos)}
    if cfg.experiment == "fc":
        records = _execute(_fc_task, tasks, cfg.workers)
        records.sort(key=lambda r: (order[r.algo], r.run_id))
        result.records = records
        result.summary = _fc_summary(cfg, records)
    else:
        outputs = _execute(_anytime_task, tasks, cfg.workers)
        outputs.sort(key=lambda o: (order[o[0]], o[1]))
        for label, run_id, seed, trace in outputs:
            result.traces.setdefault(label, []).append((run_id, seed, trace))
        result.summary = _anytime_summary(cfg, result.traces)
    if cfg.out is not None:
        persist(result, cfg.out)
    return result


def _fc_summary(cfg: ExperimentConfig, records: list[RunRecord]) -> list[dict[str, Any]]:
    lines = []
    for algo in cfg.algos:
        rows = [r for r in records if r.algo == algo.label]
        for metric, values in (("tau", [r.tau for r in rows]),
                               ("error", [0.0 if r.correct else 1.0 for r in rows]),
                               ("truncated", [1.0 if r.truncated else 0.0 for r in rows])):
            lines.append({"metric": metric, "algo": algo.label, **summarize(values)})
    return lines


def _anytime_summary(cfg: ExperimentConfig, traces) -> list[dict[str, Any]]:
    lines = []
    for algo in cfg.algos:
        runs = traces.get(algo.label, [])
        if not runs:
            continue
        marks = runs[0][2].checkpoints
        for k, t in enumerate(marks):
            regrets = [tr.regrets[k] for _, _, tr in runs]
            lines.append({"metric": "regret", "algo": algo.label, "t": t, **summarize(regrets)})
            for e, rate in zip(cfg.eps_grid, error_curve(regrets, cfg.eps_grid)):
                lines.append({"metric": "error", "algo": algo.label, "t": t, "eps": e,
                              "mean": rate, "n": len(regrets)})
    return lines


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def persist(result: ExperimentResult, out: str) -> None:
    """Write the per-run CSV and ``summary.jsonl`` into directory ``out``."""
    cfg = result.config
    path = out
    try:
        os.makedirs(out, exist_ok=True)
        if cfg.experiment == "fc":
            path = os.path.join(out, "fc_runs.csv")
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(FC_COLUMNS)
                for r in result.records:
                    row = asdict(r)
                    row["recommended"] = r.recommended + 1
                    writer.writerow([_fmt(row[c]) for c in FC_COLUMNS])
        else:
            path = os.path.join(out, "anytime_runs.csv")
            iid = cfg.instance.instance_id
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(ANYTIME_COLUMNS)
                for label, runs in result.traces.items():
                    for run_id, seed, tr in runs:
                        for t, rec, reg in zip(tr.checkpoints, tr.recommendations, tr.regrets):
                            writer.writerow([run_id, seed, label, iid, t, rec + 1, repr(reg)])
        path = os.path.join(out, "summary.jsonl")
        with open(path, "w", encoding="utf-8") as fh:
            for line in result.summary:
                fh.write(json.dumps(line, sort_keys=False) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
