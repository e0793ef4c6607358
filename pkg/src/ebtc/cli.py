"""Command-line entry point: ``ebtc oracle | run-fc | run-anytime | bench | hardness``.

Output is one JSON object per line with floats rendered to 12 significant
digits. Exit codes: 0 success, 2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

from .harness import (AlgoSpec, ExperimentConfig, linear_checkpoints, log_checkpoints,
                      monte_carlo, run_anytime, run_fixed_confidence)
from .instances import BanditInstance, InstanceSpec, generate_instance, parse_means
from .oracle import hardness_constants, solve_eps, solve_eps_multiplicative
from .sampling import ALGORITHMS
from .thresholds import Threshold

EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _num(x: Any) -> Any:
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(format(x, ".12g"))
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def emit(obj: Any) -> None:
    print(json.dumps(_num(obj)))


def _instance(args) -> BanditInstance:
    if args.means is not None and args.instance is not None:
        raise UsageError("give either --means or --instance, not both")
    if args.means is not None:
        return BanditInstance(parse_means(args.means), getattr(args, "family", "gaussian"))
    if args.instance is not None:
        try:
            data = json.loads(args.instance)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--instance is not valid JSON: {exc}") from None
        return generate_instance(InstanceSpec.from_dict(data))
    raise UsageError("an instance is required (--means or --instance)")


def _params(pairs: Sequence[str] | None) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {pair!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--means", help="comma-separated arm means")
    p.add_argument("--instance", help='instance spec as JSON, e.g. {"kind":"alpha","K":10,"alpha":0.3}')
    p.add_argument("--family", default="gaussian", choices=("gaussian", "bernoulli"))


def cmd_oracle(args) -> int:
    inst = _instance(args)
    if args.beta is not None and not 0.0 < args.beta < 1.0:
        raise UsageError("--beta must lie in (0, 1)")
    if args.multiplicative:
        if args.arm is not None:
            raise UsageError("--arm is not supported with --multiplicative")
        alloc = solve_eps_multiplicative(inst.means, args.eps, args.beta)
    else:
        arm = None if args.arm is None else args.arm - 1
        alloc = solve_eps(inst.means, args.eps, args.beta, arm)
    emit(alloc.to_dict())
    return 0


def cmd_hardness(args) -> int:
    inst = _instance(args)
    if not args.eps0 > 0:
        raise UsageError("--eps0 must be positive")
    h = hardness_constants(inst.means, args.eps0, args.eps_tilde)
    emit({"h_eps": h.h_eps, "h_levels": list(h.h_levels)})
    return 0


def cmd_run_fc(args) -> int:
    inst = _instance(args)
    algo = AlgoSpec(args.algo, _params(args.param))
    threshold = Threshold(args.threshold, args.delta, inst.K)
    rec = run_fixed_confidence(algo, inst, args.eps, threshold, args.seed, args.cap)
    out = dict(rec.__dict__)
    out["recommended"] = rec.recommended + 1
    emit(out)
    return 0


def cmd_run_anytime(args) -> int:
    inst = _instance(args)
    algo = AlgoSpec(args.algo, _params(args.param))
    if args.horizon <= inst.K:
        raise UsageError("--horizon must exceed the number of arms")
    if args.checkpoints == "log":
        marks = log_checkpoints(inst.K + 1, args.horizon)
    elif args.checkpoints == "linear":
        marks = linear_checkpoints(inst.K + 1, args.horizon)
    else:
        try:
            marks = [int(x) for x in args.checkpoints.split(",") if x]
        except ValueError:
            raise UsageError(f"bad --checkpoints {args.checkpoints!r}") from None
    trace = run_anytime(algo, inst, args.horizon, marks, args.seed, args.eps, args.delta)
    emit({"checkpoints": list(trace.checkpoints),
          "recommended": [r + 1 for r in trace.recommendations],
          "regret": list(trace.regrets)})
    return 0


def cmd_bench(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        print(f"ebtc: cannot read config {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    if args.workers is not None:
        data["workers"] = args.workers
    if args.out is not None:
        data["out"] = args.out
    elif isinstance(data.get("out"), str) and not os.path.isabs(data["out"]):
        # relative output paths are resolved against the config file
        data["out"] = os.path.join(os.path.dirname(os.path.abspath(args.config)), data["out"])
    if args.runs is not None:
        data["runs"] = args.runs
    cfg = ExperimentConfig.from_dict(data)
    result = monte_carlo(cfg)
    for line in result.summary:
        emit(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    names = ", ".join(ALGORITHMS)
    parser = _Parser(
        prog="ebtc",
        description="Pure-exploration bandit toolkit: allocation oracle, single runs and benchmarks.",
        epilog=f"algorithms: {names}",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("oracle", help="optimal allocation and characteristic time")
    _add_instance_flags(p)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--beta", type=float)
    p.add_argument("--arm", type=int, help="1-based reference arm (additive slack only)")
    p.add_argument("--multiplicative", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("hardness", help="closed-form complexity constants")
    _add_instance_flags(p)
    p.add_argument("--eps0", type=float, required=True)
    p.add_argument("--eps-tilde", type=float, default=0.0)
    p.set_defaults(func=cmd_hardness)

    for name, func, helptext in (("run-fc", cmd_run_fc, "one fixed-confidence run"),
                                 ("run-anytime", cmd_run_anytime, "one anytime trace")):
        p = sub.add_parser(name, help=helptext, epilog=f"algorithms: {names}")
        _add_instance_flags(p)
        p.add_argument("--algo", required=True, choices=list(ALGORITHMS), metavar="ALGO")
        p.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="algorithm parameter, e.g. eps0=0.1 or beta=0.5")
        p.add_argument("--eps", type=float, default=0.0)
        p.add_argument("--delta", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        if name == "run-fc":
            p.add_argument("--threshold", choices=Threshold.KINDS, default="heuristic")
            p.add_argument("--cap", type=int, default=10_000_000)
        else:
            p.add_argument("--horizon", type=int, required=True)
            p.add_argument("--checkpoints", default="log", help="log, linear, or a comma list")

    p = sub.add_parser("bench", help="Monte-Carlo experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--workers", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"ebtc: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # every validation error in the library derives from ValueError
        print(f"ebtc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
