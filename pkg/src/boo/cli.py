"""Command-line interface: ``boo {run,compare,ablate,validate,list-functions}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from boo.benchmarks import REGISTRY, list_functions, lookup
from boo.harness import AggregateResult, ExperimentConfig, run_experiment
from boo.optimizers import ALGORITHMS, HyperPolicy
from boo.partition import PartitionScheme

DEFAULTS = ExperimentConfig()
HYPER_DEFAULTS = HyperPolicy()

EPILOG = f"""\
defaults: func={DEFAULTS.func}, budget={DEFAULTS.budget}, repeats={DEFAULTS.repeats}, seed={DEFAULTS.seed},
eta={DEFAULTS.eta}, scheme={DEFAULTS.scheme}, hyper={HYPER_DEFAULTS.mode}, lengthscale={HYPER_DEFAULTS.lengthscale},
variance={HYPER_DEFAULTS.variance}, nu=4+(D+1)/2, refit-every={HYPER_DEFAULTS.refit_every}, n-init={DEFAULTS.n_init},
workers={DEFAULTS.workers}.

confidence schedule: beta_p = 2 log(pi^2 p^3 / (3 eta)); UCB = mu + sqrt(beta_p) sigma.
depth cap: h_max(p) = floor(sqrt(p)).
scheme "auto": BOO uses b = D, a = max(2, floor((sqrt(N)/2)^(1/D))), m = a^b;
SOO and BaMSOO use a = 2, b = 1; GP-UCB has no tree.
explicit schemes: --a A --b B, or --m M [--b B] (a = M^(1/B)); b defaults to 1.
run r uses seed = seed + r for every algorithm (matched seeds).
"""


class UsageError(Exception):
    """Bad flag combination; reported with exit status 2."""


def _algorithms(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    for name in names:
        if name not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return names


def _add_experiment_flags(p: argparse.ArgumentParser, algo_default: str | None) -> None:
    # Every default is None so that a --config file can fill gaps and flags win.
    p.add_argument("--config", help="JSON file with any subset of the experiment config; flags override it")
    p.add_argument("--func", help=f"benchmark name, one of: {', '.join(REGISTRY)}")
    if algo_default is not None:
        p.add_argument("--algo", type=_algorithms,
                       help=f"comma-separated algorithms from {{{', '.join(ALGORITHMS)}}} (default {algo_default})")
    p.add_argument("--budget", type=int, help="true objective evaluations N per run")
    p.add_argument("--repeats", type=int, help="independent runs R per algorithm")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--eta", type=float, help="confidence parameter eta in (0, 1)")
    p.add_argument("--scheme", choices=["auto"], help="'auto' (see below); overridden by --a/--b/--m")
    p.add_argument("--m", type=int, help="branch factor m = a^b")
    p.add_argument("--a", type=int, help="parts per split side")
    p.add_argument("--b", type=int, help="number of longest sides split per expansion")
    p.add_argument("--hyper", choices=["fixed", "mle"], help="kernel hyperparameters: fixed, or grid MLE refit")
    p.add_argument("--lengthscale", type=float, help="kernel lengthscale (fixed mode; initial value in mle mode)")
    p.add_argument("--variance", type=float, help="kernel variance (fixed mode; initial value in mle mode)")
    p.add_argument("--nu", type=float, help="Matern smoothness (integer or half-integer)")
    p.add_argument("--refit-every", type=int, help="evaluations between MLE refits")
    p.add_argument("--n-init", type=int, help="seeded uniform initial points before the search")
    p.add_argument("--out", help="output directory for trace CSVs and the aggregate JSON")
    p.add_argument("--workers", type=int, help="parallel runs (process pool size)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boo", description="Bayesian optimistic optimisation and baselines.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    fmt = argparse.RawDescriptionHelpFormatter
    p = sub.add_parser("run", help="run one or more algorithms", epilog=EPILOG, formatter_class=fmt)
    _add_experiment_flags(p, "boo")
    p = sub.add_parser("compare", help="run all four algorithms with matched seeds", epilog=EPILOG,
                       formatter_class=fmt)
    _add_experiment_flags(p, ",".join(ALGORITHMS))
    p = sub.add_parser("ablate", help="BOO with b=1 vs b=D, and BaMSOO, at a fixed branch factor m",
                       epilog=EPILOG, formatter_class=fmt)
    _add_experiment_flags(p, None)
    p = sub.add_parser("validate", help="fast invariant suite")
    p.add_argument("--inject-fault", choices=["flip_ucb"],
                   help="test hook: BOO selects the lowest-UCB leaf, which must fail the legality check")
    sub.add_parser("list-functions", help="list benchmark functions")
    return parser


def _scheme(args, dim: int | None):
    if args.a is None and args.m is None and args.b is None:
        return None
    if args.a is not None and args.m is not None:
        raise UsageError("give either --a or --m, not both")
    b = args.b if args.b is not None else 1
    if args.m is not None:
        try:
            s = PartitionScheme.from_branching(args.m, b)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif args.a is not None:
        s = PartitionScheme(args.a, b)
    else:
        raise UsageError("--b needs --a or --m")
    if dim is not None and s.b > dim:
        raise UsageError(f"b={s.b} exceeds the dimension D={dim}")
    return (s.a, s.b)


def experiment_config(args, algorithms: tuple[str, ...] | None = None) -> ExperimentConfig:
    """Merge defaults, the optional ``--config`` file, and explicit flags (in that order)."""
    base: dict = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    hyper = dict(base.get("hyper") or {})
    for flag, key in (("hyper", "mode"), ("lengthscale", "lengthscale"), ("variance", "variance"),
                      ("nu", "nu"), ("refit_every", "refit_every")):
        if getattr(args, flag) is not None:
            hyper[key] = getattr(args, flag)
    base["hyper"] = hyper
    for flag, key in (("func", "func"), ("budget", "budget"), ("repeats", "repeats"), ("seed", "seed"),
                      ("eta", "eta"), ("n_init", "n_init"), ("out", "out"), ("workers", "workers")):
        if getattr(args, flag) is not None:
            base[key] = getattr(args, flag)
    if algorithms is not None:
        base["algorithms"] = algorithms
    elif getattr(args, "algo", None) is not None:
        base["algorithms"] = args.algo
    func = base.get("func", DEFAULTS.func)
    try:
        dim = lookup(func).dim
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if args.scheme is not None:
        base["scheme"] = "auto"
    explicit = _scheme(args, dim)
    if explicit is not None:
        base["scheme"] = explicit
    try:
        return ExperimentConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _fmt(v: float) -> str:
    return "-inf" if math.isinf(v) and v < 0 else f"{v:.3f}"


def summary_table(result: AggregateResult, title: str | None = None) -> str:
    cfg = result.config
    lines = [] if title is None else [title]
    lines.append(f"{cfg.func}  N={cfg.budget}  R={cfg.repeats}  eta={cfg.eta}  hyper={cfg.hyper.mode}")
    lines.append(f"{'algorithm':<10} {'scheme':<12} {'runs':>4} {'median':>9} {'mean':>9} {'std':>7} {'wall s':>8}")
    dim = lookup(cfg.func).dim
    for name, s in result.algorithms.items():
        scheme = cfg.scheme_for(name, dim)
        lines.append(f"{name:<10} {str(scheme) if scheme else '-':<12} {len(s.seeds):>4} {_fmt(s.final_median):>9} "
                     f"{_fmt(s.final_mean):>9} {s.final_std:>7.3f} {s.wall:>8.1f}")
    lines.append("(final log10 simple regret)")
    return "\n".join(lines)


def cmd_run(args, algorithms=None) -> int:
    cfg = experiment_config(args, algorithms)
    result = run_experiment(cfg)
    print(summary_table(result))
    return 0


def ablation_configs(cfg: ExperimentConfig, m: int) -> list[ExperimentConfig]:
    """BOO with (a=m, b=1), BOO with (a=m^(1/D), b=D), and BaMSOO with (a=m, b=1)."""
    dim = lookup(cfg.func).dim
    try:
        full = PartitionScheme.from_branching(m, dim)
    except ValueError as exc:
        raise UsageError(f"b=D variant impossible: {exc}") from None
    line = PartitionScheme(m, 1)
    variants = [
        ("boo", line, f"{cfg.func}_ablate_boo_b1"),
        ("boo", full, f"{cfg.func}_ablate_boo_bD"),
        ("bamsoo", line, f"{cfg.func}_ablate_bamsoo_b1"),
    ]
    return [dataclasses.replace(cfg, algorithms=(algo, ), scheme=(s.a, s.b), label=label)
            for algo, s, label in variants]


def cmd_ablate(args) -> int:
    if args.m is None:
        raise UsageError("ablate needs --m")
    m, args.m, args.a, args.b = args.m, None, None, None
    cfg = experiment_config(args, ("boo",))
    for variant in ablation_configs(cfg, m):
        result = run_experiment(variant)
        print(summary_table(result, title=f"[{variant.label}] scheme {PartitionScheme(*variant.scheme)}"))
        print()
    return 0


def cmd_validate(args) -> int:
    from boo.validation import run_suite

    results = run_suite(fault=args.inject_fault)
    failed = [r.name for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_list(args) -> int:
    for name in list_functions():
        f = lookup(name)
        print(f"{name:<12} D={f.dim}  f*={f.f_star!r}  {f.note}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_run(args, algorithms=args.algo or tuple(ALGORITHMS))
        if args.command == "ablate":
            return cmd_ablate(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_list(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"boo: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"boo: {args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
