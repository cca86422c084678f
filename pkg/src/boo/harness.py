"""Multi-seed experiments: run, persist per-run traces, aggregate log-regret curves.

Run ``r`` of every algorithm uses seed ``base_seed + r`` (matched seeds). Each
run writes one CSV trace; each experiment writes one aggregate JSON holding
the config echo, per-evaluation mean/std of log10 regret, and final summaries.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from boo.benchmarks import Objective, lookup
from boo.optimizers import ALGORITHMS, HyperPolicy, RegretTrace, RunConfig, make_optimizer, simple_regret
from boo.partition import PartitionScheme

NEG_INF = "-inf"
BASELINE_SCHEME = PartitionScheme(2, 1)


def resolve_auto_scheme(budget: int, dim: int) -> PartitionScheme:
    """``b = D``, ``a = max(2, floor((sqrt(N)/2)**(1/D)))``."""
    return PartitionScheme.auto(budget, dim)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: every algorithm in ``algorithms`` run ``repeats`` times.

    ``scheme`` is ``"auto"`` or an ``(a, b)`` pair. ``"auto"`` means the
    budget-driven scheme for BOO and ``(2, 1)`` for SOO and BaMSOO; GP-UCB
    ignores it. ``label`` names the output files (defaults to ``func``).
    """

    func: str = "hartmann3"
    algorithms: tuple[str, ...] = ("boo",)
    budget: int = 200
    repeats: int = 15
    seed: int = 0
    eta: float = 0.05
    scheme: str | tuple[int, int] = "auto"
    hyper: HyperPolicy = field(default_factory=HyperPolicy)
    n_init: int = 0
    out: str | None = None
    workers: int = 1
    label: str | None = None

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {name!r}; available: {', '.join(ALGORITHMS)}")
        if self.scheme != "auto":
            a, b = self.scheme
            object.__setattr__(self, "scheme", (int(a), int(b)))
            PartitionScheme(a, b)
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        # Validate the remaining run settings eagerly.
        RunConfig(budget=self.budget, eta=self.eta, n_init=self.n_init, hyper=self.hyper)

    @property
    def name(self) -> str:
        return self.label or self.func

    def scheme_for(self, algorithm: str, dim: int) -> PartitionScheme | None:
        if algorithm == "gp_ucb":
            return None
        if self.scheme == "auto":
            return resolve_auto_scheme(self.budget, dim) if algorithm == "boo" else BASELINE_SCHEME
        return PartitionScheme(*self.scheme).validate(dim)

    def run_config(self, algorithm: str, dim: int, repeat: int) -> RunConfig:
        return RunConfig(
            budget=self.budget, scheme=self.scheme_for(algorithm, dim), eta=self.eta,
            n_init=self.n_init, seed=self.seed + repeat, hyper=self.hyper,
        )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["algorithms"] = list(self.algorithms)
        d["scheme"] = "auto" if self.scheme == "auto" else list(self.scheme)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "hyper" in d and isinstance(d["hyper"], dict):
            d["hyper"] = HyperPolicy(**d["hyper"])
        if "algorithms" in d:
            d["algorithms"] = tuple(d["algorithms"])
        if "scheme" in d and d["scheme"] != "auto":
            d["scheme"] = tuple(d["scheme"])
        return cls(**d)


@dataclass
class RunResult:
    algorithm: str
    seed: int
    trace: RegretTrace | None
    wall: float
    error: str | None = None


@dataclass
class AlgorithmSummary:
    mean: np.ndarray  # mean log10 regret after i true evaluations
    std: np.ndarray
    final_median: float
    final_mean: float
    final_std: float
    seeds: list[int]
    failed_seeds: list[int]
    wall: float


@dataclass
class AggregateResult:
    config: ExperimentConfig
    algorithms: dict[str, AlgorithmSummary]
    wall: float
    runs: list[RunResult] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "algorithms": {
                name: {
                    "mean_log10_regret": [_num(v) for v in s.mean],
                    "std_log10_regret": [_num(v) for v in s.std],
                    "final": {"median": _num(s.final_median), "mean": _num(s.final_mean), "std": _num(s.final_std)},
                    "seeds": s.seeds,
                    "failed_seeds": s.failed_seeds,
                    "wall_clock": s.wall,
                }
                for name, s in self.algorithms.items()
            },
            "wall_clock": self.wall,
        }


def _num(v: float) -> float | str:
    """JSON-safe float: infinities and NaN become explicit strings."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return NEG_INF if v < 0 else "inf"
    return v


def _fmt(v: float) -> str:
    if math.isinf(v) and v < 0:
        return NEG_INF
    return repr(float(v))


def trace_csv(trace: RegretTrace, f_star: float) -> str:
    """CSV text for one run: one row per record, memo hits included and flagged."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eval", *(f"x_{d}" for d in range(trace.dim)), "value", "best", "regret",
                "log10_regret", "expansion", "depth", "memo_hit"])
    for r in trace.records:
        regret = f_star - r.best
        log_r = math.log10(regret) if regret > 0 else -math.inf
        w.writerow([r.eval, *(_fmt(v) for v in r.x_raw), _fmt(r.value), _fmt(r.best), _fmt(regret),
                    _fmt(log_r), r.expansion, r.depth, int(r.memo_hit)])
    return buf.getvalue()


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Columns of a trace file as float arrays (``-inf`` sentinel decoded)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(row[k]) for row in rows]) for k in (rows[0] if rows else {})}


def regret_curve(trace: RegretTrace, f_star: float, budget: int) -> np.ndarray:
    """log10 regret after each of ``budget`` true evaluations.

    A run that stopped early is padded with its final value; a run with no
    evaluations at all is rejected.
    """
    _, log_r = simple_regret(trace, f_star)
    if log_r.size >= budget:
        return log_r[:budget]
    return np.concatenate([log_r, np.full(budget - log_r.size, log_r[-1])])


def _run_single(objective: Objective | str, algorithm: str, config: RunConfig) -> RunResult:
    t0 = time.perf_counter()
    try:
        if isinstance(objective, str):  # registry name, resolved inside the worker
            objective = lookup(objective)
        trace = make_optimizer(algorithm, objective, config).run(objective)
    except Exception as exc:  # recorded per run, surfaced in the aggregate
        return RunResult(algorithm, config.seed, None, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}")
    return RunResult(algorithm, config.seed, trace, time.perf_counter() - t0)


def _mean_std(curves: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with warnings.catch_warnings(), np.errstate(invalid="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        return curves.mean(axis=0), curves.std(axis=0)


def aggregate(cfg: ExperimentConfig, objective: Objective, runs: list[RunResult], wall: float) -> AggregateResult:
    summaries = {}
    for algorithm in cfg.algorithms:
        mine = [r for r in runs if r.algorithm == algorithm]
        ok = [r for r in mine if r.trace is not None and r.trace.n_evals > 0]
        failed = [r.seed for r in mine if r not in ok]
        if failed:
            warnings.warn(f"{algorithm}: {len(failed)} of {len(mine)} runs failed (seeds {failed})", stacklevel=2)
        if ok:
            curves = np.array([regret_curve(r.trace, objective.f_star, cfg.budget + cfg.n_init) for r in ok])
            mean, std = _mean_std(curves)
            final = curves[:, -1]
            f_mean, f_std = _mean_std(final[:, None])
            summaries[algorithm] = AlgorithmSummary(
                mean=mean, std=std, final_median=float(np.median(final)),
                final_mean=float(f_mean[0]), final_std=float(f_std[0]),
                seeds=[r.seed for r in ok], failed_seeds=failed, wall=sum(r.wall for r in mine),
            )
        else:
            nan = np.full(cfg.budget + cfg.n_init, np.nan)
            summaries[algorithm] = AlgorithmSummary(nan, nan, math.nan, math.nan, math.nan, [], failed,
                                                    sum(r.wall for r in mine))
    return AggregateResult(cfg, summaries, wall, runs)


def run_experiment(cfg: ExperimentConfig, objective: Objective | None = None) -> AggregateResult:
    """Run every (algorithm, repeat) pair, write traces and the aggregate, return the aggregate.

    Runs are independent; with ``workers > 1`` they execute in a process pool
    and are collected in submission order, so results do not depend on
    scheduling. Raises ``RuntimeError`` if every run failed. ``objective``
    overrides the registry lookup of ``cfg.func``.
    """
    registered = objective is None
    objective = lookup(cfg.func) if registered else objective
    jobs = [(objective, algorithm, cfg.run_config(algorithm, objective.dim, r))
            for algorithm in cfg.algorithms for r in range(cfg.repeats)]
    t0 = time.perf_counter()
    if cfg.workers > 1 and len(jobs) > 1:
        # Registry objectives travel by name; a custom objective must be picklable.
        if registered:
            jobs = [(cfg.func, *job[1:]) for job in jobs]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_run_single, *job) for job in jobs]
            runs = [f.result() for f in futures]
    else:
        runs = [_run_single(*job) for job in jobs]
    wall = time.perf_counter() - t0
    if all(r.trace is None for r in runs):
        raise RuntimeError(f"all {len(runs)} runs failed; first error: {runs[0].error}")
    result = aggregate(cfg, objective, runs, wall)
    if cfg.out is not None:
        write_outputs(result, objective, cfg.out)
    return result


def trace_path(out: str | Path, cfg: ExperimentConfig, algorithm: str, seed: int) -> Path:
    return Path(out) / f"{cfg.name}_{algorithm}_seed{seed}.csv"


def aggregate_path(out: str | Path, cfg: ExperimentConfig) -> Path:
    return Path(out) / f"{cfg.name}_aggregate.json"


def write_outputs(result: AggregateResult, objective: Objective, out: str | Path) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    for r in result.runs:
        if r.trace is not None:
            trace_path(out, cfg, r.algorithm, r.seed).write_text(trace_csv(r.trace, objective.f_star))
    payload = result.to_dict()
    payload["failures"] = [{"algorithm": r.algorithm, "seed": r.seed, "error": r.error}
                           for r in result.runs if r.error is not None]
    aggregate_path(out, cfg).write_text(json.dumps(payload, indent=2) + "\n")
