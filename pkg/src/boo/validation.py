"""Fast invariant suite behind ``boo validate``.

Each check returns ``(ok, detail)``. ``fault="flip_ucb"`` makes the BOO runs
select the lowest-UCB leaf, which the expansion-legality check must catch.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from boo import gp
from boo.benchmarks import lookup
from boo.kernel import MaternParams, cross_covariance, gram, matern_bessel, matern_closed_form
from boo.optimizers import (
    RunConfig,
    check_budget,
    check_depth_cap,
    check_expansion_legality,
    check_gates,
    make_optimizer,
    run_bamsoo,
    run_boo,
    run_soo,
)
from boo.partition import PartitionScheme, Tree, half_diagonal_bound, side_length_bounds


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def check_kernel_psd(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for nu in (0.5, 2.5, 6.0, 6.5):
        for dim in (1, 3):
            params = MaternParams(nu, 0.3, 2.0)
            lo = np.linalg.eigvalsh(gram(params, rng.uniform(size=(50, dim)))).min() / params.variance
            worst = min(worst, lo)
    return worst >= -1e-8, f"min eigenvalue / variance = {worst:.3e}"


def check_kernel_paths() -> tuple[bool, str]:
    z = np.logspace(-6, 1, 200)
    worst = 0.0
    for nu in (0.5, 1.5, 2.5, 3.5, 4.5, 5.5):
        closed, bessel = matern_closed_form(nu, z), matern_bessel(nu, z)
        worst = max(worst, float(np.max(np.abs(closed - bessel) / np.abs(bessel))))
    return worst <= 1e-8, f"max relative gap {worst:.2e}"


MAX_CONDITION = 1e8


def random_dataset(rng, n_max: int = 50, d_max: int = 4):
    """Random GP problem whose Gram matrix has condition number at most ``MAX_CONDITION``.

    Beyond that a dense direct solve is itself too inaccurate to serve as an
    oracle at 1e-8; ill-conditioned draws are redrawn.
    """
    while True:
        n, dim = int(rng.integers(1, n_max + 1)), int(rng.integers(1, d_max + 1))
        nu = float(rng.choice([2.5, 6.0]))
        params = MaternParams(nu, float(rng.uniform(0.02, 0.5)), float(rng.uniform(0.5, 2.0)))
        X = rng.uniform(size=(n, dim))
        if np.linalg.cond(gram(params, X)) <= MAX_CONDITION:
            return params, gp.ObservationSet(X, rng.normal(size=n)), rng.uniform(size=(20, dim))


def dense_posterior(params, data, Xq):
    """Direct-solve posterior, the oracle for the Cholesky path."""
    K = gram(params, data.points)
    Ks = cross_covariance(params, data.points, Xq)
    mean = Ks.T @ np.linalg.solve(K, data.values)
    var = params.variance - np.einsum("ij,ij->j", Ks, np.linalg.solve(K, Ks))
    return mean, var


def check_gp_oracle(n_sets: int = 20, seed: int = 1) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst_mean = worst_var = 0.0
    for _ in range(n_sets):
        params, data, Xq = random_dataset(rng)
        model = gp.fit(params, data)
        mean, std = model.predict(Xq)
        ref_mean, ref_var = dense_posterior(params, data, Xq)
        scale = 1.0 + np.abs(ref_mean)
        worst_mean = max(worst_mean, float(np.max(np.abs(mean - ref_mean) / scale)))
        worst_var = max(worst_var, float(np.max(np.abs(std**2 - np.maximum(ref_var, 0.0))) / params.variance))
    ok = worst_mean <= 1e-8 and worst_var <= 1e-8
    return ok, f"mean gap {worst_mean:.2e}, variance gap {worst_var:.2e}"


def check_interpolation(n_sets: int = 20, seed: int = 1) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst_mu = worst_sd = 0.0
    for _ in range(n_sets):
        params, data, _ = random_dataset(rng)
        mean, std = gp.fit(params, data).predict(data.points)
        tol = 1.0 + np.max(np.abs(data.values))
        worst_mu = max(worst_mu, float(np.max(np.abs(mean - data.values)) / tol))
        worst_sd = max(worst_sd, float(np.max(std)))
    return worst_mu <= 1e-6 and worst_sd <= 1e-4, f"|mu - y| / (1 + max|y|) {worst_mu:.2e}, max sigma {worst_sd:.2e}"


def check_cell_geometry(n_expansions: int = 1000, seed: int = 2) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = 0
    per = n_expansions // 16
    for dim in (1, 2, 3, 4):
        for a, b in ((2, 1), (2, dim), (3, 2), (4, dim)):
            if b > dim:
                continue
            scheme = PartitionScheme(a, b)
            tree = Tree(dim)
            for _ in range(per):
                leaves = list(tree.leaves())
                leaf = leaves[int(rng.integers(len(leaves)))]
                for kid in tree.expand(leaf.key, scheme):
                    longest, smallest = side_length_bounds(scheme, kid.depth, dim)
                    bad += kid.sides.max() > longest + 1e-12
                    bad += kid.sides.min() < smallest - 1e-12
                    bad += kid.half_diagonal() > half_diagonal_bound(scheme, kid.depth, dim) + 1e-12
    return bad == 0, f"{bad} bound violations"


def check_budget_accounting() -> tuple[bool, str]:
    f = lookup("quadratic2d")
    problems = []
    tr = run_boo(f, RunConfig(budget=50, scheme=PartitionScheme(2, 2)))
    if tr.n_evals != 50 or len(tr.expansions) != 50:
        problems.append(f"BOO: {tr.n_evals} evaluations, {len(tr.expansions)} expansions")
    for m in (2, 8):
        scheme = PartitionScheme(m, 1)
        tr = run_soo(f, RunConfig(budget=50, scheme=scheme))
        if any(e.n_evals != m for e in tr.expansions) or len(tr.expansions) > 50 // m + 1:
            problems.append(f"SOO m={m}: per-expansion counts {sorted({e.n_evals for e in tr.expansions})}")
        problems += check_budget(tr, 50)
    tr = run_bamsoo(f, RunConfig(budget=50))
    if any(not 0 <= e.n_evals <= 2 for e in tr.expansions):
        problems.append("BaMSOO: per-expansion evaluations outside [0, m]")
    problems += check_gates(tr)
    return not problems, "; ".join(problems) or "exact"


def check_determinism() -> tuple[bool, str]:
    from boo.harness import trace_csv

    f = lookup("hartmann3")
    mismatched = []
    for algo in ("boo", "soo", "bamsoo", "gp_ucb"):
        cfg = RunConfig(budget=15, seed=3, n_init=2 if algo != "soo" else 0)
        a = trace_csv(make_optimizer(algo, f, cfg).run(f), f.f_star)
        b = trace_csv(make_optimizer(algo, f, cfg).run(f), f.f_star)
        if a != b:
            mismatched.append(algo)
    return not mismatched, f"differing traces: {mismatched}" if mismatched else "byte-identical"


def check_ask_tell(steps: int = 50) -> tuple[bool, str]:
    f = lookup("quadratic2d")
    mismatched = []
    for algo in ("boo", "soo", "bamsoo", "gp_ucb"):
        cfg = RunConfig(budget=steps, seed=5)
        ref = make_optimizer(algo, f, cfg).run(f)
        opt = make_optimizer(algo, f, cfg)
        while not opt.finished:
            x = opt.ask()
            opt.tell(x, f(x))
        same = [r.x_raw.tobytes() for r in ref.records] == [r.x_raw.tobytes() for r in opt.trace.records]
        if not same:
            mismatched.append(algo)
    return not mismatched, f"diverged: {mismatched}" if mismatched else f"identical for {steps} steps"


def check_tree_invariants(fault: str | None = None) -> tuple[bool, str]:
    problems = []
    for name, budget in (("quadratic2d", 60), ("hartmann3", 60)):
        f = lookup(name)
        tr = run_boo(f, RunConfig(budget=budget, fault=fault))
        problems += check_depth_cap(tr) + check_expansion_legality(tr)
        tr = run_soo(f, RunConfig(budget=budget))
        problems += check_depth_cap(tr) + check_expansion_legality(tr)
        tr = run_bamsoo(f, RunConfig(budget=budget))
        problems += check_depth_cap(tr) + check_expansion_legality(tr) + check_gates(tr)
    detail = f"{len(problems)} violations" + (f", first: {problems[0]}" if problems else "")
    return not problems, detail


def suite(fault: str | None = None) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    return [
        ("kernel PSD", check_kernel_psd),
        ("kernel closed form vs Bessel", check_kernel_paths),
        ("GP oracle equivalence", check_gp_oracle),
        ("GP noiseless interpolation", check_interpolation),
        ("cell side and diagonal bounds", check_cell_geometry),
        ("budget accounting", check_budget_accounting),
        ("determinism", check_determinism),
        ("ask/tell equivalence", check_ask_tell),
        ("depth cap and expansion legality", lambda: check_tree_invariants(fault)),
    ]


def run_suite(fault: str | None = None, echo: Callable[[str], None] | None = print) -> list[CheckResult]:
    results = []
    for name, check in suite(fault):
        t0 = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - t0)
        results.append(res)
        if echo is not None:
            echo(f"{'PASS' if res.ok else 'FAIL'}  {name}: {detail} ({res.seconds:.1f}s)")
    return results
