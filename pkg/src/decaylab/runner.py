"""Experiment orchestration: configs in, run directories out.

A run directory always contains config-echo.toml (the canonicalized
config), report.json, trajectory.csv, and fit_summary.json, plus one
bounds_<kind>.csv per requested envelope and optional SVG plots.  All CSV
and TOML output is deterministic for a fixed config: fixed float
formatting (repr), LF line endings, derived seeds.
"""

from __future__ import annotations

import hashlib
import json
import time
import traceback
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import bounds as bounds_mod
from . import spectral
from .config import AnalysisConfig, ConfigError, ExperimentConfig, ProblemConfig, \
    canonical_text, config_hash
from .geometry import (
    BoundaryLaw,
    admissible_epsilon,
    beta_critical,
    beta_subcritical,
    critical_epsilon_cap,
    gamma_critical,
    transformed_coefficients,
)
from .shooting import oracle_eigenvalues
from .solver import Grid, ProblemSpec, make_grid, solve_moving, step, time_points
from .stability import classify_decay, predict_regime, regime_sweep
from .svgplot import line_plot

__all__ = [
    "RunReport",
    "SuiteResult",
    "run_solve",
    "run_sweep",
    "run_eigen",
    "run_verify",
    "VERIFY_SUITES",
    "suite_seed",
]


def suite_seed(root_seed: int, name: str) -> int:
    """Per-suite seed derived deterministically from the root seed."""
    digest = hashlib.sha256(f"{root_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ----------------------------------------------------------------- datum


def _load_datum_file(path: str, L0: float) -> Callable:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            try:
                rows.append((float(cells[0]), float(cells[1])))
            except (ValueError, IndexError):
                if rows:
                    raise ConfigError(
                        f"datum file {path}: malformed row {line!r}") from None
                continue  # header row
    if len(rows) < 2:
        raise ConfigError(f"datum file {path} has fewer than 2 sample rows")
    arr = np.asarray(rows, dtype=float)
    x, v = arr[:, 0], arr[:, 1]
    if np.any(np.diff(x) <= 0) or x[0] != 0.0 or abs(x[-1] - 1.0) > 1e-12:
        raise ConfigError(
            f"datum file {path}: first column must increase from 0 to 1")
    return lambda xi: np.interp(np.asarray(xi, dtype=float) / L0, x, v)


def resolve_datum(problem: ProblemConfig, eigen_N: int = 2000) -> Callable:
    """Initial-datum callable on the physical interval (0, L0)."""
    name = problem.datum
    L0 = problem.L0
    if name == "sine":
        return lambda xi: np.sin(np.pi * np.asarray(xi, dtype=float) / L0)
    if name == "bump":
        return lambda xi: np.sin(np.pi * np.asarray(xi, dtype=float) / L0) ** 2
    if name.startswith("eigen:"):
        n = int(name.split(":", 1)[1])
        problem_e = _eigenproblem_for(problem)
        pairs = spectral.solve_eigen(
            problem_e, spectral.make_eigen_grid(problem_e, eigen_N), count=n)
        pair = pairs[n - 1]
        return lambda xi: pair(np.asarray(xi, dtype=float) / L0)
    if name.startswith("file:"):
        return _load_datum_file(name.split(":", 1)[1], L0)
    raise ConfigError(f"unknown datum selector {name!r}")


def _eigenproblem_for(problem: ProblemConfig) -> spectral.EigenProblem:
    if problem.alpha == 0.0:
        return spectral.EigenProblem(kind="selfsimilar", a=problem.a,
                                     k=problem.k, L0=problem.L0)
    return spectral.EigenProblem(kind="degenerate-critical", alpha=problem.alpha,
                                 k=problem.k, L0=problem.L0)


# ----------------------------------------------------------------- bounds


def _bound_spec(kind: str, cfg: ExperimentConfig, law: BoundaryLaw) -> bounds_mod.BoundSpec:
    p, a = cfg.problem, cfg.analysis
    rho = a.rho if a.rho is not None else p.a
    if kind == "degenerate-master":
        if p.alpha <= 0.0:
            raise ConfigError(
                "analysis.bounds: degenerate-master needs problem.alpha > 0")
        gc = gamma_critical(p.alpha)
        if abs(p.gamma - gc) <= 1e-12 * max(1.0, gc):
            eps = a.epsilon if a.epsilon is not None \
                else 0.5 * critical_epsilon_cap(p.alpha, law)
            weight = beta_critical(p.alpha, law, eps)
            t0 = a.bound_t0 if a.bound_t0 is not None else 0.0
        elif p.gamma < gc:
            if a.epsilon is not None:
                eps = a.epsilon
                t0 = a.bound_t0 if a.bound_t0 is not None else 0.0
            else:
                eps, t0 = admissible_epsilon(p.alpha, law)
                if a.bound_t0 is not None:
                    t0 = a.bound_t0
            weight = beta_subcritical(p.alpha, law, eps, t0)
        else:
            raise ConfigError(
                f"analysis.bounds: degenerate-master has no admissible weight "
                f"for gamma = {p.gamma:g} above critical {gc:g}")
        return bounds_mod.BoundSpec(kind=kind, rho=rho, law=law, alpha=p.alpha,
                                    weight=weight, t0=t0,
                                    diffusion_constant=p.a)
    if p.alpha != 0.0:
        raise ConfigError(
            f"analysis.bounds: {kind} applies only at problem.alpha = 0")
    return bounds_mod.BoundSpec(kind=kind, rho=rho, law=law,
                                diffusion_constant=p.a)


# ----------------------------------------------------------------- reports


@dataclass(eq=False)
class RunReport:
    config_hash: str
    out_dir: str
    summary: dict
    bound_reports: dict
    fit: Optional[dict]
    prediction: dict
    agree: Optional[bool]
    wall_clock_s: float
    files: list

    def to_json(self) -> str:
        payload = {
            "config_hash": self.config_hash,
            "out_dir": self.out_dir,
            "summary": self.summary,
            "bounds": self.bound_reports,
            "fit": self.fit,
            "prediction": self.prediction,
            "agree": self.agree,
            "wall_clock_s": self.wall_clock_s,
            "files": self.files,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _fit_payload(fit) -> dict:
    return {
        "tier": fit.tier,
        "rate": fit.rate,
        "exponent": fit.exponent,
        "amplitude": fit.amplitude,
        "window": list(fit.window),
        "residual": fit.residual,
        "competing": {k: (v if np.isfinite(v) else None)
                      for k, v in fit.competing.items()},
    }


def run_solve(cfg: ExperimentConfig, out_dir, *, do_classify: Optional[bool] = None,
              bound_kinds: Optional[tuple] = None) -> RunReport:
    """Solve, check bounds, classify, and write the run directory."""
    t_start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p, nm, an = cfg.problem, cfg.numerics, cfg.analysis
    law = BoundaryLaw(L0=p.L0, k=p.k, gamma=p.gamma)
    datum = resolve_datum(p)
    spec = ProblemSpec(alpha=p.alpha, law=law, initial_datum=datum,
                       diffusion_constant=p.a)
    grid = make_grid(nm.N, p.alpha, nm.grading)
    times = time_points(nm.time_grid, nm.t_max, nm.steps, law, p.alpha)
    traj = solve_moving(spec, grid, times, theta=nm.theta, drift=nm.drift,
                        stop_floor=nm.stop_floor, max_snapshots=nm.max_snapshots)
    files = []

    echo = out / "config-echo.toml"
    echo.write_text(canonical_text(cfg), encoding="utf-8", newline="\n")
    files.append(echo.name)
    traj_csv = out / "trajectory.csv"
    traj.to_csv(traj_csv)
    files.append(traj_csv.name)

    kinds = an.bounds if bound_kinds is None else bound_kinds
    bound_reports = {}
    for kind in kinds:
        bspec = _bound_spec(kind, cfg, law)
        report = bounds_mod.check_bound(traj, bspec, slack=an.slack)
        path = out / f"bounds_{kind}.csv"
        report.to_csv(path)
        files.append(path.name)
        ratios = report.ratios[np.isfinite(report.ratios)]
        bound_reports[kind] = {
            "checked": int(report.times.size),
            "violations": report.violations,
            "max_ratio": float(ratios.max()) if ratios.size else None,
        }

    prediction = predict_regime(p.alpha, p.gamma)
    pred_payload = {"tier": prediction.tier, "critical": prediction.critical}
    fit_payload = None
    agree = None
    classify = an.classify if do_classify is None else do_classify
    if classify:
        try:
            fit = classify_decay(traj.times, traj.sup_norms, k=p.k,
                                 window_decades=an.window_decades)
            fit_payload = _fit_payload(fit)
            if prediction.tier == "at-most-polynomial":
                agree = fit.tier == "polynomial"
            else:
                agree = fit.tier == prediction.tier
        except ValueError as exc:
            fit_payload = {"error": f"classification unavailable: {exc}"}
    fit_json = out / "fit_summary.json"
    fit_json.write_text(
        json.dumps({"fit": fit_payload, "prediction": pred_payload,
                    "agree": agree}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8", newline="\n")
    files.append(fit_json.name)

    if "svg" in cfg.output.formats:
        svg = out / "norms.svg"
        line_plot(svg, [(traj.times, traj.sup_norms, "sup"),
                        (traj.times, np.sqrt(traj.lengths) * traj.l2_norms, "L2"),
                        (traj.times, traj.weighted_l2, "weighted")],
                  title="norm decay", xlabel="t", ylabel="norm",
                  logx=bool(traj.times[-1] > 50 * max(traj.times[1], 1e-12)),
                  logy=True)
        files.append(svg.name)

    summary = {
        "t_final": float(traj.times[-1]),
        "steps_run": int(traj.times.size - 1),
        "sup_initial": float(traj.sup_norms[0]),
        "sup_final": float(traj.sup_norms[-1]),
        "l2_final": float(traj.l2_norms[-1]),
    }
    report = RunReport(
        config_hash=config_hash(cfg),
        out_dir=str(out),
        summary=summary,
        bound_reports=bound_reports,
        fit=fit_payload,
        prediction=pred_payload,
        agree=agree,
        wall_clock_s=time.perf_counter() - t_start,
        files=sorted(files),
    )
    (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8",
                                     newline="\n")
    return report


def run_sweep(cfg: ExperimentConfig, out_dir, workers: int = 1):
    """Regime sweep over the configured alpha x gamma lists.  Returns
    (cells, agree_count, total); the CLI maps the configured agreement
    threshold to the exit code."""
    an, nm, p = cfg.analysis, cfg.numerics, cfg.problem
    if not an.sweep_alphas or not an.sweep_gammas:
        raise ConfigError("sweep needs nonempty analysis.sweep_alphas and "
                          "analysis.sweep_gammas")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = regime_sweep(
        an.sweep_alphas, an.sweep_gammas,
        L0=p.L0, k=p.k, diffusion=p.a,
        N=nm.N, steps=nm.steps, t_max=nm.t_max, theta=nm.theta,
        drift=nm.drift, stop_floor=nm.stop_floor if nm.stop_floor > 0 else 1e-11,
        workers=workers)
    (out / "config-echo.toml").write_text(canonical_text(cfg), encoding="utf-8",
                                          newline="\n")
    import csv as _csv

    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["alpha", "gamma", "predicted_tier", "fitted_tier",
                         "rate", "exponent", "residual", "agree"])
        for c in cells:
            fit = c.fit
            writer.writerow([
                repr(float(c.alpha)),
                repr(float(c.gamma)),
                c.prediction.tier,
                c.fitted_tier,
                "" if fit is None or fit.rate is None else repr(float(fit.rate)),
                "" if fit is None or fit.exponent is None else repr(float(fit.exponent)),
                "" if fit is None else repr(float(fit.residual)),
                {True: "true", False: "false", None: "error"}[c.agree],
            ])
    agree_count = sum(1 for c in cells if c.agree)
    lines = [f"{'alpha':>6} {'gamma':>8} {'predicted':>18} {'fitted':>16} {'agree':>6}"]
    for c in cells:
        lines.append(f"{c.alpha:>6.3g} {c.gamma:>8.4g} {c.prediction.tier:>18} "
                     f"{c.fitted_tier:>16} {str(bool(c.agree)).lower():>6}")
    lines.append(f"agreement: {agree_count}/{len(cells)}")
    (out / "sweep_summary.txt").write_text("\n".join(lines) + "\n",
                                           encoding="utf-8", newline="\n")
    return cells, agree_count, len(cells)


def run_eigen(cfg: ExperimentConfig, out_dir) -> list:
    """Solve the eigenproblem matching the configured problem and export
    the pairs plus per-pair sample files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problem = _eigenproblem_for(cfg.problem)
    grid = spectral.make_eigen_grid(problem, max(cfg.numerics.N, 200))
    pairs = spectral.solve_eigen(problem, grid, count=cfg.analysis.eigen_count)
    kind = problem.kind
    spectral.export_pairs_csv(pairs, kind, out / "eigenvalues.csv",
                              sample_dir=out)
    (out / "config-echo.toml").write_text(canonical_text(cfg), encoding="utf-8",
                                          newline="\n")
    return pairs


# ----------------------------------------------------------------- verify


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    failures: int
    detail: str


def _random_nonneg_datum(rng: np.random.Generator, nodes: np.ndarray) -> np.ndarray:
    modes = rng.integers(1, 5)
    u = np.zeros_like(nodes)
    for j in range(1, modes + 1):
        u += rng.uniform(0.0, 1.0) * np.sin(j * np.pi * nodes) ** 2
    return u


def _random_case(rng: np.random.Generator):
    alpha = float(rng.uniform(0.0, 0.85))
    gamma = float(rng.uniform(-0.5, 1.2))
    law = BoundaryLaw(L0=float(rng.uniform(0.5, 2.0)),
                      k=float(rng.uniform(0.3, 2.0)), gamma=gamma)
    a = float(rng.uniform(0.5, 2.0))
    N = int(rng.integers(24, 64))
    grid = make_grid(N, alpha)
    steps = int(rng.integers(30, 80))
    t_max = float(rng.uniform(0.5, 5.0))
    times = time_points("uniform", t_max, steps, law, alpha)
    return alpha, law, a, grid, times


def verify_max_principle(seed: int, trials: int = 30, tol: float = 1e-12) -> SuiteResult:
    """Backward-Euler upwind runs with nonnegative data stay within
    [0, max u0] to solver roundoff."""
    rng = np.random.default_rng(seed)
    failures = 0
    worst = 0.0
    for _ in range(trials):
        alpha, law, a, grid, times = _random_case(rng)
        u0 = _random_nonneg_datum(rng, grid.nodes)
        spec = ProblemSpec(alpha=alpha, law=law, initial_datum=u0,
                           diffusion_constant=a)
        u = u0.copy()
        cap = float(u0.max())
        bad = False
        for i in range(times.size - 1):
            u = step(spec, grid, u, times[i], times[i + 1] - times[i],
                     theta=1.0, drift="upwind")
            under = -float(u.min())
            over = float(u.max()) - cap
            worst = max(worst, under, over)
            if under > tol * max(cap, 1.0) or over > tol * max(cap, 1.0):
                bad = True
                break
        failures += bad
    return SuiteResult("max-principle", failures == 0, trials, failures,
                       f"worst excursion {worst:.3e}")


def verify_comparison(seed: int, trials: int = 30, tol: float = 1e-12) -> SuiteResult:
    """Ordered data stay ordered under the backward-Euler upwind scheme."""
    rng = np.random.default_rng(seed)
    failures = 0
    worst = 0.0
    for _ in range(trials):
        alpha, law, a, grid, times = _random_case(rng)
        u0 = _random_nonneg_datum(rng, grid.nodes)
        v0 = u0 + _random_nonneg_datum(rng, grid.nodes)
        spec = ProblemSpec(alpha=alpha, law=law, initial_datum=u0,
                           diffusion_constant=a)
        scale = float(v0.max())
        u, v = u0.copy(), v0.copy()
        bad = False
        for i in range(times.size - 1):
            dt = times[i + 1] - times[i]
            u = step(spec, grid, u, times[i], dt, theta=1.0, drift="upwind")
            v = step(spec, grid, v, times[i], dt, theta=1.0, drift="upwind")
            gap = float((u - v).max())
            worst = max(worst, gap)
            if gap > tol * max(scale, 1.0):
                bad = True
                break
        failures += bad
    return SuiteResult("comparison", failures == 0, trials, failures,
                       f"worst ordering gap {worst:.3e}")


def verify_hardy(seed: int, trials: int = 800, slack: float = 0.02) -> SuiteResult:
    """Discrete boundary-weighted inequality across the degeneracy range:
    trials are split over alpha in {0, 0.25, 0.5, 0.75}."""
    rng = np.random.default_rng(seed)
    alphas = (0.0, 0.25, 0.5, 0.75)
    per = max(1, trials // len(alphas))
    failures = 0
    worst = 0.0
    nodes = np.linspace(0.0, 1.0, 513)
    for alpha in alphas:
        for _ in range(per):
            u = np.zeros_like(nodes)
            for j in range(1, int(rng.integers(2, 9))):
                u += rng.normal() * np.sin((j - 0.5) * np.pi * nodes)
            u += rng.uniform(-1, 1) * nodes ** rng.uniform(1.0, 2.0)
            u[0] = 0.0
            lhs, rhs = spectral.hardy_sides(u, nodes, alpha)
            ratio = lhs / rhs if rhs > 0 else np.inf
            worst = max(worst, ratio)
            failures += ratio > 1.0 + slack
    return SuiteResult("hardy", failures == 0, per * len(alphas), failures,
                       f"worst lhs/rhs {worst:.6f}")


def verify_energy_monotonicity(seed: int, trials: int = 0) -> SuiteResult:
    """The weighted energy tracked by the solver is nonincreasing on its
    home turf: any growth law for alpha = 0, the critical law for
    alpha > 0.  Fixed configs; seed unused but kept for interface parity."""
    del seed, trials
    cases = []
    for gamma in (0.0, 0.3, 0.5, 0.8):
        cases.append((0.0, gamma))
    for alpha in (0.25, 0.5, 0.75):
        cases.append((alpha, gamma_critical(alpha)))
    failures = 0
    worst = 0.0
    for alpha, gamma in cases:
        law = BoundaryLaw(L0=1.0, k=1.0, gamma=gamma)
        grid = make_grid(128, alpha)
        spec = ProblemSpec(
            alpha=alpha, law=law,
            initial_datum=lambda xi: np.sin(np.pi * xi),
            diffusion_constant=1.0)
        times = time_points("auto", 20.0, 400, law, alpha)
        traj = solve_moving(spec, grid, times, theta=1.0, drift="upwind")
        wl2 = traj.weighted_l2
        growth = float(np.max(np.diff(wl2) / wl2[0]))
        worst = max(worst, growth)
        failures += growth > 1e-8
    return SuiteResult("energy-monotonicity", failures == 0, len(cases),
                       failures, f"worst relative step growth {worst:.3e}")


def verify_eigen_oracle(seed: int, trials: int = 0, N: int = 1200,
                        rtol: float = 1e-5) -> SuiteResult:
    """Matrix pencil vs shooting, both eigenproblem kinds, first 3 modes;
    plus weighted-orthonormality of the pencil eigenvectors."""
    del seed, trials
    problems = [
        spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0),
        spectral.EigenProblem(kind="degenerate-critical", alpha=0.5, k=1.0, L0=1.0),
    ]
    failures = 0
    worst_rel = 0.0
    worst_gram = 0.0
    for problem in problems:
        grid = spectral.make_eigen_grid(problem, N)
        pairs = spectral.solve_eigen(problem, grid, count=3)
        ref = oracle_eigenvalues(problem, count=3)
        rel = np.abs(np.array([p.eigenvalue for p in pairs]) - ref) / ref
        worst_rel = max(worst_rel, float(rel.max()))
        gram = spectral.weighted_gram(problem, grid, pairs)
        gerr = float(np.abs(gram - np.eye(3)).max())
        worst_gram = max(worst_gram, gerr)
        failures += int(rel.max() > rtol) + int(gerr > 1e-10)
    return SuiteResult("eigen-oracle", failures == 0, 2 * len(problems), failures,
                       f"worst eigenvalue rel err {worst_rel:.2e}, "
                       f"worst Gram defect {worst_gram:.2e}")


def verify_bound_dominance(seed: int, trials: int = 0) -> SuiteResult:
    """Solver trajectories stay under their envelopes with 5% slack."""
    del seed, trials
    checks = 0
    failures = 0
    worst = 0.0
    # nondegenerate: critical growth, master + L2 + regime display
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=0.5)
    spec = ProblemSpec(alpha=0.0, law=law,
                       initial_datum=lambda xi: np.sin(np.pi * xi),
                       diffusion_constant=1.0)
    grid = make_grid(128, 0.0)
    times = time_points("geometric", 30.0, 600, law, 0.0)
    traj = solve_moving(spec, grid, times, theta=1.0, drift="upwind")
    for kind in ("nondeg-master", "l2-remark", "poly-critical"):
        bspec = bounds_mod.BoundSpec(kind=kind, rho=1.0, law=law)
        report = bounds_mod.check_bound(traj, bspec, slack=0.05)
        checks += 1
        failures += not report.all_satisfied
        finite = report.ratios[np.isfinite(report.ratios)]
        if finite.size:
            worst = max(worst, float(finite.max()))
    # degenerate: critical and subcritical weights (gamma = 0.1 keeps the
    # subcritical admissibility onset t0 ~ 2.9, inside the run horizon)
    for gamma_sel in ("critical", "subcritical"):
        alpha = 0.5
        gc = gamma_critical(alpha)
        law_d = BoundaryLaw(L0=1.0, k=1.0, gamma=gc if gamma_sel == "critical" else 0.1)
        if gamma_sel == "critical":
            weight = beta_critical(alpha, law_d,
                                   0.5 * critical_epsilon_cap(alpha, law_d))
            t0 = 0.0
        else:
            eps, t0 = admissible_epsilon(alpha, law_d)
            weight = beta_subcritical(alpha, law_d, eps, t0)
        spec_d = ProblemSpec(alpha=alpha, law=law_d,
                             initial_datum=lambda xi: np.sin(np.pi * xi),
                             diffusion_constant=1.0)
        grid_d = make_grid(128, alpha)
        times_d = time_points("auto", 30.0, 600, law_d, alpha)
        traj_d = solve_moving(spec_d, grid_d, times_d, theta=1.0, drift="upwind")
        bspec = bounds_mod.BoundSpec(kind="degenerate-master", rho=1.0,
                                     law=law_d, alpha=alpha, weight=weight, t0=t0)
        report = bounds_mod.check_bound(traj_d, bspec, slack=0.05)
        checks += 1
        failures += (not report.all_satisfied) or report.times.size == 0
        finite = report.ratios[np.isfinite(report.ratios)]
        if finite.size:
            worst = max(worst, float(finite.max()))
    return SuiteResult("bound-dominance", failures == 0, checks, failures,
                       f"worst norm/bound ratio {worst:.4f}")


VERIFY_SUITES = {
    "max-principle": verify_max_principle,
    "comparison": verify_comparison,
    "hardy": verify_hardy,
    "energy-monotonicity": verify_energy_monotonicity,
    "eigen-oracle": verify_eigen_oracle,
    "bound-dominance": verify_bound_dominance,
}


def run_verify(selector: str = "all", seed: int = 20260401) -> list[SuiteResult]:
    """Run one named property suite, or all of them."""
    if selector == "all":
        names = list(VERIFY_SUITES)
    elif selector in VERIFY_SUITES:
        names = [selector]
    else:
        raise ConfigError(
            f"unknown verify suite {selector!r}; valid suites: "
            f"{', '.join(sorted(VERIFY_SUITES))}, all")
    results = []
    for name in names:
        fn = VERIFY_SUITES[name]
        try:
            results.append(fn(suite_seed(seed, name)))
        except Exception:
            results.append(SuiteResult(name, False, 0, 1,
                                       "crashed:\n" + traceback.format_exc(limit=6)))
    return results
