"""Decay-tier classification and the predicted regime map.

The tier taxonomy: a norm history ||y(t)|| is
  exponential      <= C exp(-Ct * t**eps), eps >= 1
  subexponential   <= C exp(-Ct * t**sigma), 0 < sigma < 1
  polynomial       <= C (1+kt)**(-tau), tau > 0
classified by least squares on log||y|| against the three regressor
families over the tail window, with a dominance margin: a family wins only
if its residual is at most 0.8 times the runner-up's, otherwise the series
is declared undetermined (subexponential with sigma near 1 is empirically
indistinguishable from exponential, and refusing to guess beats
misclassifying).

The predicted map, as a function of the boundary growth exponent gamma and
the degeneracy exponent alpha (critical growth gamma_c = 1/(2-alpha)):

  alpha = 0:      gamma <= 0 exponential | 0 < gamma < 1/2 subexponential
                  | gamma >= 1/2 polynomial
  0 < alpha < 1:  gamma <= 0 exponential | 0 < gamma < gamma_c
                  subexponential | gamma = gamma_c polynomial
                  | gamma > gamma_c at-most-polynomial

where "at-most-polynomial" means sandwiched between a polynomial comparison
floor and a no-faster-than-polynomial ceiling, with no exact power pinned.
"""

from __future__ import annotations

import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import BoundaryLaw, gamma_critical
from .solver import ProblemSpec, make_grid, solve_moving, time_points

__all__ = [
    "DecayFit",
    "RegimePrediction",
    "SweepCell",
    "DecayFloor",
    "predict_regime",
    "classify_decay",
    "regime_sweep",
    "comparison_floor",
    "resolve_gamma",
]

_EXP_GRID = (1.0, 1.25, 1.5, 2.0)
_SUBEXP_GRID = tuple(np.round(np.arange(0.10, 0.925, 0.025), 3))
_MARGIN = 0.8


@dataclass(frozen=True)
class DecayFit:
    """Classified decay model.  rate is the coefficient on the regressor
    (Ct for the exponential families, tau for polynomial); exponent is eps
    or sigma, None for the polynomial and undetermined tiers."""

    tier: str
    rate: Optional[float]
    exponent: Optional[float]
    amplitude: Optional[float]
    window: tuple[float, float]
    residual: float
    competing: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.tier not in ("exponential", "subexponential", "polynomial",
                             "undetermined"):
            raise ValueError(f"unknown tier {self.tier!r}")
        if self.tier == "exponential" and not (self.exponent is not None
                                               and self.exponent >= 1.0):
            raise ValueError("exponential tier needs exponent >= 1")
        if self.tier == "subexponential" and not (self.exponent is not None
                                                  and 0.0 < self.exponent < 1.0):
            raise ValueError("subexponential tier needs exponent in (0, 1)")
        if self.tier in ("exponential", "subexponential", "polynomial"):
            if self.rate is None or not self.rate > 0:
                raise ValueError(f"{self.tier} tier needs a positive rate")


@dataclass(frozen=True)
class RegimePrediction:
    alpha: float
    gamma: float
    tier: str
    critical: bool


def predict_regime(alpha: float, gamma: float) -> RegimePrediction:
    """Predicted stability tier for boundary exponent gamma at degeneracy
    alpha."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    gc = gamma_critical(alpha)
    critical = abs(gamma - gc) <= 1e-12 * max(1.0, abs(gc))
    if gamma <= 0:
        tier = "exponential"
    elif critical:
        tier = "polynomial"
    elif gamma < gc:
        tier = "subexponential"
    elif alpha == 0.0:
        tier = "polynomial"
    else:
        tier = "at-most-polynomial"
    return RegimePrediction(alpha=alpha, gamma=gamma, tier=tier, critical=critical)


def _family_fit(logn: np.ndarray, regressor: np.ndarray):
    """LSQ of logn = c - rate * regressor; returns (rate, c, rms)."""
    A = np.stack([np.ones_like(regressor), -regressor], axis=1)
    coef, *_ = np.linalg.lstsq(A, logn, rcond=None)
    resid = logn - A @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return float(coef[1]), float(coef[0]), rms


def classify_decay(times: Sequence[float], norms: Sequence[float],
                   k: float = 1.0, window_decades: float = 2.0) -> DecayFit:
    """Fit the three decay families to (t, norm) samples and pick a tier.

    Needs at least 30 samples whose positive times span at least two
    decades; all norms must be positive.  The fit window is the final
    window_decades decades of recorded time, dropping the initial
    transient.
    """
    t = np.asarray(times, dtype=float)
    n = np.asarray(norms, dtype=float)
    if t.shape != n.shape or t.ndim != 1:
        raise ValueError("times and norms must be matching 1-d arrays")
    if t.size < 30:
        raise ValueError(f"need at least 30 samples, got {t.size}")
    if np.any(n <= 0):
        raise ValueError("norms must be positive for log-space fitting")
    pos = t > 0
    if np.count_nonzero(pos) < 30:
        raise ValueError("need at least 30 samples at positive times")
    tp, np_ = t[pos], n[pos]
    span = tp.max() / tp.min()
    if span < 10.0**window_decades * (1.0 - 1e-9):
        raise ValueError(
            f"time span covers only {np.log10(span):.2f} decades, "
            f"need {window_decades:g}")
    t_hi = tp.max()
    t_lo = t_hi / 10.0**window_decades
    sel = tp >= t_lo
    if np.count_nonzero(sel) < 30:
        # tail window too thin on this sampling; widen until populated
        order = np.argsort(tp)
        sel = np.zeros_like(sel)
        sel[order[-30:]] = True
        t_lo = tp[sel].min()
    tw, logn = tp[sel], np.log(np_[sel])

    candidates: dict[str, tuple[float, float, float, Optional[float]]] = {}
    best_exp = min((_family_fit(logn, tw**e) + (e,) for e in _EXP_GRID),
                   key=lambda r: r[2] if r[0] > 0 else np.inf)
    candidates["exponential"] = best_exp
    best_sub = min((_family_fit(logn, tw**s) + (s,) for s in _SUBEXP_GRID),
                   key=lambda r: r[2] if r[0] > 0 else np.inf)
    candidates["subexponential"] = best_sub
    rate, c0, rms = _family_fit(logn, np.log1p(k * tw))
    candidates["polynomial"] = (rate, c0, rms, None)

    rmss = {fam: (vals[2] if vals[0] > 0 else np.inf)
            for fam, vals in candidates.items()}
    ranked = sorted(rmss, key=rmss.get)
    winner, runner = ranked[0], ranked[1]
    window = (float(t_lo), float(t_hi))
    if not np.isfinite(rmss[winner]) or rmss[winner] > _MARGIN * rmss[runner]:
        return DecayFit(tier="undetermined", rate=None, exponent=None,
                        amplitude=None, window=window, residual=rmss[winner],
                        competing=rmss)
    rate, c0, rms, expo = candidates[winner]
    return DecayFit(tier=winner, rate=rate, exponent=expo,
                    amplitude=float(np.exp(c0)), window=window, residual=rms,
                    competing=rmss)


def resolve_gamma(entry, alpha: float) -> float:
    """Sweep gamma entries: a number, "crit", or "<factor>*crit"."""
    if isinstance(entry, (int, float)):
        return float(entry)
    text = str(entry).strip()
    if text == "crit":
        return gamma_critical(alpha)
    if text.endswith("*crit"):
        return float(text[:-5]) * gamma_critical(alpha)
    return float(text)


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    gamma: float
    prediction: RegimePrediction
    fit: Optional[DecayFit]
    agree: Optional[bool]
    error: Optional[str] = None

    @property
    def fitted_tier(self) -> str:
        return self.fit.tier if self.fit is not None else "error"


def _tiers_agree(predicted: str, fitted: str) -> bool:
    if predicted == "at-most-polynomial":
        return fitted == "polynomial"
    return predicted == fitted


def _sine_datum(xi, L0):
    return np.sin(np.pi * np.asarray(xi, dtype=float) / L0)


def _sweep_worker(job: dict) -> dict:
    """One sweep cell, self-contained and picklable."""
    try:
        alpha, gamma = job["alpha"], job["gamma"]
        law = BoundaryLaw(L0=job["L0"], k=job["k"], gamma=gamma)
        spec = ProblemSpec(
            alpha=alpha, law=law,
            initial_datum=lambda xi: _sine_datum(xi, job["L0"]),
            diffusion_constant=job["diffusion"])
        grid = make_grid(job["N"], alpha)
        times = time_points("auto", job["t_max"], job["steps"], law, alpha)
        traj = solve_moving(spec, grid, times, theta=job["theta"],
                            drift=job["drift"], stop_floor=job["stop_floor"])
        fit = classify_decay(traj.times, traj.sup_norms, k=job["k"])
        return {"fit": fit, "error": None}
    except Exception:
        return {"fit": None, "error": traceback.format_exc(limit=8)}


def regime_sweep(alphas: Sequence[float], gammas: Sequence, *,
                 L0: float = 1.0, k: float = 1.0, diffusion: float = 1.0,
                 N: int = 256, steps: int = 4000, t_max: float = 2000.0,
                 theta: float = 1.0, drift: str = "upwind",
                 stop_floor: float = 1e-11, workers: int = 1) -> list[SweepCell]:
    """Run solver + classifier on the alpha x gamma grid and compare each
    fitted tier against the predicted one.

    gammas entries may be numbers or the strings "crit" / "<f>*crit",
    resolved against each alpha's critical exponent.  Cell failures are
    isolated: an exception inside one cell is recorded on its SweepCell and
    the sweep completes.  The predicted tier "at-most-polynomial" counts as
    agreeing when the fitted tier is polynomial (floor/ceiling sandwich).
    """
    cells_in = []
    for alpha in alphas:
        for gentry in gammas:
            gamma = resolve_gamma(gentry, alpha)
            job = dict(alpha=float(alpha), gamma=gamma, L0=L0, k=k,
                       diffusion=diffusion, N=N, steps=steps, t_max=t_max,
                       theta=theta, drift=drift, stop_floor=stop_floor)
            cells_in.append(job)
    if workers > 1 and len(cells_in) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_worker, cells_in))
    else:
        outcomes = [_sweep_worker(job) for job in cells_in]
    cells = []
    for job, out in zip(cells_in, outcomes):
        pred = predict_regime(job["alpha"], job["gamma"])
        fit = out["fit"]
        agree = None if fit is None else _tiers_agree(pred.tier, fit.tier)
        cells.append(SweepCell(alpha=job["alpha"], gamma=job["gamma"],
                               prediction=pred, fit=fit, agree=agree,
                               error=out["error"]))
    return cells


@dataclass(frozen=True, eq=False)
class DecayFloor:
    """Certified lower envelope (1+kt)**(-power) * amplitude for solutions
    whose datum dominates |phi_n|.

    norm_kind says which trajectory norm the floor constrains: the sup norm
    for alpha = 0, the physical L2 norm for alpha > 0 (where the envelope's
    own physical L2 even grows a factor sqrt(l_crit(t)) on top of this
    amplitude, so the floor is conservative).
    """

    alpha: float
    gamma: float
    n: int
    k: float
    power: float
    amplitude: float
    norm_kind: str
    pair: object

    def __call__(self, t):
        decay = np.exp(-self.power * np.log1p(self.k * np.asarray(t, dtype=float)))
        out = self.amplitude * decay
        return float(out) if out.ndim == 0 else out


def comparison_floor(alpha: float, gamma: float, n: int = 1, *, a: float = 1.0,
                     k: float = 1.0, L0: float = 1.0, N: int = 2000) -> DecayFloor:
    """Polynomial lower envelope for super-critical boundary growth.

    Valid for gamma above the critical exponent: the domain then contains
    the critically growing one, so by comparison the solution with datum
    >= |phi_n| stays above the exact separable solution of the critical
    problem, whose norm is exactly (1+kt)**(-power) times the mode norm.
    """
    from .spectral import EigenProblem, make_eigen_grid, solve_eigen

    gc = gamma_critical(alpha)
    if not gamma > gc + 1e-12:
        raise ValueError(
            f"comparison floor needs gamma > {gc:.6g} (critical), got {gamma}")
    if alpha == 0.0:
        problem = EigenProblem(kind="selfsimilar", a=a, k=k, L0=L0)
    else:
        problem = EigenProblem(kind="degenerate-critical", alpha=alpha, k=k, L0=L0)
    pairs = solve_eigen(problem, make_eigen_grid(problem, N), count=n)
    pair = pairs[n - 1]
    if alpha == 0.0:
        power = pair.eigenvalue
        amplitude = pair.sup_norm
        norm_kind = "sup"
    else:
        power = pair.eigenvalue / k
        amplitude = pair.l2_norm
        norm_kind = "l2"
    return DecayFloor(alpha=alpha, gamma=gamma, n=n, k=k, power=power,
                      amplitude=amplitude, norm_kind=norm_kind, pair=pair)
