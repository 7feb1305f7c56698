"""Closed-form decay bounds for the moving-interval problem, evaluated as
certified upper envelopes for computed trajectories.

Every envelope here descends from one master estimate: the sup norm at time
T is at most the initial L2 norm times J(T)**(-1/2), where

    J(T) = integral_0^T rho * exp(rho * aw(t)) / l(t) dt,

aw(t) the running integral of l**-2 and rho the ellipticity floor.  The
regime envelopes (exponential, subexponential, polynomial) are relaxations
of J obtained by dropping provably smaller terms, so each carries a
validity threshold t0 below which the dropped term is not yet dominated.
The degenerate counterpart swaps J for a weighted-in-time integral of the
diffusion scale p(t) against an admissible exponential weight beta.

Evaluation is done in log space throughout: exp(rho*aw(T)) overflows for
fast-shrinking boundaries long before the bound itself leaves the float
range.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .geometry import (
    BoundaryLaw,
    CoefficientSchedule,
    WeightFunction,
    admissibility_margin,
    alpha_weight,
    critical_epsilon_cap,
    gamma_critical,
    transformed_coefficients,
)

__all__ = [
    "BoundSpec",
    "BoundReport",
    "master_bound_nondegenerate",
    "l2_bound",
    "regime_bound",
    "regime_threshold",
    "master_bound_degenerate",
    "evaluate_bound",
    "check_bound",
]

_KINDS = (
    "nondeg-master",
    "l2-remark",
    "exp-regime",
    "subexp-regime",
    "poly-critical",
    "cauchy-kernel",
    "degenerate-master",
)


@dataclass(frozen=True)
class BoundSpec:
    """Which envelope to evaluate, with its parameters.

    norm_y0 is the anchor norm: physical L2 of the datum for the
    nondegenerate kinds, weighted L2 at time t0 for degenerate-master.
    Leave it None to let check_bound read the anchor off the trajectory.
    norm_z0_l1 (physical L1 of the datum) is only consumed by the
    cauchy-kernel envelope.
    """

    kind: str
    rho: float
    law: BoundaryLaw
    alpha: float = 0.0
    norm_y0: Optional[float] = None
    norm_z0_l1: Optional[float] = None
    weight: Optional[WeightFunction] = None
    t0: float = 0.0
    diffusion_constant: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}")
        if not self.rho > 0:
            raise ValueError("ellipticity floor rho must be positive")
        if self.norm_y0 is not None and self.norm_y0 < 0:
            raise ValueError("anchor norm must be nonnegative")
        if self.t0 < 0:
            raise ValueError("t0 must be nonnegative")
        if self.kind == "degenerate-master":
            if not (0.0 < self.alpha < 1.0):
                raise ValueError("degenerate-master needs 0 < alpha < 1")
            if self.weight is None or not self.weight.kind.startswith("beta-"):
                raise ValueError("degenerate-master needs a beta weight")
            if self.weight.alpha != self.alpha:
                raise ValueError("weight alpha disagrees with bound alpha")
        elif self.alpha != 0.0:
            raise ValueError(f"{self.kind} applies to the nondegenerate case only")


def _alpha_inverse(law: BoundaryLaw, value: float) -> float:
    """The time T with aw(T) = value (aw strictly increasing from 0)."""
    if value < 0:
        raise ValueError("the time weight is nonnegative")
    m = 1.0 - 2.0 * law.gamma
    c = law.L0**2 * law.k
    if abs(m) < 1e-12:
        return math.expm1(c * value) / law.k
    arg = c * m * value
    if arg <= -1.0:
        raise ValueError("value exceeds the finite limit of the time weight")
    return math.expm1(math.log1p(arg) / m) / law.k


def _master_quadrature(rho: float, law: BoundaryLaw, T: float):
    """log J(T) with J = integral_0^T rho*exp(rho*aw)/l dt, evaluated as
    exp(rho*aw(T)) * Jt with the well-scaled remainder

        Jt = integral_0^A rho * exp(-rho*tau) * l(t(A - tau)) dtau,

    A = aw(T), via the substitution tau = aw(T) - aw(t).  Returns
    (log J, Jt)."""
    A = alpha_weight(law, T)
    cut = min(A, 80.0 / rho)

    def integrand(tau):
        aw = A - tau
        return rho * math.exp(-rho * tau) * law.length(
            _alpha_inverse(law, aw if aw > 0.0 else 0.0))

    scale = min(1.0 / rho, cut)
    pts = sorted({p for p in
                  [cut * f for f in (1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.6)]
                  + [scale * f for f in (0.25, 0.5, 1.0, 2.0, 5.0)]
                  if 0.0 < p < cut})
    val, err = quad(integrand, 0.0, cut, points=pts or None,
                    epsabs=0.0, epsrel=1e-11, limit=300)
    if not np.isfinite(val) or val <= 0 or err > 1e-8 * val:
        raise RuntimeError(
            f"master-bound quadrature did not converge (value {val}, error {err})")
    return rho * A + math.log(val), val


def master_bound_nondegenerate(rho: float, law: BoundaryLaw, norm_y0: float,
                               T: float) -> float:
    """norm_y0 * J(T)**(-1/2) with J by adaptive quadrature (1e-10 relative)."""
    if not T > 0:
        raise ValueError("T must be positive")
    if not rho > 0:
        raise ValueError("rho must be positive")
    if norm_y0 < 0:
        raise ValueError("norm_y0 must be nonnegative")
    logJ, _ = _master_quadrature(rho, law, T)
    return norm_y0 * _safe_exp(-0.5 * logJ)


def _safe_exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


def l2_bound(rho: float, law: BoundaryLaw, norm_y0: float, T: float) -> float:
    """exp(-(rho/2) * aw(T)) * norm_y0, the plain L2 contraction envelope."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    if not rho > 0:
        raise ValueError("rho must be positive")
    return norm_y0 * _safe_exp(-0.5 * rho * alpha_weight(law, T))


@lru_cache(maxsize=256)
def _threshold_exp(rho: float, law: BoundaryLaw) -> float:
    """Validity onset for the exponential display.

    The relaxation drops a -1 against exp(rho*aw(T)), valid once that
    factor reaches 2.  For shrinking boundaries (gamma < 0) the display
    also trades aw(T) for its linear minorant, which costs a further
    stretch: past the base point, scan for the first T where the display
    actually dominates the quadrature master bound, which is the exact
    meaning of the case's "sufficiently large T"."""
    t_base = _alpha_inverse(law, math.log(2.0) / rho)
    if law.gamma == 0.0:
        return t_base

    def surplus(T):
        logJ, _ = _master_quadrature(rho, law, T)
        log_display = 0.5 * math.log(2.0 / (law.L0 * (1.0 - 2.0 * law.gamma))) \
            - 0.5 * rho * T / (law.L0**2 * (1.0 - 2.0 * law.gamma))
        return log_display + 0.5 * logJ

    hi = t_base
    for _ in range(200):
        if surplus(hi) >= 0:
            break
        hi *= 1.3
    else:
        raise RuntimeError("exponential display never dominated the master bound")
    if hi == t_base:
        return t_base
    return brentq(surplus, hi / 1.3, hi, xtol=1e-10, rtol=1e-12)


@lru_cache(maxsize=256)
def _threshold_subexp(rho: float, law: BoundaryLaw) -> float:
    """Smallest T with aw(T) >= T**(1-2g) / (2 L0^2 (1-2g) k^(2g)), i.e.
    (1+kT)**(1-2g) - 1 >= 0.5 (kT)**(1-2g), located by scan plus root
    refinement; combined with the exp(rho*aw) >= 2 onset shared by every
    relaxation of the master bound."""
    g = law.gamma
    k = law.k
    e = 1.0 - 2.0 * g

    def gap(T):
        return math.expm1(e * math.log1p(k * T)) - 0.5 * (k * T) ** e

    hi = 1.0 / k
    for _ in range(200):
        if gap(hi) >= 0:
            break
        hi *= 1.5
    else:
        raise RuntimeError("subexponential threshold scan failed")
    lo = hi / 1.5
    while gap(lo) >= 0 and lo > 1e-12 / k:
        hi = lo
        lo /= 1.5
    t_grid = brentq(gap, lo, hi, xtol=1e-10, rtol=1e-12) if gap(lo) < 0 else lo
    return max(t_grid, _alpha_inverse(law, math.log(2.0) / rho))


def regime_threshold(rho: float, law: BoundaryLaw) -> tuple[str, float]:
    """(tier, t0): the regime the boundary exponent falls in and the time
    past which that regime's display is a valid relaxation."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    g = law.gamma
    if g <= 0:
        return "exponential", _threshold_exp(rho, law)
    if g < 0.5:
        return "subexponential", _threshold_subexp(rho, law)
    if abs(g - 0.5) <= 1e-12:
        beta0 = rho / (law.L0**2 * law.k) + 0.5
        return "polynomial", math.expm1(math.log(2.0) / beta0) / law.k
    return "polynomial-floor", 0.0


def regime_bound(rho: float, law: BoundaryLaw, norm_y0: float, T: float, *,
                 diffusion_constant: float = 1.0,
                 norm_z0_l1: Optional[float] = None) -> tuple[str, float]:
    """Closed-form envelope for the boundary-growth regime of the
    nondegenerate problem; returns (tier, value).

    gamma <= 0        exponential decay in T
    0 < gamma < 1/2   stretched-exponential decay in T**(1-2*gamma)
    gamma = 1/2       power decay (1+kT)**(-rho/(2 L0^2 k) - 1/4)
    gamma > 1/2       free heat-kernel ceiling (4 pi a T)**(-1/2) ||z0||_L1

    Rejected below the regime's validity threshold (see regime_threshold).
    """
    tier, t0 = regime_threshold(rho, law)
    if T < t0 and tier != "polynomial-floor":
        raise ValueError(
            f"T = {T:g} is below the {tier} regime's validity onset t0 = {t0:g}")
    L0, k, g = law.L0, law.k, law.gamma
    if tier == "exponential":
        one = 1.0 - 2.0 * g
        value = math.sqrt(2.0 / (L0 * one)) * norm_y0 \
            * _safe_exp(-0.5 * rho * T / (L0**2 * one))
    elif tier == "subexponential":
        one = 1.0 - 2.0 * g
        value = math.sqrt(2.0 / L0) * norm_y0 \
            * _safe_exp(-0.25 * rho * T**one / (L0**2 * one * k ** (2.0 * g)))
    elif tier == "polynomial":
        pref = math.sqrt((2.0 * rho + L0**2 * k) / (L0 * rho))
        value = pref * norm_y0 * _safe_exp(
            -(0.5 * rho / (L0**2 * k) + 0.25) * math.log1p(k * T))
    else:
        if not T > 0:
            raise ValueError("kernel ceiling needs T > 0")
        if norm_z0_l1 is None:
            raise ValueError(
                "gamma beyond 1/2 has only the heat-kernel ceiling, which "
                "needs the L1 norm of the datum")
        value = norm_z0_l1 / math.sqrt(4.0 * math.pi * diffusion_constant * T)
    return tier, value


def _log_weighted_integral(weight: WeightFunction, schedule: CoefficientSchedule,
                           t0: float, T: float) -> float:
    """log of integral_t0^T exp(beta) * p dt via the closed forms the beta
    weights were built to admit."""
    law = weight.law
    eps = weight.epsilon
    if weight.kind == "beta-subcritical":
        # exp(beta) p dt = (4 L0^(alpha-2) / eps) d(exp(beta))
        b0, bT = weight(t0), weight(T)
        lead = math.log(4.0 / eps) + (weight.alpha - 2.0) * math.log(law.L0)
        return lead + b0 + _log_expm1(bT - b0)
    # beta-critical: exp(beta) p = L0^(alpha-2) (1+kt)^(eps/k - 1)
    r = eps / law.k
    la, lb = r * math.log1p(law.k * t0), r * math.log1p(law.k * T)
    return (weight.alpha - 2.0) * math.log(law.L0) - math.log(eps) \
        + la + _log_expm1(lb - la)


def _log_expm1(x: float) -> float:
    if x <= 0:
        raise ValueError("empty integration interval")
    if x > 36.0:
        return x + math.log1p(-math.exp(-x))
    return math.log(math.expm1(x))


def master_bound_degenerate(alpha: float, schedule: CoefficientSchedule,
                            weight: WeightFunction, norm_u_t0: float,
                            t0: float, T: float,
                            admissibility_points: int = 10_000) -> float:
    """norm_u_t0 * ((1-alpha) exp(-beta(t0)) * integral_t0^T exp(beta) p)^(-1/2)
    for an admissible exponential time weight beta.

    Admissibility is checked before evaluating: the subcritical weight must
    satisfy the pointwise inequality 4*(beta' + |q|) <= (1-alpha)**2 * p on
    a dense grid of [t0, T]; the critical weight is admissible exactly when
    its rate epsilon respects the cap 4*eps <= (1-alpha)**2 * L0**(alpha-2).
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("degenerate bound needs 0 < alpha < 1")
    if schedule.alpha != alpha or weight.alpha != alpha:
        raise ValueError("alpha disagrees between schedule, weight, and bound")
    if schedule.law != weight.law:
        raise ValueError("schedule and weight carry different boundary laws")
    if not T > t0 >= 0:
        raise ValueError("need T > t0 >= 0")
    if norm_u_t0 < 0:
        raise ValueError("anchor norm must be nonnegative")
    if weight.kind == "beta-subcritical":
        tgrid = np.linspace(t0, T, admissibility_points)
        margin = admissibility_margin(weight, schedule, tgrid)
        worst = float(np.min(margin))
        if worst < -1e-12 * float(np.max(np.abs(margin))):
            tbad = float(tgrid[int(np.argmin(margin))])
            raise ValueError(
                f"weight is inadmissible on [{t0:g}, {T:g}]: margin {worst:.3e} "
                f"at t = {tbad:g}")
    elif weight.kind == "beta-critical":
        cap = critical_epsilon_cap(alpha, weight.law)
        if weight.epsilon > cap * (1.0 + 1e-12):
            raise ValueError(
                f"critical weight rate {weight.epsilon:g} exceeds the cap {cap:g}")
    else:
        raise ValueError(f"not a time weight: kind {weight.kind!r}")
    log_integral = _log_weighted_integral(weight, schedule, t0, T)
    log_bound = -0.5 * (math.log1p(-alpha) - weight(t0) + log_integral)
    return norm_u_t0 * _safe_exp(log_bound)


def evaluate_bound(spec: BoundSpec, T: float, anchor: Optional[float] = None) -> float:
    """Value of the envelope described by spec at time T.  anchor overrides
    spec.norm_y0 (and must be given when spec.norm_y0 is None)."""
    norm = spec.norm_y0 if anchor is None else anchor
    if spec.kind == "cauchy-kernel":
        norm = spec.norm_z0_l1 if anchor is None else anchor
    if norm is None:
        raise ValueError("no anchor norm available for bound evaluation")
    if spec.kind == "nondeg-master":
        return master_bound_nondegenerate(spec.rho, spec.law, norm, T)
    if spec.kind == "l2-remark":
        return l2_bound(spec.rho, spec.law, norm, T)
    if spec.kind == "degenerate-master":
        schedule = transformed_coefficients(spec.law, spec.alpha)
        return master_bound_degenerate(spec.alpha, schedule, spec.weight, norm,
                                       spec.t0, T)
    tier, value = regime_bound(spec.rho, spec.law, norm, T,
                               diffusion_constant=spec.diffusion_constant,
                               norm_z0_l1=norm if spec.kind == "cauchy-kernel" else None)
    expected = {"exp-regime": "exponential", "subexp-regime": "subexponential",
                "poly-critical": "polynomial", "cauchy-kernel": "polynomial-floor"}
    if expected[spec.kind] != tier:
        raise ValueError(
            f"bound kind {spec.kind!r} does not apply at gamma = {spec.law.gamma}; "
            f"the boundary law sits in the {tier} regime")
    return value


@dataclass(eq=False)
class BoundReport:
    """check_bound output: per-time comparison of computed norm vs envelope."""

    spec: BoundSpec
    slack: float
    times: np.ndarray
    norms: np.ndarray
    bounds: np.ndarray
    ratios: np.ndarray
    satisfied: np.ndarray
    skipped: int = 0

    @property
    def violations(self) -> int:
        return int(np.size(self.satisfied) - np.count_nonzero(self.satisfied))

    @property
    def all_satisfied(self) -> bool:
        return self.violations == 0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "norm", "bound", "ratio", "satisfied"])
            for i in range(self.times.size):
                writer.writerow([
                    repr(float(self.times[i])),
                    repr(float(self.norms[i])),
                    repr(float(self.bounds[i])),
                    repr(float(self.ratios[i])),
                    "true" if self.satisfied[i] else "false",
                ])


def _trajectory_norms(trajectory, kind: str) -> np.ndarray:
    if kind == "l2-remark":
        return np.sqrt(trajectory.lengths) * trajectory.l2_norms
    return trajectory.sup_norms


def _default_anchor(trajectory, spec: BoundSpec) -> float:
    """Anchor norm read off the trajectory: physical L2 of the datum for
    the nondegenerate kinds, physical L1 for the kernel ceiling, weighted
    L2 at t0 for the degenerate master bound."""
    if spec.kind == "degenerate-master":
        return float(np.interp(spec.t0, trajectory.times, trajectory.weighted_l2))
    if spec.kind == "cauchy-kernel":
        u0 = trajectory.snapshots[0]
        w = trajectory.grid.trap_weights
        return float(spec.law.L0 * np.sum(w * np.abs(u0)))
    return float(math.sqrt(spec.law.L0) * trajectory.l2_norms[0])


def check_bound(trajectory, spec: BoundSpec, slack: float = 0.05) -> BoundReport:
    """Compare trajectory norms against the envelope at every recorded time
    where the envelope is valid.  A time satisfies the bound when
    norm <= bound * (1 + slack).  Violations are recorded, not raised."""
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    if spec.norm_y0 is not None:
        anchor = spec.norm_y0
    elif spec.kind == "cauchy-kernel" and spec.norm_z0_l1 is not None:
        anchor = spec.norm_z0_l1
    else:
        anchor = _default_anchor(trajectory, spec)
    times = trajectory.times
    norms = _trajectory_norms(trajectory, spec.kind)
    if spec.kind in ("exp-regime", "subexp-regime", "poly-critical", "cauchy-kernel"):
        _, t_lo = regime_threshold(spec.rho, spec.law)
        valid = times >= max(t_lo, np.finfo(float).tiny)
    elif spec.kind == "degenerate-master":
        valid = times > spec.t0
    elif spec.kind == "nondeg-master":
        valid = times > 0.0
    else:
        valid = np.ones_like(times, dtype=bool)
    tt = times[valid]
    nn = norms[valid]
    bb = np.array([evaluate_bound(spec, float(t), anchor=anchor) for t in tt])
    with np.errstate(divide="ignore", invalid="ignore"):
        rr = np.where(np.isinf(bb), 0.0, nn / bb)
    rr = np.where((bb == 0.0) & (nn == 0.0), 1.0, rr)
    ok = nn <= bb * (1.0 + slack)
    ok |= np.isinf(bb)
    return BoundReport(
        spec=spec,
        slack=slack,
        times=tt,
        norms=nn,
        bounds=bb,
        ratios=rr,
        satisfied=ok,
        skipped=int(times.size - tt.size),
    )
