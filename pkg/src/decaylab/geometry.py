"""Boundary laws, weights, and coefficient schedules for heat flow on a
growing interval.

The physical problem lives on (0, l(t)) with l(t) = L0*(1+k*t)**gamma.
Substituting x = xi/l(t) maps it to the fixed reference interval (0, 1),
at the price of a time dependent diffusion scale

    p(t) = l(t)**(alpha - 2)

and a drift scale

    q(t) = -k*gamma / (1 + k*t),

where alpha in [0, 1) is the degeneracy exponent of the diffusion
coefficient x**alpha.  Everything in this module is closed form: decay
bounds downstream need to integrate these schedules with their own
quadrature nodes, so weights are handed out as evaluators, never as
sampled arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BoundaryLaw",
    "CoefficientSchedule",
    "WeightFunction",
    "boundary_length",
    "alpha_weight",
    "gamma_critical",
    "critical_law",
    "transformed_coefficients",
    "beta_subcritical",
    "beta_critical",
    "critical_epsilon_cap",
    "admissible_epsilon",
    "admissibility_margin",
    "physical_to_reference",
    "reference_to_physical",
]


@dataclass(frozen=True)
class BoundaryLaw:
    """Power law endpoint l(t) = L0*(1+k*t)**gamma, with L0 > 0 and k > 0."""

    L0: float
    k: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.L0 > 0:
            raise ValueError(f"L0 must be positive, got {self.L0}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")

    def length(self, t):
        """l(t); accepts scalars or arrays, t >= 0."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("boundary law is defined for t >= 0 only")
        out = self.L0 * np.exp(self.gamma * np.log1p(self.k * t))
        return float(out) if out.ndim == 0 else out


def boundary_length(law: BoundaryLaw, t):
    """Endpoint position l(t) = L0*(1+k*t)**gamma."""
    return law.length(t)


def alpha_weight(law: BoundaryLaw, t):
    """The accumulated inverse-square length, integral of l(tau)**-2 on [0, t].

    Closed form: [(1+k*t)**(1-2*gamma) - 1] / (L0**2 * (1-2*gamma) * k) away
    from gamma = 1/2, and log(1+k*t)/(L0**2 * k) at gamma = 1/2.  Evaluated
    through expm1/log1p so the two branches meet continuously.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("alpha weight is defined for t >= 0 only")
    lg = np.log1p(law.k * t)
    if law.gamma == 0.5:
        out = lg / (law.L0**2 * law.k)
    else:
        m = 1.0 - 2.0 * law.gamma
        out = np.expm1(m * lg) / (law.L0**2 * m * law.k)
    return float(out) if out.ndim == 0 else out


def gamma_critical(alpha: float) -> float:
    """Boundary growth exponent separating stretched-exponential from
    power-law decay: 1/(2 - alpha)."""
    _check_alpha(alpha)
    return 1.0 / (2.0 - alpha)


def critical_law(law: BoundaryLaw, alpha: float) -> BoundaryLaw:
    """The same (L0, k) law with gamma pinned at the critical exponent."""
    return BoundaryLaw(law.L0, law.k, gamma_critical(alpha))


@dataclass(frozen=True)
class CoefficientSchedule:
    """Time dependent coefficients of the transformed equation on (0,1):
    u_t = p(t)*(x**alpha * u_x)_x - q(t)*x*u_x.

    p excludes any constant diffusion factor; solvers multiply it in.
    """

    alpha: float
    law: BoundaryLaw

    def p(self, t):
        lt = self.law.length(t)
        return lt ** (self.alpha - 2.0)

    def q(self, t):
        t = np.asarray(t, dtype=float)
        out = -self.law.k * self.law.gamma / (1.0 + self.law.k * t)
        return float(out) if out.ndim == 0 else out


def transformed_coefficients(law: BoundaryLaw, alpha: float) -> CoefficientSchedule:
    """Coefficient schedule (p, q) of the fixed-interval form of the
    moving-interval equation."""
    _check_alpha(alpha)
    return CoefficientSchedule(alpha=alpha, law=law)


@dataclass(frozen=True)
class WeightFunction:
    """Closed-form weight used by energy estimates and eigenproblems.

    Kinds:
      alpha-integral       t -> integral of l**-2      (params: law)
      beta-subcritical     t -> eps/(4*k*m)*(1+k*t)**m (m = gamma*(alpha-2)+1)
      beta-critical        t -> (eps/k)*log(1+k*t)
      selfsimilar-gaussian eta -> exp(k*L0**2*eta**2/(4*a))
      critical-stretched   x -> exp(L0**(2-alpha)*k/(2-alpha)**2 * x**(2-alpha))
    """

    kind: str
    law: BoundaryLaw
    alpha: float = 0.0
    a: float = 1.0
    epsilon: float = 0.0
    t0: float = 0.0

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        law = self.law
        if self.kind == "alpha-integral":
            out = np.asarray(alpha_weight(law, v))
        elif self.kind == "beta-subcritical":
            m = law.gamma * (self.alpha - 2.0) + 1.0
            out = self.epsilon / (4.0 * law.k * m) * np.exp(m * np.log1p(law.k * v))
        elif self.kind == "beta-critical":
            out = (self.epsilon / law.k) * np.log1p(law.k * v)
        elif self.kind == "selfsimilar-gaussian":
            out = np.exp(law.k * law.L0**2 * v**2 / (4.0 * self.a))
        elif self.kind == "critical-stretched":
            c2 = law.L0 ** (2.0 - self.alpha) * law.k / (2.0 - self.alpha) ** 2
            out = np.exp(c2 * v ** (2.0 - self.alpha))
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        return float(out) if out.ndim == 0 else out

    def derivative(self, t):
        """d/dt of the time weights (beta kinds only)."""
        t = np.asarray(t, dtype=float)
        law = self.law
        if self.kind == "beta-subcritical":
            out = (self.epsilon / 4.0) * np.exp(
                law.gamma * (self.alpha - 2.0) * np.log1p(law.k * t)
            )
        elif self.kind == "beta-critical":
            out = self.epsilon / (1.0 + law.k * t)
        else:
            raise ValueError(f"no time derivative for weight kind {self.kind!r}")
        return float(out) if out.ndim == 0 else out


def beta_subcritical(alpha: float, law: BoundaryLaw, epsilon: float, t0: float) -> WeightFunction:
    """Power-law exponential weight for boundary growth below critical.

    beta(t) = eps/(4*k*m) * (1+k*t)**m with m = gamma*(alpha-2)+1 > 0.
    The construction divides by m, so the critical case is rejected here
    and routed to beta_critical instead.
    """
    _check_alpha(alpha)
    if law.gamma >= gamma_critical(alpha):
        raise ValueError(
            f"subcritical weight needs gamma < {gamma_critical(alpha):.6g}, "
            f"got gamma = {law.gamma}"
        )
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return WeightFunction("beta-subcritical", law, alpha=alpha, epsilon=epsilon, t0=t0)


def beta_critical(alpha: float, law: BoundaryLaw, epsilon: float) -> WeightFunction:
    """Logarithmic weight at the critical growth rate, capped by
    4*eps <= (1-alpha)**2 * L0**(alpha-2)."""
    _check_alpha(alpha)
    gc = gamma_critical(alpha)
    if abs(law.gamma - gc) > 1e-12 * max(1.0, abs(gc)):
        raise ValueError(f"critical weight needs gamma = {gc:.6g}, got {law.gamma}")
    cap = 0.25 * (1.0 - alpha) ** 2 * law.L0 ** (alpha - 2.0)
    if epsilon > cap * (1.0 + 1e-12):
        raise ValueError(f"epsilon {epsilon} exceeds admissible cap {cap:.6g}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return WeightFunction("beta-critical", law, alpha=alpha, epsilon=epsilon)


def critical_epsilon_cap(alpha: float, law: BoundaryLaw) -> float:
    """Largest epsilon the critical weight admits."""
    _check_alpha(alpha)
    return 0.25 * (1.0 - alpha) ** 2 * law.L0 ** (alpha - 2.0)


def admissibility_margin(weight: WeightFunction, schedule: CoefficientSchedule, t):
    """Pointwise slack (1-alpha)**2*p - 4*(beta_t + |q|) of the energy-weight
    admissibility inequality; nonnegative means admissible."""
    t = np.asarray(t, dtype=float)
    a = schedule.alpha
    out = (1.0 - a) ** 2 * schedule.p(t) - 4.0 * (
        weight.derivative(t) + np.abs(schedule.q(t))
    )
    return float(out) if out.ndim == 0 else out


def admissible_epsilon(alpha: float, law: BoundaryLaw, *, t_span: float = 1e3,
                       grid_points: int = 4096) -> tuple[float, float]:
    """Search a valid (epsilon, t0) pair for the subcritical weight.

    The inequality to satisfy for all t >= t0 is

        eps*(1+k*t)**(gamma*(alpha-2)) + 4*|q(t)| <= (1-alpha)**2 * p(t).

    Strategy: t0 is the first grid time where 4*|q| is at most half of
    (1-alpha)**2*p, then epsilon is the infimum over the grid of the
    normalized headroom [(1-alpha)**2*p - 4*|q|]*(1+k*t)**(-gamma*(alpha-2)).
    A constant headroom (frozen domain) is returned whole, since equality
    is admissible; otherwise half the infimum guards against grid gaps.
    The returned pair is re-verified on a dense grid before returning.
    """
    _check_alpha(alpha)
    if law.gamma >= gamma_critical(alpha):
        raise ValueError(
            "no subcritical weight exists at or above the critical growth rate"
        )
    sched = transformed_coefficients(law, alpha)
    tgrid = np.concatenate([[0.0], np.geomspace(1e-3, t_span, grid_points)])
    pvals = sched.p(tgrid)
    qvals = np.abs(sched.q(tgrid))
    floor = (1.0 - alpha) ** 2 * pvals
    ok = 4.0 * qvals <= 0.5 * floor
    if not ok.any():
        raise ValueError(
            f"no admissible start time in [0, {t_span}]; regime looks mis-specified"
        )
    i0 = int(np.argmax(ok))
    t0 = float(tgrid[i0])
    scale = np.exp(-law.gamma * (alpha - 2.0) * np.log1p(law.k * tgrid[i0:]))
    headroom = (floor[i0:] - 4.0 * qvals[i0:]) * scale
    lo, hi = float(headroom.min()), float(headroom.max())
    eps = lo if hi - lo <= 1e-12 * max(hi, 1.0) else 0.5 * lo
    if not eps > 0:
        raise ValueError("admissible epsilon search collapsed to zero")
    check_t = np.linspace(t0, t0 + t_span, 10**4)
    margin = admissibility_margin(
        beta_subcritical(alpha, law, eps, t0), sched, check_t
    )
    if margin.min() < -1e-12 * max(1.0, float(np.abs(margin).max())):
        raise ValueError("admissible epsilon verification failed on dense grid")
    return eps, t0


def physical_to_reference(xi, law: BoundaryLaw, t):
    """Map a physical coordinate xi in (0, l(t)) to x in (0, 1)."""
    return np.asarray(xi, dtype=float) / law.length(t)


def reference_to_physical(x, law: BoundaryLaw, t):
    """Map a reference coordinate x in (0, 1) to xi in (0, l(t))."""
    return np.asarray(x, dtype=float) * law.length(t)


def _check_alpha(alpha: float) -> None:
    if not (0.0 <= alpha < 1.0):
        raise ValueError(
            f"degeneracy exponent must lie in [0, 1), got {alpha}; "
            "stronger degeneracy loses the boundary trace"
        )
    if math.isnan(alpha):
        raise ValueError("degeneracy exponent is NaN")
