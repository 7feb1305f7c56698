"""Shooting-method eigenvalue oracles.

Independent cross-check for the matrix pencil in spectral.py: integrate the
ODE from the left endpoint with high-order adaptive Runge-Kutta and find the
eigenvalues as roots of the boundary value at x = 1.  Shares no
discretization machinery with the pencil path, so agreement between the two
is a genuine two-route check.

For the degenerate kind the equation -(P u')' = lambda K u with
P ~ x**alpha has a regular singular point at x = 0; the admissible branch
behaves like x**(1-alpha).  Integration starts a tiny offset from 0 on that
branch (relative truncation error O(lambda * x0**(2-alpha)), far below the
root-finder tolerance at the default offset).
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

__all__ = [
    "selfsimilar_eigenvalues",
    "degenerate_eigenvalues",
    "oracle_eigenvalues",
]

_IVP_OPTS = dict(method="DOP853", rtol=1e-12, atol=1e-14)


def _scan_roots(endval, grid, count):
    roots = []
    f_prev = endval(grid[0])
    for lo, hi in zip(grid[:-1], grid[1:]):
        f = endval(hi)
        if f_prev == 0.0:
            roots.append(lo)
        elif f_prev * f < 0:
            roots.append(brentq(endval, lo, hi, xtol=1e-13, rtol=1e-14))
        f_prev = f
        if len(roots) >= count:
            return np.array(roots[:count])
    raise RuntimeError(
        f"found only {len(roots)} of {count} eigenvalues in "
        f"[{grid[0]:g}, {grid[-1]:g}]; widen the scan")


def selfsimilar_eigenvalues(a: float = 1.0, k: float = 1.0, L0: float = 1.0,
                            count: int = 3) -> np.ndarray:
    """First eigenvalues of -c (p X')' = mu p X on (0, 1), Dirichlet ends,
    with p = exp(k L0^2 eta^2 / (4a)) and c = a/(k L0^2).  Dividing out p
    leaves c X'' + (eta/2) X' + mu X = 0, which is what gets integrated."""
    if min(a, k, L0) <= 0:
        raise ValueError("a, k, L0 must be positive")
    c = a / (k * L0**2)

    def endval(mu):
        def rhs(eta, y):
            return [y[1], -(0.5 * eta * y[1] + mu * y[0]) / c]
        sol = solve_ivp(rhs, (0.0, 1.0), [0.0, 1.0], **_IVP_OPTS)
        if not sol.success:
            raise RuntimeError(f"integration failed at mu={mu}: {sol.message}")
        return sol.y[0, -1]

    # Dirichlet spacing is asymptotically c*pi^2*(2n+1); a quarter of the
    # first gap cannot step over a root.
    step = c * np.pi**2 / 4.0
    hi = c * np.pi**2 * (count + 2) ** 2 + 4.0 * step
    grid = np.arange(step / 8.0, hi, step)
    return _scan_roots(endval, grid, count)


def degenerate_eigenvalues(alpha: float, k: float = 1.0, L0: float = 1.0,
                           count: int = 3, x_start: float = 5e-7) -> np.ndarray:
    """First eigenvalues of -(P u')' = lambda K u on (0, 1) with
    K = exp(c2 x^(2-alpha)), P = L0^(alpha-2) K x^alpha, u(0) = u(1) = 0
    (the x = 0 condition meaning the regular x^(1-alpha) branch)."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if min(k, L0) <= 0:
        raise ValueError("k, L0 must be positive")
    if not (0.0 < x_start < 1e-3):
        raise ValueError("x_start must be a small positive offset")
    c2 = L0 ** (2.0 - alpha) * k / (2.0 - alpha) ** 2

    def K(x):
        return np.exp(c2 * x ** (2.0 - alpha))

    def P(x):
        return L0 ** (alpha - 2.0) * K(x) * x**alpha

    def endval(lam):
        def rhs(x, y):
            u, v = y
            return [v / P(x), -lam * K(x) * u]
        u0 = x_start ** (1.0 - alpha)
        v0 = L0 ** (alpha - 2.0) * K(x_start) * (1.0 - alpha)
        sol = solve_ivp(rhs, (x_start, 1.0), [u0, v0], **_IVP_OPTS)
        if not sol.success:
            raise RuntimeError(f"integration failed at lambda={lam}: {sol.message}")
        return sol.y[0, -1]

    # With the weight frozen at 1 the problem maps to a Bessel equation of
    # order nu = (1-alpha)/(2-alpha); its first zero locates lambda_1 well
    # enough to set the scan scale.
    nu = (1.0 - alpha) / (2.0 - alpha)
    lam1_est = ((2.0 - alpha) / 2.0) ** 2 * ((nu / 2.0 + 0.75) * np.pi) ** 2 \
        * L0 ** (alpha - 2.0)
    step = 0.5 * lam1_est
    hi = lam1_est * max(300.0, 30.0 * count**2)
    grid = np.arange(0.25 * lam1_est, hi, step)
    return _scan_roots(endval, grid, count)


def oracle_eigenvalues(problem, count: int = 3) -> np.ndarray:
    """Dispatch on an EigenProblem from spectral.py."""
    if problem.P_override is not None or problem.K_override is not None:
        raise ValueError("shooting oracle only covers the built-in weights")
    if problem.kind == "selfsimilar":
        return selfsimilar_eigenvalues(problem.a, problem.k, problem.L0, count)
    return degenerate_eigenvalues(problem.alpha, problem.k, problem.L0, count)
