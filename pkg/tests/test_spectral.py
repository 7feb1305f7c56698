"""Weighted eigenproblems: pencil accuracy, oracles, and separable solutions.

Frozen reference eigenvalues come from two independent routes computed
once and pinned here: high-order adaptive shooting (tests/test via
decaylab.shooting at rtol 1e-12) and, for the degenerate kind in its
vanishing-stretch limit, classical Bessel zeros.
"""

import warnings

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh
from scipy.optimize import brentq
from scipy.special import jv

from decaylab import spectral
from decaylab.shooting import (
    degenerate_eigenvalues,
    oracle_eigenvalues,
    selfsimilar_eigenvalues,
)

# shooting values at a = k = L0 = 1 (selfsimilar) and alpha = 1/2,
# k = L0 = 1 (degenerate-critical), frozen from DOP853 at rtol 1e-12
MU_REF = (10.1372670896, 39.7484605754, 89.0969219093)
LAM_REF = (5.1015959224, 20.8402143479, 47.6748253682)
PHI1_L2_REF = 0.9448629
PHI1_SUP_REF = 1.3251065


def test_shooting_frozen_values():
    mu = selfsimilar_eigenvalues(a=1.0, k=1.0, L0=1.0, count=3)
    np.testing.assert_allclose(mu, MU_REF, rtol=1e-8)
    lam = degenerate_eigenvalues(0.5, k=1.0, L0=1.0, count=3)
    np.testing.assert_allclose(lam, LAM_REF, rtol=1e-8)


def test_pencil_matches_shooting_selfsimilar():
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 2000)
    pairs = spectral.solve_eigen(problem, grid, count=3)
    got = [p.eigenvalue for p in pairs]
    np.testing.assert_allclose(got, MU_REF, rtol=1e-6)


def test_pencil_matches_shooting_degenerate():
    problem = spectral.EigenProblem(kind="degenerate-critical", alpha=0.5,
                                    k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 2000)
    pairs = spectral.solve_eigen(problem, grid, count=3)
    got = [p.eigenvalue for p in pairs]
    np.testing.assert_allclose(got, LAM_REF, rtol=1e-6)
    assert pairs[0].l2_norm == pytest.approx(PHI1_L2_REF, rel=1e-6)
    assert pairs[0].sup_norm == pytest.approx(PHI1_SUP_REF, rel=1e-6)


def test_oracle_dispatcher():
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    np.testing.assert_allclose(oracle_eigenvalues(problem, count=2),
                               MU_REF[:2], rtol=1e-8)
    problem_d = spectral.EigenProblem(kind="degenerate-critical", alpha=0.5,
                                      k=1.0, L0=1.0)
    np.testing.assert_allclose(oracle_eigenvalues(problem_d, count=2),
                               LAM_REF[:2], rtol=1e-8)
    with pytest.raises(ValueError):
        oracle_eigenvalues(
            spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0,
                                  P_override=lambda x: np.ones_like(x)),
            count=1)


def test_classical_limit_with_overrides():
    """Constant overrides reduce both assembly paths to the fixed-membrane
    problem with exact eigenvalues (n*pi)**2."""
    problem = spectral.EigenProblem(
        kind="selfsimilar", a=1.0, k=1.0, L0=1.0,
        P_override=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        K_override=lambda x: np.ones_like(np.asarray(x, dtype=float)))
    grid = spectral.make_eigen_grid(problem, 1000)
    pairs = spectral.solve_eigen(problem, grid, count=3)
    exact = (np.arange(1, 4) * np.pi) ** 2
    np.testing.assert_allclose([p.eigenvalue for p in pairs], exact,
                               rtol=1e-6)
    # exact L2-normalized mode sqrt(2) sin(n pi x)
    assert pairs[0].sup_norm == pytest.approx(np.sqrt(2.0), rel=1e-4)


def test_degenerate_bessel_limit():
    """As the stretch rate vanishes the degenerate problem becomes
    -(x**alpha u')' = lam*u, solved by Bessel functions: lam_n =
    ((2-alpha)/2)**2 * j_{nu,n}**2 with nu = (1-alpha)/(2-alpha)."""
    alpha = 0.5
    nu = (1 - alpha) / (2 - alpha)
    roots, lo = [], 0.5
    for _ in range(3):
        a, b = lo, lo + 4.0
        while jv(nu, a) * jv(nu, b) > 0:
            a, b = b, b + 2.0
        r = brentq(lambda z: jv(nu, z), a, b, xtol=1e-13)
        roots.append(r)
        lo = r + 2.0
    exact = ((2 - alpha) / 2.0) ** 2 * np.array(roots) ** 2
    problem = spectral.EigenProblem(kind="degenerate-critical", alpha=alpha,
                                    k=1e-9, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 2000)
    pairs = spectral.solve_eigen(problem, grid, count=3)
    np.testing.assert_allclose([p.eigenvalue for p in pairs], exact,
                               rtol=1e-6)


def test_rayleigh_ritz_variational_oracle():
    # 30 sine modes, 400-point Gauss quadrature; Rayleigh-Ritz values upper
    # bound the true spectrum and are accurate to ~1e-7 here
    z, w = leggauss(400)
    x, w = 0.5 * (z + 1), 0.5 * w
    p = np.exp(x**2 / 4.0)
    n = np.arange(1, 31)
    phi = np.sin(np.pi * np.outer(n, x))
    dphi = (np.pi * n[:, None]) * np.cos(np.pi * np.outer(n, x))
    S = (dphi * p * w) @ dphi.T
    M = (phi * p * w) @ phi.T
    mu_rr = eigh(S, M, subset_by_index=[0, 2])[0]

    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 2000)
    pairs = spectral.solve_eigen(problem, grid, count=3)
    got = np.array([p.eigenvalue for p in pairs])
    np.testing.assert_allclose(got, mu_rr, rtol=1e-6)
    assert np.all(mu_rr >= got - 1e-6 * got)


def test_rayleigh_quotient_consistency():
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 800)
    pair = spectral.solve_eigen(problem, grid, count=1)[0]
    rq = spectral.rayleigh_quotient(problem, grid, pair.values)
    assert rq == pytest.approx(pair.eigenvalue, rel=1e-10)
    # any admissible trial function sits at or above the ground value
    rng = np.random.default_rng(20260822)
    for _ in range(10):
        u = np.sin(np.pi * grid.nodes) + 0.3 * rng.normal(size=grid.nodes.size) \
            * np.sin(2 * np.pi * grid.nodes)
        u[0] = u[-1] = 0.0
        assert spectral.rayleigh_quotient(problem, grid, u) >= \
            pair.eigenvalue * (1 - 1e-10)
    with pytest.raises(ValueError):
        spectral.rayleigh_quotient(problem, grid, np.zeros(grid.nodes.size))
    with pytest.raises(ValueError):
        spectral.rayleigh_quotient(problem, grid, grid.nodes)  # u(1) != 0


def test_weighted_gram_orthonormality():
    for problem in (
        spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0),
        spectral.EigenProblem(kind="degenerate-critical", alpha=0.5, k=1.0,
                              L0=1.0),
    ):
        grid = spectral.make_eigen_grid(problem, 2000)
        pairs = spectral.solve_eigen(problem, grid, count=3)
        gram = spectral.weighted_gram(problem, grid, pairs)
        assert np.abs(gram - np.eye(3)).max() <= 1e-10


def test_ground_state_sign_and_nodes():
    problem = spectral.EigenProblem(kind="degenerate-critical", alpha=0.25,
                                    k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 1000)
    pairs = spectral.solve_eigen(problem, grid, count=2)
    phi1, phi2 = pairs[0].values, pairs[1].values
    assert phi1[1] > 0  # sign convention: positive slope off the left wall
    assert phi1.min() >= -1e-10 * phi1.max()  # single-signed ground state
    # second mode changes sign exactly once
    signs = np.sign(phi2[np.abs(phi2) > 1e-8 * np.abs(phi2).max()])
    assert np.sum(np.diff(signs) != 0) == 1


def test_eigenpair_is_callable_interpolant():
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 500)
    pair = spectral.solve_eigen(problem, grid, count=1)[0]
    assert pair(0.0) == 0.0
    assert pair(1.0) == 0.0
    mid = pair(grid.nodes[250])
    assert mid == pytest.approx(pair.values[250], rel=1e-14)


def test_count_warning_and_grid_defaults():
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 800)
    assert grid.grading == 1.0
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        spectral.solve_eigen(problem, grid, count=201)
    assert any(issubclass(r.category, RuntimeWarning) for r in rec)
    # degenerate grids grade toward the origin, capped at quadratic
    gd = spectral.make_eigen_grid(
        spectral.EigenProblem(kind="degenerate-critical", alpha=0.25, k=1.0,
                              L0=1.0), 100)
    assert gd.grading == pytest.approx(4.0 / 3.0)
    gd75 = spectral.make_eigen_grid(
        spectral.EigenProblem(kind="degenerate-critical", alpha=0.75, k=1.0,
                              L0=1.0), 100)
    assert gd75.grading == 2.0


def test_separable_solution_selfsimilar():
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 1000)
    pair = spectral.solve_eigen(problem, grid, count=1)[0]
    snap0 = spectral.separable_solution(problem, pair, 0.0)
    assert snap0.factor == 1.0
    np.testing.assert_allclose(snap0.values, pair.values, rtol=1e-14)
    t = 3.0
    snap = spectral.separable_solution(problem, pair, t)
    grow = 4.0
    assert snap.factor == pytest.approx(grow ** -pair.eigenvalue, rel=1e-12)
    assert snap.sup_norm == pytest.approx(snap.factor * pair.sup_norm,
                                          rel=1e-12)
    # physical interval stretches by sqrt(1 + k t)
    assert snap.x[-1] == pytest.approx(np.sqrt(grow), rel=1e-12)
    assert snap.l2_norm == pytest.approx(
        snap.factor * np.sqrt(np.sqrt(grow)) * pair.l2_norm, rel=1e-12)


def test_separable_solution_degenerate():
    problem = spectral.EigenProblem(kind="degenerate-critical", alpha=0.5,
                                    k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 1000)
    pair = spectral.solve_eigen(problem, grid, count=1)[0]
    t = 7.0
    snap = spectral.separable_solution(problem, pair, t)
    assert snap.factor == pytest.approx(8.0 ** -pair.eigenvalue, rel=1e-12)
    # the reference interval does not move; decay is purely in amplitude
    assert snap.x[-1] == 1.0
    assert snap.l2_norm == pytest.approx(snap.factor * pair.l2_norm, rel=1e-12)


def test_hardy_sides_inequality_and_first_cell():
    nodes = np.linspace(0.0, 1.0, 257)
    u = np.sin(0.5 * np.pi * nodes)
    for alpha in (0.0, 0.25, 0.5, 0.75):
        lhs, rhs = spectral.hardy_sides(u, nodes, alpha)
        assert lhs <= rhs
    # first cell is excluded from the singular side above alpha = 1/2
    spike = np.zeros(257)
    spike[1] = 1.0
    l_drop, _ = spectral.hardy_sides(spike, nodes, 0.75)
    l_keep, _ = spectral.hardy_sides(spike, nodes, 0.25)
    assert l_drop < l_keep


def test_export_pairs_csv(tmp_path):
    problem = spectral.EigenProblem(kind="selfsimilar", a=1.0, k=1.0, L0=1.0)
    grid = spectral.make_eigen_grid(problem, 200)
    pairs = spectral.solve_eigen(problem, grid, count=2)
    out = tmp_path / "eig.csv"
    spectral.export_pairs_csv(pairs, "selfsimilar", out, sample_dir=tmp_path)
    lines = out.read_text().splitlines()
    assert lines[0] == "kind,n,eigenvalue,weighted_norm,sup_norm"
    assert len(lines) == 3
    sample = tmp_path / "eigenfunction_selfsimilar_1.csv"
    body = np.loadtxt(sample, delimiter=",", skiprows=1)
    assert body.shape == (201, 2)
    np.testing.assert_allclose(body[:, 1], pairs[0].values, rtol=1e-15)
