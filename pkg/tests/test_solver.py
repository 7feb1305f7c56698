"""Finite-volume assembly, theta stepping, and trajectory bookkeeping."""

import csv

import numpy as np
import pytest

from decaylab.geometry import BoundaryLaw, alpha_weight
from decaylab.solver import (
    Grid,
    ProblemSpec,
    SolverError,
    assemble_spatial_operator,
    heat_kernel_solution,
    make_grid,
    regularize,
    solve_moving,
    step,
    time_points,
)

SEED = 20260822
FROZEN = BoundaryLaw(L0=1.0, k=1.0, gamma=0.0)


def sine(xi):
    return np.sin(np.pi * xi)


def test_grid_construction():
    g = Grid(N=8, grading=2.0)
    np.testing.assert_allclose(g.nodes, (np.arange(9) / 8.0) ** 2)
    np.testing.assert_allclose(g.faces, 0.5 * (g.nodes[:-1] + g.nodes[1:]))
    np.testing.assert_allclose(g.spacing, np.diff(g.nodes))
    assert g.trap_weights.sum() == pytest.approx(1.0, rel=1e-14)
    # trap weights integrate linear functions exactly
    assert float(g.trap_weights @ g.nodes) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        Grid(N=3)
    with pytest.raises(ValueError):
        Grid(N=8, grading=0.5)


def test_make_grid_default_grading():
    assert make_grid(16, 0.0).grading == 1.0
    assert make_grid(16, 0.5).grading == 2.0
    assert make_grid(16, 0.25).grading == pytest.approx(4.0 / 3.0)
    assert make_grid(16, 0.5, grading=1.0).grading == 1.0


def test_uniform_laplacian_stencil():
    """alpha = 0 on a frozen unit domain reduces to the classical
    [1, -2, 1] / h**2 stencil."""
    grid = make_grid(16, 0.0)
    spec = ProblemSpec(alpha=0.0, law=FROZEN, initial_datum=sine)
    lo, di, up = assemble_spatial_operator(spec, grid, 0.0)
    h2 = (1.0 / 16) ** 2
    np.testing.assert_allclose(lo[1:-1], 1.0 / h2, rtol=1e-13)
    np.testing.assert_allclose(di[1:-1], -2.0 / h2, rtol=1e-13)
    np.testing.assert_allclose(up[1:-1], 1.0 / h2, rtol=1e-13)
    assert lo[0] == di[0] == up[0] == 0.0
    assert lo[-1] == di[-1] == up[-1] == 0.0


def test_interior_row_sums_vanish():
    # conservative diffusion plus any admissible drift annihilates constants
    rng = np.random.default_rng(SEED)
    for drift in ("upwind", "centered"):
        for _ in range(10):
            alpha = float(rng.uniform(0.0, 0.9))
            law = BoundaryLaw(float(rng.uniform(0.5, 2.0)),
                              float(rng.uniform(0.3, 2.0)),
                              float(rng.uniform(-1.0, 1.0)))
            spec = ProblemSpec(alpha=alpha, law=law, initial_datum=sine,
                               diffusion_constant=float(rng.uniform(0.5, 2.0)))
            grid = make_grid(int(rng.integers(16, 64)), alpha)
            t = float(rng.uniform(0.0, 5.0))
            lo, di, up = assemble_spatial_operator(spec, grid, t, drift)
            rowsum = lo[1:-1] + di[1:-1] + up[1:-1]
            scale = np.abs(di[1:-1]).max()
            assert np.abs(rowsum).max() <= 1e-12 * scale


def test_assembly_rows_against_hand_formula():
    """Spot-check three rows of the degenerate operator against the flux
    formula written out longhand: p = 1, q = -1 at t = 0 for this law."""
    alpha = 0.5
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=1.0)
    spec = ProblemSpec(alpha=alpha, law=law, initial_datum=sine)
    grid = make_grid(64, alpha)
    lo, di, up = assemble_spatial_operator(spec, grid, 0.0, drift="upwind")
    x, f, h, w = grid.nodes, grid.faces, grid.spacing, grid.trap_weights
    for i in (1, 17, 40):
        dif_lo = f[i - 1] ** alpha / (h[i - 1] * w[i])
        dif_up = f[i] ** alpha / (h[i] * w[i])
        v = -x[i]  # q(0) * x_i with q(0) = -k*gamma = -1
        # v < 0: upwind differences toward the right neighbor
        exp_lo = dif_lo
        exp_di = -(dif_lo + dif_up) + v / h[i]
        exp_up = dif_up - v / h[i]
        assert lo[i] == pytest.approx(exp_lo, rel=1e-13)
        assert di[i] == pytest.approx(exp_di, rel=1e-13)
        assert up[i] == pytest.approx(exp_up, rel=1e-13)


def test_centered_drift_uses_wide_difference():
    # on a benign row the centered branch must produce +-v/(x_{i+1}-x_{i-1})
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=1.0)
    spec = ProblemSpec(alpha=0.0, law=law, initial_datum=sine)
    grid = make_grid(64, 0.0)
    lo_u, di_u, up_u = assemble_spatial_operator(spec, grid, 0.0, "upwind")
    lo_c, di_c, up_c = assemble_spatial_operator(spec, grid, 0.0, "centered")
    x, h = grid.nodes, grid.spacing
    i = 32
    v = -x[i]
    assert lo_c[i] - lo_u[i] == pytest.approx(v / (x[i + 1] - x[i - 1]) - 0.0,
                                              rel=1e-12)
    assert di_c[i] == pytest.approx(di_u[i] - v / h[i], rel=1e-12)


def test_frozen_sine_against_separated_solution():
    spec = ProblemSpec(alpha=0.0, law=FROZEN, initial_datum=sine)
    grid = make_grid(256, 0.0)
    times = time_points("uniform", 0.1, 400, FROZEN)
    traj = solve_moving(spec, grid, times, theta=0.5)
    exact = np.exp(-np.pi**2 * 0.1) * np.sin(np.pi * grid.nodes)
    got = traj.snapshot_at(traj.times.size - 1)
    assert np.abs(got - exact).max() <= 5e-4 * exact.max()


def test_solve_moving_matches_manual_stepping():
    law = BoundaryLaw(L0=1.0, k=0.7, gamma=0.4)
    spec = ProblemSpec(alpha=0.25, law=law, initial_datum=sine,
                       diffusion_constant=1.3)
    grid = make_grid(48, 0.25)
    times = time_points("geometric", 5.0, 60, law)
    traj = solve_moving(spec, grid, times, theta=0.6, drift="upwind",
                        max_snapshots=1000)
    u = np.sin(np.pi * grid.nodes)
    u[0] = u[-1] = 0.0
    for i in range(times.size - 1):
        u = step(spec, grid, u, times[i], times[i + 1] - times[i], theta=0.6)
    assert traj.sup_norms[-1] == np.abs(u).max()
    np.testing.assert_array_equal(traj.snapshot_at(times.size - 1), u)


def test_max_principle_single_case():
    rng = np.random.default_rng(SEED + 1)
    law = BoundaryLaw(L0=1.2, k=1.0, gamma=0.6)
    grid = make_grid(40, 0.3)
    u0 = np.abs(np.sin(2 * np.pi * grid.nodes)) + rng.uniform(0, 0.3) \
        * np.sin(np.pi * grid.nodes)
    u0[0] = u0[-1] = 0.0
    spec = ProblemSpec(alpha=0.3, law=law, initial_datum=u0)
    cap = u0.max()
    u = u0
    for i, t in enumerate(np.linspace(0.0, 2.0, 80)[:-1]):
        u = step(spec, grid, u, t, 2.0 / 79, theta=1.0)
        assert u.min() >= -1e-12
        assert u.max() <= cap * (1 + 1e-12)


def test_comparison_single_case():
    law = BoundaryLaw(L0=1.0, k=0.5, gamma=-0.3)
    grid = make_grid(40, 0.0)
    u0 = np.sin(np.pi * grid.nodes) ** 2
    v0 = u0 + 0.5 * np.sin(2 * np.pi * grid.nodes) ** 2
    spec = ProblemSpec(alpha=0.0, law=law, initial_datum=u0)
    u, v = u0, v0
    for i, t in enumerate(np.linspace(0.0, 1.5, 60)[:-1]):
        dt = 1.5 / 59
        u = step(spec, grid, u, t, dt, theta=1.0)
        v = step(spec, grid, v, t, dt, theta=1.0)
        assert (u - v).max() <= 1e-12


def test_weighted_energy_monotone():
    """The tracked weighted L2 norm is the discrete Lyapunov functional;
    it must not increase under implicit stepping."""
    for alpha, gamma in ((0.0, 0.5), (0.0, 0.0), (0.5, 2.0 / 3.0)):
        law = BoundaryLaw(L0=1.0, k=1.0, gamma=gamma)
        spec = ProblemSpec(alpha=alpha, law=law, initial_datum=sine)
        grid = make_grid(96, alpha)
        times = time_points("geometric", 15.0, 300, law)
        traj = solve_moving(spec, grid, times, theta=1.0, drift="upwind")
        assert np.all(np.diff(traj.weighted_l2) <= 1e-8 * traj.weighted_l2[0])


def test_second_order_convergence_quick():
    errs = []
    for N in (32, 64, 128):
        grid = make_grid(N, 0.0)
        spec = ProblemSpec(alpha=0.0, law=FROZEN, initial_datum=sine)
        times = time_points("uniform", 0.1, N, FROZEN)
        traj = solve_moving(spec, grid, times, theta=0.5)
        exact = np.exp(-np.pi**2 * 0.1) * np.sin(np.pi * grid.nodes)
        errs.append(np.abs(traj.snapshot_at(traj.times.size - 1) - exact).max())
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders > 1.7)
    assert np.all(orders < 2.3)


def test_heat_kernel_gaussian_semigroup():
    """Evolving a Gaussian must return the wider Gaussian, closed form."""
    a, s0 = 0.7, 0.35

    def z0(v):
        return np.exp(-(v**2) / (4 * a * s0))

    x = np.array([-1.3, -0.2, 0.0, 0.4, 2.1])
    t = 0.9
    got = heat_kernel_solution(z0, a, x, t, support=(-14.0, 14.0))
    exact = np.sqrt(s0 / (s0 + t)) * np.exp(-(x**2) / (4 * a * (s0 + t)))
    np.testing.assert_allclose(got, exact, rtol=1e-8)


def test_heat_kernel_sup_bound():
    # sup_x z(x,t) <= (4 pi a t)^{-1/2} * ||z0||_L1
    def z0(v):
        return np.maximum(0.0, 1.0 - np.abs(v))  # mass 1 triangle

    a, t = 1.0, 0.25
    x = np.linspace(-2, 2, 41)
    z = heat_kernel_solution(z0, a, x, t, support=(-1.0, 1.0))
    assert z.max() <= (4 * np.pi * a * t) ** -0.5 + 1e-12
    wide = np.linspace(-8, 8, 1601)
    zw = heat_kernel_solution(z0, a, wide, t, support=(-1.0, 1.0))
    assert np.trapezoid(zw, wide) == pytest.approx(1.0, rel=1e-6)


def test_initial_datum_validation():
    grid = make_grid(16, 0.0)
    bad = ProblemSpec(alpha=0.0, law=FROZEN, initial_datum=lambda x: x + 1.0)
    with pytest.raises(ValueError, match="vanish"):
        solve_moving(bad, grid, [0.0, 0.1])
    wrong_shape = ProblemSpec(alpha=0.0, law=FROZEN,
                              initial_datum=np.zeros(7))
    with pytest.raises(ValueError, match="shape"):
        solve_moving(wrong_shape, grid, [0.0, 0.1])


def test_spec_validation():
    with pytest.raises(ValueError):
        ProblemSpec(alpha=1.0, law=FROZEN, initial_datum=sine)
    with pytest.raises(ValueError):
        ProblemSpec(alpha=-0.1, law=FROZEN, initial_datum=sine)
    with pytest.raises(ValueError):
        ProblemSpec(alpha=0.0, law=FROZEN, initial_datum=sine,
                    diffusion_constant=0.0)
    with pytest.raises(ValueError):
        ProblemSpec(alpha=0.5, law=FROZEN, initial_datum=sine,
                    regularization_level=0)


def test_regularize_lifts_face_coefficient():
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=0.5)
    spec = ProblemSpec(alpha=0.5, law=law, initial_datum=sine)
    reg = regularize(spec, 3)
    assert reg.regularization_level == 3
    grid = make_grid(32, 0.5)
    lo0, _, _ = assemble_spatial_operator(spec, grid, 0.0)
    lo1, _, _ = assemble_spatial_operator(reg, grid, 0.0)
    i = 10
    expected = lo0[i] + (1.5 / 3) / (grid.spacing[i - 1] * grid.trap_weights[i])
    assert lo1[i] == pytest.approx(expected, rel=1e-13)
    with pytest.raises(ValueError):
        regularize(ProblemSpec(alpha=0.0, law=law, initial_datum=sine), 3)
    with pytest.raises(ValueError):
        regularize(spec, -1)


def test_time_points_policies():
    law = BoundaryLaw(L0=1.0, k=2.0, gamma=0.5)
    for policy in ("uniform", "geometric", "auto", "sclock"):
        t = time_points(policy, 10.0, 50, law)
        assert t[0] == 0.0 and t[-1] == 10.0
        assert np.all(np.diff(t) > 0)
    tg = time_points("geometric", 10.0, 50, law)
    ratios = np.diff(np.log1p(2.0 * tg))
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-8)
    # auto is geometric
    np.testing.assert_array_equal(time_points("auto", 10.0, 50, law), tg)
    # sclock at exactly critical growth degenerates to geometric
    np.testing.assert_array_equal(time_points("sclock", 10.0, 50, law, 0.0), tg)
    # sclock subcritical is uniform in the diffusion clock
    law2 = BoundaryLaw(L0=1.0, k=1.0, gamma=0.25)
    ts = time_points("sclock", 10.0, 50, law2, 0.0)
    s = alpha_weight(law2, ts)
    np.testing.assert_allclose(np.diff(s), np.diff(s)[0], rtol=1e-10)
    with pytest.raises(ValueError):
        time_points("nope", 10.0, 50, law)
    with pytest.raises(ValueError):
        time_points("uniform", -1.0, 50, law)
    with pytest.raises(ValueError):
        time_points("uniform", 10.0, 0, law)


def test_stop_floor_truncates():
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=-0.5)
    spec = ProblemSpec(alpha=0.0, law=law, initial_datum=sine)
    grid = make_grid(64, 0.0)
    times = time_points("geometric", 100.0, 2000, law)
    traj = solve_moving(spec, grid, times, theta=1.0, stop_floor=1e-8)
    assert traj.times.size < times.size
    assert traj.sup_norms[-1] <= 1e-8 * traj.sup_norms[0]
    assert traj.sup_norms[-2] > 1e-8 * traj.sup_norms[0]
    # the truncated tail still carries a final snapshot
    assert traj.snapshot_indices[-1] == traj.times.size - 1


def test_trajectory_csv_round_trip(tmp_path):
    law = BoundaryLaw(L0=1.5, k=1.0, gamma=0.5)
    spec = ProblemSpec(alpha=0.0, law=law,
                       initial_datum=lambda xi: np.sin(np.pi * xi / 1.5))
    grid = make_grid(32, 0.0)
    traj = solve_moving(spec, grid, time_points("uniform", 1.0, 20, law))
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "l_t", "sup_norm", "l2_norm", "weighted_l2"]
    got = np.array([[float(c) for c in row] for row in rows[1:]])
    np.testing.assert_array_equal(got[:, 0], traj.times)
    np.testing.assert_array_equal(got[:, 2], traj.sup_norms)
    raw = path.read_bytes()
    assert b"\r" not in raw


def test_eval_physical_scales_coordinates():
    law = BoundaryLaw(L0=2.0, k=1.0, gamma=0.5)
    spec = ProblemSpec(alpha=0.0, law=law,
                       initial_datum=lambda xi: np.sin(np.pi * xi / 2.0))
    grid = make_grid(64, 0.0)
    traj = solve_moving(spec, grid, time_points("uniform", 3.0, 30, law),
                        max_snapshots=1000)
    row = traj.snapshot_indices.size - 1
    idx = traj.snapshot_indices[row]
    l_end = traj.lengths[idx]
    xi = np.array([0.25, 0.5, 0.75]) * l_end
    np.testing.assert_allclose(
        traj.eval_physical(xi, row),
        np.interp([0.25, 0.5, 0.75], grid.nodes, traj.snapshots[row]),
        rtol=1e-14)
