"""Boundary laws, closed-form weights, and admissibility bookkeeping."""

import numpy as np
import pytest
from scipy.integrate import quad

from decaylab.geometry import (
    BoundaryLaw,
    CoefficientSchedule,
    WeightFunction,
    admissibility_margin,
    admissible_epsilon,
    alpha_weight,
    beta_critical,
    beta_subcritical,
    boundary_length,
    critical_epsilon_cap,
    critical_law,
    gamma_critical,
    physical_to_reference,
    reference_to_physical,
    transformed_coefficients,
)

SEED = 20260822


def random_law(rng, gamma_lo=-1.0, gamma_hi=1.2):
    return BoundaryLaw(
        L0=float(rng.uniform(0.4, 2.5)),
        k=float(rng.uniform(0.2, 3.0)),
        gamma=float(rng.uniform(gamma_lo, gamma_hi)),
    )


def test_boundary_length_values():
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=0.5)
    assert law.length(0.0) == 1.0
    assert law.length(3.0) == 2.0
    assert boundary_length(law, 8.0) == pytest.approx(3.0, rel=1e-15)
    shrink = BoundaryLaw(L0=2.0, k=1.0, gamma=-1.0)
    assert shrink.length(1.0) == pytest.approx(1.0, rel=1e-15)
    out = law.length(np.array([0.0, 3.0, 8.0]))
    np.testing.assert_allclose(out, [1.0, 2.0, 3.0], rtol=1e-15)


def test_boundary_law_validation():
    with pytest.raises(ValueError):
        BoundaryLaw(L0=0.0, k=1.0, gamma=0.5)
    with pytest.raises(ValueError):
        BoundaryLaw(L0=1.0, k=-2.0, gamma=0.5)
    with pytest.raises(ValueError):
        BoundaryLaw(L0=1.0, k=1.0, gamma=0.5).length(-0.1)


def test_alpha_weight_critical_branch():
    # at gamma = 1/2 the accumulated inverse-square length is exactly
    # log(1+k*t)/(L0**2*k)
    law = BoundaryLaw(L0=1.0, k=1.0, gamma=0.5)
    assert alpha_weight(law, 3.0) == pytest.approx(np.log(4.0), rel=1e-14)
    law2 = BoundaryLaw(L0=2.0, k=0.5, gamma=0.5)
    assert alpha_weight(law2, 6.0) == pytest.approx(np.log(4.0) / 2.0, rel=1e-14)


def test_alpha_weight_quadrature_oracle():
    """Closed form vs direct quadrature of l**-2 over 100 random laws."""
    rng = np.random.default_rng(SEED)
    for _ in range(100):
        law = random_law(rng)
        t = float(rng.uniform(0.1, 30.0))
        ref, err = quad(lambda s: law.length(s) ** -2, 0.0, t,
                        epsabs=0.0, epsrel=1e-13, limit=200)
        got = alpha_weight(law, t)
        assert got == pytest.approx(ref, rel=1e-10)


def test_alpha_weight_branch_continuity():
    for law_args in ((1.0, 1.0), (1.7, 0.6)):
        L0, k = law_args
        lo = alpha_weight(BoundaryLaw(L0, k, 0.5 - 1e-6), 12.0)
        at = alpha_weight(BoundaryLaw(L0, k, 0.5), 12.0)
        hi = alpha_weight(BoundaryLaw(L0, k, 0.5 + 1e-6), 12.0)
        assert lo == pytest.approx(at, rel=1e-4)
        assert hi == pytest.approx(at, rel=1e-4)
        assert lo >= at >= hi  # decreasing in gamma


def test_alpha_weight_monotone_in_t():
    rng = np.random.default_rng(SEED + 1)
    for _ in range(20):
        law = random_law(rng)
        t = np.linspace(0.0, 50.0, 200)
        w = WeightFunction("alpha-integral", law)(t)
        assert w[0] == 0.0
        assert np.all(np.diff(w) > 0)


def test_gamma_critical():
    assert gamma_critical(0.0) == 0.5
    assert gamma_critical(0.5) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert gamma_critical(0.75) == pytest.approx(0.8, rel=1e-15)
    with pytest.raises(ValueError):
        gamma_critical(1.0)
    with pytest.raises(ValueError):
        gamma_critical(-0.2)
    law = BoundaryLaw(1.0, 2.0, 0.1)
    crit = critical_law(law, 0.5)
    assert crit.gamma == pytest.approx(2.0 / 3.0)
    assert (crit.L0, crit.k) == (1.0, 2.0)


def test_transformed_coefficients():
    sched = transformed_coefficients(BoundaryLaw(1.0, 1.0, 0.5), 0.0)
    assert sched.p(3.0) == pytest.approx(0.25, rel=1e-14)
    assert sched.q(3.0) == pytest.approx(-0.125, rel=1e-14)
    # degenerate exponent enters only through p's power
    sched2 = transformed_coefficients(BoundaryLaw(1.0, 1.0, 0.5), 0.5)
    assert sched2.p(3.0) == pytest.approx(2.0 ** -1.5, rel=1e-14)
    assert sched2.q(3.0) == sched.q(3.0)
    # frozen domain: p constant, q identically zero
    frozen = transformed_coefficients(BoundaryLaw(2.0, 1.0, 0.0), 0.0)
    assert frozen.p(17.0) == 0.25
    assert frozen.q(17.0) == 0.0


def test_beta_weights_values_and_derivatives():
    alpha, eps = 0.5, 0.02
    law = BoundaryLaw(1.0, 1.0, 0.3)
    beta = beta_subcritical(alpha, law, eps, 0.0)
    m = law.gamma * (alpha - 2.0) + 1.0
    t = 4.0
    assert beta(t) == pytest.approx(eps / (4 * law.k * m) * (1 + law.k * t) ** m,
                                    rel=1e-14)
    h = 1e-6
    fd = (beta(t + h) - beta(t - h)) / (2 * h)
    assert beta.derivative(t) == pytest.approx(fd, rel=1e-8)

    crit = beta_critical(alpha, BoundaryLaw(1.0, 1.0, gamma_critical(alpha)),
                         eps)
    assert crit(t) == pytest.approx(eps * np.log(5.0), rel=1e-14)
    fd = (crit(t + h) - crit(t - h)) / (2 * h)
    assert crit.derivative(t) == pytest.approx(fd, rel=1e-8)


def test_beta_weight_rejections():
    with pytest.raises(ValueError):
        beta_subcritical(0.5, BoundaryLaw(1.0, 1.0, 2.0 / 3.0), 0.01, 0.0)
    with pytest.raises(ValueError):
        beta_subcritical(0.5, BoundaryLaw(1.0, 1.0, 0.3), -0.5, 0.0)
    with pytest.raises(ValueError):
        beta_critical(0.5, BoundaryLaw(1.0, 1.0, 0.3), 0.01)
    cap = critical_epsilon_cap(0.5, BoundaryLaw(1.0, 1.0, 2.0 / 3.0))
    with pytest.raises(ValueError):
        beta_critical(0.5, BoundaryLaw(1.0, 1.0, 2.0 / 3.0), 1.01 * cap)


def test_critical_epsilon_cap_value():
    assert critical_epsilon_cap(0.5, BoundaryLaw(2.0, 1.0, 2.0 / 3.0)) == \
        pytest.approx(0.25 * 0.25 * 2.0 ** -1.5, rel=1e-15)
    assert critical_epsilon_cap(0.0, BoundaryLaw(1.0, 1.0, 0.5)) == 0.25


def test_structural_weights():
    gauss = WeightFunction("selfsimilar-gaussian", BoundaryLaw(1.0, 1.0, 0.5),
                           a=1.0)
    assert gauss(1.0) == pytest.approx(np.exp(0.25), rel=1e-15)
    stretched = WeightFunction("critical-stretched",
                               BoundaryLaw(1.0, 1.0, 2.0 / 3.0), alpha=0.5)
    assert stretched(1.0) == pytest.approx(np.exp(1.0 / 2.25), rel=1e-15)
    assert stretched(0.0) == 1.0
    with pytest.raises(ValueError):
        WeightFunction("no-such-kind", BoundaryLaw(1.0, 1.0, 0.5))(1.0)
    with pytest.raises(ValueError):
        gauss.derivative(1.0)


def test_admissible_epsilon_frozen_domain():
    # constant headroom: the whole infimum is admissible and the start
    # time is zero
    eps, t0 = admissible_epsilon(0.0, BoundaryLaw(1.0, 1.0, 0.0))
    assert (eps, t0) == (1.0, 0.0)
    eps2, t0_2 = admissible_epsilon(0.5, BoundaryLaw(1.0, 1.0, 0.0))
    assert eps2 == pytest.approx(0.25, rel=1e-12)
    assert t0_2 == 0.0


def test_admissible_epsilon_margin_holds():
    """Returned pairs must make the pointwise inequality hold for t >= t0."""
    rng = np.random.default_rng(SEED + 2)
    for _ in range(15):
        alpha = float(rng.uniform(0.0, 0.7))
        gc = gamma_critical(alpha)
        gamma = float(rng.uniform(-0.8, 0.45 * gc))
        law = BoundaryLaw(float(rng.uniform(0.6, 1.8)),
                          float(rng.uniform(0.3, 1.5)), gamma)
        eps, t0 = admissible_epsilon(alpha, law)
        sched = transformed_coefficients(law, alpha)
        weight = beta_subcritical(alpha, law, eps, t0)
        t = np.linspace(t0, t0 + 2e3, 10_000)
        margin = admissibility_margin(weight, sched, t)
        assert margin.min() >= -1e-12 * max(1.0, np.abs(margin).max())


def test_admissible_epsilon_rejects_bad_regimes():
    with pytest.raises(ValueError):
        admissible_epsilon(0.5, BoundaryLaw(1.0, 1.0, 2.0 / 3.0))
    with pytest.raises(ValueError):
        admissible_epsilon(0.5, BoundaryLaw(1.0, 1.0, 0.9))
    # admissible start exists but far beyond the default search span
    with pytest.raises(ValueError):
        admissible_epsilon(0.5, BoundaryLaw(1.0, 1.0, 0.5))


def test_coordinate_transform_round_trip():
    rng = np.random.default_rng(SEED + 3)
    law = random_law(rng)
    t = 7.3
    xi = rng.uniform(0.0, law.length(t), size=40)
    x = physical_to_reference(xi, law, t)
    assert np.all((x >= 0) & (x <= 1))
    np.testing.assert_allclose(reference_to_physical(x, law, t), xi,
                               rtol=1e-14)
