import math

import numpy as np
import pytest
from scipy import integrate

from src.errors import ConfigError
from src.models import (
    ProportionalParams,
    VasicekParams,
    normal_cdf,
    proportional_model,
    vasicek_bond_price,
    vasicek_caplet_price,
    vasicek_log_bond,
    vasicek_model,
)

TWO_FACTOR = ProportionalParams(sigmas=(0.1043, 0.1719), kappas=(0.052, 0.035), gamma_cap=1.0)


def test_vasicek_sigma_at_zero_time_to_maturity(vasicek):
    assert vasicek.sigma(0, 0.7, 0.7, 0.3) == pytest.approx(0.02)


def test_vasicek_sigma_ignores_level(vasicek):
    T = np.linspace(0.0, 6.0, 13)
    assert np.array_equal(vasicek.sigma(0, 0.5, T, np.full(13, -1.0)), vasicek.sigma(0, 0.5, T, np.full(13, 3.0)))


def test_vasicek_sigma_without_levels(vasicek):
    T = np.linspace(0.0, 6.0, 13)
    assert not vasicek.state_dependent
    assert proportional_model(TWO_FACTOR).state_dependent
    assert vasicek.sigma(0, 0.5, T, None).shape == (13,)
    assert np.array_equal(vasicek.sigma_matrix(0.5, T, None)[:, 0], vasicek.sigma(0, 0.5, T, np.zeros((4, 13)))[0])


def test_vasicek_initial_curve(vasicek):
    assert vasicek.f0(0.0) == pytest.approx(0.05)
    decay = math.exp(-6.0)
    expected = decay * 0.05 + (1 - decay) - 0.0002 * (1 - decay) ** 2
    assert vasicek.f0(6.0) == pytest.approx(expected, rel=1e-14)


def test_proportional_sigma_zero_level():
    model = proportional_model(TWO_FACTOR)
    assert model.d == 2
    assert model.sigma(1, 0.0, 2.0, 0.0) == 0.0
    assert model.sigma(0, 0.0, 2.0, -0.01) == 0.0


def test_proportional_sigma_capped():
    model = proportional_model(TWO_FACTOR)
    capped = 0.1043 * math.exp(-0.052 * 1.5)
    assert model.sigma(0, 0.5, 2.0, 3.0) == pytest.approx(capped)
    assert model.cap_engaged(np.array([0.05, 1.2]))
    assert not model.cap_engaged(np.array([0.05, 0.06]))


def test_proportional_initial_curve():
    model = proportional_model(TWO_FACTOR)
    assert model.f0(0.0) == pytest.approx(math.log(150.0) / 100.0)
    assert model.f0(0.0) == pytest.approx(0.0501063529, abs=1e-10)


def test_sigma_matrix_stacks_factors():
    model = proportional_model(TWO_FACTOR)
    z = np.full((3, 5), 0.05)
    assert model.sigma_matrix(0.0, np.linspace(0, 2, 5), z).shape == (3, 5, 2)


def test_invalid_parameters():
    with pytest.raises(ConfigError):
        VasicekParams(sigma=0.02, kappa=0.0, r0=0.05, theta=1.0)
    with pytest.raises(ConfigError):
        ProportionalParams(sigmas=(0.1,), kappas=(0.05, 0.03))
    with pytest.raises(ConfigError):
        ProportionalParams(sigmas=(0.1,), kappas=(0.05,), gamma_cap=0.0)


def test_bond_price_at_valuation_date(vasicek_params):
    assert vasicek_bond_price(vasicek_params, 0.0, 0.0) == 1.0


def test_bond_price_decreases_with_maturity(vasicek_params):
    prices = [vasicek_bond_price(vasicek_params, 0.0, T) for T in np.linspace(0.5, 6.0, 12)]
    assert all(b < a for a, b in zip(prices, prices[1:]))


def test_bond_price_matches_composite_simpson(vasicek_params, vasicek):
    u = np.linspace(0.0, 1.0, 20001)
    numeric = integrate.simpson(vasicek.f0(u), x=u)
    assert vasicek_log_bond(vasicek_params, 0.0, 1.0) == pytest.approx(numeric, abs=1e-10)


def test_bond_price_matches_adaptive_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p = VasicekParams(
            sigma=rng.uniform(0.0, 0.05),
            kappa=rng.uniform(0.05, 2.0),
            r0=rng.uniform(0.0, 0.1),
            theta=rng.uniform(0.0, 1.0),
        )
        T = rng.uniform(0.1, 10.0)
        model = vasicek_model(p)
        numeric, _ = integrate.quad(lambda u: float(model.f0(u)), 0.0, T, epsabs=1e-13, epsrel=1e-13)
        assert vasicek_log_bond(p, 0.0, T) == pytest.approx(numeric, abs=1e-10)


def test_caplet_zero_volatility_is_intrinsic():
    p = VasicekParams(sigma=0.0, kappa=1.0, r0=0.05, theta=1.0)
    intrinsic = max(vasicek_bond_price(p, 0.0, 1.0) - 1.15 * vasicek_bond_price(p, 0.0, 6.0), 0.0)
    assert vasicek_caplet_price(p, 0.0, 1.0, 6.0, 0.03) == intrinsic


def test_caplet_small_volatility_approaches_intrinsic():
    p = VasicekParams(sigma=1e-8, kappa=1.0, r0=0.05, theta=1.0)
    intrinsic = vasicek_bond_price(p, 0.0, 1.0) - 1.15 * vasicek_bond_price(p, 0.0, 6.0)
    assert vasicek_caplet_price(p, 0.0, 1.0, 6.0, 0.03) == pytest.approx(intrinsic, abs=1e-9)


def test_caplet_price_bounds(vasicek_params):
    price = vasicek_caplet_price(vasicek_params, 0.0, 1.0, 6.0, 0.03)
    assert 0.0 < price < vasicek_bond_price(vasicek_params, 0.0, 1.0)


def test_caplet_rejects_inverted_dates(vasicek_params):
    with pytest.raises(ConfigError):
        vasicek_caplet_price(vasicek_params, 0.0, 6.0, 1.0, 0.03)


def test_normal_cdf():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-12)
    for x in np.linspace(-8.0, 8.0, 33):
        assert normal_cdf(x) + normal_cdf(-x) == pytest.approx(1.0, abs=1e-14)
    assert normal_cdf(9.0) == 1.0
    assert normal_cdf(-9.0) == 0.0
