import pytest

from contract import SpreadContract
from errors import ConfigError, DomainError
from greeks import (
    FrozenExtended,
    compare_reports,
    freeze_bjerksund_stensland,
    freeze_extended,
    frozen_price,
    greeks_closed_form,
    greeks_finite_difference,
    pde_residuals,
)
from pricers import price_bjerksund_stensland, price_extended

FD_TOLERANCES = {
    "dF1": 1e-6, "dF2": 1e-6, "vega1": 1e-6, "vega2": 1e-6, "theta_T": 1e-6,
    "rho_r": 1e-6, "rho_corr": 1e-6, "d2F1F1": 1e-4, "d2F1F2": 1e-4, "d2F2F2": 1e-4,
}


@pytest.fixture
def frozen(base_contract):
    return freeze_extended(base_contract.replace(k=15.0, rho=0.3))


def test_frozen_price_matches_the_extended_formula(base_contract):
    for rho in (-0.5, 0.0, 0.3, 0.8):
        c = base_contract.replace(k=15.0, rho=rho)
        assert frozen_price(freeze_extended(c)) == pytest.approx(price_extended(c).diagnostics["raw_value"], rel=1e-10)


def test_frozen_price_is_the_unfloored_formula():
    c = SpreadContract(f1=51.99, f2=133.30, sigma1=0.144, sigma2=0.478, rho=-0.023, r=0.05, t=1.56, k=37.49)
    result = price_extended(c)
    assert result.value == 0.0
    assert frozen_price(freeze_extended(c)) == pytest.approx(result.diagnostics["raw_value"], rel=1e-10)


def test_bjerksund_stensland_freeze(base_contract):
    c = base_contract.replace(k=25.0, rho=-0.5)
    fx = freeze_bjerksund_stensland(c)
    assert fx.levels() == pytest.approx((c.f2 + c.k,) * 3)
    assert frozen_price(fx) == pytest.approx(price_bjerksund_stensland(c).value, rel=1e-12)


def test_report_price_equals_frozen_price(frozen):
    assert greeks_closed_form(frozen).price == pytest.approx(frozen_price(frozen), rel=1e-14)


def test_closed_form_matches_finite_differences(frozen):
    gaps = compare_reports(greeks_closed_form(frozen), greeks_finite_difference(frozen, richardson=True))
    for name, tolerance in FD_TOLERANCES.items():
        assert gaps[name] < tolerance, name


@pytest.mark.parametrize("k,rho", [(5.0, -0.5), (15.0, 0.8), (25.0, 0.0)])
def test_pde_residuals_vanish(base_contract, k, rho):
    fx = freeze_extended(base_contract.replace(k=k, rho=rho))
    res1, res2 = pde_residuals(fx)
    assert res1 < 1e-10
    assert res2 < 1e-10


def test_pde_residuals_on_random_contracts(random_grid):
    for c in random_grid:
        res1, res2 = pde_residuals(freeze_extended(c))
        scale = c.f1 + c.f2 + c.k
        assert res1 < 1e-11 * scale
        assert res2 < 1e-11 * scale


def test_signs_of_first_order_greeks(frozen):
    report = greeks_closed_form(frozen)
    assert 0 < report.dF1 < 1
    assert -1 < report.dF2 < 0
    assert report.vega1 > 0
    assert report.rho_r == pytest.approx(-frozen.contract.t * report.price)


def test_gamma_positive_near_the_money(base_contract):
    c = base_contract.replace(k=base_contract.f1 - base_contract.f2, rho=0.3)
    assert greeks_closed_form(freeze_extended(c)).d2F1F1 > 0


def test_frozen_fractions_must_be_valid(base_contract):
    with pytest.raises(DomainError):
        FrozenExtended(contract=base_contract.replace(k=5.0), b1=0.0, b2=0.5, b3=0.5)
    with pytest.raises(DomainError):
        freeze_extended(base_contract.replace(k=-5.0))


def test_finite_difference_step_bounds(frozen):
    with pytest.raises(ConfigError):
        greeks_finite_difference(frozen, rel_step=0.5)


GRID_STRIKES = [2.0, 5.0, 10.0, 15.0, 20.0]
GRID_RHOS = [-0.8, -0.4, 0.0, 0.4, 0.8]
GRID_SIGMA2 = [0.15, 0.4, 0.9]
FIRST_ORDER = ["dF1", "dF2", "vega1", "vega2", "theta_T", "rho_r", "rho_corr"]
SECOND_ORDER = ["d2F1F1", "d2F1F2", "d2F2F2"]


@pytest.mark.slow
@pytest.mark.parametrize("sigma2", GRID_SIGMA2)
@pytest.mark.parametrize("rho", GRID_RHOS)
@pytest.mark.parametrize("k", GRID_STRIKES)
def test_strike_correlation_volatility_grid(base_contract, k, rho, sigma2):
    fx = freeze_extended(base_contract.replace(k=k, rho=rho, sigma2=sigma2))
    analytic = greeks_closed_form(fx)
    numeric = greeks_finite_difference(fx, richardson=True)

    for names, tolerance in ((FIRST_ORDER, 1e-5), (SECOND_ORDER, 1e-3)):
        for name in names:
            a, n = getattr(analytic, name), getattr(numeric, name)
            assert abs(a - n) <= tolerance * max(abs(a), 1e-4), name

    res1, res2 = pde_residuals(fx, analytic)
    assert res1 <= 1e-8 * max(analytic.price, 1.0)
    assert res2 <= 1e-8 * max(analytic.price, 1.0)
    assert analytic.rho_r == pytest.approx(-fx.contract.t * analytic.price, rel=1e-14)
