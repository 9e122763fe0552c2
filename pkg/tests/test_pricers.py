"""
Pricer tests: golden benchmark values, cross-method identities and domain checks.

Golden prices come from the published benchmark tables (base market
r=0.05, T=1, F1=112.22, F2=103.05, σ1=0.1, σ2=0.15; rows K, columns ρ).
Four-decimal tables are compared at 6e-5, eight-decimal ones at 5e-7.
"""

import math

import pytest

from config import DiscretizationConfig, QuadratureConfig, SpreadDefaults
from contract import SpreadContract, parity_normalize
from errors import AccuracyError, DomainError
from pricers import (
    bjerksund_stensland_value,
    bs_equivalent_params,
    bs_point_params,
    cd_lower_bound,
    default_extended_params,
    digital_probabilities,
    price_bachelier,
    price_bjerksund_stensland,
    price_black,
    price_carmona_durrleman,
    price_cd_result,
    price_constant_slope,
    price_discretized,
    price_extended,
    price_kirk,
    price_margrabe,
    price_quadrature_oracle,
    price_sum_option,
)
from boundary import CurveId, slope_fraction

RHOS = SpreadDefaults.TABLE_RHOS

MARGRABE_ROW = [15.1332, 13.9180, 12.5237, 11.5618, 9.6325, 8.8212]

BS_ROWS = {
    5.0: [12.2200, 10.9562, 9.4453, 8.3674, 5.9670, 4.5462],
    15.0: [7.4977, 6.2421, 4.7443, 3.6796, 1.3421, 0.1017],
    25.0: [4.1807, 3.1298, 1.9617, 1.2194, 0.1032, 0.0000],
}

KIRK_ROWS = {
    5.0: [12.2183, 10.9543, 9.4431, 8.3649, 5.9628, 4.5353],
    15.0: [7.5135, 6.2559, 4.7562, 3.6907, 1.3545, 0.1257],
    25.0: [4.2268, 3.1686, 1.9923, 1.2441, 0.1124, 0.0000],
}

# Eight-decimal rows of the discretized pricer (b=5, N=3000)
DISCRETIZED_ROWS = {
    0.0: [15.13321639, 13.91800429, 12.52373725, 11.56183922, 9.63252501, 8.82120141],
    5.0: [12.22000016, 10.95620391, 9.44533361, 8.36741249, 5.96702488, 4.54620020],
    15.0: [7.49782906, 6.24223324, 4.7444681, 3.67981791, 1.3424516, 0.10249892],
    25.0: [4.1807518, 3.13000410, 1.96209915, 1.21996421, 0.10413200, 0.00000000],
}

# Printed with a digit short of the rest of the table; compared loosely
TYPO_CELLS = {(15.0, 0.0), (15.0, 0.8), (25.0, -0.99)}

# Far out of the money: the Bjerksund-Stensland and extended exercise sets are badly placed
FLOORED_CONTRACT = {"f1": 51.99, "f2": 133.30, "sigma1": 0.144, "sigma2": 0.478, "rho": -0.023,
                    "r": 0.05, "t": 1.56, "k": 37.49}

HIGH_VOL_K25 = {
    "discretized": [28.4438, 26.6541, 24.6953, 23.4450, 21.2123, 20.3073],
    "kirk": [29.4191, 27.5847, 25.5840, 24.3110, 22.0454, 21.1300],
    "bs": [28.3588, 26.5640, 24.5981, 23.3423, 21.0965, 20.1847],
    "extended": [28.3241, 26.5466, 24.5981, 23.3529, 21.1263, 20.2226],
}


def grid_cells(rows):
    return [(k, rho, value) for k, values in rows.items() for rho, value in zip(RHOS, values)]


class TestGoldenTables:

    @pytest.mark.parametrize("rho,expected", list(zip(RHOS, MARGRABE_ROW)))
    def test_margrabe_row(self, base_contract, rho, expected):
        assert price_margrabe(base_contract.replace(rho=rho)).value == pytest.approx(expected, abs=6e-5)

    @pytest.mark.parametrize("k,rho,expected", grid_cells(BS_ROWS))
    def test_bjerksund_stensland_rows(self, base_contract, k, rho, expected):
        c = base_contract.replace(k=k, rho=rho)
        assert price_bjerksund_stensland(c).value == pytest.approx(expected, abs=6e-5)

    @pytest.mark.parametrize("k,rho,expected", grid_cells(KIRK_ROWS))
    def test_kirk_rows(self, base_contract, k, rho, expected):
        assert price_kirk(base_contract.replace(k=k, rho=rho)).value == pytest.approx(expected, abs=6e-5)

    @pytest.mark.parametrize("k,rho,expected", grid_cells(DISCRETIZED_ROWS))
    def test_discretized_rows(self, base_contract, k, rho, expected):
        value = price_discretized(base_contract.replace(k=k, rho=rho)).value
        tolerance = 1e-3 if (k, rho) in TYPO_CELLS else 5e-7
        assert value == pytest.approx(expected, abs=tolerance)

    def test_extended_near_perfect_correlation(self, base_contract):
        c = base_contract.replace(k=15.0, rho=0.99)
        assert price_extended(c).value == pytest.approx(0.1016, abs=1e-4)

    @pytest.mark.parametrize("method", sorted(HIGH_VOL_K25))
    def test_high_volatility_row(self, high_vol_contract, method):
        pricers = {
            "discretized": price_discretized,
            "kirk": price_kirk,
            "bs": price_bjerksund_stensland,
            "extended": price_extended,
        }
        for rho, expected in zip(RHOS, HIGH_VOL_K25[method]):
            value = pricers[method](high_vol_contract.replace(k=25.0, rho=rho)).value
            assert value == pytest.approx(expected, abs=1e-4), (method, rho)


class TestExactIdentities:

    @pytest.mark.parametrize("rho", [-0.9, 0.0, 0.6])
    def test_exchange_option_methods_agree(self, base_contract, rho):
        c = base_contract.replace(k=0.0, rho=rho)
        exact = price_margrabe(c).value
        assert price_bjerksund_stensland(c).value == pytest.approx(exact, abs=1e-12)
        assert price_extended(c).value == pytest.approx(exact, abs=1e-10)
        assert price_carmona_durrleman(c).value == pytest.approx(exact, abs=1e-9)
        assert price_quadrature_oracle(c).value == pytest.approx(exact, abs=1e-8)
        assert price_discretized(c).value == pytest.approx(exact, abs=1e-4)

    def test_black_reduction(self, base_contract):
        c = base_contract.replace(f2=0.0, k=100.0, sigma1=0.25)
        black = price_black(c).value
        assert price_kirk(c).value == pytest.approx(black, rel=1e-12)
        assert price_quadrature_oracle(c).value == pytest.approx(black, abs=1e-8)
        assert price_discretized(c).value == pytest.approx(black, abs=1e-4)

    def test_black_needs_zero_second_forward(self, base_contract):
        with pytest.raises(DomainError):
            price_black(base_contract)

    @pytest.mark.parametrize("rho", [-0.99, -0.3, 0.5, 0.99])
    def test_parity_with_quadrature(self, base_contract, rho):
        c = base_contract.replace(k=-10.0, rho=rho)
        normalized, adjust = parity_normalize(c)
        direct = price_quadrature_oracle(c).value
        assert direct == pytest.approx(price_quadrature_oracle(normalized).value + adjust, abs=1e-8)

    @pytest.mark.parametrize("anchor", [-1.5, 0.0, 2.0])
    def test_constant_slope_reproduces_bjerksund_stensland(self, base_contract, anchor):
        c = base_contract.replace(k=15.0, rho=0.3)
        b = c.f2 / (c.f2 + c.k)
        assert price_constant_slope(c, b, anchor).value == pytest.approx(
            price_bjerksund_stensland(c).value, rel=1e-10)

    def test_constant_slope_is_anchor_independent(self, base_contract):
        c = base_contract.replace(k=15.0, rho=-0.5)
        values = [price_constant_slope(c, 0.8, anchor).value for anchor in (-2.0, 0.0, 3.0)]
        assert max(values) - min(values) < 1e-10

    def test_extended_at_bs_point_is_bjerksund_stensland(self, base_contract):
        c = base_contract.replace(k=15.0, rho=0.3)
        assert price_extended(c, bs_point_params(c)).value == pytest.approx(
            price_bjerksund_stensland(c).value, rel=1e-10)

    def test_default_params_equalize_slope_fractions(self, base_contract):
        c = base_contract.replace(k=15.0, rho=-0.5)
        p = default_extended_params(c)
        b1 = slope_fraction(c, CurveId.C1, p.lambda_)
        b2 = slope_fraction(c, CurveId.C2, p.mu)
        b3 = slope_fraction(c, CurveId.C3, p.gamma)
        assert b1 == pytest.approx(b2, abs=1e-12)
        assert b1 == pytest.approx(b3, abs=1e-12)

    def test_digital_decomposition(self, base_contract):
        c = base_contract.replace(k=5.0, rho=0.3)
        c1, c2, c3 = digital_probabilities(c)
        assert all(0.0 <= p <= 1.0 for p in (c1, c2, c3))
        assembled = c.discount * (c.f1 * c1 - c.f2 * c2 - c.k * c3)
        assert assembled == pytest.approx(price_quadrature_oracle(c).value, abs=1e-7)


class TestPriceFloor:

    def test_negative_formula_values_are_floored(self):
        c = SpreadContract(**FLOORED_CONTRACT)
        for result in (price_bjerksund_stensland(c), price_extended(c)):
            assert result.diagnostics["raw_value"] < 0, result.method
            assert result.value == 0.0
        assert price_quadrature_oracle(c).value >= 0.0

    def test_positive_values_pass_through(self, base_contract):
        c = base_contract.replace(k=15.0, rho=0.3)
        for result in (price_bjerksund_stensland(c), price_extended(c), price_cd_result(c), price_discretized(c)):
            assert result.value == result.diagnostics["raw_value"], result.method


class TestCarmonaDurrleman:

    @pytest.mark.parametrize("rho", [-0.5, 0.0, 0.8])
    def test_bs_point_reproduces_bjerksund_stensland(self, base_contract, rho):
        c = base_contract.replace(k=15.0, rho=rho)
        theta0, d0 = bs_equivalent_params(c)
        b = c.f2 / (c.f2 + c.k)
        assert cd_lower_bound(c, theta0, d0) == pytest.approx(
            bjerksund_stensland_value(c, b, c.f2 + c.k), rel=1e-12)

    def test_bs_direction_at_zero_correlation(self, base_contract):
        c = base_contract.replace(k=15.0, rho=0.0)
        theta0, _ = bs_equivalent_params(c)
        b = c.f2 / (c.f2 + c.k)
        s = math.sqrt(c.sigma1 ** 2 + (c.sigma2 * b) ** 2)
        assert math.cos(theta0) == pytest.approx(-c.sigma2 * b / s, abs=1e-12)

    def test_first_order_conditions_hold(self, base_contract):
        solution = price_carmona_durrleman(base_contract.replace(k=15.0, rho=0.3))
        assert solution.foc_residual <= 1e-9
        assert solution.starts == 5

    def test_lower_bound_ordering_on_random_contracts(self, random_grid):
        for c in random_grid:
            bs = price_bjerksund_stensland(c).value
            cd = price_carmona_durrleman(c).value
            oracle = price_quadrature_oracle(c).value
            assert bs <= cd + 1e-10
            assert cd <= oracle + 1e-7

    def test_perfect_correlation_is_rejected(self, base_contract):
        with pytest.raises(DomainError):
            price_carmona_durrleman(base_contract.replace(k=5.0, rho=1.0))


class TestDiscretized:

    def test_agrees_with_quadrature_on_the_table_grid(self, base_contract):
        for k in (0.0, 5.0, 15.0, 25.0):
            for rho in RHOS:
                c = base_contract.replace(k=k, rho=rho)
                assert price_discretized(c).value == pytest.approx(
                    price_quadrature_oracle(c).value, abs=1e-4), (k, rho)

    @pytest.mark.slow
    def test_wide_fine_grid_matches_quadrature(self, make_random_contracts):
        cfg = DiscretizationConfig(b=8.0, n=6000)
        for c in make_random_contracts(seed=7, count=25):
            tolerance = 1e-6 * (c.f1 + c.f2 + abs(c.k))
            assert price_discretized(c, cfg).value == pytest.approx(
                price_quadrature_oracle(c).value, abs=tolerance)

    @pytest.mark.parametrize("k", [0.0, 5.0, 15.0, 25.0])
    def test_error_is_nonincreasing_in_cell_count(self, base_contract, k):
        # b=8 keeps the truncation floor below the N-dependence
        for rho in RHOS:
            c = base_contract.replace(k=k, rho=rho)
            oracle = price_quadrature_oracle(c).value
            errors = [abs(price_discretized(c, DiscretizationConfig(b=8.0, n=n)).value - oracle)
                      for n in (100, 300, 1000, 3000)]
            for coarse, fine in zip(errors, errors[1:]):
                assert fine <= coarse + 1e-9, (rho, errors)

    @pytest.mark.parametrize("rho", [-1.0, 1.0])
    def test_degenerate_correlation_is_rejected(self, base_contract, rho):
        with pytest.raises(DomainError):
            price_discretized(base_contract.replace(k=5.0, rho=rho))


class TestBachelierAndDomains:

    def test_bachelier_discounting(self, base_contract):
        c = base_contract.replace(k=5.0, rho=0.3)
        undiscounted = price_bachelier(c.replace(r=0.0)).value
        assert price_bachelier(c).value == pytest.approx(c.discount * undiscounted, rel=1e-12)

    def test_bachelier_is_close_for_low_volatility(self, base_contract):
        c = base_contract.replace(k=5.0, rho=0.3)
        assert price_bachelier(c).value == pytest.approx(price_quadrature_oracle(c).value, rel=0.05)

    def test_bachelier_without_volatility_is_intrinsic(self, base_contract):
        c = base_contract.replace(sigma1=0.0, sigma2=0.0, k=5.0)
        assert price_bachelier(c).value == pytest.approx(c.intrinsic())

    def test_negative_strikes_need_parity(self, base_contract):
        c = base_contract.replace(k=-5.0)
        for pricer in (price_bjerksund_stensland, price_extended, price_discretized, price_carmona_durrleman):
            with pytest.raises(DomainError):
                pricer(c)

    def test_margrabe_only_prices_exchange_options(self, base_contract):
        with pytest.raises(DomainError):
            price_margrabe(base_contract.replace(k=1.0))

    def test_quadrature_reports_missed_tolerance(self, base_contract):
        with pytest.raises(AccuracyError) as info:
            price_quadrature_oracle(base_contract.replace(k=5.0), QuadratureConfig(abs_tol=1e-30, limit=1))
        assert info.value.error_estimate > 1e-30


class TestSumOption:

    def test_deep_in_the_money_sum_is_forward_value(self):
        c = SpreadContract(f1=100.0, f2=90.0, sigma1=0.1, sigma2=0.15, rho=0.2, r=0.05, t=1.0, k=1.0)
        expected = c.discount * (c.f1 + c.f2 - c.k)
        assert price_sum_option(c).value == pytest.approx(expected, abs=1e-7)

    def test_sum_option_dominates_intrinsic(self):
        c = SpreadContract(f1=100.0, f2=90.0, sigma1=0.3, sigma2=0.2, rho=-0.4, r=0.02, t=2.0, k=190.0)
        result = price_sum_option(c)
        assert result.value > c.discount * max(c.f1 + c.f2 - c.k, 0.0)
        assert result.method == "sum_quadrature"

    def test_sum_option_needs_positive_strike(self, base_contract):
        with pytest.raises(DomainError):
            price_sum_option(base_contract.replace(k=0.0))


@pytest.mark.slow
class TestWideGrid:
    """σ in [0.05, 1], T in [0.1, 3], |ρ| <= 0.99 on 200 seeded contracts"""

    def test_extended_at_bs_point_collapses(self, wide_grid):
        for c in wide_grid:
            extended = price_extended(c, bs_point_params(c)).diagnostics["raw_value"]
            bs = price_bjerksund_stensland(c).diagnostics["raw_value"]
            assert extended == pytest.approx(bs, rel=1e-12, abs=1e-12 * (c.f1 + c.f2 + c.k)), c

    def test_lower_bound_at_bs_point(self, wide_grid):
        for c in wide_grid:
            theta0, d0 = bs_equivalent_params(c)
            b = c.f2 / (c.f2 + c.k)
            assert cd_lower_bound(c, theta0, d0) == pytest.approx(
                bjerksund_stensland_value(c, b, c.f2 + c.k), rel=1e-12, abs=1e-12 * (c.f1 + c.f2 + c.k)), c

    def test_oracle_sandwich(self, wide_grid):
        for c in wide_grid:
            bs = price_bjerksund_stensland(c).diagnostics["raw_value"]
            cd = price_carmona_durrleman(c).value
            oracle = price_quadrature_oracle(c).value
            assert bs <= cd + 1e-10, c
            assert cd <= oracle + 1e-8, c

    def test_prices_are_non_negative(self, wide_grid):
        for c in wide_grid:
            for result in (price_bjerksund_stensland(c), price_extended(c), price_kirk(c), price_discretized(c)):
                assert result.value >= 0.0, (result.method, c)

    def test_parity_on_negative_strikes(self, make_wide_contracts):
        for c in make_wide_contracts(seed=909, count=50, k_sign=-1.0):
            normalized, adjust = parity_normalize(c)
            assert price_quadrature_oracle(c).value == pytest.approx(
                price_quadrature_oracle(normalized).value + adjust, abs=1e-9), c
