"""Shared fixtures: the benchmark market and seeded random contract grids"""

from typing import List

import numpy as np
import pytest

from config import SpreadDefaults
from contract import SpreadContract
from errors import get_error_ledger


def random_contracts(seed: int, count: int, k_low: float = 0.0, k_high: float = 20.0,
                     rho_limit: float = 0.95) -> List[SpreadContract]:
    rng = np.random.default_rng(seed)
    return [
        SpreadContract(
            f1=rng.uniform(80.0, 130.0),
            f2=rng.uniform(70.0, 120.0),
            sigma1=rng.uniform(0.1, 0.5),
            sigma2=rng.uniform(0.1, 0.5),
            rho=rng.uniform(-rho_limit, rho_limit),
            r=rng.uniform(0.0, 0.08),
            t=rng.uniform(0.25, 2.0),
            k=rng.uniform(k_low, k_high),
        )
        for _ in range(count)
    ]


def wide_contracts(seed: int, count: int, k_sign: float = 1.0) -> List[SpreadContract]:
    """Acceptance grid: σ in [0.05, 1], T in [0.1, 3], |ρ| <= 0.99, |K| in [0.5, 40]"""
    rng = np.random.default_rng(seed)
    return [
        SpreadContract(
            f1=rng.uniform(50.0, 150.0),
            f2=rng.uniform(50.0, 150.0),
            sigma1=rng.uniform(0.05, 1.0),
            sigma2=rng.uniform(0.05, 1.0),
            rho=rng.uniform(-0.99, 0.99),
            r=rng.uniform(0.0, 0.1),
            t=rng.uniform(0.1, 3.0),
            k=k_sign * rng.uniform(0.5, 40.0),
        )
        for _ in range(count)
    ]


@pytest.fixture
def base_contract() -> SpreadContract:
    return SpreadContract(**SpreadDefaults.base_market())


@pytest.fixture
def high_vol_contract() -> SpreadContract:
    return SpreadContract(**SpreadDefaults.base_market(sigma2=SpreadDefaults.HIGH_VOL_SIGMA2))


@pytest.fixture
def random_grid() -> List[SpreadContract]:
    return random_contracts(seed=2024, count=12)


@pytest.fixture(autouse=True)
def clean_error_ledger():
    get_error_ledger().clear()
    yield
    get_error_ledger().clear()


@pytest.fixture
def make_random_contracts():
    return random_contracts


@pytest.fixture(scope="module")
def wide_grid() -> List[SpreadContract]:
    return wide_contracts(seed=4500, count=200)


@pytest.fixture
def make_wide_contracts():
    return wide_contracts
