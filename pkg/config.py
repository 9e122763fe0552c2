"""
Configuration for the spread option pricing library and benchmark harness
"""

import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List

from errors import ConfigError

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class DiscretizationConfig:
    """Truncation half-width and interval count of the discretized pricer"""
    b: float = 5.0
    n: int = 3000

    def __post_init__(self):
        if not self.b > 0:
            raise ConfigError(f"discretization half-width must be positive, got {self.b}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"discretization interval count must be a positive integer, got {self.n}")


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo path count, seed and variance reduction"""
    paths: int = 100000
    seed: int = 42
    antithetic: bool = True
    chunk_size: int = 50000

    def __post_init__(self):
        if self.paths < 2:
            raise ConfigError(f"Monte-Carlo needs at least 2 paths, got {self.paths}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.chunk_size < 2 or self.chunk_size % 2:
            raise ConfigError(f"chunk size must be an even integer >= 2, got {self.chunk_size}")


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerance and subinterval budget of the quadrature oracle"""
    abs_tol: float = 1e-10
    limit: int = 500

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ConfigError(f"quadrature tolerance must be positive, got {self.abs_tol}")
        if self.limit < 1:
            raise ConfigError(f"quadrature subinterval limit must be positive, got {self.limit}")


class SpreadDefaults:
    """Central constants: the benchmark market and the table grids"""

    BASE_MARKET = {
        "f1": 112.22,
        "f2": 103.05,
        "sigma1": 0.1,
        "sigma2": 0.15,
        "rho": 0.0,
        "r": 0.05,
        "t": 1.0,
        "k": 0.0,
    }

    TABLE_STRIKES = [-20.0, -10.0, 0.0, 5.0, 15.0, 25.0]
    TABLE_RHOS = [-0.99, -0.5, 0.0, 0.3, 0.8, 0.99]

    # The table3 preset reprices the grid with a high-volatility second asset
    HIGH_VOL_SIGMA2 = 0.9

    PRICE_METHODS = [
        "bachelier", "kirk", "margrabe", "bs", "cd",
        "discretized", "extended", "quadrature", "mc",
    ]

    # Reference values below this magnitude are left out of relative-error statistics
    MIN_REFERENCE = 1e-6

    @classmethod
    def base_market(cls, **overrides) -> Dict[str, float]:
        """Base market fields with overrides applied"""
        market = dict(cls.BASE_MARKET)
        market.update(overrides)
        return market

    @classmethod
    def is_method(cls, name: str) -> bool:
        return name in cls.PRICE_METHODS


# Keys accepted in a config file, mapped to the flag they stand for
CONFIG_KEYS = [
    "f1", "f2", "sigma1", "sigma2", "rho", "r", "t", "k",
    "method", "methods", "format", "seed", "paths", "disc_b", "disc_n",
    "lambda_", "mu", "gamma", "preset", "strikes", "rhos", "reference",
    "abs_tol", "workers", "antithetic", "check_fd",
]


def load_environment() -> Dict[str, Any]:
    """Load environment variables for the harness"""
    from dotenv import load_dotenv
    load_dotenv()

    try:
        return {
            "LOG_LEVEL": os.getenv("SPREADOPT_LOG_LEVEL", "INFO"),
            "WORKERS": int(os.getenv("SPREADOPT_WORKERS", "4")),
            "SEED": int(os.getenv("SPREADOPT_SEED", "42")),
        }
    except ValueError as e:
        raise ConfigError(f"invalid SPREADOPT_* environment value: {e}") from e


def normalize_config_key(key: str) -> str:
    """Flag spelling to parameter name: '--disc-b' / 'DISC_B' -> 'disc_b', 'lambda' -> 'lambda_'"""
    name = key.strip().lstrip("-").lower().replace("-", "_")
    return "lambda_" if name == "lambda" else name


def load_config_file(path: str) -> Dict[str, str]:
    """Parse a key=value config file; values stay strings for click to convert"""
    from dotenv import dotenv_values

    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")

    values = {}
    for key, value in dotenv_values(path).items():
        name = normalize_config_key(key)
        if name not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key '{key}' in {path}")
        if value is None:
            raise ConfigError(f"config key '{key}' in {path} has no value")
        values[name] = value
    return values


def parse_float_list(text: str) -> List[float]:
    """'-20,-10,0' -> [-20.0, -10.0, 0.0]"""
    try:
        items = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"expected a comma-separated list of numbers, got '{text}'") from e
    if not items:
        raise ConfigError("expected a non-empty list of numbers")
    return items


def setup_logging(level: str = "INFO"):
    """Configure root logging for entry points"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
    )
