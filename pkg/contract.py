"""
Spread contract model - market data, derived constants, parity and symmetry transforms
"""

import dataclasses
import logging
import math
import numbers
from dataclasses import dataclass
from typing import Tuple

from errors import ContractError, DegenerateTransformError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpreadContract:
    """
    European spread call paying (S1(T) - S2(T) - K)+ under bivariate log-normal dynamics.

    Prices are quoted on forwards f1, f2; sigma1, sigma2 are annualized volatilities,
    rho the correlation of the driving Brownian motions, r the continuously compounded
    rate and t the maturity in years. The strike may have either sign.
    """
    f1: float
    f2: float
    sigma1: float
    sigma2: float
    rho: float
    r: float
    t: float
    k: float

    def __post_init__(self):
        for name in ("f1", "f2", "sigma1", "sigma2", "rho", "r", "t", "k"):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise ContractError(f"{name} must be a finite number, got {value!r}")
        if self.f1 <= 0:
            raise ContractError(f"f1 must be positive, got {self.f1}")
        if self.f2 < 0:
            raise ContractError(f"f2 must be non-negative, got {self.f2}")
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise ContractError(f"volatilities must be non-negative, got {self.sigma1}, {self.sigma2}")
        if self.t <= 0:
            raise ContractError(f"maturity must be positive, got {self.t}")
        if abs(self.rho) > 1:
            raise ContractError(f"correlation must lie in [-1, 1], got {self.rho}")

    @property
    def sqrt_t(self) -> float:
        return math.sqrt(self.t)

    @property
    def discount(self) -> float:
        return math.exp(-self.r * self.t)

    @property
    def alpha(self) -> float:
        """α = exp(ρσ1σ2T)"""
        return math.exp(self.rho * self.sigma1 * self.sigma2 * self.t)

    @property
    def g1(self) -> float:
        return math.exp(self.sigma1 ** 2 * self.t)

    @property
    def g2(self) -> float:
        return math.exp(self.sigma2 ** 2 * self.t)

    @property
    def fbar1(self) -> float:
        """F1 exp(-σ1²T/2), the median of S1(T)"""
        return self.f1 * math.exp(-0.5 * self.sigma1 ** 2 * self.t)

    @property
    def fbar2(self) -> float:
        return self.f2 * math.exp(-0.5 * self.sigma2 ** 2 * self.t)

    @property
    def spread_vol(self) -> float:
        """Volatility of ln(S1/S2): √(σ1² - 2ρσ1σ2 + σ2²)"""
        return math.sqrt(max(self.sigma1 ** 2 - 2 * self.rho * self.sigma1 * self.sigma2 + self.sigma2 ** 2, 0.0))

    def intrinsic(self) -> float:
        """Discounted payoff when both volatilities vanish"""
        return self.discount * max(self.f1 - self.f2 - self.k, 0.0)

    def replace(self, **changes) -> "SpreadContract":
        """Copy with fields changed; invariants are re-checked"""
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SpotQuote:
    """Spot prices and continuous dividend yields of the two assets"""
    s1_0: float
    s2_0: float
    r_div1: float = 0.0
    r_div2: float = 0.0

    def __post_init__(self):
        if not self.s1_0 > 0:
            raise ContractError(f"s1_0 must be positive, got {self.s1_0}")
        if not self.s2_0 >= 0:
            raise ContractError(f"s2_0 must be non-negative, got {self.s2_0}")


def from_spots(q: SpotQuote, r: float, t: float, sigma1: float, sigma2: float,
               rho: float, k: float) -> SpreadContract:
    """Build a forward-quoted contract from spots: Fi = Si(0) exp((r - r_div_i) t)"""
    return SpreadContract(
        f1=q.s1_0 * math.exp((r - q.r_div1) * t),
        f2=q.s2_0 * math.exp((r - q.r_div2) * t),
        sigma1=sigma1,
        sigma2=sigma2,
        rho=rho,
        r=r,
        t=t,
        k=k,
    )


def swap_assets(c: SpreadContract) -> SpreadContract:
    """(F1, σ1, F2, σ2, K) -> (F2, σ2, F1, σ1, -K); the put on the original spread"""
    if c.f2 <= 0:
        raise ContractError("swapping assets needs f2 > 0")
    return c.replace(f1=c.f2, f2=c.f1, sigma1=c.sigma2, sigma2=c.sigma1, k=-c.k)


def parity_cash(c: SpreadContract) -> float:
    """Discounted forward value of the spread, e^{-rT}(F1 - F2 - K)"""
    return c.discount * (c.f1 - c.f2 - c.k)


def parity_normalize(c: SpreadContract) -> Tuple[SpreadContract, float]:
    """
    Route a negative strike through put-call parity.

    Returns (contract with k >= 0, cash adjustment) such that
    price(c) = price(normalized) + adjustment for any exact pricer.
    """
    if c.k >= 0:
        return c, 0.0
    swapped = swap_assets(c)
    adjust = parity_cash(c)
    logger.debug(f"🔁 Parity swap for K={c.k}: adjustment {adjust:.10f}")
    return swapped, adjust


def sum_option_transform(c: SpreadContract) -> SpreadContract:
    """
    Spread contract whose price equals the option on the sum (S1 + S2 - K)+.

    The input reads as a sum option: f1, f2 the forwards of the two summed
    assets and k the strike. The result prices S1 against an asset with
    forward K and volatility σ2, with strike -F2, under the combined
    volatility σ = √(σ1² - 2ρσ1σ2 + σ2²) and correlation (σ2 - ρσ1)/σ.
    """
    sigma = c.spread_vol
    if sigma == 0:
        raise DegenerateTransformError("sum transform needs σ1² - 2ρσ1σ2 + σ2² > 0")
    rho = (c.sigma2 - c.rho * c.sigma1) / sigma
    return SpreadContract(
        f1=c.f1,
        f2=c.k,
        sigma1=sigma,
        sigma2=c.sigma2,
        rho=min(max(rho, -1.0), 1.0),
        r=c.r,
        t=c.t,
        k=-c.f2,
    )
