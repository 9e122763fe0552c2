"""
Greeks of the generalized closed form with frozen slope fractions

With b1, b2, b3 held fixed the price reads
    Π = e^{-rT}[F1 Φ(I) - F2 Φ(J) - K Φ(H)]
    I = [ln(F1/a1) + (σ1²/2 - ρσ1σ2b1 + σ2²b1²/2) T] / (s1√T)
    J = [ln(F1/a2) + (-σ1²/2 + ρσ1σ2 + σ2²b2²/2 - σ2²b2) T] / (s2√T)
    H = [ln(F1/a3) + (-σ1²/2 + σ2²b3²/2) T] / (s3√T)
    s_i = √(σ1² - 2ρσ1σ2b_i + σ2²b_i²),  a_i = F2 + e_i
where e_i = F2(1 - b_i)/b_i is fixed at the base point, so a_i' = 1, a_i'' = 0
and a_i'/a_i = b_i/F2 there. Deltas are forward deltas.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel
from scipy.special import ndtr

from boundary import CurveId, slope_fraction
from contract import SpreadContract
from errors import ConfigError, DomainError
from math_kernel import std_normal_pdf
from pricers import ExtendedParams, default_extended_params

logger = logging.getLogger(__name__)


class GreeksReport(BaseModel):
    """First and second order sensitivities of the frozen formula"""
    price: float
    dF1: float
    dF2: float
    d2F1F1: float
    d2F1F2: float
    d2F2F2: float
    vega1: float
    vega2: float
    theta_T: float
    rho_r: float
    rho_corr: float
    i_val: float
    j_val: float
    h_val: float
    sbar1: float
    sbar2: float
    sbar3: float


@dataclass(frozen=True)
class FrozenExtended:
    """Base contract plus the slope fractions held constant under bumps"""
    contract: SpreadContract
    b1: float
    b2: float
    b3: float

    def __post_init__(self):
        for b in (self.b1, self.b2, self.b3):
            if not 0 < b <= 1:
                raise DomainError(f"frozen slope fractions must lie in (0, 1], got {b}")
        if self.contract.k < 0 or self.contract.f2 <= 0:
            raise DomainError("frozen formula needs k >= 0 and f2 > 0")

    @property
    def fractions(self) -> Tuple[float, float, float]:
        return self.b1, self.b2, self.b3

    @property
    def excesses(self) -> Tuple[float, float, float]:
        """a_i - F2 at the base point"""
        f2 = self.contract.f2
        return tuple(f2 * (1.0 - b) / b for b in self.fractions)

    def levels(self, c: Optional[SpreadContract] = None) -> Tuple[float, float, float]:
        """a_i at a (possibly bumped) contract"""
        f2 = (c or self.contract).f2
        return tuple(f2 + e for e in self.excesses)


def freeze_extended(c: SpreadContract, p: Optional[ExtendedParams] = None) -> FrozenExtended:
    """Freeze the slope fractions of the generalized formula at anchors (λ, μ, γ)"""
    if p is None:
        p = default_extended_params(c)
    return FrozenExtended(
        contract=c,
        b1=slope_fraction(c, CurveId.C1, p.lambda_),
        b2=slope_fraction(c, CurveId.C2, p.mu),
        b3=slope_fraction(c, CurveId.C3, p.gamma),
    )


def freeze_bjerksund_stensland(c: SpreadContract) -> FrozenExtended:
    """b_i = F2/(F2+K) for all three legs, so a_i = F2 + K"""
    b = c.f2 / (c.f2 + c.k)
    return FrozenExtended(contract=c, b1=b, b2=b, b3=b)


@dataclass
class _Leg:
    """One Φ(Z) term of the frozen formula with the partials of Z"""
    z: float
    s: float
    z_f1: float
    z_f2: float
    z_f1f1: float
    z_f2f2: float
    z_sigma1: float
    z_sigma2: float
    z_rho: float
    z_t: float


def _legs(fx: FrozenExtended, c: SpreadContract) -> List[_Leg]:
    s1, s2, rho, t = c.sigma1, c.sigma2, c.rho, c.t
    sqrt_t = math.sqrt(t)
    legs = []
    for i, (b, a) in enumerate(zip(fx.fractions, fx.levels(c))):
        if a <= 0:
            raise DomainError(f"frozen level a{i + 1} must stay positive, got {a}")
        var = s1 ** 2 - 2 * rho * s1 * s2 * b + (s2 * b) ** 2
        if var <= 0:
            raise DomainError(f"effective volatility of leg {i + 1} vanishes")
        s = math.sqrt(var)
        s_sigma1 = (s1 - rho * s2 * b) / s
        s_sigma2 = (s2 * b * b - rho * s1 * b) / s
        s_rho = -s1 * s2 * b / s

        # drift m of the numerator ln(F1/a) + m T and its partials
        if i == 0:
            m = 0.5 * s1 ** 2 - rho * s1 * s2 * b + 0.5 * (s2 * b) ** 2
            m_sigma1, m_sigma2, m_rho = s1 - rho * s2 * b, s2 * b * b - rho * s1 * b, -s1 * s2 * b
        elif i == 1:
            m = -0.5 * s1 ** 2 + rho * s1 * s2 + 0.5 * (s2 * b) ** 2 - s2 ** 2 * b
            m_sigma1, m_sigma2, m_rho = -s1 + rho * s2, rho * s1 + s2 * b * b - 2 * s2 * b, s1 * s2
        else:
            m = -0.5 * s1 ** 2 + 0.5 * (s2 * b) ** 2
            m_sigma1, m_sigma2, m_rho = -s1, s2 * b * b, 0.0

        log_ratio = math.log(c.f1 / a)
        vol = s * sqrt_t
        z = (log_ratio + m * t) / vol
        legs.append(_Leg(
            z=z,
            s=s,
            z_f1=1.0 / (c.f1 * vol),
            z_f2=-1.0 / (a * vol),
            z_f1f1=-1.0 / (c.f1 ** 2 * vol),
            z_f2f2=1.0 / (a ** 2 * vol),
            z_sigma1=m_sigma1 * t / vol - z * s_sigma1 / s,
            z_sigma2=m_sigma2 * t / vol - z * s_sigma2 / s,
            z_rho=m_rho * t / vol - z * s_rho / s,
            z_t=(m * sqrt_t / s - log_ratio / vol) / (2 * t),
        ))
    return legs


def frozen_price(fx: FrozenExtended, c: Optional[SpreadContract] = None) -> float:
    """Frozen formula at a (possibly bumped) contract; not floored at 0, so its derivatives are the Greeks"""
    c = c or fx.contract
    i_leg, j_leg, h_leg = _legs(fx, c)
    return math.exp(-c.r * c.t) * (
        c.f1 * float(ndtr(i_leg.z)) - c.f2 * float(ndtr(j_leg.z)) - c.k * float(ndtr(h_leg.z))
    )


def greeks_closed_form(fx: FrozenExtended) -> GreeksReport:
    """Analytic Greeks of the frozen formula"""
    c = fx.contract
    legs = _legs(fx, c)
    weights = [c.f1, -c.f2, -c.k]
    densities = [float(std_normal_pdf(leg.z)) for leg in legs]
    i_leg, j_leg, h_leg = legs
    disc = c.discount

    def weighted(partial: Callable[[_Leg], float]) -> float:
        return sum(w * p * partial(leg) for w, p, leg in zip(weights, densities, legs))

    def weighted_second(first: Callable[[_Leg], float], second: Callable[[_Leg], float],
                        mixed: Callable[[_Leg], float]) -> float:
        # w [φ(Z) Z_xy - Z φ(Z) Z_x Z_y]
        return sum(w * p * (mixed(leg) - leg.z * first(leg) * second(leg))
                   for w, p, leg in zip(weights, densities, legs))

    price = disc * (c.f1 * float(ndtr(i_leg.z)) - c.f2 * float(ndtr(j_leg.z)) - c.k * float(ndtr(h_leg.z)))

    d_f1 = disc * (float(ndtr(i_leg.z)) + weighted(lambda leg: leg.z_f1))
    d_f2 = disc * (-float(ndtr(j_leg.z)) + weighted(lambda leg: leg.z_f2))
    d2_f1f1 = disc * (
        2 * densities[0] * i_leg.z_f1
        + weighted_second(lambda leg: leg.z_f1, lambda leg: leg.z_f1, lambda leg: leg.z_f1f1)
    )
    d2_f1f2 = disc * (
        densities[0] * i_leg.z_f2 - densities[1] * j_leg.z_f1
        + weighted_second(lambda leg: leg.z_f1, lambda leg: leg.z_f2, lambda leg: 0.0)
    )
    d2_f2f2 = disc * (
        -2 * densities[1] * j_leg.z_f2
        + weighted_second(lambda leg: leg.z_f2, lambda leg: leg.z_f2, lambda leg: leg.z_f2f2)
    )

    return GreeksReport(
        price=price,
        dF1=d_f1,
        dF2=d_f2,
        d2F1F1=d2_f1f1,
        d2F1F2=d2_f1f2,
        d2F2F2=d2_f2f2,
        vega1=disc * weighted(lambda leg: leg.z_sigma1),
        vega2=disc * weighted(lambda leg: leg.z_sigma2),
        theta_T=-c.r * price + disc * weighted(lambda leg: leg.z_t),
        rho_r=-c.t * price,
        rho_corr=disc * weighted(lambda leg: leg.z_rho),
        i_val=i_leg.z,
        j_val=j_leg.z,
        h_val=h_leg.z,
        sbar1=i_leg.s,
        sbar2=j_leg.s,
        sbar3=h_leg.s,
    )


def _step(value: float, rel_step: float, name: str) -> float:
    h = rel_step * max(abs(value), 1.0) if name in ("rho", "r") else rel_step * abs(value)
    if h == 0:
        h = rel_step
    if value + h == value:
        raise ConfigError(f"finite-difference step underflows for {name}={value}")
    return h


def _first(f: Callable[[float], float], h: float) -> float:
    return (f(h) - f(-h)) / (2 * h)


def _second(f: Callable[[float], float], h: float) -> float:
    return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)


def greeks_finite_difference(fx: FrozenExtended, rel_step: float = 1e-4,
                             richardson: bool = False) -> GreeksReport:
    """
    Central differences of the frozen formula: b_i and the excesses e_i stay
    fixed while one contract field moves. Second derivatives use the 5-point
    stencil, the cross gamma the 4-point product stencil. With richardson=True
    first derivatives combine steps h and h/2 as (4 D(h/2) - D(h)) / 3.
    """
    if not 1e-8 < rel_step < 1e-2:
        raise ConfigError(f"relative step must lie in (1e-8, 1e-2), got {rel_step}")
    c = fx.contract

    def bumped(name: str) -> Callable[[float], float]:
        base = getattr(c, name)
        return lambda dx: frozen_price(fx, c.replace(**{name: base + dx}))

    def first(name: str) -> float:
        h = _step(getattr(c, name), rel_step, name)
        f = bumped(name)
        if richardson:
            return (4 * _first(f, h / 2) - _first(f, h)) / 3
        return _first(f, h)

    h1 = _step(c.f1, rel_step, "f1")
    h2 = _step(c.f2, rel_step, "f2")

    def cross(dx: float, dy: float) -> float:
        return frozen_price(fx, c.replace(f1=c.f1 + dx, f2=c.f2 + dy))

    d2_f1f2 = (cross(h1, h2) - cross(h1, -h2) - cross(-h1, h2) + cross(-h1, -h2)) / (4 * h1 * h2)
    analytic = greeks_closed_form(fx)

    return GreeksReport(
        price=frozen_price(fx),
        dF1=first("f1"),
        dF2=first("f2"),
        d2F1F1=_second(bumped("f1"), h1),
        d2F1F2=d2_f1f2,
        d2F2F2=_second(bumped("f2"), h2),
        vega1=first("sigma1"),
        vega2=first("sigma2"),
        theta_T=first("t"),
        rho_r=first("r"),
        rho_corr=first("rho"),
        i_val=analytic.i_val,
        j_val=analytic.j_val,
        h_val=analytic.h_val,
        sbar1=analytic.sbar1,
        sbar2=analytic.sbar2,
        sbar3=analytic.sbar3,
    )


def pde_residuals(fx: FrozenExtended, report: Optional[GreeksReport] = None) -> Tuple[float, float]:
    """
    Residuals of the pricing PDE in (F1, F2, T) and of the scaling identity
    ½σ1 Π_σ1 + ½σ2 Π_σ2 + r Π_r = T Π_T.
    """
    c = fx.contract
    g = report or greeks_closed_form(fx)
    res1 = abs(
        0.5 * (c.sigma1 * c.f1) ** 2 * g.d2F1F1
        + c.rho * c.sigma1 * c.f1 * c.sigma2 * c.f2 * g.d2F1F2
        + 0.5 * (c.sigma2 * c.f2) ** 2 * g.d2F2F2
        - g.theta_T
        - c.r * g.price
    )
    res2 = abs(0.5 * c.sigma1 * g.vega1 + 0.5 * c.sigma2 * g.vega2 + c.r * g.rho_r - c.t * g.theta_T)
    return res1, res2


def compare_reports(analytic: GreeksReport, numeric: GreeksReport) -> Dict[str, float]:
    """Relative gap per Greek, measured against the analytic value"""
    fields = ["dF1", "dF2", "d2F1F1", "d2F1F2", "d2F2F2", "vega1", "vega2", "theta_T", "rho_r", "rho_corr"]
    gaps = {}
    for name in fields:
        a, n = getattr(analytic, name), getattr(numeric, name)
        gaps[name] = abs(a - n) / max(abs(a), 1e-12)
    return gaps
