"""
Exercise-boundary geometry - the curves C1, C2, C3 and their chord linearizations

In standard-normal coordinates (x for asset 2, y for asset 1) each of the three
digital events of the spread price is the region above a convex curve
    C1: g1 F̄1 e^{σ1√T y} = α F̄2 e^{σ2√T x} + K
    C2: α F̄1 e^{σ1√T y} = g2 F̄2 e^{σ2√T x} + K
    C3:    F̄1 e^{σ1√T y} =    F̄2 e^{σ2√T x} + K
All three share the asymptotic slope σ2/σ1 as x -> +inf and flatten to a
constant as x -> -inf. A line through an anchor point with slope
(σ2/σ1) b_i(anchor) replaces each curve in the generalized closed form.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from scipy.special import expit

from contract import SpreadContract
from errors import DomainError

logger = logging.getLogger(__name__)


class CurveId(Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"


@dataclass(frozen=True)
class LineApprox:
    """y = kappa * x + delta"""
    kappa: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.delta)):
            raise DomainError(f"line coefficients must be finite, got ({self.kappa}, {self.delta})")

    def y(self, x: float) -> float:
        return self.kappa * x + self.delta


def _require_boundary_domain(c: SpreadContract):
    if c.sigma1 <= 0:
        raise DomainError(f"boundary geometry needs sigma1 > 0, got {c.sigma1}")
    if c.k < 0:
        raise DomainError(f"boundary geometry needs k >= 0, got {c.k}; normalize with parity first")
    if c.k == 0 and c.f2 == 0:
        raise DomainError("boundary geometry needs k > 0 or f2 > 0")


def curve_weights(c: SpreadContract, curve: CurveId) -> Tuple[float, float]:
    """(left coefficient on e^{σ1√T y}, right coefficient on e^{σ2√T x}) of the curve"""
    if curve is CurveId.C1:
        return c.g1 * c.fbar1, c.alpha * c.fbar2
    if curve is CurveId.C2:
        return c.alpha * c.fbar1, c.g2 * c.fbar2
    return c.fbar1, c.fbar2


def _log_rhs(c: SpreadContract, weight: float, x: float) -> float:
    """ln(weight e^{σ2√T x} + K) without overflow"""
    log_weight = math.log(weight) if weight > 0 else -math.inf
    log_k = math.log(c.k) if c.k > 0 else -math.inf
    return float(np.logaddexp(log_weight + c.sigma2 * c.sqrt_t * x, log_k))


def curve_y(c: SpreadContract, curve: CurveId, x: float) -> float:
    """Ordinate of the point of the curve above x"""
    _require_boundary_domain(c)
    lhs, weight = curve_weights(c, curve)
    log_rhs = _log_rhs(c, weight, x)
    if not math.isfinite(log_rhs):
        raise DomainError(f"curve {curve.value} is undefined at x={x}")
    return (log_rhs - math.log(lhs)) / (c.sigma1 * c.sqrt_t)


def curve_residual(c: SpreadContract, curve: CurveId, x: float, y: float) -> float:
    """Relative residual of the implicit curve equation at (x, y)"""
    lhs, weight = curve_weights(c, curve)
    left = lhs * math.exp(c.sigma1 * c.sqrt_t * y)
    right = weight * math.exp(c.sigma2 * c.sqrt_t * x) + c.k
    return abs(left - right) / abs(right)


def left_limit(c: SpreadContract, curve: CurveId) -> float:
    """lim y as x -> -inf (requires K > 0)"""
    if c.k <= 0:
        raise DomainError("the left limit exists only for k > 0")
    base = math.log(c.k / c.fbar1) / (c.sigma1 * c.sqrt_t)
    if curve is CurveId.C1:
        return base - c.sigma1 * c.sqrt_t
    if curve is CurveId.C2:
        return base - c.rho * c.sigma2 * c.sqrt_t
    return base


def slope_fraction(c: SpreadContract, curve: CurveId, x: float) -> float:
    """
    b_i(x) = w e^{σ2√T x} / (w e^{σ2√T x} + K), with w = αF̄2, g2F̄2 or F̄2.

    Fraction of the asymptotic slope σ2/σ1 carried by the curve at x.
    """
    _require_boundary_domain(c)
    if c.f2 == 0:
        return 0.0
    if c.k == 0:
        return 1.0
    _, weight = curve_weights(c, curve)
    return float(expit(math.log(weight) + c.sigma2 * c.sqrt_t * x - math.log(c.k)))


def shift_coefficient(c: SpreadContract, curve: CurveId, x: float) -> float:
    """a_i(x), the level paired with b_i(x) so that a_i b_i = F2"""
    _require_boundary_domain(c)
    var2 = c.sigma2 ** 2 * c.t
    if curve is CurveId.C1:
        exponent = -c.sigma2 * c.sqrt_t * x - c.rho * c.sigma1 * c.sigma2 * c.t + 0.5 * var2
    elif curve is CurveId.C2:
        exponent = -c.sigma2 * c.sqrt_t * x - 0.5 * var2
    else:
        exponent = -c.sigma2 * c.sqrt_t * x + 0.5 * var2
    return c.f2 + c.k * math.exp(exponent)


def z0(c: SpreadContract, curve: CurveId, q: float, a: float, h: float) -> float:
    """Ordinate at h of the log-linear approximation a e^{q√T h - q²T/2} to the curve's right side"""
    if c.sigma1 <= 0:
        raise DomainError(f"z0 needs sigma1 > 0, got {c.sigma1}")
    if not a > 0:
        raise DomainError(f"z0 needs a > 0, got {a}")

    vol1 = c.sigma1 * c.sqrt_t
    log_level = math.log(a) + q * c.sqrt_t * h - 0.5 * q * q * c.t - math.log(c.f1)
    if curve is CurveId.C1:
        return (log_level + c.rho * c.sigma1 * q * c.t) / vol1 - 0.5 * vol1
    if curve is CurveId.C2:
        return (log_level + q * c.sigma2 * c.t) / vol1 + (0.5 * c.sigma1 - c.rho * c.sigma2) * c.sqrt_t
    return log_level / vol1 + 0.5 * vol1


def line_for_curve(c: SpreadContract, curve: CurveId, anchor_x: float) -> LineApprox:
    """Chord line of slope (σ2/σ1) b_i(anchor) through the approximated curve at the anchor"""
    b = slope_fraction(c, curve, anchor_x)
    a = shift_coefficient(c, curve, anchor_x)
    kappa = c.sigma2 / c.sigma1 * b
    delta = z0(c, curve, c.sigma2 * b, a, anchor_x) - kappa * anchor_x
    return LineApprox(kappa=kappa, delta=delta)
