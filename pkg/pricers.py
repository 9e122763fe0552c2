"""
Spread Option Pricers - closed forms, the Carmona-Durrleman lower bound, the discretized
conditional pricer, the generalized (λ, μ, γ) formula and the quadrature oracle

All pricers take forward-quoted contracts and return a PriceResult. Methods that assume
a non-negative strike reject k < 0; route those contracts through parity_normalize.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import integrate, optimize
from scipy.special import ndtr

from boundary import CurveId, LineApprox, curve_weights, line_for_curve, slope_fraction, z0
from config import DiscretizationConfig, QuadratureConfig
from contract import SpreadContract, parity_normalize, sum_option_transform
from errors import AccuracyError, ConvergenceError, DegenerateTransformError, DomainError
from math_kernel import half_plane_prob, std_normal_cdf, std_normal_pdf

logger = logging.getLogger(__name__)

# First-order tolerance of the Carmona-Durrleman solve, in price units
CD_FOC_TOLERANCE = 1e-9
CD_START_OFFSETS = [0.0, 0.5, -0.5, 1.0, -1.0]

# Correlations closer to ±1 than this make the conditional vol of the discretized pricer vanish
DISCRETIZED_RHO_MARGIN = 1e-9


class PriceResult(BaseModel):
    """Price value plus method tag and method-specific diagnostics"""
    value: float
    method: str
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


class CdSolution(BaseModel):
    """Maximizer of the Carmona-Durrleman lower bound"""
    theta_star: float
    d_star: float
    foc_residual: float
    value: float
    iterations: int = 0
    starts: int = 0


@dataclass(frozen=True)
class ExtendedParams:
    """Anchors (λ, μ, γ) of the chord lines for C1, C2, C3"""
    lambda_: float
    mu: float
    gamma: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.lambda_, self.mu, self.gamma)):
            raise DomainError(f"extended parameters must be finite, got {self}")


def _require(condition: bool, message: str):
    if not condition:
        raise DomainError(message)


def _require_call_domain(c: SpreadContract, method: str):
    """k >= 0 and f2 > 0; K = 0 is the exchange-option limit of every formula here"""
    _require(c.k >= 0, f"{method} needs k >= 0, got {c.k}; normalize with parity first")
    _require(c.f2 > 0, f"{method} needs f2 > 0, got {c.f2}")


def floored_result(raw: float, method: str, diagnostics: Optional[Dict[str, Any]] = None) -> PriceResult:
    """Call-type prices are floored at 0 (the empty exercise set); the formula value stays in raw_value"""
    details = dict(diagnostics or {})
    details["raw_value"] = raw
    return PriceResult(value=max(raw, 0.0), method=method, diagnostics=details)


def black_undiscounted(forward: float, strike: float, total_vol: float) -> float:
    """E(F e^{vZ - v²/2} - strike)+ for total volatility v"""
    if strike <= 0:
        return forward - strike
    if total_vol <= 0:
        return max(forward - strike, 0.0)
    d1 = (math.log(forward / strike) + 0.5 * total_vol ** 2) / total_vol
    return forward * float(ndtr(d1)) - strike * float(ndtr(d1 - total_vol))


def price_black(c: SpreadContract) -> PriceResult:
    """With F2 = 0 the spread is a call on S1 struck at K"""
    _require(c.f2 == 0, f"the Black reduction needs f2 = 0, got {c.f2}")
    value = c.discount * black_undiscounted(c.f1, c.k, c.sigma1 * c.sqrt_t)
    return PriceResult(value=value, method="black")


def price_bachelier(c: SpreadContract) -> PriceResult:
    """Moment-matched normal approximation of S1(T) - S2(T)"""
    mean = c.discount * (c.f1 - c.f2)
    variance = (
        c.f1 ** 2 * math.expm1(c.sigma1 ** 2 * c.t)
        - 2 * c.f1 * c.f2 * math.expm1(c.rho * c.sigma1 * c.sigma2 * c.t)
        + c.f2 ** 2 * math.expm1(c.sigma2 ** 2 * c.t)
    )
    sigma_b = c.discount * math.sqrt(max(variance, 0.0))
    if sigma_b == 0:
        return PriceResult(value=c.intrinsic(), method="bachelier", diagnostics={"sigma_b": 0.0})

    moneyness = mean - c.k * c.discount
    d_b = moneyness / sigma_b
    value = moneyness * float(std_normal_cdf(d_b)) + sigma_b * float(std_normal_pdf(d_b))
    return PriceResult(value=value, method="bachelier", diagnostics={"sigma_b": sigma_b, "d_b": d_b})


def price_kirk(c: SpreadContract) -> PriceResult:
    """Kirk: F2 + K treated as a single log-normal asset with weight b = F2/(F2+K)"""
    level = c.f2 + c.k
    _require(level > 0, f"Kirk needs f2 + k > 0, got {level}")
    b = c.f2 / level
    sigma_k = math.sqrt(max(c.sigma1 ** 2 - 2 * b * c.rho * c.sigma1 * c.sigma2 + (b * c.sigma2) ** 2, 0.0))
    value = c.discount * black_undiscounted(c.f1, level, sigma_k * c.sqrt_t)
    return PriceResult(value=value, method="kirk", diagnostics={"sigma_k": sigma_k, "b": b})


def price_margrabe(c: SpreadContract) -> PriceResult:
    """Exact exchange-option price (K = 0)"""
    _require(c.k == 0, f"Margrabe prices exchange options only (k = 0), got k={c.k}")
    _require(c.f2 > 0, f"Margrabe needs f2 > 0, got {c.f2}")
    sigma_m = c.spread_vol
    if sigma_m == 0:
        return PriceResult(value=c.discount * max(c.f1 - c.f2, 0.0), method="margrabe",
                           diagnostics={"sigma_m": 0.0})

    vol = sigma_m * c.sqrt_t
    d1 = math.log(c.g1 * c.fbar1 / (c.alpha * c.fbar2)) / vol
    d2 = math.log(c.alpha * c.fbar1 / (c.g2 * c.fbar2)) / vol
    value = c.discount * (c.f1 * float(ndtr(d1)) - c.f2 * float(ndtr(d2)))
    return PriceResult(value=value, method="margrabe", diagnostics={"sigma_m": sigma_m})


def bjerksund_stensland_arguments(c: SpreadContract, b: float, a: float) -> Tuple[float, float, float, float]:
    """(d̄1, d̄2, d̄3, σ) of the constant-slope formula with slope fraction b and level a"""
    s2 = c.sigma1 ** 2 - 2 * c.rho * c.sigma1 * c.sigma2 * b + (c.sigma2 * b) ** 2
    if s2 <= 0:
        raise DomainError("effective volatility of the constant-slope formula vanishes")
    s = math.sqrt(s2)
    vol = s * c.sqrt_t
    d3 = (math.log(c.f1 / a) + (-0.5 * c.sigma1 ** 2 + 0.5 * (b * c.sigma2) ** 2) * c.t) / vol
    d1 = d3 + (c.sigma1 ** 2 - b * c.rho * c.sigma1 * c.sigma2) * c.t / vol
    d2 = d3 + (c.rho * c.sigma1 * c.sigma2 - b * c.sigma2 ** 2) * c.t / vol
    return d1, d2, d3, s


def bjerksund_stensland_value(c: SpreadContract, b: float, a: float) -> float:
    d1, d2, d3, _ = bjerksund_stensland_arguments(c, b, a)
    return c.discount * (c.f1 * float(ndtr(d1)) - c.f2 * float(ndtr(d2)) - c.k * float(ndtr(d3)))


def price_bjerksund_stensland(c: SpreadContract) -> PriceResult:
    """Lower bound on the exercise region {S1 >= a S2^b / E[S2^b]} with a = F2+K, b = F2/(F2+K)"""
    _require_call_domain(c, "Bjerksund-Stensland")
    a = c.f2 + c.k
    b = c.f2 / a
    return floored_result(bjerksund_stensland_value(c, b, a), "bs", {"a": a, "b": b})


def price_constant_slope(c: SpreadContract, b: float, anchor_x: float = 0.0) -> PriceResult:
    """
    Price with all three boundaries replaced by lines of slope bσ2/σ1 and level a = F2/b.

    The anchor only moves the point where the lines are written down, never the price;
    b = F2/(F2+K) is the Bjerksund-Stensland choice.
    """
    _require_call_domain(c, "constant-slope formula")
    _require(0 < b <= 1, f"slope fraction must lie in (0, 1], got {b}")
    _require(c.sigma1 > 0, f"constant-slope formula needs sigma1 > 0, got {c.sigma1}")

    a = c.f2 / b
    kappa = c.sigma2 / c.sigma1 * b
    lines = [
        LineApprox(kappa=kappa, delta=z0(c, curve, c.sigma2 * b, a, anchor_x) - kappa * anchor_x)
        for curve in CurveId
    ]
    return floored_result(assemble_line_price(c, lines), "constant_slope", {"a": a, "b": b})


# Carmona-Durrleman lower bound

def cd_lower_bound(c: SpreadContract, theta: float, d: float) -> float:
    """Value of the half-plane lower bound indexed by direction theta and offset d"""
    phi = math.acos(c.rho)
    vol1, vol2 = c.sigma1 * c.sqrt_t, c.sigma2 * c.sqrt_t
    return c.discount * (
        c.f1 * float(ndtr(d + vol1 * math.cos(theta + phi)))
        - c.f2 * float(ndtr(d + vol2 * math.cos(theta)))
        - c.k * float(ndtr(d))
    )


def _cd_derivatives(c: SpreadContract, theta: float, d: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gradient and Hessian of the lower bound in (theta, d)"""
    phi = math.acos(c.rho)
    vol1, vol2 = c.sigma1 * c.sqrt_t, c.sigma2 * c.sqrt_t
    sin1, cos1 = math.sin(theta + phi), math.cos(theta + phi)
    sin2, cos2 = math.sin(theta), math.cos(theta)
    d1 = d + vol1 * cos1
    d2 = d + vol2 * cos2
    w1 = c.f1 * float(std_normal_pdf(d1))
    w2 = c.f2 * float(std_normal_pdf(d2))
    w3 = c.k * float(std_normal_pdf(d))

    grad = c.discount * np.array([
        -w1 * vol1 * sin1 + w2 * vol2 * sin2,
        w1 - w2 - w3,
    ])
    h_tt = (-d1 * w1 * (vol1 * sin1) ** 2 - w1 * vol1 * cos1
            + d2 * w2 * (vol2 * sin2) ** 2 + w2 * vol2 * cos2)
    h_td = d1 * w1 * vol1 * sin1 - d2 * w2 * vol2 * sin2
    h_dd = -d1 * w1 + d2 * w2 + d * w3
    hess = c.discount * np.array([[h_tt, h_td], [h_td, h_dd]])
    return grad, hess


def bs_equivalent_params(c: SpreadContract) -> Tuple[float, float]:
    """(θ0, d0) at which the lower bound equals the Bjerksund-Stensland price"""
    _require_call_domain(c, "the Bjerksund-Stensland equivalent point")
    b = c.f2 / (c.f2 + c.k)
    phi = math.acos(c.rho)
    s2 = c.sigma1 ** 2 + (c.sigma2 * b) ** 2 - 2 * c.sigma1 * c.sigma2 * b * math.cos(phi)
    if s2 <= 0:
        raise DegenerateTransformError("the Bjerksund-Stensland direction is undefined when s = 0")
    s = math.sqrt(s2)
    sin_theta = -c.sigma1 * math.sin(phi) / s
    cos_theta = (c.sigma1 * math.cos(phi) - c.sigma2 * b) / s
    theta0 = math.atan2(sin_theta, cos_theta)
    _, _, d0, _ = bjerksund_stensland_arguments(c, b, c.f2 + c.k)
    return theta0, d0


def _newton_polish(c: SpreadContract, theta: float, d: float, max_steps: int = 20) -> Tuple[float, float, int]:
    """Newton steps on the first-order conditions, kept only while the bound does not drop"""
    value = cd_lower_bound(c, theta, d)
    steps = 0
    for steps in range(1, max_steps + 1):
        grad, hess = _cd_derivatives(c, theta, d)
        if np.max(np.abs(grad)) <= 1e-14 * max(1.0, abs(value)):
            break
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            break
        candidate = cd_lower_bound(c, theta + step[0], d + step[1])
        if candidate < value - 1e-14 * max(1.0, abs(value)):
            break
        theta, d, value = theta + step[0], d + step[1], candidate
    return theta, d, steps


def _cd_from_start(c: SpreadContract, theta_start: float, d_start: float) -> CdSolution:
    def objective(x):
        return -cd_lower_bound(c, x[0], x[1])

    def gradient(x):
        return -_cd_derivatives(c, x[0], x[1])[0]

    def hessian(x):
        return -_cd_derivatives(c, x[0], x[1])[1]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = optimize.minimize(
            objective, np.array([theta_start, d_start]), jac=gradient, hess=hessian,
            method="trust-exact", options={"gtol": 1e-12, "maxiter": 200},
        )
    theta, d, polish_steps = _newton_polish(c, float(result.x[0]), float(result.x[1]))
    grad, _ = _cd_derivatives(c, theta, d)
    return CdSolution(
        theta_star=theta,
        d_star=d,
        foc_residual=float(np.max(np.abs(grad))),
        value=cd_lower_bound(c, theta, d),
        iterations=int(result.nit) + polish_steps,
    )


def price_carmona_durrleman(c: SpreadContract) -> CdSolution:
    """
    Maximize the lower bound over (θ, d) from several starts around the
    Bjerksund-Stensland point; the best converged start wins.
    """
    _require_call_domain(c, "Carmona-Durrleman")
    _require(abs(c.rho) < 1, f"Carmona-Durrleman needs |rho| < 1, got {c.rho}")
    theta0, d0 = bs_equivalent_params(c)

    best: Optional[CdSolution] = None
    best_converged: Optional[CdSolution] = None
    for offset in CD_START_OFFSETS:
        solution = _cd_from_start(c, theta0 + offset, d0)
        if best is None or solution.value > best.value:
            best = solution
        if solution.foc_residual <= CD_FOC_TOLERANCE and (
                best_converged is None or solution.value > best_converged.value):
            best_converged = solution
        logger.debug(f"🎯 CD start θ0{offset:+.1f}: value={solution.value:.12f} residual={solution.foc_residual:.2e}")

    if best_converged is None:
        raise ConvergenceError(
            f"Carmona-Durrleman solve did not reach residual {CD_FOC_TOLERANCE} "
            f"(best {best.foc_residual:.3e})",
            best_point=(best.theta_star, best.d_star),
            best_value=best.value,
            residual=best.foc_residual,
        )
    return best_converged.model_copy(update={"starts": len(CD_START_OFFSETS)})


def price_cd_result(c: SpreadContract) -> PriceResult:
    """Carmona-Durrleman solution wrapped as a PriceResult"""
    solution = price_carmona_durrleman(c)
    return floored_result(
        solution.value,
        "cd",
        {
            "theta_star": solution.theta_star,
            "d_star": solution.d_star,
            "foc_residual": solution.foc_residual,
            "iterations": solution.iterations,
        },
    )


# Discretized conditional pricer

def _conditional_arguments(c: SpreadContract, theta: np.ndarray) -> List[np.ndarray]:
    """
    Arguments of Φ in P(Y above curve j | X = theta) for the three curves:
    (ρθ - y_j(θ)) / √(1 - ρ²)
    """
    vol1 = c.sigma1 * c.sqrt_t
    vol2 = c.sigma2 * c.sqrt_t
    root = math.sqrt(1.0 - c.rho ** 2)
    log_k = math.log(c.k) if c.k > 0 else -math.inf
    args = []
    for curve in CurveId:
        lhs, weight = curve_weights(c, curve)
        log_weight = math.log(weight) if weight > 0 else -math.inf
        y = (np.logaddexp(log_weight + vol2 * theta, log_k) - math.log(lhs)) / vol1
        args.append((c.rho * theta - y) / root)
    return args


def price_discretized(c: SpreadContract, cfg: DiscretizationConfig = DiscretizationConfig()) -> PriceResult:
    """
    Midpoint conditional sum over N cells of [-b, b]:
    e^{-rT} Σ_i [F1 Φ(d_i¹) - F2 Φ(d_i²) - K Φ(d_i³)] (Φ(a_{i+1}) - Φ(a_i)).
    """
    _require(c.k >= 0, f"discretized pricer needs k >= 0, got {c.k}; normalize with parity first")
    _require(c.k > 0 or c.f2 > 0, "discretized pricer needs k > 0 or f2 > 0")
    _require(c.sigma1 > 0, f"discretized pricer needs sigma1 > 0, got {c.sigma1}")
    _require(abs(c.rho) < 1 - DISCRETIZED_RHO_MARGIN, f"discretized pricer needs |rho| < 1, got {c.rho}")

    edges = cfg.b * (2.0 * np.arange(cfg.n + 1) / cfg.n - 1.0)
    mids = 0.5 * (edges[:-1] + edges[1:])
    weights = np.diff(ndtr(edges))

    d1, d2, d3 = _conditional_arguments(c, mids)
    value = c.discount * (
        c.f1 * np.dot(ndtr(d1), weights)
        - c.f2 * np.dot(ndtr(d2), weights)
        - c.k * np.dot(ndtr(d3), weights)
    )
    return floored_result(float(value), "discretized", {"b": cfg.b, "n": cfg.n})


# Generalized closed form

def assemble_line_price(c: SpreadContract, lines: List[LineApprox]) -> float:
    """e^{-rT}[F1 P(Y - κ1X >= δ1) - F2 P(Y - κ2X >= δ2) - K P(Y - κ3X >= δ3)]"""
    p1, p2, p3 = (half_plane_prob(1.0, line.kappa, line.delta, c.rho) for line in lines)
    return c.discount * (c.f1 * p1 - c.f2 * p2 - c.k * p3)


def bs_point_params(c: SpreadContract) -> ExtendedParams:
    """Anchors at which the generalized formula reduces to Bjerksund-Stensland"""
    return ExtendedParams(
        lambda_=(0.5 * c.sigma2 - c.rho * c.sigma1) * c.sqrt_t,
        mu=-0.5 * c.sigma2 * c.sqrt_t,
        gamma=0.5 * c.sigma2 * c.sqrt_t,
    )


def default_extended_params(c: SpreadContract) -> ExtendedParams:
    """
    λ from the heuristic (σ2/2 - ρσ1)√T + √|σ2 - σ1|/3; μ and γ equalize the slope
    fractions, b1(λ) = b2(μ) = b3(γ), which for these logistic fractions has the
    closed form μ = λ + (ρσ1 - σ2)√T, γ = λ + ρσ1√T.
    """
    _require_call_domain(c, "extended parameter heuristic")
    lam = (0.5 * c.sigma2 - c.rho * c.sigma1) * c.sqrt_t + math.sqrt(abs(c.sigma2 - c.sigma1)) / 3.0
    params = ExtendedParams(
        lambda_=lam,
        mu=lam + (c.rho * c.sigma1 - c.sigma2) * c.sqrt_t,
        gamma=lam + c.rho * c.sigma1 * c.sqrt_t,
    )
    if c.sigma1 > 0:
        b1 = slope_fraction(c, CurveId.C1, params.lambda_)
        b2 = slope_fraction(c, CurveId.C2, params.mu)
        b3 = slope_fraction(c, CurveId.C3, params.gamma)
        if max(abs(b1 - b2), abs(b1 - b3)) > 1e-12:
            logger.warning(f"⚠️ Slope fractions not equalized: b1={b1}, b2={b2}, b3={b3}")
    return params


def extended_lines(c: SpreadContract, p: ExtendedParams) -> List[LineApprox]:
    return [
        line_for_curve(c, CurveId.C1, p.lambda_),
        line_for_curve(c, CurveId.C2, p.mu),
        line_for_curve(c, CurveId.C3, p.gamma),
    ]


def price_extended(c: SpreadContract, p: Optional[ExtendedParams] = None) -> PriceResult:
    """Generalized closed form with chord lines anchored at (λ, μ, γ)"""
    _require_call_domain(c, "extended formula")
    _require(c.sigma1 > 0, f"extended formula needs sigma1 > 0, got {c.sigma1}")
    if p is None:
        p = default_extended_params(c)
    lines = extended_lines(c, p)
    return floored_result(
        assemble_line_price(c, lines),
        "extended",
        {
            "lambda": p.lambda_,
            "mu": p.mu,
            "gamma": p.gamma,
            "kappas": [line.kappa for line in lines],
            "deltas": [line.delta for line in lines],
        },
    )


# Quadrature oracle

def _oracle_pieces(c: SpreadContract):
    vol1 = c.sigma1 * c.sqrt_t
    vol2 = c.sigma2 * c.sqrt_t
    root = math.sqrt(1.0 - c.rho ** 2)
    inner_vol = vol1 * root

    def conditional_s1(x: float) -> float:
        return c.f1 * math.exp(c.rho * vol1 * x - 0.5 * (c.rho * vol1) ** 2)

    def level(x: float) -> float:
        return c.f2 * math.exp(vol2 * x - 0.5 * vol2 ** 2) + c.k

    return conditional_s1, level, inner_vol


def _breakpoints(log_gap, lo: float, hi: float, samples: int = 401) -> List[float]:
    """Roots of the at-the-money gap on [lo, hi], where the inner payoff bends hardest"""
    grid = np.linspace(lo, hi, samples)
    values = np.array([log_gap(x) for x in grid])
    points = []
    for i in range(samples - 1):
        left, right = values[i], values[i + 1]
        if np.isfinite(left) and np.isfinite(right) and left * right < 0:
            points.append(optimize.brentq(log_gap, grid[i], grid[i + 1], xtol=1e-12))
    return points


def _integrate(integrand, lo: float, hi: float, points: List[float], cfg: QuadratureConfig,
               what: str) -> float:
    # QUADPACK rejects a subinterval limit below the breakpoint count + 2
    limit = max(cfg.limit, len(points) + 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        result = integrate.quad(
            integrand, lo, hi, points=points or None,
            epsabs=cfg.abs_tol, epsrel=0.0, limit=limit, full_output=1,
        )
    estimate, error_estimate = result[0], result[1]
    if not error_estimate <= cfg.abs_tol:
        logger.error(f"🚨 Quadrature for {what} stopped at error estimate {error_estimate:.3e}")
        raise AccuracyError(
            f"quadrature for {what} did not reach tolerance {cfg.abs_tol} (estimate {error_estimate:.3e})",
            estimate=estimate,
            error_estimate=error_estimate,
        )
    return estimate


def _oracle_range(c: SpreadContract) -> Tuple[float, float]:
    half_width = 12.0 + max(c.sigma1, c.sigma2) * c.sqrt_t
    return -half_width, half_width


def price_quadrature_oracle(c: SpreadContract, cfg: QuadratureConfig = QuadratureConfig()) -> PriceResult:
    """
    Ground-truth price: integrate over X the Black price of S1 given X = x
    against the level F2 e^{σ2√T x - σ2²T/2} + K. Any strike sign is accepted.
    """
    _require(c.sigma1 > 0, f"quadrature oracle needs sigma1 > 0, got {c.sigma1}")
    _require(abs(c.rho) < 1, f"quadrature oracle needs |rho| < 1, got {c.rho}")
    conditional_s1, level, inner_vol = _oracle_pieces(c)

    def integrand(x: float) -> float:
        return float(std_normal_pdf(x)) * black_undiscounted(conditional_s1(x), level(x), inner_vol)

    def log_gap(x: float) -> float:
        strike = level(x)
        return math.log(conditional_s1(x) / strike) if strike > 0 else math.inf

    lo, hi = _oracle_range(c)
    points = _breakpoints(log_gap, lo, hi)
    value = c.discount * _integrate(integrand, lo, hi, points, cfg, "spread price")
    return PriceResult(value=value, method="quadrature",
                       diagnostics={"abs_tol": cfg.abs_tol, "breakpoints": points})


def digital_probabilities(c: SpreadContract, cfg: QuadratureConfig = QuadratureConfig()) -> Tuple[float, float, float]:
    """
    The three digital probabilities of the decomposition
    price = e^{-rT}(F1 C1 - F2 C2 - K C3), each the probability of the
    region above curve C_j, integrated over X.
    """
    _require(c.k >= 0, f"digital decomposition needs k >= 0, got {c.k}")
    _require(c.k > 0 or c.f2 > 0, "digital decomposition needs k > 0 or f2 > 0")
    _require(c.sigma1 > 0, f"digital decomposition needs sigma1 > 0, got {c.sigma1}")
    _require(abs(c.rho) < 1, f"digital decomposition needs |rho| < 1, got {c.rho}")

    lo, hi = _oracle_range(c)
    probabilities = []
    for j in range(3):
        def integrand(x: float, j=j) -> float:
            argument = _conditional_arguments(c, np.array([x]))[j][0]
            return float(std_normal_pdf(x)) * float(ndtr(argument))

        probabilities.append(_integrate(integrand, lo, hi, [], cfg, f"digital C{j + 1}"))
    return probabilities[0], probabilities[1], probabilities[2]


def price_sum_option(c: SpreadContract, cfg: QuadratureConfig = QuadratureConfig()) -> PriceResult:
    """
    Price (S1 + S2 - K)+ for a contract read as a sum option, through the
    spread symmetry and parity, with the quadrature oracle.
    """
    _require(c.k > 0, f"sum option pricing needs k > 0, got {c.k}")
    transformed = sum_option_transform(c)
    normalized, adjust = parity_normalize(transformed)
    inner = price_quadrature_oracle(normalized, cfg)
    return PriceResult(
        value=inner.value + adjust,
        method="sum_quadrature",
        diagnostics={"parity_adjust": adjust, "transformed_rho": transformed.rho,
                     "transformed_sigma": transformed.sigma1},
    )
