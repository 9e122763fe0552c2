"""
Probability kernel - standard normal density/CDF and the half-plane probability
Scalar primitives shared by every pricer; all functions are pure and thread-safe
"""

import math
from typing import Union

import numpy as np
from scipy.special import ndtr

from errors import DomainError

ArrayLike = Union[float, np.ndarray]

INV_SQRT_2PI = 0.3989422804014327

# Relative variance below which mY - nX is treated as almost surely constant
DEGENERATE_VARIANCE = 1e-14


def _require_finite(x: ArrayLike, name: str):
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite, got {x}")


def std_normal_cdf(x: ArrayLike) -> ArrayLike:
    """Φ(x) via the erfc-based ndtr, accurate to double precision in both tails"""
    _require_finite(x, "x")
    return ndtr(x)


def std_normal_pdf(x: ArrayLike) -> ArrayLike:
    """φ(x) = exp(-x²/2)/√(2π); even in x bit for bit"""
    _require_finite(x, "x")
    return INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


def half_plane_prob(m: float, n: float, ell: float, rho: float) -> float:
    """
    P(mY - nX >= ell) for standard normals X, Y with correlation rho.

    mY - nX is normal with variance s² = m² + n² - 2ρmn, so the probability
    is Φ(-ell/s). When s² vanishes the variable is almost surely zero and the
    event holds exactly when ell <= 0.
    """
    _require_finite(np.array([m, n, ell]), "m, n, ell")
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation must lie in [-1, 1], got {rho}")

    s2 = m * m + n * n - 2.0 * rho * m * n
    if s2 <= DEGENERATE_VARIANCE * (m * m + n * n):
        return 1.0 if ell <= 0 else 0.0
    return float(ndtr(-ell / math.sqrt(s2)))
