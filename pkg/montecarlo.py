"""
Monte-Carlo oracle for spread and sum options

Terminal prices are sampled exactly (no time stepping):
    S2(T) = F2 exp(-σ2²T/2 + σ2√T X),  S1(T) = F1 exp(-σ1²T/2 + σ1√T Y),
    X = Z1,  Y = ρ Z1 + √(1-ρ²) Z2.
Paths are generated in fixed-size chunks, each from its own child of
SeedSequence(seed), so results depend only on (seed, paths, chunk_size).
"""

import logging
import math
from enum import Enum
from typing import Iterator, Tuple

import numpy as np

from config import McConfig
from contract import SpreadContract
from pricers import PriceResult

logger = logging.getLogger(__name__)


class Payoff(Enum):
    SPREAD = "spread"
    SUM = "sum"


def _chunk_sizes(cfg: McConfig) -> Iterator[int]:
    remaining = cfg.paths
    while remaining > 0:
        size = min(cfg.chunk_size, remaining)
        yield size
        remaining -= size


def _normal_chunks(cfg: McConfig) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """(Z1, Z2) per chunk; antithetic chunks mirror their first half"""
    sizes = list(_chunk_sizes(cfg))
    streams = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    for size, stream in zip(sizes, streams):
        rng = np.random.default_rng(stream)
        if cfg.antithetic:
            half = size // 2
            z_half = rng.standard_normal((2, half))
            z = np.concatenate([z_half, -z_half], axis=1)
            if size % 2 == 1:
                z = np.concatenate([z, rng.standard_normal((2, 1))], axis=1)
        else:
            z = rng.standard_normal((2, size))
        yield z[0], z[1]


def _terminal(c: SpreadContract, z1: np.ndarray, z2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    vol1 = c.sigma1 * c.sqrt_t
    vol2 = c.sigma2 * c.sqrt_t
    y = c.rho * z1 + math.sqrt(max(1.0 - c.rho ** 2, 0.0)) * z2
    s1 = c.f1 * np.exp(-0.5 * vol1 ** 2 + vol1 * y)
    s2 = c.f2 * np.exp(-0.5 * vol2 ** 2 + vol2 * z1)
    return s1, s2


def sample_terminal_prices(c: SpreadContract, cfg: McConfig) -> Tuple[np.ndarray, np.ndarray]:
    """All sampled (S1(T), S2(T)) pairs, in stream order"""
    pairs = [_terminal(c, z1, z2) for z1, z2 in _normal_chunks(cfg)]
    return np.concatenate([p[0] for p in pairs]), np.concatenate([p[1] for p in pairs])


def _pair_means(values: np.ndarray, antithetic: bool) -> np.ndarray:
    """Average each draw with its mirror so the samples are independent"""
    if not antithetic:
        return values
    half = values.size // 2
    paired = 0.5 * (values[:half] + values[half:2 * half])
    if values.size % 2 == 1:
        paired = np.append(paired, values[-1])
    return paired


def _estimate(c: SpreadContract, cfg: McConfig, sample_fn) -> Tuple[float, float]:
    """Discounted mean and std error of a per-path quantity"""
    samples = np.concatenate([
        _pair_means(sample_fn(*_terminal(c, z1, z2)), cfg.antithetic)
        for z1, z2 in _normal_chunks(cfg)
    ])
    mean = float(np.mean(samples))
    std_error = float(np.std(samples, ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
    return c.discount * mean, c.discount * std_error


def price_monte_carlo(c: SpreadContract, cfg: McConfig = McConfig(),
                      payoff: Payoff = Payoff.SPREAD) -> PriceResult:
    """Discounted mean payoff with its std error"""
    if c.sigma1 == 0 and c.sigma2 == 0:
        if payoff is Payoff.SPREAD:
            value = c.intrinsic()
        else:
            value = c.discount * max(c.f1 + c.f2 - c.k, 0.0)
        return PriceResult(value=value, method="mc",
                           diagnostics={"std_error": 0.0, "paths": cfg.paths, "seed": cfg.seed})

    if payoff is Payoff.SPREAD:
        def sample_fn(s1, s2):
            return np.maximum(s1 - s2 - c.k, 0.0)
    else:
        def sample_fn(s1, s2):
            return np.maximum(s1 + s2 - c.k, 0.0)

    value, std_error = _estimate(c, cfg, sample_fn)
    logger.debug(f"🎲 MC {payoff.value}: {value:.6f} ± {std_error:.2e} ({cfg.paths} paths, seed {cfg.seed})")
    return PriceResult(
        value=value,
        method="mc",
        diagnostics={"std_error": std_error, "paths": cfg.paths, "seed": cfg.seed,
                     "antithetic": cfg.antithetic, "payoff": payoff.value},
    )


def digital_decomposition_mc(c: SpreadContract, cfg: McConfig = McConfig()) -> PriceResult:
    """
    Estimate e^{-rT}(F1 C1 - F2 C2 - K C3) with each C_j the frequency of
    the region above curve C_j, all from the same normals.
    """
    vol1 = c.sigma1 * c.sqrt_t
    vol2 = c.sigma2 * c.sqrt_t
    fbar1, fbar2 = c.fbar1, c.fbar2
    g1, g2, alpha = c.g1, c.g2, c.alpha
    counts = np.zeros(3)

    def sample_fn(s1, s2):
        # s1 = F̄1 e^{σ1√T Y}, s2 = F̄2 e^{σ2√T X} on the base measure
        ey = s1 / fbar1
        ex = s2 / fbar2 if fbar2 > 0 else np.zeros_like(s2)
        hit1 = g1 * fbar1 * ey >= alpha * fbar2 * ex + c.k
        hit2 = alpha * fbar1 * ey >= g2 * fbar2 * ex + c.k
        hit3 = s1 >= s2 + c.k
        counts[:] += [hit1.sum(), hit2.sum(), hit3.sum()]
        return c.f1 * hit1 - c.f2 * hit2 - c.k * hit3

    value, std_error = _estimate(c, cfg, sample_fn)
    frequencies = (counts / cfg.paths).tolist()
    return PriceResult(
        value=value,
        method="mc_digital",
        diagnostics={"std_error": std_error, "paths": cfg.paths, "seed": cfg.seed,
                     "digital_frequencies": frequencies},
    )
