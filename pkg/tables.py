"""
Benchmark harness - method dispatch, K x rho grids, error statistics and table documents
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from config import DiscretizationConfig, McConfig, QuadratureConfig, SpreadDefaults
from contract import SpreadContract, parity_normalize
from errors import ConfigError, SpreadOptionError, get_error_ledger
from montecarlo import price_monte_carlo
from pricers import (
    ExtendedParams,
    PriceResult,
    default_extended_params,
    price_bachelier,
    price_bjerksund_stensland,
    price_cd_result,
    price_discretized,
    price_extended,
    price_kirk,
    price_margrabe,
    price_quadrature_oracle,
)

logger = logging.getLogger(__name__)

PRESETS = ["table1", "table2", "table3", "custom"]


@dataclass(frozen=True)
class PricingSettings:
    """Per-method configuration shared by every cell of a run"""
    disc: DiscretizationConfig = field(default_factory=DiscretizationConfig)
    mc: McConfig = field(default_factory=McConfig)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    params: Optional[ExtendedParams] = None


def _price_normalized(c: SpreadContract, method: str, settings: PricingSettings) -> PriceResult:
    if method == "bachelier":
        return price_bachelier(c)
    if method == "kirk":
        return price_kirk(c)
    if method == "margrabe":
        return price_margrabe(c)
    if method == "bs":
        return price_bjerksund_stensland(c)
    if method == "cd":
        return price_cd_result(c)
    if method == "discretized":
        return price_discretized(c, settings.disc)
    if method == "extended":
        return price_extended(c, settings.params or default_extended_params(c))
    if method == "quadrature":
        return price_quadrature_oracle(c, settings.quad)
    if method == "mc":
        return price_monte_carlo(c, settings.mc)
    raise ConfigError(f"unknown pricing method '{method}'")


def price_with_method(c: SpreadContract, method: str,
                      settings: PricingSettings = PricingSettings()) -> PriceResult:
    """Price under one method; a negative strike goes through parity and the adjustment is reported"""
    normalized, adjust = parity_normalize(c)
    result = _price_normalized(normalized, method, settings)
    if adjust == 0 and normalized is c:
        return result
    diagnostics = dict(result.diagnostics)
    diagnostics["parity_adjust"] = adjust
    diagnostics["normalized_value"] = result.value
    return result.model_copy(update={"value": result.value + adjust, "diagnostics": diagnostics})


def cell_seed(base_seed: int, k_index: int, rho_index: int) -> int:
    """Per-cell MC seed; independent of scheduling order"""
    state = np.random.SeedSequence([base_seed, k_index, rho_index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


@dataclass(frozen=True)
class TableSpec:
    """A K x rho grid priced under several methods"""
    preset: str
    strikes: List[float]
    rhos: List[float]
    base: SpreadContract
    methods: List[str]
    reference: str = "discretized"

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset '{self.preset}'")
        if not self.strikes or not self.rhos:
            raise ConfigError("a table needs at least one strike and one correlation")
        if not self.methods:
            raise ConfigError("a table needs at least one method")
        for method in self.methods + [self.reference]:
            if not SpreadDefaults.is_method(method):
                raise ConfigError(f"unknown pricing method '{method}'")
        if self.reference not in self.methods and self.reference != "quadrature":
            raise ConfigError(f"reference '{self.reference}' must be a table method or 'quadrature'")

    @property
    def priced_methods(self) -> List[str]:
        if self.reference in self.methods:
            return list(self.methods)
        return list(self.methods) + [self.reference]


def preset_spec(preset: str, methods: Optional[List[str]] = None, reference: Optional[str] = None,
                strikes: Optional[List[float]] = None, rhos: Optional[List[float]] = None,
                base: Optional[SpreadContract] = None) -> TableSpec:
    """Grid of one of the benchmark tables, with optional overrides"""
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset '{preset}'")
    market = SpreadDefaults.base_market()
    if preset == "table3":
        market["sigma2"] = SpreadDefaults.HIGH_VOL_SIGMA2
    default_methods = ["mc", "discretized"] if preset == "table1" else ["discretized", "kirk", "bs", "extended"]
    methods = list(methods or default_methods)
    reference = reference or "discretized"
    if reference not in methods and reference != "quadrature":
        methods.insert(0, reference)
    return TableSpec(
        preset=preset,
        strikes=strikes or list(SpreadDefaults.TABLE_STRIKES),
        rhos=rhos or list(SpreadDefaults.TABLE_RHOS),
        base=base or SpreadContract(**market),
        methods=methods,
        reference=reference,
    )


class TableCell(BaseModel):
    method: str
    k: float
    rho: float
    # NaN for a failed cell; null in JSON
    price: Optional[float]
    std_error: Optional[float] = None


class ErrorStats(BaseModel):
    """Relative error of a method against the reference over the grid"""
    method: str
    mean_rel_err: Optional[float]
    max_rel_err: Optional[float]
    cells_used: int


class TableDocument(BaseModel):
    preset: str
    base: Dict[str, float]
    strikes: List[float]
    rhos: List[float]
    methods: List[str]
    reference: str
    cells: List[TableCell]
    stats: List[ErrorStats]
    timings: Dict[str, float] = Field(default_factory=dict)

    def grid(self, method: str) -> List[List[float]]:
        """Prices of one method as rows over K, columns over rho"""
        lookup = {
            (cell.k, cell.rho): math.nan if cell.price is None else cell.price
            for cell in self.cells
            if cell.method == method
        }
        return [[lookup[(k, rho)] for rho in self.rhos] for k in self.strikes]


def _price_cell(spec: TableSpec, settings: PricingSettings, method: str,
                k_index: int, rho_index: int) -> Tuple[TableCell, float]:
    k, rho = spec.strikes[k_index], spec.rhos[rho_index]
    c = spec.base.replace(k=k, rho=rho)
    cell_settings = settings
    if method == "mc":
        cell_settings = replace(settings, mc=replace(settings.mc, seed=cell_seed(settings.mc.seed, k_index, rho_index)))

    started = time.perf_counter()
    try:
        result = price_with_method(c, method, cell_settings)
        price, std_error = result.value, result.diagnostics.get("std_error")
    except SpreadOptionError as e:
        get_error_ledger().handle_error(e, "table", context={"method": method, "k": k, "rho": rho})
        price, std_error = math.nan, None
    elapsed = time.perf_counter() - started
    return TableCell(method=method, k=k, rho=rho, price=price, std_error=std_error), elapsed


def error_stats(method: str, values: List[float], reference: List[float]) -> ErrorStats:
    """Mean and max relative error over cells whose reference is at least MIN_REFERENCE"""
    errors = [
        abs(v - ref) / abs(ref)
        for v, ref in zip(values, reference)
        if math.isfinite(v) and math.isfinite(ref) and abs(ref) >= SpreadDefaults.MIN_REFERENCE
    ]
    if not errors:
        return ErrorStats(method=method, mean_rel_err=math.nan, max_rel_err=math.nan, cells_used=0)
    return ErrorStats(method=method, mean_rel_err=float(np.mean(errors)),
                      max_rel_err=float(np.max(errors)), cells_used=len(errors))


def run_table(spec: TableSpec, settings: PricingSettings = PricingSettings(),
              workers: int = 4) -> TableDocument:
    """Price every (method, K, rho) cell and compute the error statistics"""
    logger.info(f"📊 Pricing {spec.preset}: {len(spec.strikes)}x{len(spec.rhos)} grid, methods {spec.priced_methods}")
    jobs = [
        (method, i, j)
        for method in spec.priced_methods
        for i in range(len(spec.strikes))
        for j in range(len(spec.rhos))
    ]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(lambda job: _price_cell(spec, settings, *job), jobs))

    cells = [cell for cell, _ in outcomes]
    timings: Dict[str, float] = {}
    for (method, _, _), (_, elapsed) in zip(jobs, outcomes):
        timings[method] = timings.get(method, 0.0) + elapsed

    by_method: Dict[str, List[float]] = {}
    for cell in cells:
        by_method.setdefault(cell.method, []).append(cell.price)
    stats = [
        error_stats(method, by_method[method], by_method[spec.reference])
        for method in spec.methods
        if method != spec.reference
    ]

    for s in stats:
        logger.info(f"✅ {s.method}: mean rel err {s.mean_rel_err:.6g}, max {s.max_rel_err:.6g} over {s.cells_used} cells")
    return TableDocument(
        preset=spec.preset,
        base={name: getattr(spec.base, name) for name in ("f1", "f2", "sigma1", "sigma2", "r", "t")},
        strikes=list(spec.strikes),
        rhos=list(spec.rhos),
        methods=spec.priced_methods,
        reference=spec.reference,
        cells=cells,
        stats=stats,
        timings=timings,
    )


def fmt17(value: float) -> str:
    """17 significant digits: enough to round-trip a double"""
    return format(value, ".17g")


def render_csv(doc: TableDocument) -> str:
    """Cells then the statistics block; timings are left out so runs compare byte for byte"""
    lines = ["method,K,rho,price"]
    lines += [f"{cell.method},{fmt17(cell.k)},{fmt17(cell.rho)},{fmt17(cell.price)}" for cell in doc.cells]
    lines.append("")
    lines.append("method,mean_rel_err,max_rel_err,cells_used")
    lines += [f"{s.method},{fmt17(s.mean_rel_err)},{fmt17(s.max_rel_err)},{s.cells_used}" for s in doc.stats]
    return "\n".join(lines) + "\n"


def render_markdown(doc: TableDocument) -> str:
    """One K x rho grid per method at 4 decimals, then statistics and timings"""
    header = "| K \\ ρ | " + " | ".join(f"{rho:g}" for rho in doc.rhos) + " |"
    rule = "|---|" + "---|" * len(doc.rhos)
    out = [f"# {doc.preset}", ""]
    for method in doc.methods:
        out += [f"## {method}", "", header, rule]
        for k, row in zip(doc.strikes, doc.grid(method)):
            out.append(f"| {k:g} | " + " | ".join(f"{v:.4f}" for v in row) + " |")
        out.append("")
    out += [f"## Relative error vs {doc.reference}", "",
            "| method | mean_rel_err | max_rel_err | cells_used |", "|---|---|---|---|"]
    out += [f"| {s.method} | {s.mean_rel_err:.6g} | {s.max_rel_err:.6g} | {s.cells_used} |" for s in doc.stats]
    out += ["", "## Timing (s)", "", "| method | seconds |", "|---|---|"]
    out += [f"| {method} | {seconds:.2f} |" for method, seconds in doc.timings.items()]
    return "\n".join(out) + "\n"


def render_json(doc: TableDocument) -> str:
    """Strict JSON: failed cells and empty statistics come out as null"""
    return doc.model_dump_json(indent=2)


class CompareRow(BaseModel):
    method: str
    value: Optional[float] = None
    abs_err: Optional[float] = None
    rel_err: Optional[float] = None
    error: Optional[str] = None


class CompareReport(BaseModel):
    contract: Dict[str, float]
    oracle: float
    rows: List[CompareRow]
    ordering_ok: Optional[bool] = None


def run_compare(c: SpreadContract, methods: List[str],
                settings: PricingSettings = PricingSettings()) -> CompareReport:
    """Price one contract under each method, rank by distance to the quadrature oracle"""
    if len(methods) < 2:
        raise ConfigError("compare needs at least two methods")
    oracle = price_with_method(c, "quadrature", settings).value

    rows = []
    values: Dict[str, float] = {}
    for method in methods:
        try:
            value = price_with_method(c, method, settings).value
        except SpreadOptionError as e:
            get_error_ledger().handle_error(e, "compare", context={"method": method})
            rows.append(CompareRow(method=method, error=str(e)))
            continue
        values[method] = value
        abs_err = abs(value - oracle)
        rows.append(CompareRow(method=method, value=value, abs_err=abs_err,
                               rel_err=abs_err / abs(oracle) if oracle != 0 else None))

    rows.sort(key=lambda row: (row.abs_err is None, row.abs_err if row.abs_err is not None else 0.0))

    ordering_ok = None
    if "bs" in values and "cd" in values:
        ordering_ok = values["bs"] <= values["cd"] + 1e-10
        if not ordering_ok:
            logger.error(f"🚨 Lower-bound ordering violated: BS {values['bs']} > CD {values['cd']}")

    return CompareReport(
        contract={name: getattr(c, name) for name in ("f1", "f2", "sigma1", "sigma2", "rho", "r", "t", "k")},
        oracle=oracle,
        rows=rows,
        ordering_ok=ordering_ok,
    )
