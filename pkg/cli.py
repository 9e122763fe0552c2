#!/usr/bin/env python3
"""
spreadopt - command-line surface for pricing, Greeks, method comparison and the benchmark tables
"""

import json
import logging
from typing import Dict, List, Optional

import click
from rich.console import Console
from rich.table import Table

from config import (
    DiscretizationConfig,
    McConfig,
    QuadratureConfig,
    SpreadDefaults,
    load_config_file,
    load_environment,
    parse_float_list,
    setup_logging,
)
from contract import SpreadContract
from errors import ConfigError, get_error_ledger, with_error_handling
from greeks import (
    GreeksReport,
    compare_reports,
    freeze_bjerksund_stensland,
    freeze_extended,
    greeks_closed_form,
    greeks_finite_difference,
    pde_residuals,
)
from pricers import ExtendedParams, PriceResult
from tables import (
    PRESETS,
    CompareReport,
    PricingSettings,
    fmt17,
    preset_spec,
    price_with_method,
    render_csv,
    render_json,
    render_markdown,
    run_compare,
    run_table,
)

logger = logging.getLogger(__name__)

FORMATS = ["text", "json", "csv", "markdown"]
CONTRACT_FIELDS = ["f1", "f2", "sigma1", "sigma2", "rho", "r", "t", "k"]


def _install_config(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    """Eager --config: file values become defaults, so explicit flags still win"""
    if not value:
        return value
    try:
        values = load_config_file(value)
    except ConfigError as e:
        get_error_ledger().handle_error(e, "cli", context={"config": value})
        click.echo(f"Error: {e}", err=True)
        ctx.exit(e.exit_code)
    ctx.default_map = {**(ctx.default_map or {}), **values}
    return value


def contract_options(func):
    """--f1 ... --k, defaulting to the benchmark market"""
    for name in reversed(CONTRACT_FIELDS):
        func = click.option(f"--{name}", type=float, default=SpreadDefaults.BASE_MARKET[name],
                            show_default=True)(func)
    return func


def pricing_options(func):
    """Per-method settings shared by every command"""
    options = [
        click.option("--config", type=click.Path(dir_okay=False), callback=_install_config,
                     is_eager=True, expose_value=False, help="key=value file of flag defaults"),
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True),
        click.option("--seed", type=int, default=None, help="MC seed (default SPREADOPT_SEED or 42)"),
        click.option("--paths", type=int, default=McConfig.paths, show_default=True),
        click.option("--antithetic/--no-antithetic", default=True, show_default=True),
        click.option("--disc-b", type=float, default=DiscretizationConfig.b, show_default=True),
        click.option("--disc-n", type=int, default=DiscretizationConfig.n, show_default=True),
        click.option("--lambda", "lambda_", type=float, default=None, help="C1 anchor of the extended formula"),
        click.option("--mu", type=float, default=None, help="C2 anchor of the extended formula"),
        click.option("--gamma", type=float, default=None, help="C3 anchor of the extended formula"),
        click.option("--abs-tol", type=float, default=QuadratureConfig.abs_tol, show_default=True),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_contract(values: Dict[str, float]) -> SpreadContract:
    return SpreadContract(**{name: values[name] for name in CONTRACT_FIELDS})


def build_settings(env: Dict, seed: Optional[int], paths: int, antithetic: bool, disc_b: float,
                   disc_n: int, lambda_: Optional[float], mu: Optional[float], gamma: Optional[float],
                   abs_tol: float) -> PricingSettings:
    anchors = [lambda_, mu, gamma]
    if any(a is not None for a in anchors) and not all(a is not None for a in anchors):
        raise ConfigError("--lambda, --mu and --gamma must be given together")
    params = ExtendedParams(lambda_=lambda_, mu=mu, gamma=gamma) if lambda_ is not None else None
    return PricingSettings(
        disc=DiscretizationConfig(b=disc_b, n=disc_n),
        mc=McConfig(paths=paths, seed=env["SEED"] if seed is None else seed, antithetic=antithetic),
        quad=QuadratureConfig(abs_tol=abs_tol),
        params=params,
    )


def parse_methods(text: str) -> List[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    for method in methods:
        if not SpreadDefaults.is_method(method):
            raise ConfigError(f"unknown pricing method '{method}'")
    return methods


def _float_list_callback(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    if value is None:
        return None
    try:
        return parse_float_list(value)
    except ConfigError as e:
        raise click.BadParameter(str(e))


def _methods_callback(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    if value is None:
        return None
    try:
        return parse_methods(value)
    except ConfigError as e:
        raise click.BadParameter(str(e))


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level")
@click.pass_context
@with_error_handling("cli")
def spreadopt(ctx: click.Context, verbose: bool):
    """European spread option pricing and benchmark tables"""
    env = load_environment()
    setup_logging("DEBUG" if verbose else env["LOG_LEVEL"])
    ctx.obj = env


def _render_price(result: PriceResult, fmt: str):
    if fmt == "json":
        click.echo(result.model_dump_json(indent=2))
    elif fmt == "csv":
        click.echo(f"method,price\n{result.method},{fmt17(result.value)}")
    elif fmt == "markdown":
        click.echo(f"| method | price |\n|---|---|\n| {result.method} | {result.value:.4f} |")
    else:
        console = Console()
        table = Table(title=f"{result.method} price")
        table.add_column("field")
        table.add_column("value", justify="right")
        table.add_row("price", f"{result.value:.10f}")
        for key, value in result.diagnostics.items():
            table.add_row(key, str(value))
        console.print(table)


@spreadopt.command()
@contract_options
@click.option("--method", type=click.Choice(SpreadDefaults.PRICE_METHODS), default="bs", show_default=True)
@pricing_options
@click.pass_context
@with_error_handling("price")
def price(ctx: click.Context, method: str, fmt: str, seed, paths, antithetic, disc_b, disc_n,
          lambda_, mu, gamma, abs_tol, **market):
    """Price one contract; a negative K is priced through put-call parity"""
    c = build_contract(market)
    settings = build_settings(ctx.obj, seed, paths, antithetic, disc_b, disc_n, lambda_, mu, gamma, abs_tol)
    result = price_with_method(c, method, settings)
    if "parity_adjust" in result.diagnostics:
        logger.info(f"🔁 Negative strike priced as the swapped call plus {result.diagnostics['parity_adjust']:.6f}")
    _render_price(result, fmt)


def _render_greeks(report: GreeksReport, residuals, gaps: Optional[Dict[str, float]], fmt: str):
    if fmt == "json":
        payload = {"greeks": report.model_dump(), "pde_residuals": list(residuals)}
        if gaps is not None:
            payload["fd_relative_gaps"] = gaps
        click.echo(json.dumps(payload, indent=2))
        return
    if fmt in ("csv", "markdown"):
        rows = [(name, value) for name, value in report.model_dump().items()]
        rows += [("pde_residual", residuals[0]), ("scaling_residual", residuals[1])]
        if fmt == "csv":
            lines = ["greek,value"] + [f"{name},{fmt17(value)}" for name, value in rows]
        else:
            lines = ["| greek | value |", "|---|---|"] + [f"| {name} | {value:.6g} |" for name, value in rows]
        click.echo("\n".join(lines))
        return

    console = Console()
    table = Table(title="Greeks (frozen slope fractions)")
    table.add_column("greek")
    table.add_column("analytic", justify="right")
    if gaps is not None:
        table.add_column("fd rel gap", justify="right")
    for name, value in report.model_dump().items():
        row = [name, f"{value:.10g}"]
        if gaps is not None:
            row.append(f"{gaps[name]:.2e}" if name in gaps else "")
        table.add_row(*row)
    console.print(table)
    console.print(f"PDE residual: {residuals[0]:.3e}   scaling residual: {residuals[1]:.3e}")


@spreadopt.command()
@contract_options
@click.option("--method", type=click.Choice(["extended", "bs"]), default="extended", show_default=True,
              help="Which slope fractions to freeze")
@click.option("--check-fd", is_flag=True, help="Compare against finite differences")
@pricing_options
@click.pass_context
@with_error_handling("greeks")
def greeks(ctx: click.Context, method: str, check_fd: bool, fmt: str, seed, paths, antithetic,
           disc_b, disc_n, lambda_, mu, gamma, abs_tol, **market):
    """Closed-form Greeks of the extended (or Bjerksund-Stensland) formula"""
    c = build_contract(market)
    settings = build_settings(ctx.obj, seed, paths, antithetic, disc_b, disc_n, lambda_, mu, gamma, abs_tol)
    fx = freeze_extended(c, settings.params) if method == "extended" else freeze_bjerksund_stensland(c)
    report = greeks_closed_form(fx)
    residuals = pde_residuals(fx, report)
    gaps = compare_reports(report, greeks_finite_difference(fx, richardson=True)) if check_fd else None
    _render_greeks(report, residuals, gaps, fmt)


def _render_table_text(doc):
    console = Console()
    for method in doc.methods:
        table = Table(title=method)
        table.add_column("K \\ ρ")
        for rho in doc.rhos:
            table.add_column(f"{rho:g}", justify="right")
        for k, row in zip(doc.strikes, doc.grid(method)):
            table.add_row(f"{k:g}", *[f"{v:.4f}" for v in row])
        console.print(table)

    stats = Table(title=f"Relative error vs {doc.reference}")
    for column in ("method", "mean_rel_err", "max_rel_err", "cells_used", "seconds"):
        stats.add_column(column)
    for s in doc.stats:
        stats.add_row(s.method, f"{s.mean_rel_err:.6g}", f"{s.max_rel_err:.6g}", str(s.cells_used),
                      f"{doc.timings.get(s.method, 0.0):.2f}")
    console.print(stats)


@spreadopt.command()
@contract_options
@click.option("--preset", type=click.Choice(PRESETS), default="table2", show_default=True)
@click.option("--strikes", type=str, default=None, callback=_float_list_callback, help="Comma-separated strikes")
@click.option("--rhos", type=str, default=None, callback=_float_list_callback, help="Comma-separated correlations")
@click.option("--methods", type=str, default=None, callback=_methods_callback, help="Comma-separated methods")
@click.option("--reference", type=click.Choice(SpreadDefaults.PRICE_METHODS), default="discretized",
              show_default=True)
@click.option("--workers", type=int, default=None, help="Worker threads (default SPREADOPT_WORKERS)")
@pricing_options
@click.pass_context
@with_error_handling("table")
def table(ctx: click.Context, preset: str, strikes, rhos, methods, reference, workers, fmt: str, seed,
          paths, antithetic, disc_b, disc_n, lambda_, mu, gamma, abs_tol, **market):
    """Regenerate a benchmark table (or a custom grid) with error statistics"""
    settings = build_settings(ctx.obj, seed, paths, antithetic, disc_b, disc_n, lambda_, mu, gamma, abs_tol)
    spec = preset_spec(
        preset,
        methods=methods or None,
        reference=reference,
        strikes=strikes,
        rhos=rhos,
        base=build_contract(market) if preset == "custom" else None,
    )
    doc = run_table(spec, settings, workers=workers or ctx.obj["WORKERS"])

    if fmt == "csv":
        click.echo(render_csv(doc), nl=False)
    elif fmt == "markdown":
        click.echo(render_markdown(doc), nl=False)
    elif fmt == "json":
        click.echo(render_json(doc))
    else:
        _render_table_text(doc)


def _render_compare(report: CompareReport, fmt: str):
    if fmt == "json":
        click.echo(report.model_dump_json(indent=2))
        return
    if fmt == "csv":
        lines = ["method,price,abs_err,rel_err"]
        for row in report.rows:
            cols = [row.value, row.abs_err, row.rel_err]
            lines.append(",".join([row.method] + ["" if v is None else fmt17(v) for v in cols]))
        click.echo("\n".join(lines))
        return
    if fmt == "markdown":
        lines = [f"Quadrature oracle: {report.oracle:.8f}", "", "| method | price | abs_err | rel_err |",
                 "|---|---|---|---|"]
        for row in report.rows:
            if row.value is None:
                lines.append(f"| {row.method} | error: {row.error} | | |")
            else:
                rel = "" if row.rel_err is None else f"{row.rel_err:.3e}"
                lines.append(f"| {row.method} | {row.value:.8f} | {row.abs_err:.3e} | {rel} |")
        click.echo("\n".join(lines))
        return

    console = Console()
    ranked = Table(title=f"Methods ranked against the quadrature oracle {report.oracle:.8f}")
    for column in ("method", "price", "abs_err", "rel_err"):
        ranked.add_column(column)
    for row in report.rows:
        if row.value is None:
            ranked.add_row(row.method, f"error: {row.error}", "", "")
        else:
            rel = "" if row.rel_err is None else f"{row.rel_err:.3e}"
            ranked.add_row(row.method, f"{row.value:.8f}", f"{row.abs_err:.3e}", rel)
    console.print(ranked)
    if report.ordering_ok is False:
        console.print("[bold red]Lower-bound ordering violated: bs > cd[/bold red]")


@spreadopt.command()
@contract_options
@click.option("--methods", type=str, required=True, callback=_methods_callback,
              help="Comma-separated methods, at least two")
@pricing_options
@click.pass_context
@with_error_handling("compare")
def compare(ctx: click.Context, methods: str, fmt: str, seed, paths, antithetic, disc_b, disc_n,
            lambda_, mu, gamma, abs_tol, **market):
    """Price one contract under several methods and rank them against the quadrature oracle"""
    c = build_contract(market)
    settings = build_settings(ctx.obj, seed, paths, antithetic, disc_b, disc_n, lambda_, mu, gamma, abs_tol)
    report = run_compare(c, methods, settings)
    _render_compare(report, fmt)


def main():
    spreadopt()


if __name__ == "__main__":
    main()
