import json

import pytest
from click.testing import CliRunner

from cli import spreadopt

BASE_FLAGS = ["--f1", "112.22", "--f2", "103.05", "--sigma1", "0.1", "--sigma2", "0.15",
              "--r", "0.05", "--t", "1"]


@pytest.fixture
def runner():
    return CliRunner()


def price_json(runner, *args):
    result = runner.invoke(spreadopt, ["price", "--format", "json", *args])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_price_bjerksund_stensland(runner):
    payload = price_json(runner, "--method", "bs", *BASE_FLAGS, "--rho", "0.8", "--k", "25")
    assert payload["value"] == pytest.approx(0.1032, abs=6e-5)
    assert payload["method"] == "bs"


def test_price_margrabe(runner):
    payload = price_json(runner, "--method", "margrabe", *BASE_FLAGS, "--rho", "0", "--k", "0")
    assert payload["value"] == pytest.approx(12.5237, abs=6e-5)


def test_price_negative_strike_reports_parity(runner):
    payload = price_json(runner, "--method", "kirk", "--k", "-20", "--rho", "-0.99")
    assert payload["value"] == pytest.approx(29.6616, abs=1e-4)
    assert "parity_adjust" in payload["diagnostics"]


def test_mc_output_is_reproducible(runner):
    args = ["price", "--method", "mc", "--paths", "20000", "--seed", "42", "--k", "5", "--format", "csv"]
    first = runner.invoke(spreadopt, args)
    second = runner.invoke(spreadopt, args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    assert first.stdout.startswith("method,price\nmc,")


def test_text_output(runner):
    result = runner.invoke(spreadopt, ["price", "--method", "bs", "--k", "15", "--rho", "0.3"])
    assert result.exit_code == 0
    assert "price" in result.stdout


def test_domain_error_exits_with_one(runner):
    result = runner.invoke(spreadopt, ["price", "--method", "margrabe", "--k", "5"])
    assert result.exit_code == 1
    assert "Error:" in result.output


def test_invalid_contract_exits_with_one(runner):
    result = runner.invoke(spreadopt, ["price", "--t", "-1"])
    assert result.exit_code == 1


def test_bad_flag_is_a_usage_error(runner):
    assert runner.invoke(spreadopt, ["price", "--method", "heston"]).exit_code == 2
    assert runner.invoke(spreadopt, ["price", "--k", "abc"]).exit_code == 2
    assert runner.invoke(spreadopt, ["table", "--preset", "table9"]).exit_code == 2


def test_partial_extended_anchors_are_a_usage_error(runner):
    result = runner.invoke(spreadopt, ["price", "--method", "extended", "--k", "5", "--lambda", "0.1"])
    assert result.exit_code == 2
    assert "must be given together" in result.output


@pytest.mark.parametrize("args", [
    ["price", "--method", "mc", "--paths", "1"],
    ["price", "--method", "discretized", "--disc-n", "0"],
    ["price", "--abs-tol", "0"],
    ["table", "--preset", "custom", "--methods", "heston"],
    ["table", "--preset", "custom", "--rhos", " , "],
    ["compare", "--methods", "bs,heston"],
])
def test_invalid_settings_are_usage_errors(runner, args):
    assert runner.invoke(spreadopt, args).exit_code == 2


def test_config_file_supplies_defaults(runner, tmp_path):
    config = tmp_path / "spread.env"
    config.write_text("method=bs\nrho=0.8\nk=25\n")
    payload = price_json(runner, "--config", str(config))
    assert payload["value"] == pytest.approx(0.1032, abs=6e-5)

    # explicit flags win over the file
    payload = price_json(runner, "--config", str(config), "--k", "15", "--rho", "0.99")
    assert payload["value"] == pytest.approx(0.1017, abs=6e-5)


def test_config_file_with_unknown_key(runner, tmp_path):
    config = tmp_path / "bad.env"
    config.write_text("strike=25\n")
    result = runner.invoke(spreadopt, ["price", "--config", str(config)])
    assert result.exit_code == 2
    assert "unknown config key" in result.output


def test_greeks_json(runner):
    result = runner.invoke(spreadopt, ["greeks", "--k", "15", "--rho", "0.3", "--check-fd", "--format", "json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert max(payload["pde_residuals"]) < 1e-10
    assert payload["fd_relative_gaps"]["dF1"] < 1e-6
    assert 0 < payload["greeks"]["dF1"] < 1


def test_greeks_text(runner):
    result = runner.invoke(spreadopt, ["greeks", "--method", "bs", "--k", "5"])
    assert result.exit_code == 0
    assert "PDE residual" in result.stdout


def test_table_csv(runner):
    result = runner.invoke(spreadopt, [
        "table", "--preset", "custom", "--strikes", "0,15", "--rhos", "-0.5,0.3",
        "--methods", "discretized,bs", "--format", "csv", "--workers", "2",
    ])
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert lines[0] == "method,K,rho,price"
    assert len([line for line in lines[1:9] if line.startswith(("discretized,", "bs,"))]) == 8
    assert lines[10] == "method,mean_rel_err,max_rel_err,cells_used"
    assert lines[11].startswith("bs,")


def test_table_bad_strike_list(runner):
    result = runner.invoke(spreadopt, ["table", "--preset", "custom", "--strikes", "0,abc"])
    assert result.exit_code == 2
    assert "--strikes" in result.output


def test_table_markdown_preset(runner):
    result = runner.invoke(spreadopt, [
        "table", "--preset", "table2", "--methods", "bs", "--format", "markdown", "--strikes", "15",
    ])
    assert result.exit_code == 0, result.output
    bs_section = result.stdout.split("## bs")[1]
    row = next(line for line in bs_section.splitlines() if line.startswith("| 15 |"))
    values = [float(cell) for cell in row.strip("|").split("|")[1:]]
    assert values == pytest.approx([7.4977, 6.2421, 4.7443, 3.6796, 1.3421, 0.1017], abs=1.1e-4)
    assert "## Timing (s)" in result.stdout


def test_compare_json(runner):
    result = runner.invoke(spreadopt, [
        "compare", "--methods", "kirk,bs", "--k", "15", "--rho", "0.99", "--format", "json",
    ])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["rows"][0]["method"] == "bs"
    assert payload["oracle"] == pytest.approx(0.1025, abs=1e-4)


def test_compare_needs_two_methods(runner):
    result = runner.invoke(spreadopt, ["compare", "--methods", "bs"])
    assert result.exit_code == 2
