import json
import math

import numpy as np
import pytest

from discorrelate.analysis import logarithmic_negativity
from discorrelate.cli import EXIT_DIFF, EXIT_NUMERICAL, EXIT_SPEC, main, parse_number
from discorrelate.report import read_grid_csv
from discorrelate.scenarios import ScenarioSpec, evaluate, resolve

SMALL = ["--kind", "coherent", "--alpha", "0.9", "--beta", "0.9", "--t", "0.5", "--dim", "12"]


@pytest.mark.parametrize("text,value", [
    ("sqrt8", math.sqrt(8)), ("sqrt(2/15)", math.sqrt(2 / 15)), ("2i", 2j),
    ("-1.5+0.5i", -1.5 + 0.5j), ("sqrt8*exp(i*pi/2)", 1j * math.sqrt(8)), ("1e-3", 1e-3),
])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("text", ["__import__('os')", "x", "1/0", "sqrt(", "open(1)"])
def test_parse_number_rejects(text):
    from discorrelate.errors import SpecError
    with pytest.raises(SpecError):
        parse_number(text)


def test_run_writes_grid_and_summary(tmp_path, capsys):
    assert main(["run", "custom", *SMALL, "--out", str(tmp_path)]) == 0
    probs = read_grid_csv(tmp_path / "custom_grid.csv")
    assert probs.sum() == pytest.approx(1.0, abs=1e-8)
    assert probs.min() >= -1e-12
    assert (tmp_path / "custom.png").stat().st_size > 0
    summary = json.loads((tmp_path / "custom_summary.json").read_text())
    for key in ("herald_probability", "same_count_probability", "discorrelation",
                "log_negativity", "discarded_weight", "parameters"):
        assert key in summary
    # summary values agree with a direct recomputation
    ev = evaluate(resolve(ScenarioSpec("custom", kind="coherent", alpha=0.9, beta=0.9, t=0.5,
                                       dim=12)))
    assert summary["log_negativity"] == logarithmic_negativity(ev.state)
    same = float(np.trace(probs))
    assert summary["discorrelation"] == pytest.approx(
        1 - same / summary["reference_same_count_probability"], abs=1e-12)
    assert summary["same_count_probability"] == pytest.approx(same, abs=1e-15)
    assert json.loads(capsys.readouterr().out)["log_negativity"] == summary["log_negativity"]


def test_run_is_deterministic(tmp_path):
    for sub in ("a", "b"):
        assert main(["run", "custom", *SMALL, "--loss", "0.3", "--no-plot",
                     "--out", str(tmp_path / sub)]) == 0
    for name in ("custom_grid.csv", "custom_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_lossy_grid_is_valid(tmp_path):
    assert main(["run", "custom", *SMALL, "--loss", "0.4", "--loss-point", "herald",
                 "--no-plot", "--out", str(tmp_path)]) == 0
    probs = read_grid_csv(tmp_path / "custom_grid.csv")
    assert probs.sum() == pytest.approx(1.0, abs=1e-8) and probs.min() >= -1e-12


def test_json_format_embeds_grid(tmp_path):
    assert main(["run", "fig3a", "--dim", "30", "--format", "json", "--no-plot",
                 "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "fig3a_summary.json").read_text())
    assert np.sum(summary["grid"]) == pytest.approx(1.0)
    assert not (tmp_path / "fig3a_grid.csv").exists()


def test_sweep_writes_curve(tmp_path):
    assert main(["sweep", "custom", *SMALL, "--param", "loss", "--from", "0", "--to", "1",
                 "--steps", "5", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "custom_sweep-loss_curve.csv").read_text().splitlines()
    assert lines[0] == "param,value,E_N,D,herald_probability"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == sorted(values) and len(values) == 5
    assert (tmp_path / "custom_sweep-loss.png").exists()


def test_diff_exit_codes(capsys):
    assert main(["diff", "fig3c"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True
    assert main(["diff", "fig3c", "--tolerance", "0"]) == EXIT_DIFF


def test_error_records(capsys):
    assert main(["run", "fig3c", "--t", "2"]) == EXIT_SPEC
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "SpecError" and err["code"] == "bad_spec"
    assert main(["run", "custom", "--kind", "coherent", "--alpha", "5", "--beta", "5",
                 "--t", "0.5", "--dim", "12"]) == EXIT_NUMERICAL
    assert json.loads(capsys.readouterr().err)["code"] == "tail_too_large"
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_SPEC


def test_zero_norm_exit(capsys):
    code = main(["run", "custom", *SMALL, "--loss", "1", "--loss-point", "herald", "--no-plot",
                 "--out", "/tmp/discorrelate-test"])
    assert code == EXIT_NUMERICAL
    assert json.loads(capsys.readouterr().err)["code"] == "zero_norm"
