import json
import subprocess
import sys

import pytest

from dgbo_lab.cli import ConfigError, main, parse_config, run

SMALL_SIM = ["simulate", "--K", "8", "--T_final", "2.0", "--dt", "0.05"]


def run_cli(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_writes_report_and_csv(tmp_path, capsys):
    code, out, _ = run_cli(capsys, SMALL_SIM + ["--out", str(tmp_path)])
    assert code == 0
    rep = json.loads(out)
    assert rep["status"] == "pass" and rep["config"]["K"] == 8
    assert "duration_s" not in rep
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,l2_norm,mass_abs,dissipation" and len(lines) == 42
    assert json.loads((tmp_path / "report.json").read_text()) == rep


def test_repeated_runs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(capsys, SMALL_SIM + ["--out", str(a)])
    run_cli(capsys, SMALL_SIM + ["--out", str(b)])
    for name in ("report.json", "trajectory.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_report_can_be_replayed_as_config(tmp_path, capsys):
    run_cli(capsys, SMALL_SIM + ["--seed", "7", "--out", str(tmp_path)])
    code, out, _ = run_cli(capsys, ["simulate", "--config", str(tmp_path / "report.json")])
    assert code == 0
    assert out == (tmp_path / "report.json").read_text()


def test_timing_is_opt_in(capsys):
    code, out, _ = run_cli(capsys, SMALL_SIM + ["--timing"])
    assert code == 0 and json.loads(out)["duration_s"] >= 0


def test_zero_initial_condition(tmp_path, capsys):
    code, _, _ = run_cli(capsys, SMALL_SIM + ["--ic", '{"kind": "zero"}', "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "trajectory.csv").read_text().splitlines()[1:]
    assert all(float(r.split(",")[1]) == 0.0 for r in rows)


@pytest.mark.parametrize("argv,key", [
    (["simulate", "--alpha", "1.0"], "alpha"),
    (["simulate", "--beta", "0.2"], "beta"),
    (["gramian", "--K", "0"], "K"),
    (["simulate", "--profile", "square"], "profile"),
    (["verify-claims", "--claim", "ck", "--profiles", '["flat"]'], "profiles"),
])
def test_invalid_values_exit_2(capsys, argv, key):
    code, out, err = run_cli(capsys, argv)
    assert code == 2 and out == ""
    assert f"({key})" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"K": 8, "gamma": 1}))
    code, _, err = run_cli(capsys, ["simulate", "--config", str(cfg)])
    assert code == 2 and "(gamma)" in err
    cfg.write_text("[1, 2]")
    assert run_cli(capsys, ["simulate", "--config", str(cfg)])[0] == 2
    assert run_cli(capsys, ["simulate", "--config", str(tmp_path / "missing.json")])[0] == 2


def test_parse_config_defaults_and_errors():
    cfg = parse_config(None, {"K": 4}, "znorm")
    assert cfg.values["K"] == 4 and cfg.values["b"] == 1.0 and cfg.seed == 0
    with pytest.raises(ConfigError):
        parse_config({"command": "gramian"}, None, "simulate")
    with pytest.raises(ConfigError):
        parse_config(None, {"K": "many"}, "simulate")


def test_blow_up_exit_3(capsys):
    code, out, _ = run_cli(capsys, ["simulate", "--K", "32", "--T_final", "20", "--dt", "0.5"])
    assert code == 3
    rep = json.loads(out)
    assert rep["status"] == "error" and rep["error"]["type"] == "BlowUpError"


def test_decay_rate_from_simulation(tmp_path, capsys):
    run_cli(capsys, ["simulate", "--K", "8", "--T_final", "60", "--dt", "0.1", "--nonlinearity", "0",
                     "--ic", '{"kind": "random", "amplitude": 1.0}', "--out", str(tmp_path)])
    code, out, _ = run_cli(capsys, ["decay-rate", "--input", str(tmp_path / "trajectory.csv")])
    spec = json.loads(run_cli(capsys, ["linear-spectrum", "--K", "8", "--fit", "false"])[1])
    rate = json.loads(out)["result"]["rate"]
    assert code == 0
    assert abs(rate - spec["result"]["decay_rate"]) < 1e-3 * rate


@pytest.mark.parametrize("argv", [
    ["ingham", "--K", "6"],
    ["ucp", "--K", "6"],
    ["znorm", "--K", "4", "--samples", "4096"],
    ["gramian", "--K", "6", "--T", "2.0"],
    ["verify-claims", "--claim", "resonance", "--K_max", "30"],
    ["verify-claims", "--claim", "a2"],
])
def test_commands_pass(capsys, argv):
    code, out, _ = run_cli(capsys, argv)
    rep = json.loads(out)
    assert code == 0, rep
    assert rep["checks"] and all(c["passed"] for c in rep["checks"])


def test_verify_rejects_inadmissible_b(capsys):
    code, out, _ = run_cli(capsys, ["verify-claims", "--claim", "bilinear", "--b", "0.9"])
    assert code in (2, 3)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dgbo_lab", "ingham", "--K", "4"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["config"]["command"] == "ingham"


def test_missing_input_is_a_config_error(capsys):
    with pytest.raises(ConfigError):
        parse_config(None, {"input": "/nonexistent.csv"}, "decay-rate")
    assert run_cli(capsys, ["decay-rate"])[0] == 2


def test_run_collects_errors(tmp_path):
    bad = tmp_path / "t.csv"
    bad.write_text("x,y\n")
    rep = run(parse_config(None, {"input": str(bad)}, "decay-rate"))
    assert rep.error["type"] == "ValueError" and not rep.ok
