import csv
import io
import json
import subprocess
import sys

import pytest

from gffkit import cli, config

VACUUM = {"kind": "quasi-free", "model": {"kind": "vacuum", "mass": 1.0}}
TILDE = {"kind": "tilde-series", "vacuum": {"kind": "vacuum"}, "w": {"kind": "w-kernel"}}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if name.endswith(".json") else obj)
    return str(p)


def run_cli(tmp_path, scenario, conf, *extra):
    path = write(tmp_path, "conf.json", conf)
    out = tmp_path / "report.json"
    code = cli.main([scenario, "--config", path, "--out", str(out), *extra])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report, out


def test_gff_check_vacuum_passes(tmp_path):
    conf = {"state": VACUUM, "packets": {"random": 3, "seed": 1}, "n_max": 5, "limit": 30}
    code, rep, _ = run_cli(tmp_path, "gff-check", conf)
    assert code == 0 and rep["verdict"] == "PASS"
    assert rep["schema"] == cli.SCHEMA_ID
    assert rep["config_sha256"] == config.config_hash(conf)
    assert set(rep["results"]["worst_residual"]) == {"3", "4", "5"}


def test_reports_are_byte_identical(tmp_path):
    conf = {"state": VACUUM, "packets": {"random": 4, "seed": 2}, "n_max": 4, "limit": 20, "seed": 9}
    _, _, out = run_cli(tmp_path, "gff-check", conf)
    first = out.read_bytes()
    _, _, out = run_cli(tmp_path, "gff-check", conf)
    assert out.read_bytes() == first


def test_jobs_do_not_change_the_report(tmp_path):
    conf = {"state": VACUUM, "packets": {"random": 3, "seed": 4}, "masses": [1.0, 2.0]}
    _, _, out = run_cli(tmp_path, "kg", conf)
    serial = out.read_bytes()
    _, _, out = run_cli(tmp_path, "kg", conf, "--jobs", "3")
    assert out.read_bytes() == serial


def test_timing_is_opt_in(tmp_path):
    conf = {"n": 3}
    _, rep, _ = run_cli(tmp_path, "partitions", conf)
    assert "wall_clock_seconds" not in rep
    _, rep, _ = run_cli(tmp_path, "partitions", conf, "--timing")
    assert rep["wall_clock_seconds"] >= 0


def test_partitions_scenario(tmp_path):
    code, rep, _ = run_cli(tmp_path, "partitions", {"n": 4})
    assert code == 0 and rep["results"]["count"] == 15 == rep["results"]["bell"]
    assert len(rep["results"]["partitions"]) == 15


def test_zero_section_query_is_an_input_error(tmp_path, capsys):
    zero = {"point": {"t": 0, "x": 0}, "covector": {"k0": 0, "k1": 0}}
    conf = {"queries": [{"slots": [zero, dict(zero, point={"t": 1, "x": 0})]}]}
    code, rep, _ = run_cli(tmp_path, "wf-check", conf)
    assert code == 2 and rep is None
    assert "zero section" in capsys.readouterr().err


def test_wf_check_emits_exact_witnesses(tmp_path):
    slot = lambda t, k0: {"point": {"t": t, "x": 0}, "covector": {"k0": k0, "k1": 0}}  # noqa: E731
    conf = {
        "queries": [
            {"slots": [slot(0, {"num": 3, "den": 2}), slot(1, {"num": -3, "den": 2})], "expect": "member"},
            {"slots": [slot(0, -1), slot(1, 1)], "expect": "non-member"},
        ],
        "suite": {"n": 3, "samples": 10},
    }
    code, rep, _ = run_cli(tmp_path, "wf-check", conf)
    assert code == 0 and rep["verdict"] == "PASS"
    w = rep["results"]["queries"][0]["witness"]
    assert w["edges"][0]["a"] == {"num": 3, "den": 4}
    assert rep["results"]["queries"][1]["witness"] is None


def test_growth_tilde_is_a_classification_not_an_error(tmp_path):
    conf = {"state": TILDE, "n_max": 10, "csv": str(tmp_path / "g.csv")}
    code, rep, _ = run_cli(tmp_path, "growth", conf)
    assert code == 0 and rep["verdict"] == "NON-ANALYTIC"
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0].startswith("#") and lines[1] == "n,log_moment,log_n_factorial,fitted_d"
    assert len(lines) == 12


def test_growth_expectation_mismatch_fails(tmp_path):
    code, rep, _ = run_cli(tmp_path, "growth", {"state": TILDE, "n_max": 10, "expect": "analytic"})
    assert code == 1 and rep["verdict"] == "FAIL"


def test_js_example_csv(tmp_path):
    conf = {"packets": {"random": 8, "seed": 3}, "csv": str(tmp_path / "js.csv")}
    code, rep, _ = run_cli(tmp_path, "js-example", conf)
    assert code == 0
    assert rep["results"]["mixture_flagged_non_gff"] and rep["results"]["commutator_identity_holds"]
    rows = list(csv.reader(io.StringIO((tmp_path / "js.csv").read_text().split("\n", 1)[1])))
    assert rows[0][0] == "configuration" and len(rows) == 3
    assert all(float(r[1]) > 0 for r in rows[1:])


def test_compare_not_applicable_exits_zero(tmp_path):
    b = {"kind": "quasi-free", "model": {"kind": "sum", "terms": [
        {"weight": 1.0, "model": {"kind": "vacuum"}}, {"weight": 0.5, "model": {"kind": "w-kernel"}}]}}
    conf = {"state_a": VACUUM, "state_b": b, "n": 2, "packets": {"random": 2, "seed": 0}}
    code, rep, _ = run_cli(tmp_path, "compare", conf)
    assert code == 0 and rep["verdict"] == "NOT-APPLICABLE"


def test_schema_errors_are_all_listed(tmp_path, capsys):
    conf = {"tolerance": 5, "bogus": True, "state": {"kind": "nope"}}
    code, rep, _ = run_cli(tmp_path, "kg", conf)
    err = capsys.readouterr().err
    assert code == 2 and rep is None
    for needle in ("bogus", "tolerance", "state/kind", "packets: required"):
        assert needle in err


def test_scenario_mismatch_is_rejected():
    with pytest.raises(config.ConfigError):
        config.validate({"scenario": "kg", "n": 3}, "partitions")


def test_overrides(tmp_path):
    conf = {"state": VACUUM, "packets": {"random": 2}, "n_max": 3}
    _, rep, _ = run_cli(tmp_path, "gff-check", conf, "--seed", "42", "--tolerance", "1e-3")
    assert rep["seed"] == 42 and rep["tolerance"] == 1e-3
    assert cli.main(["gff-check", "--config", write(tmp_path, "c.json", conf), "--seed", "-1"]) == 2


def test_missing_config_file(tmp_path):
    assert cli.main(["kg", "--config", str(tmp_path / "nope.json")]) == 2


def test_toml_and_config_dir(tmp_path, monkeypatch):
    (tmp_path / "p.toml").write_text('scenario = "partitions"\nn = 5\nlist_partitions = false\n')
    monkeypatch.setenv(config.CONFIG_DIR_ENV, str(tmp_path))
    monkeypatch.chdir(tmp_path.parent)
    conf = config.load("p.toml")
    assert conf == {"scenario": "partitions", "n": 5, "list_partitions": False}
    report, code = cli.run(conf)
    assert code == 0 and report["results"]["count"] == 52 and "partitions" not in report["results"]


def test_empty_report_gives_header_only_csv():
    text = cli.emit_plot_data({})
    lines = text.splitlines()
    assert lines[0].startswith("#") and lines[1:] == ["index,value"]
    text = cli.emit_plot_data({"scenario": "growth", "results": {}})
    assert text.splitlines()[1:] == ["n,log_moment,log_n_factorial,fitted_d"]


def test_console_script_entry_point(tmp_path):
    path = write(tmp_path, "c.json", {"n": 2})
    proc = subprocess.run([sys.executable, "-m", "gffkit.cli", "partitions", "--config", path],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["count"] == 2
