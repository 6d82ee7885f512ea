import json
import subprocess
import sys

import jsonschema
import pytest

from mielab import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(cli.load_schema())


def test_thresholds_defaults(capsys):
    code, out, _ = run(["thresholds"], capsys)
    doc = json.loads(out)
    assert code == 0
    s = doc["summary"]
    assert (s["S_crit_bits"], s["chi_crit"], s["brickwork_crude_q"], s["advantage_m"]) == (2.8, 7, 419479, 6)
    assert doc["header"]["version"] and doc["header"]["units"]["S_crit_bits"] == "bits"


def test_zsaw_on_single_site(tmp_path, capsys):
    cfg = tmp_path / "one.json"
    cfg.write_text(json.dumps({"lattice": {"kind": "triangular", "Lx": 1, "Ly": 1}}))
    code, out, _ = run(["zsaw", "--config", str(cfg)], capsys)
    s = json.loads(out)["summary"]
    assert code == 0 and s["Z"] == 0.0 and s["F_nats"] is None and s["n_walks"] == 0


def test_bound_reports_certificate(capsys):
    code, out, _ = run(["bound"], capsys)
    s = json.loads(out)["summary"]
    assert s["certified"] and s["bound"]["valid"]


def test_schema_violation_reports_lines(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "seed": 1,\n  "lattice": {\n    "Lx": 0\n  },\n  "bogus": true\n}\n')
    code, out, err = run(["zsaw", "--config", str(cfg)], capsys)
    assert code == 2 and out == ""
    assert f"{cfg}:4: lattice/Lx" in err
    assert f"{cfg}:6: <root>" in err and "bogus" in err


def test_invalid_json_reports_line(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text('{\n  "seed": 1,\n  "lattice": {"Lx": }\n}\n')
    code, _, err = run(["thresholds", "--config", str(cfg)], capsys)
    assert code == 2 and f"{cfg}:3:" in err


def test_bad_threads(capsys):
    code, _, err = run(["thresholds", "--threads", "0"], capsys)
    assert code == 2 and "threads" in err


def test_csv_header_carries_units(capsys):
    code, out, _ = run(["saw-enum", "--format", "csv"], capsys)
    lines = out.splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert code == 0 and header == lines[: len(header)]
    assert any(l.startswith("# units:") for l in header)
    assert lines[len(header)] == "n,walks,root,polygons"
    assert lines[len(header) + 10].startswith("9,16268,")


def test_out_dir_and_figures(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    code, _, err = run(["saw-enum", "--out", str(tmp_path), "--figures"], capsys)
    assert code == 0
    assert (tmp_path / "saw-enum.json").exists() and (tmp_path / "saw-enum.png").exists()


def test_mie_sim_identical_across_processes(tmp_path):
    cfg = tmp_path / "small.json"
    cfg.write_text(json.dumps({"samples": {"n_circuits": 3, "n_outcomes": 2}}))
    outs = []
    for threads in ("1", "4"):
        proc = subprocess.run([sys.executable, "-m", "mielab", "mie-sim", "--config", str(cfg), "--seed", "5",
                               "--format", "csv", "--threads", threads], capture_output=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1] and outs[0].startswith(b"# tool:")


def test_seed_changes_output(capsys):
    a = run(["mie-sim", "--seed", "1"], capsys)[1]
    b = run(["mie-sim", "--seed", "2"], capsys)[1]
    assert a != b


def test_every_subcommand_deterministic():
    rows = cli.determinism_check()
    assert {r["subcommand"] for r in rows} == set(cli.SUBCOMMANDS)
    assert all(r["identical"] for r in rows)
