import json
from pathlib import Path

import pytest

from pecbench.cli import main
from pecbench.report import parse_grid_csv, parse_grid_json

ROOT = Path(__file__).resolve().parent.parent
REFERENCE_CFG = str(ROOT / "configs" / "reference_instance.cfg")
SIM_CFG = str(ROOT / "configs" / "small_sim.cfg")


def _small_sweep_cfg(tmp_path, name="sweep.cfg"):
    path = tmp_path / name
    path.write_text(
        "[model]\nrows = 8\ncols = 8\nboundary = periodic\n"
        "t = 1.0\nU = 8.0\nmu = 3.75\n"
        "[bounds]\ne_minus_per_site = -4.544\ne_plus_per_site = -3.8365\n"
        "[circuit]\nlayers = 64\nqubits = 128\n"
        "[noise]\np_layer = 4e-3\n"
        "[run]\nshots = 1000\nseed = 5\n"
        "[sweep]\np_min = 1e-4\np_max = 1e-2\np_points = 6\n"
        "shots_min = 10\nshots_max = 1e5\nshots_points = 6\n")
    return str(path)


def _fast_sim_cfg(tmp_path):
    path = tmp_path / "sim.cfg"
    path.write_text(
        "[model]\nrows = 1\ncols = 2\nboundary = open\nt = 1.0\nU = 4.0\nmu = 1.0\n"
        "[bounds]\ne_minus = -3.0\ne_plus = -2.6\n"
        "[circuit]\nlayers = 4\nqubits = 4\n"
        "[noise]\np_layer = 0.05\n"
        "[run]\nseed = 7\n"
        "[simulate]\nshots = 20000\nbatch = 200\n")
    return str(path)


def test_norm_reports_reference_values(tmp_path, capsys):
    assert main(["norm", "--config", REFERENCE_CFG]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["norm2_squared"] == 386.0
    assert report["trace_over_d"] == -112.0
    assert report["term_count"] > 0


def test_norm_zero_couplings(tmp_path, capsys):
    path = tmp_path / "zero.cfg"
    path.write_text(
        "[model]\nrows = 1\ncols = 2\nboundary = open\nt = 0\nU = 0\nmu = 0\n"
        "[bounds]\ne_minus = -1\ne_plus = 1\n[noise]\np_layer = 0\n")
    assert main(["norm", "--config", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["norm2_squared"] == 0.0
    assert report["trace_over_d"] == 0.0


def test_success_labels_reference_point(capsys):
    assert main(["success", "--config", REFERENCE_CFG]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["label"] == "PEC"
    assert report["pec_success"] > 0.95 > report["raw_success"]


def test_success_none_at_low_shots(tmp_path, capsys):
    path = tmp_path / "low.cfg"
    path.write_text(Path(REFERENCE_CFG).read_text().replace(
        "shots = 1000", "shots = 10"))
    assert main(["success", "--config", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["label"] == "NONE"


def test_phase_diagram_csv_shape(tmp_path, monkeypatch):
    monkeypatch.setenv("PECBENCH_WORKERS", "2")
    cfg = _small_sweep_cfg(tmp_path)
    out = tmp_path / "grid.csv"
    assert main(["phase-diagram", "--config", cfg, "--output", str(out)]) == 0
    artifact = parse_grid_csv(out.read_text())
    assert artifact.kind == "phase-diagram"
    assert len(artifact.row_values) == 6 and len(artifact.col_values) == 6
    labels = {cell for row in artifact.columns["label"] for cell in row}
    assert labels <= {"PEC", "RAW", "NONE"}


def test_single_cell_grid_matches_success(tmp_path, capsys):
    path = tmp_path / "cell.cfg"
    path.write_text(
        "[model]\nrows = 8\ncols = 8\nboundary = periodic\n"
        "t = 1.0\nU = 8.0\nmu = 3.75\n"
        "[bounds]\ne_minus_per_site = -4.544\ne_plus_per_site = -3.8365\n"
        "[noise]\np_layer = 4e-3\n"
        "[run]\nshots = 1000\nseed = 5\n"
        "[sweep]\np_min = 4e-3\np_max = 4e-3\np_points = 1\n"
        "shots_min = 1000\nshots_max = 1000\nshots_points = 1\n")
    out = tmp_path / "cell.csv"
    assert main(["phase-diagram", "--config", str(path), "--output", str(out)]) == 0
    artifact = parse_grid_csv(out.read_text())
    assert len(artifact.row_values) == 1 and len(artifact.col_values) == 1
    assert main(["success", "--config", str(path)]) == 0
    point = json.loads(capsys.readouterr().out)
    assert artifact.columns["pec_success"][0][0] == pytest.approx(
        point["pec_success"], rel=1e-9)
    assert artifact.columns["raw_success"][0][0] == pytest.approx(
        point["raw_success"], rel=1e-9)
    assert artifact.columns["label"][0][0] == point["label"]


def test_phase_diagram_json_and_svg(tmp_path):
    cfg = _small_sweep_cfg(tmp_path)
    out_json = tmp_path / "grid.json"
    assert main(["phase-diagram", "--config", cfg, "--format", "json",
                 "--output", str(out_json)]) == 0
    artifact = parse_grid_json(out_json.read_text())
    assert set(artifact.columns) == {"pec_success", "raw_success", "label"}
    assert artifact.provenance["seed"] == 5

    out_svg = tmp_path / "grid.svg"
    assert main(["phase-diagram", "--config", cfg, "--format", "svg",
                 "--output", str(out_svg)]) == 0
    svg = out_svg.read_text()
    assert svg.startswith("<svg") and artifact.provenance["config_hash"] in svg


def test_phase_diagram_reruns_byte_identical(tmp_path):
    cfg = _small_sweep_cfg(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["phase-diagram", "--config", cfg, "--output", str(a)]) == 0
    assert main(["phase-diagram", "--config", cfg, "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_centering_reports_region_max(tmp_path):
    path = tmp_path / "cent.cfg"
    path.write_text(Path(REFERENCE_CFG).read_text()
                    + "\n[centering]\nshift_points = 40\nwidth_points = 40\n")
    out = tmp_path / "cent.csv"
    assert main(["centering", "--config", str(path), "--output", str(out)]) == 0
    artifact = parse_grid_csv(out.read_text())
    assert artifact.kind == "centering"
    assert float(artifact.provenance["region_max"]) > 0.1
    shifts = artifact.row_values
    zero_row = artifact.columns["relative_error"][shifts.index(0)]
    assert all(v == 0.0 for v in zero_row)


def test_simulate_report_passes_checks(tmp_path, capsys):
    cfg = _fast_sim_cfg(tmp_path)
    assert main(["simulate", "--config", cfg]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all(report["checks"].values())
    assert report["provenance"]["seed"] == 7
    assert report["shots"] == 20000


def test_simulate_seed_override(tmp_path, capsys):
    cfg = _fast_sim_cfg(tmp_path)
    assert main(["simulate", "--config", cfg, "--seed", "99"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["seed"] == 99 and report["provenance"]["seed"] == 99


def test_exit_codes(tmp_path, capsys):
    missing = str(tmp_path / "nope.cfg")
    assert main(["norm", "--config", missing]) == 2

    malformed = tmp_path / "bad.cfg"
    malformed.write_text("[model]\nrows = eight\n")
    assert main(["norm", "--config", str(malformed)]) == 2
    assert "rows" in capsys.readouterr().err

    # simulating the 128-qubit instance exceeds simulator capacity
    assert main(["simulate", "--config", REFERENCE_CFG]) == 3

    # the inverse channel does not exist at P = 1 (numeric-domain error)
    diverging = tmp_path / "p1.cfg"
    diverging.write_text(Path(REFERENCE_CFG).read_text().replace(
        "p_layer = 4e-3", "p_layer = 1.0"))
    assert main(["success", "--config", str(diverging)]) in (2, 4)
