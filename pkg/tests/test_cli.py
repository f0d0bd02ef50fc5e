"""Command-line interface: pipelines, exit codes, output routing."""

import json
import os

import numpy as np
import pytest

from fractalwalk import cli
from fractalwalk.render import read_pgm
from fractalwalk.serialize import read_lattice, read_series


@pytest.fixture(autouse=True)
def isolated_output_dir(monkeypatch):
    monkeypatch.delenv("OUTPUT_DIR", raising=False)


def run(argv):
    return cli.main(argv)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One full dsc-1 pipeline executed through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "lattice": str(root / "lat.json"),
        "series": str(root / "series.json"),
        "binary": str(root / "series.bin"),
        "matrix": str(root / "h.txt"),
        "csv": str(root / "obs.csv"),
        "report": str(root / "report.json"),
        "calibrated": str(root / "calibrated.json"),
        "frames": str(root / "frames"),
    }
    assert cli.main(["lattice", "--kind", "dsc", "--generation", "1",
                     "--out", paths["lattice"]]) == 0
    assert cli.main(["evolve", "--lattice", paths["lattice"],
                     "--tau-max", "12", "--steps", "121",
                     "--out", paths["series"],
                     "--binary-out", paths["binary"],
                     "--dump-hamiltonian", paths["matrix"]]) == 0
    assert cli.main(["observables", "--series", paths["series"],
                     "--lattice", paths["lattice"], "--out", paths["csv"]]) == 0
    assert cli.main(["analyze", "--series", paths["series"],
                     "--lattice", paths["lattice"], "--out", paths["report"]]) == 0
    return paths


def test_lattice_artifact(workspace):
    lat = read_lattice(workspace["lattice"])
    assert lat.n_sites == 8 and lat.n_edges == 8


def test_evolve_artifacts(workspace):
    series = read_series(workspace["series"])
    assert series.times.size == 121
    assert series.n_sites == 8
    assert os.path.getsize(workspace["binary"]) == 16 + 8 * 121 * 8
    lines = open(workspace["matrix"]).read().splitlines()
    assert len(lines) == 16  # both triangles of the 8 couplings


def test_observables_artifact(workspace):
    lines = open(workspace["csv"]).read().splitlines()
    assert lines[0] == "tau,variance,return_prob,polya"
    assert len(lines) == 122


def test_report_artifact(workspace):
    doc = json.load(open(workspace["report"]))
    assert doc["kind"] == "dsc"
    assert doc["farthest_tau"] is not None


def test_calibrate_command(workspace):
    code = run(["calibrate", "--report", workspace["report"],
                "--anchor-event", "farthest", "--anchor-mm", "9.5",
                "--out", workspace["calibrated"]])
    assert code == 0
    doc = json.load(open(workspace["calibrated"]))
    cal = doc["calibration"]
    assert cal["events_mm"]["farthest"] == pytest.approx(9.5)
    assert cal["scale_mm_per_tau"] == pytest.approx(9.5 / doc["farthest_tau"])


def test_render_command(workspace):
    code = run(["render", "--series", workspace["series"],
                "--lattice", workspace["lattice"],
                "--run", "demo", "--time-index", "0", "--time-index", "5",
                "--out-dir", workspace["frames"],
                "--pixels-per-spacing", "6"])
    assert code == 0
    for index in (0, 5):
        data = open(os.path.join(workspace["frames"], f"demo_t{index}.pgm"), "rb").read()
        image = read_pgm(data)
        assert image.dtype == np.uint16 and image.max() == 65535


# --- exit codes -----------------------------------------------------------

def test_usage_error_is_exit_2():
    with pytest.raises(SystemExit) as info:
        run(["lattice", "--kind", "sg"])  # missing --generation and --out
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run([])
    assert info.value.code == 2


def test_missing_input_file_is_exit_3(tmp_path):
    code = run(["evolve", "--lattice", str(tmp_path / "absent.json"),
                "--out", str(tmp_path / "out.json")])
    assert code == 3


def test_dimension_mismatch_is_exit_4(workspace, tmp_path):
    other = str(tmp_path / "sg2.json")
    assert run(["lattice", "--kind", "sg", "--generation", "2", "--out", other]) == 0
    code = run(["observables", "--series", workspace["series"],
                "--lattice", other, "--out", str(tmp_path / "x.csv")])
    assert code == 4


def test_domain_error_is_exit_5(workspace, tmp_path):
    code = run(["analyze", "--series", workspace["series"],
                "--lattice", workspace["lattice"],
                "--epsilon", "1.5", "--out", str(tmp_path / "r.json")])
    assert code == 5
    code = run(["lattice", "--kind", "sg", "--generation", "0",
                "--out", str(tmp_path / "lat.json")])
    assert code == 5


def test_missing_structure_is_exit_6(tmp_path):
    lat = str(tmp_path / "tri.json")
    series = str(tmp_path / "tri-series.json")
    assert run(["lattice", "--kind", "triangle", "--generation", "4",
                "--out", lat]) == 0
    assert run(["evolve", "--lattice", lat, "--tau-max", "2", "--steps", "21",
                "--out", series]) == 0
    code = run(["analyze", "--series", series, "--lattice", lat,
                "--out", str(tmp_path / "r.json")])
    assert code == 6


def test_absent_anchor_is_exit_8(tmp_path):
    report = tmp_path / "report.json"
    report.write_text('{"farthest_tau":2.0}')
    code = run(["calibrate", "--report", str(report),
                "--anchor-event", "first_void", "--anchor-mm", "5.0",
                "--out", str(tmp_path / "c.json")])
    assert code == 8


def test_sweep_rejects_nonfractal_and_garbage(tmp_path):
    out = str(tmp_path / "runs")
    assert run(["sweep", "--instances", "square:3", "--out-dir", out]) == 5
    assert run(["sweep", "--instances", "sg-4", "--out-dir", out]) == 5
    assert run(["sweep", "--instances", " , ", "--out-dir", out]) == 5


# --- output routing and determinism ---------------------------------------

def test_output_dir_prefixes_relative_paths(tmp_path, monkeypatch):
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "routed"))
    assert run(["lattice", "--kind", "dsc", "--generation", "1",
                "--out", "lat.json"]) == 0
    assert (tmp_path / "routed" / "lat.json").is_file()


def test_output_dir_leaves_absolute_paths_alone(tmp_path, monkeypatch):
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "routed"))
    target = tmp_path / "direct.json"
    assert run(["lattice", "--kind", "dsc", "--generation", "1",
                "--out", str(target)]) == 0
    assert target.is_file()
    assert not (tmp_path / "routed").exists()


def test_sweep_is_deterministic(tmp_path):
    dirs = [str(tmp_path / "a"), str(tmp_path / "b")]
    for out_dir in dirs:
        assert run(["sweep", "--instances", "sg:3,dsc:1",
                    "--tau-max", "6", "--steps", "61",
                    "--out-dir", out_dir]) == 0
    names = sorted(os.listdir(dirs[0]))
    assert names == sorted(os.listdir(dirs[1]))
    assert "manifest.json" in names
    for name in names:
        a = open(os.path.join(dirs[0], name), "rb").read()
        b = open(os.path.join(dirs[1], name), "rb").read()
        assert a == b, f"{name} differs between identical runs"
