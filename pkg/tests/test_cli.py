import json

import numpy as np

import subcell.cli as cli
from subcell import Polygon, rasterize
from subcell.config import ExperimentConfig, load_shape
from subcell.errors import SchemeInstabilityError
from subcell.grid import read_grid, write_grid


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_rasterize_writes_grid_and_round_trips(tmp_path):
    out = tmp_path / "g.txt"
    assert run("rasterize", "--shape", "circle", "--l", 30, "--out", out) == 0
    with open(out) as fh:
        g = read_grid(fh)
    assert g.l == 30
    assert np.array_equal(g.averages, rasterize(load_shape("circle"), 30).averages)


def test_rasterize_from_shape_file(tmp_path):
    shp = tmp_path / "s.json"
    shp.write_text(json.dumps({"circle": {"center": [0.3, 0.4], "r": 0.1}}))
    out = tmp_path / "g.txt"
    assert run("rasterize", "--shape", shp, "--l", 10, "--out", out) == 0


def test_bad_shape_json_is_usage_error(tmp_path, capsys):
    shp = tmp_path / "bad.json"
    shp.write_text('{"circle": {"center": [0.5, 0.5],\n "r": }}')
    assert run("rasterize", "--shape", shp, "--l", 10) == 2
    assert "line 2" in capsys.readouterr().err


def test_usage_errors():
    assert run("rasterize", "--l", "ten") == 2
    assert run("frobnicate") == 2
    assert run("rasterize", "--shape", "circle", "--l", 0) == 2


def _half_plane_grid(path, l=20):
    # horizontal band: both interfaces are straight lines
    band = Polygon([(0.0, 0.213), (1.0, 0.213), (1.0, 0.613), (0.0, 0.613)])
    with open(path, "w") as fh:
        write_grid(rasterize(band, l), fh)


def test_reconstruct_outputs_and_determinism(tmp_path):
    grid = tmp_path / "g.txt"
    _half_plane_grid(grid)
    assert run("reconstruct", "--grid", grid, "--method", "elvira", "--out", tmp_path / "a", "--workers", 1) == 0
    assert run("reconstruct", "--grid", grid, "--method", "elvira", "--out", tmp_path / "b", "--workers", 1) == 0
    a = (tmp_path / "a.json").read_bytes()
    assert a == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    doc = json.loads(a)
    assert doc["method"] == "elvira" and len(doc["cells"]) == 40
    # one interface line per cell, 64 samples each
    svg = (tmp_path / "a.svg").read_text()
    assert svg.count('stroke="black"') == 40
    assert 'viewBox="0 0 1 1"' in svg


def test_reconstruct_unknown_method(tmp_path):
    grid = tmp_path / "g.txt"
    _half_plane_grid(grid)
    assert run("reconstruct", "--grid", grid, "--method", "magic") == 2


def test_reconstruct_bad_grid_file(tmp_path, capsys):
    grid = tmp_path / "g.txt"
    grid.write_text('{"l": 2, "format": "f64-row-major"}\n0,1\n0,x\n')
    assert run("reconstruct", "--grid", grid, "--method", "elvira") == 2
    assert "line 3" in capsys.readouterr().err


def test_converge_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert run("converge", "--shape", "circle", "--method", "piecewise-constant,elvira",
               "--resolutions", "10,20,30,40", "--out", out, "--seed", 7) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ") and json.loads(lines[0][2:])["seed"] == 7
    assert lines[1] == "resolution,method,error,slope"
    assert len(lines) == 2 + 8


def test_evolve_outputs(tmp_path):
    out = tmp_path / "ev"
    assert run("evolve", "--shape", "corner", "--method", "elvira-w-oriented", "--l", 12,
               "--steps", 6, "--snapshots", 3, "--out", out) == 0
    rows = (out / "errors.csv").read_text().splitlines()
    assert rows[1] == "step,error,mass" and len(rows) == 2 + 7
    assert sorted(p.name for p in out.glob("*.svg")) == ["step-00000.svg", "step-00003.svg", "step-00006.svg"]
    assert 'stroke="red"' in (out / "step-00006.svg").read_text()


def test_evolve_needs_single_method(tmp_path):
    assert run("evolve", "--shape", "circle", "--method", "elvira,quadratic-aero", "--l", 10, "--steps", 1,
               "--out", tmp_path / "x") == 2


def test_bench_csv(tmp_path):
    out = tmp_path / "b.csv"
    assert run("bench", "--shape", "circle", "--method", "quadratic-aero", "--l", 20, "--reps", 1, "--out", out) == 0
    rows = out.read_text().splitlines()
    assert rows[1] == "method,l,reps,median_seconds" and rows[2].startswith("quadratic-aero,20,1,")


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"shape": "flower", "l": 16}))
    out = tmp_path / "g.txt"
    assert run("rasterize", "--config", cfg, "--out", out) == 0
    with open(out) as fh:
        assert read_grid(fh).l == 16
    assert run("rasterize", "--config", cfg, "--l", 8, "--out", out) == 0
    with open(out) as fh:
        assert read_grid(fh).l == 8
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run("rasterize", "--config", cfg) == 2


def test_numeric_failure_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise SchemeInstabilityError("overshoot", cells=[(0, 0)], worst=0.1)

    monkeypatch.setattr(cli, "evolve", boom)
    assert run("evolve", "--shape", "circle", "--method", "elvira", "--l", 10, "--steps", 1, "--out", tmp_path / "e") == 3


def test_experiment_config_header_is_stable():
    a = ExperimentConfig().override(l=12, seed=3)
    assert a.header() == ExperimentConfig(l=12, seed=3).header()
