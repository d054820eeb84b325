import json
import re
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from polyfold import io
from polyfold.cli import main
from polyfold.config import Tolerances
from polyfold.errors import InputError

SRC = "facet=bot;point=[0.5,0.5]"
DATA = Path(__file__).parent / "data"
CUBE = str(DATA / "cube.json")


def run_cli(*args):
    p = subprocess.run([sys.executable, "-m", "polyfold", *args], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def test_float_roundtrip_exact():
    rng = np.random.default_rng(0)
    x = rng.normal(size=200) * 10.0 ** rng.integers(-12, 12, size=200)
    back = json.loads(io.dumps({"x": x}))["x"]
    assert np.array_equal(np.array(back), x)


def test_hpoly_roundtrip(cube, data_dir):
    cx = io.load_complex(data_dir / "cube.json")
    assert cx.n_facets == 6
    assert [f.name for f in cx.facets] == [f.name for f in cube.facets]


def test_abstract_complex_file(data_dir):
    cx = io.load_complex(data_dir / "cube_abstract.json")
    assert cx.surface_volume() == pytest.approx(6.0)
    assert not cx.embedded


def test_foldout_roundtrip(tmp_path, cube_run):
    path = tmp_path / "fo.json"
    io.write_json(path, io.foldout_document(cube_run))
    doc = io.read_foldout(path)
    for cell, c in zip(doc["cells"], cube_run.foldout.cells):
        assert np.array_equal(cell["vertices"], c.vertices)
    assert len(doc["events"]) == len(cube_run.events)


def test_svg_matches_json(tmp_path):
    out, svg = tmp_path / "fo.json", tmp_path / "fo.svg"
    assert main(["unfold", "--input", CUBE, "--source", SRC, "--out", str(out), "--svg", str(svg)]) == 0
    doc = io.read_foldout(out)
    polys = re.findall(r'<polygon points="([^"]+)"', svg.read_text())
    assert len(polys) == len(doc["cells"])
    for pts, cell in zip(polys, doc["cells"]):
        P = np.array([[float(t) for t in p.split(",")] for p in pts.split()])
        key = lambda A: sorted(map(tuple, A))
        assert key(P) == key(cell["vertices"])


def test_unfold_side_outputs(tmp_path):
    paths = {k: tmp_path / f"{k}.json" for k in ("out", "cut", "vistal")}
    rc = main(["unfold", "--input", CUBE, "--source", SRC, "--out", str(paths["out"]),
               "--cut-locus", str(paths["cut"]), "--vistal", str(paths["vistal"])])
    assert rc == 0
    fo = io.read_json(paths["out"])
    vt = io.read_json(paths["vistal"])
    assert len(vt["nodes"]) == len(fo["events"]) + 1
    assert vt["root"] == "source"
    cl = io.read_json(paths["cut"])
    assert cl["schema"] == "cutlocus/1"
    assert len(cl["ambient_pieces"]) > 0


def test_off_export(tmp_path):
    out, off = tmp_path / "fo.json", tmp_path / "fo.off"
    assert main(["unfold", "--input", str(DATA / "hypercube4.json"), "--source", "facet=0;point=[0.5,0.5,0.5]",
                 "--out", str(out), "--off", str(off)]) == 0
    lines = off.read_text().splitlines()
    assert lines[0] == "OFF"
    nv, nf, _ = map(int, lines[1].split())
    assert nv > 0 and nf > 0 and len(lines) == 2 + nv + nf


def test_off_rejects_surface(cube_run):
    with pytest.raises(InputError):
        io.foldout_off(cube_run)


def test_distance_cli(capsys):
    assert main(["distance", "--input", CUBE, "--source", SRC,
                 "--target", "facet=top;point=[0.5,0.5]", "--paths"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["distance"] == 2.0
    assert len(doc["paths"]) == 4
    for p in doc["paths"]:
        assert len(p["breakpoints"]) == 2


def test_voronoi_cli(tmp_path, capsys):
    out = tmp_path / "gvd.json"
    assert main(["voronoi", "--input", CUBE, "--sources", SRC, "facet=top;point=[0.5,0.5]",
                 "--out", str(out)]) == 0
    doc = io.read_json(out)
    vols = {}
    for c in doc["cells"]:
        V = np.array(c["vertices"])
        c0 = V.mean(axis=0)
        ang = np.arctan2(*(V - c0).T[::-1])
        V = V[np.argsort(ang)]
        area = 0.5 * abs(np.dot(V[:, 0], np.roll(V[:, 1], -1)) - np.dot(V[:, 1], np.roll(V[:, 0], -1)))
        vols[c["source_index"]] = vols.get(c["source_index"], 0.0) + area
    assert sorted(vols.values()) == pytest.approx([3.0, 3.0])
    assert doc["region_volumes"] == pytest.approx([3.0, 3.0])


def test_verify_cli_passes(capsys):
    assert main(["verify", "--input", CUBE, "--source", SRC, "--samples", "30"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert re.search(r"(\d+)/\1 checks passed", out)


def test_verify_cli_catches_corrupt_foldout(tmp_path, cube_run, capsys):
    doc = io.foldout_document(cube_run)
    doc["cells"][0]["vertices"] = (np.asarray(doc["cells"][0]["vertices"]) * 1.2).tolist()
    path = tmp_path / "bad.json"
    io.write_json(path, doc)
    rc = main(["verify", "--input", CUBE, "--source", SRC, "--samples", "20", "--foldout", str(path)])
    assert rc == 1
    assert "FAIL" in capsys.readouterr().out


def test_malformed_json_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc, _, err = run_cli("unfold", "--input", str(bad), "--source", SRC, "--out", str(tmp_path / "o.json"))
    assert rc == 2
    assert "malformed JSON" in err


def test_bad_source_exit_code(tmp_path):
    rc, _, _ = run_cli("unfold", "--input", CUBE, "--source", "facet=bot;point=[0,0]",
                       "--out", str(tmp_path / "o.json"))
    assert rc == 2
    rc, _, _ = run_cli("unfold", "--input", CUBE, "--source", "facet=nope;point=[0.5,0.5]",
                       "--out", str(tmp_path / "o.json"))
    assert rc == 2


def test_iteration_cap_exit_code(tmp_path):
    rc, _, _ = run_cli("unfold", "--input", CUBE, "--source", SRC, "--max-events", "2",
                       "--out", str(tmp_path / "o.json"))
    assert rc == 3


def test_tol_flag(tmp_path):
    rc, _, _ = run_cli("unfold", "--input", CUBE, "--source", SRC, "--tol", "bogus=1",
                       "--out", str(tmp_path / "o.json"))
    assert rc == 2
    rc, _, _ = run_cli("unfold", "--input", CUBE, "--source", SRC, "--tol", "pt=1e-8",
                       "--tol", "eps_rad=1e-8", "--out", str(tmp_path / "o.json"))
    assert rc == 0


def test_tolerances_env_and_mapping():
    t = Tolerances.from_env({"POLYFOLD_TOL_PT": "1e-7", "OTHER": "x"})
    assert t.pt == 1e-7 and t.rad == 1e-9
    assert Tolerances.from_mapping({"eps_kkt": 1e-6}).kkt == 1e-6
    with pytest.raises(ValueError):
        Tolerances(pt=0.0)


def test_parse_point_spec():
    assert io.parse_point_spec("facet=top;point=[0.5, 0.25]") == ("top", [0.5, 0.25])
    with pytest.raises(InputError):
        io.parse_point_spec("top 0.5 0.5")
