import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qse_xxz import cli, scan
from qse_xxz.mesh import ellipsoid_mesh, export_mesh, to_obj, uv_sphere
from qse_xxz.scan import CSV_COLUMNS, ORACLE_COLUMNS, ScanConfig, ScanRecord, compute_record, delta_grid, read_csv
from qse_xxz.svgplot import render_plots, semiaxes_svg
from qse_xxz.xxz_model import QuadratureError

SMALL = ["--delta-min", "-1.2", "--delta-max", "1.3", "--step", "0.1"]


def run(argv):
    return cli.main([str(a) for a in argv])


def parse_obj(path):
    verts, faces, lines, points, comments = [], [], [], [], []
    for line in open(path):
        tag, *rest = line.split()
        if tag == "v":
            verts.append([float(x) for x in rest])
        elif tag == "f":
            faces.append([int(x) for x in rest])
        elif tag == "l":
            lines.append([int(x) for x in rest])
        elif tag == "p":
            points.append(int(rest[0]))
        elif tag == "#":
            comments.append(line)
    return np.array(verts), faces, lines, points, comments


# -- config and grid -------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [dict(delta_min=1.0, delta_max=0.0), dict(step=0.0), dict(step=-0.1),
     dict(outputs=frozenset({"mesh"})), dict(outputs=frozenset({"pdf"})), dict(delta_min=float("nan"))],
)
def test_scan_config_invariants(kwargs):
    with pytest.raises(ValueError):
        ScanConfig(**kwargs)


def test_grid_hits_critical_points_exactly():
    g = delta_grid(-1.5, 3.0, 0.01)
    assert len(g) == 451 and g[0] == -1.5 and g[-1] == 3.0
    assert 1.0 in g.tolist() and -1.0 in g.tolist()


# -- records -----------------------------------------------------------------------


def test_record_fields_match_schema():
    names = [f for f in ScanRecord.__dataclass_fields__ if f != "failed"]
    assert tuple(names) == CSV_COLUMNS + ORACLE_COLUMNS


def test_ferro_record_is_needle():
    r = compute_record(-2.0)
    assert r.shape == "needle" and r.volume == 0.0
    assert (r.s_x, r.s_y, r.s_z) == (0.0, 0.0, 1.0)
    assert r.bond_strength_diff == 0.25


def test_record_for_positive_delta_has_no_bond_strength():
    r = compute_record(0.5)
    assert r.bond_strength_diff is None
    values = [v for k, v in r.as_row().items() if k not in ("shape", "critical_point_note", "bond_strength_diff")]
    assert all(isinstance(v, float) and math.isfinite(v) for v in values)


def test_critical_points_are_flagged():
    assert "isotropic" in compute_record(1.0).critical_point_note
    assert "ferromagnetic" in compute_record(-1.0).critical_point_note
    assert "one-sided" in compute_record(0.9995).critical_point_note
    assert compute_record(0.5).critical_point_note == ""


def test_failed_record(monkeypatch):
    def boom(d):
        raise QuadratureError("no convergence")

    monkeypatch.setattr(scan, "ground_energy_report", boom)
    r = compute_record(0.3)
    assert r.failed and r.critical_point_note.startswith("failed:") and r.e_g is None


def test_oracle_columns():
    r = compute_record(0.5, oracle_n=8)
    assert abs(r.ed_zz - r.zz) < 5e-2 and abs(r.ed_xx - r.xx) < 5e-2
    assert abs(r.ed_e_g - r.e_g) < 2e-2  # N=8 finite-size shift is ~1.1e-2


def test_parallel_scan_matches_serial():
    cfg = dict(delta_min=-0.5, delta_max=1.5, step=0.25)
    serial = scan.run_scan(ScanConfig(**cfg))
    parallel = scan.run_scan(ScanConfig(**cfg, workers=2))
    assert scan.records_to_csv(serial) == scan.records_to_csv(parallel)


# -- CLI: scan -----------------------------------------------------------------------


def test_scan_writes_schema_and_is_deterministic(tmp_path):
    outs = "csv,json,svg-semiaxes,svg-volume"
    for name in ("a", "b"):
        assert run(["scan", *SMALL, "--outputs", outs, "--out-dir", tmp_path / name]) == 0
    for f in ("scan.csv", "scan.jsonl", "semiaxes.svg", "volume.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    raw = (tmp_path / "a" / "scan.csv").read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(open(tmp_path / "a" / "scan.csv")))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert len(rows) == 26
    objs = [json.loads(line) for line in open(tmp_path / "a" / "scan.jsonl")]
    assert len(objs) == 26 and tuple(objs[0].keys()) == CSV_COLUMNS
    assert objs[5]["delta"] == float(rows[5]["delta"])


def test_csv_round_trip(tmp_path):
    assert run(["scan", *SMALL, "--outputs", "csv", "--out-dir", tmp_path]) == 0
    recs = read_csv(tmp_path / "scan.csv")
    assert (tmp_path / "scan.csv").read_text() == scan.records_to_csv(recs)


def test_scan_with_oracle_columns(tmp_path):
    argv = ["scan", "--delta-min", "0", "--delta-max", "1", "--step", "0.5", "--oracle-n", "6",
            "--outputs", "csv", "--out-dir", tmp_path]
    assert run(argv) == 0
    rows = list(csv.DictReader(open(tmp_path / "scan.csv")))
    assert tuple(rows[0].keys()) == CSV_COLUMNS + ORACLE_COLUMNS
    assert all(r["ed_zz"] for r in rows)


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"delta_min": 0.0, "delta_max": 2.0, "step": 0.5, "outputs": ["csv"]}))
    assert run(["scan", "--config", cfg, "--delta-max", "1.0", "--out-dir", tmp_path]) == 0
    rows = list(csv.DictReader(open(tmp_path / "scan.csv")))
    assert [float(r["delta"]) for r in rows] == [0.0, 0.5, 1.0]


@pytest.mark.parametrize(
    "argv",
    [
        ["scan", "--delta-min", "2", "--delta-max", "1"],
        ["scan", "--step", "0"],
        ["scan", "--outputs", "pdf"],
        ["scan", "--outputs", "mesh"],
        ["scan", "--oracle-n", "7"],
        ["scan", "--bogus"],
        ["frobnicate"],
        ["mesh"],
        [],
    ],
)
def test_usage_errors_exit_1(tmp_path, argv):
    assert run(argv + ["--out-dir", tmp_path] if argv and argv[0] in ("scan", "mesh") else argv) == 1


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run(["scan", "--config", cfg, "--out-dir", tmp_path]) == 1
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(["scan", "--config", cfg, "--out-dir", tmp_path]) == 1


def test_missing_config_is_io_error(tmp_path):
    assert run(["scan", "--config", tmp_path / "nope.json", "--out-dir", tmp_path]) == 3


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["scan", *SMALL, "--outputs", "csv", "--out-dir", blocker / "sub"]) == 3


def test_failed_record_gives_exit_2(tmp_path, monkeypatch):
    real = scan.ground_energy_report

    def flaky(d):
        if d == 0.3:
            raise QuadratureError("forced")
        return real(d)

    monkeypatch.setattr(scan, "ground_energy_report", flaky)
    assert run(["scan", *SMALL, "--outputs", "csv,svg-volume", "--out-dir", tmp_path]) == 2
    rows = list(csv.DictReader(open(tmp_path / "scan.csv")))
    bad = [r for r in rows if r["critical_point_note"].startswith("failed")]
    assert [float(r["delta"]) for r in bad] == [0.3]
    assert bad[0]["e_g"] == ""
    assert (tmp_path / "volume.svg").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qse_xxz", "scan", "--step", "0", "--out-dir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "step" in proc.stderr


# -- mesh ------------------------------------------------------------------------------------


def test_uv_sphere_topology():
    v, f = uv_sphere(64, 32)
    assert len(v) == 2 + 64 * 31 and len(f) == 2 * 64 * 31
    # closed surface: every edge shared by exactly two faces
    edges = {}
    for tri in f:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            edges[key] = edges.get(key, 0) + 1
    assert set(edges.values()) == {2}
    assert len(v) - len(edges) + len(f) == 2


@pytest.mark.parametrize("d", [-0.5, 0.5, 1.0, 3.0])
def test_mesh_vertices_on_ellipsoid(tmp_path, d):
    assert run(["mesh", "--deltas", str(d), "--out-dir", tmp_path]) == 0
    path = next(p for p in tmp_path.glob("ellipsoid_*.obj"))
    v, faces, *_ = parse_obj(path)
    from qse_xxz.xxz_model import semiaxes

    s = semiaxes(d)
    assert np.max(np.abs(np.sum((v / s) ** 2, axis=1) - 1.0)) < 1e-9
    assert len(faces) == 2 * 64 * 31


def test_isotropic_mesh_is_sphere(tmp_path):
    export_mesh([1.0], tmp_path)
    v, *_ = parse_obj(tmp_path / "ellipsoid_delta_+1.000000.obj")
    r = np.linalg.norm(v, axis=1)
    assert np.max(np.abs(r - (4 * math.log(2) - 1) / 3)) < 1e-6
    assert np.ptp(r) < 1e-9


def test_prolate_mesh_in_antiferro_phase(tmp_path):
    export_mesh([3.0], tmp_path)
    v, *_ = parse_obj(tmp_path / "ellipsoid_delta_+3.000000.obj")
    assert np.ptp(v[:, 2]) > np.ptp(v[:, 0])


def test_needle_mesh_is_segment(tmp_path):
    export_mesh([-2.0], tmp_path)
    v, faces, lines, points, comments = parse_obj(tmp_path / "ellipsoid_delta_-2.000000.obj")
    assert faces == [] and lines == [[1, 2]]
    np.testing.assert_array_equal(v, [[0, 0, -1], [0, 0, 1]])
    assert any("degenerate: needle along z" in c for c in comments)


def test_point_and_flat_meshes():
    m = ellipsoid_mesh((0, 0, 0))
    text = to_obj(m, "pt")
    assert "# degenerate: point" in text and "\np 1\n" in text
    flat = ellipsoid_mesh((0.5, 0.5, 0.0))
    assert "flat" in flat.annotation and np.all(flat.vertices[:, 2] == 0)
    with pytest.raises(ValueError):
        ellipsoid_mesh((1, float("nan"), 1))


def test_bloch_sphere_reference(tmp_path):
    export_mesh([0.0], tmp_path)
    v, *_ = parse_obj(tmp_path / "bloch_sphere.obj")
    assert np.max(np.abs(np.linalg.norm(v, axis=1) - 1)) < 1e-12


def test_mesh_via_scan_and_determinism(tmp_path):
    for name in ("a", "b"):
        argv = ["scan", *SMALL, "--outputs", "mesh", "--deltas=-2,1,3", "--out-dir", tmp_path / name]
        assert run(argv) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 4
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_mesh_rejects_nonfinite_and_bad_resolution(tmp_path):
    assert run(["mesh", "--deltas", "nan", "--out-dir", tmp_path]) == 1
    assert run(["mesh", "--deltas", "1", "--resolution", "abc", "--out-dir", tmp_path]) == 1


def test_mesh_resolution_flag(tmp_path):
    assert run(["mesh", "--deltas", "0.5", "--resolution", "8x4", "--out-dir", tmp_path]) == 0
    v, faces, *_ = parse_obj(tmp_path / "ellipsoid_delta_+0.500000.obj")
    assert len(v) == 2 + 8 * 3 and len(faces) == 2 * 8 * 3


# -- plots ------------------------------------------------------------------------------


def toy_records():
    return [compute_record(d) for d in (0.0, 0.5, 1.0)]


def test_semiaxes_svg_has_three_polylines():
    svg = semiaxes_svg(toy_records())
    assert svg.count("<polyline") == 3
    for label in ("s_x", "s_y", "s_z"):
        assert f">{label}</text>" in svg


def test_plot_needs_two_records(tmp_path):
    with pytest.raises(ValueError):
        render_plots(toy_records()[:1], tmp_path)
    assert list(tmp_path.iterdir()) == []


def test_plot_subcommand(tmp_path):
    csv_path = tmp_path / "scan.csv"
    csv_path.write_text(scan.records_to_csv(toy_records()))
    out = tmp_path / "plots"
    assert run(["plot", csv_path, "--out-dir", out]) == 0
    assert (out / "semiaxes.svg").read_text() == semiaxes_svg(toy_records())
    assert (out / "volume.svg").read_text().count("<polyline") == 1


def test_plot_subcommand_empty_input(tmp_path):
    csv_path = tmp_path / "scan.csv"
    csv_path.write_text(scan.records_to_csv([]))
    out = tmp_path / "plots"
    assert run(["plot", csv_path, "--out-dir", out]) == 1
    assert not out.exists()


def test_volume_plot_data_shape():
    recs = [compute_record(d) for d in np.round(np.arange(-0.9, 2.95, 0.1), 12)]
    vols = [r.volume for r in recs]
    peak = int(np.argmax(vols))
    assert recs[peak].delta == pytest.approx(1.0)
    assert all(np.diff(vols[: peak + 1]) > 0) and all(np.diff(vols[peak:]) < 0)


# -- oracle ---------------------------------------------------------------------------------


def test_oracle_subcommand(tmp_path, capsys):
    assert run(["oracle", "--deltas", "0.5", "--sizes", "4,6,8", "--out-dir", tmp_path]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].startswith("delta,quantity,pipeline,ed_n4,ed_n6,ed_n8")
    assert len(lines) == 4
    assert (tmp_path / "oracle.csv").read_text() == out


def test_oracle_single_size(tmp_path, capsys):
    assert run(["oracle", "--deltas", "1", "--oracle-n", "8", "--out-dir", tmp_path]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    zz = next(r for r in rows if r["quantity"] == "zz")
    assert abs(float(zz["abs_diff"])) < 8e-2


def test_oracle_rejects_bad_size(tmp_path):
    assert run(["oracle", "--sizes", "3", "--out-dir", tmp_path]) == 1
