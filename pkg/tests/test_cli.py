"""End-to-end command-line flows, exit codes, and manifest replay."""

import json
import math
import os

import numpy as np
import pytest

from phom import cli
from phom.io import (
    read_complex_cache,
    read_diagram_csv,
    read_distance_report,
    read_image_json,
    read_point_cloud,
    read_voxel,
    write_pgm,
    write_point_cloud,
    write_voxel,
)


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_gen_annulus_and_rips_pipeline(tmp_path):
    cloud = tmp_path / "ann.csv"
    dg = tmp_path / "dg.csv"
    assert run("gen", "annulus", "-n", 40, "--noise", 0.02, "--seed", 1,
               "-o", cloud) == 0
    assert read_point_cloud(str(cloud)).shape == (40, 2)

    assert run("rips", cloud, "-o", dg, "--svg",
               "--save-complex", tmp_path / "ann.cplx") == 0
    pd = read_diagram_csv(str(dg))
    assert pd.metadata["filtration"] == "rips"
    assert pd.metadata["convention"] == "radius"
    assert any(d == 1 for d, _, _ in pd.points)
    svg = (tmp_path / "dg.svg").read_text()
    assert svg.startswith("<svg") or "<svg" in svg
    K = read_complex_cache(str(tmp_path / "ann.cplx"))
    assert K.meta["kind"] == "rips"
    assert (tmp_path / "dg.manifest.json").exists()


def test_rips_distance_matrix_input(tmp_path):
    dm = tmp_path / "d.csv"
    dm.write_text("0,1,1\n1,0,1\n1,1,0\n")
    out = tmp_path / "dg.csv"
    assert run("rips", dm, "--distance-matrix", "--max-scale", 0.5,
               "-o", out) == 0
    pd = read_diagram_csv(str(out))
    assert pd.metadata["max_scale"] == 0.5


def test_rips_3d_cloud_defaults_to_h2(tmp_path):
    cloud = tmp_path / "c.csv"
    rng = np.random.default_rng(0)
    write_point_cloud(str(cloud), rng.uniform(0, 1, size=(12, 3)))
    out = tmp_path / "dg.csv"
    assert run("rips", cloud, "-o", out) == 0
    assert read_diagram_csv(str(out)).metadata["max_dim"] == 2


def test_image_sublevel_and_superlevel(tmp_path):
    pgm = tmp_path / "img.pgm"
    g = np.full((5, 5), 200)
    g[2, 2] = 10
    write_pgm(str(pgm), g)
    out = tmp_path / "dg.csv"
    assert run("image", pgm, "-o", out) == 0
    pd = read_diagram_csv(str(out))
    assert pd.metadata["direction"] == "sublevel"
    assert (0, 10.0, math.inf) in pd.points

    sup = tmp_path / "sup.csv"
    assert run("image", pgm, "--superlevel", "-o", sup) == 0
    ps = read_diagram_csv(str(sup))
    assert ps.metadata["direction"] == "superlevel"
    assert (0, -200.0, math.inf) in ps.points


def test_voxel_finds_enclosed_void(tmp_path):
    vox = tmp_path / "g.vox"
    grid = np.zeros((3, 3, 3))
    grid[1, 1, 1] = 1.0
    write_voxel(str(vox), grid)
    out = tmp_path / "dg.csv"
    assert run("voxel", vox, "-o", out) == 0
    pd = read_diagram_csv(str(out))
    assert (2, 0.0, 1.0) in pd.points


def test_vectorize_with_range(tmp_path):
    dg = tmp_path / "dg.csv"
    dg.write_text("dim,birth,death\n1,0.2,0.9\n1,0.4,1.3\n")
    out = tmp_path / "img.json"
    assert run("vectorize", dg, "-o", out, "--resolution", 8, 10,
               "--sigma", 0.15, "--range", 0, 1, 0, 1.5) == 0
    img = read_image_json(str(out))
    assert img.resolution == (8, 10)
    assert img.support == ((0.0, 1.0), (0.0, 1.5))
    assert img.sigma == 0.15
    assert img.pixels.sum() > 0


def test_distance_command(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("dim,birth,death\n1,0.0,2.0\n")
    b.write_text("dim,birth,death\n1,0.0,3.0\n")
    out = tmp_path / "rep.json"
    assert run("distance", a, b, "-o", out, "--metric", "bottleneck") == 0
    rep = read_distance_report(str(out))
    assert rep.value == pytest.approx(1.0)
    assert run("distance", a, b, "-o", out, "--metric", "wasserstein",
               "--p", 1.0) == 0
    rep = read_distance_report(str(out))
    assert rep.metric == "wasserstein"
    assert rep.value == pytest.approx(1.0)


def test_series_windows_and_scores(tmp_path):
    src = tmp_path / "series.csv"
    assert run("gen", "periodic", "-n", 128, "--seed", 2, "-o", src) == 0
    out = tmp_path / "run"
    assert run("series", src, "--out-dir", out, "--window", 32,
               "--stride", 32) == 0
    files = sorted(f.name for f in out.iterdir())
    assert "score.csv" in files
    assert "run.manifest.json" in files
    assert [f for f in files if f.startswith("window_")] == \
        ["window_000.csv", "window_001.csv", "window_002.csv",
         "window_003.csv"]
    lines = (out / "score.csv").read_text().splitlines()
    assert lines[0] == "window,bottleneck"
    assert len(lines) == 5
    assert float(lines[1].split(",")[1]) == 0.0


def test_series_rejects_wrong_width(tmp_path):
    src = tmp_path / "series.csv"
    src.write_text("1.0,2.0,3.0\n4.0,5.0,6.0\n")
    assert run("series", src, "--out-dir", tmp_path / "run") == 2


def test_sparsify_flow(tmp_path):
    cloud = tmp_path / "ann.csv"
    dg = tmp_path / "dg.csv"
    cache = tmp_path / "ann.cplx"
    assert run("gen", "annulus", "-n", 25, "--seed", 4, "-o", cloud) == 0
    assert run("rips", cloud, "-o", dg, "--save-complex", cache) == 0
    pd = read_diagram_csv(str(dg))
    idx = next(i for i, (d, _, _) in enumerate(pd.points) if d == 1)
    out = tmp_path / "cycle.json"
    assert run("sparsify", "--complex", cache, "--diagram", dg,
               "--point", idx, "-o", out) == 0
    obj = json.loads(out.read_text())
    assert obj["point"]["dim"] == 1
    assert obj["size"] <= obj["size_before"]
    assert len(obj["cells"]) == obj["size"]
    assert all("," in lab for lab in obj["cells"])


def test_sparsify_point_out_of_range(tmp_path):
    cloud = tmp_path / "c.csv"
    dg = tmp_path / "dg.csv"
    cache = tmp_path / "c.cplx"
    assert run("gen", "annulus", "-n", 10, "-o", cloud) == 0
    assert run("rips", cloud, "-o", dg, "--save-complex", cache) == 0
    assert run("sparsify", "--complex", cache, "--diagram", dg,
               "--point", 999, "-o", tmp_path / "x.json") == 3


def test_sparsify_mismatched_diagram(tmp_path):
    cloud = tmp_path / "c.csv"
    dg = tmp_path / "dg.csv"
    cache = tmp_path / "c.cplx"
    assert run("gen", "annulus", "-n", 10, "-o", cloud) == 0
    assert run("rips", cloud, "-o", dg, "--save-complex", cache) == 0
    fake = tmp_path / "other.csv"
    fake.write_text("dim,birth,death\n1,0.123,0.456\n")
    assert run("sparsify", "--complex", cache, "--diagram", fake,
               "--point", 0, "-o", tmp_path / "x.json") == 2


def test_gen_double_annulus_and_kde(tmp_path):
    cloud = tmp_path / "two.csv"
    assert run("gen", "double-annulus", "-n", 60, "--separation", 2.0,
               "--seed", 5, "-o", cloud) == 0
    assert read_point_cloud(str(cloud)).shape == (60, 2)
    vox = tmp_path / "density.vox"
    assert run("gen", "kde", cloud, "--resolution", 24,
               "--bandwidth", 0.3, "-o", vox) == 0
    grid = read_voxel(str(vox))
    assert grid.shape == (1, 24, 24)
    assert grid.sum() > 0


def test_gen_diffusion_formats(tmp_path):
    vox = tmp_path / "u.vox"
    assert run("gen", "diffusion", "--size", 8, "--steps", 5, "--seed", 1,
               "-o", vox) == 0
    assert read_voxel(str(vox)).shape == (1, 8, 8)
    pgm = tmp_path / "u.pgm"
    assert run("gen", "diffusion", "--size", 8, "--steps", 5, "--seed", 1,
               "--format", "pgm", "-o", pgm) == 0
    from phom.io import read_pgm
    g = read_pgm(str(pgm))
    assert g.shape == (8, 8)
    assert g.max() == 65535


def test_gen_periodic_with_perturbation(tmp_path):
    out = tmp_path / "s.csv"
    assert run("gen", "periodic", "-n", 32, "--perturb", "scale", 0.5,
               8, 16, "-o", out) == 0
    pert = read_point_cloud(str(out))
    clean = tmp_path / "c.csv"
    assert run("gen", "periodic", "-n", 32, "-o", clean) == 0
    base = read_point_cloud(str(clean))
    assert np.allclose(pert[8:16], base[8:16] * 1.5)
    assert np.array_equal(pert[:8], base[:8])


def test_seed_resolution(tmp_path, monkeypatch):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    c = tmp_path / "c.csv"
    monkeypatch.delenv("PH_SEED", raising=False)
    assert run("gen", "annulus", "-n", 20, "--noise", 0.1, "-o", a) == 0
    monkeypatch.setenv("PH_SEED", "9")
    assert run("gen", "annulus", "-n", 20, "--noise", 0.1, "-o", b) == 0
    assert run("gen", "annulus", "-n", 20, "--noise", 0.1, "--seed", 0,
               "-o", c) == 0
    # Env seed changes the stream; an explicit flag beats the env.
    assert a.read_bytes() != b.read_bytes()
    assert a.read_bytes() == c.read_bytes()

    manifest = json.loads((tmp_path / "b.manifest.json").read_text())
    assert manifest["params"]["seed"] == 9

    monkeypatch.setenv("PH_SEED", "zap")
    assert run("gen", "annulus", "-n", 5, "-o", tmp_path / "x.csv") == 3


def test_manifest_replay_is_byte_identical(tmp_path):
    cloud = tmp_path / "ann.csv"
    dg = tmp_path / "dg.csv"
    assert run("gen", "annulus", "-n", 30, "--noise", 0.05, "--seed", 3,
               "-o", cloud) == 0
    assert run("rips", cloud, "-o", dg, "--svg") == 0
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert run("--manifest", tmp_path / "dg.manifest.json") == 0
    assert run("--manifest", tmp_path / "ann.manifest.json") == 0
    after = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert before == after
    names = set(before)
    assert {"ann.csv", "dg.csv", "dg.svg", "dg.manifest.json",
            "ann.manifest.json"} <= names


def test_manifest_structure(tmp_path):
    out = tmp_path / "a.csv"
    assert run("gen", "annulus", "-n", 5, "--seed", 0, "-o", out) == 0
    obj = json.loads((tmp_path / "a.manifest.json").read_text())
    assert obj["tool"] == "phom"
    assert obj["subcommand"] == "gen"
    assert obj["params"]["kind"] == "annulus"
    from phom import __version__
    assert obj["version"] == __version__


def test_exit_codes(tmp_path, capsys):
    # Missing input file.
    assert run("rips", tmp_path / "nope.csv", "-o", tmp_path / "x.csv") == 2
    assert "error:" in capsys.readouterr().err
    # Unknown subcommand and missing arguments are usage errors.
    assert run("frobnicate") == 3
    assert run() == 3
    assert run("gen") == 3
    assert run("rips", tmp_path / "nope.csv") == 3
    # Manifest conflicts and bad manifests.
    assert run("--manifest", tmp_path / "nope.json") == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"tool": "other"}')
    assert run("--manifest", bad) == 2
    good_cloud = tmp_path / "c.csv"
    assert run("gen", "annulus", "-n", 5, "-o", good_cloud) == 0
    assert run("--manifest", tmp_path / "c.manifest.json", "gen") == 3


def test_malformed_inputs_are_exit_2(tmp_path):
    dg = tmp_path / "dg.csv"
    dg.write_text("not,a,diagram\n")
    assert run("vectorize", dg, "-o", tmp_path / "i.json") == 2
    pgm = tmp_path / "x.pgm"
    pgm.write_text("P9\n")
    assert run("image", pgm, "-o", tmp_path / "dg2.csv") == 2
    vox = tmp_path / "x.vox"
    vox.write_text("1 1\n0\n")
    assert run("voxel", vox, "-o", tmp_path / "dg3.csv") == 2


def test_bad_parameters_are_exit_3(tmp_path):
    cloud = tmp_path / "c.csv"
    write_point_cloud(str(cloud), np.random.default_rng(0).uniform(
        0, 1, size=(6, 2)))
    assert run("rips", cloud, "-o", tmp_path / "d.csv",
               "--max-scale", -1.0) == 3
    dg = tmp_path / "dg.csv"
    dg.write_text("dim,birth,death\n1,0.0,1.0\n")
    assert run("vectorize", dg, "-o", tmp_path / "i.json",
               "--sigma", -0.5) == 3
    assert run("distance", dg, dg, "-o", tmp_path / "r.json",
               "--metric", "wasserstein", "--p", 0.2) == 3
