"""CLI subcommands: exit codes, pose JSON shape, bench output."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from curvereg.bench import make_bumpy_surface, normalize_diameter, trace_curves
from curvereg.cli import main
from curvereg.io import save_curve, write_ply

from conftest import random_rigid


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Surface PLY, index, and a displaced curve that matches the surface."""
    root = tmp_path_factory.mktemp("cli")
    rng = np.random.default_rng(5)
    pts = normalize_diameter(make_bumpy_surface(900, seed=5), 75.0)
    write_ply(root / "surface.ply", pts)

    curve = trace_curves(pts, n_segments=4, points_per_segment=70, seed=5)
    disp = random_rigid(rng, translation_scale=50.0)
    moved = curve.transformed(disp)
    save_curve(root / "curve.xyz", moved)
    save_curve(root / "target.xyz", curve)
    return root, disp.inverse()


def test_prep_builds_index(workdir):
    root, _ = workdir
    r = CliRunner().invoke(main, ["prep", str(root / "surface.ply"),
                                  "-o", str(root / "surface.crpi"),
                                  "--subsample", "700"])
    assert r.exit_code == 0, r.output
    assert (root / "surface.crpi").exists()
    assert "pair entries" in r.output


def test_prep_parse_error(tmp_path):
    bad = tmp_path / "bad.ply"
    bad.write_text("garbage\n")
    r = CliRunner().invoke(main, ["prep", str(bad), "-o", str(tmp_path / "x.crpi")])
    assert r.exit_code == 2


def test_register_with_index(workdir):
    root, truth = workdir
    if not (root / "surface.crpi").exists():
        CliRunner().invoke(main, ["prep", str(root / "surface.ply"),
                                  "-o", str(root / "surface.crpi"),
                                  "--subsample", "700"])
    out = root / "pose.json"
    r = CliRunner().invoke(main, [
        "register", "--curve", str(root / "curve.xyz"),
        "--index", str(root / "surface.crpi"),
        "--eps", "0.05", "--target-inliers", "0.8", "--seed", "1",
        "-o", str(out)])
    assert r.exit_code == 0, r.output
    obj = json.loads(out.read_text())
    assert len(obj["R"]) == 9
    assert len(obj["t"]) == 3
    assert set(obj) >= {"R", "t", "inlier_ratio", "elapsed_s", "terminated_by"}
    R = np.array(obj["R"]).reshape(3, 3)
    from curvereg.geometry import rotation_error_deg
    assert rotation_error_deg(R, truth.R) < 2.0


def test_register_requires_one_target(workdir):
    root, _ = workdir
    r = CliRunner().invoke(main, ["register", "--curve", str(root / "curve.xyz"),
                                  "-o", str(root / "x.json")])
    assert r.exit_code == 2
    r2 = CliRunner().invoke(main, [
        "register", "--curve", str(root / "curve.xyz"),
        "--index", str(root / "surface.crpi"),
        "--surface", str(root / "surface.ply"),
        "-o", str(root / "x.json")])
    assert r2.exit_code == 2


def test_register_missing_curve(workdir):
    root, _ = workdir
    r = CliRunner().invoke(main, ["register", "--curve", str(root / "missing.xyz"),
                                  "--index", str(root / "surface.crpi"),
                                  "-o", str(root / "x.json")])
    assert r.exit_code == 2


def test_register_failure_exit_code(workdir, tmp_path):
    # a curve far larger than the model: every drawn baseline exceeds d_max,
    # so no hypothesis is ever generated
    root, _ = workdir
    t = np.linspace(0, 1, 60)
    seg = np.stack([t * 5000, np.cos(t) * 3000, t * t * 2000], axis=1)
    from curvereg.differential import Curve
    save_curve(tmp_path / "huge.xyz", Curve([seg]))
    r = CliRunner().invoke(main, [
        "register", "--curve", str(tmp_path / "huge.xyz"),
        "--index", str(root / "surface.crpi"),
        "--max-time", "0.3", "-o", str(tmp_path / "x.json")])
    assert r.exit_code == 3


def test_register_cc(workdir):
    root, truth = workdir
    out = root / "pose_cc.json"
    r = CliRunner().invoke(main, [
        "register-cc", "--source", str(root / "curve.xyz"),
        "--target", str(root / "target.xyz"),
        "--tol-len", "0.05", "--target-inliers", "0.9", "--seed", "2",
        "-o", str(out)])
    assert r.exit_code == 0, r.output
    obj = json.loads(out.read_text())
    R = np.array(obj["R"]).reshape(3, 3)
    from curvereg.geometry import rotation_error_deg
    assert rotation_error_deg(R, truth.R) < 1.0


def test_bench_command(workdir, tmp_path):
    root, _ = workdir
    cfg = {
        "model_path": str(root / "surface.ply"),
        "variant": "curve_vs_curve",
        "n_trials": 1,
        "fractions": [1.0],
        "noise_sigmas": [0.0],
        "seed": 3,
        "n_segments": 4,
        "points_per_segment": 60,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "results.csv"
    r = CliRunner().invoke(main, ["bench", "--config", str(cfg_path),
                                  "-o", str(out)])
    assert r.exit_code == 0, r.output
    lines = out.read_text().strip().splitlines()
    assert lines[0] == ("trial,fraction,sigma,outlier_fraction,"
                        "rot_err_deg,trans_err,elapsed_s,terminated_by")
    assert len(lines) == 2


def test_bench_bad_config(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text('{"variant": "bogus"}')
    r = CliRunner().invoke(main, ["bench", "--config", str(cfg_path),
                                  "-o", str(tmp_path / "r.csv")])
    assert r.exit_code == 2

    cfg_path.write_text(json.dumps({"model_path": str(tmp_path / "missing.ply"),
                                    "variant": "curve_vs_curve"}))
    r2 = CliRunner().invoke(main, ["bench", "--config", str(cfg_path),
                                   "-o", str(tmp_path / "r.csv")])
    assert r2.exit_code == 2
