"""Command-line interface.

Subcommands
-----------
prep         build an offline pair index (.crpi) from a surface model
register     register a curve against a surface (index or raw model)
register-cc  register a curve against another curve
bench        run the synthetic benchmark grid from a JSON config

Exit codes: 0 success, 2 parse error, 3 registration failed.
"""

from __future__ import annotations

import logging
import sys

import click

from . import bench as bench_mod
from .exceptions import NoHypothesisFound, ParseError
from .io import load_curve, load_model, save_transform
from .matching import IndexConfig, build_pair_index, load_pair_index, save_pair_index
from .registration import (
    RansacParams,
    register_curve_to_curve,
    register_curve_to_surface,
)

EXIT_PARSE_ERROR = 2
EXIT_NO_REGISTRATION = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _ransac_options(f):
    opts = [
        click.option("--max-time", type=float, default=5.0, show_default=True,
                     help="Online search time budget (seconds)."),
        click.option("--target-inliers", type=float, default=0.95, show_default=True,
                     help="Inlier ratio that stops the search."),
        click.option("--threshold", type=float, default=0.375, show_default=True,
                     help="Inlier distance threshold (model units)."),
        click.option("--seed", type=int, default=None, help="RNG seed."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable info logging.")
def main(verbose):
    """Global rigid registration of 3D curves and surfaces."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("surface", type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Output index file (.crpi).")
@click.option("--subsample", type=int, default=1500, show_default=True,
              help="Max surface points to index (farthest-point sampling).")
@click.option("--dmin", type=float, default=None, help="Min pair baseline.")
@click.option("--dmax", type=float, default=None, help="Max pair baseline.")
@click.option("--normals-k", type=int, default=30, show_default=True,
              help="Neighbourhood size for normal estimation.")
def prep(surface, output, subsample, dmin, dmax, normals_k):
    """Offline stage: build the pair table + R-tree for SURFACE."""
    try:
        model = load_model(surface)
    except ParseError as e:
        _fail(EXIT_PARSE_ERROR, str(e))
    cfg = IndexConfig(d_min=dmin, d_max=dmax, subsample_size=subsample,
                      normals_k=normals_k)
    index = build_pair_index(model, cfg)
    save_pair_index(index, output)
    click.echo(f"indexed {len(index.points)} points, "
               f"{len(index)} pair entries -> {output}")


@main.command()
@click.option("--curve", "curve_path", required=True, type=click.Path())
@click.option("--index", "index_path", type=click.Path(),
              help="Prebuilt .crpi index of the target surface.")
@click.option("--surface", "surface_path", type=click.Path(),
              help="Raw surface model (index is built on the fly).")
@click.option("--eps", type=float, default=0.5, show_default=True,
              help="Baseline-length query tolerance.")
@_ransac_options
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Output pose JSON.")
def register(curve_path, index_path, surface_path, eps, max_time,
             target_inliers, threshold, seed, output):
    """Register a curve against a surface."""
    if (index_path is None) == (surface_path is None):
        _fail(EXIT_PARSE_ERROR, "provide exactly one of --index / --surface")
    try:
        curve = load_curve(curve_path)
        if index_path is not None:
            index = load_pair_index(index_path)
        else:
            index = build_pair_index(load_model(surface_path))
    except ParseError as e:
        _fail(EXIT_PARSE_ERROR, str(e))

    params = RansacParams(inlier_threshold=threshold, max_time=max_time,
                          target_inlier_ratio=target_inliers, eps=eps,
                          rng_seed=seed)
    try:
        res = register_curve_to_surface(curve, index, params)
    except NoHypothesisFound as e:
        _fail(EXIT_NO_REGISTRATION, str(e))
    _write_pose(output, res)


@main.command(name="register-cc")
@click.option("--source", "source_path", required=True, type=click.Path())
@click.option("--target", "target_path", required=True, type=click.Path())
@click.option("--tol-len", type=float, default=0.5, show_default=True,
              help="Baseline equality tolerance.")
@click.option("--tol-ang", type=float, default=0.2, show_default=True,
              help="Angle equality tolerance (rad).")
@_ransac_options
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Output pose JSON.")
def register_cc(source_path, target_path, tol_len, tol_ang, max_time,
                target_inliers, threshold, seed, output):
    """Register a curve against another curve."""
    try:
        source = load_curve(source_path)
        target = load_curve(target_path)
    except ParseError as e:
        _fail(EXIT_PARSE_ERROR, str(e))
    params = RansacParams(inlier_threshold=threshold, max_time=max_time,
                          target_inlier_ratio=target_inliers,
                          tol_len=tol_len, tol_ang=tol_ang,
                          second_vector_tol=max(tol_ang, 1e-3), rng_seed=seed)
    try:
        res = register_curve_to_curve(source, target, params)
    except NoHypothesisFound as e:
        _fail(EXIT_NO_REGISTRATION, str(e))
    _write_pose(output, res)


def _write_pose(output, res):
    save_transform(output, res.transform, extra={
        "inlier_ratio": res.inlier_ratio,
        "elapsed_s": res.elapsed,
        "terminated_by": res.terminated_by.value,
    })
    click.echo(f"inlier ratio {res.inlier_ratio:.3f} "
               f"({res.terminated_by.value}, {res.elapsed:.2f}s) -> {output}")


@main.command(name="bench")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Output CSV.")
def bench_cmd(config_path, output):
    """Run the synthetic benchmark described by a JSON config."""
    try:
        cfg = bench_mod.ExperimentConfig.from_json(config_path)
        surface = load_model(cfg.model_path)
    except ParseError as e:
        _fail(EXIT_PARSE_ERROR, str(e))
    except (TypeError, ValueError) as e:
        _fail(EXIT_PARSE_ERROR, f"bad config: {e}")
    records = bench_mod.run_benchmark(cfg, surface, out_csv=output)
    ok = sum(1 for r in records if r.terminated_by != "failed")
    click.echo(f"{len(records)} trials ({ok} completed) -> {output}")


if __name__ == "__main__":
    main()
