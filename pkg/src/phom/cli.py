"""Command line front end.

Every run resolves its parameters up front, executes, and drops a
run-manifest JSON next to the outputs; `phom --manifest FILE` re-runs a
manifest and reproduces the outputs byte for byte (seeds are stored
resolved, so later environment changes cannot leak in).

Exit codes: 0 success, 2 malformed input data, 3 bad parameters,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, io
from .cubical import (build_cubical_filtration, image_persistence,
                      superlevel_persistence, voxel_persistence)
from .datagen import (Perturbation, gen_diffusion_field, gen_periodic_pair,
                      kde_grid, sample_annulus, sample_double_annulus,
                      sliding_windows)
from .distances import bottleneck_distance, wasserstein_distance
from .errors import InputError, InternalError, ParameterError
from .persistence import compute_persistence, representative_cycle, \
    sparsify_cycle
from .simplicial import point_cloud_distances, rips_filtration
from .svgplot import save_diagram_svg
from .vectorize import persistence_image


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get("PH_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ParameterError(f"PH_SEED={env!r} is not an integer") from None


def _write_manifest(path: str, subcommand: str, params: dict) -> None:
    obj = {"tool": "phom", "version": __version__,
           "subcommand": subcommand, "params": params}
    with open(path, "w", encoding="ascii") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")


def _sibling(output: str, suffix: str) -> str:
    stem, _ = os.path.splitext(output)
    return stem + suffix


# ------------------------------------------------------------------ rips

def run_rips(p: dict) -> None:
    if p["distance_matrix"]:
        d = io.read_distance_matrix(p["input"])
        cloud_dim = None
    else:
        cloud = io.read_point_cloud(p["input"])
        cloud_dim = cloud.shape[1]
        d = point_cloud_distances(cloud)
    n = d.shape[0]
    conv = p["convention"]
    hdim = p["max_dim"]
    if hdim is None:
        hdim = 2 if (cloud_dim is not None and cloud_dim >= 3) else 1
    max_scale = p["max_scale"]
    if max_scale is None:
        dmax = float(d.max())
        if dmax <= 0:
            dmax = 1.0
        max_scale = dmax / 2.0 if conv == "radius" else dmax
    simplex_dim = min(int(hdim) + 1, n - 1) if n > 1 else 0
    K = rips_filtration(d, simplex_dim, max_scale, conv)
    diagram, _ = compute_persistence(
        K, max_dim=int(hdim),
        metadata={"filtration": "rips", "convention": conv,
                  "max_scale": float(max_scale)})
    io.write_diagram_csv(p["output"], diagram)
    if p["svg"]:
        save_diagram_svg(_sibling(p["output"], ".svg"), diagram,
                         title="Rips persistence")
    if p["save_complex"]:
        io.write_complex_cache(p["save_complex"], K,
                               meta={"kind": "rips", "convention": conv})
    _write_manifest(_sibling(p["output"], ".manifest.json"), "rips", p)


def cmd_rips(args) -> None:
    run_rips({
        "input": args.input,
        "output": args.output,
        "distance_matrix": bool(args.distance_matrix),
        "max_dim": args.max_dim,
        "max_scale": args.max_scale,
        "convention": args.convention,
        "svg": bool(args.svg),
        "save_complex": args.save_complex,
    })


# ----------------------------------------------------------- image / voxel

def run_image(p: dict) -> None:
    g = io.read_pgm(p["input"])
    if p["superlevel"]:
        diagram = superlevel_persistence(g, max_dim=p["max_dim"])
    else:
        diagram = image_persistence(g, max_dim=p["max_dim"])
    io.write_diagram_csv(p["output"], diagram)
    if p["svg"]:
        save_diagram_svg(_sibling(p["output"], ".svg"), diagram,
                         title="Cubical persistence")
    if p["save_complex"]:
        grid = -g if p["superlevel"] else g
        kind = "cubical-superlevel" if p["superlevel"] else "cubical-sublevel"
        io.write_complex_cache(p["save_complex"],
                               build_cubical_filtration(grid),
                               meta={"kind": kind})
    _write_manifest(_sibling(p["output"], ".manifest.json"), "image", p)


def cmd_image(args) -> None:
    run_image({
        "input": args.input,
        "output": args.output,
        "superlevel": bool(args.superlevel),
        "max_dim": args.max_dim,
        "svg": bool(args.svg),
        "save_complex": args.save_complex,
    })


def run_voxel(p: dict) -> None:
    g = io.read_voxel(p["input"])
    if p["superlevel"]:
        diagram = superlevel_persistence(g, max_dim=p["max_dim"])
    else:
        diagram = voxel_persistence(g, max_dim=p["max_dim"])
    io.write_diagram_csv(p["output"], diagram)
    if p["svg"]:
        save_diagram_svg(_sibling(p["output"], ".svg"), diagram,
                         title="Voxel persistence")
    if p["save_complex"]:
        grid = -g if p["superlevel"] else g
        kind = "cubical-superlevel" if p["superlevel"] else "cubical-sublevel"
        io.write_complex_cache(p["save_complex"],
                               build_cubical_filtration(grid),
                               meta={"kind": kind})
    _write_manifest(_sibling(p["output"], ".manifest.json"), "voxel", p)


def cmd_voxel(args) -> None:
    run_voxel({
        "input": args.input,
        "output": args.output,
        "superlevel": bool(args.superlevel),
        "max_dim": args.max_dim,
        "svg": bool(args.svg),
        "save_complex": args.save_complex,
    })


# ------------------------------------------------------------- vectorize

def run_vectorize(p: dict) -> None:
    pd = io.read_diagram_csv(p["input"])
    support = None
    if p["range"] is not None:
        b0, b1, p0, p1 = (float(v) for v in p["range"])
        support = ((b0, b1), (p0, p1))
    img = persistence_image(
        pd, dim=int(p["dim"]),
        resolution=(int(p["resolution"][0]), int(p["resolution"][1])),
        sigma=p["sigma"], support=support, weight=p["weight"],
        essentials=p["essentials"])
    io.write_image_json(p["output"], img)
    _write_manifest(_sibling(p["output"], ".manifest.json"), "vectorize", p)


def cmd_vectorize(args) -> None:
    run_vectorize({
        "input": args.input,
        "output": args.output,
        "dim": args.dim,
        "resolution": list(args.resolution),
        "sigma": args.sigma,
        "range": list(args.range) if args.range is not None else None,
        "weight": args.weight,
        "essentials": args.essentials,
    })


# -------------------------------------------------------------- distance

def run_distance(p: dict) -> None:
    pd1 = io.read_diagram_csv(p["input_a"])
    pd2 = io.read_diagram_csv(p["input_b"])
    if p["metric"] == "bottleneck":
        report = bottleneck_distance(pd1, pd2, dim=int(p["dim"]))
    else:
        report = wasserstein_distance(pd1, pd2, dim=int(p["dim"]),
                                      p=float(p["p"]))
    io.write_distance_report(p["output"], report)
    _write_manifest(_sibling(p["output"], ".manifest.json"), "distance", p)


def cmd_distance(args) -> None:
    run_distance({
        "input_a": args.input_a,
        "input_b": args.input_b,
        "output": args.output,
        "metric": args.metric,
        "p": args.p,
        "dim": args.dim,
    })


# ---------------------------------------------------------------- series

def run_series(p: dict) -> None:
    series = io.read_point_cloud(p["input"])
    if series.shape[1] != 2:
        raise InputError(
            f"{p['input']}: series file needs exactly 2 columns")
    wins = sliding_windows(series, int(p["window"]), int(p["stride"]))
    dmats = [point_cloud_distances(w) for w in wins]
    conv = p["convention"]
    max_scale = p["max_scale"]
    if max_scale is None:
        dmax = max(float(m.max()) for m in dmats)
        if dmax <= 0:
            dmax = 1.0
        max_scale = dmax / 2.0 if conv == "radius" else dmax
    os.makedirs(p["out_dir"], exist_ok=True)
    diagrams = []
    for k, m in enumerate(dmats):
        K = rips_filtration(m, min(2, m.shape[0] - 1), max_scale, conv)
        dg, _ = compute_persistence(
            K, max_dim=1,
            metadata={"filtration": "rips", "convention": conv,
                      "max_scale": float(max_scale), "window": k})
        io.write_diagram_csv(
            os.path.join(p["out_dir"], f"window_{k:03d}.csv"), dg)
        diagrams.append(dg)
    with open(os.path.join(p["out_dir"], "score.csv"), "w",
              encoding="ascii") as fh:
        fh.write("window,bottleneck\n")
        for k, dg in enumerate(diagrams):
            val = bottleneck_distance(dg, diagrams[0], dim=1).value
            text = "inf" if math.isinf(val) else repr(float(val))
            fh.write(f"{k},{text}\n")
    _write_manifest(os.path.join(p["out_dir"], "run.manifest.json"),
                    "series", p)


def cmd_series(args) -> None:
    run_series({
        "input": args.input,
        "out_dir": args.out_dir,
        "window": args.window,
        "stride": args.stride,
        "max_scale": args.max_scale,
        "convention": args.convention,
    })


# -------------------------------------------------------------- sparsify

def run_sparsify(p: dict) -> None:
    K = io.read_complex_cache(p["complex"])
    pd = io.read_diagram_csv(p["diagram"])
    idx = int(p["point"])
    if not 0 <= idx < len(pd.points):
        raise ParameterError(
            f"--point {idx} outside diagram with {len(pd.points)} points")
    point = pd.points[idx]
    _, pairing = compute_persistence(K, max_dim=K.dim)
    try:
        cycle = representative_cycle(pairing, point)
    except ParameterError:
        raise InputError(
            f"diagram point {point} not found in the cached complex; "
            "diagram and cache disagree") from None
    sparse = sparsify_cycle(cycle, budget=int(p["budget"]))
    d, b, dth = point
    obj = {
        "point": {"dim": d, "birth": b,
                  "death": "inf" if math.isinf(dth) else dth},
        "size_before": len(cycle),
        "size": len(sparse),
        "budget": int(p["budget"]),
        "cells_before": cycle.labels(),
        "cells": sparse.labels(),
    }
    with open(p["output"], "w", encoding="ascii") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")
    _write_manifest(_sibling(p["output"], ".manifest.json"), "sparsify", p)


def cmd_sparsify(args) -> None:
    run_sparsify({
        "complex": args.complex,
        "diagram": args.diagram,
        "point": args.point,
        "budget": args.budget,
        "output": args.output,
    })


# ------------------------------------------------------------------- gen

def run_gen(p: dict) -> None:
    kind = p["kind"]
    if kind == "annulus":
        pts = sample_annulus(int(p["n"]), radius=float(p["radius"]),
                             noise=float(p["noise"]), seed=int(p["seed"]))
        io.write_point_cloud(p["output"], pts, header="x,y")
    elif kind == "double-annulus":
        pts = sample_double_annulus(
            int(p["n"]), radii=(float(p["radii"][0]), float(p["radii"][1])),
            separation=float(p["separation"]), noise=float(p["noise"]),
            seed=int(p["seed"]))
        io.write_point_cloud(p["output"], pts, header="x,y")
    elif kind == "periodic":
        pert = None
        if p["perturb"] is not None:
            q = p["perturb"]
            pert = Perturbation(str(q["kind"]), float(q["magnitude"]),
                                int(q["start"]), int(q["end"]))
        arr = gen_periodic_pair(
            int(p["n"]), amplitude=float(p["amplitude"]),
            frequency=float(p["frequency"]), perturbation=pert,
            noise_sigma=float(p["noise"]), seed=int(p["seed"]))
        io.write_point_cloud(p["output"], arr, header="f1,f2")
    elif kind == "diffusion":
        u = gen_diffusion_field(n=int(p["size"]), coeff=float(p["coeff"]),
                                steps=int(p["steps"]), dt=float(p["dt"]),
                                seed=int(p["seed"]))
        if p["format"] == "vox":
            io.write_voxel(p["output"], u)
        else:
            io.write_pgm(p["output"], io.quantize_grid(u, 65535),
                         maxval=65535)
    elif kind == "kde":
        pts = io.read_point_cloud(p["input"])
        if pts.shape[1] != 2:
            raise InputError(f"{p['input']}: kde needs a 2-column cloud")
        field = kde_grid(pts, resolution=int(p["resolution"]),
                         bandwidth=p["bandwidth"])
        io.write_voxel(p["output"], field.values)
    else:
        raise ParameterError(f"unknown generator {kind!r}")
    _write_manifest(_sibling(p["output"], ".manifest.json"), "gen", p)


def cmd_gen(args) -> None:
    p: dict = {"kind": args.kind, "output": args.output}
    if args.kind in ("annulus", "double-annulus", "periodic", "diffusion"):
        p["seed"] = _resolve_seed(args.seed)
    if args.kind == "annulus":
        p.update(n=args.n, radius=args.radius, noise=args.noise)
    elif args.kind == "double-annulus":
        p.update(n=args.n, radii=list(args.radii),
                 separation=args.separation, noise=args.noise)
    elif args.kind == "periodic":
        pert = None
        if args.perturb is not None:
            kind, mag, start, end = args.perturb
            try:
                pert = {"kind": kind, "magnitude": float(mag),
                        "start": int(start), "end": int(end)}
            except ValueError as exc:
                raise ParameterError(f"bad --perturb: {exc}") from None
        p.update(n=args.n, amplitude=args.amplitude,
                 frequency=args.frequency, noise=args.noise, perturb=pert)
    elif args.kind == "diffusion":
        p.update(size=args.size, coeff=args.coeff, steps=args.steps,
                 dt=args.dt, format=args.format)
    elif args.kind == "kde":
        p.update(input=args.input, resolution=args.resolution,
                 bandwidth=args.bandwidth)
    run_gen(p)


RUNNERS = {
    "rips": run_rips,
    "image": run_image,
    "voxel": run_voxel,
    "vectorize": run_vectorize,
    "distance": run_distance,
    "series": run_series,
    "sparsify": run_sparsify,
    "gen": run_gen,
}


def replay_manifest(path: str) -> None:
    try:
        with open(path, "r", encoding="ascii") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: cannot read manifest: {exc}") from None
    if not isinstance(obj, dict) or obj.get("tool") != "phom":
        raise InputError(f"{path}: not a phom run manifest")
    sub = obj.get("subcommand")
    if sub not in RUNNERS:
        raise InputError(f"{path}: unknown subcommand {sub!r}")
    RUNNERS[sub](obj["params"])


def build_parser() -> _Parser:
    top = _Parser(prog="phom",
                  description="Persistent homology pipelines")
    top.add_argument("--manifest", metavar="FILE",
                     help="replay a recorded run instead of a subcommand")
    top.add_argument("--version", action="version",
                     version=f"phom {__version__}")
    sub = top.add_subparsers(dest="subcommand")

    q = sub.add_parser("rips", help="Rips persistence of a point cloud")
    q.add_argument("input")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--distance-matrix", action="store_true",
                   help="input is a distance matrix, not a cloud")
    q.add_argument("--max-dim", type=int, default=None,
                   help="largest homology dimension (default 1, or 2 for "
                        "3-d clouds)")
    q.add_argument("--max-scale", type=float, default=None)
    q.add_argument("--convention", choices=["radius", "diameter"],
                   default="radius")
    q.add_argument("--svg", action="store_true")
    q.add_argument("--save-complex", metavar="FILE", default=None)
    q.set_defaults(func=cmd_rips)

    q = sub.add_parser("image", help="cubical persistence of a PGM/PPM")
    q.add_argument("input")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--superlevel", action="store_true")
    q.add_argument("--max-dim", type=int, default=None)
    q.add_argument("--svg", action="store_true")
    q.add_argument("--save-complex", metavar="FILE", default=None)
    q.set_defaults(func=cmd_image)

    q = sub.add_parser("voxel", help="cubical persistence of a voxel grid")
    q.add_argument("input")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--superlevel", action="store_true")
    q.add_argument("--max-dim", type=int, default=None)
    q.add_argument("--svg", action="store_true")
    q.add_argument("--save-complex", metavar="FILE", default=None)
    q.set_defaults(func=cmd_voxel)

    q = sub.add_parser("vectorize", help="diagram to persistence image")
    q.add_argument("input")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--dim", type=int, default=1)
    q.add_argument("--resolution", type=int, nargs=2, default=[20, 20],
                   metavar=("NB", "NP"))
    q.add_argument("--sigma", type=float, default=None)
    q.add_argument("--range", type=float, nargs=4, default=None,
                   metavar=("B0", "B1", "P0", "P1"))
    q.add_argument("--weight", choices=["linear", "constant"],
                   default="linear")
    q.add_argument("--essentials", choices=["auto", "cap", "skip"],
                   default="auto")
    q.set_defaults(func=cmd_vectorize)

    q = sub.add_parser("distance", help="distance between two diagrams")
    q.add_argument("input_a")
    q.add_argument("input_b")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--metric", choices=["bottleneck", "wasserstein"],
                   default="bottleneck")
    q.add_argument("--p", type=float, default=2.0)
    q.add_argument("--dim", type=int, default=1)
    q.set_defaults(func=cmd_distance)

    q = sub.add_parser("series",
                       help="sliding-window loop scores of a 2-column series")
    q.add_argument("input")
    q.add_argument("--out-dir", required=True)
    q.add_argument("--window", type=int, default=64)
    q.add_argument("--stride", type=int, default=64)
    q.add_argument("--max-scale", type=float, default=None)
    q.add_argument("--convention", choices=["radius", "diameter"],
                   default="radius")
    q.set_defaults(func=cmd_series)

    q = sub.add_parser("sparsify", help="shrink a representative cycle")
    q.add_argument("--complex", required=True, metavar="CACHE")
    q.add_argument("--diagram", required=True, metavar="CSV")
    q.add_argument("--point", type=int, required=True,
                   help="row index into the diagram CSV")
    q.add_argument("--budget", type=int, default=20)
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_sparsify)

    q = sub.add_parser("gen", help="seeded data generators")
    gensub = q.add_subparsers(dest="kind")

    g = gensub.add_parser("annulus")
    g.add_argument("-n", type=int, default=200)
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    g = gensub.add_parser("double-annulus")
    g.add_argument("-n", type=int, default=200)
    g.add_argument("--radii", type=float, nargs=2, default=[1.0, 1.0])
    g.add_argument("--separation", type=float, default=1.2)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    g = gensub.add_parser("periodic")
    g.add_argument("-n", type=int, default=256)
    g.add_argument("--amplitude", type=float, default=1.0)
    g.add_argument("--frequency", type=float, default=1.0 / 64.0)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--perturb", nargs=4, default=None,
                   metavar=("KIND", "MAG", "START", "END"))
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    g = gensub.add_parser("diffusion")
    g.add_argument("--size", type=int, default=32)
    g.add_argument("--coeff", type=float, default=0.5)
    g.add_argument("--steps", type=int, default=50)
    g.add_argument("--dt", type=float, default=0.2)
    g.add_argument("--format", choices=["vox", "pgm"], default="vox")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    g = gensub.add_parser("kde")
    g.add_argument("input", help="2-column point cloud CSV")
    g.add_argument("--resolution", type=int, default=64)
    g.add_argument("--bandwidth", type=float, default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    return top


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.manifest is not None:
            if args.subcommand is not None:
                raise ParameterError(
                    "--manifest replaces the subcommand")
            replay_manifest(args.manifest)
            return 0
        if args.subcommand is None:
            raise ParameterError("a subcommand is required (see --help)")
        if args.subcommand == "gen" and getattr(args, "kind", None) is None:
            raise ParameterError("gen needs a generator kind (see --help)")
        args.func(args)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
