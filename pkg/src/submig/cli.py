"""Command-line front end: synthesize data, decompose, image, compare, extract.

Exit status: 0 on success, 1 on a computation failure, 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analytic import analytic_image_grid, predict_peaks
from .forward import add_noise, assemble_msr, read_msr, write_msr
from .imaging import (
    DEFAULT_MIN_SEPARATION,
    DEFAULT_THRESHOLD_FRAC,
    ImageMap,
    ImagingGridSpec,
    extract_peaks,
    image_grid,
    read_image,
    write_image,
    write_peaks,
)
from .presets import PRESETS
from .scene import FrequencySpec, load_scene, make_directions, validate_scene
from .spectral import DEFAULT_AUTO_TAU, ComputationError, decompose, select_rank

__all__ = ["main", "entrypoint"]


def _add_scene_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--scene", help="path to a TOML scene file")
    sub.add_argument("--preset", choices=sorted(PRESETS), help="built-in scene preset")
    sub.add_argument("--wavelength", type=float, help="wavelength (sets omega = 2*pi/wavelength)")
    sub.add_argument("--omega", type=float, help="angular frequency")


def _add_grid_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--grid", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
        default=[-1.0, 1.0, -1.0, 1.0], help="search region bounds (default [-1,1]^2)",
    )
    sub.add_argument(
        "--res", type=int, nargs="+", metavar="N", default=[256],
        help="grid resolution: nx [ny] (default 256)",
    )
    sub.add_argument("--pgm", help="also write an ASCII PGM rendering to this path")


def _resolve_scene(args):
    if (args.scene is None) == (args.preset is None):
        raise ValueError("give exactly one of --scene or --preset")
    if args.wavelength is not None and args.omega is not None:
        raise ValueError("give at most one of --wavelength or --omega")
    if args.preset is not None:
        scene, freq = PRESETS[args.preset]()
    else:
        scene, freq = load_scene(args.scene), None
    if args.wavelength is not None:
        freq = FrequencySpec.from_wavelength(args.wavelength)
    elif args.omega is not None:
        freq = FrequencySpec.from_omega(args.omega)
    if freq is None:
        raise ValueError("scene files carry no frequency; give --wavelength or --omega")
    return scene, freq


def _resolve_grid(args) -> ImagingGridSpec:
    nx = args.res[0]
    ny = args.res[1] if len(args.res) > 1 else nx
    if len(args.res) > 2:
        raise ValueError("--res takes one or two integers")
    x_min, x_max, y_min, y_max = args.grid
    return ImagingGridSpec(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max, nx=nx, ny=ny)


def write_pgm(image: ImageMap, path) -> None:
    """ASCII P2 rendering, 255 = the map's global maximum, top row = y_max."""
    values = image.values
    top = float(values.max())
    if top > 0:
        scaled = np.rint(values / top * 255).astype(int)
    else:
        scaled = np.zeros(values.shape, dtype=int)
    lines = [f"P2", f"{image.grid.nx} {image.grid.ny}", "255"]
    for j in range(image.grid.ny - 1, -1, -1):
        lines.append(" ".join(str(v) for v in scaled[:, j]))
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_synthesize(args) -> int:
    scene, freq = _resolve_scene(args)
    dirs = make_directions(args.n_directions)
    for warning in validate_scene(scene, freq):
        print(f"warning: {warning}", file=sys.stderr)
    msr = assemble_msr(scene, freq, dirs)
    if args.snr_db is not None:
        msr = add_noise(msr, args.snr_db, args.seed)
    write_msr(msr, args.out)
    print(f"wrote MSR matrix N={msr.size} noisy={int(msr.noisy)} to {args.out}")
    return 0


def _cmd_image(args) -> int:
    msr = read_msr(args.msr)
    dirs = make_directions(msr.size)
    factors = decompose(msr)
    if args.rank is not None and args.rank_auto is not None:
        raise ValueError("give at most one of --rank or --rank-auto")
    if args.rank is not None:
        factors = select_rank(factors, fixed=args.rank)
        mode = f"fixed {factors.rank}"
    else:
        tau = args.rank_auto if args.rank_auto is not None else DEFAULT_AUTO_TAU
        factors = select_rank(factors, auto=tau)
        mode = f"auto tau={tau:g} -> {factors.rank}"
    grid = _resolve_grid(args)
    image = image_grid(grid, args.eta, factors, dirs)
    write_image(image, args.out)
    if args.pgm:
        write_pgm(image, args.pgm)
    print(f"wrote image {grid.nx}x{grid.ny} eta={args.eta:g} rank {mode} to {args.out}")
    return 0


def _cmd_analytic(args) -> int:
    scene, freq = _resolve_scene(args)
    grid = _resolve_grid(args)
    image = analytic_image_grid(grid, args.eta, scene, freq.omega)
    write_image(image, args.out)
    if args.pgm:
        write_pgm(image, args.pgm)
    print(f"wrote analytic image {grid.nx}x{grid.ny} eta={args.eta:g} to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    image_a = read_image(args.image_a)
    image_b = read_image(args.image_b)
    ga, gb = image_a.grid, image_b.grid
    if (ga.nx, ga.ny) != (gb.nx, gb.ny) or (
        ga.x_min, ga.x_max, ga.y_min, ga.y_max
    ) != (gb.x_min, gb.x_max, gb.y_min, gb.y_max):
        raise ValueError("image geometries differ; refusing to compare")
    diff = image_a.values - image_b.values
    max_abs = float(np.max(np.abs(diff)))
    rmse = float(np.sqrt(np.mean(diff**2)))
    xs, ys = ga.x_nodes(), ga.y_nodes()
    ia = np.unravel_index(np.argmax(image_a.values), image_a.values.shape)
    ib = np.unravel_index(np.argmax(image_b.values), image_b.values.shape)
    print(f"max abs diff: {max_abs:.17g}")
    print(f"rmse: {rmse:.17g}")
    print(f"argmax A: {xs[ia[0]]:.17g} {ys[ia[1]]:.17g} value {image_a.values[ia]:.17g}")
    print(f"argmax B: {xs[ib[0]]:.17g} {ys[ib[1]]:.17g} value {image_b.values[ib]:.17g}")
    return 0


def _cmd_peaks(args) -> int:
    image = read_image(args.image)
    peaks = extract_peaks(image, args.threshold, args.min_separation)
    if args.out:
        write_peaks(peaks, args.out)
        print(f"wrote {len(peaks)} peaks to {args.out}")
    else:
        for p in peaks:
            print(f"{p.x:.17g} {p.y:.17g} {p.value:.17g}")
    return 0


def _cmd_predict(args) -> int:
    scene, freq = _resolve_scene(args)
    for x, y in predict_peaks(scene, freq.omega, args.eta):
        print(f"{x:.17g} {y:.17g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="submig",
        description="Subspace-migration imaging of small scatterers from far-field data",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synthesize", help="assemble an MSR matrix and write it")
    _add_scene_args(synth)
    synth.add_argument("--n-directions", type=int, default=16)
    synth.add_argument("--snr-db", type=float, default=None,
                       help="add complex Gaussian noise at this SNR (omit for noiseless)")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=_cmd_synthesize)

    image = commands.add_parser("image", help="image an MSR file on a grid")
    image.add_argument("--msr", required=True, help="input MSR file")
    image.add_argument("--eta", type=float, required=True, help="test frequency")
    image.add_argument("--rank", type=int, default=None, help="fixed signal-space rank")
    image.add_argument("--rank-auto", type=float, default=None,
                       help="relative singular-value threshold for automatic rank")
    _add_grid_args(image)
    image.add_argument("--out", required=True)
    image.set_defaults(func=_cmd_image)

    analytic = commands.add_parser("analytic", help="closed-form image for a scene")
    _add_scene_args(analytic)
    analytic.add_argument("--eta", type=float, required=True, help="test frequency")
    _add_grid_args(analytic)
    analytic.add_argument("--out", required=True)
    analytic.set_defaults(func=_cmd_analytic)

    compare = commands.add_parser("compare", help="difference statistics of two images")
    compare.add_argument("image_a")
    compare.add_argument("image_b")
    compare.set_defaults(func=_cmd_compare)

    peaks = commands.add_parser("peaks", help="extract local maxima from an image")
    peaks.add_argument("image")
    peaks.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD_FRAC,
                       help="fraction of the global maximum")
    peaks.add_argument("--min-separation", type=float, default=DEFAULT_MIN_SEPARATION)
    peaks.add_argument("--out", default=None, help="peaks file (default: stdout)")
    peaks.set_defaults(func=_cmd_peaks)

    predict = commands.add_parser("predict", help="predicted peak locations for a scene")
    _add_scene_args(predict)
    predict.add_argument("--eta", type=float, required=True, help="test frequency")
    predict.set_defaults(func=_cmd_predict)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())
