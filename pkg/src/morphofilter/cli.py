"""Batch command line front end.

Images are recognized by extension: ``.pgm`` for 2D, anything else is treated
as a raw volume whose JSON sidecar sits next to it with a ``.json`` suffix.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .contrast import parse_descriptor, sample_transform
from .filters import dsaif_pair, structure_aware_filter
from .image import ConfigurationError, Connectivity, DomainError, GrayImage
from .io import ParseError, export_dot, read_pgm, read_volume, write_pgm, write_volume
from .metrics import LabelMap, error_diversity, tree_stats
from .tree import TreeKind, build_max_tree, build_min_tree

DEFAULT_TAU_2D = 50
DEFAULT_TAU_3D = 100

_CONN_BY_FLAG = {"4": Connectivity.C4, "8": Connectivity.C8,
                 "6": Connectivity.C6, "26": Connectivity.C26}


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def read_image(path: Path) -> GrayImage:
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    return read_volume(path, _sidecar(path))


def write_image(image: GrayImage, path: Path) -> None:
    if path.suffix.lower() == ".pgm":
        write_pgm(image, path)
    else:
        write_volume(image, path, _sidecar(path))


def _default_tau(image: GrayImage) -> int:
    return DEFAULT_TAU_3D if image.is_3d else DEFAULT_TAU_2D


def _resolve_conn(flag: str | None) -> Connectivity | None:
    return _CONN_BY_FLAG[flag] if flag else None


def worker_count() -> int:
    env = os.environ.get("MORPHOFILTER_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=int, default=None,
                        help="area threshold; default 50 for 2D, 100 for 3D")
    parser.add_argument("--connectivity", choices=sorted(_CONN_BY_FLAG),
                        default=None,
                        help="4/8 for 2D, 6/26 for 3D; default 4 or 6")


def _add_pair_options(parser: argparse.ArgumentParser) -> None:
    _add_common(parser)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--assign", choices=["random", "fixed"], default="random")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--gamma-range", action="store_true",
                       help="sample both transforms as gammas in [0.5, 1.5]")
    group.add_argument("--bezier-set", action="store_true",
                       help="sample both transforms as Bezier z in {0, 0.5, 0.75}")
    parser.add_argument("--transform-a", default="identity",
                        help="gamma:G | bezier:Z | identity (USAIF view)")
    parser.add_argument("--transform-b", default="identity",
                        help="gamma:G | bezier:Z | identity (LSAIF view)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphofilter",
        description="Component-tree structure-aware image filtering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="apply USAIF or LSAIF to one image")
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--kind", choices=["usaif", "lsaif"], required=True)
    p.add_argument("--transform", default="identity")
    _add_common(p)

    p = sub.add_parser("pair", help="emit both dual filtered views")
    p.add_argument("input", type=Path)
    p.add_argument("--out-a", type=Path, required=True)
    p.add_argument("--out-b", type=Path, required=True)
    _add_pair_options(p)

    p = sub.add_parser("tree", help="inspect the component tree")
    p.add_argument("input", type=Path)
    p.add_argument("--kind", choices=["max", "min"], default="max")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--dot", action="store_true", help="print DOT to stdout")
    mode.add_argument("--stats", action="store_true", help="print JSON stats")
    p.add_argument("--connectivity", choices=sorted(_CONN_BY_FLAG), default=None)

    p = sub.add_parser("metrics-de", help="error-diversity Dice of two predictions")
    p.add_argument("--pred1", type=Path, required=True)
    p.add_argument("--pred2", type=Path, required=True)
    p.add_argument("--gt", type=Path, required=True)

    p = sub.add_parser("batch", help="run pair over every image in a directory")
    p.add_argument("indir", type=Path)
    p.add_argument("outdir", type=Path)
    _add_pair_options(p)

    p = sub.add_parser("report", help="render figures + CSV stats for one image")
    p.add_argument("input", type=Path)
    p.add_argument("outdir", type=Path)
    p.add_argument("--transform-a", default="identity")
    p.add_argument("--transform-b", default="identity")
    _add_common(p)

    return parser


def _pair_transforms(args, bit_depth: int):
    if args.gamma_range or args.bezier_set:
        if args.seed is None:
            raise ConfigurationError("--seed is required with --gamma-range/--bezier-set")
        policy = "gamma-range" if args.gamma_range else "bezier-set"
        rng = random.Random(args.seed)
        ta = sample_transform(rng.getrandbits(32), policy, bit_depth)
        tb = sample_transform(rng.getrandbits(32), policy, bit_depth)
        return ta, tb
    return (parse_descriptor(args.transform_a, bit_depth),
            parse_descriptor(args.transform_b, bit_depth))


def _run_pair_on(args, input_path: Path, out_a: Path, out_b: Path,
                 seed: int | None) -> None:
    image = read_image(input_path)
    if args.assign == "random" and seed is None:
        raise ConfigurationError("--seed is required with --assign random")
    ta, tb = _pair_transforms(args, image.bit_depth)
    tau = args.tau if args.tau is not None else _default_tau(image)
    result = dsaif_pair(image, tau, ta, tb, seed=seed,
                        assignment_mode=args.assign,
                        conn=_resolve_conn(args.connectivity))
    write_image(result.view_a, out_a)
    write_image(result.view_b, out_b)


def _cmd_filter(args) -> int:
    image = read_image(args.input)
    transform = parse_descriptor(args.transform, image.bit_depth)
    from .contrast import apply_transform

    tau = args.tau if args.tau is not None else _default_tau(image)
    kind = TreeKind.MAX if args.kind == "usaif" else TreeKind.MIN
    out = structure_aware_filter(apply_transform(image, transform), tau, kind,
                                 _resolve_conn(args.connectivity))
    write_image(out, args.output)
    return 0


def _cmd_pair(args) -> int:
    _run_pair_on(args, args.input, args.out_a, args.out_b, args.seed)
    return 0


def _cmd_tree(args) -> int:
    image = read_image(args.input)
    build = build_max_tree if args.kind == "max" else build_min_tree
    tree = build(image, _resolve_conn(args.connectivity))
    if args.dot:
        sys.stdout.write(export_dot(tree))
    else:
        print(json.dumps(tree_stats(tree).to_dict()))
    return 0


def _cmd_metrics_de(args) -> int:
    maps = []
    for path in (args.pred1, args.pred2, args.gt):
        img = read_image(path)
        maps.append(LabelMap(img.dims, img.values))
    print(json.dumps({"d_e": error_diversity(*maps)}))
    return 0


_IMAGE_EXTS = {".pgm", ".raw"}


def _batch_inputs(indir: Path) -> list[Path]:
    return sorted(p for p in indir.iterdir()
                  if p.is_file() and p.suffix.lower() in _IMAGE_EXTS)


def _file_seed(base_seed: int | None, name: str) -> int | None:
    if base_seed is None:
        return None
    return (base_seed + zlib.crc32(name.encode())) % (1 << 32)


def _batch_one(args, path: Path) -> str:
    outdir = args.outdir
    out_a = outdir / f"{path.stem}.usaif{path.suffix}"
    out_b = outdir / f"{path.stem}.lsaif{path.suffix}"
    seed = _file_seed(args.seed, path.name)
    local = argparse.Namespace(**vars(args))
    # fixed assignment keeps the usaif/lsaif naming truthful per file
    local.assign = "fixed"
    _run_pair_on(local, path, out_a, out_b, seed)
    return path.name


def _cmd_batch(args) -> int:
    inputs = _batch_inputs(args.indir)
    if not inputs:
        raise ConfigurationError(f"no .pgm/.raw inputs in {args.indir}")
    args.outdir.mkdir(parents=True, exist_ok=True)
    workers = min(worker_count(), len(inputs))
    if workers == 1:
        for path in inputs:
            _batch_one(args, path)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_batch_one, [args] * len(inputs), inputs))
    return 0


def _cmd_report(args) -> int:
    from . import report
    from .contrast import apply_transform

    image = read_image(args.input)
    conn = _resolve_conn(args.connectivity)
    tau = args.tau if args.tau is not None else _default_tau(image)
    ta = parse_descriptor(args.transform_a, image.bit_depth)
    tb = parse_descriptor(args.transform_b, image.bit_depth)
    up = structure_aware_filter(apply_transform(image, ta), tau, TreeKind.MAX, conn)
    low = structure_aware_filter(apply_transform(image, tb), tau, TreeKind.MIN, conn)
    named = [("original", image), ("usaif", up), ("lsaif", low)]

    args.outdir.mkdir(parents=True, exist_ok=True)
    report.write_stats_csv(args.outdir / "tree_stats.csv", named, conn)
    report.render_views_figure(args.outdir / "views.png", named)
    report.render_transforms_figure(args.outdir / "transforms.png", [ta, tb])
    report.render_leaf_histogram(args.outdir / "leaf_counts.png", named, conn)
    return 0


_COMMANDS = {
    "filter": _cmd_filter,
    "pair": _cmd_pair,
    "tree": _cmd_tree,
    "metrics-de": _cmd_metrics_de,
    "batch": _cmd_batch,
    "report": _cmd_report,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, OSError) as exc:
        print(f"morphofilter: error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, DomainError, ValueError) as exc:
        print(f"morphofilter: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
