"""Report rendering: delimited tree statistics plus matplotlib figures."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .contrast import MonotoneTransform
from .image import Connectivity, GrayImage
from .metrics import tree_stats
from .tree import TreeKind, build_max_tree, build_min_tree


def _stats_row(name: str, image: GrayImage, conn: Connectivity | None) -> dict:
    rows = {}
    for kind, build in (("max", build_max_tree), ("min", build_min_tree)):
        s = tree_stats(build(image, conn))
        rows[kind] = s
    return {
        "image": name,
        "max_nodes": rows["max"].node_count,
        "max_leaves": rows["max"].leaf_count,
        "max_depth": rows["max"].max_depth,
        "min_nodes": rows["min"].node_count,
        "min_leaves": rows["min"].leaf_count,
        "min_depth": rows["min"].max_depth,
    }


def write_stats_csv(path: Path, named_images: list[tuple[str, GrayImage]],
                    conn: Connectivity | None) -> None:
    rows = [_stats_row(name, img, conn) for name, img in named_images]
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _panel_data(image: GrayImage):
    arr = image.to_array()
    if image.is_3d:
        arr = arr[arr.shape[0] // 2]  # middle slice
    return arr


def render_views_figure(path: Path, named_images: list[tuple[str, GrayImage]]) -> None:
    fig, axes = plt.subplots(1, len(named_images),
                             figsize=(4 * len(named_images), 4))
    if len(named_images) == 1:
        axes = [axes]
    vmax = named_images[0][1].max_level
    for ax, (name, img) in zip(axes, named_images):
        ax.imshow(_panel_data(img), cmap="gray", vmin=0, vmax=vmax,
                  interpolation="nearest")
        ax.set_title(name)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_transforms_figure(path: Path,
                             transforms: list[MonotoneTransform]) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    for tr in transforms:
        ax.plot(tr.lut, label=tr.descriptor)
    ax.set_xlabel("input level")
    ax.set_ylabel("output level")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_leaf_histogram(path: Path, named_images: list[tuple[str, GrayImage]],
                          conn: Connectivity | None) -> None:
    names, max_leaves, min_leaves = [], [], []
    for name, img in named_images:
        names.append(name)
        max_leaves.append(tree_stats(build_max_tree(img, conn)).leaf_count)
        min_leaves.append(tree_stats(build_min_tree(img, conn)).leaf_count)
    x = range(len(names))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([i - 0.2 for i in x], max_leaves, width=0.4, label="max-tree leaves")
    ax.bar([i + 0.2 for i in x], min_leaves, width=0.4, label="min-tree leaves")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names)
    ax.set_ylabel("leaf count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
