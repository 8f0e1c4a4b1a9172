"""Structure-aware connected filters on component trees.

The area pass drops nodes whose component is no bigger than tau; the sibling
pass drops nodes that are their parent's only surviving child (topologically
equivalent to the parent). Reconstruction climbs each pixel to its nearest
kept ancestor. USAIF runs this on the Max-tree, LSAIF on the Min-tree; the
pair of both is the dual-view generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from numba import njit

from .contrast import MonotoneTransform, apply_transform
from .image import Connectivity, GrayImage
from .tree import ComponentTree, TreeKind, build_max_tree, build_min_tree


@dataclass(frozen=True)
class RemovalMask:
    """Per-node removal flags plus the surviving-child counts that drove them."""

    removed: np.ndarray
    surviving_children: np.ndarray

    def __post_init__(self):
        if len(self.removed) != len(self.surviving_children):
            raise ValueError("removed / surviving_children length mismatch")


def mark_removals(tree: ComponentTree, tau: int) -> RemovalMask:
    """Two-pass removal marking.

    Pass 1: every non-root node with area <= tau is removed; every non-root
    node with area > tau increments its parent's surviving-child count.
    Pass 2: every non-root node whose original parent has exactly one
    surviving child is removed (the parent's own removal is irrelevant).
    The root is exempt from both passes.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    n = tree.num_nodes
    removed = np.zeros(n, dtype=bool)
    surviving = np.zeros(n, dtype=np.int64)
    nonroot = np.arange(n) != tree.root

    small = tree.node_area <= tau
    removed[nonroot & small] = True
    np.add.at(surviving, tree.node_parent[nonroot & ~small], 1)

    only_child = surviving[tree.node_parent] == 1
    removed[nonroot & only_child] = True
    return RemovalMask(removed, surviving)


@njit(cache=True)
def _resolve_kept_levels(order, removed, node_parent, kept_level):
    for i in range(order.size):
        node = order[i]
        if removed[node]:
            kept_level[node] = kept_level[node_parent[node]]


def reconstruct(tree: ComponentTree, mask: RemovalMask) -> GrayImage:
    """Image whose pixels take the level of their nearest non-removed ancestor."""
    if len(mask.removed) != tree.num_nodes:
        raise ValueError("mask length does not match tree node count")
    # resolve kept-ancestor levels root-first; level order is topological
    descending = tree.kind is TreeKind.MAX
    order = np.argsort(tree.node_level if descending else -tree.node_level,
                       kind="stable")
    kept_level = tree.node_level.astype(np.int64)
    _resolve_kept_levels(order.astype(np.int64), mask.removed,
                         tree.node_parent.astype(np.int64), kept_level)
    values = kept_level[tree.pixel_node]
    bit_depth = 8 if tree.level_bounds[1] <= 255 else 16
    return GrayImage(tree.dims, values, bit_depth)


def structure_aware_filter(image: GrayImage, tau: int, kind: TreeKind,
                           conn: Connectivity | None = None) -> GrayImage:
    """USAIF (Max kind, output <= input) or LSAIF (Min kind, output >= input)."""
    build = build_max_tree if kind is TreeKind.MAX else build_min_tree
    tree = build(image, conn)
    out = reconstruct(tree, mark_removals(tree, tau))
    return GrayImage(image.dims, out.values, image.bit_depth)


def usaif(image: GrayImage, tau: int,
          conn: Connectivity | None = None) -> GrayImage:
    return structure_aware_filter(image, tau, TreeKind.MAX, conn)


def lsaif(image: GrayImage, tau: int,
          conn: Connectivity | None = None) -> GrayImage:
    return structure_aware_filter(image, tau, TreeKind.MIN, conn)


@dataclass(frozen=True)
class DsaifPair:
    """Two filtered views of one image: one USAIF-derived, one LSAIF-derived."""

    view_a: GrayImage
    view_b: GrayImage
    assignment: str  # "a=usaif" or "b=usaif"
    seed: int | None


def dsaif_pair(image: GrayImage, tau: int,
               transform_a: MonotoneTransform, transform_b: MonotoneTransform,
               seed: int | None = None, assignment_mode: str = "random",
               conn: Connectivity | None = None) -> DsaifPair:
    """Generate the dual filtered views.

    transform_a always feeds the USAIF view and transform_b the LSAIF view;
    the assignment mode only decides which slot (view_a / view_b) receives
    which. "fixed" pins USAIF to view_a; "random" flips a seeded fair coin.
    """
    if assignment_mode not in ("random", "fixed"):
        raise ValueError(f"assignment_mode must be random or fixed, got {assignment_mode!r}")
    if assignment_mode == "random" and seed is None:
        raise ValueError("random assignment requires a seed")
    up = structure_aware_filter(apply_transform(image, transform_a), tau,
                                TreeKind.MAX, conn)
    low = structure_aware_filter(apply_transform(image, transform_b), tau,
                                 TreeKind.MIN, conn)
    a_gets_usaif = True
    if assignment_mode == "random":
        a_gets_usaif = random.Random(seed).random() < 0.5
    if a_gets_usaif:
        return DsaifPair(up, low, "a=usaif", seed)
    return DsaifPair(low, up, "b=usaif", seed)
