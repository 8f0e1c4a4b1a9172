"""Max/Min-tree construction (union-find, quasi-linear) and tree utilities.

The Max-tree encodes the nested connected components of the upper level sets
{v : x(v) >= h}; the Min-tree dually encodes lower level sets. Nodes are
canonical: one node per plateau-merged component per level, so levels are
strictly monotone from child to parent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .image import (
    Connectivity,
    DomainError,
    GrayImage,
    check_connectivity,
    negate,
    neighbors,
)


class TreeKind(Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class ComponentTree:
    """Canonical component tree of a grayscale image.

    node_parent[root] == root. node_area counts the node's full component
    (itself plus all descendants). pixel_node maps each pixel to the smallest
    node containing it.
    """

    kind: TreeKind
    node_parent: np.ndarray
    node_level: np.ndarray
    node_area: np.ndarray
    pixel_node: np.ndarray
    root: int
    level_bounds: tuple[int, int]
    dims: tuple[int, int, int]

    @property
    def num_nodes(self) -> int:
        return len(self.node_parent)

    def children_counts(self) -> np.ndarray:
        """Number of children per node id."""
        counts = np.zeros(self.num_nodes, dtype=np.int64)
        nonroot = np.arange(self.num_nodes) != self.root
        np.add.at(counts, self.node_parent[nonroot], 1)
        return counts


@njit(cache=True)
def _counting_sort_desc(vals, num_levels):
    """Pixel order: level descending, linear index ascending within a level."""
    n = vals.size
    counts = np.zeros(num_levels, dtype=np.int64)
    for p in range(n):
        counts[vals[p]] += 1
    starts = np.empty(num_levels, dtype=np.int64)
    acc = 0
    for lev in range(num_levels - 1, -1, -1):
        starts[lev] = acc
        acc += counts[lev]
    order = np.empty(n, dtype=np.int32)
    for p in range(n):
        lev = vals[p]
        order[starts[lev]] = p
        starts[lev] += 1
    return order


@njit(cache=True)
def _union_pass(order, vals, w, h, d, deltas):
    # rank-balanced union-find (zpar) kept separate from the tree structure;
    # rep maps each set's union-find root to its latest-processed pixel,
    # which is where the next merge must attach in the tree
    n = order.size
    parent = np.empty(n, dtype=np.int32)
    zpar = np.empty(n, dtype=np.int32)
    rank = np.zeros(n, dtype=np.int8)
    rep = np.empty(n, dtype=np.int32)
    for p in range(n):  # sequential prefill keeps the hot loop write-light
        parent[p] = p
        zpar[p] = p
        rep[p] = p
    wh = w * h
    nd = deltas.shape[0]
    lin = np.empty(nd, dtype=np.int64)
    for k in range(nd):
        lin[k] = deltas[k, 0] + w * (deltas[k, 1] + h * deltas[k, 2])
    for i in range(n):
        p = order[i]
        lp = vals[p]
        rp = p
        x = p % w
        y = (p // w) % h
        z = p // wh
        interior = (0 < x < w - 1 and 0 < y < h - 1
                    and (d == 1 and deltas[0, 2] == 0 or 0 < z < d - 1))
        for k in range(nd):
            if interior:
                q = p + lin[k]
            else:
                nx = x + deltas[k, 0]
                ny = y + deltas[k, 1]
                nz = z + deltas[k, 2]
                if nx < 0 or nx >= w or ny < 0 or ny >= h or nz < 0 or nz >= d:
                    continue
                q = nx + w * (ny + h * nz)
            # q is processed iff its level is higher, or equal with a smaller
            # index (equal-level pixels are ordered by ascending index)
            lq = vals[q]
            if lq < lp or (lq == lp and q > p):
                continue  # not processed yet
            # find with path halving
            r = q
            while zpar[r] != r:
                zpar[r] = zpar[zpar[r]]
                r = zpar[r]
            if r != rp:
                parent[rep[r]] = p
                # union by rank; the merged set's attachment point is p
                if rank[r] < rank[rp]:
                    zpar[r] = rp
                elif rank[r] > rank[rp]:
                    zpar[rp] = r
                    rp = r
                else:
                    zpar[r] = rp
                    rank[rp] += 1
                rep[rp] = p
    return parent


@njit(cache=True)
def _canonicalize(order, vals, parent):
    # root-first traversal = reverse of union processing order
    for i in range(order.size - 1, -1, -1):
        p = order[i]
        q = parent[p]
        if vals[q] == vals[parent[q]]:
            parent[p] = parent[q]


@njit(cache=True)
def _extract_nodes(vals, parent):
    n = parent.size
    # canonical element of each pixel's node
    canon = np.empty(n, dtype=np.int32)
    for p in range(n):
        q = parent[p]
        if p == q or vals[q] != vals[p]:
            canon[p] = p
        else:
            canon[p] = q
    # node ids ordered by each node's smallest pixel index
    nid = np.full(n, -1, dtype=np.int32)
    count = 0
    for p in range(n):
        c = canon[p]
        if nid[c] < 0:
            nid[c] = count
            count += 1
    pixel_node = np.empty(n, dtype=np.int32)
    for p in range(n):
        pixel_node[p] = nid[canon[p]]
    node_parent = np.empty(count, dtype=np.int32)
    node_level = np.empty(count, dtype=np.int32)
    root = 0
    for p in range(n):
        c = canon[p]
        if c == p:
            node_parent[nid[c]] = nid[canon[parent[c]]]
            node_level[nid[c]] = vals[c]
            if parent[c] == c:
                root = nid[c]
    return pixel_node, node_parent, node_level, root


@njit(cache=True)
def _nodes_by_level(node_level, descending):
    """Node ids sorted by level (counting sort; levels fit in 17 bits)."""
    lo = node_level.min()
    span = node_level.max() - lo + 1
    counts = np.zeros(span, dtype=np.int64)
    for i in range(node_level.size):
        counts[node_level[i] - lo] += 1
    starts = np.empty(span, dtype=np.int64)
    acc = 0
    if descending:
        for lev in range(span - 1, -1, -1):
            starts[lev] = acc
            acc += counts[lev]
    else:
        for lev in range(span):
            starts[lev] = acc
            acc += counts[lev]
    order = np.empty(node_level.size, dtype=np.int64)
    for i in range(node_level.size):
        lev = node_level[i] - lo
        order[starts[lev]] = i
        starts[lev] += 1
    return order


@njit(cache=True)
def _sum_up(order, node_parent, root, areas):
    for i in range(order.size):
        node = order[i]
        if node != root:
            areas[node_parent[node]] += areas[node]


def _accumulate_areas(node_parent, node_level, root, pixel_node, descending):
    areas = np.bincount(pixel_node, minlength=len(node_parent)).astype(np.int64)
    # children before parents: levels are strictly monotone toward the root
    order = _nodes_by_level(np.asarray(node_level, dtype=np.int64), descending)
    _sum_up(order, node_parent.astype(np.int64), root, areas)
    return areas


def build_max_tree(image: GrayImage, conn: Connectivity | None = None) -> ComponentTree:
    """Union-find Max-tree build: counting-sort by level descending, union with
    processed neighbors, canonicalize. Deterministic: equal levels are
    processed in ascending linear index."""
    from .image import default_connectivity

    conn = conn or default_connectivity(image)
    check_connectivity(image, conn)
    if image.num_pixels == 0:
        raise DomainError("cannot build a tree of an empty image")
    vals = image.values
    order = _counting_sort_desc(vals, image.max_level + 1)
    w, h, d = image.dims
    parent = _union_pass(order, vals, w, h, d, conn.offsets())
    _canonicalize(order, vals, parent)
    pixel_node, node_parent, node_level, root = _extract_nodes(vals, parent)
    node_area = _accumulate_areas(node_parent, node_level, root, pixel_node,
                                  descending=True)
    lo, hi = int(vals.min()), int(vals.max())
    return ComponentTree(TreeKind.MAX, node_parent, node_level.astype(np.int64),
                         node_area, pixel_node, int(root), (lo, hi), image.dims)


def build_min_tree(image: GrayImage, conn: Connectivity | None = None) -> ComponentTree:
    """Min-tree via negation: Max-tree of the complement with levels mapped back."""
    t = build_max_tree(negate(image), conn)
    lo, hi = int(image.values.min()), int(image.values.max())
    return ComponentTree(TreeKind.MIN, t.node_parent,
                         image.max_level - t.node_level,
                         t.node_area, t.pixel_node, t.root, (lo, hi), image.dims)


def oracle_tree(image: GrayImage, kind: TreeKind,
                conn: Connectivity | None = None) -> ComponentTree:
    """Brute-force reference builder: threshold at every occurring level,
    flood-fill components, link by set inclusion. Small inputs only."""
    from .image import default_connectivity

    conn = conn or default_connectivity(image)
    check_connectivity(image, conn)
    if image.num_pixels == 0:
        raise DomainError("cannot build a tree of an empty image")
    vals = image.values.astype(np.int64)
    n = image.num_pixels
    occurring = sorted(set(int(v) for v in vals),
                       reverse=(kind is TreeKind.MAX))

    adjacency = [neighbors(image, p, conn) for p in range(n)]

    node_level: list[int] = []
    node_parent: list[int] = []
    proper: list[list[int]] = []  # pixels at exactly the node's level
    # pixel -> id of the node whose component currently contains it (roots of forest)
    current: dict[int, int] = {}

    for h in occurring:
        if kind is TreeKind.MAX:
            in_set = vals >= h
        else:
            in_set = vals <= h
        seen = np.zeros(n, dtype=bool)
        for start in range(n):
            if not in_set[start] or seen[start]:
                continue
            comp = []
            seen[start] = True
            queue = deque([start])
            while queue:
                p = queue.popleft()
                comp.append(p)
                for q in adjacency[p]:
                    if in_set[q] and not seen[q]:
                        seen[q] = True
                        queue.append(q)
            at_level = [p for p in comp if vals[p] == h]
            if not at_level:
                continue  # component coincides with an earlier-level node
            node_id = len(node_level)
            node_level.append(h)
            node_parent.append(node_id)
            proper.append(at_level)
            child_ids = {current[p] for p in comp if p in current}
            for cid in child_ids:
                node_parent[cid] = node_id
            for p in comp:
                current[p] = node_id

    pixel_node_raw = np.empty(n, dtype=np.int64)
    for nid, pix in enumerate(proper):
        for p in pix:
            pixel_node_raw[p] = nid
    # renumber so node ids follow each node's smallest proper pixel
    remap = np.full(len(node_level), -1, dtype=np.int64)
    count = 0
    for p in range(n):
        nid = pixel_node_raw[p]
        if remap[nid] < 0:
            remap[nid] = count
            count += 1
    num = len(node_level)
    new_parent = np.empty(num, dtype=np.int64)
    new_level = np.empty(num, dtype=np.int64)
    for old in range(num):
        new_parent[remap[old]] = remap[node_parent[old]]
        new_level[remap[old]] = node_level[old]
    pixel_node = remap[pixel_node_raw]
    root = int(remap[num - 1])  # last node created covers the whole domain

    node_area = _accumulate_areas(new_parent, new_level, root, pixel_node,
                                  descending=(kind is TreeKind.MAX))
    lo, hi = int(vals.min()), int(vals.max())
    return ComponentTree(kind, new_parent, new_level, node_area, pixel_node,
                         root, (lo, hi), image.dims)


def tree_isomorphic(a: ComponentTree, b: ComponentTree,
                    compare_levels: bool = True) -> bool:
    """True iff a node bijection preserves parenthood and the pixel partition
    (and levels, when compare_levels)."""
    if len(a.pixel_node) != len(b.pixel_node):
        return False
    if a.dims != b.dims:
        raise DomainError(f"dims mismatch: {a.dims} vs {b.dims}")
    if a.num_nodes != b.num_nodes:
        return False
    # every canonical node has >= 1 proper pixel, so the smallest proper pixel
    # identifies nodes; the partition forces any bijection to match on it
    min_pix_a = _min_proper_pixel(a)
    min_pix_b = _min_proper_pixel(b)
    if not np.array_equal(min_pix_a[a.pixel_node], min_pix_b[b.pixel_node]):
        return False
    # parenthood under the pixel-set naming
    a_by_pix = {int(min_pix_a[i]): i for i in range(a.num_nodes)}
    b_by_pix = {int(min_pix_b[i]): i for i in range(b.num_nodes)}
    if set(a_by_pix) != set(b_by_pix):
        return False
    for pix, ia in a_by_pix.items():
        ib = b_by_pix[pix]
        if int(min_pix_a[a.node_parent[ia]]) != int(min_pix_b[b.node_parent[ib]]):
            return False
        if compare_levels and int(a.node_level[ia]) != int(b.node_level[ib]):
            return False
    return True


def _min_proper_pixel(tree: ComponentTree) -> np.ndarray:
    out = np.full(tree.num_nodes, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(out, tree.pixel_node, np.arange(len(tree.pixel_node)))
    return out


def leaf_count(tree: ComponentTree) -> int:
    """Number of childless nodes; 1 for a single-node tree."""
    return int(np.count_nonzero(tree.children_counts() == 0))
