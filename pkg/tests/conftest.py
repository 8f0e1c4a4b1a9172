import numpy as np
import pytest

from morphofilter import Connectivity, GrayImage


def line_image(values, bit_depth=8):
    """1xN test image."""
    return GrayImage((len(values), 1, 1), values, bit_depth)


def random_image(rng, max_side=16, max_level=7, three_d=False, bit_depth=8):
    if three_d:
        dims = (int(rng.integers(1, 5)), int(rng.integers(1, 5)),
                int(rng.integers(2, 5)))
    else:
        dims = (int(rng.integers(1, max_side + 1)),
                int(rng.integers(1, max_side + 1)), 1)
    n = dims[0] * dims[1] * dims[2]
    return GrayImage(dims, rng.integers(0, max_level + 1, size=n), bit_depth)


def default_conn(image):
    return Connectivity.C6 if image.is_3d else Connectivity.C4


def neighbor_pairs(image, conn):
    """All ordered neighboring linear-index pairs (p, q), vectorized."""
    w, h, d = image.dims
    idx = np.arange(image.num_pixels).reshape(d, h, w)
    pairs = []
    for dx, dy, dz in conn.offsets():
        src = idx[max(0, -dz):d - max(0, dz),
                  max(0, -dy):h - max(0, dy),
                  max(0, -dx):w - max(0, dx)]
        dst = idx[max(0, dz):d - max(0, -dz),
                  max(0, dy):h - max(0, -dy),
                  max(0, dx):w - max(0, -dx)]
        pairs.append(np.stack([src.reshape(-1), dst.reshape(-1)], axis=1))
    return np.concatenate(pairs, axis=0)


def count_regional_extrema(image, conn, maxima=True):
    """Plateau flood fill count of regional maxima/minima, independent of the
    tree machinery."""
    from collections import deque

    from morphofilter import neighbors

    vals = image.values.astype(np.int64)
    n = image.num_pixels
    seen = np.zeros(n, dtype=bool)
    count = 0
    for start in range(n):
        if seen[start]:
            continue
        level = vals[start]
        plateau = [start]
        seen[start] = True
        queue = deque([start])
        is_extremum = True
        while queue:
            p = queue.popleft()
            for q in neighbors(image, p, conn):
                if vals[q] == level:
                    if not seen[q]:
                        seen[q] = True
                        plateau.append(q)
                        queue.append(q)
                elif (vals[q] > level) if maxima else (vals[q] < level):
                    is_extremum = False
        if is_extremum:
            count += 1
    return count


@pytest.fixture(scope="session", autouse=True)
def warm_numba():
    """Compile the jitted kernels once so timing-sensitive tests are clean."""
    from morphofilter import TreeKind, build_max_tree, build_min_tree

    img = GrayImage((4, 4, 2), np.arange(32) % 5)
    build_max_tree(img, Connectivity.C6)
    build_min_tree(img, Connectivity.C6)
    from morphofilter import mark_removals, reconstruct

    t = build_max_tree(img, Connectivity.C6)
    reconstruct(t, mark_removals(t, 0))
