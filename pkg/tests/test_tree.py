import numpy as np
import pytest

from morphofilter import (
    Connectivity,
    DomainError,
    GrayImage,
    TreeKind,
    build_max_tree,
    build_min_tree,
    leaf_count,
    negate,
    oracle_tree,
    tree_isomorphic,
)
from conftest import (
    count_regional_extrema,
    default_conn,
    line_image,
    random_image,
)


def node_pixels(tree):
    """node id -> sorted proper pixels, for hand-checking small trees."""
    out = {i: [] for i in range(tree.num_nodes)}
    for p, n in enumerate(tree.pixel_node):
        out[int(n)].append(p)
    return out


class TestMaxTreeExamples:
    def test_two_peaks(self):
        t = build_max_tree(line_image([0, 1, 0, 2, 0]))
        assert t.num_nodes == 3
        root = t.root
        assert t.node_level[root] == 0 and t.node_area[root] == 5
        children = [i for i in range(3) if i != root and t.node_parent[i] == root]
        assert len(children) == 2
        by_level = {int(t.node_level[c]): c for c in children}
        pixels = node_pixels(t)
        assert pixels[by_level[1]] == [1] and t.node_area[by_level[1]] == 1
        assert pixels[by_level[2]] == [3] and t.node_area[by_level[2]] == 1

    def test_constant_image(self):
        t = build_max_tree(GrayImage((3, 3, 1), [7] * 9))
        assert t.num_nodes == 1
        assert t.node_level[t.root] == 7 and t.node_area[t.root] == 9

    def test_ramp_chain(self):
        t = build_max_tree(line_image([0, 1, 2]))
        assert t.num_nodes == 3
        order = sorted(range(3), key=lambda i: int(t.node_level[i]))
        assert [int(t.node_level[i]) for i in order] == [0, 1, 2]
        assert [int(t.node_area[i]) for i in order] == [3, 2, 1]
        assert t.node_parent[order[1]] == order[0]
        assert t.node_parent[order[2]] == order[1]
        assert order[0] == t.root

    def test_empty_image_rejected(self):
        with pytest.raises((DomainError, ValueError)):
            GrayImage((0, 0, 0), [])


class TestMinTreeExamples:
    def test_two_valleys_structure(self):
        t = build_min_tree(line_image([0, 1, 0, 2, 0]))
        assert t.num_nodes == 5
        assert t.node_level[t.root] == 2 and t.node_area[t.root] == 5
        pixels = node_pixels(t)
        root_children = {i for i in range(5)
                         if i != t.root and t.node_parent[i] == t.root}
        assert len(root_children) == 2
        merged = next(c for c in root_children if t.node_level[c] == 1)
        lone = next(c for c in root_children if t.node_level[c] == 0)
        assert pixels[lone] == [4]
        assert t.node_area[merged] == 3
        leaves_of_merged = [i for i in range(5) if t.node_parent[i] == merged]
        assert sorted(pixels[l][0] for l in leaves_of_merged) == [0, 2]

    def test_constant(self):
        assert build_min_tree(GrayImage((2, 2, 1), [5] * 4)).num_nodes == 1

    def test_valley_chain(self):
        t = build_min_tree(line_image([2, 1, 0, 1, 2]))
        assert t.num_nodes == 3
        pixels = node_pixels(t)
        by_level = {int(t.node_level[i]): i for i in range(3)}
        assert t.root == by_level[2]
        assert pixels[by_level[0]] == [2]
        assert sorted(pixels[by_level[1]]) == [1, 3]
        assert t.node_area[by_level[1]] == 3


class TestOracle:
    def test_matches_builder_on_spec_inputs(self):
        for values in ([0, 1, 0, 2, 0], [0, 1, 2], [7, 7, 7]):
            img = line_image(values)
            assert tree_isomorphic(build_max_tree(img),
                                   oracle_tree(img, TreeKind.MAX))
            assert tree_isomorphic(build_min_tree(img),
                                   oracle_tree(img, TreeKind.MIN))

    def test_checkerboard(self):
        img = GrayImage((2, 2, 1), [0, 1, 1, 0])
        t = oracle_tree(img, TreeKind.MAX, Connectivity.C4)
        assert t.num_nodes == 3
        pixels = node_pixels(t)
        leaves = [i for i in range(3) if i != t.root]
        assert sorted(pixels[l][0] for l in leaves) == [1, 2]
        assert all(t.node_level[l] == 1 for l in leaves)

    def test_single_pixel(self):
        t = oracle_tree(GrayImage((1, 1, 1), [5]), TreeKind.MAX)
        assert t.num_nodes == 1 and t.node_level[t.root] == 5


class TestIsomorphism:
    def test_identity(self):
        t = build_max_tree(line_image([0, 1, 0, 2, 0]))
        assert tree_isomorphic(t, t)

    def test_levels_ignored(self):
        a = build_max_tree(line_image([0, 1, 0, 2, 0]))
        b = build_max_tree(line_image([0, 10, 0, 20, 0]))
        assert tree_isomorphic(a, b, compare_levels=False)
        assert not tree_isomorphic(a, b, compare_levels=True)

    def test_different_pixel_counts(self):
        a = build_max_tree(line_image([0, 1, 0, 2, 0]))
        b = build_max_tree(line_image([0, 1, 2]))
        assert not tree_isomorphic(a, b)

    def test_dims_mismatch_same_count(self):
        a = build_max_tree(GrayImage((4, 1, 1), [0, 1, 2, 3]))
        b = build_max_tree(GrayImage((2, 2, 1), [0, 1, 2, 3]))
        with pytest.raises(DomainError):
            tree_isomorphic(a, b)


class TestLeafCount:
    def test_examples(self):
        img = line_image([0, 1, 0, 2, 0])
        assert leaf_count(build_max_tree(img)) == 2
        assert leaf_count(build_min_tree(img)) == 3
        assert leaf_count(build_max_tree(GrayImage((2, 2, 1), [3] * 4))) == 1

    def test_agrees_with_regional_extrema(self):
        rng = np.random.default_rng(42)
        for trial in range(30):
            img = random_image(rng, max_side=8, three_d=(trial % 4 == 3))
            conn = default_conn(img)
            assert leaf_count(build_max_tree(img, conn)) == \
                count_regional_extrema(img, conn, maxima=True)
            assert leaf_count(build_min_tree(img, conn)) == \
                count_regional_extrema(img, conn, maxima=False)


class TestProperties:
    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(7)
        for trial in range(60):
            img = random_image(rng, max_side=8, three_d=(trial % 3 == 2))
            conn = default_conn(img)
            assert tree_isomorphic(build_max_tree(img, conn),
                                   oracle_tree(img, TreeKind.MAX, conn))
            assert tree_isomorphic(build_min_tree(img, conn),
                                   oracle_tree(img, TreeKind.MIN, conn))

    def test_duality(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            img = random_image(rng, max_side=8)
            mn = build_min_tree(img)
            mx_neg = build_max_tree(negate(img))
            assert tree_isomorphic(mn, mx_neg, compare_levels=False)
            assert np.array_equal(img.max_level - mn.node_level,
                                  mx_neg.node_level)

    def test_contrast_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            img = random_image(rng, max_side=8)
            lut = strictly_increasing_lut(rng, img)
            mapped = GrayImage(img.dims, lut[img.values], img.bit_depth)
            assert tree_isomorphic(build_max_tree(img), build_max_tree(mapped),
                                   compare_levels=False)

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(17)
        for trial in range(25):
            img = random_image(rng, max_side=8, three_d=(trial % 4 == 0))
            for build in (build_max_tree, build_min_tree):
                t = build(img)
                assert np.array_equal(
                    np.asarray(t.node_level)[t.pixel_node],
                    img.values.astype(np.int64))

    def test_parent_level_monotonicity_and_areas(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            img = random_image(rng, max_side=8)
            for build, sign in ((build_max_tree, -1), (build_min_tree, 1)):
                t = build(img)
                for node in range(t.num_nodes):
                    parent = int(t.node_parent[node])
                    if node == t.root:
                        assert parent == node
                    else:
                        diff = int(t.node_level[parent]) - int(t.node_level[node])
                        assert sign * diff > 0
                assert t.node_area[t.root] == img.num_pixels
                counts = t.children_counts()
                for node in range(t.num_nodes):
                    kids = [i for i in range(t.num_nodes)
                            if i != t.root and t.node_parent[i] == node]
                    assert counts[node] == len(kids)
                    assert t.node_area[node] >= sum(int(t.node_area[k]) for k in kids)

    def test_determinism(self):
        rng = np.random.default_rng(23)
        img = random_image(rng, max_side=12)
        a, b = build_max_tree(img), build_max_tree(img)
        for field in ("node_parent", "node_level", "node_area", "pixel_node"):
            assert np.array_equal(getattr(a, field), getattr(b, field))
        assert a.root == b.root


def strictly_increasing_lut(rng, img):
    """Random LUT strictly increasing on the image's occurring levels."""
    L = img.max_level
    occurring = [int(v) for v in np.unique(img.values)]
    targets = np.sort(rng.choice(L + 1, size=len(occurring), replace=False))
    assigned = dict(zip(occurring, (int(t) for t in targets)))
    lut = np.zeros(L + 1, dtype=np.int64)
    running = 0
    for i in range(L + 1):
        running = assigned.get(i, running)
        lut[i] = running
    return lut
