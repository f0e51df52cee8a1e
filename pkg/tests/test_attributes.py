import unittest

import numpy as np

from scripts.attributes import (
    AREA,
    HEIGHT,
    VALUE_SUM,
    AttributeDef,
    area_opening,
    attribute_image,
    compute_attribute,
    direct_filter,
)
from scripts.builders import ALGORITHM_IDS, build_tree
from scripts.constants import SORT_SWITCH_BITS
from scripts.flooding import maxtree_nonrec
from scripts.image_core import random_image
from scripts.oracle import brute_area_opening, brute_peak_area
from scripts.tree_repr import InvalidTreeError, MaxTree
from scripts.union_find import maxtree_uf_levelcomp
from tests.utils import LINE_132, SQUARE_1243, fuzz_corpus, image


def corpus_builder(index, img):
    """Cycle through every builder across the corpus."""
    algo = ALGORITHM_IDS[index % len(ALGORITHM_IDS)]
    if algo == "salembier" and img.bit_depth >= SORT_SWITCH_BITS:
        return "nonrec"
    return algo


def square():
    img = image(SQUARE_1243)
    return img, maxtree_uf_levelcomp(img)


class TestComputeAttribute(unittest.TestCase):
    def test_area_of_chain(self):
        img, tree = square()
        area = compute_attribute(tree, img, AREA)
        self.assertEqual([area.at(p) for p in (2, 3, 1, 0)], [1, 2, 3, 4])

    def test_value_sum(self):
        img = image(LINE_132)
        tree = maxtree_nonrec(img)
        total = compute_attribute(tree, img, VALUE_SUM)
        self.assertEqual([total.at(p) for p in (0, 2, 1)], [6, 5, 3])

    def test_height(self):
        img, tree = square()
        height = compute_attribute(tree, img, HEIGHT)
        self.assertEqual([height.at(p) for p in (0, 1, 3, 2)], [3, 2, 1, 0])

    def test_min_level_folds_from_identity(self):
        img, tree = square()
        lowest = AttributeDef("min_level", lambda values: values.astype(np.int64), min, 2**32)
        result = compute_attribute(tree, img, lowest)
        self.assertEqual([result.at(p) for p in (0, 1, 3, 2)], [1, 2, 3, 4])

    def test_root_area_is_image_size(self):
        img = random_image(7, 6, 3, seed=4)
        tree = maxtree_uf_levelcomp(img)
        self.assertEqual(compute_attribute(tree, img).at(tree.root), img.n)

    def test_area_of_constant_image(self):
        img = image([[5, 5, 5], [5, 5, 5]])
        tree = maxtree_uf_levelcomp(img)
        self.assertEqual(compute_attribute(tree, img).at(tree.root), 6)

    def test_invalid_tree_rejected(self):
        img = image(SQUARE_1243)
        broken = MaxTree(parent=np.array([0, 0, 2, 1]), S=np.array([0, 1, 3, 2]))
        with self.assertRaises(InvalidTreeError):
            compute_attribute(broken, img)

    def test_attribute_image_matches_peak_areas(self):
        for i, (label, img, conn) in enumerate(fuzz_corpus()):
            algo = corpus_builder(i, img)
            with self.subTest(label, algorithm=algo):
                tree = build_tree(img, algo, conn)
                area = compute_attribute(tree, img, AREA)
                np.testing.assert_array_equal(attribute_image(tree, img, area), brute_peak_area(img, conn))


class TestDirectFilter(unittest.TestCase):
    def test_area_opening_of_chain(self):
        img, tree = square()
        out = area_opening(tree, img, 2)
        self.assertEqual(out.values.tolist(), [1, 2, 3, 3])

    def test_threshold_one_is_identity(self):
        img = random_image(9, 9, 8, seed=6)
        self.assertEqual(area_opening(maxtree_uf_levelcomp(img), img, 1), img)

    def test_failing_root_goes_to_zero(self):
        img, tree = square()
        self.assertEqual(area_opening(tree, img, 5).values.tolist(), [0, 0, 0, 0])

    def test_height_filter(self):
        img, tree = square()
        height = compute_attribute(tree, img, HEIGHT)
        self.assertEqual(direct_filter(tree, img, height, 2).values.tolist(), [1, 2, 2, 2])

    def test_matches_brute_force_opening(self):
        for i, (label, img, conn) in enumerate(fuzz_corpus()):
            algo = corpus_builder(i, img)
            tree = build_tree(img, algo, conn)
            for threshold in sorted({2, max(2, img.n // 16), img.n}):
                with self.subTest(label, algorithm=algo, threshold=threshold):
                    self.assertEqual(
                        area_opening(tree, img, threshold),
                        brute_area_opening(img, conn, threshold),
                    )

    def test_opening_is_anti_extensive_and_idempotent(self):
        for i, (label, img, conn) in enumerate(fuzz_corpus()):
            algo = corpus_builder(i, img)
            threshold = max(2, img.n // 16)
            with self.subTest(label, algorithm=algo, threshold=threshold):
                once = area_opening(build_tree(img, algo, conn), img, threshold)
                self.assertTrue(np.all(once.values <= img.values))
                twice = area_opening(build_tree(once, algo, conn), once, threshold)
                self.assertEqual(twice, once)


if __name__ == "__main__":
    unittest.main()
