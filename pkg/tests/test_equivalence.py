import io
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from scripts.builders import ALGORITHM_IDS, build_tree
from scripts.consistency import check_tree, run_consistency_checks
from scripts.image_core import Connectivity, random_image
from scripts.oracle import brute_maxtree
from scripts.tree_repr import MaxTree, dump_tree, load_tree_dump, normalize
from tests.utils import SQUARE_1243, fuzz_corpus, image


class TestBuildersAgree(unittest.TestCase):
    def test_corpus_against_oracle(self):
        for label, img, conn in fuzz_corpus():
            with self.subTest(label):
                failures = run_consistency_checks(img, conn, bands=(2, 3))
                self.assertEqual(failures, [], failures[:1])

    @settings(max_examples=60, deadline=None)
    @given(
        width=st.integers(1, 8),
        height=st.integers(1, 8),
        bits=st.sampled_from([1, 2, 3, 8, 20, 32]),
        seed=st.integers(0, 2**31 - 1),
        conn=st.sampled_from(list(Connectivity)),
    )
    def test_small_images_against_oracle(self, width, height, bits, seed, conn):
        img = random_image(width, height, bits, seed)
        expected = brute_maxtree(img, conn)
        for algo in ALGORITHM_IDS:
            if algo == "salembier" and bits >= 18:
                continue
            tree = build_tree(img, algo, conn, bands=3 if algo == "parallel" else None)
            self.assertEqual(normalize(img, tree), expected, algo)

    def test_sequential_id_with_bands_runs_map_reduce(self):
        img = random_image(6, 6, 8, seed=1)
        tree = build_tree(img, "nonrec", bands=3)
        self.assertEqual(normalize(img, tree), brute_maxtree(img))

    def test_unknown_algorithm(self):
        with self.assertRaises(ValueError):
            build_tree(image(SQUARE_1243), "bogus")


class TestConsistencyReport(unittest.TestCase):
    def test_wrong_but_valid_tree_is_reported(self):
        img = image(SQUARE_1243)
        wrong = MaxTree(parent=np.array([0, 0, 0, 1]), S=np.array([0, 1, 3, 2]))
        self.assertEqual(check_tree(img, wrong, "dump"), [])
        failures = run_consistency_checks(img, algorithms=[], extra_trees={"dump": wrong})
        self.assertEqual([f["check"] for f in failures], ["equal_to_oracle"])

    def test_invalid_dump_names_pixel(self):
        img = image(SQUARE_1243)
        buf = io.StringIO("0 0 1\n1 0 2\n3 1 3\n2 2 4\n")
        failures = check_tree(img, load_tree_dump(buf), "dump")
        self.assertIn({"check": "validate:single_root", "algorithm": "dump", "pixel": 2,
                       "detail": "found 2 self-parented pixels"}, failures)

    def test_large_images_compare_against_first_builder(self):
        img = random_image(120, 90, 8, seed=3)
        failures = run_consistency_checks(img, algorithms=["uf", "nonrec", "parallel"], bands=(4,))
        self.assertEqual(failures, [])

    def test_external_tree_is_not_its_own_reference(self):
        img = random_image(120, 90, 8, seed=3)
        c8_tree = build_tree(img, "uf", Connectivity.C8)
        self.assertEqual(check_tree(img, c8_tree, "dump"), [])
        failures = run_consistency_checks(img, Connectivity.C4, algorithms=["uf"], extra_trees={"dump": c8_tree})
        self.assertEqual([(f["check"], f["algorithm"]) for f in failures], [("equal_to_uf", "dump")])

    def test_dump_of_every_builder_reloads(self):
        img = random_image(7, 5, 8, seed=2)
        for algo in ALGORITHM_IDS:
            with self.subTest(algo):
                tree = build_tree(img, algo)
                buf = io.StringIO()
                dump_tree(img, tree, buf)
                buf.seek(0)
                self.assertEqual(check_tree(img, load_tree_dump(buf), algo), [])


if __name__ == "__main__":
    unittest.main()
