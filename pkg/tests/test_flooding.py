import unittest

from scripts.flooding import (
    FloodStats,
    HierarchicalQueue,
    MaxPriorityQueue,
    UnsupportedConfigurationError,
    maxtree_nonrec,
    maxtree_salembier,
    nonrec_parent,
    salembier_parent,
)
from scripts.image_core import Connectivity, random_image, requantize
from scripts.tree_repr import normalize, validate
from scripts.union_find import maxtree_uf
from tests.utils import LINE_132, SQUARE_1243, image


class TestQueues(unittest.TestCase):
    def test_hierarchical_queue_is_fifo_per_level(self):
        hq = HierarchicalQueue([0, 2, 1])
        hq.push(1, 7)
        hq.push(2, 4)
        hq.push(1, 3)
        self.assertEqual(len(hq), 3)
        self.assertEqual(hq.pop(1), 7)
        self.assertEqual(hq.front(1), 3)
        self.assertFalse(hq.empty(2))
        self.assertEqual(hq.pop(2), 4)
        self.assertTrue(hq.empty(2))

    def _drain(self, img):
        pq = MaxPriorityQueue(img)
        for p, level in enumerate(img.values.tolist()):
            pq.push(p, level)
        out = []
        while len(pq):
            self.assertEqual(pq.top(), pq.top())
            out.append(pq.pop())
        return pq.backend, out

    def test_bucketed_backend(self):
        backend, out = self._drain(image([[5, 9, 9, 2]]))
        self.assertEqual(backend, "bucketed")
        self.assertEqual(out, [1, 2, 0, 3])

    def test_heap_backend_for_deep_images(self):
        backend, out = self._drain(image([[5, 2**19, 2**19, 2]], bit_depth=20))
        self.assertEqual(backend, "heap")
        self.assertEqual(out, [1, 2, 0, 3])


class TestSalembier(unittest.TestCase):
    def test_square_chain(self):
        tree = maxtree_salembier(image(SQUARE_1243))
        self.assertEqual(tree.parent.tolist(), [0, 0, 3, 1])
        self.assertEqual(tree.S.tolist(), [0, 1, 3, 2])

    def test_line(self):
        tree = maxtree_salembier(image(LINE_132))
        self.assertEqual(tree.parent.tolist(), [0, 2, 0])
        self.assertEqual(tree.S.tolist(), [0, 2, 1])

    def test_every_pixel_pushed_and_popped_once(self):
        img = random_image(12, 9, 6, seed=3)
        stats = FloodStats()
        tree = maxtree_salembier(img, Connectivity.C8, stats=stats)
        self.assertEqual((stats.pushes, stats.pops), (img.n, img.n))
        self.assertTrue(validate(img, tree).ok)

    def test_deep_images_rejected(self):
        img = random_image(4, 4, 18, seed=0)
        with self.assertRaises(UnsupportedConfigurationError):
            maxtree_salembier(img)
        with self.assertRaises(UnsupportedConfigurationError):
            salembier_parent(img, Connectivity.C4)

    def test_long_ramp_does_not_recurse(self):
        # 4096 distinct increasing levels along one row
        img = image([list(range(4096))], bit_depth=12)
        tree = maxtree_salembier(img)
        self.assertEqual(tree.parent.tolist()[1:], list(range(4095)))


    def test_constant_image_is_one_node(self):
        img = image([[6, 6, 6], [6, 6, 6]])
        tree = maxtree_salembier(img)
        self.assertTrue(all(p == tree.root for p in tree.parent.tolist()))

    def test_visits_brightest_first(self):
        # pixel 2 (level 4) is finished before pixel 3 (level 3)
        tree = maxtree_salembier(image(SQUARE_1243))
        self.assertLess(tree.S.tolist().index(3), tree.S.tolist().index(2))


class TestNonRecursive(unittest.TestCase):
    def test_line(self):
        tree = maxtree_nonrec(image(LINE_132))
        self.assertEqual(tree.parent.tolist(), [0, 2, 0])
        self.assertEqual(tree.S.tolist(), [0, 2, 1])

    def test_single_pixel(self):
        tree = maxtree_nonrec(image([[42]]))
        self.assertEqual(tree.parent.tolist(), [0])
        self.assertEqual(tree.S.tolist(), [0])

    def test_level_root_stack_stays_increasing(self):
        for bits in (3, 8, 20, 32):
            with self.subTest(bits=bits):
                img = random_image(10, 10, bits, seed=bits)
                stats = FloodStats()
                tree = maxtree_nonrec(img, stats=stats)
                self.assertEqual(stats.non_increasing_stacks, 0)
                self.assertEqual((stats.pushes, stats.pops), (img.n, img.n))
                self.assertGreater(stats.process_stack_calls, 0)
                self.assertTrue(validate(img, tree).ok)

    def test_deep_image_matches_union_find(self):
        img = requantize(random_image(12, 12, 8, seed=6), 20, seed=6)
        self.assertEqual(normalize(img, maxtree_nonrec(img)), normalize(img, maxtree_uf(img)))

    def test_small_images_match_salembier(self):
        for rows in (LINE_132, SQUARE_1243, [[5, 5], [5, 5]]):
            img = image(rows)
            self.assertEqual(normalize(img, maxtree_nonrec(img)), normalize(img, maxtree_salembier(img)))

    def test_parent_only_variant(self):
        img = random_image(9, 7, 32, seed=8)
        self.assertEqual(nonrec_parent(img, Connectivity.C4).tolist(), maxtree_nonrec(img).parent.tolist())


if __name__ == "__main__":
    unittest.main()
