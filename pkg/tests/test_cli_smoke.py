import contextlib
import io
import os
import tempfile
import unittest

from scripts.builders import ALGORITHM_IDS
from scripts.image_core import load_image
from scripts.run_maxtree import main
from tests.utils import SQUARE_1243, write_pgm


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class TestCliSmoke(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp_dir = self._tmp.name
        self.square = write_pgm(os.path.join(self.tmp_dir, "square.pgm"), SQUARE_1243)

    def tearDown(self):
        self._tmp.cleanup()

    def test_build_writes_dump(self):
        dump = os.path.join(self.tmp_dir, "tree.txt")
        code, out, _ = run(["build", self.square, "-a", "uf", "-o", dump])
        self.assertEqual(code, 0)
        with open(dump) as fh:
            self.assertEqual(fh.read().splitlines(), ["0 0 1", "1 0 2", "3 1 3", "2 3 4"])
        self.assertIn("nodes", out)

    def test_build_to_stdout_with_bands(self):
        code, out, _ = run(["build", "--random", "6x5", "--bits", "12", "-a", "nonrec", "--bands", "2"])
        self.assertEqual(code, 0)
        self.assertEqual(len(out.splitlines()), 30)

    def test_unknown_algorithm_lists_choices(self):
        with self.assertRaises(SystemExit) as ctx:
            run(["build", self.square, "-a", "quicksort"])
        self.assertEqual(ctx.exception.code, 2)

    def test_missing_image(self):
        with self.assertRaises(SystemExit):
            run(["build"])

    def test_area_filter_same_for_every_algorithm(self):
        outputs = []
        for algo in ALGORITHM_IDS:
            path = os.path.join(self.tmp_dir, f"open_{algo}.pgm")
            code, _, _ = run(["filter", self.square, "-a", algo, "--area", "2", "-o", path])
            self.assertEqual(code, 0, algo)
            with open(path, "rb") as fh:
                outputs.append(fh.read())
        self.assertEqual(len(set(outputs)), 1)
        self.assertEqual(load_image(path).values.tolist(), [1, 2, 3, 3])

    def test_area_one_reproduces_input(self):
        path = os.path.join(self.tmp_dir, "same.pgm")
        self.assertEqual(run(["filter", self.square, "--area", "1", "-o", path])[0], 0)
        with open(path, "rb") as a, open(self.square, "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_filter_threshold_below_one(self):
        with self.assertRaises(SystemExit) as ctx:
            run(["filter", self.square, "--area", "0", "-o", os.path.join(self.tmp_dir, "x.pgm")])
        self.assertEqual(ctx.exception.code, 2)

    def test_validate_clean(self):
        code, _, _ = run(["validate", "--random", "9x7", "--bits", "20", "--seed", "4", "-c", "8"])
        self.assertEqual(code, 0)

    def test_validate_corrupt_dump(self):
        dump = os.path.join(self.tmp_dir, "bad.txt")
        with open(dump, "w") as fh:
            fh.write("0 0 1\n1 0 2\n3 1 3\n2 2 4\n")
        code, out, _ = run(["validate", self.square, "--tree", dump])
        self.assertEqual(code, 1)
        self.assertIn("single_root", out)

    def test_validate_large_dump_checked_against_sequential_build(self):
        # 120x90 is above the oracle limit
        dump = os.path.join(self.tmp_dir, "c8.txt")
        source = ["--random", "120x90", "--bits", "8", "--seed", "3"]
        self.assertEqual(run(["build", *source, "-a", "uf", "-c", "8", "-o", dump])[0], 0)
        self.assertEqual(run(["validate", *source, "-c", "8", "--tree", dump])[0], 0)
        code, out, _ = run(["validate", *source, "-c", "4", "--tree", dump])
        self.assertEqual(code, 1)
        self.assertIn("equal_to_uf", out)

    def test_validate_unknown_algorithm(self):
        with self.assertRaises(SystemExit):
            run(["validate", self.square, "--algorithms", "uf,bogus"])

    def test_bench_csv(self):
        code, out, _ = run([
            "bench", "--algorithms", "uf_rank", "--megapixels", "0.001",
            "--bits", "8", "--repetitions", "3",
        ])
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "algo,n,bits,bands,workers,phase,ms,mem_bytes")
        self.assertEqual(len(lines), 5)

    def test_bench_checks_table_on_stderr(self):
        code, out, err = run([
            "bench", "--algorithms", "uf,uf_levelcomp", "--megapixels", "0.001",
            "--bits", "8", "--repetitions", "3", "--no-phases", "--checks",
        ])
        self.assertEqual(code, 0)
        self.assertEqual(len(out.splitlines()), 3)
        self.assertIn("levelcomp_vs_plain", err)
        self.assertNotIn("levelcomp_vs_plain", out)

    def test_recommend(self):
        code, out, _ = run(["recommend", "--bits", "8"])
        self.assertEqual(code, 0)
        self.assertIn("salembier", out)


if __name__ == "__main__":
    unittest.main()
