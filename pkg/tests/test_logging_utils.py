import logging
import unittest

from scripts.logging_utils import LOGGER_NAME, format_table, phase_rows, setup_logging


class TestFormatTable(unittest.TestCase):
    def test_numeric_columns_right_aligned(self):
        lines = format_table(["Tree", "Pixel"], [["uf", 3], ["parallel[2]", 117]]).splitlines()
        self.assertTrue(lines[2].endswith("  3"))
        self.assertTrue(lines[3].endswith("117"))
        self.assertTrue(lines[2].startswith("  uf "))

    def test_short_rows_padded(self):
        table = format_table(["A", "B", "C"], [["x"]])
        self.assertEqual(len(table.splitlines()), 3)

    def test_phase_rows_end_with_total(self):
        rows = phase_rows({"sort": 1.5, "build": 2.0})
        self.assertEqual(rows[-1], ["total", "3.5 ms"])
        self.assertEqual([r[0] for r in rows], ["sort", "build", "total"])


class TestSetupLogging(unittest.TestCase):
    def test_handler_attached_once(self):
        logger = setup_logging()
        count = len(logger.handlers)
        setup_logging(logging.DEBUG)
        self.assertEqual(len(logging.getLogger(LOGGER_NAME).handlers), count)
        self.assertEqual(logger.level, logging.DEBUG)
        logger.setLevel(logging.INFO)


if __name__ == "__main__":
    unittest.main()
