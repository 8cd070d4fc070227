import base64
import json
import math
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from wavelab.util import (
    csv_text, fit_line, format_value, is_url, parse_float_list,
    parse_int_range, read_csv, refine_crossing, write_file
)
from wavelab.util.plotting import loglog_svg


class TestParsing(unittest.TestCase):
    def test_int_range(self):
        self.assertEqual(parse_int_range("3..6"), [3, 4, 5, 6])
        self.assertEqual(parse_int_range("3, 5"), [3, 5])
        self.assertEqual(parse_int_range("4"), [4])

    def test_empty_int_range(self):
        with self.assertRaises(ValueError):
            parse_int_range("6..3")
        with self.assertRaises(ValueError):
            parse_int_range("three")

    def test_float_list(self):
        self.assertEqual(parse_float_list("0.8,0.6, 0.45"), [0.8, 0.6, 0.45])

    def test_is_url(self):
        self.assertTrue(is_url("http://localhost:5000/files"))
        self.assertTrue(is_url("https://example.org"))
        self.assertFalse(is_url("wavelab-data"))
        self.assertFalse(is_url(None))


class TestCsv(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_format_value(self):
        self.assertEqual(format_value(0.1), "0.10000000000000001")
        self.assertEqual(format_value(True), "1")
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(3), "3")

    def test_header_is_sorted(self):
        text = csv_text(["a", "b"], [(1, 2.5)], header={"z": 1, "n": 4})
        lines = text.splitlines()
        self.assertEqual(lines[0], "# n=4")
        self.assertEqual(lines[1], "# z=1")
        self.assertEqual(lines[2], "a,b")
        self.assertEqual(lines[3], "1,2.5")

    def test_same_input_same_text(self):
        rows = [(0.1 * i, math.sqrt(i)) for i in range(5)]
        self.assertEqual(csv_text(["x", "y"], rows, {"seed": 0}),
                         csv_text(["x", "y"], rows, {"seed": 0}))

    def test_write_and_read_back(self):
        text = csv_text(["eps", "T"], [(0.5, 12.0)], header={"n": 3})
        path = write_file("sub/out.csv", text, output=self.tmp)
        self.assertEqual(path, os.path.join(self.tmp, "sub", "out.csv"))
        header, rows = read_csv(path)
        self.assertEqual(header, {"n": "3"})
        self.assertEqual(rows, [{"eps": "0.5", "T": "12"}])
        leftovers = [f for f in os.listdir(os.path.dirname(path))
                     if f.startswith(".wavelab-")]
        self.assertEqual(leftovers, [])

    def test_no_output_writes_nothing(self):
        self.assertIsNone(write_file("x.csv", "a", output=None))

    def test_url_output_posts_base64(self):
        response = mock.Mock(status_code=200)
        with mock.patch("wavelab.util.requests.post",
                        return_value=response) as post:
            status = write_file("fit.csv", "a,b\n", fileclass="csv",
                                output="http://localhost:5000/files")
        self.assertEqual(status, 200)
        args, kwargs = post.call_args
        self.assertEqual(args[0], "http://localhost:5000/files")
        payload = json.loads(kwargs["data"].decode("utf-8"))
        self.assertEqual(payload["name"], "fit.csv")
        self.assertEqual(payload["fileclass"], "csv")
        self.assertEqual(base64.b64decode(payload["data"]).decode(), "a,b\n")


class TestFitting(unittest.TestCase):
    def test_exact_line(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        slope, intercept, r2 = fit_line(x, 2.0 * x - 1.0)
        self.assertAlmostEqual(slope, 2.0, places=12)
        self.assertAlmostEqual(intercept, -1.0, places=12)
        self.assertAlmostEqual(r2, 1.0, places=12)

    def test_needs_two_points(self):
        with self.assertRaises(ValueError):
            fit_line([1.0], [2.0])

    def test_refine_crossing(self):
        # log m goes from 0 to log 100 on [0, 1]; cap 10 is halfway
        t = refine_crossing(0.0, 1.0, 1.0, 100.0, 10.0)
        self.assertAlmostEqual(t, 0.5, places=10)
        t = refine_crossing(2.0, 4.0, 1.0, math.exp(4.0), math.e)
        self.assertAlmostEqual(t, 2.5, places=12)

    def test_refine_crossing_fallback(self):
        self.assertEqual(refine_crossing(0.0, 1.0, 1.0, np.inf, 10.0), 1.0)
        self.assertEqual(refine_crossing(0.0, 1.0, 20.0, 100.0, 10.0), 1.0)


class TestPlotting(unittest.TestCase):
    def test_svg_is_stable(self):
        x = [0.1, 0.2, 0.4]
        y = [100.0, 30.0, 9.0]
        first = loglog_svg(x, y, slope=-1.7, intercept=0.7)
        second = loglog_svg(x, y, slope=-1.7, intercept=0.7)
        self.assertTrue(first.lstrip().startswith("<?xml"))
        self.assertIn("<svg", first)
        self.assertEqual(first, second)


if __name__ == "__main__":
    unittest.main()
