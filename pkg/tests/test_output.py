#!/usr/bin/env python
"""Tests for report rendering and writing."""

import io
import json
import os
import shutil
import unittest
import unittest.mock

import numpy as np

from hbacsim import output
from hbacsim.error import FileError


class TestFormatFloat(unittest.TestCase):
    def test_integral(self):
        self.assertEqual(output.format_float(1.0), "1.0")
        self.assertEqual(output.format_float(0.0), "0.0")
        self.assertEqual(output.format_float(-3), "-3.0")

    def test_round_trip_digits(self):
        self.assertEqual(output.format_float(0.1), "0.10000000000000001")
        for value in (1e-12, 2 / 3, 1.49383, 1e300):
            self.assertEqual(float(output.format_float(value)), value)

    def test_exponent(self):
        self.assertEqual(output.format_float(1e17), "1e+17")
        self.assertEqual(output.format_float(1e16), "10000000000000000.0")

    def test_non_finite(self):
        for value in (float("nan"), float("inf"), -float("inf")):
            self.assertEqual(output.format_float(value), "null")


class TestRenderJson(unittest.TestCase):
    def test_layout(self):
        text = output.render_json(
            {"b": 1, "a": [0.5, 0.25], "c": {"ok": True, "none": None}, "d": []}
        )
        self.assertEqual(
            text,
            "{\n"
            '  "b": 1,\n'
            '  "a": [0.5, 0.25],\n'
            '  "c": {\n'
            '    "ok": true,\n'
            '    "none": null\n'
            "  },\n"
            '  "d": []\n'
            "}\n",
        )

    def test_nested_list(self):
        text = output.render_json([{"x": 1.0}, {"x": 2.0}])
        self.assertEqual(json.loads(text), [{"x": 1.0}, {"x": 2.0}])

    def test_numpy_values(self):
        text = output.render_json(
            {"v": np.array([1.0, 0.5]), "i": np.int64(3), "f": np.float64(0.25), "t": np.bool_(True)}
        )
        self.assertEqual(json.loads(text), {"v": [1.0, 0.5], "i": 3, "f": 0.25, "t": True})

    def test_string_escapes(self):
        text = output.render_json({"s": 'a"b\\c\n'})
        self.assertEqual(json.loads(text), {"s": 'a"b\\c\n'})

    def test_unsupported(self):
        with self.assertRaises(TypeError):
            output.render_json({"x": object()})


class TestRenderCsv(unittest.TestCase):
    def test_rows(self):
        text = output.render_csv(("t", "s1", "s2"), [[0.0, 0.5, 0.0], [0.1, 0.75, 0.0]])
        self.assertEqual(text, "t,s1,s2\n0,0.5,0\n0.10000000000000001,0.75,0\n")

    def test_nan(self):
        text = output.render_csv(("a", "b"), [[1.0, float("nan")]])
        self.assertEqual(text.splitlines()[1], "1,nan")


class TestWriteText(unittest.TestCase):
    def setUp(self):
        shutil.rmtree("out", ignore_errors=True)
        os.makedirs("out")

    def tearDown(self):
        shutil.rmtree("out", ignore_errors=True)

    def test_stdout(self):
        for path in (None, "-"):
            with unittest.mock.patch("sys.stdout", new=io.StringIO()) as out:
                output.write_text("hello\n", path)
                self.assertEqual(out.getvalue(), "hello\n")

    def test_file(self):
        path = os.path.join("out", "report.json")
        output.write_text("{}\n", path)
        with open(path, encoding="utf-8") as hdl:
            self.assertEqual(hdl.read(), "{}\n")

    def test_unwritable(self):
        with self.assertRaises(FileError):
            output.write_text("{}\n", os.path.join("out", "missing", "report.json"))


if __name__ == "__main__":
    unittest.main()
