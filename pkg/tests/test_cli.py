import os
import shutil
import tempfile
import unittest

from wavelab.cli.lab import (
    EXIT_CONFIG, EXIT_FAILED, EXIT_OK, overrides_from, run
)
from wavelab.experiments.verify import DECAY_COLUMNS
from wavelab.solver import RESULT_COLUMNS
from wavelab.util import csv_text, read_csv, write_file


class TestOverrides(unittest.TestCase):
    def test_eps_goes_to_epsilon_for_single_runs(self):
        overrides = overrides_from("solve", {"eps": "0.5,0.4"})
        self.assertEqual(overrides["epsilon"], 0.5)
        self.assertNotIn("eps_list", overrides)

    def test_eps_goes_to_list_for_sweeps(self):
        overrides = overrides_from("lifespan", {"eps": "0.5,0.4",
                                                "samples": "10"})
        self.assertEqual(overrides["eps_list"], "0.5,0.4")
        self.assertEqual(overrides["verify.samples"], "10")
        self.assertIsNone(overrides["n"])


class TestRun(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write_config(self, text):
        path = os.path.join(self.tmp, "run.conf")
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_verify_linear_writes_decay_series(self):
        path = self.write_config("lattice.dr=0.25\nverify.t_max=4\n")
        out = os.path.join(self.tmp, "linear")
        code = run(["--quiet", "--out", out, "--config", path, "--n", "3",
                    "verify-linear"])
        self.assertIn(code, (EXIT_OK, EXIT_FAILED))
        _, rows = read_csv(os.path.join(out, "verify_linear_decay.csv"))
        self.assertEqual(list(rows[0]), DECAY_COLUMNS)
        self.assertTrue(all(row["n"] == "3" for row in rows))
        self.assertEqual(float(rows[0]["t"]), 0.0)
        self.assertEqual(rows[0]["window_max"], "")
        late = [row for row in rows if row["window_max"]]
        self.assertTrue(late)
        for row in late:
            self.assertGreaterEqual(float(row["window_max"]),
                                    float(row["weighted"]))

    def test_solve_writes_field(self):
        path = self.write_config("lattice.dr=0.25\nlattice.t_max=1\n")
        out = os.path.join(self.tmp, "solve")
        code = run(["--quiet", "--out", out, "--config", path, "--eps", "0.1",
                    "solve"])
        self.assertEqual(code, EXIT_OK)
        _, history = read_csv(os.path.join(out, "norm_history.csv"))
        _, field = read_csv(os.path.join(out, "field.csv"))
        radii = set(row["r"] for row in field)
        self.assertEqual(len(field), len(radii) * len(history))
        self.assertEqual(field[-1]["t"], history[-1]["t"])

    def test_missing_config_file(self):
        code = run(["--quiet", "--config",
                    os.path.join(self.tmp, "missing.conf"), "solve"])
        self.assertEqual(code, EXIT_CONFIG)

    def test_unknown_config_key(self):
        path = os.path.join(self.tmp, "bad.conf")
        with open(path, "w") as f:
            f.write("solver.tolerance=1e-3\n")
        self.assertEqual(run(["--quiet", "--config", path, "solve"]),
                         EXIT_CONFIG)

    def test_unknown_subcommand(self):
        self.assertEqual(run(["--quiet", "explode"]), EXIT_CONFIG)

    def test_usage_error(self):
        self.assertEqual(run(["--no-such-flag", "solve"]), EXIT_CONFIG)

    def test_bad_loglevel(self):
        self.assertEqual(run(["--quiet", "--loglevel", "LOUD", "solve"]),
                         EXIT_CONFIG)

    def test_bad_flag_value(self):
        self.assertEqual(run(["--quiet", "--p", "0.5", "solve"]), EXIT_CONFIG)

    def test_fit_without_input(self):
        code = run(["--quiet", "--out", self.tmp, "fit"])
        self.assertEqual(code, EXIT_FAILED)

    def test_verify_kernel_writes_results(self):
        code = run(["--quiet", "--out", self.tmp, "--n", "3,4",
                    "--samples", "500", "--seed", "2", "verify-kernel"])
        self.assertEqual(code, EXIT_OK)
        header, rows = read_csv(os.path.join(self.tmp, "verify_kernel.csv"))
        self.assertEqual(header["subcommand"], "verify-kernel")
        self.assertEqual(header["seed"], "2")
        self.assertEqual([row["n"] for row in rows], ["3", "4"])
        self.assertTrue(all(row["passed"] == "1" for row in rows))

    def test_fit_reads_lifespan_csv(self):
        rows = [[e, 3.0 * e ** -2, 1, 1.0, 0.1, 0.1]
                for e in (0.8, 0.6, 0.45, 0.34, 0.25)]
        write_file("lifespan.csv", csv_text(RESULT_COLUMNS, rows,
                                            {"n": 3, "p": 2.0}),
                   output=self.tmp)
        code = run(["--quiet", "--out", self.tmp, "--law", "subcritical",
                    "fit"])
        self.assertEqual(code, EXIT_OK)
        header, fit_rows = read_csv(os.path.join(self.tmp, "fit.csv"))
        self.assertEqual(header["source"],
                         os.path.join(self.tmp, "lifespan.csv"))
        self.assertAlmostEqual(float(fit_rows[0]["slope"]), -2.0, places=8)

    def test_same_seed_same_files(self):
        texts = []
        for name in ("a", "b"):
            out = os.path.join(self.tmp, name)
            run(["--quiet", "--out", out, "--n", "3", "--samples", "200",
                 "verify-kernel"])
            with open(os.path.join(out, "verify_kernel.csv")) as f:
                texts.append(f.read())
        self.assertEqual(texts[0].replace(
            "out=" + os.path.join(self.tmp, "a"), ""),
            texts[1].replace("out=" + os.path.join(self.tmp, "b"), ""))


if __name__ == "__main__":
    unittest.main()
