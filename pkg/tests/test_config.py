import os
import shutil
import tempfile
import unittest

from wavelab.config import (
    DEFAULTS, ConfigError, ExperimentConfig, parse_text, str2bool
)
from wavelab.experiments.studies import ComparisonExperiment


class TestParseText(unittest.TestCase):
    def test_comments_and_blanks(self):
        raw = parse_text("# a sweep\n\nn=3  # inline\n lattice.dr = 0.05\n")
        self.assertEqual(raw, {"n": "3", "lattice.dr": "0.05"})

    def test_bad_line(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_text("n=3\nnot a pair\n")
        self.assertEqual(ctx.exception.key, "line 2")

    def test_str2bool(self):
        for text in ("false", "No", "0", ""):
            self.assertFalse(str2bool(text))
        for text in ("true", "yes", "1"):
            self.assertTrue(str2bool(text))


class TestExperimentConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, text):
        path = os.path.join(self.tmp, "run.conf")
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_defaults(self):
        config = ExperimentConfig.load(environ={})
        self.assertEqual(config.dimensions, [4])
        self.assertEqual(config.p, 2.0)
        self.assertEqual(config["eps_list"], [0.8, 0.6, 0.45, 0.34, 0.25])
        self.assertIsNone(config["lattice.dt"])
        self.assertFalse(config["comparison.check_frame"])
        self.assertEqual(config["comparison.frame"], "auto")
        self.assertEqual(set(config.as_header()), set(DEFAULTS))

    def test_precedence(self):
        path = self.write("n=3..5\nseed=1\np=3\n")
        config = ExperimentConfig.load(path, {"p": "2.5", "n": None},
                                       environ={"WAVELAB_SEED": "7"})
        self.assertEqual(config.dimensions, [3, 4, 5])
        self.assertEqual(config.n, 3)
        self.assertEqual(config["seed"], 7)
        self.assertEqual(config.p, 2.5)

    def test_auto_frame_follows_the_regime(self):
        cases = (("3", "2", "subcritical"), ("4", "1.5", "subcritical"),
                 ("4", "2", "general"))
        for n, p, frame in cases:
            config = ExperimentConfig.load(None, {"n": n, "p": p}, environ={})
            self.assertEqual(ComparisonExperiment(config).frame, frame)
        config = ExperimentConfig.load(None, {"n": "3", "p": "2",
                                              "comparison.frame": "general"},
                                       environ={})
        self.assertEqual(ComparisonExperiment(config).frame, "general")

    def test_flag_beats_environment(self):
        config = ExperimentConfig.load(None, {"seed": "3"},
                                       environ={"WAVELAB_SEED": "7"})
        self.assertEqual(config["seed"], 3)

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.load(os.path.join(self.tmp, "nope.conf"),
                                  environ={})
        self.assertEqual(ctx.exception.key, "config")

    def test_unknown_key(self):
        path = self.write("lattice.dx=0.1\n")
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.load(path, environ={})
        self.assertEqual(ctx.exception.key, "lattice.dx")

    def test_bad_values(self):
        cases = [
            ("p", "1"),
            ("n", "2"),
            ("k0", "1.5"),
            ("lattice.dt", "0.5"),
            ("eps_list", "0.5,-0.1"),
            ("data.f", "gaussian"),
            ("jobs", "two"),
            ("quad.base_order", "1"),
        ]
        for key, value in cases:
            with self.assertRaises(ConfigError) as ctx:
                ExperimentConfig.load(None, {key: value}, environ={})
            self.assertIn(ctx.exception.key, (key, "quad"))

    def test_survival_bracket(self):
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.load(None, {"survival.eps_low": "0.1"},
                                  environ={})
        self.assertEqual(ctx.exception.key, "survival.eps_high")
        with self.assertRaises(ConfigError):
            ExperimentConfig.load(None, {"survival.eps_low": "0.5",
                                         "survival.eps_high": "0.1"},
                                  environ={})
        config = ExperimentConfig.load(None, {"survival.eps_low": "0",
                                              "survival.eps_high": "2"},
                                       environ={})
        self.assertEqual(config["survival.eps_high"], 2.0)

    def test_header_is_text(self):
        config = ExperimentConfig.load(None, {"epsilon": "0.5"}, environ={})
        header = config.as_header()
        self.assertEqual(header["epsilon"], "0.5")
        self.assertEqual(header["n"], "4")
        self.assertEqual(header["eps_list"], "0.80000000000000004,"
                         "0.59999999999999998,0.45000000000000001,"
                         "0.34000000000000002,0.25")

    def test_builders(self):
        config = ExperimentConfig.load(None, {"data.g": "annular_bump",
                                              "data.f": "zero"}, environ={})
        spec = config.linear_spec()
        self.assertTrue(spec.blowup_data)
        self.assertEqual(spec.g.breaks, (0.5, 1.0))
        self.assertEqual(config.profile("f").breaks, ())
        self.assertEqual(config.duhamel_spec(3).n, 3)
        self.assertEqual(config.duhamel_spec().k, 1.0)
        self.assertEqual(config.weight_spec().delta, 0.1)
        self.assertEqual(config.exponents(3, 2).qbar, 0.0)

        lattice = config.lattice(t_max=2.0)
        self.assertGreaterEqual(lattice.r_max, 3.0)
        cfg = config.solve_config(epsilon=0.3, lattice=lattice)
        self.assertEqual(cfg.epsilon, 0.3)
        self.assertEqual(cfg.blowup_cap, 1e6)
        self.assertEqual(cfg.mode, "march")


if __name__ == "__main__":
    unittest.main()
