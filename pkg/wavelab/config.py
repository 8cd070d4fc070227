# -*- coding: UTF-8 -*-
"""
Experiment configuration: flat `key=value` lines with dotted keys and
`#` comments, e.g.

    # subcritical sweep
    n=3
    p=2
    lattice.dr=0.05
    eps_list=0.8,0.6,0.45,0.34,0.25

Values are resolved in the order defaults, file, WAVELAB_SEED, flags.
"""
import logging
import os
import re

from .comparison import FRAMES
from .duhamel import DuhamelSpec
from .fields import PROFILE_FAMILIES, Lattice, make_profile
from .linear_part import LinearPartSpec
from .norms import Exponents, WeightSpec
from .solver import NONLINEAR_FORMS, NonlinearitySpec, SolveConfig
from .sphmeans import QuadratureSpec
from .util import format_value, parse_float_list, parse_int_range


logger = logging.getLogger('WAVELAB')


class ConfigError(Exception):
    def __init__(self, key, message=None):
        self.key = key
        self.message = message or "bad configuration value"
        super(ConfigError, self).__init__("%s: %s" % (key, self.message))


def str2bool(string):
    if not string:
        return False
    if str(string).lower() in ["false", "no", "n", "0"]:
        return False
    return True


def optional_float(string):
    if string is None or str(string).strip().lower() in ("", "none"):
        return None
    return float(string)


def choice(options):
    def cast(string):
        if string not in options:
            raise ValueError("must be one of %s" % ", ".join(options))
        return string
    return cast


# key -> (default, caster)
DEFAULTS = {
    "n": ("4", parse_int_range),
    "p": ("2", float),
    "k": ("1", float),
    "k0": ("0.5", float),
    "epsilon": ("0.1", float),
    "eps_list": ("0.8,0.6,0.45,0.34,0.25", parse_float_list),
    "seed": ("0", int),
    "jobs": ("1", int),
    "out": ("wavelab-data", str),
    "data.f": ("smooth_bump", choice(PROFILE_FAMILIES)),
    "data.g": ("smooth_bump", choice(PROFILE_FAMILIES)),
    "data.amplitude": ("1", float),
    "nonlinearity.form": ("abs_power", choice(NONLINEAR_FORMS)),
    "nonlinearity.A": ("1", float),
    "lattice.dr": ("0.1", float),
    "lattice.dt": ("", optional_float),
    "lattice.t_max": ("10", float),
    "quad.base_order": ("8", int),
    "quad.endpoint_split": ("0.5", float),
    "quad.levels": ("24", int),
    "quad.abs_tol": ("1e-8", float),
    "duhamel.base_order": ("6", int),
    "duhamel.levels": ("4", int),
    "solver.mode": ("march", choice(("march", "picard"))),
    "solver.blowup_cap": ("1e6", float),
    "solver.picard_tol": ("1e-10", float),
    "solver.picard_max_iters": ("50", int),
    "solver.budget": ("", optional_float),
    "solver.cap_probe": ("false", str2bool),
    "lifespan.checks": ("false", str2bool),
    "survival.eps_low": ("", optional_float),
    "survival.eps_high": ("", optional_float),
    "survival.iterations": ("8", int),
    "weight.delta": ("0.1", float),
    "verify.samples": ("100000", int),
    "verify.t_max": ("50", float),
    "probe.samples": ("32", int),
    "probe.T_list": ("10,30,100", parse_float_list),
    "comparison.frame": ("auto", choice(("auto",) + FRAMES)),
    "comparison.dx": ("0.02", float),
    "comparison.span": ("4", float),
    "comparison.max_nodes": ("40000", int),
    "comparison.samples": ("200", int),
    "comparison.check_frame": ("false", str2bool),
    "residual.levels": ("3", int),
    "residual.dr0": ("0.1", float),
    "fit.law": ("subcritical", choice(("subcritical", "critical"))),
}


LINE_RE = re.compile(r"^([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")


def parse_text(text):
    """
    key=value lines to a dict of raw strings. Blank lines and `#`
    comments are skipped.
    """
    raw = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = re.sub(r"\s*#.*$", "", line).strip()
        if not line:
            continue
        match = LINE_RE.match(line)
        if not match:
            raise ConfigError("line %s" % number, "expected key=value: %s" % (
                line))
        raw[match.group(1)] = match.group(2)
    return raw


class ExperimentConfig(object):
    def __init__(self, raw=None):
        self.raw = {key: default for key, (default, _) in DEFAULTS.items()}
        self.values = {}
        self.update(raw or {})

    @classmethod
    def load(cls, path=None, overrides=None, environ=None):
        """
        Defaults, then the file at path, then WAVELAB_SEED, then the
        overrides (flag values; None entries are ignored).
        """
        config = cls()
        if path:
            if not os.path.exists(path):
                raise ConfigError("config", "no such file: %s" % path)
            with open(path) as f:
                config.update(parse_text(f.read()))
        environ = os.environ if environ is None else environ
        if environ.get("WAVELAB_SEED"):
            config.update({"seed": environ["WAVELAB_SEED"]})
        config.update({k: v for k, v in (overrides or {}).items()
                       if v is not None})
        config.validate()
        logger.debug("[.] Resolved configuration: %s" % config.as_header())
        return config

    def update(self, raw):
        for key, value in raw.items():
            if key not in DEFAULTS:
                raise ConfigError(key, "unknown key")
            self.raw[key] = str(value)
        for key, text in self.raw.items():
            caster = DEFAULTS[key][1]
            try:
                self.values[key] = caster(text)
            except ValueError as e:
                raise ConfigError(key, "cannot read %r: %s" % (text, e))

    def __getitem__(self, key):
        return self.values[key]

    def _require(self, key, ok, message):
        if not ok:
            raise ConfigError(key, message)

    def validate(self):
        v = self.values
        self._require("n", v["n"] and all(n >= 3 for n in v["n"]),
                      "dimensions must be >= 3")
        self._require("p", v["p"] > 1, "p must be > 1")
        self._require("k", v["k"] > 0, "k must be positive")
        self._require("k0", 0 <= v["k0"] < v["k"], "need 0 <= k0 < k")
        self._require("epsilon", v["epsilon"] >= 0, "epsilon must be >= 0")
        eps = v["eps_list"]
        self._require("eps_list", eps and all(e > 0 for e in eps),
                      "eps_list must hold positive values")
        self._require("jobs", v["jobs"] >= 1, "jobs must be >= 1")
        self._require("lattice.dr", v["lattice.dr"] > 0, "dr must be positive")
        dt = v["lattice.dt"]
        self._require("lattice.dt", dt is None or 0 < dt <= v["lattice.dr"],
                      "need 0 < dt <= dr")
        self._require("lattice.t_max", v["lattice.t_max"] > 0,
                      "t_max must be positive")
        self._require("solver.blowup_cap", v["solver.blowup_cap"] > 0,
                      "cap must be positive")
        low, high = v["survival.eps_low"], v["survival.eps_high"]
        self._require("survival.eps_high", (low is None) == (high is None),
                      "set both survival.eps_low and survival.eps_high")
        self._require("survival.eps_low", low is None or 0 <= low < high,
                      "need 0 <= eps_low < eps_high")
        self._require("weight.delta", v["weight.delta"] > 0,
                      "delta must be positive")
        self._require("comparison.dx", v["comparison.dx"] > 0,
                      "dx must be positive")
        self._require("residual.levels", v["residual.levels"] >= 1,
                      "levels must be >= 1")
        try:
            self.quadrature()
        except ValueError as e:
            raise ConfigError("quad", str(e))
        return self

    def as_header(self):
        """
        The resolved configuration as a {key: text} dict.
        """
        header = {}
        for key, value in self.values.items():
            if isinstance(value, list):
                header[key] = ",".join(format_value(x) for x in value)
            else:
                header[key] = format_value(value)
        return header

    @property
    def dimensions(self):
        return self.values["n"]

    @property
    def n(self):
        return self.values["n"][0]

    @property
    def p(self):
        return self.values["p"]

    @property
    def k(self):
        return self.values["k"]

    def quadrature(self):
        v = self.values
        return QuadratureSpec(base_order=v["quad.base_order"],
                              endpoint_split=v["quad.endpoint_split"],
                              levels=v["quad.levels"],
                              abs_tol=v["quad.abs_tol"])

    def duhamel_spec(self, n=None):
        v = self.values
        q = QuadratureSpec(base_order=v["duhamel.base_order"],
                           endpoint_split=0.2, levels=v["duhamel.levels"],
                           abs_tol=1e-6, check=False)
        return DuhamelSpec(n or self.n, q=q, k=self.k)

    def profile(self, which):
        v = self.values
        family = v["data.%s" % which]
        k0 = v["k0"] if family == "annular_bump" else 0.0
        return make_profile(family, self.k, k0, v["data.amplitude"])

    def linear_spec(self, n=None):
        return LinearPartSpec(self.profile("f"), self.profile("g"),
                              n or self.n, q=self.quadrature())

    def nonlinearity(self, p=None):
        return NonlinearitySpec(p or self.p, self.values["nonlinearity.form"],
                                self.values["nonlinearity.A"])

    def exponents(self, n=None, p=None):
        return Exponents(n or self.n, p or self.p)

    def weight_spec(self, n=None, p=None):
        return WeightSpec(self.k, self.exponents(n, p),
                          self.values["weight.delta"])

    def lattice(self, t_max=None):
        v = self.values
        return Lattice.covering(v["lattice.dr"], t_max or v["lattice.t_max"],
                                self.k, dt=v["lattice.dt"])

    def solve_config(self, epsilon=None, lattice=None):
        v = self.values
        return SolveConfig(
            v["epsilon"] if epsilon is None else epsilon,
            lattice or self.lattice(),
            blowup_cap=v["solver.blowup_cap"],
            picard_tol=v["solver.picard_tol"],
            picard_max_iters=v["solver.picard_max_iters"],
            mode=v["solver.mode"],
            cap_probe=v["solver.cap_probe"])

    def __repr__(self):
        return "ExperimentConfig(%s)" % ", ".join(
            "%s=%s" % (k, self.raw[k]) for k in sorted(self.raw))
