# -*- coding: UTF-8 -*-
import logging
import math

import numpy as np

from . import BaseExperiment
from ..fields import Lattice
from ..linear_part import check_huygens, check_initial_trace, verify_decay
from ..norms import (
    basic_estimate_probe, check_log_bound, p0, p1, zeta
)
from ..sphmeans import check_h_bounds, spherical_mean


logger = logging.getLogger('WAVELAB')


CHECK_COLUMNS = ["n", "check", "value", "threshold", "passed"]
DECAY_COLUMNS = ["n", "t", "max_abs", "weighted", "window_max"]


def _unit(lam):
    return np.ones_like(lam)


class KernelVerification(BaseExperiment):
    """
    Normalization of the spherical mean and the upper bounds of h, per
    dimension.
    """
    name = "verify-kernel"
    columns = ["n", "samples", "violations", "identity_defect",
               "normalization_error", "passed"]

    def __init__(self, config, samples=None, **kwargs):
        super(KernelVerification, self).__init__(config, **kwargs)
        self.samples = samples or config["verify.samples"]

    def normalization_error(self, n, pairs=1000):
        rng = np.random.default_rng(self.config["seed"])
        r = rng.uniform(0.1, 10.0, pairs)
        rho = rng.uniform(0.1, 10.0, pairs)
        mean = spherical_mean(_unit, r, rho, n, q=self.config.quadrature())
        return float(np.max(np.abs(mean - 1.0)))

    def run(self):
        rows = []
        passed = True
        for n in self.config.dimensions:
            logger.info("[.] Kernel checks for n=%s" % n)
            norm_err = self.normalization_error(n)
            report = check_h_bounds(self.samples, n, seed=self.config["seed"])
            ok = report.passed and norm_err <= 1e-8 and \
                report.identity_defect <= 1e-10
            if not ok:
                logger.warning("[!] n=%s: %s, normalization error %.3e" % (
                    n, report, norm_err))
            passed = passed and ok
            rows.append([n, self.samples, len(report.violations),
                         report.identity_defect, norm_err, ok])
        self.save_csv("verify_kernel.csv", self.columns, rows)
        return passed


class LinearVerification(BaseExperiment):
    """
    Huygens support, decay and initial traces of V. The decay series per
    time goes to verify_linear_decay.csv.
    """
    name = "verify-linear"

    def run(self):
        config = self.config
        k = config.k
        dr = config["lattice.dr"]
        rows = []
        series = []
        for n in config.dimensions:
            spec = config.linear_spec(n)
            lattice = Lattice.covering(dr, config["verify.t_max"], k)
            huygens = check_huygens(spec, lattice)
            rows.append([n, "huygens_ratio", huygens.ratio, 1e-6,
                         huygens.passed()])

            grid = Lattice.covering(dr, max(config["verify.t_max"], 100.0 * k),
                                    k)
            decay = verify_decay(spec, grid)
            series.extend([n] + list(row) for row in decay.series())
            slope = decay.slope()
            rows.append([n, "decay_window_spread", decay.window_spread, 3.0,
                         decay.window_spread <= 3.0])
            rows.append([n, "decay_slope", slope, -(n - 2.0),
                         slope is not None and abs(slope + n - 2.0) <= 0.1])

            r = lattice.r[lattice.r < 2.0 * k]
            e_value, e_deriv = check_initial_trace(spec, r)
            f_scale = 1.0 + spec.f.sup_norm()
            g_scale = 1.0 + spec.g.sup_norm()
            rows.append([n, "trace_value", e_value, 1e-8 * f_scale,
                         e_value <= 1e-8 * f_scale])
            rows.append([n, "trace_derivative", e_deriv, 1e-2 * g_scale,
                         e_deriv <= 1e-2 * g_scale])
        for row in rows:
            if not row[-1]:
                logger.warning("[!] n=%s %s=%s (threshold %s)" % tuple(row[:4]))
        self.save_csv("verify_linear.csv", CHECK_COLUMNS, rows)
        self.save_csv("verify_linear_decay.csv", DECAY_COLUMNS, series)
        return all(row[-1] for row in rows)


# one representative (a1, a2, a3) per case of the growth factor
PROBE_CASES = {
    "bounded": (0.0, -2.0, 0.0),
    "log": (0.0, -1.0, 0.0),
    "delta": (0.0, -1.0, 1.0),
    "power": (0.5, -0.5, 0.0),
}


class EstimateVerification(BaseExperiment):
    """
    Exponent identities, the log bound and the basic-estimate probe.
    """
    name = "verify-estimates"

    def exponent_rows(self):
        rows = []
        for n in range(3, 9):
            value = abs(zeta(p1(n), n))
            rows.append([n, "zeta(p1)", value, 1e-12, value <= 1e-12])
            if n == 3:
                target = 1.0 + math.sqrt(2.0)
                gap = max(abs(p1(3) - target), abs(p0(3) - target))
                rows.append([n, "p1=p0=1+sqrt2", gap, 1e-12, gap <= 1e-12])
            else:
                gap = p0(n) - p1(n)
                rows.append([n, "p0-p1", gap, 0.0, gap > 1e-12])
        return rows

    def probe_rows(self):
        config = self.config
        spec = config.weight_spec()
        k = spec.k
        dr = config["lattice.dr"]
        duhamel = config.duhamel_spec()
        samples = config["probe.samples"]
        seed = config["seed"]
        T_list = [T * k for T in config["probe.T_list"]]
        rows = []
        sup = {}
        for case, (a1, a2, a3) in sorted(PROBE_CASES.items()):
            for i, T in enumerate(T_list):
                grid = Lattice.covering(dr, T, k)
                report = basic_estimate_probe(spec, a1, a2, a3, T, grid,
                                              samples=samples, seed=seed,
                                              duhamel=duhamel)
                sup[case, T] = report.sup_ratio
                rows.append([spec.n, "probe_%s_T=%s" % (case, T),
                             report.sup_ratio, math.inf,
                             bool(np.isfinite(report.sup_ratio))])
                if i:
                    continue
                fine = basic_estimate_probe(spec, a1, a2, a3, T,
                                            grid.refined(), samples=samples,
                                            seed=seed, duhamel=duhamel)
                change = abs(fine.sup_ratio / report.sup_ratio - 1.0) \
                    if report.sup_ratio else 0.0
                rows.append([spec.n, "probe_%s_refinement" % case, change,
                             0.2, change <= 0.2])
        logs = [sup["log", T] for T in T_list]
        if len(logs) >= 2 and min(logs) > 0:
            spread = max(logs) / min(logs) - 1.0
            rows.append([spec.n, "probe_log_growth", spread, 0.15,
                         spread <= 0.15])
        return rows

    def run(self):
        rows = self.exponent_rows()
        log_bound = check_log_bound(self.config["verify.samples"],
                                    seed=self.config["seed"])
        rows.append([0, "log_bound", log_bound.worst, 0.0, log_bound.passed])
        rows.extend(self.probe_rows())
        for row in rows:
            if not row[-1]:
                logger.warning("[!] n=%s %s=%s (threshold %s)" % tuple(row[:4]))
        self.save_csv("verify_estimates.csv", CHECK_COLUMNS, rows)
        return all(row[-1] for row in rows)
