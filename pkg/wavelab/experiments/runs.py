# -*- coding: UTF-8 -*-
import logging
import math
import os

import numpy as np

from . import BaseExperiment
from .verify import CHECK_COLUMNS
from ..fields import Lattice
from ..norms import Exponents
from ..solver import (
    RESULT_COLUMNS, LifespanResult, find_survival_threshold, fit_scaling,
    grid_check, lifespan_sweep, plateau_growth, solve
)
from ..util import parse_int_range, read_csv


logger = logging.getLogger('WAVELAB')


class SolveExperiment(BaseExperiment):
    """
    One solve at config epsilon: the lifespan row, the history of the
    weighted norm per slice and the filled slices of u (field.csv). With
    survival.eps_low and survival.eps_high set it bisects for the
    survival threshold instead.
    """
    name = "solve"

    def save_history(self, lattice, result):
        times = lattice.t[:len(result.norm_history)]
        self.save_csv("norm_history.csv", ["t", "weighted_norm"],
                      list(zip(times, result.norm_history)))

    def run(self):
        config = self.config
        spec = config.linear_spec()
        nl = config.nonlinearity()
        cfg = config.solve_config()
        duhamel = config.duhamel_spec()
        if config["survival.eps_high"] is not None:
            return self.survival(spec, nl, cfg, duhamel)
        u, result = solve(spec, nl, cfg, duhamel)
        self.save_csv("solve.csv", RESULT_COLUMNS + ["T_low", "T_high"],
                      [result.row() + [result.T_low, result.T_high]])
        self.save_history(u.lattice, result)
        self.save_csv("field.csv", ["r", "t", "u"], list(u.rows()))
        return True

    def survival(self, spec, nl, cfg, duhamel):
        """
        Largest surviving eps0 up to cfg.lattice.t_max and the growth of
        the weighted norm over the final quarter of its run.
        """
        config = self.config
        eps0, result = find_survival_threshold(
            spec, nl, cfg, config["survival.eps_low"],
            config["survival.eps_high"],
            iterations=config["survival.iterations"], duhamel=duhamel)
        growth = plateau_growth(result) if result.survived else math.inf
        rows = [
            [spec.n, "survived", int(result.survived), 1, result.survived],
            [spec.n, "plateau_growth", growth, 0.05, growth < 0.05],
        ]
        self.save_csv("survival.csv", CHECK_COLUMNS, rows, eps0=eps0)
        self.save_history(cfg.lattice, result)
        if not rows[-1][-1]:
            logger.warning("[!] eps0=%s: weighted norm still grows by %.3f" % (
                eps0, growth))
        return all(row[-1] for row in rows)


class LifespanExperiment(BaseExperiment):
    """
    Lifespan sweep over eps_list. With lifespan.checks on, every blow-up
    is also checked for cap sensitivity and grid convergence.
    """
    name = "lifespan"

    def run(self):
        config = self.config
        spec = config.linear_spec()
        nl = config.nonlinearity()
        cfg = config.solve_config()
        checks = config["lifespan.checks"]
        if checks:
            cfg = cfg.with_options(cap_probe=True)
        duhamel = config.duhamel_spec()
        results = lifespan_sweep(spec, nl, config["eps_list"], cfg,
                                 budget=config["solver.budget"],
                                 jobs=self.jobs, duhamel=duhamel)
        results = sorted(results, key=lambda r: -r.epsilon)
        self.save_csv("lifespan.csv", RESULT_COLUMNS,
                      [r.row() for r in results])
        blown = [r for r in results if r.blew_up]
        if blown:
            self.save_svg("lifespan.svg", [r.epsilon for r in blown],
                          [r.T_hat for r in blown], xlabel="epsilon",
                          ylabel="T_hat", title="lifespan n=%s p=%s" % (
                              spec.n, nl.p))
        if checks:
            return self.check_results(spec, nl, cfg, blown, duhamel)
        return True

    def check_results(self, spec, nl, cfg, blown, duhamel):
        rows = []
        for result in blown:
            eps = result.epsilon
            sensitivity = result.cap_sensitivity
            rows.append([eps, "cap_sensitivity", sensitivity, 0.05,
                         sensitivity is not None and sensitivity < 0.05])
            lattice = Lattice.covering(cfg.lattice.dr, 1.25 * result.T_hat,
                                       spec.k, dt=cfg.lattice.dt)
            check = grid_check(spec, nl, cfg.with_options(
                epsilon=eps, lattice=lattice, cap_probe=False), 0.1, duhamel)
            rows.append([eps, "grid_rel_diff", check.rel_diff, 0.1,
                         check.passed])
        for row in rows:
            if not row[-1]:
                logger.warning("[!] eps=%s %s=%s (threshold %s)" % tuple(
                    row[:4]))
        self.save_csv("lifespan_checks.csv",
                      ["epsilon", "check", "value", "threshold", "passed"],
                      rows)
        return all(row[-1] for row in rows)


def results_from_csv(path):
    """
    LifespanResult objects and (n, p) from a lifespan CSV.
    """
    header, rows = read_csv(path)
    results = []
    for row in rows:
        blew_up = bool(int(row["blew_up"]))
        T_hat = float(row["T_hat"]) if blew_up else None
        results.append(LifespanResult(
            float(row["epsilon"]), T_hat, blew_up,
            float(row["max_weighted_norm"]), 0, float(row["dr"]),
            float(row["dt"]), None))
    n = parse_int_range(header["n"])[0] if header.get("n") else None
    p = float(header["p"]) if header.get("p") else None
    return results, n, p


class FitExperiment(BaseExperiment):
    """
    Fit the scaling law to a lifespan CSV (default lifespan.csv in the
    output directory).
    """
    name = "fit"
    columns = ["law", "slope", "intercept", "r2", "predicted_slope", "points",
               "passed"]

    def __init__(self, config, law=None, input=None, **kwargs):
        super(FitExperiment, self).__init__(config, **kwargs)
        self.law = law or config["fit.law"]
        self.input = input or os.path.join(self.output, "lifespan.csv")

    def run(self):
        if not os.path.exists(self.input):
            raise ValueError("no lifespan CSV at %s" % self.input)
        results, n, p = results_from_csv(self.input)
        expo = Exponents(n or self.config.n, p or self.config.p)
        report = fit_scaling(results, expo, self.law)
        passed = report.passed()
        self.save_csv("fit.csv", self.columns, [[
            report.law, report.slope, report.intercept, report.r2,
            report.predicted_slope, len(report.points), passed]],
            source=self.input)
        eps = np.array([e for e, _ in report.points])
        T = [t for _, t in report.points]
        if self.law == "subcritical":
            x, xlabel = eps, "epsilon"
        else:
            x, xlabel = eps ** (-expo.p * (expo.p - 1.0)), "eps^(-p(p-1))"
        self.save_svg("fit.svg", x, T, slope=report.slope,
                      intercept=report.intercept,
                      logx=self.law == "subcritical", xlabel=xlabel,
                      ylabel="T_hat", title="%s fit" % self.law)
        if not passed:
            logger.warning("[!] Fit failed: %s" % report)
        return passed
