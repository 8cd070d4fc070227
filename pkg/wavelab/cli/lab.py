# -*- coding: UTF-8 -*-
"""
WAVELAB - Solve the radial integral equation u = eps V + N(F(u)) of a
semilinear wave equation in n space dimensions, measure its lifespan
and check the estimates behind it.

Usage:
    wavelab [options] SUBCOMMAND
    wavelab (-h | --help)

Subcommands:
    verify-kernel      Normalization of the spherical mean and the upper
                       bounds of its kernel, per dimension.
    verify-linear      Huygens support, decay and initial traces of V.
    verify-estimates   Exponent identities, the log bound and the
                       basic-estimate probe.
    solve              One solve at a single epsilon.
    lifespan           Lifespan sweep over the epsilon list.
    comparison         Blow-up point of the comparison equation per
                       epsilon, with its scaling fit.
    residual           Residual of the wave equation with loss term, for
                       manufactured and marched solutions.
    fit                Scaling-law fit of a lifespan CSV.

General Options:
    --config PATH
        Flat key=value configuration file. Flags below override it.

    --loglevel LEVEL
        Loglevel, one of DEBUG, INFO, WARN, ERROR.
        [default: INFO]

    --quiet
        This will silence all logging to console.

    --seed N
        Random seed. The WAVELAB_SEED environment variable overrides the
        config file, this flag overrides both.

    --jobs N
        Worker processes for sweeps.

Problem Options:
    --n DIMS
        Dimension, or a list or range of them ("3..6", "3,4").

    --p P
        Power of the nonlinearity.

    --eps EPS
        Comma separated epsilon list. The solve and residual subcommands
        use the first value.

    --samples N
        Random samples for verify-kernel and the log bound.

    --frame FRAME
        Comparison frame: general, critical or subcritical. The default,
        auto, picks the frame of the regime of p.

    --law LAW
        Scaling law for fit: subcritical or critical.

    --input PATH
        Lifespan CSV for fit. Defaults to lifespan.csv in the output
        directory.

Data Saving Options:
    --out DIRECTORY_OR_URL
        Where result files go. This directory will be created if it does
        not currently exist. This can also accept a URL (i.e.,
        http://localhost:5000/files) and WAVELAB will POST each file
        to that endpoint.

    --svg
        Also save log-log plots of the fitted quantities as SVG.
"""
import logging
import sys

from docopt import DocoptExit, docopt

from wavelab.config import ConfigError, ExperimentConfig
from wavelab.experiments.runs import (
    FitExperiment, LifespanExperiment, SolveExperiment
)
from wavelab.experiments.studies import ComparisonExperiment, ResidualExperiment
from wavelab.experiments.verify import (
    EstimateVerification, KernelVerification, LinearVerification
)
from wavelab.util import parse_float_list


logger = logging.getLogger('WAVELAB')


EXPERIMENTS = {
    "verify-kernel": KernelVerification,
    "verify-linear": LinearVerification,
    "verify-estimates": EstimateVerification,
    "solve": SolveExperiment,
    "lifespan": LifespanExperiment,
    "comparison": ComparisonExperiment,
    "residual": ResidualExperiment,
    "fit": FitExperiment,
}

# flag -> config key
FLAG_KEYS = {
    "n": "n",
    "p": "p",
    "seed": "seed",
    "jobs": "jobs",
    "out": "out",
    "samples": "verify.samples",
    "frame": "comparison.frame",
    "law": "fit.law",
}

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def overrides_from(subcommand, args):
    overrides = {key: args.get(flag) for flag, key in FLAG_KEYS.items()}
    eps = args.get("eps")
    if eps:
        if subcommand in ("solve", "residual"):
            overrides["epsilon"] = parse_float_list(eps)[0]
        else:
            overrides["eps_list"] = eps
    return overrides


def run(argv=None):
    try:
        docopt_args = docopt(__doc__, argv=argv)
    except DocoptExit as e:
        sys.stderr.write("%s\n" % e)
        return EXIT_CONFIG

    subcommand = docopt_args.pop("SUBCOMMAND")
    docopt_args.pop("--help", None)
    docopt_args.pop("-h", None)

    # strip the -- and convert - to _
    args = {}
    for option in docopt_args:
        args[option[2:].replace('-', '_')] = docopt_args[option]

    Experiment = EXPERIMENTS.get(subcommand)
    if Experiment is None:
        sys.stderr.write("Unknown subcommand: %s\n" % subcommand)
        return EXIT_CONFIG

    try:
        config = ExperimentConfig.load(args.pop("config"),
                                       overrides_from(subcommand, args))
    except ConfigError as e:
        sys.stderr.write("Configuration error in %s: %s\n" % (e.key, e.message))
        return EXIT_CONFIG

    if args["loglevel"] not in ("DEBUG", "INFO", "WARN", "ERROR"):
        sys.stderr.write("Unknown loglevel: %s\n" % args["loglevel"])
        return EXIT_CONFIG

    kwargs = {
        "loglevel": args["loglevel"],
        "stdout": not args["quiet"],
        "svg": args["svg"],
    }
    if subcommand == "fit":
        kwargs["input"] = args["input"]

    try:
        experiment = Experiment(config, **kwargs)
        logger.debug("WAVELAB %s starting with arguments: %s" % (
            subcommand, docopt_args))
        passed = experiment.run()
    except Exception as e:
        logger.error("[!] %s failed in %s: %s: %s" % (
            subcommand, type(e).__module__, type(e).__name__, e))
        return EXIT_FAILED

    if not passed:
        logger.warning("[!] %s: checks failed" % subcommand)
        return EXIT_FAILED
    logger.info("[+] %s passed" % subcommand)
    return EXIT_OK


def main():
    sys.exit(run())
