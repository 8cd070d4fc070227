# -*- coding: UTF-8 -*-
import logging
import sys

from ..util import csv_text, write_file


logger = logging.getLogger('WAVELAB')


class BaseExperiment(object):
    """
    A base class for common experiment functionality like loglevel
    parsing & setup and result file saving. Subclasses implement run(),
    which returns True when every check passed.
    """
    name = None

    def __init__(self, config, output=None, svg=False, loglevel=None,
                 stdout=False, jobs=None, **kwargs):
        self.setup_logging(loglevel=loglevel, stdout=stdout)
        self.config = config
        self.output = output or config["out"]
        self.svg = svg
        self.jobs = jobs or config["jobs"]
        self.saved = []

    def setup_logging(self, loglevel=None, stdout=False):
        if loglevel == "DEBUG":
            loglevel = logging.DEBUG
        elif not loglevel or loglevel == "INFO":
            loglevel = logging.INFO
        elif loglevel == "WARN":
            loglevel = logging.WARN
        elif loglevel == "ERROR":
            loglevel = logging.ERROR
        else:
            raise ValueError("Unknown loglevel: %s" % loglevel)

        logger.setLevel(loglevel)
        if stdout and not any(getattr(h, "wavelab_console", False)
                              for h in logger.handlers):
            console_handler = logging.StreamHandler(stream=sys.stdout)
            console_handler.wavelab_console = True
            logger.addHandler(console_handler)

    def header(self, **extra):
        header = self.config.as_header()
        header["subcommand"] = self.name
        header.update(extra)
        return header

    def save_csv(self, filename, columns, rows, **extra):
        """
        Write rows under the resolved configuration header. Returns the
        written path (or HTTP status in callback mode).
        """
        text = csv_text(columns, rows, self.header(**extra))
        logger.info("[+] Saving %s rows to %s" % (len(rows), filename))
        saved = write_file(filename, text, fileclass="csv",
                           output=self.output)
        self.saved.append(saved)
        return saved

    def save_svg(self, filename, x, y, slope=None, intercept=None, **kwargs):
        if not self.svg:
            return None
        # matplotlib loads only for --svg
        from ..util.plotting import loglog_svg
        svg = loglog_svg(x, y, slope=slope, intercept=intercept, **kwargs)
        logger.info("[+] Saving plot to %s" % filename)
        saved = write_file(filename, svg, fileclass="svg", output=self.output)
        self.saved.append(saved)
        return saved

    def run(self):
        raise NotImplementedError("%s has no run()" % type(self).__name__)
