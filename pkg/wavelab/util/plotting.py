# -*- coding: UTF-8 -*-
import io
import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


logger = logging.getLogger('WAVELAB')


# fixed ids and no timestamp keep the SVG text stable across runs
matplotlib.rcParams["svg.hashsalt"] = "wavelab"


def loglog_svg(x, y, slope=None, intercept=None, xlabel="x", ylabel="y",
               title=None, logx=True):
    """
    Scatter of (x, y) on log axes with the fitted line
    log y = slope * X + intercept, where X is log x (or x when logx is
    False). Returns the SVG document as text.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    try:
        ax.plot(x, y, "o", color="black", markersize=4, label="runs")
        if slope is not None and intercept is not None and len(x):
            xs = np.linspace(np.min(x), np.max(x), 100)
            base = np.log(xs) if logx else xs
            ax.plot(xs, np.exp(slope * base + intercept), "-", color="tab:red",
                    label="fit, slope %.3f" % slope)
        if logx:
            ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", bbox_inches="tight",
                    metadata={"Date": None})
    finally:
        plt.close(fig)
    return buf.getvalue()
