# -*- coding: UTF-8 -*-
"""
The free part V of the integral equation for radial data f, g:

    V(r, t) = t/(n-2) d/dt M_f(r, t) + M_f(r, t) + t M_g(r, t)

where M_b(r, t) is the mean of b over the sphere of radius t centered at
a point of norm r.
"""
import logging

import numpy as np

from .fields import SpaceTimeField
from .sphmeans import (
    QuadratureSpec, check_dimension, identity_integral, mean_constant,
    spherical_mean
)
from .util import fit_line


logger = logging.getLogger('WAVELAB')


class LinearPartSpec(object):
    """
    Data of the linear problem. dt_fd is the step of the time derivative
    of the f-mean and defaults to 1e-3 k.
    """

    def __init__(self, f, g, n, dt_fd=None, q=None):
        self.f = f
        self.g = g
        self.n = check_dimension(n)
        self.q = q or QuadratureSpec()
        self.dt_fd = float(dt_fd) if dt_fd else 1e-3 * self.k
        if self.dt_fd <= 0:
            raise ValueError("dt_fd must be positive, got %s" % dt_fd)

    @property
    def k(self):
        return max(self.f.k, self.g.k)

    @property
    def blowup_data(self):
        return self.f.family == "zero"

    def __repr__(self):
        return "LinearPartSpec(f=%s, g=%s, n=%s, dt_fd=%s)" % (
            self.f, self.g, self.n, self.dt_fd)


def profile_mean(spec, b, r, t, breaks=None):
    """
    Spherical mean of the profile (or callable) b; the zero profile
    short-circuits to exact zeros.
    """
    if getattr(b, "family", None) == "zero":
        shape = np.broadcast(np.asarray(r), np.asarray(t)).shape
        return np.zeros(shape) if shape else 0.0
    return spherical_mean(b, r, t, spec.n, q=spec.q, breaks=breaks)


def dt_mean(spec, b, r, t):
    """
    d/dt of the mean of b, by central differences with steps h and h/2
    combined by one Richardson step. The mean is even in t, so negative
    arguments are fine.
    """
    h = spec.dt_fd
    t = np.asarray(t, dtype=float)

    def central(step):
        return (profile_mean(spec, b, r, t + step) -
                profile_mean(spec, b, r, t - step)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def eval_V(spec, r, t):
    n = spec.n
    t = np.asarray(t, dtype=float)
    if np.any(np.asarray(r) < 0) or np.any(t < 0):
        raise ValueError("r and t must be nonnegative")
    value = profile_mean(spec, spec.f, r, t) + t * profile_mean(spec, spec.g, r, t)
    if spec.f.family != "zero":
        value = value + t / (n - 2.0) * dt_mean(spec, spec.f, r, t)
    return value if np.ndim(value) else float(value)


def eval_V_blowup(spec, r, t):
    """
    V for f = 0, evaluated directly as

        C r^(2-n) t^(3-n) int_{|t-r|}^{t+r} lam g(lam) h(lam, t, r) dlam

    with C = 2^(3-n) omega_{n-1} / omega_n, on a finer rule than
    spherical_mean uses.
    """
    if not spec.blowup_data:
        raise ValueError("eval_V_blowup needs f = 0, got %s" % spec.f)
    n = spec.n
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float),
                               np.asarray(t, dtype=float))
    scalar = r.ndim == 0
    r = np.atleast_1d(r).astype(float)
    t = np.atleast_1d(t).astype(float)
    if np.any(r <= 0) or np.any(t < 0):
        raise ValueError("eval_V_blowup needs r > 0 and t >= 0")

    out = np.zeros(r.shape)
    g = spec.g
    live = (t > 0) & (np.abs(t - r) < g.k)
    if np.any(live) and g.family != "zero":
        nodes, weights = spec.q.rule(spec.q.base_order + 4)
        ra, ta = r[live], t[live]
        integral = identity_integral(g, ra, ta, n, nodes, weights, g.breaks)
        out[live] = mean_constant(n) * ra ** (2.0 - n) * \
            ta ** (3.0 - n) * integral
    return float(out[0]) if scalar else out


def eval_V_field(spec, lattice, eps=1.0):
    """
    eps V on every node of the lattice.
    """
    field = SpaceTimeField(lattice)
    r = lattice.r
    for j, t in enumerate(lattice.t):
        field.set_slice(j, eps * eval_V(spec, r, np.full(r.shape, t)))
    return field


class HuygensReport(object):
    def __init__(self, max_outside, max_overall, margin):
        self.max_outside = max_outside
        self.max_overall = max_overall
        self.margin = margin

    @property
    def ratio(self):
        if self.max_overall == 0:
            return 0.0
        return self.max_outside / self.max_overall

    def passed(self, rtol=1e-6):
        return self.ratio <= rtol

    def __repr__(self):
        return "HuygensReport(max_outside=%.3e, max_overall=%.3e)" % (
            self.max_outside, self.max_overall)


def check_huygens(spec, lattice, margin=0.05, field=None):
    """
    Largest |V| outside the shell |t - r| <= k (1 + margin), against the
    largest |V| anywhere on the lattice.
    """
    if field is None:
        field = eval_V_field(spec, lattice)
    R, T = np.meshgrid(lattice.r, lattice.t, indexing="ij")
    outside = np.abs(T - R) > spec.k * (1.0 + margin)
    values = np.abs(field.values)
    max_outside = float(np.max(values[outside])) if np.any(outside) else 0.0
    report = HuygensReport(max_outside, float(np.max(values)), margin)
    logger.info("[+] Huygens check: %s" % report)
    return report


def check_initial_trace(spec, r, step=None):
    """
    (max |V(r,0) - f(r)|, max |d/dt V(r,0) - g(r)|), the time derivative
    taken one-sided with second order.
    """
    step = step or 10.0 * spec.dt_fd
    r = np.asarray(r, dtype=float)
    v0 = eval_V(spec, r, np.zeros(r.shape))
    v1 = eval_V(spec, r, np.full(r.shape, step))
    v2 = eval_V(spec, r, np.full(r.shape, 2.0 * step))
    dv = (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * step)
    e_value = float(np.max(np.abs(v0 - spec.f(r))))
    e_deriv = float(np.max(np.abs(dv - spec.g(r))))
    return e_value, e_deriv


class DecayReport(object):
    """
    sup_weighted is the sup of (t + r + 2k)^(n-2) |V|; windows holds
    (t_lo, t_hi, max) per dyadic time window [2^m k, 2^(m+1) k).
    """

    def __init__(self, n, k, times, max_abs, weighted, windows):
        self.n = n
        self.k = k
        self.times = times
        self.max_abs = max_abs
        self.weighted = weighted
        self.windows = windows

    @property
    def sup_weighted(self):
        return float(np.max(self.weighted)) if len(self.weighted) else 0.0

    @property
    def window_spread(self):
        """
        max/min of the window maxima from the third window on.
        """
        maxima = [m for _, _, m in self.windows[2:] if m > 0]
        if len(maxima) < 2:
            return 1.0
        return max(maxima) / min(maxima)

    def series(self):
        """
        (t, max |V|, weighted, max of the dyadic window holding t) per
        time; the window maximum is None below the first window.
        """
        rows = []
        for t, top, weighted in zip(self.times, self.max_abs, self.weighted):
            window = [m for lo, hi, m in self.windows if lo <= t < hi]
            rows.append((t, top, weighted, window[0] if window else None))
        return rows

    def slope(self, t_lo=None, t_hi=None):
        t_lo = 10.0 * self.k if t_lo is None else t_lo
        t_hi = 100.0 * self.k if t_hi is None else t_hi
        sel = (self.times >= t_lo) & (self.times <= t_hi) & (self.max_abs > 0)
        if np.count_nonzero(sel) < 2:
            return None
        slope, _, _ = fit_line(np.log(self.times[sel]), np.log(self.max_abs[sel]))
        return slope

    def passed(self, spread=3.0, slope_tol=0.1):
        slope = self.slope()
        ok = self.window_spread <= spread
        if slope is not None:
            ok = ok and abs(slope + (self.n - 2)) <= slope_tol
        return ok

    def __repr__(self):
        return "DecayReport(n=%s, sup_weighted=%.6g, spread=%.3f, slope=%s)" % (
            self.n, self.sup_weighted, self.window_spread, self.slope())


def verify_decay(spec, grid):
    """
    Walk the times of grid and evaluate V on the radii of grid inside
    the shell |t - r| <= k, where V lives.
    """
    n, k = spec.n, spec.k
    r_all = grid.r
    times = grid.t
    max_abs = np.zeros(times.shape)
    weighted = np.zeros(times.shape)
    for j, t in enumerate(times):
        r = r_all[np.abs(r_all - t) <= k]
        if not r.size:
            continue
        v = np.abs(eval_V(spec, r, np.full(r.shape, t)))
        max_abs[j] = np.max(v)
        weighted[j] = np.max((t + r + 2.0 * k) ** (n - 2) * v)
        if j and j % 100 == 0:
            logger.debug(" - decay t=%.3f max|V|=%.3e" % (t, max_abs[j]))

    windows = []
    top = times[-1] if len(times) else 0.0
    m = 0
    while k * 2 ** m <= top:
        lo, hi = k * 2 ** m, k * 2 ** (m + 1)
        sel = (times >= lo) & (times < hi)
        if np.any(sel):
            windows.append((lo, hi, float(np.max(weighted[sel]))))
        m += 1
    report = DecayReport(n, k, times, max_abs, weighted, windows)
    logger.info("[+] %s" % report)
    return report
