# -*- coding: UTF-8 -*-
"""
One-dimensional comparison equations for blow-up data (f = 0, g > 0 on
(k0, k)). Each frame is marched as the equality

    W(xi) = D_n xi^a int_{2k}^{xi} K(xi, beta) |W(beta)|^p dbeta + E2 eps^p

and the first xi where W passes the cap is reported as xi*. All frames
march in x = log xi on a uniform grid, where they take the common form

    W(x) = D_n e^(c0 x) int_{x0}^{x} (1 - e^s)^(n-2) e^(b s) |W(y)|^p dy
           + E2 eps^p,            s = y - x,

with c0 = 1 - p qbar and b depending on the frame.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .linear_part import eval_V_blowup
from .norms import p1
from .sphmeans import mean_constant
from .util import fit_line, refine_crossing


logger = logging.getLogger('WAVELAB')


FRAMES = ("general", "critical", "subcritical")


class LowerBoundFit(object):
    """
    Fitted constant C with V(r, t) >= C / r^(n-2) for t + k0 < r < t + k1,
    per sampled t. C is the smallest of the per-t constants; spread is
    their half-range relative to the midpoint, so every per-t constant
    lies within +-spread of (max + min) / 2.
    """

    def __init__(self, t_values, constants):
        self.t_values = np.asarray(t_values, dtype=float)
        self.constants = np.asarray(constants, dtype=float)

    @property
    def C(self):
        return float(np.min(self.constants))

    @property
    def spread(self):
        lo, hi = np.min(self.constants), np.max(self.constants)
        if lo <= 0:
            return math.inf
        return float((hi - lo) / (hi + lo))

    def stable(self, tol=0.2):
        return self.spread <= tol

    def __repr__(self):
        return "LowerBoundFit(C=%.6g, spread=%.3f, points=%s)" % (
            self.C, self.spread, len(self.t_values))


def fit_lower_constant(spec, t_values=None, samples=64):
    """
    min over t + k0 < r < t + k1 of V(r, t) r^(n-2), for t in t_values
    (default ten points of [k2, 10 k2]).
    """
    g = spec.g
    if not spec.blowup_data or g.family != "annular_bump":
        raise ValueError("fit_lower_constant needs f = 0 and annular g")
    k, k0 = g.k, g.k0
    k1, k2 = 0.5 * (k + k0), k - k0
    if t_values is None:
        t_values = np.linspace(k2, 10.0 * k2, 10)
    t_values = np.asarray(t_values, dtype=float)
    if np.any(t_values < k2 * (1.0 - 1e-12)):
        raise ValueError("the lower bound holds for t >= k2 = %s" % k2)

    # open interval (k0, k1) without its endpoints
    offsets = k0 + (k1 - k0) * (np.arange(samples) + 0.5) / samples
    constants = []
    for t in t_values:
        r = t + offsets
        v = eval_V_blowup(spec, r, np.full(r.shape, t))
        constants.append(float(np.min(v * r ** (spec.n - 2))))
    fit = LowerBoundFit(t_values, constants)
    logger.info("[+] %s" % fit)
    return fit


class ComparisonConstants(object):
    def __init__(self, n, k, k0, C_ngk):
        self.n = int(n)
        self.k = float(k)
        self.k0 = float(k0)
        self.C_ngk = float(C_ngk)
        if not 0 <= self.k0 < self.k:
            raise ValueError("Need 0 <= k0 < k, got k0=%s, k=%s" % (k0, k))
        if self.C_ngk <= 0:
            raise ValueError("C_ngk must be positive, got %s" % C_ngk)

    @classmethod
    def from_data(cls, spec, t_values=None):
        fit = fit_lower_constant(spec, t_values)
        return cls(spec.n, spec.g.k, spec.g.k0, fit.C)

    @property
    def k1(self):
        return 0.5 * (self.k + self.k0)

    @property
    def k2(self):
        return self.k - self.k0

    @property
    def cbar(self):
        return mean_constant(self.n) / (self.n - 2.0)

    @property
    def D_n(self):
        return self.cbar / (2.0 ** (self.n - 2) * (self.n - 1))

    def E1(self, p):
        n = self.n
        return self.cbar * self.C_ngk ** p * (self.k1 - self.k0) / (
            (n - 1) * 2.0 ** ((n - 2) * p - (3 * n - 11) / 2.0))

    def E2(self, p):
        return self.E1(p) / 2.0 ** ((3 * self.n - 5) / 2.0)

    def __repr__(self):
        return "ComparisonConstants(n=%s, k=%s, k0=%s, C_ngk=%.6g)" % (
            self.n, self.k, self.k0, self.C_ngk)


def frame_exponents(frame, expo):
    """
    (c0, b) of the log-grid form of each frame.
    """
    n, p, qbar = expo.n, expo.p, expo.qbar
    c0 = 1.0 - p * qbar
    if frame == "general":
        return c0, 1.0 - (n - 2) * p - p * qbar
    if frame == "critical":
        if abs(p - p1(n)) > 1e-9:
            raise ValueError("critical frame needs p = p1(%s) = %.12g, got %s" % (
                n, p1(n), p))
        return c0, 1.0 - p * qbar
    if frame == "subcritical":
        if not 1.0 < p < p1(n):
            raise ValueError("subcritical frame needs 1 < p < p1(%s) = %.6g" % (
                n, p1(n)))
        return c0, 1.0
    raise ValueError("Unknown frame: %s" % frame)


def regime_frame(expo):
    """
    The frame matching the regime of p: subcritical below p1(n), critical
    at it, general above.
    """
    return {"subcritical": "subcritical", "critical": "critical",
            "supercritical": "general"}[expo.regime]


def log_grid(k, span, dx):
    """
    Uniform grid in log xi from log 2k over span.
    """
    if span <= 0 or dx <= 0:
        raise ValueError("span and dx must be positive")
    count = int(math.ceil(span / dx))
    return math.log(2.0 * k) + dx * np.arange(count + 1)


class _CellWeights(object):
    """
    Integrals of K(-(d - s) dx) against the hat functions (1 - s) and s
    on the cell s in [0, 1] at distance d cells, d = 1, 2, ...; computed
    on demand by Gauss-Legendre and cached.
    """

    def __init__(self, n, b, dx, order=8):
        self.n = n
        self.b = b
        self.dx = dx
        x, w = np.polynomial.legendre.leggauss(order)
        self.s = 0.5 * (x + 1.0)
        self.w = 0.5 * w
        self.A = np.zeros(1)
        self.B = np.zeros(1)

    def kernel(self, s):
        return (-np.expm1(s)) ** (self.n - 2) * np.exp(self.b * s)

    def extend(self, size):
        have = len(self.A)
        if size <= have:
            return
        size = max(size, 2 * have)
        d = np.arange(have, size)[:, None]
        K = self.kernel(-(d - self.s[None, :]) * self.dx)
        self.A = np.concatenate([self.A, self.dx * np.sum(
            self.w * K * (1.0 - self.s), axis=1)])
        self.B = np.concatenate([self.B, self.dx * np.sum(
            self.w * K * self.s, axis=1)])


class WMarch(object):
    """
    Result of one march. log_xi_star is None when W stayed below the cap
    on the whole grid.
    """

    def __init__(self, frame, epsilon, x, W, log_xi_star, cap):
        self.frame = frame
        self.epsilon = epsilon
        self.x = x
        self.W = W
        self.log_xi_star = log_xi_star
        self.cap = cap

    @property
    def blew_up(self):
        return self.log_xi_star is not None

    @property
    def xi_star(self):
        if self.log_xi_star is None:
            return None
        try:
            return math.exp(self.log_xi_star)
        except OverflowError:
            return math.inf

    @property
    def xi(self):
        return np.exp(self.x)

    def W_at(self, xi):
        """
        W interpolated linearly in log xi; nan beyond the marched range.
        """
        x = np.log(np.asarray(xi, dtype=float))
        return np.interp(x, self.x, self.W, left=np.nan, right=np.nan)

    def __repr__(self):
        return "WMarch(frame=%s, eps=%s, log_xi_star=%s, nodes=%s)" % (
            self.frame, self.epsilon, self.log_xi_star, len(self.x))


def _march(frame, consts, expo, eps, x, cap, weights=None):
    n, p = expo.n, expo.p
    x = np.asarray(x, dtype=float)
    if abs(x[0] - math.log(2.0 * consts.k)) > 1e-9:
        raise ValueError("the grid must start at log(2k)")
    dx = x[1] - x[0] if len(x) > 1 else 1.0
    if len(x) > 2 and np.max(np.abs(np.diff(x) - dx)) > 1e-9 * max(1.0, dx):
        raise ValueError("the log xi grid must be uniform")
    c0, b = frame_exponents(frame, expo)
    weights = weights or _CellWeights(n, b, dx)
    weights.extend(len(x) + 2)
    A, B = weights.A, weights.B
    D = consts.D_n
    W0 = consts.E2(p) * eps ** p

    W = np.zeros(len(x))
    P = np.zeros(len(x))
    W[0] = W0
    P[0] = abs(W0) ** p
    if W0 > cap:
        return WMarch(frame, eps, x[:1], W[:1], x[0], cap)

    for i in range(1, len(x)):
        # the cell next to node i uses the left value only
        history = np.dot(A[i:0:-1], P[:i]) + np.dot(B[i:1:-1], P[1:i]) + \
            B[1] * P[i - 1]
        with np.errstate(over="ignore", invalid="ignore"):
            W[i] = W0 + D * np.exp(c0 * x[i]) * history
            P[i] = abs(W[i]) ** p
        if not np.isfinite(W[i]) or W[i] > cap:
            star = refine_crossing(x[i - 1], x[i], W[i - 1], W[i], cap)
            return WMarch(frame, eps, x[:i], W[:i], star, cap)
    return WMarch(frame, eps, x, W, None, cap)


def march_W(consts, expo, eps, xi_grid, cap=1e6):
    """
    The general frame on the log xi grid xi_grid.
    """
    return _march("general", consts, expo, eps, xi_grid, cap)


def march_W_critical(consts, expo, eps, xi_grid, cap=1e6):
    return _march("critical", consts, expo, eps, xi_grid, cap)


def march_W_subcritical(consts, expo, eps, xi_grid, cap=1e6):
    return _march("subcritical", consts, expo, eps, xi_grid, cap)


def default_dx(frame, consts, expo, eps, dx=0.02, nodes=2000):
    """
    dx, widened when e^(c0 x) does not grow: W then behaves like the
    solution of W' = D_n W^p, which passes any cap near
    x = W0^(1-p) / (D_n (p-1)), and the grid gets about nodes cells up
    to there.
    """
    c0, _ = frame_exponents(frame, expo)
    W0 = consts.E2(expo.p) * eps ** expo.p
    if c0 > 1e-12 or W0 <= 0:
        return dx
    scale = W0 ** (1.0 - expo.p) / (consts.D_n * (expo.p - 1.0))
    return max(dx, scale / nodes)


def find_xi_star(frame, consts, expo, eps, dx=None, span=4.0, cap=1e6,
                 max_nodes=40000):
    """
    March on growing log grids (span doubled each time) until W passes
    the cap or the grid would exceed max_nodes.
    """
    if eps <= 0:
        return _march(frame, consts, expo, 0.0,
                      log_grid(consts.k, 1.0, dx or 0.02), cap)
    if dx is None:
        dx = default_dx(frame, consts, expo, eps)
    weights = _CellWeights(expo.n, frame_exponents(frame, expo)[1], dx)
    while True:
        x = log_grid(consts.k, span, dx)
        result = _march(frame, consts, expo, eps, x, cap, weights)
        if result.blew_up or 2 * len(x) > max_nodes:
            logger.debug(" - %s" % result)
            return result
        span *= 2.0


def _xi_star_one(args):
    frame, consts, expo, eps, kwargs = args
    return find_xi_star(frame, consts, expo, eps, **kwargs)


def sweep_xi_star(frame, consts, expo, eps_list, jobs=1, **kwargs):
    """
    find_xi_star per eps, in a process pool when jobs > 1. Results come
    back in the order of eps_list.
    """
    tasks = [(frame, consts, expo, float(eps), kwargs) for eps in eps_list]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_xi_star_one, tasks))
    else:
        results = [_xi_star_one(task) for task in tasks]
    for result in results:
        logger.info("[.] %s eps=%s log xi*=%s" % (
            frame, result.epsilon, result.log_xi_star))
    return results


class ScalingFit(object):
    def __init__(self, frame, slope, intercept, r2, predicted_slope,
                 local_exponents):
        self.frame = frame
        self.slope = slope
        self.intercept = intercept
        self.r2 = r2
        self.predicted_slope = predicted_slope
        self.local_exponents = local_exponents

    @property
    def superpolynomial(self):
        """
        |d log xi* / d log eps| strictly increasing as eps decreases.
        """
        mags = [abs(e) for e in self.local_exponents]
        return len(mags) >= 2 and all(b > a for a, b in zip(mags, mags[1:]))

    def __repr__(self):
        return "ScalingFit(frame=%s, slope=%.6g, r2=%.6g, predicted=%s)" % (
            self.frame, self.slope, self.r2, self.predicted_slope)


def local_exponents(results):
    """
    Slopes of log xi* against log eps between consecutive results, eps
    taken in descending order.
    """
    pts = sorted([(r.epsilon, r.log_xi_star) for r in results if r.blew_up],
                 reverse=True)
    return [(b[1] - a[1]) / (math.log(b[0]) - math.log(a[0]))
            for a, b in zip(pts, pts[1:])]


def fit_xi_star(results, expo, frame):
    """
    Power law (log xi* against log eps) for the general and subcritical
    frames, exponential law (log xi* against eps^(-p(p-1))) for the
    critical frame.
    """
    blown = [r for r in results if r.blew_up]
    if len(blown) < 3:
        raise ValueError("need >= 3 blow-up marches, got %s" % len(blown))
    eps = np.array([r.epsilon for r in blown])
    y = np.array([r.log_xi_star for r in blown])
    p = expo.p
    if frame == "critical":
        x = eps ** (-p * (p - 1.0))
        predicted = None
    else:
        x = np.log(eps)
        predicted = -expo.lifespan_exponent
    slope, intercept, r2 = fit_line(x, y)
    fit = ScalingFit(frame, slope, intercept, r2, predicted,
                     local_exponents(blown))
    logger.info("[+] %s" % fit)
    return fit


def reconstruct_w(march, expo, xi):
    """
    w(xi) = W(xi) xi^-(qbar + n - 2).
    """
    xi = np.asarray(xi, dtype=float)
    return march.W_at(xi) * xi ** (-(expo.qbar + expo.n - 2))


def frame_rhs(u, consts, expo, eps, r, t, order=16):
    """
    Right side of the iteration frame at (r, t) in 2k <= t - r <= r: the
    history integral over the characteristic rectangle, in alpha = tau +
    lam and beta = tau - lam, plus the data term.
    """
    n, p = expo.n, expo.p
    k = consts.k
    e = (n - 3) / 2.0
    a = t - r
    data = consts.E1(p) * a ** ((3 * n - 5) / 2.0 - (n - 2) * p) / \
        r ** ((3 * n - 7) / 2.0) * eps ** p
    if a <= 2.0 * k:
        return data

    x, w = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (x + 1.0)
    w = 0.5 * w
    beta = 2.0 * k + (a - 2.0 * k) * s
    wb = (a - 2.0 * k) * w
    lo = 2.0 * a + beta
    hi = t + r
    alpha = lo[:, None] + (hi - lo)[:, None] * s[None, :]
    wa = (hi - lo)[:, None] * w[None, :]
    B = np.broadcast_to(beta[:, None], alpha.shape)
    lam = 0.5 * (alpha - B)
    tau = 0.5 * (alpha + B)
    values = np.abs(u.interp(lam, tau)) ** p
    kern = np.maximum(a - B, 0.0) ** e * np.maximum(hi - alpha, 0.0) ** e
    integral = 0.5 * np.sum(wb[:, None] * wa * kern * values)
    pref = consts.cbar * 2.0 ** e * a ** ((n - 1) / 2.0) / \
        r ** ((3 * n - 7) / 2.0)
    return pref * integral + data


class FrameCheckReport(object):
    def __init__(self, points, frame_violations, w_violations, checked_w):
        self.points = points
        # (r, t, u, rhs) and (r, t, u, w)
        self.frame_violations = frame_violations
        self.w_violations = w_violations
        self.checked_w = checked_w

    @property
    def passed(self):
        return not self.frame_violations and not self.w_violations

    def __repr__(self):
        return ("FrameCheckReport(points=%s, frame_violations=%s, "
                "w_violations=%s, checked_w=%s)" % (
                    len(self.points), len(self.frame_violations),
                    len(self.w_violations), self.checked_w))


def sigma0_points(k, t_top, samples, seed=0):
    """
    Random points of 2k <= t - r <= r with t <= t_top.
    """
    if t_top < 4.0 * k:
        raise ValueError("the region 2k <= t-r <= r needs t >= 4k, have %s" % (
            t_top))
    rng = np.random.default_rng(seed)
    t = rng.uniform(4.0 * k, t_top, samples)
    r = t / 2.0 + rng.uniform(0.0, 1.0, samples) * (t / 2.0 - 2.0 * k)
    return list(zip(r, t))


def frame_check(u, consts, expo, eps, samples=200, seed=0, cap=1e6,
                dx=0.02, rtol=1e-6):
    """
    Audit u >= right side of the iteration frame and u > w on sampled
    points, w rebuilt from the general-frame march.
    """
    lattice = u.lattice
    t_top = lattice.t[u.filled_up_to]
    points = sigma0_points(consts.k, t_top, samples, seed)
    span = max(math.log(max(t - r for r, t in points) / (2.0 * consts.k)), dx)
    march = _march("general", consts, expo, eps,
                   log_grid(consts.k, span + dx, dx), cap)

    frame_bad, w_bad, checked = [], [], 0
    for r, t in points:
        value = float(u.interp(r, t))
        rhs = frame_rhs(u, consts, expo, eps, r, t)
        if value < rhs * (1.0 - rtol):
            frame_bad.append((r, t, value, rhs))
        w = float(reconstruct_w(march, expo, t - r))
        if np.isfinite(w):
            checked += 1
            if not value > w:
                w_bad.append((r, t, value, w))
    report = FrameCheckReport(points, frame_bad, w_bad, checked)
    if not report.passed:
        logger.warning("[!] %s" % report)
    else:
        logger.info("[+] %s" % report)
    return report


