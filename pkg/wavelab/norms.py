# -*- coding: UTF-8 -*-
"""
Exponents, the three-case weight w(r, t) and the growth factors of the
a priori estimates, plus an empirical probe of the basic estimate.
"""
import logging
import math

import numpy as np

from .duhamel import DuhamelSpec, apply_N_point
from .fields import SpaceTimeField
from .sphmeans import check_dimension


logger = logging.getLogger('WAVELAB')


# relative tolerance for deciding that p sits exactly on a threshold
EXACT = 1e-9


def zeta(p, n):
    return 2.0 * (1.0 + (n - 1) * p - (n - 2) * p ** 2)


def p1(n):
    """
    Positive root of zeta(., n).
    """
    n = check_dimension(n)
    return (n - 1 + math.sqrt(n * n + 2 * n - 7)) / (2.0 * (n - 2))


def gamma_strauss(p, n):
    return 2.0 + (n + 1) * p - (n - 1) * p ** 2


def p0(n):
    """
    Positive root of gamma_strauss(., n). Its discriminant is
    n^2 + 10n - 7.
    """
    n = check_dimension(n)
    return (n + 1 + math.sqrt(n * n + 10 * n - 7)) / (2.0 * (n - 1))


def p0_as_printed(n):
    """
    The closed form with discriminant n^2 + 10n + 7. It is not a root of
    gamma_strauss and is kept for reports only.
    """
    n = check_dimension(n)
    return (n + 1 + math.sqrt(n * n + 10 * n + 7)) / (2.0 * (n - 1))


def zeta_p1(n, p):
    if p <= 1:
        raise ValueError("p must be > 1, got %s" % p)
    return zeta(p, n), p1(n)


def _compare(p, threshold):
    if abs(p - threshold) <= EXACT * max(1.0, threshold):
        return 0
    return 1 if p > threshold else -1


class Exponents(object):
    def __init__(self, n, p):
        self.n = check_dimension(n)
        self.p = float(p)
        if self.p <= 1:
            raise ValueError("p must be > 1, got %s" % p)

    @property
    def qbar(self):
        return (self.n - 2) * self.p - (self.n - 1)

    @property
    def zeta(self):
        return zeta(self.p, self.n)

    @property
    def gamma(self):
        return gamma_strauss(self.p, self.n)

    @property
    def p1(self):
        return p1(self.n)

    @property
    def p0(self):
        return p0(self.n)

    @property
    def p_weight(self):
        """
        (n-1)/(n-2), where qbar changes sign.
        """
        return (self.n - 1.0) / (self.n - 2.0)

    @property
    def weight_case(self):
        return {1: "super", 0: "critical", -1: "sub"}[
            _compare(self.p, self.p_weight)]

    @property
    def regime(self):
        """
        Position of p against p1(n): global existence above, exponential
        lifespan at, power-law lifespan below.
        """
        return {1: "supercritical", 0: "critical", -1: "subcritical"}[
            _compare(self.p, self.p1)]

    @property
    def lifespan_exponent(self):
        """
        2p(p-1)/zeta(p, n), the power of 1/eps in the subcritical lifespan.
        """
        z = self.zeta
        if z == 0:
            return math.inf
        return 2.0 * self.p * (self.p - 1.0) / z

    def as_dict(self):
        return {"n": self.n, "p": self.p, "qbar": self.qbar,
                "zeta": self.zeta, "p1": self.p1, "p0": self.p0}

    def __repr__(self):
        return "Exponents(n=%s, p=%s, qbar=%.6g, zeta=%.6g, %s)" % (
            self.n, self.p, self.qbar, self.zeta, self.regime)


def tau_pm(k, r, t):
    return (t + r + 2.0 * k) / k, (t - r + 2.0 * k) / k


def log_ratio(tau_plus, tau_minus):
    """
    log(4 tau_+ / tau_-), the only reading of the logarithm used here.
    """
    return np.log(4.0 * tau_plus / tau_minus)


def default_delta(a2=0.0, a3=0.0):
    return min(0.1, (1.0 + abs(a2)) / (2.0 * a3 + 1.0))


class WeightSpec(object):
    def __init__(self, k, exponents, delta=None):
        self.k = float(k)
        self.exponents = exponents
        self.delta = default_delta() if delta is None else float(delta)
        if self.k <= 0:
            raise ValueError("k must be positive, got %s" % k)
        if self.delta <= 0:
            raise ValueError("delta must be positive, got %s" % delta)

    @property
    def n(self):
        return self.exponents.n

    @property
    def p(self):
        return self.exponents.p

    def growth_base(self, T):
        return (2.0 * T + 3.0 * self.k) / self.k

    def __repr__(self):
        return "WeightSpec(k=%s, %s, delta=%s)" % (
            self.k, self.exponents, self.delta)


def weight_w(spec, r, t):
    expo = spec.exponents
    n, qbar = expo.n, expo.qbar
    tp, tm = tau_pm(spec.k, np.asarray(r, dtype=float),
                    np.asarray(t, dtype=float))
    if np.any(tm <= 0):
        raise ValueError("weight needs t - r + 2k > 0")
    case = expo.weight_case
    if case == "super":
        w = tp ** (n - 2) * tm ** qbar
    elif case == "critical":
        w = tp ** (n - 2) / log_ratio(tp, tm)
    else:
        w = tp ** (n - 2 + qbar)
    return w if np.ndim(w) else float(w)


def weighted_norm(spec, U):
    """
    max of w |U| over the filled nodes with r <= t + k.
    """
    last = U.filled_up_to
    if last < 0:
        return 0.0
    lattice = U.lattice
    R, T = np.meshgrid(lattice.r, lattice.t[:last + 1], indexing="ij")
    inside = R <= T + spec.k
    if not np.any(inside):
        return 0.0
    w = weight_w(spec, R[inside], T[inside])
    return float(np.max(w * np.abs(U.values[:, :last + 1][inside])))


def slice_weighted_norm(spec, U, j):
    lattice = U.lattice
    t = lattice.t[j]
    r = lattice.r[lattice.r <= t + spec.k]
    if not r.size:
        return 0.0
    w = weight_w(spec, r, np.full(r.shape, t))
    return float(np.max(w * np.abs(U.slice(j)[:r.size])))


def E_nu(spec, T, nu):
    expo = spec.exponents
    X = spec.growth_base(T)
    case = expo.weight_case
    if case == "super":
        return 1.0
    if case == "critical":
        return X ** (nu * spec.delta)
    return X ** (-nu * expo.qbar)


def E_p(spec, T):
    expo = spec.exponents
    X = spec.growth_base(T)
    regime = expo.regime
    if regime == "supercritical":
        return 1.0
    if regime == "critical":
        return math.log(X)
    return X ** (expo.zeta / 2.0)


def E_factors(spec, T, nu):
    p = spec.p
    if nu < 0 or nu > p * (1.0 + EXACT):
        raise ValueError("nu must lie in [0, p], got %s" % nu)
    if abs(nu - p) <= EXACT * p:
        return E_p(spec, T)
    return E_nu(spec, T, nu)


def E_case(a2, a3):
    if a3 < 0:
        raise ValueError("a3 must be >= 0, got %s" % a3)
    if a2 > -1:
        return "power"
    if a3 > 0:
        return "delta"
    if a2 == -1:
        return "log"
    return "bounded"


def E_general(k, T, a1, a2, a3, delta):
    """
    Growth factor of the basic estimate for the source
    tau_+^(-(n-2)p+a1) tau_-^a2 log(4 tau_+/tau_-)^a3.
    """
    if a1 < 0:
        raise ValueError("a1 must be >= 0, got %s" % a1)
    X = (2.0 * T + 3.0 * k) / k
    case = E_case(a2, a3)
    if case == "bounded":
        return 1.0
    if case == "log":
        return math.log(X)
    if case == "delta":
        return X ** (delta * a3)
    return X ** (1.0 + a2)


def apriori_exponents(expo, nu):
    """
    (a1, a2, a3) with |U0|^(p-nu) |U|^nu bounded by the basic-estimate
    source, for U0 of size tau_+^(-(n-2)) and U of weighted norm 1.
    """
    if nu < 0 or nu > expo.p * (1.0 + EXACT):
        raise ValueError("nu must lie in [0, p], got %s" % nu)
    case = expo.weight_case
    if case == "super":
        return (0.0, -expo.qbar * nu, 0.0)
    if case == "critical":
        return (0.0, 0.0, float(nu))
    return (-expo.qbar * nu, 0.0, 0.0)


def basic_source(spec, a1, a2, a3, amplitude=1.0):
    """
    The source function (lam, tau) -> amplitude tau_+^(-(n-2)p+a1)
    tau_-^a2 log(4 tau_+/tau_-)^a3, cut off at lam > tau + k.
    """
    expo = spec.exponents
    k = spec.k

    def source(lam, tau):
        tp, tm = tau_pm(k, lam, tau)
        inside = lam <= tau + k
        tm = np.where(inside, tm, 1.0)
        value = tp ** (-(expo.n - 2) * expo.p + a1) * tm ** a2
        if a3:
            value = value * log_ratio(tp, tm) ** a3
        return np.where(inside, amplitude * value, 0.0)

    return source


class ProbeReport(object):
    def __init__(self, case, a, T, ratios, points):
        self.case = case
        self.a = a
        self.T = T
        self.ratios = ratios
        self.points = points

    @property
    def sup_ratio(self):
        return float(np.max(self.ratios)) if len(self.ratios) else 0.0

    @property
    def witness(self):
        if not len(self.ratios):
            return None
        return self.points[int(np.argmax(self.ratios))]

    def __repr__(self):
        return "ProbeReport(case=%s, a=%s, T=%s, sup_ratio=%.6g)" % (
            self.case, self.a, self.T, self.sup_ratio)


def probe_points(spec, T, samples, seed=0):
    """
    Random (r, t) with 0 < t <= T and 0 < r <= t + k. Only the seed
    fixes them, so refined grids see the same points.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.05, 1.0, samples) * T
    r = rng.uniform(0.02, 1.0, samples) * (t + spec.k)
    return list(zip(r, t))


def basic_estimate_probe(spec, a1, a2, a3, T, grid, samples=32, seed=0,
                         amplitude=1.0, duhamel=None):
    """
    LHS w(r,t) / (k^2 ((2T+3k)/k)^a1 E(T)) over sampled points, where
    LHS is N applied to the basic source sampled on grid.
    """
    if grid.t_max + 1e-12 < T:
        raise ValueError("grid reaches t=%s, probe needs T=%s" % (
            grid.t_max, T))
    grid.validate(spec.k)
    duhamel = duhamel or DuhamelSpec(spec.n, k=spec.k)
    delta = spec.delta
    source = SpaceTimeField.from_function(
        grid, basic_source(spec, a1, a2, a3, amplitude))
    norm = spec.k ** 2 * spec.growth_base(T) ** a1 * \
        E_general(spec.k, T, a1, a2, a3, delta)

    points = probe_points(spec, T, samples, seed)
    ratios = np.zeros(len(points))
    for i, (r, t) in enumerate(points):
        lhs = apply_N_point(duhamel, source, r, t)
        ratios[i] = lhs * weight_w(spec, r, t) / norm
    report = ProbeReport(E_case(a2, a3), (a1, a2, a3), T, ratios, points)
    logger.info("[+] %s" % report)
    return report


class LogBoundReport(object):
    def __init__(self, samples, worst, witness):
        self.samples = samples
        self.worst = worst
        self.witness = witness

    @property
    def passed(self):
        return self.worst <= 0.0

    def __repr__(self):
        return "LogBoundReport(samples=%s, worst=%.3e)" % (
            self.samples, self.worst)


def check_log_bound(samples, seed=0):
    """
    Audit log X <= X^delta / delta for X >= 1, delta in (0, 2]. worst is
    the largest log X - X^delta/delta seen.
    """
    rng = np.random.default_rng(seed)
    X = np.exp(rng.uniform(0.0, 50.0, samples))
    delta = rng.uniform(1e-3, 2.0, samples)
    gap = np.log(X) - np.exp(delta * np.log(X)) / delta
    i = int(np.argmax(gap))
    return LogBoundReport(samples, float(gap[i]), (float(X[i]), float(delta[i])))
