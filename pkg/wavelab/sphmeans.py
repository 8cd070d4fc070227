# -*- coding: UTF-8 -*-
"""
Spherical means of radial functions, reduced to one-dimensional integrals
by John's identity:

    int_{|w|=1} b(|x + rho w|) dS_w
        = 2^(3-n) omega_{n-1} (r rho)^(2-n)
          int_{|rho-r|}^{rho+r} lam b(lam) h(lam, rho, r) dlam

with h(lam, rho, r) = {lam^2-(rho-r)^2}^((n-3)/2) {(rho+r)^2-lam^2}^((n-3)/2).
"""
import logging
import math

import numpy as np
from scipy.special import gamma


logger = logging.getLogger('WAVELAB')


class QuadratureError(Exception):
    """
    The embedded error estimate of a spherical mean exceeded abs_tol.
    """

    def __init__(self, estimate, r=None, rho=None):
        self.estimate = estimate
        self.r = r
        self.rho = rho
        super(QuadratureError, self).__init__(
            "Quadrature did not converge: error estimate %.3e at r=%s, rho=%s"
            % (estimate, r, rho))


def check_dimension(n, minimum=3):
    if int(n) != n or n < minimum:
        raise ValueError("Dimension must be an integer >= %s, got %s" % (
            minimum, n))
    return int(n)


def omega_n(n):
    """
    Surface measure of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2).
    """
    n = check_dimension(n, minimum=2)
    return 2.0 * math.pi ** (n / 2.0) / float(gamma(n / 2.0))


def mean_constant(n):
    """
    2^(3-n) omega_{n-1} / omega_n, the constant turning John's identity
    into a mean value.
    """
    return 2.0 ** (3 - n) * omega_n(n - 1) / omega_n(n)


class QuadratureSpec(object):
    """
    Composite Gauss-Legendre rule on [0, 1] whose cells shrink
    geometrically toward both endpoints. levels=0 gives two plain cells.

    small_ratio is the relative threshold below which min(r, rho) is
    treated by the Taylor rule instead of the integral.
    """

    def __init__(self, base_order=8, endpoint_split=0.5, levels=24,
                 abs_tol=1e-8, small_ratio=1e-6, check=True):
        self.base_order = int(base_order)
        self.endpoint_split = float(endpoint_split)
        self.levels = int(levels)
        self.abs_tol = float(abs_tol)
        self.small_ratio = float(small_ratio)
        self.check = bool(check)
        self.validate()
        self._rules = {}

    def validate(self):
        if self.base_order < 2:
            raise ValueError("base_order must be >= 2, got %s" % self.base_order)
        if not 0.0 < self.endpoint_split < 1.0:
            raise ValueError("endpoint_split must lie in (0, 1), got %s" % (
                self.endpoint_split))
        if self.levels < 0:
            raise ValueError("levels must be >= 0, got %s" % self.levels)
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive, got %s" % self.abs_tol)
        if self.small_ratio <= 0:
            raise ValueError("small_ratio must be positive")

    def cells(self):
        """
        Cell edges on [0, 1]: 0, s^L/2, ..., s/2, 1/2 and the mirror image.
        """
        half = [0.5 * self.endpoint_split ** m
                for m in range(self.levels, 0, -1)]
        left = [0.0] + half + [0.5]
        right = [1.0 - e for e in reversed(left[:-1])]
        return np.array(left + right)

    def rule(self, order=None):
        """
        Nodes and weights of the graded rule on [0, 1], cached per order.
        """
        order = order or self.base_order
        if order not in self._rules:
            x, w = np.polynomial.legendre.leggauss(order)
            edges = self.cells()
            lo, hi = edges[:-1], edges[1:]
            width = (hi - lo)[:, None]
            nodes = lo[:, None] + 0.5 * (x[None, :] + 1.0) * width
            weights = 0.5 * w[None, :] * width
            self._rules[order] = (nodes.ravel(), weights.ravel())
        return self._rules[order]

    @property
    def size(self):
        return len(self.rule()[0])

    def with_options(self, **kwargs):
        opts = {
            "base_order": self.base_order,
            "endpoint_split": self.endpoint_split,
            "levels": self.levels,
            "abs_tol": self.abs_tol,
            "small_ratio": self.small_ratio,
            "check": self.check,
        }
        opts.update(kwargs)
        return QuadratureSpec(**opts)

    def __repr__(self):
        return ("QuadratureSpec(base_order=%s, endpoint_split=%s, levels=%s, "
                "abs_tol=%s)" % (self.base_order, self.endpoint_split,
                                 self.levels, self.abs_tol))


def _half_power(x, e):
    """
    x^e for x clamped at 0, computed as exp(e log x).
    """
    if e == 0:
        return np.ones_like(x)
    x = np.maximum(x, 0.0)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.exp(e * np.log(np.where(x > 0, x, 1.0))), 0.0)


def eval_h(lam, rho, r, n):
    """
    The kernel h(lam, rho, r). Arguments outside the admissible triangle
    |rho - r| <= lam <= rho + r raise ValueError.
    """
    n = check_dimension(n)
    lam, rho, r = np.broadcast_arrays(*[np.asarray(v, dtype=float)
                                        for v in (lam, rho, r)])
    tol = 1e-12 * np.maximum(1.0, rho + r)
    if np.any(rho < 0) or np.any(r < 0):
        raise ValueError("rho and r must be nonnegative")
    if np.any(lam < np.abs(rho - r) - tol) or np.any(lam > rho + r + tol):
        raise ValueError("lam outside the admissible range |rho-r| <= lam <= rho+r")
    e = (n - 3) / 2.0
    first = (lam - np.abs(rho - r)) * (lam + np.abs(rho - r))
    second = (rho + r - lam) * (rho + r + lam)
    h = _half_power(first, e) * _half_power(second, e)
    return h if h.ndim else float(h)


def _pieces(a, b, breaks):
    """
    Split [a, b] at the break points clipped into it. Returns a list of
    (lo, hi) arrays; empty pieces have lo == hi.
    """
    cuts = [np.clip(np.broadcast_to(c, a.shape), a, b) for c in breaks]
    if len(cuts) > 1:
        stacked = np.sort(np.stack(cuts), axis=0)
        cuts = list(stacked)
    edges = [a] + cuts + [b]
    return list(zip(edges[:-1], edges[1:]))


def identity_integral(b, r, rho, n, nodes, weights, breaks):
    """
    int lam b(lam) h(lam, rho, r) dlam over [|rho-r|, rho+r], all arrays
    already broadcast to the same shape. Pieces are parametrized from
    their own edges so the factors of h never suffer cancellation.
    """
    a = np.abs(rho - r)
    top = rho + r
    e = (n - 3) / 2.0
    total = np.zeros(a.shape)
    for lo, hi in _pieces(a, top, breaks):
        width = (hi - lo)[..., None]
        if not np.any(width > 0):
            continue
        lam = lo[..., None] + width * nodes
        from_a = (lo - a)[..., None] + width * nodes
        to_b = (top - hi)[..., None] + width * (1.0 - nodes)
        h = _half_power(from_a * (lam + a[..., None]), e) * \
            _half_power(to_b * (top[..., None] + lam), e)
        values = np.asarray(b(lam), dtype=float)
        total += np.sum(values * lam * h * weights, axis=-1) * width[..., 0]
    return total


def spherical_mean(b, r, rho, n, q=None, breaks=None, laplacian=None,
                   support=None):
    """
    Mean value of b(|x + rho w|) over the unit sphere, |x| = r.

    b is a callable on arrays of lam. Profiles from wavelab.fields carry
    their own break points, support radius and Laplacian; these are picked
    up automatically. r and rho broadcast against each other; the result
    has their broadcast shape (a float for scalar input).

    When min(r, rho) is below q.small_ratio * max(r, rho) the Taylor rule
    b(R) + s^2 (Lap b)(R) / (2n) is returned, with R the larger and s the
    smaller argument. The mean is even in rho.
    """
    n = check_dimension(n)
    q = q or QuadratureSpec()
    if breaks is None:
        breaks = getattr(b, "breaks", ())
    if laplacian is None and hasattr(b, "laplacian"):
        laplacian = b.laplacian
    if support is None:
        support = getattr(b, "support", None)

    r, rho = np.broadcast_arrays(np.asarray(r, dtype=float),
                                 np.abs(np.asarray(rho, dtype=float)))
    scalar = r.ndim == 0
    r = np.atleast_1d(r).astype(float)
    rho = np.atleast_1d(rho).astype(float)
    breaks = [np.broadcast_to(np.asarray(c, dtype=float), r.shape)
              if np.ndim(c) else c for c in breaks]
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")

    out = np.zeros(r.shape)
    big = np.maximum(r, rho)
    small = np.minimum(r, rho)
    taylor = small <= q.small_ratio * big
    if support is not None:
        active = (~taylor) & (np.abs(rho - r) < support)
    else:
        active = ~taylor

    if np.any(taylor):
        R = big[taylor]
        s = small[taylor]
        value = np.asarray(b(R), dtype=float) * np.ones_like(R)
        if laplacian is not None:
            value = value + s ** 2 * np.asarray(laplacian(R, n)) / (2.0 * n)
        out[taylor] = value

    if np.any(active):
        ra = r[active]
        rhoa = rho[active]
        brk = [c[active] if np.ndim(c) else c for c in breaks]
        nodes, weights = q.rule()
        integral = identity_integral(b, ra, rhoa, n, nodes, weights, brk)
        scale = mean_constant(n) * (ra * rhoa) ** (2.0 - n)
        value = scale * integral
        if q.check:
            nodes2, weights2 = q.rule(q.base_order + 2)
            check = scale * identity_integral(b, ra, rhoa, n, nodes2,
                                               weights2, brk)
            err = np.abs(check - value)
            bound = q.abs_tol * np.maximum(1.0, np.abs(value))
            if np.any(err > bound):
                worst = int(np.argmax(err / bound))
                raise QuadratureError(float(err[worst]), float(ra[worst]),
                                      float(rhoa[worst]))
        out[active] = value

    return float(out[0]) if scalar else out


class HBoundsReport(object):
    """
    Outcome of a randomized audit of the four upper bounds of h.
    """

    def __init__(self, n, samples, violations, identity_defect):
        self.n = n
        self.samples = samples
        # list of (bound_name, lam, rho, r, h, rhs)
        self.violations = violations
        self.identity_defect = identity_defect

    @property
    def passed(self):
        return not self.violations

    def __repr__(self):
        return "HBoundsReport(n=%s, samples=%s, violations=%s, defect=%.2e)" % (
            self.n, self.samples, len(self.violations), self.identity_defect)


def h_bounds(lam, rho, r, n):
    """
    Right-hand sides of the four upper bounds of h, keyed by name.
    """
    m = n - 3
    return {
        "4^(n-3) r^(n-3) lam^(n-3)": 4.0 ** m * r ** m * lam ** m,
        "2^(n-3) rho^(n-3) (r lam)^((n-3)/2)":
            2.0 ** m * rho ** m * (r * lam) ** (m / 2.0),
        "8^(n-3) rho^(n-3) r^(n-3)": 8.0 ** m * rho ** m * r ** m,
        "2^(n-3) rho^(n-3) lam^(n-3)": 2.0 ** m * rho ** m * lam ** m,
    }


def sample_admissible(samples, rng, low=1e-2, high=1e2):
    """
    Random admissible triples (lam, rho, r): rho, r log-uniform in
    [low, high] and lam uniform on [|rho-r|, rho+r].
    """
    rho = np.exp(rng.uniform(np.log(low), np.log(high), samples))
    r = np.exp(rng.uniform(np.log(low), np.log(high), samples))
    s = rng.uniform(0.0, 1.0, samples)
    lam = np.abs(rho - r) + s * (rho + r - np.abs(rho - r))
    return lam, rho, r


def check_h_bounds(samples, n, seed=0, rtol=1e-12):
    """
    Draw admissible triples and audit the four bounds of h. Violations are
    returned with their witness triple; the identity
    4 rho^2 lam^2 - {lam^2-(rho-r)^2}{(rho+r)^2-lam^2} = (lam^2+rho^2-r^2)^2
    is audited alongside and its worst relative defect reported.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    n = check_dimension(n)
    rng = np.random.default_rng(seed)
    lam, rho, r = sample_admissible(samples, rng)
    h = eval_h(lam, rho, r, n)
    violations = []
    for name, rhs in h_bounds(lam, rho, r, n).items():
        bad = np.nonzero(h > rhs * (1.0 + rtol))[0]
        for i in bad:
            violations.append((name, lam[i], rho[i], r[i], h[i], rhs[i]))

    lhs = 4 * rho ** 2 * lam ** 2 - \
        (lam ** 2 - (rho - r) ** 2) * ((rho + r) ** 2 - lam ** 2)
    rhs = (lam ** 2 + rho ** 2 - r ** 2) ** 2
    scale = np.maximum(4 * rho ** 2 * lam ** 2, 1e-300)
    defect = float(np.max(np.abs(lhs - rhs) / scale))

    if violations:
        logger.warning("[!] %s violations of the h bounds for n=%s" % (
            len(violations), n))
    logger.debug(" - h bounds n=%s samples=%s defect=%.2e" % (
        n, samples, defect))
    return HBoundsReport(n, samples, violations, defect)
