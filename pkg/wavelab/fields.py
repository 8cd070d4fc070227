# -*- coding: UTF-8 -*-
import logging
import math

import numpy as np
from numpy.polynomial import Polynomial


logger = logging.getLogger('WAVELAB')


PROFILE_FAMILIES = ("smooth_bump", "annular_bump", "zero")


class FieldError(Exception):
    pass


class RadialProfile(object):
    """
    A compactly supported radial function given by a polynomial on its
    support and 0 elsewhere. The polynomial is a fifth power of a
    quadratic vanishing at the support edge(s), so every derivative up to
    order 4 is continuous across the edge.

        smooth_bump:   A (1 - (r/k)^2)^5           on [0, k)
        annular_bump:  A ((r-k0)(k-r) / c^2)^5     on (k0, k), c = (k-k0)/2
        zero:          0
    """
    derivative_order = 4

    def __init__(self, family, k, k0, amplitude, poly):
        self.family = family
        self.k = float(k)
        self.k0 = float(k0)
        self.amplitude = float(amplitude)
        self._poly = poly
        self._derivs = [poly]
        for _ in range(self.derivative_order):
            self._derivs.append(self._derivs[-1].deriv())

    @property
    def support(self):
        return self.k

    @property
    def breaks(self):
        if self.family == "annular_bump" and self.k0 > 0:
            return (self.k0, self.k)
        if self.family == "zero":
            return ()
        return (self.k,)

    def inside(self, r):
        r = np.asarray(r, dtype=float)
        if self.family == "zero":
            return np.zeros(r.shape, dtype=bool)
        if self.family == "annular_bump":
            return (r > self.k0) & (r < self.k)
        return np.abs(r) < self.k

    def derivative(self, r, deriv=0):
        if deriv < 0 or deriv > self.derivative_order:
            raise ValueError("deriv must be in 0..%s, got %s" % (
                self.derivative_order, deriv))
        r = np.asarray(r, dtype=float)
        value = np.where(self.inside(r), self._derivs[deriv](r), 0.0)
        return value if value.ndim else float(value)

    def __call__(self, r):
        return self.derivative(r, 0)

    def laplacian(self, r, n):
        """
        Radial Laplacian f'' + (n-1) f'/r; at r = 0 it is n f''(0).
        """
        r = np.asarray(r, dtype=float)
        d1 = self.derivative(r, 1)
        d2 = self.derivative(r, 2)
        tiny = r <= 1e-12 * self.k
        safe = np.where(tiny, 1.0, r)
        value = np.where(tiny, n * d2, d2 + (n - 1) * d1 / safe)
        return value if value.ndim else float(value)

    def sup_norm(self, deriv=0, samples=2001):
        r = np.linspace(0.0, self.k, samples)
        return float(np.max(np.abs(self.derivative(r, deriv))))

    def __repr__(self):
        return "RadialProfile(%s, k=%s, k0=%s, amplitude=%s)" % (
            self.family, self.k, self.k0, self.amplitude)


def make_profile(family, k, k0=0.0, amplitude=1.0):
    if family not in PROFILE_FAMILIES:
        raise ValueError("Unknown profile family: %s" % family)
    if k <= 0:
        raise ValueError("Support radius k must be positive, got %s" % k)
    if k0 < 0 or k0 >= k:
        raise ValueError("Need 0 <= k0 < k, got k0=%s, k=%s" % (k0, k))

    if family == "zero":
        poly = Polynomial([0.0])
    elif family == "smooth_bump":
        poly = amplitude * Polynomial([1.0, 0.0, -1.0 / k ** 2]) ** 5
    else:
        c2 = ((k - k0) / 2.0) ** 2
        quad = Polynomial([-k0, 1.0]) * Polynomial([k, -1.0]) / c2
        poly = amplitude * quad ** 5
    return RadialProfile(family, k, k0, amplitude, poly)


def eval_profile(p, r, deriv=0):
    return p.derivative(r, deriv)


class Lattice(object):
    """
    Space-time lattice. Radii sit at cell centers r_i = (i + 1/2) dr,
    i = 0..nr-1; times at t_j = j dt, j = 0..nt-1.
    """

    def __init__(self, dr, dt, r_max, t_max):
        self.dr = float(dr)
        self.dt = float(dt)
        self.r_max = float(r_max)
        self.t_max = float(t_max)
        if self.dr <= 0 or self.dt <= 0 or self.r_max <= 0 or self.t_max <= 0:
            raise FieldError("Lattice spacings and extents must be positive")
        self.nr = int(math.floor(self.r_max / self.dr + 1e-9))
        self.nt = int(math.floor(self.t_max / self.dt + 1e-9)) + 1

    @classmethod
    def covering(cls, dr, t_max, k, dt=None):
        """
        Smallest lattice with r_max >= t_max + k, padded by two cells.
        """
        dt = dr if dt is None else dt
        cells = int(math.ceil((t_max + k) / dr)) + 2
        return cls(dr, dt, cells * dr, t_max)

    def validate(self, k):
        if self.r_max + 1e-12 < self.t_max + k:
            raise FieldError("r_max=%s does not cover t_max + k = %s" % (
                self.r_max, self.t_max + k))
        if self.dt > self.dr * (1.0 + 1e-12):
            raise FieldError("dt=%s must not exceed dr=%s" % (self.dt, self.dr))
        return self

    @property
    def r(self):
        return (np.arange(self.nr) + 0.5) * self.dr

    @property
    def t(self):
        return np.arange(self.nt) * self.dt

    def refined(self, factor=2):
        return Lattice(self.dr / factor, self.dt / factor, self.r_max,
                       self.t_max)

    def as_dict(self):
        return {"dr": self.dr, "dt": self.dt, "r_max": self.r_max,
                "t_max": self.t_max}

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return "Lattice(dr=%s, dt=%s, r_max=%s, t_max=%s)" % (
            self.dr, self.dt, self.r_max, self.t_max)


class SpaceTimeField(object):
    """
    Values of a radial function on a Lattice, indexed [r_index, t_index].
    Slices are written in time order by a single owner; filled_up_to is
    the last completed slice (-1 when empty).
    """

    def __init__(self, lattice, values=None, filled_up_to=-1):
        self.lattice = lattice
        if values is None:
            values = np.zeros((lattice.nr, lattice.nt))
        values = np.asarray(values, dtype=float)
        if values.shape != (lattice.nr, lattice.nt):
            raise FieldError("values shape %s does not match lattice %s" % (
                values.shape, (lattice.nr, lattice.nt)))
        # one extra row of zeros stands for everything beyond r_max
        self._padded = np.zeros((lattice.nr + 1, lattice.nt))
        self._padded[:lattice.nr] = values
        self.filled_up_to = int(filled_up_to)

    @property
    def values(self):
        return self._padded[:self.lattice.nr]

    @values.setter
    def values(self, values):
        self._padded[:self.lattice.nr] = values

    @classmethod
    def from_function(cls, lattice, func):
        """
        Fill every slice with func(r, t) evaluated on the lattice.
        """
        R, T = np.meshgrid(lattice.r, lattice.t, indexing="ij")
        values = np.asarray(func(R, T), dtype=float) * np.ones(R.shape)
        return cls(lattice, values, filled_up_to=lattice.nt - 1)

    def copy(self):
        return SpaceTimeField(self.lattice, self.values.copy(),
                              self.filled_up_to)

    @property
    def complete(self):
        return self.filled_up_to == self.lattice.nt - 1

    def check_filled(self, j):
        if j > self.filled_up_to:
            raise FieldError("slice %s requested but field filled up to %s" % (
                j, self.filled_up_to))

    def set_slice(self, j, values):
        if j > self.filled_up_to + 1:
            raise FieldError("slice %s written before slice %s" % (
                j, self.filled_up_to + 1))
        values = np.asarray(values, dtype=float)
        self.values[:, j] = values
        self.filled_up_to = max(self.filled_up_to, j)

    def slice(self, j):
        self.check_filled(j)
        return self.values[:, j]

    def _radial_weights(self, lam):
        x = np.asarray(lam, dtype=float) / self.lattice.dr - 0.5
        x = np.clip(x, 0.0, float(self.lattice.nr))
        i0 = np.floor(x).astype(int)
        i0 = np.minimum(i0, self.lattice.nr)
        frac = x - i0
        i1 = np.minimum(i0 + 1, self.lattice.nr)
        return i0, i1, frac

    def _cubic_stencil(self, lam):
        """
        Node indices (..., 4) and Lagrange weights of the four-point stencil
        around lam. Indices below the first node reflect about r = 0,
        indices past the last node land on the zero row.
        """
        nr = self.lattice.nr
        x = np.asarray(lam, dtype=float) / self.lattice.dr - 0.5
        x = np.clip(x, -0.5, float(nr + 1))
        i = np.floor(x).astype(int)
        s = x - i
        idx = i[..., None] + np.arange(-1, 3)
        idx = np.where(idx < 0, -idx - 1, idx)
        idx = np.minimum(idx, nr)
        weights = np.stack([
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ], axis=-1)
        return idx, weights

    def sample_slices(self, lam, j):
        """
        Four-point cubic interpolation in r of the slices j (an index array
        that broadcasts against lam). Beyond the last node the field is 0;
        below the first node it is continued evenly.
        """
        j = np.asarray(j)
        self.check_filled(int(np.max(j)))
        lam, j = np.broadcast_arrays(np.asarray(lam, dtype=float), j)
        idx, weights = self._cubic_stencil(lam)
        return np.sum(weights * self._padded[idx, j[..., None]], axis=-1)

    def interp(self, lam, tau):
        """
        Bilinear interpolation at arbitrary (lam, tau).
        """
        y = np.asarray(tau, dtype=float) / self.lattice.dt
        j0 = np.clip(np.floor(y + 1e-9).astype(int), 0, self.lattice.nt - 1)
        j1 = np.minimum(j0 + 1, self.lattice.nt - 1)
        ft = np.clip(y - j0, 0.0, 1.0)
        self.check_filled(int(np.max(np.where(ft > 0, j1, j0))))
        padded = self._padded
        i0, i1, frac = self._radial_weights(lam)
        low = (1.0 - frac) * padded[i0, j0] + frac * padded[i1, j0]
        high = (1.0 - frac) * padded[i0, j1] + frac * padded[i1, j1]
        return (1.0 - ft) * low + ft * high

    def support_violation(self, k):
        """
        Largest |value| at filled nodes with r > t + k.
        """
        if self.filled_up_to < 0:
            return 0.0
        R, T = np.meshgrid(self.lattice.r, self.lattice.t[:self.filled_up_to + 1],
                           indexing="ij")
        outside = R > T + k
        vals = np.abs(self.values[:, :self.filled_up_to + 1])[outside]
        return float(np.max(vals)) if vals.size else 0.0

    def rows(self):
        """
        (r, t, value) rows of the filled slices, time-major.
        """
        r = self.lattice.r
        for j in range(self.filled_up_to + 1):
            t = self.lattice.t[j]
            for i in range(self.lattice.nr):
                yield (r[i], t, self.values[i, j])

    def __repr__(self):
        return "SpaceTimeField(%s, filled_up_to=%s)" % (
            self.lattice, self.filled_up_to)
