# -*- coding: UTF-8 -*-
"""
The radial Duhamel-type operator

    N(F)(r, t) = 1/(n-2) int_0^t (t - tau) M_{F(., tau)}(r, t - tau) dtau

where M_b(r, rho) is the spherical mean of b. Written out through John's
identity this is

    cbar r^(2-n) int_0^t (t-tau)^(3-n) int_{|t-tau-r|}^{t-tau+r}
        lam h(lam, t-tau, r) F(lam, tau) dlam dtau

with cbar = 2^(3-n) omega_{n-1} / ((n-2) omega_n). The tau integral is
the trapezoid rule on lattice slices; the slice tau = t has weight 0, so
N(F) at time t only reads F strictly below t.
"""
import logging

import numpy as np

from .fields import SpaceTimeField
from .sphmeans import (
    QuadratureSpec, check_dimension, identity_integral, mean_constant
)


logger = logging.getLogger('WAVELAB')


class DuhamelSpec(object):
    """
    k, when given, is the support radius of the data: F(., tau) is taken
    to vanish for lam > tau + k, which splits the lam integral there and
    skips elements whose lam interval misses the support.
    """

    def __init__(self, n, q=None, k=None, chunk=64):
        self.n = check_dimension(n)
        self.q = q or QuadratureSpec(base_order=6, endpoint_split=0.2,
                                     levels=4, abs_tol=1e-6,
                                     check=False)
        self.k = None if k is None else float(k)
        self.chunk = int(chunk)
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1, got %s" % chunk)

    @property
    def cbar(self):
        return mean_constant(self.n) / (self.n - 2.0)

    def __repr__(self):
        return "DuhamelSpec(n=%s, k=%s, q=%s)" % (self.n, self.k, self.q)


def trapezoid_weights(lattice, t, include_top=False):
    """
    Lattice times below t and their trapezoid weights on [0, t]. The
    endpoint t itself is appended only when include_top is set.
    """
    below = lattice.t[lattice.t < t - 1e-9 * lattice.dt]
    nodes = np.append(below, t)
    if len(nodes) < 2:
        weights = np.zeros(len(nodes))
    else:
        gaps = np.diff(nodes)
        weights = np.zeros(len(nodes))
        weights[:-1] += 0.5 * gaps
        weights[1:] += 0.5 * gaps
    index = np.append(np.arange(len(below)), len(below))
    if include_top:
        return nodes, weights, index
    return nodes[:-1], weights[:-1], index[:-1]


def slice_means(spec, F, r, rho, jidx, tau=None):
    """
    Spherical means of the slices jidx of F at (r, rho). All arguments are
    1-d arrays of one length. With spec.k set, tau (the slice times) gives
    the support edge tau + k.
    """
    n = spec.n
    q = spec.q
    out = np.zeros(r.shape)
    big = np.maximum(r, rho)
    small = np.minimum(r, rho)
    taylor = small <= q.small_ratio * big
    active = ~taylor
    if spec.k is not None:
        edge = tau + spec.k
        taylor &= big < edge
        active &= np.abs(rho - r) < edge

    if np.any(taylor):
        out[taylor] = F.sample_slices(big[taylor], jidx[taylor])
    if np.any(active):
        ja = jidx[active][:, None]
        breaks = [edge[active]] if spec.k is not None else []
        nodes, weights = q.rule()
        integral = identity_integral(
            lambda lam: F.sample_slices(lam, ja), r[active], rho[active], n,
            nodes, weights, breaks)
        out[active] = mean_constant(n) * \
            (r[active] * rho[active]) ** (2.0 - n) * integral
    return out


def _time_sum(spec, F, r, t, power, include_top, stats=None):
    """
    sum_m w_m (t - tau_m)^power M_{F(tau_m)}(r, t - tau_m) over the
    trapezoid nodes of [0, t].
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    taus, tw, jidx = trapezoid_weights(F.lattice, t, include_top)
    total = np.zeros(r.shape)
    if not len(taus):
        return total
    F.check_filled(int(jidx[-1]))

    for start in range(0, len(taus), spec.chunk):
        sl = slice(start, start + spec.chunk)
        rho = t - taus[sl]
        R, P = np.broadcast_arrays(r[:, None], rho[None, :])
        J = np.broadcast_to(jidx[sl][None, :], R.shape)
        T = np.broadcast_to(taus[sl][None, :], R.shape)
        W = np.broadcast_to(tw[sl][None, :], R.shape)
        means = slice_means(spec, F, R.ravel(), P.ravel(), J.ravel(),
                            T.ravel()).reshape(R.shape)
        if power:
            means = means * P ** power
        total += np.sum(W * means, axis=1)
        if stats is not None:
            stats["elements"] = stats.get("elements", 0) + R.size

    if stats is not None:
        stats["slices_touched"] = stats.get("slices_touched", 0) + len(taus)
    return total


def apply_N_point(spec, F, r, t, stats=None):
    """
    N(F) at radius r (scalar or array) and time t. Only slices of F
    strictly below t are read.
    """
    scalar = np.ndim(r) == 0
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("apply_N_point needs r > 0")
    value = _time_sum(spec, F, r_arr, float(t), 1, False, stats) / \
        (spec.n - 2.0)
    return float(value[0]) if scalar else value


def apply_N_slice(spec, F, t_index, stats=None):
    """
    N(F) on the radial lattice at time slice t_index. Reads F on slices
    0..t_index-1 only.
    """
    lattice = F.lattice
    if t_index == 0:
        return np.zeros(lattice.nr)
    return apply_N_point(spec, F, lattice.r, lattice.t[t_index], stats)


def mean_history(spec, F, r, t):
    """
    int_0^t M_{F(., tau)}(r, t - tau) dtau, the time-integrated means
    entering the loss term. Unlike N this reads the slice at t.
    """
    return _time_sum(spec, F, r, float(t), 0, True)


def apply_N(spec, F, stats=None):
    """
    N(F) on the whole lattice of F, slice by slice.
    """
    out = SpaceTimeField(F.lattice)
    for j in range(F.lattice.nt):
        out.set_slice(j, apply_N_slice(spec, F, j, stats))
    return out
