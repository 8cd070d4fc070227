# -*- coding: UTF-8 -*-
"""
Checks that a solution of the integral equation solves

    u_tt - Lap u = F - H

with the loss term

    H = (n-3)/(n-2) [ int_0^t M_{dF/dt(., tau)}(r, t - tau) dtau
                      + M_{F(., 0)}(r, t)
                      + eps (M_{Lap f}(r, t) + (n-2) d/dt M_g(r, t)) ]

in terms of normalized spherical means. H vanishes for n = 3.
"""
import logging
import math

import numpy as np
from numpy.polynomial import Polynomial

from .duhamel import DuhamelSpec, mean_history, slice_means
from .fields import Lattice, RadialProfile, SpaceTimeField, make_profile
from .linear_part import LinearPartSpec, dt_mean, profile_mean
from .solver import march
from .sphmeans import QuadratureSpec, check_dimension, omega_n
from .util import fit_line


logger = logging.getLogger('WAVELAB')


class ResidualReport(object):
    """
    levels holds (dr, linf) per refinement level. convergence_order is
    None unless at least three levels were run.
    """

    def __init__(self, levels=None, ic_errors=None, coefficient_checks=None):
        self.levels = list(levels or [])
        self.ic_errors = ic_errors
        self.coefficient_checks = list(coefficient_checks or [])

    @property
    def linf_residual(self):
        if not self.levels:
            return None
        return self.levels[-1][1]

    @property
    def convergence_order(self):
        if len(self.levels) < 3:
            return None
        dr = np.array([lv[0] for lv in self.levels])
        linf = np.array([lv[1] for lv in self.levels])
        if np.any(linf <= 0):
            return math.inf
        slope, _, _ = fit_line(np.log(dr), np.log(linf))
        return slope

    def coefficients_exact(self, tol=1e-10):
        return all(abs(computed - expected) <= tol * max(1.0, abs(expected))
                   for _, expected, computed in self.coefficient_checks)

    def passed(self, min_order=1.5):
        order = self.convergence_order
        if order is not None and order < min_order:
            return False
        return self.coefficients_exact()

    def __repr__(self):
        return "ResidualReport(linf=%s, order=%s, ic_errors=%s, checks=%s)" % (
            self.linf_residual, self.convergence_order, self.ic_errors,
            len(self.coefficient_checks))


def loss_prefactor(n):
    n = check_dimension(n)
    return (n - 3.0) / (n - 2.0)


def _data_term(spec, r, t):
    """
    M_{Lap f}(r, t) + (n-2) d/dt M_g(r, t).
    """
    n = spec.n
    f, g = spec.f, spec.g
    value = 0.0
    if f.family != "zero":
        value = value + profile_mean(spec, lambda lam: f.laplacian(lam, n),
                                     r, t, breaks=f.breaks)
    if g.family != "zero":
        value = value + (n - 2.0) * dt_mean(spec, g, r, t)
    return value


def _initial_mean(dspec, F, r, t):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    zeros = np.zeros(r.shape)
    return slice_means(dspec, F, r, np.full(r.shape, float(t)),
                       zeros.astype(int), zeros)


def assemble_H(spec, F, dtF, r, t, eps, dspec=None):
    """
    The loss term at radius r (scalar or array) and time t. F supplies
    the slice F(., 0); dtF the time derivative of F on slices 0..t.
    """
    n = spec.n
    pref = loss_prefactor(n)
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if pref == 0:
        return 0.0 if scalar else np.zeros(r.shape)
    dspec = dspec or DuhamelSpec(n)
    t = float(t)
    value = mean_history(dspec, dtF, r, t) + _initial_mean(dspec, F, r, t)
    if eps:
        value = value + eps * np.asarray(_data_term(spec, r, np.full(
            r.shape, t)))
    value = pref * value
    return float(value[0]) if scalar else value


def assemble_H_field(spec, F, dtF, eps, dspec=None):
    """
    H on every node of the lattice of F, up to the last slice filled in
    both F and dtF.
    """
    lattice = F.lattice
    last = min(F.filled_up_to, dtF.filled_up_to)
    H = SpaceTimeField(lattice)
    for j in range(last + 1):
        H.set_slice(j, assemble_H(spec, F, dtF, lattice.r, lattice.t[j], eps,
                                  dspec))
    logger.debug(" - H assembled on %s slices" % (last + 1))
    return H


def residual_mask(lattice, last, k=None, band=2):
    """
    Interior nodes with r >= 3 dr, away from the light cone |t - r| and,
    with k given, from the data cone |t - r| = k.
    """
    R, T = np.meshgrid(lattice.r, lattice.t[:last + 1], indexing="ij")
    mask = R >= 3.0 * lattice.dr
    mask[0, :] = mask[-1, :] = False
    mask[:, 0] = mask[:, -1] = False
    width = band * lattice.dr
    mask &= np.abs(T - R) > width
    if k is not None:
        mask &= np.abs(np.abs(T - R) - k) > width
    return mask


def pde_residual(u, F, H, n, k=None, band=2):
    """
    max |u_tt - (u_rr + (n-1) u_r / r) - F + H| over residual_mask, by
    second-order central differences.
    """
    n = check_dimension(n)
    lattice = u.lattice
    if not (F.lattice == lattice and H.lattice == lattice):
        raise ValueError("u, F and H must share one lattice")
    last = min(u.filled_up_to, F.filled_up_to, H.filled_up_to)
    if last < 2:
        raise ValueError("residual needs >= 3 filled slices, have %s" % (
            last + 1))
    dr, dt = lattice.dr, lattice.dt
    U = u.values[:, :last + 1]
    r = lattice.r[1:-1, None]

    u_tt = (U[1:-1, 2:] - 2.0 * U[1:-1, 1:-1] + U[1:-1, :-2]) / dt ** 2
    u_rr = (U[2:, 1:-1] - 2.0 * U[1:-1, 1:-1] + U[:-2, 1:-1]) / dr ** 2
    u_r = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2.0 * dr)
    res = u_tt - (u_rr + (n - 1.0) * u_r / r) - \
        F.values[1:-1, 1:last] + H.values[1:-1, 1:last]

    mask = residual_mask(lattice, last, k, band)[1:-1, 1:-1]
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(res[mask])))


def check_initial_conditions(u, spec, eps):
    """
    (max |u(., 0) - eps f|, max |D_t u(., 0) - eps g|) with the one-sided
    second-order difference D_t.
    """
    u.check_filled(2)
    lattice = u.lattice
    r = lattice.r
    u0, u1, u2 = u.slice(0), u.slice(1), u.slice(2)
    e0 = float(np.max(np.abs(u0 - eps * spec.f(r))))
    dtu = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * lattice.dt)
    e1 = float(np.max(np.abs(dtu - eps * spec.g(r))))
    return e0, e1


def manufactured_fields(n, lattice, H_func=None):
    """
    u = exp(-r^2 - t) with F chosen so that u_tt - Lap u = F - H for the
    given H (default 0.1 t u).
    """
    if H_func is None:
        def H_func(r, t):
            return 0.1 * t * np.exp(-r * r - t)

    def exact(r, t):
        return np.exp(-r * r - t)

    def source(r, t):
        # u_tt = u, Lap u = (4 r^2 - 2n) u
        return (1.0 - 4.0 * r * r + 2.0 * n) * exact(r, t) + H_func(r, t)

    u = SpaceTimeField.from_function(lattice, exact)
    F = SpaceTimeField.from_function(lattice, source)
    H = SpaceTimeField.from_function(lattice, H_func)
    return u, F, H


def manufactured_residual(n, dr, r_max=3.0, t_max=1.0, H_func=None):
    lattice = Lattice(dr, dr, r_max, t_max)
    u, F, H = manufactured_fields(n, lattice, H_func)
    return pde_residual(u, F, H, n)


def residual_study(run, drs):
    """
    run(dr) -> L-inf residual, for each dr (coarse to fine).
    """
    levels = []
    for dr in drs:
        linf = run(dr)
        logger.info("[.] dr=%s residual=%.6e" % (dr, linf))
        levels.append((dr, linf))
    report = ResidualReport(levels)
    if len(levels) >= 3:
        logger.info("[+] observed order %.3f" % report.convergence_order)
    return report


def manufactured_study(n, dr0=0.1, levels=3, **kwargs):
    drs = [dr0 / 2 ** m for m in range(levels)]
    return residual_study(
        lambda dr: manufactured_residual(n, dr, **kwargs), drs)


def solution_fields(spec, nl, cfg, dspec=None):
    """
    March u and build F(u), its chain-rule time derivative and H.
    """
    u, result = march(spec, nl, cfg, dspec)
    lattice = u.lattice
    last = u.filled_up_to
    values = u.values[:, :last + 1]
    F = SpaceTimeField(lattice, filled_up_to=last)
    F.values[:, :last + 1] = nl.F(values)
    dtF = SpaceTimeField(lattice, filled_up_to=last)
    if last >= 2:
        u_t = np.gradient(values, lattice.dt, axis=1, edge_order=2)
        dtF.values[:, :last + 1] = nl.dF(values) * u_t
    H = assemble_H_field(spec, F, dtF, cfg.epsilon, dspec)
    return u, F, H, result


def solution_residual(spec, nl, cfg, dspec=None, band=2):
    u, F, H, result = solution_fields(spec, nl, cfg, dspec)
    linf = pde_residual(u, F, H, spec.n, k=spec.k, band=band)
    return linf, check_initial_conditions(u, spec, cfg.epsilon)


def solution_study(spec, nl, cfg, levels=3, dspec=None):
    """
    Residual of the marched solution on cfg.lattice refined levels-1
    times. The initial-condition errors of the finest level are kept.
    """
    lattices = {}
    lattice = cfg.lattice
    for _ in range(levels):
        lattices[lattice.dr] = lattice
        lattice = lattice.refined()
    ic = {}

    def run(dr):
        linf, ic["errors"] = solution_residual(
            spec, nl, cfg.with_options(lattice=lattices[dr]), dspec)
        return linf

    report = residual_study(run, sorted(lattices, reverse=True))
    report.ic_errors = ic.get("errors")
    return report


def expected_coefficients(n, eps):
    """
    Coefficients of H per unit surface integral over the unit sphere: of
    int int u_t u, of int f^2 and of int (Lap f + (n-2) w.grad g).
    """
    if n == 4:
        return {"history": 1.0 / (2.0 * math.pi ** 2),
                "initial": eps ** 2 / (4.0 * math.pi ** 2),
                "data": eps / (4.0 * math.pi ** 2)}
    base = loss_prefactor(n) / omega_n(n)
    return {"history": 2.0 * base, "initial": eps ** 2 * base,
            "data": eps * base}


def unit_laplacian_profile(n, k):
    """
    f = r^2 / (2n) on [0, k), whose Laplacian is 1.
    """
    return RadialProfile("quadratic", k, 0.0, 1.0,
                         Polynomial([0.0, 0.0, 1.0 / (2.0 * n)]))


def coefficient_checks(n=4, eps=0.5, r=0.3, t=0.7, q=None):
    """
    The three coefficients of H recovered through assemble_H from unit
    sources: dF/dt = 2 (u_t u = 1 for F = u^2), F(., 0) = eps^2 (f^2 = 1)
    and data with Lap f = 1, g = 0. Returns (name, expected, computed)
    tuples.
    """
    n = check_dimension(n)
    q = q or QuadratureSpec(base_order=12, endpoint_split=0.5, levels=40,
                            check=False)
    dspec = DuhamelSpec(n, q=q)
    area = omega_n(n)
    lattice = Lattice(t / 8.0, t / 8.0, 4.0 * (r + t), t)
    quiet = make_profile("zero", 1.0)
    plain = LinearPartSpec(quiet, quiet, n, q=q)
    with_data = LinearPartSpec(unit_laplacian_profile(n, 4.0 * (r + t)),
                               quiet, n, q=q)

    zero = SpaceTimeField.from_function(lattice, lambda R, T: 0.0 * R)
    two = SpaceTimeField.from_function(lattice, lambda R, T: 2.0 + 0.0 * R)
    F0 = SpaceTimeField.from_function(lattice,
                                      lambda R, T: eps ** 2 + 0.0 * R)
    computed = {
        "history": assemble_H(plain, zero, two, r, t, eps, dspec) / (
            area * t),
        "initial": assemble_H(plain, F0, zero, r, t, eps, dspec) / area,
        "data": assemble_H(with_data, zero, zero, r, t, eps, dspec) / area,
    }
    expected = expected_coefficients(n, eps)
    checks = [(name, expected[name], float(computed[name]))
              for name in ("history", "initial", "data")]
    for name, want, got in checks:
        logger.info("[.] %s coefficient expected=%.17g computed=%.17g" % (
            name, want, got))
    return checks
