# -*- coding: UTF-8 -*-
import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .duhamel import DuhamelSpec, apply_N, apply_N_slice
from .fields import Lattice, SpaceTimeField
from .linear_part import eval_V, eval_V_field
from .norms import Exponents, WeightSpec, slice_weighted_norm, weighted_norm
from .sphmeans import QuadratureError
from .util import fit_line, refine_crossing


logger = logging.getLogger('WAVELAB')


NONLINEAR_FORMS = ("abs_power", "square", "signed_power")


class PicardDivergence(Exception):
    def __init__(self, iterations, ratio, norm):
        self.iterations = iterations
        self.ratio = ratio
        self.norm = norm
        super(PicardDivergence, self).__init__(
            "Picard iteration did not converge after %s iterations "
            "(last ratio %.3e, last difference %.3e)" % (
                iterations, ratio, norm))


class NonlinearitySpec(object):
    """
    F(s) = A |s|^p, A s^2 or A |s|^(p-1) s. dF is the derivative in s.
    """

    def __init__(self, p, form="abs_power", A=1.0):
        self.p = float(p)
        self.form = form
        self.A = float(A)
        if self.p <= 1:
            raise ValueError("p must be > 1, got %s" % p)
        if form not in NONLINEAR_FORMS:
            raise ValueError("Unknown nonlinearity: %s" % form)
        if form == "square" and self.p != 2:
            raise ValueError("form=square needs p=2, got %s" % p)
        if self.A < 0:
            raise ValueError("A must be nonnegative, got %s" % A)

    def F(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.form == "square":
                return self.A * s * s
            if self.form == "abs_power":
                return self.A * np.abs(s) ** self.p
            return self.A * np.abs(s) ** (self.p - 1.0) * s

    def dF(self, s):
        s = np.asarray(s, dtype=float)
        p = self.p
        with np.errstate(over="ignore", invalid="ignore"):
            if self.form == "square":
                return 2.0 * self.A * s
            if self.form == "abs_power":
                return self.A * p * np.abs(s) ** (p - 1.0) * np.sign(s)
            return self.A * p * np.abs(s) ** (p - 1.0)

    def __repr__(self):
        return "NonlinearitySpec(p=%s, form=%s, A=%s)" % (
            self.p, self.form, self.A)


class SolveConfig(object):
    def __init__(self, epsilon, lattice, blowup_cap=1e6, picard_tol=1e-10,
                 picard_max_iters=50, mode="march", cap_probe=False):
        self.epsilon = float(epsilon)
        self.lattice = lattice
        self.blowup_cap = float(blowup_cap)
        self.picard_tol = float(picard_tol)
        self.picard_max_iters = int(picard_max_iters)
        self.mode = mode
        self.cap_probe = bool(cap_probe)
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative, got %s" % epsilon)
        if self.blowup_cap <= 0 or self.picard_tol <= 0:
            raise ValueError("blowup_cap and picard_tol must be positive")
        if mode not in ("march", "picard"):
            raise ValueError("mode must be march or picard, got %s" % mode)

    def with_options(self, **kwargs):
        opts = {
            "epsilon": self.epsilon,
            "lattice": self.lattice,
            "blowup_cap": self.blowup_cap,
            "picard_tol": self.picard_tol,
            "picard_max_iters": self.picard_max_iters,
            "mode": self.mode,
            "cap_probe": self.cap_probe,
        }
        opts.update(kwargs)
        return SolveConfig(**opts)


class LifespanResult(object):
    """
    T_hat is None when the run survived to t_max. With the cap probe on,
    T_low and T_high are the crossing times of cap/10 and 10 cap.
    """

    def __init__(self, epsilon, T_hat, blew_up, max_weighted_norm,
                 slices_completed, dr, dt, t_max, T_low=None, T_high=None,
                 norm_history=None):
        self.epsilon = epsilon
        self.T_hat = T_hat
        self.blew_up = blew_up
        self.max_weighted_norm = max_weighted_norm
        self.slices_completed = slices_completed
        self.dr = dr
        self.dt = dt
        self.t_max = t_max
        self.T_low = T_low
        self.T_high = T_high
        self.norm_history = norm_history if norm_history is not None else []

    @property
    def survived(self):
        return not self.blew_up

    @property
    def cap_sensitivity(self):
        """
        (T_high - T_low) / T_hat, or None when the probe did not bracket.
        """
        if not self.blew_up or self.T_low is None or self.T_high is None:
            return None
        return (self.T_high - self.T_low) / self.T_hat

    def row(self):
        T_hat = self.T_hat if self.blew_up else "survived"
        return [self.epsilon, T_hat, int(self.blew_up),
                self.max_weighted_norm, self.dr, self.dt]

    def __eq__(self, other):
        return isinstance(other, LifespanResult) and self.row() == other.row()

    def __repr__(self):
        return ("LifespanResult(epsilon=%s, T_hat=%s, blew_up=%s, "
                "max_weighted_norm=%.6g, slices=%s)" % (
                    self.epsilon, self.T_hat, self.blew_up,
                    self.max_weighted_norm, self.slices_completed))


RESULT_COLUMNS = ["epsilon", "T_hat", "blew_up", "max_weighted_norm", "dr", "dt"]


def _weight_for(spec, nl):
    return WeightSpec(spec.k, Exponents(spec.n, nl.p))


def march(spec, nl, cfg, duhamel=None):
    """
    Fill u slice by slice, u_j = eps V_j + N(F(u))_j. Stops at the first
    slice with max |u| above the cap (10 cap with the cap probe on) or at
    t_max.
    """
    lattice = cfg.lattice.validate(spec.k)
    duhamel = duhamel or DuhamelSpec(spec.n, k=spec.k)
    weight = _weight_for(spec, nl)
    eps = cfg.epsilon
    cap = cfg.blowup_cap
    caps = {"low": cap / 10.0, "cap": cap, "high": 10.0 * cap}
    stop_at = caps["high"] if cfg.cap_probe else cap
    crossings = {}

    u = SpaceTimeField(lattice)
    F = SpaceTimeField(lattice)
    U = SpaceTimeField(lattice)
    r = lattice.r
    history = []
    previous = 0.0
    logger.info("[+] Marching %s, eps=%s on %s" % (nl, eps, lattice))

    for j, t in enumerate(lattice.t):
        try:
            if eps:
                free = eps * eval_V(spec, r, np.full(r.shape, t))
            else:
                free = np.zeros(r.shape)
            nonlinear = apply_N_slice(duhamel, F, j)
        except QuadratureError as e:
            logger.error("[!] Quadrature failure at slice %s (t=%s): %s" % (
                j, t, e))
            e.slice_index = j
            raise
        values = free + nonlinear
        finite = bool(np.all(np.isfinite(values)))
        top = float(np.max(np.abs(values))) if finite else math.inf

        for name, level in caps.items():
            if name not in crossings and top > level:
                crossings[name] = refine_crossing(
                    lattice.t[j - 1] if j else 0.0, t, previous, top, level)
        if not finite or top > stop_at:
            break

        u.set_slice(j, values)
        U.set_slice(j, nonlinear)
        history.append(slice_weighted_norm(weight, U, j))
        with np.errstate(over="ignore", invalid="ignore"):
            F.set_slice(j, nl.F(values))
        previous = top
        if j and j % 50 == 0:
            logger.debug(" - slice %s/%s t=%.4g max|u|=%.4e" % (
                j, lattice.nt - 1, t, top))

    blew_up = "cap" in crossings
    result = LifespanResult(
        eps, crossings.get("cap"), blew_up,
        max(history) if history else 0.0, u.filled_up_to + 1,
        lattice.dr, lattice.dt, lattice.t_max,
        T_low=crossings.get("low"), T_high=crossings.get("high"),
        norm_history=history)
    logger.info("[+] %s" % result)
    return u, result


def picard(spec, nl, cfg, duhamel=None):
    """
    U_m = N(F(U_{m-1} + eps V)) from U_0 = 0 on the full lattice. Returns
    the solution u = U + eps V and the number of iterations.
    """
    lattice = cfg.lattice.validate(spec.k)
    duhamel = duhamel or DuhamelSpec(spec.n, k=spec.k)
    weight = _weight_for(spec, nl)
    free = _free_field(spec, lattice, cfg.epsilon)

    U = SpaceTimeField(lattice, filled_up_to=lattice.nt - 1)
    last_diff = None
    ratio = math.nan
    for m in range(1, cfg.picard_max_iters + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            source = SpaceTimeField(lattice, nl.F(U.values + free.values),
                                    filled_up_to=lattice.nt - 1)
        if not np.all(np.isfinite(source.values)):
            raise PicardDivergence(m, ratio, math.inf)
        new = apply_N(duhamel, source)
        diff = weighted_norm(weight, SpaceTimeField(
            lattice, new.values - U.values, filled_up_to=lattice.nt - 1))
        if last_diff:
            ratio = diff / last_diff
        logger.debug(" - picard iteration %s: difference %.3e ratio %.3e" % (
            m, diff, ratio))
        U = new
        if not np.isfinite(diff):
            raise PicardDivergence(m, ratio, diff)
        if diff < cfg.picard_tol:
            logger.info("[+] Picard converged in %s iterations" % m)
            return SpaceTimeField(lattice, U.values + free.values,
                                  filled_up_to=lattice.nt - 1), m
        last_diff = diff
    raise PicardDivergence(cfg.picard_max_iters, ratio, last_diff)


def solve(spec, nl, cfg, duhamel=None):
    if cfg.mode == "picard":
        u, iterations = picard(spec, nl, cfg, duhamel)
        weight = _weight_for(spec, nl)
        U = u.copy()
        U.values = u.values - _free_field(spec, u.lattice, cfg.epsilon).values
        top = float(np.max(np.abs(u.values)))
        result = LifespanResult(
            cfg.epsilon, None, False, weighted_norm(weight, U),
            u.lattice.nt, u.lattice.dr, u.lattice.dt, u.lattice.t_max)
        if top > cfg.blowup_cap:
            logger.warning("[!] Picard solution exceeds the cap: %.3e" % top)
        return u, result
    return march(spec, nl, cfg, duhamel)


def _free_field(spec, lattice, eps):
    if not eps:
        return SpaceTimeField(lattice, filled_up_to=lattice.nt - 1)
    return eval_V_field(spec, lattice, eps)


def _sweep_one(args):
    spec, nl, eps, cfg, budget, duhamel = args
    t_max = cfg.lattice.t_max
    lattice = cfg.lattice
    while True:
        lattice = Lattice.covering(lattice.dr, t_max, spec.k, dt=lattice.dt)
        _, result = march(spec, nl, cfg.with_options(epsilon=eps,
                                                     lattice=lattice), duhamel)
        if result.blew_up or t_max >= budget:
            return result
        t_max = min(2.0 * t_max, budget)
        logger.info("[.] eps=%s survived, extending t_max to %s" % (eps, t_max))


def lifespan_sweep(spec, nl, eps_list, cfg, budget=None, jobs=1,
                   duhamel=None):
    """
    march per eps, doubling t_max up to budget (default 2^10 k) until the
    run blows up. Results come back in the order of eps_list.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("eps_list must not be empty")
    if any(b > a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be descending: %s" % eps_list)
    budget = budget or 2.0 ** 10 * spec.k
    tasks = [(spec, nl, eps, cfg, budget, duhamel) for eps in eps_list]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_one, tasks))
    return [_sweep_one(task) for task in tasks]


class GridCheck(object):
    def __init__(self, coarse, fine, tol):
        self.coarse = coarse
        self.fine = fine
        self.tol = tol

    @property
    def rel_diff(self):
        if not (self.coarse.blew_up and self.fine.blew_up):
            return None
        return abs(self.fine.T_hat - self.coarse.T_hat) / self.fine.T_hat

    @property
    def passed(self):
        if self.coarse.blew_up != self.fine.blew_up:
            return False
        if not self.coarse.blew_up:
            return True
        return self.rel_diff <= self.tol


def grid_check(spec, nl, cfg, tol=0.1, duhamel=None):
    """
    T_hat at (dr, dt) against (dr/2, dt/2).
    """
    _, coarse = march(spec, nl, cfg, duhamel)
    _, fine = march(spec, nl, cfg.with_options(lattice=cfg.lattice.refined()),
                    duhamel)
    check = GridCheck(coarse, fine, tol)
    logger.info("[+] Grid check: T_hat %s vs %s, passed=%s" % (
        coarse.T_hat, fine.T_hat, check.passed))
    return check


def plateau_growth(result, tail=0.25):
    """
    Relative growth of the running weighted norm over the final
    fraction tail of the run.
    """
    history = np.maximum.accumulate(np.asarray(result.norm_history, dtype=float))
    if len(history) < 4:
        raise ValueError("need at least 4 slices to measure a plateau")
    start = history[int(math.floor((1.0 - tail) * (len(history) - 1)))]
    if start == 0:
        return 0.0 if history[-1] == 0 else math.inf
    return float(history[-1] / start - 1.0)


def find_survival_threshold(spec, nl, cfg, eps_low, eps_high, iterations=8,
                            duhamel=None):
    """
    Bisect for the largest eps that survives to cfg.lattice.t_max. eps_low
    must survive and eps_high must blow up.
    """
    def survives(eps):
        _, result = march(spec, nl, cfg.with_options(epsilon=eps), duhamel)
        return result

    low = survives(eps_low)
    if low.blew_up:
        raise ValueError("eps_low=%s already blows up" % eps_low)
    high = survives(eps_high)
    if high.survived:
        logger.info("[.] eps_high=%s survives, threshold above bracket" % (
            eps_high))
        return eps_high, high
    for _ in range(iterations):
        mid = 0.5 * (eps_low + eps_high)
        result = survives(mid)
        if result.survived:
            eps_low, low = mid, result
        else:
            eps_high = mid
    logger.info("[+] Survival threshold in [%s, %s]" % (eps_low, eps_high))
    return eps_low, low


class FitReport(object):
    def __init__(self, law, slope, intercept, r2, predicted_slope, points):
        self.law = law
        self.slope = slope
        self.intercept = intercept
        self.r2 = r2
        self.predicted_slope = predicted_slope
        self.points = points

    def passed(self, slope_tol=0.3, min_r2=0.95):
        if self.r2 < min_r2:
            return False
        if self.law == "critical":
            return self.slope > 0
        return abs(self.slope - self.predicted_slope) <= slope_tol

    def as_dict(self):
        return {"law": self.law, "slope": self.slope,
                "intercept": self.intercept, "r2": self.r2,
                "predicted_slope": self.predicted_slope,
                "points": len(self.points)}

    def __repr__(self):
        return "FitReport(law=%s, slope=%.6g, r2=%.6g, predicted=%s)" % (
            self.law, self.slope, self.r2, self.predicted_slope)


def fit_scaling(results, expo, law="subcritical"):
    """
    subcritical: log T_hat against log eps, predicted slope
    -2p(p-1)/zeta. critical: log T_hat against eps^(-p(p-1)), slope > 0.
    """
    blown = [r for r in results if r.blew_up]
    if len(blown) < 4:
        raise ValueError("fit_scaling needs >= 4 blow-up results, got %s" % (
            len(blown)))
    eps = np.array([r.epsilon for r in blown])
    T = np.array([r.T_hat for r in blown])
    p = expo.p
    if law == "subcritical":
        x = np.log(eps)
        predicted = -expo.lifespan_exponent
    elif law == "critical":
        x = eps ** (-p * (p - 1.0))
        predicted = None
    else:
        raise ValueError("Unknown scaling law: %s" % law)
    slope, intercept, r2 = fit_line(x, np.log(T))
    report = FitReport(law, slope, intercept, r2, predicted,
                       list(zip(eps, T)))
    logger.info("[+] %s" % report)
    return report
