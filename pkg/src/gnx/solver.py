"""Extremizer search for the two quotients, plus the endpoint demonstration.

Each run is a monotone ascent on the log-quotient:

1. gauge: rescale the amplitude so ``||D^s u||_2 = 1`` (the quotient has
   degree zero, so this only fixes conditioning);
2. step along the preconditioned gradient ``P G`` with
   ``P = ||D^s u||^2 / (kappa + |xi|^(2s))`` and
   ``kappa = ||D^s u||^2 / ||u||^2``, halving the step until the quotient
   strictly increases;
3. every ``recenter_every`` iterations, translate the iterate so its
   concentration point sits at the origin.

The run stops once the relative quotient change stays below ``tol`` for
five consecutive iterations and the scale-free gradient norm
``||G|| ||u||`` is at most ``grad_tol``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .functionals import (
    gn_gradient,
    gn_quotient,
    gradient_norm,
    lp_norm,
    riesz_energy,
    riesz_gradient,
    riesz_quotient,
    sobolev_seminorm,
)
from .lemmas import besov_scan, high_pass, low_pass
from .regimes import GNParams, classify_gn, classify_riesz
from .spectral import (
    FREQUENCY,
    Field,
    make_grid,
    make_profile,
    spectral_weights,
    symbol,
    translate,
)

RECENTER_ETA = 0.1
PLATEAU = 5


class RegimeError(ValueError):
    """Parameters are outside the attained regime."""


class StepUnderflow(RuntimeError):
    """Backtracking exhausted its halvings away from a critical point."""


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 3000
    tol: float = 1e-9
    step0: float = 1.0
    backtrack: float = 0.5
    recenter_every: int = 25
    seed: int = 0
    grad_tol: float = 1e-5
    max_halvings: int = 60

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.step0 > 0:
            raise ValueError("step0 must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.recenter_every < 0:
            raise ValueError("recenter_every must be >= 0")

    def as_dict(self):
        return asdict(self)


@dataclass
class OptimizationReport:
    best_quotient: float
    iters_used: int
    quotient_history: list
    gauge_residuals: list
    profile: Field
    recenterings: list
    converged: bool
    gradient_norm: float
    gradient_history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def summary(self):
        """JSON-ready scalars and histories (profile excluded)."""
        return {
            "best_quotient": self.best_quotient,
            "iters_used": self.iters_used,
            "converged": self.converged,
            "gradient_norm": self.gradient_norm,
            "quotient_history": list(self.quotient_history),
            "gradient_history": list(self.gradient_history),
            "gauge_residuals": [list(r) for r in self.gauge_residuals],
            "recenterings": [list(a) for a in self.recenterings],
            "diagnostics": dict(self.diagnostics),
        }


# -- recentering -------------------------------------------------------------

def recenter(f, s, p=None):
    """Move the concentration point of ``f`` to the origin.

    Low-frequency case: if ``max |chi0(|D|) f| >= 0.1 max |f|``, the arg-max
    cell of the low-pass part goes to the origin (ties resolve to the first
    cell in row-major order, the lexicographically smallest coordinate).
    Otherwise the sup-over-scales scan of the high-pass part supplies the
    location. Returns ``(translated field, applied shift)``; the applied shift
    is minus the detected location and always lies on the lattice.
    """
    u = f.physical()
    peak = float(np.max(np.abs(u)))
    if peak == 0.0:
        raise ValueError("cannot recenter the zero field")
    grid = f.grid
    g = np.abs(low_pass(f).values)
    if float(g.max()) >= RECENTER_ETA * peak:
        idx = np.unravel_index(int(np.argmax(g)), grid.shape)
        loc = np.array([grid.axis(i)[idx[i]] for i in range(grid.d)])
    else:
        sigma = 0.5 * min(s, grid.d / 2)
        loc = np.array(besov_scan(high_pass(f), sigma).location)
    shift = -loc
    return translate(f, shift), tuple(float(v) for v in shift)


# -- initial data ------------------------------------------------------------

def initial_field(grid, init, s, seed):
    if isinstance(init, Field):
        if init.grid != grid:
            raise ValueError("initial field lives on a different grid")
        return init.to_physical()
    if init == "random":
        rng = np.random.default_rng(seed)
        z = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        coeffs = z * spectral_weights(grid, s + grid.d / 2 + 1)
        return Field(grid, coeffs, FREQUENCY).to_physical()
    if init in ("gaussian", "sech"):
        return make_profile(grid, init)
    raise ValueError(f"unknown init {init!r}")


# -- ascent loop -------------------------------------------------------------

def _precondition(grad, f, s):
    hs2 = sobolev_seminorm(f, s) ** 2
    kappa = hs2 / lp_norm(f, 2) ** 2
    w = hs2 / (kappa + symbol(f.grid, 2 * s))
    return Field(f.grid, grad.spectrum() * w, FREQUENCY).to_physical()


def _gauge(f, s):
    return f * (1.0 / sobolev_seminorm(f, s))


def _ascend(f, quotient, gradient, s, second_norm, cfg):
    f = _gauge(f, s)
    q = quotient(f)
    history = [q]
    grads = []
    gauge = [(abs(sobolev_seminorm(f, s) - 1.0), abs(second_norm(f) - 1.0))]
    shifts = []
    step = cfg.step0
    small = 0
    converged = False
    iters = 0
    gnorm = math.inf
    for it in range(1, cfg.max_iters + 1):
        iters = it
        grad = gradient(f)
        gnorm = gradient_norm(grad, f)
        grads.append(gnorm)
        if small >= PLATEAU and gnorm <= cfg.grad_tol:
            converged = True
            iters = it - 1
            break
        direction = _precondition(grad, f, s)
        t = step
        for _ in range(cfg.max_halvings):
            trial = _gauge(f + t * direction, s)
            q_trial = quotient(trial)
            if q_trial > q:
                break
            t *= cfg.backtrack
        else:
            if gnorm <= cfg.grad_tol or small >= PLATEAU:
                converged = gnorm <= cfg.grad_tol
                iters = it - 1
                break
            raise StepUnderflow(
                f"no ascent after {cfg.max_halvings} halvings (gradient norm {gnorm:.3e})")
        rel = (q_trial - q) / q
        small = small + 1 if rel < cfg.tol else 0
        f, q = trial, q_trial
        step = min(1.25 * t, cfg.step0)
        if cfg.recenter_every and it % cfg.recenter_every == 0:
            # on-lattice shifts leave the quotient unchanged up to rounding
            f, shift = recenter(f, s)
            if any(shift):
                shifts.append(shift)
        history.append(q)
        gauge.append((abs(sobolev_seminorm(f, s) - 1.0), abs(second_norm(f) - 1.0)))
    else:
        grad = gradient(f)
        gnorm = gradient_norm(grad, f)
        grads.append(gnorm)
        converged = small >= PLATEAU and gnorm <= cfg.grad_tol
    return f, history, grads, gauge, shifts, converged, iters, gnorm


def _resolve_gn(params):
    if isinstance(params, GNParams):
        return params
    return GNParams(**params)


def optimize_gn(params, grid, cfg=None, init="gaussian"):
    """Maximise the Gagliardo-Nirenberg quotient on ``grid``."""
    cfg = cfg or OptimizerConfig()
    params = _resolve_gn(params)
    cls = classify_gn(params)
    if not cls.attained:
        raise RegimeError(f"regime {cls} has no maximizer to search for")
    f0 = initial_field(grid, init, params.s, cfg.seed)
    if not np.any(f0.values != 0):
        raise ValueError("initial field is identically zero")

    def quotient(f):
        return gn_quotient(f, params)

    def gradient(f):
        return gn_gradient(f, params)

    def second(f):
        return lp_norm(f, params.p)

    f, hist, grads, gauge, shifts, conv, iters, gnorm = _ascend(
        f0, quotient, gradient, params.s, second, cfg)
    return OptimizationReport(
        best_quotient=hist[-1], iters_used=iters, quotient_history=hist,
        gauge_residuals=gauge, profile=f, recenterings=shifts, converged=conv,
        gradient_norm=gnorm, gradient_history=grads,
        diagnostics={"lp_norm": lp_norm(f, params.p),
                     "sobolev_seminorm": sobolev_seminorm(f, params.s)})


def optimize_riesz(params, grid, cfg=None, init="gaussian"):
    """Maximise the Riesz interpolation quotient on ``grid``."""
    cfg = cfg or OptimizerConfig()
    cls = classify_riesz(params)
    if not cls.attained:
        raise RegimeError(f"regime {cls} has no maximizer to search for")
    f0 = initial_field(grid, init, params.s, cfg.seed)
    if not np.any(f0.values != 0):
        raise ValueError("initial field is identically zero")

    def quotient(f):
        return riesz_quotient(f, params)

    def gradient(f):
        return riesz_gradient(f, params)

    def second(f):
        return riesz_energy(f, params.lam)

    f, hist, grads, gauge, shifts, conv, iters, gnorm = _ascend(
        f0, quotient, gradient, params.s, second, cfg)
    return OptimizationReport(
        best_quotient=hist[-1], iters_used=iters, quotient_history=hist,
        gauge_residuals=gauge, profile=f, recenterings=shifts, converged=conv,
        gradient_norm=gnorm, gradient_history=grads,
        diagnostics={"riesz_energy": riesz_energy(f, params.lam),
                     "sobolev_seminorm": sobolev_seminorm(f, params.s)})


# -- profile fitting ---------------------------------------------------------

def fit_sech(f):
    """Best ``c sech((x - a)/b)`` (complex ``c``) in L2 for a 1-d field.

    Returns ``(a, b, c, relative L2 error)``.
    """
    from scipy.optimize import minimize

    if f.grid.d != 1:
        raise ValueError("sech fit is one-dimensional")
    x = f.grid.axis(0)
    u = f.physical()
    w = f.grid.cell_volume

    def parts(theta):
        a, logb = theta
        prof = 1.0 / np.cosh((x - a) / math.exp(logb))
        c = np.vdot(prof, u) / np.vdot(prof, prof)
        resid = u - c * prof
        return c, math.sqrt(w * float(np.sum(np.abs(resid) ** 2)))

    mod = np.abs(u)
    a0 = float(x[int(np.argmax(mod))])
    width0 = float(w * np.sum(mod) / (2 * mod.max()))
    res = minimize(lambda t: parts(t)[1], x0=[a0, math.log(max(width0, 1e-3))],
                   method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14,
                                                  "maxiter": 4000})
    c, err = parts(res.x)
    return float(res.x[0]), math.exp(res.x[1]), complex(c), err / lp_norm(f, 2)


# -- endpoint demonstration --------------------------------------------------

ENDPOINT_PARAMS = GNParams(1, 1, 2, 2, 2)
ENDPOINT_GRID = (1, 16384, 4096 * math.pi)


def bump_quotient_closed_form(delta):
    """Quotient of the frequency indicator of ``(1-delta, 1+delta)``."""
    return math.sqrt((1 + delta ** 2 / 3) / math.sqrt(1 + 2 * delta ** 2 + delta ** 4 / 5))


@dataclass(frozen=True)
class EndpointRow:
    delta: float
    closed_form: float
    grid_value: float

    @property
    def abs_diff(self):
        return abs(self.closed_form - self.grid_value)


def endpoint_demo(deltas, grid=None):
    """Evaluate the endpoint quotient on frequency-bump profiles.

    Rows are returned in order of decreasing ``delta``; along that order both
    columns increase towards 1 without reaching it.
    """
    deltas = [float(v) for v in deltas]
    if not deltas:
        raise ValueError("no deltas given")
    for dl in deltas:
        if not 0 < dl < 1:
            raise ValueError(f"delta must lie in (0, 1), got {dl}")
    grid = grid or make_grid(*ENDPOINT_GRID)
    rows = []
    for dl in sorted(deltas, reverse=True):
        f = make_profile(grid, "fourier_bump", delta=dl)
        rows.append(EndpointRow(dl, bump_quotient_closed_form(dl),
                                gn_quotient(f, ENDPOINT_PARAMS)))
    return rows


def endpoint_monotone(rows):
    """Both columns strictly increase as delta decreases and stay below 1."""
    ok = all(r.closed_form < 1 and r.grid_value < 1 for r in rows)
    for a, b in zip(rows, rows[1:]):
        ok = ok and b.closed_form > a.closed_form and b.grid_value > a.grid_value
    return ok
