"""Numerical checks of the supporting lemmas.

Covers superlevel-set constants for three-norm bounds, the non-local
Brezis-Lieb splitting of the Riesz energy, Cauchy-Schwarz for the kernel
form, the sup-over-scales functional behind the refined Sobolev inequality,
and the intermediate Gagliardo-Nirenberg ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import (
    lp_norm,
    riesz_bilinear,
    riesz_energy,
    sobolev_seminorm,
)
from .regimes import riesz_theta
from .spectral import FREQUENCY, Field, apply_multiplier, inverse, make_grid, translate


# -- smooth frequency cutoffs ------------------------------------------------

def _smooth_step(x):
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def chi0(t):
    """C-infinity cutoff: 1 on ``[0, 1]``, 0 on ``[2, inf)``."""
    t = np.asarray(t, dtype=float)
    a = _smooth_step(2.0 - t)
    b = _smooth_step(t - 1.0)
    return a / (a + b)


def chi1(t):
    return 1.0 - chi0(t)


def low_pass(f):
    """``chi0(|D|) f`` in physical space."""
    c = f.spectrum() * chi0(f.grid.xi_abs())
    return Field(f.grid, c, FREQUENCY).to_physical()


def high_pass(f):
    c = f.spectrum() * chi1(f.grid.xi_abs())
    return Field(f.grid, c, FREQUENCY).to_physical()


# -- sup over scales ---------------------------------------------------------

@dataclass(frozen=True)
class BesovScan:
    value: float
    scale: float
    location: tuple
    scales: tuple = field(repr=False, default=())
    values: tuple = field(repr=False, default=())


def _scale_value(coeffs, grid, xi, s, A, profile):
    d = grid.d
    vals = inverse(coeffs * profile(xi / A), grid) / A ** d
    mag = np.abs(vals)
    k = int(np.argmax(mag))
    return A ** (d / 2 + s) * float(mag.flat[k]), k


def besov_scan(f, s, theta_profile=None):
    """Dyadic scan of ``A^(d/2+s) ||theta(A.) * f||_inf`` with quarter-octave
    refinement around the best octave.

    ``theta_profile`` is the radial transform of ``theta`` as a function of
    ``|xi|``; the default is :func:`chi0`. The scan starts at twice the lattice
    spacing (coarser scales are not resolved by the frequency lattice) and
    stops once every lattice frequency passes the cutoff.
    """
    grid = f.grid
    if not 0 < s < grid.d / 2:
        raise ValueError(f"need 0 < s < d/2 = {grid.d / 2}, got {s}")
    profile = chi0 if theta_profile is None else theta_profile
    coeffs = f.spectrum()
    xi = grid.xi_abs()
    if not np.any(coeffs != 0):
        return BesovScan(0.0, math.nan, (0.0,) * grid.d)
    dxi = 2 * np.pi / max(grid.L)
    j_lo = math.floor(math.log2(2 * dxi))
    j_hi = math.ceil(math.log2(2 * float(xi.max())))
    scales, values, where = [], [], []
    for j in range(j_lo, j_hi + 1):
        v, k = _scale_value(coeffs, grid, xi, s, 2.0 ** j, profile)
        scales.append(float(j))
        values.append(v)
        where.append(k)
    best = int(np.argmax(values))
    jb = scales[best]
    for quarter in (-3, -2, -1, 1, 2, 3):
        j = jb + quarter / 4
        if j < j_lo or j > j_hi:
            continue
        v, k = _scale_value(coeffs, grid, xi, s, 2.0 ** j, profile)
        scales.append(j)
        values.append(v)
        where.append(k)
    best = int(np.argmax(values))
    idx = np.unravel_index(where[best], grid.shape)
    loc = tuple(float(grid.axis(i)[idx[i]]) for i in range(grid.d))
    return BesovScan(values[best], 2.0 ** scales[best], loc, tuple(scales), tuple(values))


def besov_sup(f, s, theta_profile=None):
    return besov_scan(f, s, theta_profile).value


def refined_sobolev_ratio(corpus, s, q=None):
    """Largest ``||u||_q / (||u||_{H^s}^(2/q) B_s(u)^(1-2/q))`` over ``corpus``."""
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    d = corpus[0].grid.d
    if not 0 < s < d / 2:
        raise ValueError(f"need 0 < s < d/2, got {s}")
    if q is None:
        q = 2 * d / (d - 2 * s)
    return max(refined_sobolev_terms(u, s, q) for u in corpus)


def refined_sobolev_terms(u, s, q):
    top = lp_norm(u, q)
    hs = sobolev_seminorm(u, s)
    b = besov_sup(u, s)
    return top / (hs ** (2 / q) * b ** (1 - 2 / q))


def interm_gn_ratio(psi, d, s, lam, p):
    """``||D^a psi||_p / (||psi||_2^(1-theta) ||D^(s+a) psi||_(2p/(p+1))^theta)``
    with ``a = (d - lam)/2`` and theta from the Riesz relation."""
    if psi.grid.d != d:
        raise ValueError("field dimension does not match d")
    if not (1 < p < math.inf):
        raise ValueError("need 1 < p < inf")
    theta = riesz_theta(d, s, lam, p)
    lo = (d - lam) / (d + 2 * s - lam)
    if not (lo - 1e-12 <= theta < 1):
        raise ValueError(f"theta = {theta:.6g} outside [{lo:.6g}, 1)")
    a = (d - lam) / 2
    top = lp_norm(apply_multiplier(psi, a), p)
    mid = lp_norm(psi, 2)
    bot = lp_norm(apply_multiplier(psi, s + a), 2 * p / (p + 1))
    return top / (mid ** (1 - theta) * bot ** theta)


def standard_corpus(grid):
    """Twenty fixed smooth profiles, defined analytically so they can be
    re-sampled on any grid covering the same box."""
    xs = grid.mesh()
    d = grid.d
    r2 = sum(x ** 2 for x in xs)
    out = []

    def gauss(sig, c=None, aniso=None):
        c = c or (0.0,) * d
        aniso = aniso or (1.0,) * d
        q = sum(((x - ci) / (sig * ai)) ** 2 for x, ci, ai in zip(xs, c, aniso))
        return np.exp(-q / 2)

    for sig in (0.6, 0.8, 1.0, 1.4, 2.0):
        out.append(gauss(sig))
    for aniso in ((1.0, 0.6, 1.5), (1.8, 1.0, 0.8), (0.7, 0.7, 1.4)):
        out.append(gauss(1.0, aniso=aniso[:d]))
    for w in (0.7, 1.0, 1.5):
        out.append(1.0 / np.cosh(np.sqrt(r2) / w))
    e1 = (1.0,) + (0.0,) * (d - 1)
    for sep, phase in ((2.0, 0.0), (3.0, np.pi / 2), (4.0, np.pi)):
        a = tuple(sep / 2 * v for v in e1)
        b = tuple(-sep / 2 * v for v in e1)
        out.append(gauss(0.9, c=a) + np.exp(1j * phase) * gauss(0.9, c=b))
    for k in (1.0, 2.0):
        out.append(np.exp(1j * k * xs[0]) * gauss(1.0))
    out.append(xs[0] * gauss(1.0))
    out.append((1 - r2 / 2) * gauss(1.0))
    cluster = sum(gauss(0.8, c=tuple(1.5 * np.cos(2 * np.pi * m / 3 + t) for t in
                                     (0.0, np.pi / 2, np.pi)[:d]))
                  for m in range(3))
    out.append(cluster)
    out.append(gauss(1.2, c=(1.0,) * d))
    return [Field(grid, v) for v in out]


# -- superlevel sets ---------------------------------------------------------

@dataclass(frozen=True)
class PqrConstants:
    eta: float
    c: float
    M: float
    p: float
    q: float
    r: float
    alpha: float
    beta: float
    gamma: float


def pqr_constants(p, q, r, alpha, beta, gamma):
    """Threshold and measure bound from three-layer truncation.

    With ``eta^(q-p) alpha = beta/4`` and ``M^(q-r) gamma = beta/4`` the
    layers ``|f| <= eta`` and ``|f| > M`` carry at most ``beta/2`` of
    ``||f||_q^q``, so ``|{|f| > eta}| >= beta / (2 M^q)``.
    """
    if math.isinf(r):
        raise ValueError("r = inf is not supported")
    if not (1 <= p < q < r):
        raise ValueError("need 1 <= p < q < r < inf")
    if min(alpha, beta, gamma) <= 0:
        raise ValueError("alpha, beta, gamma must be positive")
    eta = (beta / (4 * alpha)) ** (1 / (q - p))
    M = (4 * gamma / beta) ** (1 / (r - q))
    c = beta / (2 * M ** q)
    return PqrConstants(eta, c, M, p, q, r, alpha, beta, gamma)


def superlevel_measure(f, eta):
    """``|{|f| > eta}|`` on the grid."""
    if not eta > 0:
        raise ValueError("threshold must be positive")
    count = int(np.count_nonzero(np.abs(f.physical()) > eta))
    return f.grid.cell_volume * count


def power_sum(f, p):
    """``||f||_p^p`` (also valid for p = 1)."""
    return float(f.grid.cell_volume * np.sum(np.abs(f.physical()) ** p))


@dataclass
class PqrCase:
    field: Field
    constants: PqrConstants
    measure: float

    @property
    def slack(self):
        return self.measure / self.constants.c


def feasible_step_function(rng, p, q, r, n=256, blocks=None):
    """Random step function plus bounds ``(alpha, beta, gamma)`` it satisfies.

    Amplitudes are drawn on random blocks, then the amplitude and the box
    length are rescaled so ``||f||_q^q`` sits at a random target; alpha and
    gamma are set above the attained norms by random margins.
    """
    blocks = blocks or int(rng.integers(1, 17))
    edges = np.sort(rng.choice(np.arange(1, n), size=blocks - 1, replace=False))
    amps = rng.lognormal(0.0, 1.2, size=blocks) * rng.choice([-1.0, 1.0], size=blocks)
    vals = np.empty(n)
    for amp, part in zip(amps, np.split(np.arange(n), edges)):
        vals[part] = amp
    vals[rng.random(n) < 0.2] = 0.0
    if not np.any(vals):
        vals[0] = 1.0
    t = math.exp(rng.normal(0.0, 1.0))
    length = math.exp(rng.normal(math.log(n / 32), 1.0))
    grid = make_grid(1, n, length)
    f = Field(grid, t * vals)
    margin = lambda: 1.0 + rng.exponential(0.5)  # noqa: E731
    alpha = power_sum(f, p) * margin()
    beta = power_sum(f, q) / margin()
    gamma = power_sum(f, r) * margin()
    return f, alpha, beta, gamma


def pqr_sweep(trials=1000, seed=1, exponents=None):
    """Check ``|{|f| > eta}| >= c`` on seeded feasible step functions."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(trials):
        if exponents is None:
            p = float(rng.uniform(1.0, 3.0))
            q = p + float(rng.uniform(0.2, 3.0))
            r = q + float(rng.uniform(0.2, 4.0))
        else:
            p, q, r = exponents
        f, alpha, beta, gamma = feasible_step_function(rng, p, q, r)
        k = pqr_constants(p, q, r, alpha, beta, gamma)
        cases.append(PqrCase(f, k, superlevel_measure(f, k.eta)))
    return cases


# -- Brezis-Lieb splitting ---------------------------------------------------

@dataclass
class BLReport:
    separations: list
    residuals: list
    cross_terms: list
    remainders: list
    identity_errors: list
    local_residuals: dict

    def slope(self):
        """Least-squares slope of log residual against log separation."""
        x = np.log(np.asarray(self.separations, dtype=float))
        y = np.log(np.asarray(self.residuals, dtype=float))
        return float(np.polyfit(x, y, 1)[0])

    def strictly_decreasing(self):
        r = self.residuals
        return all(b < a for a, b in zip(r, r[1:]))


def _safe_separation(f, g, a):
    """Reject shifts that push ``g`` across the periodic seam."""
    grid = f.grid
    half = min(grid.L) / 2
    mag = float(np.linalg.norm(a))
    if mag > half:
        return False
    # support radius: where |g| drops below 1e-12 of its peak
    mod = np.abs(g.physical())
    thresh = 1e-12 * mod.max()
    supp = grid.radius()[mod > thresh]
    reach = float(supp.max()) if supp.size else 0.0
    return mag + reach <= half + 1e-12 or reach == 0.0


def _shift_vector(a, d):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.size == 1 and d > 1:
        a = np.concatenate([a, np.zeros(d - 1)])
    return a


def bl_nonlocal_verify(f, g, separations, lam, p=2.0):
    """Split ``E(f + g(. - a))`` into ``E(f) + E(g(. - a))`` for each ``a``.

    Records the residual of the splitting, the cross term
    ``iint conj(s(x)) s(y) |x-y|^-lam`` with ``s = conj(f) (f_a - f)``, and
    the three remainders of the exact expansion
    ``E(f_a) = A + E(f_a - f) - 4 R1 + 4 R2 - 4 R3``. ``local_residuals`` holds
    ``||f_a||^t - ||f||^t - ||f_a - f||^t`` for ``t`` in ``p`` (scalar or list).
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    exps = [float(p)] if np.ndim(p) == 0 else [float(v) for v in p]
    d = f.grid.d
    seps, res, cross, rems, ident = [], [], [], [], []
    local = {t: [] for t in exps}
    e_f = riesz_energy(f, lam)
    grid = f.grid
    for a in separations:
        vec = _shift_vector(a, d)
        if not _safe_separation(f, g, vec):
            raise ValueError(f"separation {a!r} wraps around the periodic box")
        ga = translate(g, vec)
        fa = f + ga
        w = fa - f
        e_fa = riesz_energy(fa, lam)
        e_w = riesz_energy(w, lam)
        seps.append(float(np.linalg.norm(vec)))
        res.append(abs(e_fa - (e_f + e_w)))
        u = f.physical()
        s_field = Field(grid, np.conj(u) * w.physical())
        cross.append(riesz_bilinear(s_field, s_field, lam).real)
        rn = Field(grid, s_field.values.real)
        rho_fa = Field(grid, np.abs(fa.physical()) ** 2)
        rho_f = Field(grid, np.abs(u) ** 2)
        r1 = riesz_bilinear(rn, rn, lam).real
        r2 = riesz_bilinear(rn, rho_fa, lam).real
        r3 = riesz_bilinear(rn, rho_f, lam).real
        big_a = 2 * riesz_bilinear(rho_f, rho_fa, lam).real - e_f
        rems.append((r1, r2, r3))
        ident.append(abs(e_fa - (big_a + e_w - 4 * r1 + 4 * r2 - 4 * r3)))
        for t in exps:
            local[t].append(power_sum(fa, t) - power_sum(f, t) - power_sum(w, t))
    return BLReport(seps, res, cross, rems, ident, local)


def riesz_cauchy_schwarz(g, h, lam):
    """``(|B(g, h)|, sqrt(B(g, g) B(h, h)))`` for the discretised kernel form."""
    lhs = abs(riesz_bilinear(g, h, lam))
    bgg = riesz_bilinear(g, g, lam).real
    bhh = riesz_bilinear(h, h, lam).real
    return lhs, math.sqrt(max(bgg, 0.0)) * math.sqrt(max(bhh, 0.0))
