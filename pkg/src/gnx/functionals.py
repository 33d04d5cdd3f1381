"""Norms, the Riesz energy, both inequality quotients and their gradients.

Gradients are taken with respect to ``conj(f)`` against the weighted inner
product ``<h, G> = h^d sum conj(h) G``, so the real directional derivative of
the log-quotient along ``h`` is ``Re <h, G>``.
"""
from __future__ import annotations

import enum
import math

import numpy as np

from . import kernels
from .regimes import validate_gn, validate_riesz
from .spectral import Field, apply_multiplier, symbol


class RieszMethod(str, enum.Enum):
    FOURIER = "fourier"
    DIRECT = "direct"


def lp_norm(f, p):
    if not p > 1:
        raise ValueError(f"L^p norm needs p > 1, got {p}")
    a = np.abs(f.physical())
    if math.isinf(p):
        return float(a.max())
    peak = float(a.max())
    if peak == 0.0:
        return 0.0
    return peak * float(f.grid.cell_volume * np.sum((a / peak) ** p)) ** (1.0 / p)


def sobolev_seminorm(f, s):
    """``||D^s f||_2`` from the frequency coefficients."""
    if not s > 0:
        raise ValueError(f"Sobolev order must be positive, got {s}")
    c = f.spectrum()
    w = symbol(f.grid, 2 * s)
    return math.sqrt(float(np.sum(w * np.abs(c) ** 2)) / math.prod(f.grid.L))


def _check_lambda(grid, lam):
    if not 0 < lam < grid.d:
        raise ValueError(f"need 0 < lambda < d = {grid.d}, got {lam}")


def riesz_potential(f, lam):
    """``K_lam * |f|^2`` on the grid (zero-padded, no periodic images)."""
    _check_lambda(f.grid, lam)
    rho = np.abs(f.physical()) ** 2
    return kernels.convolve(rho, f.grid, lam)


def riesz_energy(f, lam, method=RieszMethod.FOURIER):
    """Discretised ``iint |f(x)|^2 |f(y)|^2 |x-y|^-lam dx dy``."""
    _check_lambda(f.grid, lam)
    method = RieszMethod(method)
    rho = np.abs(f.physical()) ** 2
    if method is RieszMethod.DIRECT:
        return kernels.pair_sum(rho, rho, f.grid, lam).real
    pot = kernels.convolve(rho, f.grid, lam)
    return float(f.grid.cell_volume * np.sum(rho * pot))


def riesz_bilinear(g, h, lam, method=RieszMethod.FOURIER):
    """``B(g, h) = iint conj(g(x)) h(y) |x-y|^-lam dx dy`` (complex)."""
    if g.grid != h.grid:
        raise ValueError("fields live on different grids")
    _check_lambda(g.grid, lam)
    a, b = g.physical(), h.physical()
    if RieszMethod(method) is RieszMethod.DIRECT:
        return kernels.pair_sum(a, b, g.grid, lam)
    pot = kernels.convolve(b, g.grid, lam)
    return complex(g.grid.cell_volume * np.vdot(a.ravel(), pot.ravel()))


def _require_nonzero(f):
    if not np.any(f.values != 0):
        raise ValueError("quotient undefined for the zero field")


def _derivative(f, order):
    if order == 0:
        return f.to_physical()
    return apply_multiplier(f, order).to_physical()


def gn_terms(f, params):
    """``(||D^r f||_q, ||f||_p, ||D^s f||_2)``."""
    return (lp_norm(_derivative(f, params.r), params.q),
            lp_norm(f, params.p),
            sobolev_seminorm(f, params.s))


def gn_quotient(f, params):
    validate_gn(params)
    _require_nonzero(f)
    top, lp, hs = gn_terms(f, params)
    th = params.theta
    return top / (lp ** (1 - th) * hs ** th)


def log_gn_quotient(f, params):
    top, lp, hs = gn_terms(f, params)
    th = params.theta
    return math.log(top) - (1 - th) * math.log(lp) - th * math.log(hs)


def gn_gradient(f, params):
    """Gradient of ``log gn_quotient`` with respect to ``conj(f)``."""
    validate_gn(params)
    _require_nonzero(f)
    r, s, p, q, th = params.r, params.s, params.p, params.q, params.theta
    g = _derivative(f, r).values
    u = f.physical()
    top_q = float(f.grid.cell_volume * np.sum(np.abs(g) ** q))
    lp_p = float(f.grid.cell_volume * np.sum(np.abs(u) ** p))
    hs2 = sobolev_seminorm(f, s) ** 2
    if min(top_q, lp_p, hs2) <= 0:
        raise ValueError("gradient undefined: a norm in the quotient vanishes")
    a = _derivative(Field(f.grid, _pow_phase(g, q)), r).values
    b = _pow_phase(u, p)
    c = apply_multiplier(f.to_physical(), 2 * s).values
    grad = a / top_q - (1 - th) * b / lp_p - th * c / hs2
    return Field(f.grid, grad)


def _pow_phase(u, p):
    """``|u|^(p-2) u`` with the convention ``0`` at ``u = 0``."""
    mag = np.abs(u)
    out = np.zeros_like(u)
    nz = mag > 0
    out[nz] = mag[nz] ** (p - 2) * u[nz]
    return out


def riesz_exponents(theta):
    """Weights ``(theta/(2-theta), (1-theta)/(4-2theta))`` of the two denominators."""
    return theta / (2 - theta), (1 - theta) / (4 - 2 * theta)


def riesz_terms(f, params):
    """``(||f||_2p, ||f||_{H^s}, E_lam(f))``."""
    return (lp_norm(f, 2 * params.p), sobolev_seminorm(f, params.s),
            riesz_energy(f, params.lam))


def riesz_quotient(f, params):
    validate_riesz(params)
    _require_nonzero(f)
    top, hs, energy = riesz_terms(f, params)
    a, b = riesz_exponents(params.theta)
    return top / (hs ** a * energy ** b)


def log_riesz_quotient(f, params):
    top, hs, energy = riesz_terms(f, params)
    a, b = riesz_exponents(params.theta)
    return math.log(top) - a * math.log(hs) - b * math.log(energy)


def riesz_energy_gradient(f, lam):
    """Variation of the energy: ``4 (K * |f|^2) f``."""
    return Field(f.grid, 4.0 * riesz_potential(f, lam) * f.physical())


def riesz_gradient(f, params):
    """Gradient of ``log riesz_quotient`` with respect to ``conj(f)``."""
    validate_riesz(params)
    _require_nonzero(f)
    p2 = 2 * params.p
    u = f.physical()
    h = f.grid.cell_volume
    lp_p = float(h * np.sum(np.abs(u) ** p2))
    hs2 = sobolev_seminorm(f, params.s) ** 2
    pot = riesz_potential(f, params.lam)
    energy = float(h * np.sum(np.abs(u) ** 2 * pot))
    if min(lp_p, hs2, energy) <= 0:
        raise ValueError("gradient undefined: a norm in the quotient vanishes")
    wa, wb = riesz_exponents(params.theta)
    c = apply_multiplier(f.to_physical(), 2 * params.s).values
    grad = _pow_phase(u, p2) / lp_p - wa * c / hs2 - wb * 4.0 * pot * u / energy
    return Field(f.grid, grad)


def gradient_norm(grad, f):
    """Scale-free stationarity measure ``||G||_2 ||f||_2``."""
    return lp_norm(grad, 2) * lp_norm(f, 2)
