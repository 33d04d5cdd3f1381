"""Exponent algebra for the two inequality families.

Gagliardo-Nirenberg: ``||D^r u||_q <= C ||u||_p^(1-theta) ||D^s u||_2^theta``
with theta fixed by dimensional balance. Riesz interpolation:
``||u||_2p <= C ||u||_{H^s}^(theta/(2-theta)) E_lam(u)^((1-theta)/(4-2theta))``.

Classification never raises for bad parameters; it returns an ``Invalid``
class with a reason. Endpoint comparisons use an absolute tolerance of 1e-12.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

TOL = 1e-12

ATTAINED = "Attained"
ENDPOINT_RATIO = "EndpointThetaEqualsRatio"
ENDPOINT_ONE = "EndpointThetaOne"
ENDPOINT_P = "EndpointPBoundary"
ENDPOINT_INF = "EndpointPInfinity"
INVALID = "Invalid"


@dataclass(frozen=True)
class RegimeClass:
    kind: str
    reason: str = ""
    case: int | None = None

    @property
    def attained(self):
        return self.kind == ATTAINED

    @property
    def invalid(self):
        return self.kind == INVALID

    @property
    def endpoint(self):
        return self.kind.startswith("Endpoint")

    def __str__(self):
        return f"Invalid({self.reason})" if self.invalid else self.kind


def gn_theta(d, r, s, p, q):
    """Interpolation exponent from ``-r + d/q = (1-theta) d/p + theta (d/2 - s)``."""
    if not (1 < p < math.inf and 1 < q < math.inf):
        raise ValueError("p and q must lie in (1, inf)")
    if s <= 0:
        raise ValueError("s must be positive")
    den = d / p + s - d / 2
    if abs(den) <= TOL:
        raise ValueError("degenerate scaling relation: d/p + s - d/2 = 0")
    return (d / p + r - d / q) / den


def scaling_residual(d, r, s, p, q, theta):
    return (-r + d / q) - ((1 - theta) * d / p + theta * (d / 2 - s))


@dataclass(frozen=True)
class GNParams:
    """``(d, r, s, p, q)``; ``theta`` is derived (NaN when undefined)."""

    d: int
    r: float
    s: float
    p: float
    q: float
    theta: float = field(init=False)

    def __post_init__(self):
        try:
            th = gn_theta(self.d, self.r, self.s, self.p, self.q)
        except ValueError:
            th = math.nan
        object.__setattr__(self, "theta", th)

    def as_dict(self):
        return {"d": self.d, "r": self.r, "s": self.s, "p": self.p, "q": self.q,
                "theta": self.theta}


def classify_gn(params):
    d, r, s, p, q = params.d, params.r, params.s, params.p, params.q
    if d not in (1, 2, 3):
        return RegimeClass(INVALID, "d must be 1, 2 or 3")
    if not (1 < p < math.inf and 1 < q < math.inf):
        return RegimeClass(INVALID, "1 < p, q < inf violated")
    if s <= 0:
        return RegimeClass(INVALID, "s > 0 violated")
    if r < 0:
        return RegimeClass(INVALID, "r >= 0 violated")
    if r > s + TOL:
        return RegimeClass(INVALID, "r <= s violated")
    th = params.theta
    if not math.isfinite(th):
        return RegimeClass(INVALID, "scaling relation has no solution for theta")
    ratio = r / s
    if abs(th - 1) <= TOL:
        return RegimeClass(ENDPOINT_ONE, "theta = 1 (Sobolev endpoint)")
    if abs(th - ratio) <= TOL:
        return RegimeClass(ENDPOINT_RATIO, "theta = r/s")
    if ratio < th < 1:
        return RegimeClass(ATTAINED)
    return RegimeClass(INVALID, f"theta = {th:.6g} outside [r/s, 1] = [{ratio:.6g}, 1]")


def riesz_theta(d, s, lam, p):
    """``theta = (2d - 2pd + p lam) / (d - 2ps - pd + p lam)``; ``p = inf`` allowed."""
    if math.isinf(p):
        return (2 * d - lam) / (d + 2 * s - lam)
    den = d - 2 * p * s - p * d + p * lam
    if abs(den) <= TOL:
        raise ValueError("theta undefined: d - 2ps - pd + p*lam = 0")
    return (2 * d - 2 * p * d + p * lam) / den


def lower_p(d, s, lam):
    """``(d - lam + 4s) / (d - lam + 2s)``."""
    return (d - lam + 4 * s) / (d - lam + 2 * s)


def sobolev_p(d, s):
    """``d / (d - 2s)`` for ``d > 2s``, else ``inf``."""
    return d / (d - 2 * s) if d - 2 * s > TOL else math.inf


def riesz_case(d, s, lam):
    """Index 1-5 of the admissible-p case that applies to ``(d, s, lam)``."""
    c_lam = lam - 4 * s
    c_d = d - 2 * s
    if c_lam < -TOL:
        if c_d < -TOL:
            return 1
        if abs(c_d) <= TOL:
            return 2
        return 3
    if abs(c_lam) <= TOL:
        return 4 if c_d > TOL else None
    return 5 if c_d > TOL else None


def riesz_interval(d, s, lam):
    """``(case, lo, hi, hi_included)`` for the admissible p range."""
    case = riesz_case(d, s, lam)
    p1 = lower_p(d, s, lam)
    if case == 1:
        return case, p1, math.inf, True
    if case == 2:
        return case, p1, math.inf, False
    if case == 3:
        return case, p1, sobolev_p(d, s), True
    if case == 4:
        return case, p1, p1, True
    if case == 5:
        return case, sobolev_p(d, s), p1, True
    return None, math.nan, math.nan, False


@dataclass(frozen=True)
class RieszParams:
    """``(d, s, lam, p)``; ``theta`` is derived (1 at the Sobolev exponent)."""

    d: int
    s: float
    lam: float
    p: float
    theta: float = field(init=False)

    def __post_init__(self):
        d, s, lam, p = self.d, self.s, self.lam, self.p
        if d - 2 * s > TOL and abs(p - d / (d - 2 * s)) <= TOL:
            th = 1.0
        else:
            try:
                th = riesz_theta(d, s, lam, p)
            except ValueError:
                th = math.nan
        object.__setattr__(self, "theta", th)

    def as_dict(self):
        return {"d": self.d, "s": self.s, "lambda": self.lam, "p": self.p,
                "theta": self.theta}


def classify_riesz(params):
    d, s, lam, p = params.d, params.s, params.lam, params.p
    if d not in (1, 2, 3):
        return RegimeClass(INVALID, "d must be 1, 2 or 3")
    if s <= 0:
        return RegimeClass(INVALID, "s > 0 violated")
    if not 0 < lam < d:
        return RegimeClass(INVALID, "0 < lambda < d violated")
    if not p > 1:
        return RegimeClass(INVALID, "p > 1 violated")
    case, lo, hi, hi_incl = riesz_interval(d, s, lam)
    if case is None:
        return RegimeClass(INVALID, "no admissible case for (d, s, lambda)")
    if math.isinf(p):
        if math.isinf(hi) and hi_incl:
            return RegimeClass(ENDPOINT_INF, "p = inf", case)
        return RegimeClass(INVALID, "p = inf not admissible", case)
    if abs(p - lo) <= TOL or (math.isfinite(hi) and abs(p - hi) <= TOL):
        which = []
        if abs(p - lower_p(d, s, lam)) <= TOL:
            which.append("p = (d-lam+4s)/(d-lam+2s)")
        if abs(p - sobolev_p(d, s)) <= TOL:
            which.append("p = d/(d-2s)")
        return RegimeClass(ENDPOINT_P, ", ".join(which), case)
    if lo < p < hi:
        return RegimeClass(ATTAINED, "", case)
    return RegimeClass(INVALID, f"p = {p:.6g} outside admissible range of case {case}", case)


def validate_gn(params):
    cls = classify_gn(params)
    if cls.invalid:
        raise ValueError(f"invalid Gagliardo-Nirenberg parameters: {cls.reason}")
    return cls


def validate_riesz(params):
    cls = classify_riesz(params)
    if cls.invalid:
        raise ValueError(f"invalid Riesz parameters: {cls.reason}")
    return cls
