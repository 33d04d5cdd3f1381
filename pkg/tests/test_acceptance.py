"""Acceptance suite: one PASS/FAIL line per criterion, then the assertion.

Each check records its own wall time and compares it with the budget for
that criterion.
"""
import json
import math
import time

import numpy as np
import pytest

import oracles
from gnx.cli import main
from gnx.functionals import (
    RieszMethod,
    gn_gradient,
    gn_quotient,
    log_gn_quotient,
    log_riesz_quotient,
    lp_norm,
    riesz_energy,
    riesz_gradient,
    riesz_quotient,
)
from gnx.lemmas import (
    bl_nonlocal_verify,
    power_sum,
    pqr_constants,
    pqr_sweep,
    riesz_cauchy_schwarz,
    superlevel_measure,
)
from gnx.regimes import ATTAINED, ENDPOINT_P, INVALID, GNParams, RieszParams, classify_riesz
from gnx.solver import OptimizerConfig, fit_sech, optimize_gn, optimize_riesz
from gnx.spectral import Field, inner, make_grid, make_profile, plancherel_norm, translate

pytestmark = pytest.mark.acceptance


def report(capsys, number, title, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail} "
              f"| {elapsed:.1f} s (budget {budget:.0f} s)")
    return ok


def test_criterion_1_endpoint_demo(capsys):
    t0 = time.perf_counter()
    code = main(["demo", "endpoint", "--deltas", "0.25,0.125"])
    out = capsys.readouterr().out.strip().splitlines()
    rows = [[float(v) for v in line.split(",")] for line in out[1:]]
    elapsed = time.perf_counter() - t0
    (d1, c1, g1, e1), (d2, c2, g2, e2) = rows
    ok = (code == 0 and d1 == 0.25 and d2 == 0.125
          and abs(c1 - 0.980877) <= 1e-5 and abs(c2 - 0.994897) <= 1e-5
          and e1 <= 1e-4 and e2 <= 1e-4 and g1 < g2 < 1)
    detail = f"closed {c1:.6f}/{c2:.6f}, grid {g1:.6f}/{g2:.6f}, diffs {e1:.1e}/{e2:.1e}"
    assert report(capsys, 1, "endpoint demo", ok, detail, elapsed, 10)


def test_criterion_2_weinstein(capsys):
    t0 = time.perf_counter()
    params = GNParams(1, 0, 1, 2, 4)
    grid = make_grid(1, 512, 60)
    runs = [optimize_gn(params, grid, OptimizerConfig(), init="gaussian"),
            optimize_gn(params, grid, OptimizerConfig(seed=3), init="random")]
    elapsed = time.perf_counter() - t0
    oracle = oracles.weinstein_sech_quotient()
    fits = [fit_sech(r.profile)[3] for r in runs]
    ok = all(abs(r.best_quotient - 0.871685) <= 1e-3 for r in runs) and max(fits) <= 5e-2
    detail = (f"quotients {runs[0].best_quotient:.7f}/{runs[1].best_quotient:.7f} "
              f"(oracle {oracle:.7f}), sech fit {max(fits):.1e}")
    assert report(capsys, 2, "Weinstein optimizer", ok, detail, elapsed, 120)


def test_criterion_3_gaussian_endpoint_quotient(capsys):
    t0 = time.perf_counter()
    q = gn_quotient(make_profile(make_grid(1, 512, 40), "gaussian"), GNParams(1, 1, 2, 2, 2))
    elapsed = time.perf_counter() - t0
    target = 3 ** -0.25
    ok = abs(q - target) <= 1e-4
    assert report(capsys, 3, "Gaussian GN endpoint quotient", ok,
                  f"{q:.10f} vs {target:.10f}", elapsed, 5)


def test_criterion_4_riesz_energy(capsys):
    t0 = time.perf_counter()
    g = make_grid(3, 16, 10)
    worst = 0.0
    for seed in range(20):
        f = make_profile(g, "random", seed=seed)
        a = riesz_energy(f, 1.0, RieszMethod.FOURIER)
        b = riesz_energy(f, 1.0, RieszMethod.DIRECT)
        worst = max(worst, abs(a - b) / abs(b))
    coulomb = riesz_energy(make_profile(make_grid(3, 32, 16), "gaussian"), 1.0)
    elapsed = time.perf_counter() - t0
    target = math.sqrt(2) * math.pi ** 2.5
    ok = worst <= 1e-3 and abs(coulomb - target) / target <= 0.02
    detail = f"max rel diff {worst:.1e} over 20, Coulomb {coulomb:.4f} vs {target:.4f}"
    assert report(capsys, 4, "Riesz energy two methods", ok, detail, elapsed, 120)


@pytest.mark.slow
def test_criterion_5_riesz_optimizer(capsys, tmp_path):
    t0 = time.perf_counter()
    params = RieszParams(3, 1, 1, 2)
    coarse = optimize_riesz(params, make_grid(3, 32, 16), OptimizerConfig(), init="gaussian")
    fine = optimize_riesz(params, make_grid(3, 48, 24), OptimizerConfig(), init="gaussian")
    codes = []
    for p in ("1.5", "3"):
        codes.append(main(["optimize", "riesz", "--d", "3", "--s", "1", "--lambda", "1",
                           "--p", p, "--out", str(tmp_path)]))
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    monotone = all(np.all(np.diff(r.quotient_history) > 0) for r in (coarse, fine))
    grad = max(coarse.gradient_norm, fine.gradient_norm)
    spread = abs(fine.best_quotient - coarse.best_quotient) / fine.best_quotient
    ok = monotone and grad <= 1e-4 and spread <= 0.02 and codes == [2, 2]
    detail = (f"quotients {coarse.best_quotient:.6f}/{fine.best_quotient:.6f} "
              f"(spread {spread:.1e}), max grad {grad:.1e}, endpoint exits {codes}")
    assert report(capsys, 5, "Riesz optimizer", ok, detail, elapsed, 600)


def test_criterion_6_pqr(capsys):
    t0 = time.perf_counter()
    cases = pqr_sweep(trials=1000, seed=1)
    violations = sum(c.measure < c.constants.c for c in cases)
    k = pqr_constants(1, 2, 3, 1, 2, 4)
    g = make_grid(1, 8, 1.0)
    f = Field(g, np.where(g.axis(0) >= 0, 2.0, 0.0))
    measure = superlevel_measure(f, k.eta)
    elapsed = time.perf_counter() - t0
    worked = (k.eta == 0.5 and k.M == 8.0 and k.c == 1 / 64 and power_sum(f, 1) == 1.0
              and measure == 0.5)
    ok = violations == 0 and worked
    detail = (f"{violations} violations in {len(cases)}, worked example eta={k.eta} "
              f"M={k.M} c={k.c} measure={measure}")
    assert report(capsys, 6, "pqr superlevel bound", ok, detail, elapsed, 30)


def test_criterion_7_brezis_lieb(capsys):
    t0 = time.perf_counter()
    g = make_grid(3, 48, 32)
    f = make_profile(g, "gaussian")
    rep = bl_nonlocal_verify(f, f, [4.0, 6.0, 8.0], 1.0)
    zero = bl_nonlocal_verify(f, Field(g, np.zeros(g.shape)), [4.0, 6.0, 8.0], 1.0)
    elapsed = time.perf_counter() - t0
    slope = rep.slope()
    ok = (rep.strictly_decreasing() and -1.5 <= slope <= -0.5
          and all(r == 0.0 for r in zero.residuals))
    detail = (f"residuals {', '.join(f'{r:.3e}' for r in rep.residuals)}, slope {slope:.3f}, "
              f"zero-profile residuals {zero.residuals}")
    assert report(capsys, 7, "non-local Brezis-Lieb", ok, detail, elapsed, 120)


def _fd_worst(f, log_q, grad, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        h = make_profile(f.grid, "random", seed=int(rng.integers(1 << 30))) * complex(
            *rng.standard_normal(2))
        analytic = inner(h, grad).real
        for eps in (1e-3, 1e-4, 1e-5):
            fd = (log_q(f + eps * h) - log_q(f - eps * h)) / (2 * eps)
            worst = max(worst, abs(analytic - fd) / abs(analytic))
    return worst


def test_criterion_8_invariants(capsys):
    t0 = time.perf_counter()
    checks = {}
    g3 = make_grid(3, 16, 9.0)
    checks["plancherel"] = max(
        abs(plancherel_norm(make_profile(g3, "random", seed=s)) /
            lp_norm(make_profile(g3, "random", seed=s), 2) - 1) for s in range(5)) <= 1e-12

    weinstein = GNParams(1, 0, 1, 2, 4)
    riesz = RieszParams(3, 1, 1, 2)
    g1 = make_grid(1, 128, 20.0)
    f1 = make_profile(g1, "random", seed=1)
    fr = make_profile(make_grid(3, 16, 10.0), "random", seed=1)
    checks["gradients"] = max(
        _fd_worst(f1, lambda u: log_gn_quotient(u, weinstein), gn_gradient(f1, weinstein), 11),
        _fd_worst(fr, lambda u: log_riesz_quotient(u, riesz), riesz_gradient(fr, riesz), 12),
    ) <= 1e-4

    g = make_grid(1, 256, 30)
    f = make_profile(g, "random", seed=5)
    q = gn_quotient(f, weinstein)
    # the Riesz energy is a free-space integral, so the field must vanish at the
    # box edge for periodic lattice shifts to leave it unchanged
    gl = make_grid(3, 32, 16.0)
    fl = Field(gl, make_profile(gl, "random", seed=1).values
               * make_profile(gl, "gaussian").values)
    qr = riesz_quotient(fl, riesz)
    checks["scalar"] = (abs(gn_quotient((2.5 - 0.7j) * f, weinstein) / q - 1) <= 1e-10
                        and abs(riesz_quotient((0.3 + 2j) * fl, riesz) / qr - 1) <= 1e-10)
    checks["translation"] = (
        abs(gn_quotient(translate(f, [17 * g.h[0]]), weinstein) / q - 1) <= 1e-12
        and abs(riesz_quotient(translate(fl, (2 * gl.h[0], 0.0, -gl.h[0])), riesz)
                / qr - 1) <= 1e-12)

    gd = make_grid(1, 512, 80)
    vals = [gn_quotient(make_profile(gd, "gaussian", sigma=s), weinstein)
            for s in (0.5, 1.0, 2.0)]
    checks["dilation"] = max(vals) - min(vals) <= 1e-6

    rng = np.random.default_rng(0)
    g2 = make_grid(2, 32, 10)
    cs_bad = 0
    for _ in range(1000):
        a = Field(g2, rng.standard_normal(g2.shape) + 1j * rng.standard_normal(g2.shape))
        b = Field(g2, rng.standard_normal(g2.shape) + 1j * rng.standard_normal(g2.shape))
        lhs, rhs = riesz_cauchy_schwarz(a, b, float(rng.uniform(0.2, 1.8)))
        cs_bad += lhs > rhs * (1 + 1e-12)
    checks["cauchy_schwarz"] = cs_bad == 0

    n = 10_000
    x = np.exp(rng.uniform(-12, 12, n))
    y = np.exp(rng.uniform(-12, 12, n))
    x[::97] = 0.0
    y[::89] = 0.0
    alpha = rng.uniform(0.01, 3.0, n)
    beta = np.maximum(rng.uniform(0.01, 3.0, n), 1.0 - alpha + rng.uniform(0, 0.5, n))
    lhs = alpha * np.log1p(x) + beta * np.log1p(y)
    with np.errstate(divide="ignore"):
        rhs = np.log1p(np.exp(alpha * np.log(x) + beta * np.log(y)))
    checks["elementary"] = bool(np.all(lhs >= rhs - 1e-12 * np.maximum(1.0, np.abs(rhs))))

    elapsed = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    detail = "all invariants hold" if not failed else f"failed: {', '.join(failed)}"
    assert report(capsys, 8, "numerical invariants", not failed, detail, elapsed, 120)


def test_criterion_9_regime_classifier(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    mismatches = 0
    for d, s, lam, p in oracles.random_riesz_tuples(rng, 10_000):
        got = classify_riesz(RieszParams(d, s, lam, p))
        kind, case = oracles.literal_riesz_class(d, s, lam, p)
        mismatches += got.kind != kind or (kind != INVALID and got.case != case)
    rows = [classify_riesz(RieszParams(3, 1, 1, 2)).kind,
            classify_riesz(RieszParams(3, 1, 1, 3)).kind,
            classify_riesz(RieszParams(3, 0.25, 1, 6 / 5)).kind]
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and rows == [ATTAINED, ENDPOINT_P, ENDPOINT_P]
    detail = f"{mismatches} mismatches over 10^4 tuples, rows {json.dumps(rows)}"
    assert report(capsys, 9, "regime classifier", ok, detail, elapsed, 5)
