import math

import numpy as np
import pytest

from gnx.lemmas import (
    besov_scan,
    besov_sup,
    bl_nonlocal_verify,
    chi0,
    interm_gn_ratio,
    pqr_constants,
    pqr_sweep,
    power_sum,
    refined_sobolev_ratio,
    refined_sobolev_terms,
    riesz_cauchy_schwarz,
    standard_corpus,
    superlevel_measure,
)
from gnx.spectral import Field, make_grid, make_profile, translate


# -- cutoffs -----------------------------------------------------------------

def test_chi0_plateau_and_support():
    t = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    v = chi0(t)
    assert list(v[:3]) == [1.0, 1.0, 1.0]
    assert 0 < v[3] < 1
    assert list(v[4:]) == [0.0, 0.0]


# -- three-norm superlevel bound ---------------------------------------------

def test_pqr_constants_formulae():
    k = pqr_constants(2, 4, 6, 1.0, 1.0, 1.0)
    assert k.eta == pytest.approx(0.25 ** 0.5)
    assert k.M == pytest.approx(4 ** 0.5)
    assert k.c == pytest.approx(1 / (2 * 16))


@pytest.mark.parametrize("args", [(2, 2, 3, 1, 1, 1), (2, 3, 3, 1, 1, 1), (0.5, 1, 2, 1, 1, 1),
                                  (1, 2, math.inf, 1, 1, 1), (1, 2, 3, 0, 1, 1),
                                  (1, 2, 3, 1, -1, 1)])
def test_pqr_constants_rejects(args):
    with pytest.raises(ValueError):
        pqr_constants(*args)


def test_superlevel_examples():
    g = make_grid(1, 8, 2 * np.pi)
    one = Field(g, np.ones(8))
    assert superlevel_measure(one, 0.5) == pytest.approx(2 * np.pi)
    assert superlevel_measure(one, 2.0) == 0.0
    with pytest.raises(ValueError):
        superlevel_measure(one, 0.0)


def test_superlevel_gaussian_within_a_cell():
    g = make_grid(1, 512, 40)
    f = make_profile(g, "gaussian")
    # |x| < 1 where exp(-x^2/2) > exp(-1/2)
    assert abs(superlevel_measure(f, math.exp(-0.5)) - 2.0) <= g.h[0]


def test_power_sum_constant():
    g = make_grid(1, 16, 4.0)
    assert power_sum(Field(g, 2 * np.ones(16)), 3) == pytest.approx(32.0)


def test_pqr_sweep_has_no_violations():
    cases = pqr_sweep(trials=1000, seed=1)
    assert len(cases) == 1000
    assert min(c.slack for c in cases) >= 1.0
    # the feasibility bounds really hold for each sample
    for c in cases[:50]:
        k = c.constants
        assert power_sum(c.field, k.p) <= k.alpha * (1 + 1e-12)
        assert power_sum(c.field, k.q) >= k.beta * (1 - 1e-12)
        assert power_sum(c.field, k.r) <= k.gamma * (1 + 1e-12)


def test_pqr_sweep_is_seeded():
    a = [c.measure for c in pqr_sweep(trials=20, seed=4)]
    b = [c.measure for c in pqr_sweep(trials=20, seed=4)]
    assert a == b


# -- non-local splitting -----------------------------------------------------

@pytest.fixture(scope="module")
def bl_gaussian():
    g = make_grid(3, 48, 32)
    f = make_profile(g, "gaussian")
    return bl_nonlocal_verify(f, f, [4.0, 6.0, 8.0], 1.0, p=[2.0, 4.0])


def test_bl_zero_second_profile():
    g = make_grid(3, 16, 12)
    f = make_profile(g, "gaussian")
    rep = bl_nonlocal_verify(f, Field(g, np.zeros(g.shape)), [2.0, 3.0], 1.0)
    assert rep.residuals == [0.0, 0.0]
    assert all(v == 0.0 for v in rep.local_residuals[2.0])


def test_bl_residual_decays_like_kernel(bl_gaussian):
    rep = bl_gaussian
    assert rep.strictly_decreasing()
    assert -1.5 <= rep.slope() <= -0.5


def test_bl_exact_expansion(bl_gaussian):
    scale = max(bl_gaussian.residuals) + 1.0
    assert max(bl_gaussian.identity_errors) <= 1e-9 * scale


def test_bl_cross_term_bounded(bl_gaussian):
    rep = bl_gaussian
    for a, c in zip(rep.separations, rep.cross_terms):
        assert abs(c) <= rep.residuals[0] * a ** -0.5


def test_bl_local_residuals_shrink(bl_gaussian):
    for vals in bl_gaussian.local_residuals.values():
        assert all(abs(b) < abs(a) for a, b in zip(vals, vals[1:]))


def test_bl_rejects_wrap_around():
    g = make_grid(3, 16, 12)
    f = make_profile(g, "gaussian")
    with pytest.raises(ValueError):
        bl_nonlocal_verify(f, f, [5.0], 1.0)


# -- Cauchy-Schwarz for the kernel form --------------------------------------

def test_cauchy_schwarz_equality_cases():
    g = make_grid(2, 32, 10)
    u = make_profile(g, "random", seed=1)
    for h in (u, u * 2.0):
        lhs, rhs = riesz_cauchy_schwarz(u, h, 1.0)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_cauchy_schwarz_random_pairs():
    g = make_grid(2, 32, 10)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        a = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        b = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        lam = float(rng.uniform(0.2, 1.8))
        lhs, rhs = riesz_cauchy_schwarz(Field(g, a), Field(g, b), lam)
        worst = max(worst, lhs / rhs)
    assert worst <= 1 + 1e-12


# -- sup over scales ---------------------------------------------------------

def test_besov_zero_field():
    g = make_grid(3, 16, 10)
    assert besov_sup(Field(g, np.zeros(g.shape)), 1.0) == 0.0


def test_besov_lattice_translation_invariance():
    g = make_grid(3, 32, 16)
    f = make_profile(g, "gaussian")
    moved = translate(f, (1.5, -0.5, 2.0))
    assert besov_sup(moved, 1.0) == pytest.approx(besov_sup(f, 1.0), rel=1e-12)


def test_besov_dilation_ratio():
    g = make_grid(3, 64, 24)
    s = 1.0
    a = besov_sup(make_profile(g, "gaussian", sigma=1.0), s)
    b = besov_sup(make_profile(g, "gaussian", sigma=2.0), s)
    # f(x/2) scales the functional by 2^(d/2 - s)
    assert b / a == pytest.approx(2 ** (1.5 - s), rel=0.05)


def test_besov_range_checked():
    g = make_grid(3, 16, 10)
    with pytest.raises(ValueError):
        besov_scan(make_profile(g, "gaussian"), 1.5)


# -- refined Sobolev and intermediate GN ratios ------------------------------

def test_refined_ratio_dilation_invariant():
    g = make_grid(3, 64, 24)
    vals = [refined_sobolev_terms(make_profile(g, "gaussian", sigma=sig), 1.0, 6.0)
            for sig in (0.5, 1.0, 2.0)]
    assert max(vals) / min(vals) - 1 <= 0.01


def test_refined_ratio_over_translates_is_a_max():
    g = make_grid(3, 32, 24)
    f = make_profile(g, "gaussian")
    corpus = [f, translate(f, (1.5, 0.0, 0.0))]
    assert refined_sobolev_ratio(corpus, 1.0) == pytest.approx(
        refined_sobolev_terms(f, 1.0, 6.0), rel=1e-12)


def test_refined_ratio_golden():
    g = make_grid(3, 32, 24)
    assert refined_sobolev_ratio(standard_corpus(g), 1.0) == pytest.approx(
        1.0054397352866948, rel=1e-9)


def test_refined_ratio_grid_doubling():
    g = make_grid(3, 32, 24)
    a = refined_sobolev_ratio(standard_corpus(g), 1.0)
    b = refined_sobolev_ratio(standard_corpus(g.doubled()), 1.0)
    assert abs(b - a) / a <= 0.10


def test_refined_ratio_rejects_empty():
    with pytest.raises(ValueError):
        refined_sobolev_ratio([], 1.0)


def test_interm_ratio_dilation_and_scalar():
    g = make_grid(3, 64, 24)
    a = interm_gn_ratio(make_profile(g, "gaussian", sigma=1.0), 3, 1, 1, 2)
    b = interm_gn_ratio(make_profile(g, "gaussian", sigma=1.5), 3, 1, 1, 2)
    assert b == pytest.approx(a, rel=0.01)
    f = make_profile(g, "gaussian")
    assert interm_gn_ratio(f * (3 - 4j), 3, 1, 1, 2) == pytest.approx(
        interm_gn_ratio(f, 3, 1, 1, 2), rel=1e-10)


def test_interm_ratio_golden():
    g = make_grid(3, 32, 24)
    vals = [interm_gn_ratio(u, 3, 1, 1, 2) for u in standard_corpus(g)]
    assert max(vals) == pytest.approx(0.43189449760923804, rel=1e-9)


def test_interm_ratio_theta_range():
    g = make_grid(3, 16, 10)
    f = make_profile(g, "gaussian")
    with pytest.raises(ValueError):
        interm_gn_ratio(f, 3, 1, 1, 3)  # theta = 1
    with pytest.raises(ValueError):
        interm_gn_ratio(f, 2, 1, 1, 2)


def test_standard_corpus_shape():
    g = make_grid(3, 16, 12)
    corpus = standard_corpus(g)
    assert len(corpus) == 20
    assert all(np.all(np.isfinite(u.values)) for u in corpus)
