import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    CFG,
    DOUBLE_GAINS,
    HYBRID_GAINS,
    double_gains_st,
    hybrid_gains_st,
    power_configs,
    random_double_gains,
    random_hybrid_gains,
    random_power_config,
)
from irs_deploy.allocation import (
    allocation_cubic,
    allocation_predicates,
    approx_snr_opt_allocation,
    best_scheme_by_allocation,
    bhu_active_threshold,
    exhaustive_split,
    optimal_split,
    optimal_split_bapu,
    optimal_split_bhu,
    optimal_split_bpau,
    round_split,
    rounded_optimal_split,
    snr_opt_allocation_bhu,
    solve_allocation_cubic,
)
from irs_deploy.core_model import DomainError, DoubleGains, ElementSplit, HybridGains, RelaxedSplit, Scheme
from irs_deploy.snr_engine import derived_constants, snr_array, snr_closed_form


def numpy_root(c_cub, c_lin, n):
    """Positive real root of -c x^3 - 3 k x + 2 N k via numpy's eigenvalue solver."""
    roots = np.roots([-c_cub, 0.0, -3 * c_lin, 2 * n * c_lin])
    real = roots[np.abs(roots.imag) <= 1e-9 * np.abs(roots).max()].real
    return float(real[real > 0].min())


# Cubic solver ------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(st.floats(-12, 6), st.floats(-12, 6), st.floats(1, 1e6))
def test_cubic_root_against_numpy(log_cub, log_lin, n):
    c_cub, c_lin = 10 ** log_cub, 10 ** log_lin
    root = solve_allocation_cubic(c_cub, c_lin, n)
    assert 0 < root <= 2 * n / 3 * (1 + 1e-12)
    assert abs(allocation_cubic(root, c_cub, c_lin, n)) <= 1e-9 * 2 * n * c_lin
    assert root == pytest.approx(numpy_root(c_cub, c_lin, n), rel=1e-6)


def test_cubic_degenerate_and_extreme():
    assert solve_allocation_cubic(0.0, 1.0, 300) == pytest.approx(200.0)
    assert solve_allocation_cubic(1e30, 1.0, 300) < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.floats(-12, 6), st.floats(-12, 6), st.floats(2, 1e5))
def test_cubic_strictly_decreasing_with_sign_change(log_cub, log_lin, n):
    c_cub, c_lin = 10 ** log_cub, 10 ** log_lin
    xs = np.linspace(0, n, 2001)
    g = allocation_cubic(xs, c_cub, c_lin, n)
    assert np.all(np.diff(g) < 0)
    assert g[0] > 0 > g[-1]


def test_root_increases_with_n():
    c = derived_constants(CFG, DOUBLE_GAINS)
    roots = [solve_allocation_cubic(c.c3, c.c4, n) for n in (10, 100, 1000, 10_000)]
    assert all(a < b for a, b in zip(roots, roots[1:]))


def test_bpau_passive_share_shrinks_at_large_n():
    c = derived_constants(CFG, DOUBLE_GAINS)
    shares = [solve_allocation_cubic(c.c7, c.c8, n) / n for n in (1e3, 1e4, 1e5)]
    assert shares[0] > shares[1] > shares[2]


def test_same_constants_same_root():
    g = DOUBLE_GAINS
    a = optimal_split_bapu(CFG, g, 300)
    c = derived_constants(CFG, g)
    assert solve_allocation_cubic(c.c3, c.c4, 300) == a.n_p
    assert optimal_split_bpau(CFG, g, 300).n_p == solve_allocation_cubic(c.c7, c.c8, 300)


# Reference-scenario splits -------------------------------------------------------

@pytest.mark.parametrize("scheme, n, n_p", [
    (Scheme.BAPU, 100, 67), (Scheme.BPAU, 100, 67), (Scheme.BPAU, 600, 397),
])
def test_reference_scenario_splits(scheme, n, n_p):
    assert exhaustive_split(scheme, CFG, DOUBLE_GAINS, n) == ElementSplit(n_p, n - n_p)
    assert rounded_optimal_split(scheme, CFG, DOUBLE_GAINS, n) == ElementSplit(n_p, n - n_p)


def test_bapu_at_600_exact_optimum():
    # The exact closed-form optimum is 400 passive elements; see the
    # acceptance suite for the comparison with the published split.
    split = exhaustive_split(Scheme.BAPU, CFG, DOUBLE_GAINS, 600)
    assert split == ElementSplit(400, 200)
    snr = lambda p: snr_closed_form(Scheme.BAPU, CFG, DOUBLE_GAINS, ElementSplit(p, 600 - p)).snr
    assert snr(400) > snr(397)


def test_two_paths_agree_at_n2():
    for s in Scheme:
        g = HYBRID_GAINS if s is Scheme.BHU else DOUBLE_GAINS
        assert exhaustive_split(s, CFG, g, 2) == ElementSplit(1, 1)
        assert rounded_optimal_split(s, CFG, g, 2) == ElementSplit(1, 1)


def test_small_cubic_term_gives_two_thirds():
    g = DoubleGains(b=DOUBLE_GAINS.b, i=1e-12, u=DOUBLE_GAINS.u)
    r = optimal_split_bapu(CFG, g, 300)
    assert r.n_p == pytest.approx(200, rel=1e-3)


# Hybrid allocation -------------------------------------------------------------

def test_bhu_threshold_branches():
    g = HYBRID_GAINS
    t = bhu_active_threshold(CFG, g)
    big = optimal_split_bhu(CFG, g, int(t) + 50)
    assert big.n_a == pytest.approx(t) and big.n_p == pytest.approx(int(t) + 50 - t)
    huge_pi = CFG.replace(p_i=1e6)
    r = optimal_split_bhu(huge_pi, g, 50)
    assert (r.n_p, r.n_a) == (1, 49)


def test_bhu_threshold_equality_uses_first_branch():
    g = HYBRID_GAINS
    n = 40
    cfg = CFG.replace(p_i=n * (4 * CFG.p_b * g.bi + 4 * CFG.sigma_r_sq))
    assert bhu_active_threshold(cfg, g) == pytest.approx(n)
    r = optimal_split_bhu(cfg.replace(p_i=cfg.p_i * (1 + 1e-12)), g, n)
    assert (r.n_p, r.n_a) == (1, n - 1)


def test_bhu_reference_600_matches_exhaustive():
    split = rounded_optimal_split(Scheme.BHU, CFG, HYBRID_GAINS, 600)
    best = exhaustive_split(Scheme.BHU, CFG, HYBRID_GAINS, 600)
    r = lambda s: snr_closed_form(Scheme.BHU, CFG, HYBRID_GAINS, s).rate
    assert abs(r(split) - r(best)) <= 1e-6


@settings(max_examples=200, deadline=None)
@given(power_configs(), hybrid_gains_st(), st.integers(2, 5000))
def test_bhu_optimal_snr_expression(cfg, g, n):
    relaxed = optimal_split_bhu(cfg, g, n)
    direct = float(snr_array(Scheme.BHU, cfg, g, relaxed.n_p, relaxed.n_a))
    assert snr_opt_allocation_bhu(cfg, g, n) == pytest.approx(direct, rel=1e-12)


def test_bhu_optimal_snr_quadratic_growth():
    c = derived_constants(CFG, HYBRID_GAINS)
    # The active branch starts near 2e6 elements here; go well past it.
    n = 10 ** 10
    assert snr_opt_allocation_bhu(CFG, HYBRID_GAINS, n) / n ** 2 == pytest.approx(c.c1, rel=1e-3)


@settings(max_examples=200, deadline=None)
@given(power_configs(), hybrid_gains_st(), st.integers(2, 5000))
def test_bhu_relaxed_objective_unimodal(cfg, g, n):
    # Relaxed objective c1 (c2 sqrt(n_a) + n - n_a)^2 over n_a in [1, n - 1].
    c = derived_constants(cfg, g)
    n_a = np.linspace(1, n - 1, 20001)
    obj = c.c1 * (c.c2 * np.sqrt(n_a) + n - n_a) ** 2
    r = optimal_split_bhu(cfg, g, n)
    at_opt = c.c1 * (c.c2 * math.sqrt(r.n_a) + n - r.n_a) ** 2
    assert obj.max() <= at_opt * (1 + 1e-9)
    k = int(np.argmax(obj))
    assert np.all(np.diff(obj[: k + 1]) >= -1e-12 * obj.max())
    assert np.all(np.diff(obj[k:]) <= 1e-12 * obj.max())


# Rounding ---------------------------------------------------------------------------

def test_round_split_examples():
    calls = []

    def snr_fn(p, a):
        calls.append(tuple(np.atleast_1d(p)))
        return -((p - 66.6) ** 2)

    assert round_split(RelaxedSplit(66.6, 33.4), 100, snr_fn) == ElementSplit(67, 33)
    assert calls == [(66, 67)]
    assert round_split(RelaxedSplit(40.0, 60.0), 100, snr_fn) == ElementSplit(40, 60)
    assert round_split(RelaxedSplit(0.3, 99.7), 100, snr_fn) == ElementSplit(1, 99)
    with pytest.raises(DomainError):
        round_split(RelaxedSplit(0.5, 0.5), 1, snr_fn)


def test_round_split_ties_to_smaller():
    assert round_split(RelaxedSplit(10.5, 89.5), 100, lambda p, a: np.zeros_like(p, float)) \
        == ElementSplit(10, 90)


def test_rounded_matches_exhaustive_over_random_configs():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        cfg = random_power_config(rng)
        n = int(rng.integers(2, 1500))
        scheme = list(Scheme)[int(rng.integers(3))]
        g = random_hybrid_gains(rng) if scheme is Scheme.BHU else random_double_gains(rng)
        a = rounded_optimal_split(scheme, cfg, g, n)
        b = exhaustive_split(scheme, cfg, g, n)
        ra = snr_closed_form(scheme, cfg, g, a).rate
        rb = snr_closed_form(scheme, cfg, g, b).rate
        assert ra <= rb + 1e-12
        worst = max(worst, rb - ra)
    assert worst <= 1e-6


# Approximate SNR and selection -----------------------------------------------------

def test_cubic_law_approximation():
    g = DoubleGains(b=DOUBLE_GAINS.b, i=1e-9, u=DOUBLE_GAINS.u)
    n = 300
    for s in (Scheme.BAPU, Scheme.BPAU):
        approx = approx_snr_opt_allocation(s, CFG, g, n)
        assert approx.valid and approx.ratio < 0.01
        n_p = 2 * n / 3
        exact = float(snr_array(s, CFG, g, n_p, n - n_p))
        assert approx.snr == pytest.approx(exact, rel=0.02)
        twice = approx_snr_opt_allocation(s, CFG, g, 2 * n)
        assert twice.snr / approx.snr == pytest.approx(8.0, rel=1e-12)
    with pytest.raises(DomainError):
        approx_snr_opt_allocation(Scheme.BHU, CFG, g, n)


def test_cubic_law_flag_reflects_ratio():
    small = approx_snr_opt_allocation(Scheme.BAPU, CFG, DOUBLE_GAINS, 10)
    assert small.valid == (small.ratio < 0.01)


def test_selection_prefers_short_last_hop():
    hg = HybridGains(bi=HYBRID_GAINS.bi, iu=0.9)
    v = best_scheme_by_allocation(CFG, hg, DOUBLE_GAINS, 100)
    assert v.winner is Scheme.BHU and v.predicates[Scheme.BHU]


def test_selection_bapu_predicate_fires_near_user():
    dg = DoubleGains(b=DOUBLE_GAINS.b, i=DOUBLE_GAINS.i, u=0.9)
    _, preds = allocation_predicates(CFG, HYBRID_GAINS, dg, 100)
    assert preds[Scheme.BAPU]


def test_selection_reports_all_rates():
    v = best_scheme_by_allocation(CFG, HYBRID_GAINS, DOUBLE_GAINS, 600)
    assert set(v.rates) == set(Scheme)
    assert v.winner is max(v.rates, key=v.rates.get)
    assert v.regime in ("small_n", "large_n")
