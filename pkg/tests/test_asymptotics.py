import math

import numpy as np
import pytest

from conftest import CFG, DOUBLE_GAINS, HYBRID_GAINS
from irs_deploy.asymptotics import (
    AsymptoticQuery,
    asymptotic_snr,
    estimate_scaling_order,
    large_pi_rate_ratio,
    scaling_sweep,
)
from irs_deploy.core_model import DomainError, DoubleGains, DoubleIrsGeometry, ElementSplit, HybridGains, Scheme, gains_from_geometry
from irs_deploy.snr_engine import derived_constants, snr_array, snr_closed_form

SPLIT = ElementSplit(500, 200)


def gains_for(scheme):
    return HYBRID_GAINS if scheme is Scheme.BHU else DOUBLE_GAINS


def test_query_validation():
    with pytest.raises(DomainError):
        AsymptoticQuery(Scheme.BHU, "N", 1.0)
    with pytest.raises(DomainError):
        AsymptoticQuery(Scheme.BHU, "N")
    with pytest.raises(DomainError):
        AsymptoticQuery(Scheme.BHU, "L")
    assert AsymptoticQuery("bapu", "P_B").scheme is Scheme.BAPU


@pytest.mark.parametrize("scheme, var", [
    (Scheme.BHU, "P_I"), (Scheme.BAPU, "P_B"), (Scheme.BAPU, "P_I"),
    (Scheme.BPAU, "P_B"), (Scheme.BPAU, "P_I"),
])
def test_bounded_limits_converge(scheme, var):
    g = gains_for(scheme)
    form = asymptotic_snr(AsymptoticQuery(scheme, var), CFG, g, SPLIT)
    assert form.kind == "bounded"
    key = "p_b" if var == "P_B" else "p_i"
    base = getattr(CFG, key)
    errs = []
    for k in (1e2, 1e4, 1e6, 1e8):
        snr = snr_closed_form(scheme, CFG.replace(**{key: base * k}), g, SPLIT).snr
        errs.append(abs(snr / form.value - 1))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    if (scheme, var) == (Scheme.BAPU, "P_I"):
        # The amplified-noise term must outgrow sigma0^2 P_B gain_b, which
        # at these gains takes about 1e8 times the default budget.
        assert errs[2] < 1e-2 and errs[3] < 1e-3
    else:
        assert errs[2] < 1e-3


def test_bhu_bound_at_huge_amplification_power():
    form = asymptotic_snr(AsymptoticQuery(Scheme.BHU, "P_I"), CFG, HYBRID_GAINS, SPLIT)
    snr = snr_closed_form(Scheme.BHU, CFG.replace(p_i=1e12), HYBRID_GAINS, SPLIT).snr
    assert snr == pytest.approx(form.value, rel=1e-3)
    assert form.value == pytest.approx(CFG.p_b * HYBRID_GAINS.bi * SPLIT.n_a / CFG.sigma_r_sq)


def test_bhu_quadratic_in_n():
    form = asymptotic_snr(AsymptoticQuery(Scheme.BHU, "N", 0.5), CFG, HYBRID_GAINS)
    assert form.kind == "quadratic_in_var"
    assert form.value == pytest.approx(derived_constants(CFG, HYBRID_GAINS).c1 * 0.25)
    # The correction decays like c2 / sqrt(N) with c2 near 3e3 here.
    n = 1e16
    snr = float(snr_array(Scheme.BHU, CFG, HYBRID_GAINS, 0.5 * n, 0.5 * n))
    assert snr / n ** 2 == pytest.approx(form.value, rel=1e-3)


@pytest.mark.parametrize("scheme", [Scheme.BAPU, Scheme.BPAU])
def test_double_linear_in_n(scheme):
    form = asymptotic_snr(AsymptoticQuery(scheme, "N", 0.5), CFG, DOUBLE_GAINS)
    assert form.kind == "linear_in_var"
    assert form.quoted_coefficient == pytest.approx(3 * form.value)
    n = 1e9
    snr = float(snr_array(scheme, CFG, DOUBLE_GAINS, 0.5 * n, 0.5 * n))
    assert snr / n == pytest.approx(form.value, rel=1e-3)


def test_bhu_linear_in_transmit_power():
    form = asymptotic_snr(AsymptoticQuery(Scheme.BHU, "P_B"), CFG, HYBRID_GAINS, SPLIT)
    assert form.kind == "linear_in_var"
    assert form.quoted_coefficient == pytest.approx(2 * form.value)
    p = 1e13
    snr = snr_closed_form(Scheme.BHU, CFG.replace(p_b=p), HYBRID_GAINS, SPLIT).snr
    assert snr / p == pytest.approx(form.value, rel=1e-3)


def test_power_limits_need_split():
    with pytest.raises(DomainError):
        asymptotic_snr(AsymptoticQuery(Scheme.BHU, "P_B"), CFG, HYBRID_GAINS)


def test_leading_term():
    from irs_deploy.asymptotics import AsymptoticForm

    assert AsymptoticForm("bounded", 3.0).leading(10) == 3.0
    assert AsymptoticForm("linear_in_var", 3.0).leading(10) == 30.0
    assert AsymptoticForm("quadratic_in_var", 3.0).leading(10) == 300.0


def test_sweep_range_must_span_two_decades():
    with pytest.raises(DomainError):
        estimate_scaling_order(Scheme.BHU, "N", CFG, HYBRID_GAINS, (10, 500))


def test_pure_power_law_has_tiny_residual():
    # With no transmit-side term the BAPU SNR in P_I is not a power law,
    # but the cubic regime in N is: slope 3 and near-zero residual.
    g = DoubleGains(b=DOUBLE_GAINS.b, i=1e-12, u=DOUBLE_GAINS.u)
    fit = estimate_scaling_order(Scheme.BAPU, "N", CFG, g, (10, 1000), policy="optimized_allocation")
    assert fit.slope == pytest.approx(3.0, abs=1e-3)
    assert fit.power_law and fit.residual < 1e-3
    assert len(fit.values) == 20


def test_sweep_policies():
    vals, snr = scaling_sweep(Scheme.BPAU, "P_I", CFG, DOUBLE_GAINS, [1e-3, 1e-2], split=SPLIT)
    assert snr[1] > snr[0]
    with pytest.raises(DomainError):
        scaling_sweep(Scheme.BPAU, "P_I", CFG, DOUBLE_GAINS, [1e-3], policy="greedy", split=SPLIT)
    with pytest.raises(DomainError):
        scaling_sweep(Scheme.BPAU, "P_I", CFG, DOUBLE_GAINS, [1e-3])


def test_large_pi_ratio_examples():
    g = DoubleGains(b=HYBRID_GAINS.bi, i=DOUBLE_GAINS.i, u=DOUBLE_GAINS.u)
    r = large_pi_rate_ratio(CFG, HYBRID_GAINS, g, SPLIT)
    assert r.bhu_over_bapu == pytest.approx(1.0)
    # N_p^2 gain_i > 1 and gain_bi <= gain_b: BPAU has the best limit.
    g = DoubleGains(b=DOUBLE_GAINS.b, i=1e-4, u=DOUBLE_GAINS.u)
    assert SPLIT.n_p ** 2 * g.i > 1 and HYBRID_GAINS.bi <= g.b
    r = large_pi_rate_ratio(CFG, HYBRID_GAINS, g, SPLIT)
    assert r.bhu_over_bpau < 1 and r.bhu_over_bpau < r.bhu_over_bapu


def test_large_pi_ratio_finite_check():
    r = large_pi_rate_ratio(CFG, HYBRID_GAINS, DOUBLE_GAINS, SPLIT)
    big = CFG.replace(p_i=1e9)
    r0 = snr_closed_form(Scheme.BHU, big, HYBRID_GAINS, SPLIT).rate
    r1 = snr_closed_form(Scheme.BAPU, big, DOUBLE_GAINS, SPLIT).rate
    assert r0 / r1 == pytest.approx(r.bhu_over_bapu, rel=0.01)
