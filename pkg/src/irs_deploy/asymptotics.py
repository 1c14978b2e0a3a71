"""Limiting behaviour of the three SNRs and empirical scaling exponents.

Leading-order coefficients are derived directly from the closed-form
SNRs. Where a commonly quoted constant differs from that expansion it is
reported separately as ``quoted_coefficient`` and never used in checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .allocation import optimal_split
from .core_model import DomainError, DoubleGains, ElementSplit, HybridGains, PowerConfig, Scheme
from .snr_engine import derived_constants, snr_array

VARIABLES = ("N", "P_B", "P_I")
POLICIES = ("fixed_eps", "optimized_allocation")


@dataclass(frozen=True)
class AsymptoticQuery:
    scheme: Scheme
    variable: str
    epsilon: Optional[float] = None  # passive share when variable == "N"

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.variable not in VARIABLES:
            raise DomainError(f"variable must be one of {VARIABLES}")
        if self.variable == "N":
            if self.epsilon is None or not 0 < self.epsilon < 1:
                raise DomainError("epsilon must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class AsymptoticForm:
    """``kind`` is linear_in_var, quadratic_in_var or bounded.

    For the growing kinds ``value`` is the coefficient c in SNR ~ c V or
    c V^2; for ``bounded`` it is the limit.
    """

    kind: str
    value: float
    quoted_coefficient: Optional[float] = None

    def leading(self, v: float) -> float:
        if self.kind == "bounded":
            return self.value
        return self.value * (v if self.kind == "linear_in_var" else v * v)


def asymptotic_snr(query: AsymptoticQuery, cfg: PowerConfig, gains,
                   split: Optional[ElementSplit] = None) -> AsymptoticForm:
    s, var = query.scheme, query.variable
    pb, pi, s0, sr = cfg.p_b, cfg.p_i, cfg.sigma0_sq, cfg.sigma_r_sq
    if var != "N" and split is None:
        raise DomainError("power limits need a fixed split")
    if s is Scheme.BHU:
        if not isinstance(gains, HybridGains):
            raise DomainError("bhu needs HybridGains")
        bi, iu = gains.bi, gains.iu
        if var == "N":
            coef = derived_constants(cfg, gains).c1 * query.epsilon ** 2
            return AsymptoticForm("quadratic_in_var", coef, coef)
        if var == "P_B":
            coef = bi * iu * split.n_p ** 2 / s0
            return AsymptoticForm("linear_in_var", coef, 2 * coef)
        return AsymptoticForm("bounded", pb * bi * split.n_a / sr)

    if not isinstance(gains, DoubleGains):
        raise DomainError(f"{s.value} needs DoubleGains")
    b, i, u = gains.b, gains.i, gains.u
    if s is Scheme.BAPU:
        if var == "N":
            coef = (1 - query.epsilon) * pb * b / sr
            return AsymptoticForm("linear_in_var", coef, 3 * coef)
        if var == "P_B":
            return AsymptoticForm("bounded", u * i * split.n_a * split.n_p ** 2 * pi / s0)
        return AsymptoticForm("bounded", b * split.n_a * pb / sr)
    if var == "N":
        coef = (1 - query.epsilon) * u * pi / s0
        return AsymptoticForm("linear_in_var", coef, 3 * coef)
    if var == "P_B":
        return AsymptoticForm("bounded", u * split.n_a * pi / s0)
    return AsymptoticForm("bounded", pb * i * b * split.n_a * split.n_p ** 2 / sr)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    residual: float  # RMS of the log-log fit residuals (natural log)
    tail_slope: float  # slope over the points in the last decade
    power_law: bool
    values: np.ndarray
    snr: np.ndarray


def _ols_slope(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(resid ** 2)))


def scaling_sweep(scheme, variable: str, cfg: PowerConfig, gains, values,
                  policy: str = "fixed_eps", epsilon: float = 0.5,
                  split: Optional[ElementSplit] = None, n_total: Optional[int] = None):
    """Closed-form SNR at each sweep value under the chosen split policy.

    Element counts stay real-valued so the sweep sees the smooth law.
    """
    scheme = Scheme.parse(scheme)
    if policy not in POLICIES:
        raise DomainError(f"policy must be one of {POLICIES}")
    values = np.asarray(values, float)
    out = np.empty_like(values)
    for k, v in enumerate(values):
        c = cfg
        if variable == "N":
            total = v
        elif variable in ("P_B", "P_I"):
            c = cfg.replace(**{"p_b" if variable == "P_B" else "p_i": v})
            total = n_total if split is None else split.n_total
        else:
            raise DomainError(f"variable must be one of {VARIABLES}")
        if policy == "optimized_allocation":
            if total is None:
                raise DomainError("optimized_allocation needs n_total for power sweeps")
            n_p = _relaxed_passive(scheme, c, gains, total)
        elif variable == "N":
            n_p = epsilon * total
        else:
            if split is None:
                raise DomainError("fixed_eps power sweeps need a split")
            n_p = split.n_p
        out[k] = snr_array(scheme, c, gains, n_p, total - n_p)
    return values, out


def _relaxed_passive(scheme, cfg, gains, total) -> float:
    # The relaxed solvers take real totals; bypass the integer check.
    from .allocation import bhu_active_threshold, solve_allocation_cubic

    if scheme is Scheme.BHU:
        t = bhu_active_threshold(cfg, gains)
        return 1.0 if total <= t else total - t
    c = derived_constants(cfg, gains)
    c_cub, c_lin = (c.c3, c.c4) if scheme is Scheme.BAPU else (c.c7, c.c8)
    return solve_allocation_cubic(c_cub, c_lin, total)


def estimate_scaling_order(scheme, variable: str, cfg: PowerConfig, gains,
                           sweep_range: Tuple[float, float],
                           policy: str = "fixed_eps", epsilon: float = 0.5,
                           split: Optional[ElementSplit] = None,
                           n_total: Optional[int] = None, points: int = 20,
                           residual_limit: float = 0.02) -> ScalingFit:
    """OLS slope of log SNR against log of the swept variable."""
    lo, hi = sweep_range
    if not (lo > 0 and hi >= 100 * lo):
        raise DomainError("sweep range must be positive and span at least two decades")
    values = np.logspace(math.log10(lo), math.log10(hi), points)
    values, snr = scaling_sweep(scheme, variable, cfg, gains, values, policy, epsilon, split, n_total)
    lx, ly = np.log(values), np.log(snr)
    slope, resid = _ols_slope(lx, ly)
    tail = values >= hi / 10 * (1 - 1e-12)
    tail_slope, _ = _ols_slope(lx[tail], ly[tail])
    return ScalingFit(slope, resid, tail_slope, resid <= residual_limit, values, snr)


@dataclass(frozen=True)
class LargePiRatios:
    bhu_over_bapu: float
    bhu_over_bpau: float


def large_pi_rate_ratio(cfg: PowerConfig, gains_bhu: HybridGains, gains_double: DoubleGains,
                        split: ElementSplit) -> LargePiRatios:
    """Rate ratios once every SNR has saturated in the amplification power."""
    pb, sr, n_a = cfg.p_b, cfg.sigma_r_sq, split.n_a
    r0 = math.log2(1 + pb * gains_bhu.bi * n_a / sr)
    r1 = math.log2(1 + pb * gains_double.b * n_a / sr)
    r2 = math.log2(1 + pb * gains_double.b * gains_double.i * n_a * split.n_p ** 2 / sr)
    return LargePiRatios(r0 / r1, r0 / r2)
