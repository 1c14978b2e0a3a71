"""Splitting a fixed element budget between passive and active elements.

Relaxed optima come in closed form for the hybrid surface and from a
depressed cubic for the two double-surface schemes. Integer splits are
recovered by checking the floor and ceiling neighbours, and
``exhaustive_split`` scans every split as a reference.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .core_model import (
    DomainError,
    DoubleGains,
    ElementSplit,
    HybridGains,
    PowerConfig,
    RelaxedSplit,
    Scheme,
)
from .snr_engine import derived_constants, rate_from_snr, snr_array

log = logging.getLogger(__name__)

__all__ = [
    "ElementSplit",
    "RelaxedSplit",
    "bhu_active_threshold",
    "optimal_split_bhu",
    "solve_allocation_cubic",
    "allocation_cubic",
    "optimal_split_bapu",
    "optimal_split_bpau",
    "optimal_split",
    "round_split",
    "rounded_optimal_split",
    "exhaustive_split",
    "snr_opt_allocation_bhu",
    "approx_snr_opt_allocation",
    "allocation_predicates",
    "best_scheme_by_allocation",
    "ApproxSnr",
    "AllocationVerdict",
]


def _check_total(n_total):
    if int(n_total) != n_total or n_total < 2:
        raise DomainError(f"n_total must be an integer >= 2, got {n_total!r}")


def bhu_active_threshold(cfg: PowerConfig, gains: HybridGains) -> float:
    """Active-element count beyond which extra active elements stop paying off."""
    return cfg.p_i / (4 * cfg.p_b * gains.bi + 4 * cfg.sigma_r_sq)


def optimal_split_bhu(cfg: PowerConfig, gains: HybridGains, n_total: int) -> RelaxedSplit:
    _check_total(n_total)
    t = bhu_active_threshold(cfg, gains)
    if n_total <= t:
        return RelaxedSplit(n_p=1.0, n_a=float(n_total - 1))
    return RelaxedSplit(n_p=n_total - t, n_a=t)


def allocation_cubic(x, c_cub: float, c_lin: float, n_total):
    """g(x) = -c_cub x^3 - 3 c_lin x + 2 N c_lin."""
    x = np.asarray(x, dtype=float)
    return -c_cub * x ** 3 - 3 * c_lin * x + 2 * n_total * c_lin


def solve_allocation_cubic(c_cub: float, c_lin: float, n_total: float) -> float:
    """Unique positive root of ``-c_cub x^3 - 3 c_lin x + 2 N c_lin``.

    Cardano's formula is written in the cancellation-free form
    ``x = -q / (u^2 + p/3 + p^2 / (9 u^2))`` and then polished by a
    safeguarded Newton/bisection loop on ``[0, N]``.
    """
    if c_cub < 0 or not c_lin > 0 or not n_total > 0:
        raise DomainError("need c_cub >= 0, c_lin > 0 and n_total > 0")
    two_thirds = 2.0 * n_total / 3.0
    k = c_cub / c_lin
    if k * two_thirds ** 2 < 1e-300 or c_cub == 0:
        return two_thirds

    # x^3 + p x + q = 0 with p = 3/k, q = -2N/k.
    p = 3.0 / k
    q = -2.0 * n_total / k
    disc = (q / 2) ** 2 + (p / 3) ** 3
    u = float(np.cbrt(-q / 2 + math.sqrt(disc)))
    x = -q / (u * u + p / 3 + (p / 3) ** 2 / (u * u))
    x = min(max(x, 0.0), two_thirds)

    tol = 1e-9 * 2 * n_total * c_lin
    lo, hi = 0.0, float(n_total)
    for _ in range(200):
        g = float(allocation_cubic(x, c_cub, c_lin, n_total))
        if abs(g) <= tol * 1e-3:
            break
        if g > 0:
            lo = x
        else:
            hi = x
        slope = -3 * c_cub * x * x - 3 * c_lin
        step = x - g / slope
        x = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, hi):
            break
    return float(x)


def optimal_split_bapu(cfg: PowerConfig, gains: DoubleGains, n_total: int) -> RelaxedSplit:
    _check_total(n_total)
    c = derived_constants(cfg, gains)
    n_p = solve_allocation_cubic(c.c3, c.c4, n_total)
    return RelaxedSplit(n_p=n_p, n_a=n_total - n_p)


def optimal_split_bpau(cfg: PowerConfig, gains: DoubleGains, n_total: int) -> RelaxedSplit:
    _check_total(n_total)
    c = derived_constants(cfg, gains)
    n_p = solve_allocation_cubic(c.c7, c.c8, n_total)
    return RelaxedSplit(n_p=n_p, n_a=n_total - n_p)


def optimal_split(scheme, cfg: PowerConfig, gains, n_total: int) -> RelaxedSplit:
    scheme = Scheme.parse(scheme)
    fn = {
        Scheme.BHU: optimal_split_bhu,
        Scheme.BAPU: optimal_split_bapu,
        Scheme.BPAU: optimal_split_bpau,
    }[scheme]
    return fn(cfg, gains, n_total)


def round_split(relaxed: RelaxedSplit, n_total: int,
                snr_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ElementSplit:
    """Pick the better of the floor and ceiling integer neighbours.

    ``snr_fn(n_p, n_a)`` must accept numpy arrays. Ties go to the smaller
    ``n_p``.
    """
    if int(n_total) != n_total or n_total < 2:
        raise DomainError("rounding needs n_total >= 2")
    cands = {min(max(int(f(relaxed.n_p)), 1), n_total - 1) for f in (math.floor, math.ceil)}
    n_p = np.array(sorted(cands))
    vals = np.asarray(snr_fn(n_p, n_total - n_p), dtype=float)
    best = int(n_p[int(np.argmax(vals))])
    return ElementSplit(n_p=best, n_a=n_total - best)


def exhaustive_split(scheme, cfg: PowerConfig, gains, n_total: int) -> ElementSplit:
    """Scan n_p = 1 .. N-1; ``argmax`` returns the first, i.e. smallest, maximiser."""
    _check_total(n_total)
    n_p = np.arange(1, n_total)
    vals = snr_array(scheme, cfg, gains, n_p, n_total - n_p)
    best = int(n_p[int(np.argmax(vals))])
    return ElementSplit(n_p=best, n_a=n_total - best)


def rounded_optimal_split(scheme, cfg: PowerConfig, gains, n_total: int) -> ElementSplit:
    """Relaxed optimum followed by integer rounding against the true SNR."""
    scheme = Scheme.parse(scheme)
    relaxed = optimal_split(scheme, cfg, gains, n_total)
    return round_split(relaxed, n_total, lambda p, a: snr_array(scheme, cfg, gains, p, a))


def snr_opt_allocation_bhu(cfg: PowerConfig, gains: HybridGains, n_total: int) -> float:
    _check_total(n_total)
    c = derived_constants(cfg, gains)
    if n_total <= bhu_active_threshold(cfg, gains):
        return c.c1 * (c.c2 * math.sqrt(n_total - 1) + 1) ** 2
    return c.c1 * (c.c2 ** 2 / 4 + n_total) ** 2


@dataclass(frozen=True)
class ApproxSnr:
    snr: float
    ratio: float  # cubic term over linear term at n_p = 2N/3
    valid: bool


def approx_snr_opt_allocation(scheme, cfg: PowerConfig, gains: DoubleGains, n_total,
                              threshold: float = 0.01) -> ApproxSnr:
    """Cubic-law SNR valid while the amplified-noise term stays negligible."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.BHU:
        raise DomainError("the cubic-law approximation covers bapu and bpau only")
    c = derived_constants(cfg, gains)
    c_cub, c_lin = (c.c3, c.c4) if scheme is Scheme.BAPU else (c.c7, c.c8)
    snr = 4 * c.c6 * n_total ** 3 / (27 * c_lin)
    ratio = c_cub * (2 * n_total / 3) ** 2 / c_lin
    return ApproxSnr(snr=snr, ratio=ratio, valid=ratio < threshold)


@dataclass(frozen=True)
class AllocationVerdict:
    winner: Scheme
    rates: Dict[Scheme, float]
    splits: Dict[Scheme, ElementSplit]
    regime: str  # "small_n" or "large_n" relative to the hybrid threshold
    predicates: Dict[Scheme, bool] = field(default_factory=dict)

    @property
    def predicted(self):
        fired = [s for s, ok in self.predicates.items() if ok]
        return fired[0] if len(fired) == 1 else None

    @property
    def agrees(self) -> bool:
        return self.predicted in (None, self.winner)


def _dist_sq(cfg: PowerConfig, gain: float, exponent: float) -> float:
    return (cfg.beta_ref / gain) ** (2.0 / exponent)


def allocation_predicates(cfg: PowerConfig, gains_bhu: HybridGains,
                          gains_double: DoubleGains, n_total: int):
    """Distance-threshold sufficient conditions for each scheme to be best.

    They lean on the cubic-law approximation for the double schemes, so
    they are advisory only.
    """
    beta = cfg.beta_ref
    ex = cfg.exponents
    ch = derived_constants(cfg, gains_bhu)
    cd = derived_constants(cfg, gains_double)
    s0, sr, pb, pi = cfg.sigma0_sq, cfg.sigma_r_sq, cfg.p_b, cfg.p_i
    b, i, u = gains_double.b, gains_double.i, gains_double.u
    N = float(n_total)
    small = n_total <= bhu_active_threshold(cfg, gains_bhu)
    shape = (ch.c2 * math.sqrt(N - 1) + 1) ** 2 if small else (ch.c2 ** 2 / 4 + N) ** 2

    d_iu2 = _dist_sq(cfg, gains_bhu.iu, ex.iu)
    d_b2 = _dist_sq(cfg, b, ex.b)
    d_u2 = _dist_sq(cfg, u, ex.u)

    def bhu_bound(c_lin):
        return (27 * beta * gains_bhu.bi * pb * c_lin * shape / (4 * cd.c6 * N ** 3 * s0)
                - beta * ch.c2 ** 2 * sr)

    preds = {
        Scheme.BHU: d_iu2 < min(bhu_bound(cd.c4), bhu_bound(cd.c8)),
        Scheme.BAPU: d_u2 < min(sr * pi * d_b2 / (s0 * pb),
                                4 * beta * i * b * pi * pb * N ** 3 / (27 * ch.c1 * cd.c4 * shape)),
        Scheme.BPAU: d_b2 < min(s0 * pb * d_u2 / (sr * pi) if pi > 0 else math.inf,
                                4 * beta * i * u * pi * pb * N ** 3 / (27 * ch.c1 * cd.c8 * shape)),
    }
    return ("small_n" if small else "large_n"), preds


def best_scheme_by_allocation(cfg: PowerConfig, gains_bhu: HybridGains,
                              gains_double: DoubleGains, n_total: int) -> AllocationVerdict:
    """Winner by direct rates at each scheme's rounded optimal split.

    The distance predicates are reported beside the rates; a disagreement
    is logged but the direct comparison decides.
    """
    _check_total(n_total)
    splits, rates = {}, {}
    for scheme in Scheme:
        gains = gains_bhu if scheme is Scheme.BHU else gains_double
        split = rounded_optimal_split(scheme, cfg, gains, n_total)
        splits[scheme] = split
        rates[scheme] = float(rate_from_snr(snr_array(scheme, cfg, gains, split.n_p, split.n_a)))
    winner = max(Scheme, key=lambda s: rates[s])  # enum order breaks ties
    regime, preds = allocation_predicates(cfg, gains_bhu, gains_double, n_total)
    verdict = AllocationVerdict(winner=winner, rates=rates, splits=splits,
                                regime=regime, predicates=preds)
    if not verdict.agrees:
        log.info("allocation predicates point to %s but direct rates pick %s",
                 verdict.predicted.value, winner.value)
    return verdict
