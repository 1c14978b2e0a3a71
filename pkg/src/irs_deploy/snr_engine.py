"""Closed-form SNRs, amplification factors and a vector-channel oracle.

The ``snr_*_array`` helpers broadcast over numpy arrays so that the
allocation and placement searches can scan whole grids at once. The
public entry points take the dataclasses from :mod:`core_model`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core_model import (
    ArrayLayout,
    DomainError,
    DoubleGains,
    ElementSplit,
    HybridGains,
    PowerConfig,
    Scheme,
    steering_vector,
)

log = logging.getLogger(__name__)


class AmplificationLimitError(DomainError):
    """The common amplification factor exceeds the configured ``alpha_max``."""


@dataclass(frozen=True)
class DerivedConstants:
    """Shorthand constants. Entries that do not apply to a scheme are None.

    c1, c2 belong to the hybrid link; c3, c4, c6 to BAPU; c6, c7, c8 to
    BPAU; c9 = sigma0^2 P_B and c10 = sigma_r^2 P_I are shared.
    """

    c1: Optional[float] = None
    c2: Optional[float] = None
    c3: Optional[float] = None
    c4: Optional[float] = None
    c6: Optional[float] = None
    c7: Optional[float] = None
    c8: Optional[float] = None
    c9: Optional[float] = None
    c10: Optional[float] = None


@dataclass(frozen=True)
class EvalResult:
    scheme: Scheme
    snr: float
    rate: float
    alpha: float
    constants: DerivedConstants


def rate_from_snr(snr):
    return np.log2(1.0 + np.asarray(snr, dtype=float)) if np.ndim(snr) else math.log2(1.0 + snr)


def derived_constants(cfg: PowerConfig, gains) -> DerivedConstants:
    s0, sr, pb, pi = cfg.sigma0_sq, cfg.sigma_r_sq, cfg.p_b, cfg.p_i
    c9, c10 = s0 * pb, sr * pi
    if isinstance(gains, HybridGains):
        rx = pb * gains.bi + sr  # power arriving at one active element
        d0 = sr * pi * gains.iu + s0 * pb * gains.bi + s0 * sr
        return DerivedConstants(
            c1=pb * gains.bi * gains.iu * rx / d0,
            c2=math.sqrt(pi / rx),
            c9=c9,
            c10=c10,
        )
    if isinstance(gains, DoubleGains):
        b, i, u = gains.b, gains.i, gains.u
        return DerivedConstants(
            c3=sr * u * i * pi,
            c4=s0 * pb * b + s0 * sr,
            c6=b * i * u * pi * pb,
            c7=s0 * pb * i * b,
            c8=sr * u * pi + s0 * sr,
            c9=c9,
            c10=c10,
        )
    raise TypeError(f"unsupported gains {type(gains).__name__}")


def _check_gains_for(scheme: Scheme, gains):
    want = HybridGains if scheme is Scheme.BHU else DoubleGains
    if not isinstance(gains, want):
        raise DomainError(f"scheme {scheme.value} needs {want.__name__}, got {type(gains).__name__}")


# Array kernels. Arguments broadcast; no validation beyond what numpy does.

def snr_bhu_array(cfg: PowerConfig, g_bi, g_iu, n_p, n_a):
    pb, pi, s0, sr = cfg.p_b, cfg.p_i, cfg.sigma0_sq, cfg.sigma_r_sq
    g_bi, g_iu = np.asarray(g_bi, float), np.asarray(g_iu, float)
    n_p, n_a = np.asarray(n_p, float), np.asarray(n_a, float)
    amp = np.sqrt(n_a * pi) + n_p * np.sqrt(pb * g_bi + sr)
    return pb * g_bi * g_iu * amp ** 2 / (sr * pi * g_iu + s0 * pb * g_bi + s0 * sr)


def snr_bapu_array(cfg: PowerConfig, g_b, g_i, g_u, n_p, n_a):
    pb, pi, s0, sr = cfg.p_b, cfg.p_i, cfg.sigma0_sq, cfg.sigma_r_sq
    g_b, g_i, g_u = (np.asarray(g, float) for g in (g_b, g_i, g_u))
    n_p, n_a = np.asarray(n_p, float), np.asarray(n_a, float)
    num = g_b * g_i * g_u * pi * pb * n_a * n_p ** 2
    return num / (sr * g_u * g_i * pi * n_p ** 2 + s0 * pb * g_b + s0 * sr)


def snr_bpau_array(cfg: PowerConfig, g_b, g_i, g_u, n_p, n_a):
    pb, pi, s0, sr = cfg.p_b, cfg.p_i, cfg.sigma0_sq, cfg.sigma_r_sq
    g_b, g_i, g_u = (np.asarray(g, float) for g in (g_b, g_i, g_u))
    n_p, n_a = np.asarray(n_p, float), np.asarray(n_a, float)
    num = g_b * g_i * g_u * pi * pb * n_a * n_p ** 2
    return num / (s0 * pb * g_i * g_b * n_p ** 2 + sr * g_u * pi + s0 * sr)


def snr_array(scheme: Scheme, cfg: PowerConfig, gains, n_p, n_a):
    """Closed-form SNR for scalar gains and array-valued element counts."""
    scheme = Scheme.parse(scheme)
    _check_gains_for(scheme, gains)
    if scheme is Scheme.BHU:
        return snr_bhu_array(cfg, gains.bi, gains.iu, n_p, n_a)
    fn = snr_bapu_array if scheme is Scheme.BAPU else snr_bpau_array
    return fn(cfg, gains.b, gains.i, gains.u, n_p, n_a)


def amp_factor(scheme, cfg: PowerConfig, gains, split: ElementSplit) -> float:
    """Common amplitude of the active elements that spends exactly ``p_i``."""
    scheme = Scheme.parse(scheme)
    _check_gains_for(scheme, gains)
    if split.n_a < 1:
        raise DomainError("amplification factor needs at least one active element")
    if scheme is Scheme.BHU:
        rx = cfg.p_b * gains.bi
    elif scheme is Scheme.BAPU:
        rx = cfg.p_b * gains.b
    else:
        rx = cfg.p_b * gains.i * gains.b * split.n_p ** 2
    alpha = math.sqrt(cfg.p_i / (split.n_a * (rx + cfg.sigma_r_sq)))
    if cfg.alpha_max is not None and alpha > cfg.alpha_max:
        raise AmplificationLimitError(
            f"amplification factor {alpha:.6g} exceeds alpha_max {cfg.alpha_max:.6g}"
        )
    return alpha


@dataclass(frozen=True)
class FavorableReport:
    holds: bool
    margin: float
    bounds: tuple


def check_favorable_power(cfg: PowerConfig, gains_bhu: HybridGains,
                          gains_double: DoubleGains, n_total: int) -> FavorableReport:
    """Check ``P_I`` against the three per-scheme budgets scaled by ``N - 1``.

    ``margin`` is ``P_I`` divided by the smallest budget, so ``holds`` is
    equivalent to ``margin <= 1``.
    """
    if n_total < 2:
        raise DomainError("n_total must be at least 2")
    k = n_total - 1
    pb, sr = cfg.p_b, cfg.sigma_r_sq
    bounds = (
        k * (pb * gains_bhu.bi + sr),
        k * (pb * gains_double.b + sr),
        k * (pb * gains_double.i * gains_double.b + sr),
    )
    margin = cfg.p_i / min(bounds)
    return FavorableReport(holds=cfg.p_i <= min(bounds), margin=margin, bounds=bounds)


def snr_closed_form(scheme, cfg: PowerConfig, gains, split: ElementSplit) -> EvalResult:
    scheme = Scheme.parse(scheme)
    _check_gains_for(scheme, gains)
    alpha = amp_factor(scheme, cfg, gains, split)
    snr = float(snr_array(scheme, cfg, gains, split.n_p, split.n_a))
    return EvalResult(
        scheme=scheme,
        snr=snr,
        rate=math.log2(1.0 + snr),
        alpha=alpha,
        constants=derived_constants(cfg, gains),
    )


# Vector-channel oracle ------------------------------------------------------

def _random_direction(rng: np.random.Generator):
    return rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(0.0, np.pi)


def _los_vector(rng, n: int, gain_sq: float) -> np.ndarray:
    """LoS channel ``beta * a(theta, vartheta)`` with a random carrier phase."""
    theta, vartheta = _random_direction(rng)
    phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return math.sqrt(gain_sq) * phase * steering_vector(theta, vartheta, ArrayLayout.linear(n))


def _align(h_out: np.ndarray, h_in: np.ndarray) -> np.ndarray:
    """Unit-modulus reflection that co-phases ``conj(h_out) * refl * h_in``."""
    return np.exp(1j * (np.angle(h_out) - np.angle(h_in)))


def _alpha_from_constraint(cfg: PowerConfig, incident: np.ndarray) -> float:
    """Solve ``P_B ||alpha * incident||^2 + sigma_r^2 ||alpha * 1||^2 = P_I`` for alpha.

    ``incident`` is the (unit-phase-shifted) signal arriving at each active
    element, so phases do not matter, only magnitudes.
    """
    used = cfg.p_b * np.vdot(incident, incident).real + cfg.sigma_r_sq * incident.size
    return math.sqrt(cfg.p_i / used)


def vector_snr_oracle(scheme, cfg: PowerConfig, gains, split: ElementSplit,
                      angle_seed: int = 0) -> float:
    """SNR of the explicit array model with co-phased reflections.

    Channels are LoS steering vectors with random angles and carrier phases.
    The amplification factor is solved from the vector power constraint and
    the received SNR is evaluated from the raw signal and noise quotient.
    """
    scheme = Scheme.parse(scheme)
    _check_gains_for(scheme, gains)
    rng = np.random.default_rng(angle_seed)
    n_p, n_a = split.n_p, split.n_a
    pb, s0, sr = cfg.p_b, cfg.sigma0_sq, cfg.sigma_r_sq

    if scheme is Scheme.BHU:
        h_bi_p = _los_vector(rng, n_p, gains.bi)
        h_iu_p = _los_vector(rng, n_p, gains.iu)
        h_bi_a = _los_vector(rng, n_a, gains.bi)
        h_iu_a = _los_vector(rng, n_a, gains.iu)
        psi_p = _align(h_iu_p, h_bi_p)
        phase_a = _align(h_iu_a, h_bi_a)
        alpha = _alpha_from_constraint(cfg, phase_a * h_bi_a)
        psi_a = alpha * phase_a
        signal = np.vdot(h_iu_a, psi_a * h_bi_a) + np.vdot(h_iu_p, psi_p * h_bi_p)
        noise = sr * np.sum(np.abs(np.conj(h_iu_a) * psi_a) ** 2) + s0
        return float(pb * abs(signal) ** 2 / noise)

    # Rank-one inter-surface channel: beta_I * a_r a_t^H.
    n_first, n_second = (n_a, n_p) if scheme is Scheme.BAPU else (n_p, n_a)
    h_b = _los_vector(rng, n_first, gains.b)
    h_u = _los_vector(rng, n_second, gains.u)
    a_t = _los_vector(rng, n_first, 1.0)   # departure side, first surface
    a_r = _los_vector(rng, n_second, 1.0)  # arrival side, second surface
    h_mid = math.sqrt(gains.i) * np.outer(a_r, np.conj(a_t))

    phase_1 = _align(a_t, h_b)
    phase_2 = _align(h_u, a_r)
    if scheme is Scheme.BAPU:
        alpha = _alpha_from_constraint(cfg, phase_1 * h_b)
        psi_1, psi_2 = alpha * phase_1, phase_2
        # The amplified noise leaves the first surface and crosses both hops.
        noise_path = (np.conj(h_u) * psi_2) @ h_mid * psi_1
    else:
        incident = h_mid @ (phase_1 * h_b)
        alpha = _alpha_from_constraint(cfg, phase_2 * incident)
        psi_1, psi_2 = phase_1, alpha * phase_2
        noise_path = np.conj(h_u) * psi_2
    signal = np.conj(h_u) @ (psi_2 * (h_mid @ (psi_1 * h_b)))
    noise = sr * np.sum(np.abs(noise_path) ** 2) + s0
    return float(pb * abs(signal) ** 2 / noise)


@dataclass(frozen=True)
class PairComparison:
    ratio: float
    winner: Scheme
    predicate: Optional[float] = None
    consistent: Optional[bool] = None


def _double_order_predicate(cfg: PowerConfig, gains: DoubleGains, n_p) -> float:
    """Positive when BAPU beats BPAU at a shared geometry, zero on a tie."""
    return ((cfg.p_i * gains.u * cfg.sigma_r_sq - cfg.p_b * gains.b * cfg.sigma0_sq)
            * (1.0 - n_p ** 2 * gains.i))


def compare_pair(scheme_a, scheme_b, cfg: PowerConfig, gains_a, gains_b,
                 split: ElementSplit, rel_tol: float = 1e-12) -> PairComparison:
    """SNR ratio ``gamma_a / gamma_b`` at a fixed split.

    For BAPU against BPAU on identical gains the closed-form sign predicate
    is also evaluated and cross-checked against the ratio.
    """
    scheme_a, scheme_b = Scheme.parse(scheme_a), Scheme.parse(scheme_b)
    snr_a = snr_closed_form(scheme_a, cfg, gains_a, split).snr
    snr_b = snr_closed_form(scheme_b, cfg, gains_b, split).snr
    ratio = snr_a / snr_b
    winner = scheme_a if ratio >= 1.0 else scheme_b

    pair = {scheme_a, scheme_b}
    if pair != {Scheme.BAPU, Scheme.BPAU} or gains_a != gains_b:
        return PairComparison(ratio=ratio, winner=winner)

    pred = _double_order_predicate(cfg, gains_a, split.n_p)
    bapu_over_bpau = ratio if scheme_a is Scheme.BAPU else 1.0 / ratio
    if abs(bapu_over_bpau - 1.0) <= rel_tol:
        # Scale of each predicate factor, so "zero" is judged relative to it.
        scale = (max(cfg.p_i * gains_a.u * cfg.sigma_r_sq, cfg.p_b * gains_a.b * cfg.sigma0_sq)
                 * max(1.0, split.n_p ** 2 * gains_a.i))
        consistent = abs(pred) <= 1e-9 * scale
    else:
        consistent = (pred > 0) == (bapu_over_bpau > 1.0)
    if not consistent:
        log.warning("BAPU/BPAU predicate %.3g disagrees with SNR ratio %.15g", pred, bapu_over_bpau)
    return PairComparison(ratio=ratio, winner=winner, predicate=pred, consistent=consistent)
