"""Where to put the surfaces on the BS-user line.

The closed forms come from a high-SNR simplification of each scheme's SNR
and assume every path-loss exponent is 2. ``grid_search_placement`` scans
the exact closed-form SNR instead and serves as the reference.

Coordinates: the BS sits at x = 0 and the user at x = L. For the double
schemes ``x_b`` is measured from the BS and ``x_u`` from the user.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np

from .core_model import (
    DomainError,
    DoubleIrsGeometry,
    ElementSplit,
    PowerConfig,
    Scheme,
    SingleIrsGeometry,
    gains_from_geometry,
)
from .snr_engine import snr_bapu_array, snr_bhu_array, snr_bpau_array, snr_closed_form

log = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 0.05


@dataclass(frozen=True)
class PlacementSolution:
    """Optimised coordinate plus the SNRs it yields.

    ``x_star`` is x_BI for BHU, x_B for BAPU and x_U for BPAU. ``snr_approx``
    is the simplified objective at ``x_star`` and ``snr_true`` the exact
    closed form. Either is None when no split was supplied.
    """

    scheme: Scheme
    x_star: float
    geometry: Union[SingleIrsGeometry, DoubleIrsGeometry]
    snr_approx: Optional[float] = None
    snr_true: Optional[float] = None

    @property
    def x_b(self) -> Optional[float]:
        return getattr(self.geometry, "x_b", None)

    @property
    def x_u(self) -> Optional[float]:
        return getattr(self.geometry, "x_u", None)


def _clamp(x: float, L: float) -> float:
    return min(max(x, 0.0), L)


def _true_snr(scheme: Scheme, cfg: PowerConfig, geom, split: Optional[ElementSplit]):
    if split is None:
        return None
    try:
        gains = gains_from_geometry(geom, cfg)
    except DomainError as exc:
        log.info("no exact SNR at %s: %s", geom, exc)
        return math.nan
    return snr_closed_form(scheme, cfg, gains, split).snr


def _approx_snr_bhu(cfg: PowerConfig, split: ElementSplit, L: float, h_s: float) -> float:
    c9, c10 = cfg.sigma0_sq * cfg.p_b, cfg.sigma_r_sq * cfg.p_i
    beta, pb, pi = cfg.beta_ref, cfg.p_b, cfg.p_i
    s = c9 + c10
    passive = split.n_p ** 2 * pb * beta * s ** 2 / (c9 ** 2 * L ** 2 + h_s ** 2 * s ** 2)
    amp = math.sqrt(split.n_a * pi) + math.sqrt(passive)
    return s * pb * beta * amp ** 2 / (h_s ** 2 * s ** 2 + c9 * c10 * L ** 2)


def approx_objective_bhu(cfg: PowerConfig, split, L: float, h_s: float, x_bi):
    """High-SNR approximation of the hybrid SNR as a function of x_BI.

    Broadcasts over ``x_bi``. Its maximiser is the closed-form x_BI* only
    after a further small term is dropped, so the two can differ slightly.
    """
    x = np.asarray(x_bi, float)
    beta, pb, pi = cfg.beta_ref, cfg.p_b, cfg.p_i
    d_bi2 = x ** 2 + h_s ** 2
    d_iu2 = (L - x) ** 2 + h_s ** 2
    amp = np.sqrt(split.n_a * pi) + np.sqrt(split.n_p ** 2 * pb * beta / d_bi2)
    return pb * beta * amp ** 2 / (cfg.sigma_r_sq * pi * d_bi2 + cfg.sigma0_sq * pb * d_iu2)


def place_bhu(cfg: PowerConfig, L: float, h_s: float,
              split: Optional[ElementSplit] = None) -> PlacementSolution:
    """Hybrid surface position; independent of the element split."""
    if L < 0:
        raise DomainError("L must be non-negative")
    c9, c10 = cfg.sigma0_sq * cfg.p_b, cfg.sigma_r_sq * cfg.p_i
    x = _clamp(c9 * L / (c9 + c10), L)
    geom = SingleIrsGeometry(L=L, x_bi=x, h_s=h_s)
    approx = None
    if split is not None and h_s > 0:
        approx = _approx_snr_bhu(cfg, split, L, h_s)
    return PlacementSolution(Scheme.BHU, x, geom, approx, _true_snr(Scheme.BHU, cfg, geom, split))


def _split_or_none(n_p, n_a):
    return None if n_a is None else ElementSplit(n_p=n_p, n_a=n_a)


def place_bapu(cfg: PowerConfig, n_p: int, L: float, h_d: float,
               n_a: Optional[int] = None) -> PlacementSolution:
    """Active surface position with the passive one above the user (x_U = 0)."""
    if L < 0 or n_p < 1:
        raise DomainError("need L >= 0 and n_p >= 1")
    beta, c9, c10 = cfg.beta_ref, cfg.sigma0_sq * cfg.p_b, cfg.sigma_r_sq * cfg.p_i
    w_amp = beta * c10 * n_p ** 2
    x = _clamp(L * c9 * h_d ** 2 / (w_amp + c9 * h_d ** 2), L)
    geom = DoubleIrsGeometry(L=L, x_b=x, x_u=0.0, h_d=h_d)
    approx = None
    if n_a is not None:
        approx = (beta * cfg.p_b * n_a * (w_amp + c9 * h_d ** 2)
                  / (cfg.sigma_r_sq * h_d ** 2 * (w_amp + c9 * L ** 2)))
    split = _split_or_none(n_p, n_a)
    return PlacementSolution(Scheme.BAPU, x, geom, approx, _true_snr(Scheme.BAPU, cfg, geom, split))


def place_bpau(cfg: PowerConfig, n_p: int, L: float, h_d: float,
               n_a: Optional[int] = None) -> PlacementSolution:
    """Active surface position with the passive one above the BS (x_B = 0)."""
    if L < 0 or n_p < 1:
        raise DomainError("need L >= 0 and n_p >= 1")
    beta, c9, c10 = cfg.beta_ref, cfg.sigma0_sq * cfg.p_b, cfg.sigma_r_sq * cfg.p_i
    w_tx = beta * c9 * n_p ** 2
    x = _clamp(L * c10 * h_d ** 2 / (w_tx + c10 * h_d ** 2), L)
    geom = DoubleIrsGeometry(L=L, x_b=0.0, x_u=x, h_d=h_d)
    approx = None
    if n_a is not None:
        approx = (beta * cfg.p_i * n_a * (w_tx + c10 * h_d ** 2)
                  / (cfg.sigma0_sq * h_d ** 2 * (w_tx + c10 * L ** 2)))
    split = _split_or_none(n_p, n_a)
    return PlacementSolution(Scheme.BPAU, x, geom, approx, _true_snr(Scheme.BPAU, cfg, geom, split))


def place(scheme, cfg: PowerConfig, split: ElementSplit, L: float, height: float) -> PlacementSolution:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.BHU:
        return place_bhu(cfg, L, height, split)
    fn = place_bapu if scheme is Scheme.BAPU else place_bpau
    return fn(cfg, split.n_p, L, height, split.n_a)


# Grid search ------------------------------------------------------------------

def coordinate_grid(L: float, resolution: float) -> np.ndarray:
    """Points 0, res, 2 res, ... up to L inclusive (L is appended if off-grid)."""
    if not resolution > 0:
        raise DomainError("grid resolution must be positive")
    n = int(math.floor(L / resolution + 1e-9))
    xs = np.arange(n + 1) * resolution
    if L - xs[-1] > 1e-9 * max(1.0, L):
        xs = np.append(xs, L)
    return xs


def _gain(cfg: PowerConfig, d_sq, exponent: float):
    with np.errstate(divide="ignore"):
        return cfg.beta_ref / np.asarray(d_sq, float) ** (exponent / 2.0)


def _mask_invalid(g_list, snr):
    bad = np.zeros(np.shape(snr), dtype=bool)
    for g in g_list:
        bad |= ~(np.asarray(g) <= 1.0)
    return np.where(bad, -np.inf, snr)


def _bhu_grid(cfg: PowerConfig, L: float, xs, h_s: float, n_p, n_a):
    ex = cfg.exponents
    g_bi = _gain(cfg, xs ** 2 + h_s ** 2, ex.bi)
    g_iu = _gain(cfg, (L - xs) ** 2 + h_s ** 2, ex.iu)
    return _mask_invalid((g_bi, g_iu), snr_bhu_array(cfg, g_bi, g_iu, n_p, n_a))


def _double_grid(scheme: Scheme, cfg: PowerConfig, L: float, x_b, x_u, h_d: float, n_p, n_a):
    ex = cfg.exponents
    d_i = L - x_b - x_u
    g_b = _gain(cfg, x_b ** 2 + h_d ** 2, ex.b)
    g_u = _gain(cfg, x_u ** 2 + h_d ** 2, ex.u)
    with np.errstate(divide="ignore", invalid="ignore"):
        g_i = np.where(d_i > 0, cfg.beta_ref / np.abs(d_i) ** ex.i, np.inf)
        fn = snr_bapu_array if scheme is Scheme.BAPU else snr_bpau_array
        snr = fn(cfg, g_b, g_i, g_u, n_p, n_a)
    snr = np.where(d_i > 0, snr, -np.inf)
    return _mask_invalid((g_b, g_i, g_u), snr)


def placement_grid_snr(scheme, cfg: PowerConfig, split, L: float, height: float,
                       resolution: float = DEFAULT_RESOLUTION, restricted: bool = True):
    """Exact SNR over the placement grid; invalid points hold ``-inf``.

    Returns ``(x_b, x_u, snr)`` for the double schemes and ``(x_bi, snr)``
    for BHU. ``split`` may carry numpy arrays in ``n_p``/``n_a`` through a
    simple namespace; the trailing axis is always the placement axis.
    """
    scheme = Scheme.parse(scheme)
    n_p = np.asarray(split.n_p, float)[..., None]
    n_a = np.asarray(split.n_a, float)[..., None]
    xs = coordinate_grid(L, resolution)
    if scheme is Scheme.BHU:
        return xs, _bhu_grid(cfg, L, xs, height, n_p, n_a)
    if restricted:
        zeros = np.zeros_like(xs)
        x_b, x_u = (xs, zeros) if scheme is Scheme.BAPU else (zeros, xs)
    else:
        xb, xu = np.meshgrid(xs, xs, indexing="ij")
        keep = xb + xu < L - 1e-12
        x_b, x_u = xb[keep], xu[keep]
    return x_b, x_u, _double_grid(scheme, cfg, L, x_b, x_u, height, n_p, n_a)


def grid_search_placement(scheme, cfg: PowerConfig, split: ElementSplit, L: float, height: float,
                          resolution: float = DEFAULT_RESOLUTION,
                          restricted: bool = False) -> PlacementSolution:
    """Maximise the exact SNR on a placement grid.

    With ``restricted=False`` the double schemes scan the whole (x_B, x_U)
    simplex; with ``restricted=True`` they scan the same line the closed
    forms use (x_U = 0 for BAPU, x_B = 0 for BPAU). Co-located surfaces
    (d_I = 0) are skipped. Ties go to the smallest coordinate(s).
    """
    scheme = Scheme.parse(scheme)
    if L == 0:
        geom = (SingleIrsGeometry(L=0.0, x_bi=0.0, h_s=height) if scheme is Scheme.BHU
                else None)
        if geom is None:
            raise DomainError("double-surface placement needs L > 0 (d_I would be 0)")
        return PlacementSolution(scheme, 0.0, geom, None, _true_snr(scheme, cfg, geom, split))
    if scheme is Scheme.BHU:
        xs, snr = placement_grid_snr(scheme, cfg, split, L, height, resolution)
        k = int(np.argmax(snr))
        geom = SingleIrsGeometry(L=L, x_bi=float(xs[k]), h_s=height)
        return PlacementSolution(scheme, float(xs[k]), geom, None, float(snr[k]))
    x_b, x_u, snr = placement_grid_snr(scheme, cfg, split, L, height, resolution, restricted)
    k = int(np.argmax(snr))
    if not np.isfinite(snr[k]):
        raise DomainError("no valid placement on the grid")
    geom = DoubleIrsGeometry(L=L, x_b=float(x_b[k]), x_u=float(x_u[k]), h_d=height)
    x_star = geom.x_b if scheme is Scheme.BAPU else geom.x_u
    return PlacementSolution(scheme, x_star, geom, None, float(snr[k]))


# Validity of the high-SNR simplification -------------------------------------

@dataclass(frozen=True)
class AssumptionReport:
    ratios: Dict[Scheme, float]
    p_b_lower_bound: float
    threshold: float
    valid: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "valid", all(r >= self.threshold for r in self.ratios.values()))


def check_placement_assumptions(cfg: PowerConfig, geom, split: ElementSplit,
                                threshold: float = 100.0) -> AssumptionReport:
    """Dominance ratios behind the placement closed forms.

    ``geom`` may be a single geometry or a tuple of a single and a double
    geometry; ratios are reported for whichever schemes apply. Distances
    enter squared, matching the exponent-2 setting of the closed forms.
    """
    geoms = geom if isinstance(geom, (tuple, list)) else (geom,)
    beta, s0, sr, pb, pi = cfg.beta_ref, cfg.sigma0_sq, cfg.sigma_r_sq, cfg.p_b, cfg.p_i
    npp = split.n_p ** 2
    ratios, bounds = {}, []
    for g in geoms:
        if isinstance(g, SingleIrsGeometry):
            bi2, iu2 = g.d_bi ** 2, g.d_iu ** 2
            ratios[Scheme.BHU] = (beta * sr * pi * bi2 + beta * s0 * pb * iu2) / (sr * s0 * iu2 * bi2)
            bounds.append(sr * bi2 / beta - sr * pi * bi2 / (s0 * iu2))
        elif isinstance(g, DoubleIrsGeometry):
            b2, i2, u2 = g.d_b ** 2, g.d_i ** 2, g.d_u ** 2
            noise = s0 * sr * b2 * i2 * u2
            if noise == 0:
                raise DomainError("co-located surfaces (d_I = 0)")
            ratios[Scheme.BAPU] = (beta ** 2 * sr * pi * npp * b2 + beta * s0 * pb * i2 * u2) / noise
            ratios[Scheme.BPAU] = (beta * sr * pi * i2 * b2 + beta ** 2 * s0 * pb * npp * u2) / noise
            bounds.append(b2 * sr / beta - sr * beta * b2 * pi * npp / (s0 * i2 * u2))
            bounds.append(sr * i2 * b2 / (beta ** 2 * npp) - sr * pi * i2 * b2 / (beta * s0 * npp * u2))
        else:
            raise TypeError(f"unsupported geometry {type(g).__name__}")
    return AssumptionReport(ratios=ratios, p_b_lower_bound=max(bounds), threshold=threshold)


# Scheme comparison at the closed-form placements -----------------------------

@dataclass(frozen=True)
class PlacedComparison:
    ratio_bapu_bhu: float
    ratio_bpau_bhu: float
    predicate: float  # > 0 means BAPU beats BPAU
    winner: Scheme
    solutions: Dict[Scheme, PlacementSolution]


def double_placement_predicate(cfg: PowerConfig, n_p: int, L: float, h_d: float) -> float:
    beta, c9, c10 = cfg.beta_ref, cfg.sigma0_sq * cfg.p_b, cfg.sigma_r_sq * cfg.p_i
    bn = beta * n_p ** 2
    return (c9 - c10) * (((bn - L ** 2) * bn + (bn + L ** 2) * h_d ** 2) * c9 * c10
                         + (c9 ** 2 + c10 ** 2) * bn * h_d ** 2)


def compare_placed(cfg: PowerConfig, n_p: int, n_a: int, L: float, h_s: float,
                   h_d: float) -> PlacedComparison:
    """Compare the three schemes through their approximated placed SNRs."""
    split = ElementSplit(n_p=n_p, n_a=n_a)
    sols = {
        Scheme.BHU: place_bhu(cfg, L, h_s, split),
        Scheme.BAPU: place_bapu(cfg, n_p, L, h_d, n_a),
        Scheme.BPAU: place_bpau(cfg, n_p, L, h_d, n_a),
    }
    base = sols[Scheme.BHU].snr_approx
    winner = max(Scheme, key=lambda s: sols[s].snr_approx)
    return PlacedComparison(
        ratio_bapu_bhu=sols[Scheme.BAPU].snr_approx / base,
        ratio_bpau_bhu=sols[Scheme.BPAU].snr_approx / base,
        predicate=double_placement_predicate(cfg, n_p, L, h_d),
        winner=winner,
        solutions=sols,
    )


# Hybrid surface: placement then allocation ------------------------------------

def joint_bhu(cfg: PowerConfig, L: float, h_s: float, n_total: int):
    """Closed-form placement followed by the best integer split at that spot."""
    from .allocation import optimal_split_bhu, round_split

    if int(n_total) != n_total or n_total < 2:
        raise DomainError("n_total must be an integer >= 2")
    sol = place_bhu(cfg, L, h_s)
    gains = gains_from_geometry(sol.geometry, cfg)
    relaxed = optimal_split_bhu(cfg, gains, n_total)
    split = round_split(relaxed, n_total,
                        lambda p, a: snr_bhu_array(cfg, gains.bi, gains.iu, p, a))
    return split, place_bhu(cfg, L, h_s, split)


def snr_bhu_joint(cfg: PowerConfig, L: float, h_s: float, n_total: int) -> float:
    return joint_bhu(cfg, L, h_s, n_total)[1].snr_true
