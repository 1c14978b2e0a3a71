"""Joint element allocation and placement, a brute-force reference, and
the two passive-only baselines.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._parallel import ordered_map
from .allocation import optimal_split, round_split
from .core_model import (
    DomainError,
    DoubleIrsGeometry,
    ElementSplit,
    PowerConfig,
    Scheme,
    SingleIrsGeometry,
    gains_from_geometry,
)
from .placement import (
    PlacementSolution,
    coordinate_grid,
    grid_search_placement,
    joint_bhu,
    place,
    placement_grid_snr,
)
from .snr_engine import rate_from_snr, snr_array, snr_closed_form

log = logging.getLogger(__name__)

MAX_EVALUATIONS = 10 ** 8


@dataclass(frozen=True)
class JointResult:
    scheme: Scheme
    split: ElementSplit
    placement: PlacementSolution
    rate: float
    iterations: int = 1
    converged: bool = True
    history: Tuple[float, ...] = ()

    @property
    def snr(self) -> float:
        return 2.0 ** self.rate - 1.0


def _check_total(n_total):
    if int(n_total) != n_total or n_total < 2:
        raise DomainError(f"n_total must be an integer >= 2, got {n_total!r}")


def _place_step(scheme, cfg, split, L, height, method, grid_res) -> PlacementSolution:
    if method == "grid":
        return grid_search_placement(scheme, cfg, split, L, height, grid_res, restricted=True)
    if method == "closed_form":
        return place(scheme, cfg, split, L, height)
    raise ValueError(f"unknown placement method {method!r}")


def alternate_optimize(scheme, cfg: PowerConfig, n_total: int, L: float, height: float,
                       max_iters: int = 50, tol: float = 1e-9,
                       placement: str = "grid", grid_res: float = 0.1) -> JointResult:
    """Block-coordinate ascent over (placement, split).

    BHU needs one pass: the closed-form position does not depend on the
    split. For BAPU/BPAU the split starts at ceil(2N/3) passive elements;
    each round places the active surface for the current split and then
    re-solves the allocation at the new gains. Placement is either an
    exact-SNR grid scan on the closed-form line (``"grid"``) or the
    closed-form position (``"closed_form"``). The closed form can bring the
    two surfaces closer than the reference distance, which raises a
    DomainError; the grid skips such points. The best iterate is kept, so
    the reported rate never decreases.
    """
    scheme = Scheme.parse(scheme)
    _check_total(n_total)
    if max_iters < 1 or not tol > 0:
        raise DomainError("need max_iters >= 1 and tol > 0")
    if scheme is Scheme.BHU:
        split, sol = joint_bhu(cfg, L, height, n_total)
        rate = math.log2(1.0 + sol.snr_true)
        return JointResult(scheme, split, sol, rate, history=(rate,))

    n_p = min(math.ceil(2 * n_total / 3), n_total - 1)
    split = ElementSplit(n_p=n_p, n_a=n_total - n_p)
    best: Optional[JointResult] = None
    history: List[float] = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        sol = _place_step(scheme, cfg, split, L, height, placement, grid_res)
        gains = gains_from_geometry(sol.geometry, cfg)
        relaxed = optimal_split(scheme, cfg, gains, n_total)
        split = round_split(relaxed, n_total, lambda p, a: snr_array(scheme, cfg, gains, p, a))
        snr = snr_closed_form(scheme, cfg, gains, split).snr
        rate = math.log2(1.0 + snr)
        history.append(rate)
        sol = PlacementSolution(scheme, sol.x_star, sol.geometry, sol.snr_approx, snr)
        prev = best.rate if best is not None else -math.inf
        if best is None or rate > best.rate:
            best = JointResult(scheme, split, sol, rate)
        # An infinite tolerance accepts the first iterate as converged.
        if rate - prev < tol or math.isinf(tol):
            converged = True
            break
    if not converged:
        log.warning("%s alternation did not converge in %d iterations", scheme.value, max_iters)
    return JointResult(scheme, best.split, best.placement, best.rate,
                       iterations=it, converged=converged, history=tuple(history))


def _chunks(n_total: int, n_points: int, target: int = 2_000_000):
    per = max(1, target // max(1, n_points))
    starts = range(1, n_total, per)
    return [np.arange(s, min(s + per, n_total)) for s in starts]


def joint_brute_force(scheme, cfg: PowerConfig, n_total: int, L: float, height: float,
                      grid_res: float = 0.1, restricted: bool = True,
                      geometry=None, max_evaluations: int = MAX_EVALUATIONS) -> JointResult:
    """Exhaustive search over every split and every grid placement.

    ``restricted`` keeps BAPU/BPAU on the closed-form line (x_U = 0 or
    x_B = 0); otherwise the whole (x_B, x_U) simplex is scanned. Passing a
    ``geometry`` fixes the placement and scans the split only. Ties resolve
    to the smallest n_p and then the smallest coordinate.
    """
    scheme = Scheme.parse(scheme)
    _check_total(n_total)
    if geometry is not None:
        gains = gains_from_geometry(geometry, cfg)
        n_p = np.arange(1, n_total)
        vals = snr_array(scheme, cfg, gains, n_p, n_total - n_p)
        k = int(np.argmax(vals))
        split = ElementSplit(int(n_p[k]), n_total - int(n_p[k]))
        x_star = geometry.x_bi if scheme is Scheme.BHU else (
            geometry.x_b if scheme is Scheme.BAPU else geometry.x_u)
        sol = PlacementSolution(scheme, x_star, geometry, None, float(vals[k]))
        return JointResult(scheme, split, sol, float(rate_from_snr(vals[k])))

    n_points = len(coordinate_grid(L, grid_res))
    if scheme is not Scheme.BHU and not restricted:
        n_points = n_points * (n_points + 1) // 2
    required = (n_total - 1) * n_points
    if required > max_evaluations:
        raise DomainError(f"brute force needs {required} evaluations, budget is {max_evaluations}")

    def scan(n_p_chunk):
        split_arr = SimpleNamespace(n_p=n_p_chunk, n_a=n_total - n_p_chunk)
        out = placement_grid_snr(scheme, cfg, split_arr, L, height, grid_res, restricted)
        snr = out[-1]
        k = int(np.argmax(snr))  # row-major: smallest n_p, then smallest coordinate
        i, j = np.unravel_index(k, snr.shape)
        coords = tuple(float(c[j]) for c in out[:-1])
        return float(snr[i, j]), int(n_p_chunk[i]), coords

    best = None
    for snr, n_p, coords in ordered_map(scan, _chunks(n_total, n_points)):
        if best is None or snr > best[0]:
            best = (snr, n_p, coords)
    snr, n_p, coords = best
    if not np.isfinite(snr):
        raise DomainError("no valid configuration on the grid")
    if scheme is Scheme.BHU:
        geom = SingleIrsGeometry(L=L, x_bi=coords[0], h_s=height)
        x_star = coords[0]
    else:
        geom = DoubleIrsGeometry(L=L, x_b=coords[0], x_u=coords[1], h_d=height)
        x_star = geom.x_b if scheme is Scheme.BAPU else geom.x_u
    split = ElementSplit(n_p, n_total - n_p)
    sol = PlacementSolution(scheme, x_star, geom, None, snr)
    return JointResult(scheme, split, sol, math.log2(1.0 + snr), iterations=required)


# Passive-only baselines -------------------------------------------------------

def benchmark_bpu_snr(cfg: PowerConfig, n_total: int, L: float, h_d: float) -> float:
    """One passive surface of N elements directly above the user."""
    if n_total < 1:
        raise DomainError("n_total must be >= 1")
    g1 = cfg.beta_ref / (L ** 2 + h_d ** 2) ** (cfg.exponents.bi / 2)
    g2 = cfg.beta_ref / h_d ** cfg.exponents.iu
    return cfg.p_b * n_total ** 2 * g1 * g2 / cfg.sigma0_sq


def benchmark_bppu_snr(cfg: PowerConfig, n_total: int, L: float, h_d: float) -> float:
    """Two passive surfaces above the BS and the user, N/2 elements each."""
    if n_total < 2:
        raise DomainError("n_total must be >= 2")
    n1, n2 = n_total // 2, n_total - n_total // 2
    ex = cfg.exponents
    g_b = cfg.beta_ref / h_d ** ex.b
    g_i = cfg.beta_ref / L ** ex.i
    g_u = cfg.beta_ref / h_d ** ex.u
    return cfg.p_b * (n1 * n2) ** 2 * g_b * g_i * g_u / cfg.sigma0_sq


def benchmark_bpu(cfg: PowerConfig, n_total: int, L: float, h_d: float) -> float:
    return math.log2(1.0 + benchmark_bpu_snr(cfg, n_total, L, h_d))


def benchmark_bppu(cfg: PowerConfig, n_total: int, L: float, h_d: float) -> float:
    return math.log2(1.0 + benchmark_bppu_snr(cfg, n_total, L, h_d))


@dataclass(frozen=True)
class ComparisonTable:
    rates: Dict[str, float]
    joint: Dict[Scheme, JointResult] = field(default_factory=dict)

    @property
    def winner(self) -> str:
        return max(self.rates, key=self.rates.get)

    def ordered(self) -> List[Tuple[str, float]]:
        return sorted(self.rates.items(), key=lambda kv: -kv[1])


def compare_all(cfg: PowerConfig, n_total: int, L: float, h_s: float, h_d: float,
                **alt_kwargs) -> ComparisonTable:
    """Jointly optimised BHU, BAPU and BPAU against the BPU and BPPU baselines."""

    def run(scheme):
        height = h_s if scheme is Scheme.BHU else h_d
        return alternate_optimize(scheme, cfg, n_total, L, height, **alt_kwargs)

    results = dict(zip(Scheme, ordered_map(run, list(Scheme))))
    rates = {s.value: r.rate for s, r in results.items()}
    rates["bpu"] = benchmark_bpu(cfg, n_total, L, h_d)
    rates["bppu"] = benchmark_bppu(cfg, n_total, L, h_d)
    return ComparisonTable(rates=rates, joint=results)
