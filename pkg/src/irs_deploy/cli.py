"""``irs-deploy`` command line: every analysis as a CSV-emitting subcommand."""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from . import allocation, asymptotics, joint_optimizer, placement, snr_engine
from ._parallel import ordered_map
from .config import KEYS, ConfigError, ScenarioConfig, parse_config
from .core_model import DomainError, DoubleIrsGeometry, ElementSplit, Scheme, gains_from_geometry

COLUMNS = ("sweep_value", "scheme", "n_p", "n_a", "x_star_m", "snr_linear",
           "rate_bps_hz", "oracle_rate_bps_hz", "assumptions_ok")
SWEEP_VARS = ("n", "p_b_dbm", "p_i_dbm")
FIGURES = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9")


@dataclass
class Row:
    sweep_value: object
    scheme: str
    n_p: Optional[int] = None
    n_a: Optional[int] = None
    x_star_m: Optional[float] = None
    snr_linear: Optional[float] = None
    rate_bps_hz: Optional[float] = None
    oracle_rate_bps_hz: Optional[float] = None
    assumptions_ok: Optional[bool] = None


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".12g")
    return str(v)


def write_csv(rows: Iterable[Row], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


def _rate(snr):
    return None if snr is None else math.log2(1.0 + snr)


def _schemes(arg: Optional[str], sc: ScenarioConfig) -> List[Scheme]:
    if arg is None:
        return [sc.scheme]
    if arg == "all":
        return list(Scheme)
    return [Scheme.parse(arg)]


def _x_of(scheme: Scheme, geom) -> Optional[float]:
    if scheme is Scheme.BHU:
        return None if geom.override_d_bi is not None else geom.x_bi
    return geom.x_b if scheme is Scheme.BAPU else geom.x_u


def _assumptions(sc: ScenarioConfig, scheme: Scheme, geom, split) -> Optional[bool]:
    try:
        rep = placement.check_placement_assumptions(sc.power_config(), geom, split)
    except DomainError:
        return None
    return rep.ratios[scheme] >= rep.threshold


# Row builders ----------------------------------------------------------------

def evaluate_row(sc: ScenarioConfig, scheme: Scheme, sweep_value) -> Row:
    """Closed form at the configured geometry; oracle is the vector model."""
    cfg = sc.power_config()
    geom = sc.geometry_for(scheme)
    gains = gains_from_geometry(geom, cfg)
    split = sc.fixed_split() or allocation.rounded_optimal_split(scheme, cfg, gains, sc.n_total)
    res = snr_engine.snr_closed_form(scheme, cfg, gains, split)
    oracle = snr_engine.vector_snr_oracle(scheme, cfg, gains, split, sc.seed)
    return Row(sweep_value, scheme.value, split.n_p, split.n_a, _x_of(scheme, geom),
               res.snr, res.rate, _rate(oracle), _assumptions(sc, scheme, geom, split))


def allocate_row(sc: ScenarioConfig, scheme: Scheme, sweep_value) -> Row:
    """Rounded closed-form split; oracle is the exhaustive split's rate."""
    cfg = sc.power_config()
    geom = sc.geometry_for(scheme)
    gains = gains_from_geometry(geom, cfg)
    split = allocation.rounded_optimal_split(scheme, cfg, gains, sc.n_total)
    best = allocation.exhaustive_split(scheme, cfg, gains, sc.n_total)
    snr = snr_engine.snr_closed_form(scheme, cfg, gains, split).snr
    oracle = snr_engine.snr_closed_form(scheme, cfg, gains, best).snr
    return Row(sweep_value, scheme.value, split.n_p, split.n_a, _x_of(scheme, geom),
               snr, _rate(snr), _rate(oracle), _assumptions(sc, scheme, geom, split))


def _placement_split(sc: ScenarioConfig, scheme: Scheme) -> ElementSplit:
    split = sc.fixed_split()
    if split is not None:
        return split
    if scheme is Scheme.BHU:
        return placement.joint_bhu(sc.power_config(), sc.L, sc.h_s, sc.n_total)[0]
    n_p = min(math.ceil(2 * sc.n_total / 3), sc.n_total - 1)
    return ElementSplit(n_p, sc.n_total - n_p)


def place_row(sc: ScenarioConfig, scheme: Scheme, sweep_value) -> Row:
    """Closed-form placement; oracle is the exact-SNR grid on the same line."""
    cfg = sc.power_config()
    split = _placement_split(sc, scheme)
    height = sc.height_for(scheme)
    sol = placement.place(scheme, cfg, split, sc.L, height)
    grid = placement.grid_search_placement(scheme, cfg, split, sc.L, height,
                                           sc.grid_res, restricted=True)
    return Row(sweep_value, scheme.value, split.n_p, split.n_a, sol.x_star, sol.snr_true,
               _rate(sol.snr_true), _rate(grid.snr_true),
               _assumptions(sc, scheme, sol.geometry, split))


def joint_row(sc: ScenarioConfig, scheme: Scheme, sweep_value) -> Row:
    """Alternating optimisation; oracle is the brute-force search."""
    cfg = sc.power_config()
    height = sc.height_for(scheme)
    res = joint_optimizer.alternate_optimize(scheme, cfg, sc.n_total, sc.L, height,
                                             grid_res=sc.grid_res)
    bf = joint_optimizer.joint_brute_force(scheme, cfg, sc.n_total, sc.L, height, sc.grid_res)
    return Row(sweep_value, scheme.value, res.split.n_p, res.split.n_a, res.placement.x_star,
               res.snr, res.rate, bf.rate,
               _assumptions(sc, scheme, res.placement.geometry, res.split))


def benchmark_rows(sc: ScenarioConfig, sweep_value) -> List[Row]:
    cfg = sc.power_config()
    bpu = joint_optimizer.benchmark_bpu_snr(cfg, sc.n_total, sc.L, sc.h_d)
    bppu = joint_optimizer.benchmark_bppu_snr(cfg, sc.n_total, sc.L, sc.h_d)
    return [
        Row(sweep_value, "bpu", sc.n_total, 0, None, bpu, _rate(bpu)),
        Row(sweep_value, "bppu", sc.n_total, 0, None, bppu, _rate(bppu)),
    ]


ANALYSES = {
    "evaluate": evaluate_row,
    "allocate": allocate_row,
    "place": place_row,
    "joint": joint_row,
}


def _sweep_points(var: str, lo: float, hi: float, steps: int) -> List[float]:
    if steps < 1:
        raise ConfigError("--steps must be >= 1")
    pts = np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])
    if var == "n":
        ints = [int(round(p)) for p in pts]
        return list(dict.fromkeys(ints))
    return [float(p) for p in pts]


def _at(sc: ScenarioConfig, var: str, value) -> ScenarioConfig:
    key = "n_total" if var == "n" else var
    return sc.with_values(**{key: value})


def sweep_rows(sc: ScenarioConfig, var: str, values, schemes, analysis: str,
               benchmarks: bool = False) -> List[Row]:
    build = ANALYSES[analysis]

    def one(value):
        point = _at(sc, var, value)
        rows = [build(point, s, value) for s in schemes]
        if benchmarks:
            rows += benchmark_rows(point, value)
        return rows

    return [r for rows in ordered_map(one, values) for r in rows]


def compare_rows(sc: ScenarioConfig) -> List[Row]:
    rows = [joint_row(sc, s, sc.n_total) for s in Scheme]
    return rows + benchmark_rows(sc, sc.n_total)


def asymptotic_rows(sc: ScenarioConfig, scheme: Scheme, variable: str, lo: float, hi: float,
                    steps: int, policy: str, epsilon: float, stderr) -> List[Row]:
    cfg = sc.power_config()
    gains = gains_from_geometry(sc.geometry_for(scheme), cfg)
    split = sc.fixed_split() or allocation.rounded_optimal_split(scheme, cfg, gains, sc.n_total)
    fit = asymptotics.estimate_scaling_order(
        scheme, variable, cfg, gains, (lo, hi), policy=policy, epsilon=epsilon,
        split=split, n_total=sc.n_total, points=steps)
    query = asymptotics.AsymptoticQuery(scheme, variable, epsilon if variable == "N" else None)
    form = asymptotics.asymptotic_snr(query, cfg, gains, split)
    print(f"# {scheme.value} vs {variable}: slope={fit.slope:.6g} tail_slope={fit.tail_slope:.6g} "
          f"residual={fit.residual:.3g} limit={form.kind}:{form.value:.6g}", file=stderr)
    rows = []
    for v, snr in zip(fit.values, fit.snr):
        rows.append(Row(float(v), scheme.value, snr_linear=float(snr), rate_bps_hz=_rate(float(snr)),
                        oracle_rate_bps_hz=_rate(form.leading(float(v)))))
    return rows


# Figures ------------------------------------------------------------------

def reproduce_rows(sc: ScenarioConfig, fig: str) -> List[Row]:
    all_schemes = list(Scheme)
    n_grid = list(range(100, 1001, 100))
    pi_grid = [float(v) for v in range(0, 21, 2)]
    if fig in ("fig3", "fig4"):
        return sweep_rows(sc, "n", n_grid, all_schemes, "allocate")
    if fig in ("fig5", "fig6"):
        fixed = sc.with_values(n_total=700, n_p=500) if sc.n_p is None else sc
        return sweep_rows(fixed, "p_i_dbm", pi_grid, all_schemes, "place")
    base = sc.with_values(n_total=700) if fig != "fig7" else sc
    if fig == "fig7":
        return sweep_rows(base, "n", n_grid, all_schemes, "joint", benchmarks=True)
    if fig == "fig8":
        return sweep_rows(base, "p_i_dbm", pi_grid, all_schemes, "joint", benchmarks=True)
    pb_grid = [float(v) for v in range(10, 41, 5)]
    return sweep_rows(base, "p_b_dbm", pb_grid, all_schemes, "joint", benchmarks=True)


# Argument parsing -----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario file (key = value lines)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one scenario key; repeatable")
    common.add_argument("--out", help="write CSV here instead of standard output")

    p = argparse.ArgumentParser(prog="irs-deploy",
                                description="Rates, element splits and placements for IRS-aided links.")
    sub = p.add_subparsers(dest="command", required=True)
    scheme_help = "bhu, bapu, bpau or all (default: the scenario's scheme)"
    for name, text in (("evaluate", "closed-form SNR at the configured geometry"),
                       ("allocate", "optimal passive/active split at the configured geometry"),
                       ("place", "closed-form placement for the configured split"),
                       ("joint", "joint split and placement")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--scheme", choices=["bhu", "bapu", "bpau", "all"], help=scheme_help)

    sub.add_parser("compare", parents=[common], help="all schemes and passive baselines, jointly optimised")

    sp = sub.add_parser("sweep", parents=[common], help="sweep one variable")
    sp.add_argument("--var", required=True, choices=SWEEP_VARS)
    sp.add_argument("--from", dest="lo", type=float, required=True)
    sp.add_argument("--to", dest="hi", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--analysis", choices=sorted(ANALYSES), default="joint")
    sp.add_argument("--scheme", choices=["bhu", "bapu", "bpau", "all"], default="all")

    sp = sub.add_parser("asymptotic", parents=[common], help="log-log scaling sweep")
    sp.add_argument("--var", required=True, choices=asymptotics.VARIABLES)
    sp.add_argument("--from", dest="lo", type=float, required=True,
                    help="start value (element count or watts)")
    sp.add_argument("--to", dest="hi", type=float, required=True)
    sp.add_argument("--steps", type=int, default=20)
    sp.add_argument("--policy", choices=asymptotics.POLICIES, default="fixed_eps")
    sp.add_argument("--epsilon", type=float, default=0.5)
    sp.add_argument("--scheme", choices=["bhu", "bapu", "bpau", "all"], help=scheme_help)

    sp = sub.add_parser("reproduce", parents=[common], help="data series of a figure")
    sp.add_argument("figure", choices=FIGURES)
    return p


def _load(args) -> ScenarioConfig:
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value
    return parse_config(text, overrides)


def run_subcommand(args, stderr=None) -> List[Row]:
    stderr = stderr or sys.stderr
    sc = _load(args)
    cmd = args.command
    if cmd in ANALYSES:
        return [ANALYSES[cmd](sc, s, sc.n_total) for s in _schemes(args.scheme, sc)]
    if cmd == "compare":
        return compare_rows(sc)
    if cmd == "sweep":
        values = _sweep_points(args.var, args.lo, args.hi, args.steps)
        return sweep_rows(sc, args.var, values, _schemes(args.scheme, sc), args.analysis)
    if cmd == "asymptotic":
        rows = []
        for s in _schemes(args.scheme, sc):
            rows += asymptotic_rows(sc, s, args.var, args.lo, args.hi, args.steps,
                                    args.policy, args.epsilon, stderr)
        return rows
    if cmd == "reproduce":
        return reproduce_rows(sc, args.figure)
    raise AssertionError(cmd)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        rows = run_subcommand(args)
    except ConfigError as exc:
        print(f"irs-deploy: config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"irs-deploy: error: {exc}", file=sys.stderr)
        return 1
    buf = io.StringIO()
    write_csv(rows, buf)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
