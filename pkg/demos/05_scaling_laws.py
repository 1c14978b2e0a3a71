"""Capacity scaling read off log-log slopes.

With a fixed passive share the hybrid SNR grows like N^2 and the double
schemes like N. An optimised split gives N^3 while the amplified noise
stays small. Extra power eventually saturates the double schemes.
"""
from irs_deploy import (
    DoubleIrsGeometry,
    ElementSplit,
    HybridGains,
    PowerConfig,
    Scheme,
    gains_from_geometry,
    estimate_scaling_order,
)

cfg = PowerConfig.from_dbm()
hybrid = HybridGains(bi=cfg.beta_ref / 4, iu=cfg.beta_ref / 2500)
near_user = gains_from_geometry(DoubleIrsGeometry(L=55, x_b=50, x_u=0, h_d=2), cfg)
far = gains_from_geometry(DoubleIrsGeometry(L=90, x_b=5, x_u=5, h_d=5), cfg)

runs = [
    ("bhu vs N, 90% passive", Scheme.BHU, "N", cfg.replace(p_i=1e-4), hybrid, (1e4, 1e6), {"epsilon": 0.9}),
    ("bapu vs N, half passive", Scheme.BAPU, "N", cfg, near_user, (1e4, 1e6), {}),
    ("bapu vs N, optimised split", Scheme.BAPU, "N", cfg, far, (10, 1000), {"policy": "optimized_allocation"}),
    ("bpau vs P_B, 500/200", Scheme.BPAU, "P_B", cfg, far, (0.1, 1e5), {"split": ElementSplit(500, 200)}),
]
for label, scheme, var, c, g, span, kw in runs:
    fit = estimate_scaling_order(scheme, var, c, g, span, **kw)
    print(f"{label:28} slope {fit.slope:6.3f}  last decade {fit.tail_slope:6.3f}  "
          f"{'power law' if fit.power_law else 'curved'}")
