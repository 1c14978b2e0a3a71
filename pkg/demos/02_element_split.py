"""How many elements should be active?

For each budget N the relaxed optimum is rounded to an integer split and
checked against a scan of every split. With these gains the double-surface
schemes keep about two thirds of the elements passive, while the hybrid
surface wants almost all of them active.
"""
from irs_deploy import (
    DoubleIrsGeometry,
    PowerConfig,
    Scheme,
    SingleIrsGeometry,
    exhaustive_split,
    gains_from_geometry,
    rounded_optimal_split,
    snr_closed_form,
)

cfg = PowerConfig.from_dbm()
gains = {
    Scheme.BHU: gains_from_geometry(SingleIrsGeometry.from_distances(80.0, 50.0), cfg),
    Scheme.BAPU: gains_from_geometry(DoubleIrsGeometry(L=90, x_b=5, x_u=5, h_d=5), cfg),
}
gains[Scheme.BPAU] = gains[Scheme.BAPU]

for n in (100, 300, 600, 1000):
    cells = []
    for scheme in Scheme:
        split = rounded_optimal_split(scheme, cfg, gains[scheme], n)
        best = exhaustive_split(scheme, cfg, gains[scheme], n)
        rate = snr_closed_form(scheme, cfg, gains[scheme], split).rate
        flag = "" if split == best else " (scan differs)"
        cells.append(f"{scheme.value} {split.n_p:4d}p/{split.n_a:4d}a {rate:6.3f}{flag}")
    print(f"N={n:5d}: " + " | ".join(cells))
