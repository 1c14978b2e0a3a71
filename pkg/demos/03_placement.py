"""Where should the active surface go?

Closed-form positions are compared with an exact-SNR grid scan while the
amplification budget grows. More amplification power pulls the hybrid
and BS-side active surfaces toward the BS.
"""
from irs_deploy import ElementSplit, PowerConfig, Scheme, check_placement_assumptions, grid_search_placement, place

split = ElementSplit(n_p=500, n_a=200)
L, h_s, h_d = 90.0, 10.0, 5.0

print(f"{'P_I dBm':>7} " + " ".join(f"{s.value + ' x*':>10} {'grid':>7} {'ok':>3}" for s in Scheme))
for p_i_dbm in range(0, 21, 4):
    cfg = PowerConfig.from_dbm(p_i_dbm=p_i_dbm)
    cells = []
    for scheme in Scheme:
        h = h_s if scheme is Scheme.BHU else h_d
        sol = place(scheme, cfg, split, L, h)
        grid = grid_search_placement(scheme, cfg, split, L, h, 0.05, restricted=True)
        ok = check_placement_assumptions(cfg, sol.geometry, split).ratios[scheme] >= 100
        cells.append(f"{sol.x_star:10.2f} {grid.x_star:7.2f} {'y' if ok else 'n':>3}")
    print(f"{p_i_dbm:7d} " + " ".join(cells))
