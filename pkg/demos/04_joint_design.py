"""Split and placement chosen together, against passive-only baselines.

The alternating optimiser is checked against a brute-force scan of every
split and grid position. Raising the transmit power favours the scheme
whose active surface sits next to the BS.
"""
from irs_deploy import PowerConfig, Scheme, compare_all, joint_brute_force

n, L, h_s, h_d = 700, 90.0, 10.0, 5.0
for p_b_dbm in (20, 35):
    cfg = PowerConfig.from_dbm(p_b_dbm=p_b_dbm)
    table = compare_all(cfg, n, L, h_s, h_d, grid_res=0.1)
    print(f"P_B = {p_b_dbm} dBm, winner {table.winner}")
    for name, rate in table.ordered():
        line = f"  {name:5} {rate:8.4f} bit/s/Hz"
        if name in ("bhu", "bapu", "bpau"):
            res = table.joint[Scheme(name)]
            bf = joint_brute_force(res.scheme, cfg, n, L, h_s if name == "bhu" else h_d, 0.1)
            line += (f"  split {res.split.n_p}/{res.split.n_a}, x* {res.placement.x_star:6.2f} m,"
                     f" brute force {bf.rate:8.4f}")
        print(line)
