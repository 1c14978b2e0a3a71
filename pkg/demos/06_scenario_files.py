"""Scenario files and the command line.

Scenarios are plain ``key = value`` text with powers in dBm. The same
text drives the library and the ``irs-deploy`` command, which prints CSV.
"""
import io

from irs_deploy import Scheme, gains_from_geometry, parse_config, rounded_optimal_split
from irs_deploy.cli import main

text = """
# active surface next to the BS, passive one above the user
scheme  = bapu
n_total = 600
p_i_dbm = 10
"""
sc = parse_config(text)
cfg = sc.power_config()
gains = gains_from_geometry(sc.double_geometry(), cfg)
print("library split:", rounded_optimal_split(Scheme.BAPU, cfg, gains, sc.n_total))

print("\nsame scenario through the command line:")
main(["allocate", "--set", "scheme=bapu", "--set", "n_total=600", "--set", "p_i_dbm=10"])

print("\na sweep over the total element count:")
main(["sweep", "--var", "n", "--from", "100", "--to", "500", "--steps", "3",
      "--analysis", "allocate", "--scheme", "bpau"])
