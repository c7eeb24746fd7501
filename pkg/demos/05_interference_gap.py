"""How good is the worst-case interference model the search relies on?

The search plans with every interferer at full power. After power control the
real interference is lower, so the exact utility is at least as high. The gap
only opens once users are allowed to transmit loudly.
"""

from dataclasses import replace

from mecoffload import Sweep, fig6_gap, preset
from mecoffload.experiment import relative_gap

spec = replace(preset("fig6", drops=20), measure_runtime=False,
               sweep=Sweep("P_u_dbm", (10.0, 20.0, 25.0, 30.0, 35.0)))
print(f"{'P_u [dBm]':>9}  {'approx':>8}  {'exact':>8}  {'gap':>7}")
for p, approx, exact in fig6_gap(spec):
    print(f"{p:9.0f}  {approx:8.3f}  {exact:8.3f}  {relative_gap(approx, exact):7.2%}")
