"""A miniature runtime and utility table over a few drops.

Runtimes are hardware-dependent; the ordering is what to look at.
"""

from mecoffload import preset, run

spec = preset("table1", drops=20)
print(f"{'scheme':>10}  {'utility':>8}  {'+-95%':>6}  {'runtime':>12}")
for row in run(spec):
    print(f"{row.scheme:>10}  {row.mean_utility:8.3f}  {row.ci95_halfwidth:6.3f}  "
          f"{row.mean_runtime_ms:9.3f} ms")
