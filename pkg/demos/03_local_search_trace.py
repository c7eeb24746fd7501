"""Watching the remove/exchange local search climb.

The search starts from the best single offloaded user and accepts a move only
when J* grows by at least the factor 1 + eps/n^2.
"""

from mecoffload import ScenarioConfig, generate, heuristic_schedule
from mecoffload.search import is_local_optimum

scen = generate(ScenarioConfig(num_cells=7, users_per_cell=3), seed=11)
res = heuristic_schedule(scen, eps=0.1)

print(f"ground set size n = {scen.ground_size}, acceptance factor "
      f"{res.trace.threshold:.6f}")
for k, mv in enumerate(res.trace.accepted_moves, 1):
    e = mv.element
    print(f"{k:3d}  {mv.kind:<8} (u{e.user}, BS{e.server}, sb{e.subband})  "
          f"{mv.before:7.4f} -> {mv.after:7.4f}")
print(f"\n{len(res.assignment)} of {scen.n_users} users offload, J* = {res.value:.4f}, "
      f"{res.trace.evaluations} J* evaluations")
print("locally optimal:", is_local_optimum(scen, res.assignment, 0.1))
