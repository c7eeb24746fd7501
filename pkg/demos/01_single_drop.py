"""One network drop, every scheme, side by side.

Seven hexagonal cells are too many for the exhaustive search, so this uses
four cells, six users and two sub-bands per cell.
"""

from mecoffload import SchemeId, ScenarioConfig, generate, run_scheme

cfg = ScenarioConfig(num_cells=4, users_total=6, num_subbands=2)
scen = generate(cfg, seed=3)

print(f"{scen.n_users} users, {scen.n_servers} base stations, {scen.n_subbands} sub-bands")
print("home BS per user:", [int(s) for s in scen.home])
print()

for scheme in SchemeId:
    sched = run_scheme(scheme, scen, seed=3)
    rep = sched.report(scen, "exact")
    slots = ", ".join(f"u{e.user}->BS{e.server}/sb{e.subband}" for e in sched.assignment)
    print(f"{scheme.value:>10}  J* = {sched.value:6.3f}   exact utility = "
          f"{rep.system_utility:6.3f}   [{slots or 'all local'}]")
