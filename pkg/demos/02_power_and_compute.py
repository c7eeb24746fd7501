"""The two inner allocation problems on their own.

Uplink power: the radio overhead Gamma(p) = (phi + psi p) / log2(1 + theta p)
is quasi-convex, and bisection on the sign of its derivative finds the
minimiser. Server CPU: the split f_u proportional to sqrt(eta_u) is optimal.
"""

import numpy as np

from mecoffload import CraInstance, UpaCoefficients, allocate, bisect_power, optimal_value
from mecoffload.power import gamma_objective

coef = UpaCoefficients(phi=1.0, psi=1.0, theta=10.0, max_power=1.0)
p_star, steps = bisect_power(coef, 1e-6, full_output=True)
print(f"bisection: p* = {p_star:.6f} W after {steps} steps, Gamma(p*) = "
      f"{gamma_objective(coef, p_star):.6f}")

grid = np.linspace(1e-4, 1.0, 10_001)
g = gamma_objective(coef, grid)
print(f"grid:      p  = {grid[np.argmin(g)]:.6f} W,                  Gamma    = {g.min():.6f}")

# a weak channel never reaches the stationary point: full power is optimal
weak = UpaCoefficients(phi=1.0, psi=1.0, theta=0.1, max_power=1.0)
print(f"weak channel: p* = {bisect_power(weak)} W (the power cap)")
print()

inst = CraInstance(server_rate=20e9, etas=(1e8, 4e8, 9e8))
f = allocate(inst)
print("CPU split (GHz):", np.round(f / 1e9, 3), " ratios follow sqrt(eta): 1:2:3")
print(f"Lambda = {optimal_value(inst):.5f}, equal split would give "
      f"{sum(e / (20e9 / 3) for e in inst.etas):.5f}")
