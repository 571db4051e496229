"""
Dephasing does not squeeze
==========================

Starting from an unsqueezed state, collective dephasing never pushes the
Wineland parameter below the shot-noise level, along any direction.
A state that is already squeezed is shown for contrast.
"""
import numpy as np

from twomode import PureState, coherent_state
from twomode.metrology import direction_triplets, min_squeezing_scan, squeezing_sweep

N, gamma = 4, 1.0
times = np.linspace(0.0, 3.0, 13)

rho = coherent_state(0.5, 0.0, N).density_matrix()
premise, rows = squeezing_sweep(rho, direction_triplets(8), gamma, times)
print("initial min xi^2:", round(premise.min_xi, 6))
print("min over sweep:  ", min(r["bound_lhs"] for r in rows))

# shot noise at t = 0: delta theta^2 = 1/N
best = min((r for r in rows if r["t"] == 0.0), key=lambda r: r["delta_theta_squared"])
print("delta theta^2 at t=0:", best["delta_theta_squared"], "vs 1/N =", 1 / N)

# a genuinely squeezed two-boson state fails the premise
squeezed = PureState.normalized(2, [-np.sin(np.pi / 8), 0.0, np.cos(np.pi / 8)]).density_matrix()
print("squeezed state min xi^2:", round(min_squeezing_scan(squeezed).min_xi, 4))
