"""
Noise that creates entanglement
===============================

Dephasing can only reduce negativity in the spatial modes, yet the same
channel creates entanglement between the energy modes. Start from the
product state |N, 0> of the energy modes and watch both numbers.
"""
import numpy as np

from twomode import ENERGY, change_bipartition, negativity
from twomode.dephasing import cd_initial_state, evolve_closed_form, evolved_cd_offdiagonal

N, gamma = 4, 1.0
times = np.linspace(0.0, 3.0, 7)

result = evolve_closed_form(cd_initial_state(N), gamma, times)
print("   t   spatial  bound    energy")
neg0 = negativity(result.states[0]).value
for t, rho in result:
    spatial = negativity(rho).value
    energy = negativity(change_bipartition(rho, ENERGY)).value
    print(f"{t:4.1f}  {spatial:7.4f}  {np.exp(-gamma * t / 2) * neg0:7.4f}  {energy:7.4f}")

# the energy-mode coherences are Gaussian averages of trigonometric powers;
# compare one of them with the basis-change route
t = 1.0
rho_e = change_bipartition(evolve_closed_form(cd_initial_state(N), gamma, [t]).states[0], ENERGY)
print("rho_(N, N-2) quadrature:", evolved_cd_offdiagonal(N, gamma, t, N, N - 2))
print("rho_(N, N-2) basis map: ", complex(rho_e.entries[N, N - 2]))
