"""
Entanglement depends on how the modes are split
================================================

The same two-mode state can look entangled or separable depending on
which pair of modes we call "A" and "B". Here a coherent state that is
spread over the spatial modes is a single Fock state of the energy modes.
"""
import numpy as np

from twomode import ENERGY, change_bipartition, coherent_state, negativity

N = 6

# a balanced coherent state, written in the spatial modes
rho = coherent_state(0.5, 0.0, N).density_matrix()
print("spatial negativity:", negativity(rho).value)

# the same state in the symmetric/antisymmetric (energy) modes
rho_e = change_bipartition(rho, ENERGY)
print("energy negativity: ", negativity(rho_e).value)

# all the population sits in one Fock state |N, 0>
np.set_printoptions(precision=3, suppress=True)
print("energy-basis populations:", np.abs(np.diag(rho_e.entries)))

# both negativity routes agree: closed form (sum of |coherences|) and the
# trace norm of the partial transpose
for method in ("closed_form", "trace_norm"):
    print(f"{method:>12}:", negativity(rho, method=method).value)
