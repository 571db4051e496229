"""Entanglement, dephasing and spin squeezing of N bosons in two modes."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .fock import (
    ENERGY,
    SPATIAL,
    CollectiveSpinOps,
    FockDensityMatrix,
    FockLabel,
    ModeBipartition,
    PureState,
    bipartition_unitary,
    change_bipartition,
    coherent_state,
    fock_state,
    maximally_mixed,
    rotate_state,
    spin_ops,
)
from .entanglement import (
    is_separable,
    negativity,
    negativity_closed_form,
    negativity_trace_norm,
    partial_transpose,
)
from .dephasing import (
    DephasingParams,
    EvolutionResult,
    evolve,
    evolve_closed_form,
    evolve_kraus_quadrature,
    evolve_ode,
)
from .metrology import (
    DirectionTriplet,
    SqueezingReport,
    min_squeezing_scan,
    spin_mean,
    spin_variance,
    squeezing_parameter,
)
