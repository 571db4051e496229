"""
Collective dephasing generated by J_z.

The master equation

    d rho / dt = gamma (J_z rho J_z - {J_z^2, rho} / 2)

damps the Fock-basis coherences as rho_{kl}(t) = exp(-t gamma (k-l)^2 / 2) rho_{kl}(0)
and leaves populations untouched. Three backends compute the same channel:

* ``closed_form``: the entrywise damping factors above (authoritative);
* ``ode``: fixed-step RK4 integration of the generator built from J_z;
* ``kraus_quadrature``: Gauss-Hermite average of random z-rotations with
  angle u sqrt(t gamma / 2), u drawn from exp(-u^2/4) / (2 sqrt(pi)).

The quadrature backend converges slowly once (k-l) sqrt(t gamma) grows
beyond what a few hundred Hermite nodes resolve; it is meant for
validation, not production evolution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entanglement import negativity_closed_form
from .errors import BasisMismatchError, DomainError, IntegrationError, NumericError
from .fock import (
    ENERGY,
    SPATIAL,
    FockDensityMatrix,
    _binomial_row,
    _check_n_total,
    change_bipartition,
    coherent_state,
    rotation_unitary,
    spin_ops,
)
from .quadrature import DEFAULT_NODES, NODE_CAP, gaussian_average

__all__ = [
    "DephasingParams",
    "EvolutionResult",
    "dephasing_generator",
    "evolve",
    "evolve_closed_form",
    "evolve_ode",
    "evolve_kraus_quadrature",
    "negativity_decay_check",
    "cd_initial_state",
    "cd_trajectory",
    "evolved_cd_offdiagonal",
]

DIAGONAL_TOL = 1e-9
ODE_SCALE = 1e-2
ODE_REFINE_TOL = 1e-10
ODE_MAX_HALVINGS = 12


@dataclass(frozen=True, eq=False)
class DephasingParams:
    gamma: float
    times: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise DomainError(f"gamma must be a finite non-negative rate, got {self.gamma!r}")
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        if t.ndim != 1 or t.size == 0:
            raise DomainError("times must be a non-empty 1-D grid")
        if not np.all(np.isfinite(t)) or t[0] < 0:
            raise DomainError("times must be finite and non-negative")
        if np.any(np.diff(t) <= 0):
            raise DomainError("times must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "times", t)


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    params: DephasingParams
    states: tuple
    backend: str

    def __post_init__(self):
        if len(self.states) != len(self.params.times):
            raise ValueError("one state per grid time is required")
        diag0 = np.diag(self.states[0].entries)
        for rho in self.states[1:]:
            drift = np.max(np.abs(np.diag(rho.entries) - diag0))
            if drift > DIAGONAL_TOL:
                raise NumericError(f"{self.backend}: populations drifted by {drift:.3e}")

    @property
    def times(self) -> np.ndarray:
        return self.params.times

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(zip(self.params.times, self.states))

    def entries(self) -> np.ndarray:
        """(T, N+1, N+1) stack of the trajectory."""
        return np.stack([s.entries for s in self.states])


def _require_spatial(rho: FockDensityMatrix):
    if not rho.bipartition.is_reference:
        raise BasisMismatchError(
            f"dephasing acts diagonally only in the spatial Fock basis; state is tagged "
            f"{rho.bipartition_tag!r} (apply change_bipartition to 'spatial' first)"
        )


def _as_params(params, times=None) -> DephasingParams:
    if isinstance(params, DephasingParams):
        return params
    return DephasingParams(params, times)


def dephasing_generator(entries: np.ndarray, gamma: float, n_total: int) -> np.ndarray:
    """Right-hand side gamma (J_z rho J_z - {J_z^2, rho}/2) for a matrix ``entries``."""
    jz = spin_ops(n_total).jz
    jz2 = jz @ jz
    return gamma * (jz @ entries @ jz - 0.5 * (jz2 @ entries + entries @ jz2))


def _generator_superoperator(gamma: float, n_total: int) -> np.ndarray:
    # row-major vectorization: vec(A X B) = kron(A, B.T) vec(X)
    jz = spin_ops(n_total).jz
    jz2 = jz @ jz
    eye = np.eye(n_total + 1)
    return gamma * (np.kron(jz, jz.T) - 0.5 * (np.kron(jz2, eye) + np.kron(eye, jz2.T)))


def evolve_closed_form(rho0: FockDensityMatrix, params, times=None) -> EvolutionResult:
    """rho_{kl}(t) = exp(-t gamma (k-l)^2 / 2) rho_{kl}(0)."""
    _require_spatial(rho0)
    params = _as_params(params, times)
    k = np.arange(rho0.dim)
    dist2 = (k[:, None] - k[None, :]) ** 2
    # zero dephasing returns the input object untouched
    states = tuple(
        rho0 if t * params.gamma == 0.0 else rho0.with_entries(np.exp(-0.5 * t * params.gamma * dist2) * rho0.entries)
        for t in params.times
    )
    return EvolutionResult(params, states, "closed_form")


def _rk4_trajectory(superop, vec0, times, steps_per_unit):
    dim2 = superop.shape[0]
    out = []
    vec = vec0
    t_prev = 0.0
    step_cache = {}
    for t in times:
        dt = t - t_prev
        if dt > 0:
            n_steps = max(1, int(np.ceil(dt * steps_per_unit)))
            h = dt / n_steps
            key = (n_steps, h)
            if key not in step_cache:
                z = h * superop
                z2 = z @ z
                z3 = z2 @ z
                # one classical RK4 step of a linear autonomous system
                one = np.eye(dim2) + z + z2 / 2.0 + z3 / 6.0 + z3 @ z / 24.0
                step_cache[key] = np.linalg.matrix_power(one, n_steps)
            vec = step_cache[key] @ vec
        out.append(vec)
        t_prev = t
    return np.stack(out)


def evolve_ode(rho0: FockDensityMatrix, params, times=None) -> EvolutionResult:
    """
    Integrate the master equation with fixed-step classical RK4.

    The initial step satisfies gamma N^2 h <= 1e-2; the step is halved until
    every grid state changes by less than 1e-10 (max entry), at most 12 times.
    """
    _require_spatial(rho0)
    params = _as_params(params, times)
    n = rho0.n_total
    superop = _generator_superoperator(params.gamma, n)
    vec0 = rho0.entries.reshape(-1)
    rate = params.gamma * n * n
    steps_per_unit = rate / ODE_SCALE if rate > 0 else 1.0
    traj = _rk4_trajectory(superop, vec0, params.times, steps_per_unit)
    change = np.inf
    for _ in range(ODE_MAX_HALVINGS):
        steps_per_unit *= 2.0
        finer = _rk4_trajectory(superop, vec0, params.times, steps_per_unit)
        change = float(np.max(np.abs(finer - traj)))
        traj = finer
        if change < ODE_REFINE_TOL:
            break
    else:
        raise IntegrationError(
            f"RK4 refinement stalled: successive step halvings still differ by {change:.3e}"
        )
    dim = rho0.dim
    states = tuple(rho0.with_entries(v.reshape(dim, dim)) for v in traj)
    return EvolutionResult(params, states, "ode")


def evolve_kraus_quadrature(
    rho0: FockDensityMatrix,
    params,
    times=None,
    nodes: int = DEFAULT_NODES,
    tol: float = 1e-10,
    cap: int = NODE_CAP,
) -> EvolutionResult:
    """
    Gaussian mixture of z-rotations,

        rho(t) = E_u[ exp(-i s u J_z) rho exp(+i s u J_z) ],   s = sqrt(t gamma / 2),

    averaged with Gauss-Hermite quadrature starting from ``nodes`` and
    doubling until converged (see :func:`twomode.quadrature.gaussian_average`).
    """
    _require_spatial(rho0)
    params = _as_params(params, times)
    n = rho0.n_total
    z_axis = np.array([0.0, 0.0, 1.0])
    states = []
    for t in params.times:
        s = np.sqrt(0.5 * t * params.gamma)
        if s == 0.0:
            states.append(rho0)
            continue

        def rotated(u, s=s):
            r = rotation_unitary(n, z_axis, s * u)
            return r @ rho0.entries @ np.conj(np.swapaxes(r, -1, -2))

        avg, _ = gaussian_average(rotated, nodes=nodes, tol=tol, cap=cap)
        states.append(rho0.with_entries(avg))
    return EvolutionResult(params, tuple(states), "kraus_quadrature")


_BACKENDS = {
    "closed_form": evolve_closed_form,
    "ode": evolve_ode,
    "kraus_quadrature": evolve_kraus_quadrature,
}


def evolve(rho0: FockDensityMatrix, params, times=None, backend: str = "closed_form", **kwargs) -> EvolutionResult:
    try:
        fn = _BACKENDS[backend]
    except KeyError:
        raise DomainError(f"unknown backend {backend!r}; expected one of {sorted(_BACKENDS)}") from None
    return fn(rho0, _as_params(params, times), **kwargs)


def negativity_decay_check(rho0: FockDensityMatrix, params, times=None) -> list[tuple[float, float, float]]:
    """
    Spatial negativity along the closed-form trajectory next to the bound
    exp(-t gamma / 2) N(rho0). Raises NumericError if the bound is exceeded.
    """
    params = _as_params(params, times)
    result = evolve_closed_form(rho0, params)
    neg0 = negativity_closed_form(rho0).value
    rows = []
    for t, rho in result:
        neg = negativity_closed_form(rho).value
        bound = float(np.exp(-0.5 * t * params.gamma) * neg0)
        if neg > bound + 1e-10:
            raise NumericError(f"negativity {neg!r} exceeds decay bound {bound!r} at t={t}")
        rows.append((float(t), neg, bound))
    return rows


def cd_initial_state(n_total: int) -> FockDensityMatrix:
    """|N, 0> of the energy modes, expressed in the spatial basis (coherent xi=1/2, phi=0)."""
    return coherent_state(0.5, 0.0, n_total).density_matrix(SPATIAL)


def cd_trajectory(n_total: int, params, times=None) -> list[FockDensityMatrix]:
    """Closed-form evolution of :func:`cd_initial_state`, re-expressed in the energy basis."""
    result = evolve_closed_form(cd_initial_state(n_total), _as_params(params, times))
    return [change_bipartition(rho, ENERGY) for rho in result.states]


def evolved_cd_offdiagonal(
    n_total: int,
    gamma: float,
    t: float,
    k: int,
    l: int,
    nodes: int = DEFAULT_NODES,
    tol: float = 1e-12,
) -> complex:
    """
    <k, N-k|_CD rho(t) |l, N-l>_CD for rho(0) = |N, 0>_CD.

    A z-rotation by beta sends every boson to cos(beta/2) c^dag - i sin(beta/2) d^dag,
    so the element is

        sqrt(C(N,k) C(N,l)) i^(k-l) E_u[cos^(k+l)(beta/2) sin^(2N-k-l)(beta/2)],

    with beta = u sqrt(t gamma / 2) and the Gaussian average computed by
    quadrature. Odd k+l gives an odd integrand and a vanishing element.
    """
    n = _check_n_total(n_total)
    if not (0 <= k <= n and 0 <= l <= n):
        raise DomainError(f"indices ({k}, {l}) outside [0, {n}]")
    if gamma < 0 or t < 0:
        raise DomainError("gamma and t must be non-negative")
    s = np.sqrt(0.5 * gamma * t)
    c = _binomial_row(n)
    prefactor = np.sqrt(c[k] * c[l]) * 1j ** ((k - l) % 4)

    def integrand(u):
        half = 0.5 * s * u
        return np.cos(half) ** (k + l) * np.sin(half) ** (2 * n - k - l)

    avg, _ = gaussian_average(integrand, nodes=nodes, tol=tol)
    return complex(prefactor * avg)
