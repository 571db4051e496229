"""
Collective-spin moments, the Wineland squeezing parameter and their
behaviour under J_z dephasing.

For a right-handed orthonormal triplet (n1, n2, n3) the squeezing parameter is

    xi_W^2 = N Var(J_n2) / <J_n3>^2,    delta^2 theta = xi_W^2 / N.

Dephased moments follow from averaging the initial moments over z-rotated
directions n(u, t) = R_z(u sqrt(t gamma / 2)) n with the Gaussian kernel of
:mod:`twomode.quadrature`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BasisMismatchError, DomainError, PremiseError, UndefinedSqueezingError
from .fock import FockDensityMatrix, spin_ops, unit_vector
from .quadrature import DEFAULT_NODES, gaussian_average

__all__ = [
    "DirectionTriplet",
    "SqueezingReport",
    "HeisenbergCheck",
    "BoundCheck",
    "ScanResult",
    "spin_moments",
    "spin_mean",
    "spin_variance",
    "heisenberg_check",
    "squeezing_parameter",
    "dephasing_rotation",
    "evolved_spin_mean",
    "evolved_spin_variance",
    "evolved_moments",
    "averaged_rotated_variance",
    "convexity_bound_check",
    "fibonacci_sphere",
    "orthogonal_basis",
    "direction_triplets",
    "min_squeezing_scan",
    "check_premise",
    "squeezing_sweep",
]

MEAN_TOL = 1e-8
PREMISE_TOL = 1e-3
AXES = np.eye(3)


@dataclass(frozen=True, eq=False)
class DirectionTriplet:
    """Right-handed orthonormal triplet; n1 is the rotation axis, n2 the measured spin."""

    n1: np.ndarray
    n2: np.ndarray
    n3: np.ndarray

    def __post_init__(self):
        vs = [unit_vector(v, name) for v, name in ((self.n1, "n1"), (self.n2, "n2"), (self.n3, "n3"))]
        for (i, a), (j, b) in (((1, vs[0]), (2, vs[1])), ((1, vs[0]), (3, vs[2])), ((2, vs[1]), (3, vs[2]))):
            if abs(a @ b) > 1e-10:
                raise DomainError(f"n{i} and n{j} are not orthogonal (dot = {a @ b:.3e})")
        if np.max(np.abs(np.cross(vs[0], vs[1]) - vs[2])) > 1e-10:
            raise DomainError("triplet is not right-handed: n1 x n2 != n3")
        for name, v in zip(("n1", "n2", "n3"), vs):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def from_n2_n3(cls, n2, n3) -> "DirectionTriplet":
        n2 = np.asarray(n2, dtype=float)
        n3 = np.asarray(n3, dtype=float)
        return cls(np.cross(n2, n3), n2, n3)

    @classmethod
    def standard(cls) -> "DirectionTriplet":
        """(x, y, z): rotate about x, read out J_y, mean spin along z."""
        return cls(AXES[0], AXES[1], AXES[2])


@dataclass(frozen=True)
class SqueezingReport:
    xi_w_squared: float
    delta_theta_squared: float
    triplet: DirectionTriplet
    mean_n3: float
    variance_n2: float
    n_total: int


class HeisenbergCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class BoundCheck(NamedTuple):
    lhs: float
    holds: bool


class ScanResult(NamedTuple):
    min_xi: float
    argmin_triplet: DirectionTriplet


def _require_spatial(rho: FockDensityMatrix):
    if not rho.bipartition.is_reference:
        raise BasisMismatchError(
            f"spin moments are defined in the spatial basis; state is tagged {rho.bipartition_tag!r}"
        )


def spin_moments(rho: FockDensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """
    Mean vector m_i = <J_i> and symmetrized second moments S_ij = <{J_i, J_j}>/2.

    <J_n> = n . m and <J_n^2> = n^T S n for any unit n.
    """
    _require_spatial(rho)
    j = spin_ops(rho.n_total).vector
    mean = np.einsum("kl,ilk->i", rho.entries, j).real
    prod = np.einsum("iab,jbc->ijac", j, j)
    second = np.einsum("kl,ijlk->ij", rho.entries, prod).real
    second = 0.5 * (second + second.T)
    return mean, second


def spin_mean(rho: FockDensityMatrix, n) -> float:
    """Tr(rho n.J)."""
    _require_spatial(rho)
    op = spin_ops(rho.n_total).along(n)
    val = np.trace(rho.entries @ op)
    return float(val.real)


def spin_variance(rho: FockDensityMatrix, n) -> float:
    """<(n.J)^2> - <n.J>^2, clamped at zero against round-off."""
    _require_spatial(rho)
    op = spin_ops(rho.n_total).along(n)
    first = np.trace(rho.entries @ op).real
    second = np.trace(rho.entries @ op @ op).real
    return float(max(second - first * first, 0.0))


def heisenberg_check(rho: FockDensityMatrix, triplet: DirectionTriplet) -> HeisenbergCheck:
    lhs = spin_variance(rho, triplet.n1) * spin_variance(rho, triplet.n2)
    rhs = 0.25 * spin_mean(rho, triplet.n3) ** 2
    return HeisenbergCheck(lhs, rhs, lhs >= rhs - 1e-10)


def _report(n_total, variance, mean, triplet) -> SqueezingReport:
    if abs(mean) <= MEAN_TOL:
        raise UndefinedSqueezingError(f"|<J_n3>| = {abs(mean):.3e} is below {MEAN_TOL}; squeezing undefined")
    xi2 = n_total * variance / mean ** 2
    return SqueezingReport(xi2, xi2 / n_total, triplet, mean, variance, n_total)


def squeezing_parameter(rho: FockDensityMatrix, triplet: DirectionTriplet) -> SqueezingReport:
    return _report(rho.n_total, spin_variance(rho, triplet.n2), spin_mean(rho, triplet.n3), triplet)


def dephasing_rotation(u, t: float, gamma: float) -> np.ndarray:
    """
    Rotation matrix [[c, s, 0], [-s, c, 0], [0, 0, 1]] with angle u sqrt(t gamma / 2).

    Vectorized over ``u``: the result has shape u.shape + (3, 3).
    """
    if t < 0 or gamma < 0:
        raise DomainError("t and gamma must be non-negative")
    ang = np.asarray(u, dtype=float) * np.sqrt(0.5 * t * gamma)
    c, s = np.cos(ang), np.sin(ang)
    r = np.zeros(ang.shape + (3, 3))
    r[..., 0, 0] = c
    r[..., 0, 1] = s
    r[..., 1, 0] = -s
    r[..., 1, 1] = c
    r[..., 2, 2] = 1.0
    return r


def _rotated(n, u, t, gamma):
    return np.einsum("...ij,j->...i", dephasing_rotation(u, t, gamma), n)


def evolved_spin_mean(rho0: FockDensityMatrix, n, gamma: float, t: float, nodes: int = DEFAULT_NODES) -> float:
    """E_u[Tr(rho0 J_{n(u,t)})]."""
    n = unit_vector(n)
    mean, _ = spin_moments(rho0)
    avg, _ = gaussian_average(lambda u: _rotated(n, u, t, gamma) @ mean, nodes=nodes)
    return float(avg)


def evolved_spin_variance(rho0: FockDensityMatrix, n, gamma: float, t: float, nodes: int = DEFAULT_NODES) -> float:
    """E_u[Tr(rho0 J^2_{n(u,t)})] - (E_u[Tr(rho0 J_{n(u,t)})])^2, clamped at zero."""
    n = unit_vector(n)
    mean, second = spin_moments(rho0)
    first, _ = gaussian_average(lambda u: _rotated(n, u, t, gamma) @ mean, nodes=nodes)

    def sq(u):
        v = _rotated(n, u, t, gamma)
        return np.einsum("...i,ij,...j->...", v, second, v)

    msq, _ = gaussian_average(sq, nodes=nodes)
    return float(max(msq - first * first, 0.0))


def evolved_moments(rho0: FockDensityMatrix, gamma: float, t: float, nodes: int = DEFAULT_NODES):
    """Dephased mean vector and second-moment matrix, E_u[R^T m] and E_u[R^T S R]."""
    mean, second = spin_moments(rho0)
    m_t, _ = gaussian_average(
        lambda u: np.einsum("...ji,j->...i", dephasing_rotation(u, t, gamma), mean), nodes=nodes
    )
    s_t, _ = gaussian_average(
        lambda u: np.einsum(
            "...ai,ab,...bj->...ij", dephasing_rotation(u, t, gamma), second, dephasing_rotation(u, t, gamma)
        ),
        nodes=nodes,
    )
    return m_t, 0.5 * (s_t + s_t.T)


def averaged_rotated_variance(rho0: FockDensityMatrix, n, gamma: float, t: float, nodes: int = DEFAULT_NODES) -> float:
    """E_u[Var_rho0(J_{n(u,t)})], the lower bound on the dephased variance from convexity."""
    n = unit_vector(n)
    mean, second = spin_moments(rho0)

    def var(u):
        v = _rotated(n, u, t, gamma)
        return np.einsum("...i,ij,...j->...", v, second, v) - (v @ mean) ** 2

    avg, _ = gaussian_average(var, nodes=nodes)
    return float(avg)


def convexity_bound_check(
    rho0: FockDensityMatrix,
    triplet: DirectionTriplet,
    gamma: float,
    t: float,
    nodes: int = DEFAULT_NODES,
    grid_resolution: int = 16,
    assume_premise: bool = False,
) -> BoundCheck:
    """
    N Var_t(J_n2) / <J_n3>_t^2 for the dephased state, which must stay >= 1
    whenever the initial state is unsqueezed along every direction pair.

    The premise is verified with :func:`min_squeezing_scan` unless
    ``assume_premise`` is set (callers sweeping many triplets check it once).
    """
    if not assume_premise:
        check_premise(rho0, grid_resolution)
    mean = evolved_spin_mean(rho0, triplet.n3, gamma, t, nodes)
    if abs(mean) <= MEAN_TOL:
        raise UndefinedSqueezingError(f"dephased |<J_n3>| = {abs(mean):.3e} vanishes at t={t}")
    var = evolved_spin_variance(rho0, triplet.n2, gamma, t, nodes)
    lhs = rho0.n_total * var / mean ** 2
    return BoundCheck(float(lhs), bool(lhs >= 1.0 - 1e-8))


# ---------------------------------------------------------------------------
# direction grids
# ---------------------------------------------------------------------------


def fibonacci_sphere(count: int) -> np.ndarray:
    """``count`` near-uniform unit vectors on the sphere (golden-angle spiral)."""
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    ang = np.pi * (3.0 - np.sqrt(5.0)) * i
    pts = np.column_stack([r * np.cos(ang), r * np.sin(ang), z])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def orthogonal_basis(n3) -> tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal (e1, e2) spanning the plane orthogonal to n3 with e1 x e2 = n3.

    e1 is Gram-Schmidt of the coordinate axis least aligned with n3.
    """
    n3 = np.asarray(n3, dtype=float)
    seed = AXES[np.argmin(np.abs(n3))]
    e1 = seed - (seed @ n3) * n3
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n3, e1)
    return e1, e2


def _plane_directions(n3, resolution):
    e1, e2 = orthogonal_basis(n3)
    ang = np.pi * np.arange(resolution) / resolution
    return np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2


def direction_triplets(resolution: int, angles: int = 1) -> list[DirectionTriplet]:
    """resolution^2 Fibonacci n3 directions, each with ``angles`` n2 choices in its orthogonal plane."""
    out = []
    for n3 in fibonacci_sphere(resolution * resolution):
        for n2 in _plane_directions(n3, angles):
            out.append(DirectionTriplet.from_n2_n3(n2, n3))
    return out


def min_squeezing_scan(rho: FockDensityMatrix, grid_resolution: int = 16) -> ScanResult:
    """
    Minimum of xi_W^2 over a direction grid.

    n3 runs over grid_resolution^2 Fibonacci points with |<J_n3>| > 1e-8, n2
    over grid_resolution angles in [0, pi) of the plane orthogonal to n3.
    """
    if grid_resolution < 8:
        raise DomainError(f"grid_resolution must be >= 8, got {grid_resolution}")
    mean, second = spin_moments(rho)
    cov = second - np.outer(mean, mean)
    n_total = rho.n_total
    best = np.inf
    best_pair = None
    for n3 in fibonacci_sphere(grid_resolution * grid_resolution):
        m3 = n3 @ mean
        if abs(m3) <= MEAN_TOL:
            continue
        n2s = _plane_directions(n3, grid_resolution)
        var = np.clip(np.einsum("ai,ij,aj->a", n2s, cov, n2s), 0.0, None)
        xi = n_total * var / m3 ** 2
        i = int(np.argmin(xi))
        if xi[i] < best:
            best = float(xi[i])
            best_pair = (n2s[i], n3)
    if best_pair is None:
        raise UndefinedSqueezingError("mean spin vanishes along every grid direction")
    return ScanResult(best, DirectionTriplet.from_n2_n3(*best_pair))


def check_premise(rho: FockDensityMatrix, grid_resolution: int = 16) -> ScanResult:
    """Raise PremiseError unless the scanned minimum of xi_W^2 is >= 1 - 1e-3."""
    scan = min_squeezing_scan(rho, grid_resolution)
    if scan.min_xi < 1.0 - PREMISE_TOL:
        raise PremiseError(
            f"initial state is squeezed: min xi_W^2 = {scan.min_xi:.6f} along n2={scan.argmin_triplet.n2}, "
            f"n3={scan.argmin_triplet.n3}"
        )
    return scan


def squeezing_sweep(
    rho0: FockDensityMatrix,
    triplets: Sequence[DirectionTriplet],
    gamma: float,
    times,
    nodes: int = DEFAULT_NODES,
    grid_resolution: int = 16,
) -> tuple[ScanResult, list[dict]]:
    """
    Evaluate the no-squeezing bound over ``times`` x ``triplets``.

    Each row carries ``xi_w_squared`` computed directly on the closed-form
    dephased state and ``bound_lhs`` from the quadrature moments; the two
    are independent paths to the same number. Triplets whose dephased mean
    along n3 vanishes are skipped.
    """
    from .dephasing import evolve_closed_form

    premise = check_premise(rho0, grid_resolution)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    states = evolve_closed_form(rho0, gamma, times).states
    n_total = rho0.n_total
    rows = []
    for t, rho_t in zip(times, states):
        m_direct, s_direct = spin_moments(rho_t)
        m_quad, s_quad = evolved_moments(rho0, gamma, float(t), nodes)
        for tr in triplets:
            mean_q = tr.n3 @ m_quad
            mean_d = tr.n3 @ m_direct
            if abs(mean_q) <= MEAN_TOL or abs(mean_d) <= MEAN_TOL:
                continue
            var_q = max(tr.n2 @ s_quad @ tr.n2 - (tr.n2 @ m_quad) ** 2, 0.0)
            var_d = max(tr.n2 @ s_direct @ tr.n2 - (tr.n2 @ m_direct) ** 2, 0.0)
            xi2 = n_total * var_d / mean_d ** 2
            rows.append(
                {
                    "t": float(t),
                    "xi_w_squared": float(xi2),
                    "delta_theta_squared": float(xi2 / n_total),
                    "bound_lhs": float(n_total * var_q / mean_q ** 2),
                    "n2": tr.n2,
                    "n3": tr.n3,
                }
            )
    return premise, rows
