"""
Fixed-N two-mode bosonic states and operators.

States live in the (N+1)-dimensional sector spanned by

    |k, N-k> = (a^dag)^k (b^dag)^(N-k) / sqrt(k! (N-k)!) |0>,   0 <= k <= N,

indexed by the first-mode occupation ``k`` in ascending order. A
:class:`ModeBipartition` records which pair of modes the basis refers to;
the reference pair (a, b) is the "spatial" bipartition and the balanced
beam-splitter modes c = (a+b)/sqrt(2), d = (a-b)/sqrt(2) are the "energy"
bipartition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .errors import DomainError, InvalidBipartitionError, InvalidLabelError, InvariantError

__all__ = [
    "HERMITIAN_TOL",
    "TRACE_TOL",
    "PSD_TOL",
    "FockLabel",
    "PureState",
    "FockDensityMatrix",
    "ModeBipartition",
    "SPATIAL",
    "ENERGY",
    "CollectiveSpinOps",
    "binomial",
    "fock_state",
    "coherent_state",
    "maximally_mixed",
    "spin_ops",
    "bipartition_unitary",
    "change_bipartition",
    "rotation_unitary",
    "rotate_state",
    "unit_vector",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12
AXIS_TOL = 1e-12

_EXACT_BINOMIAL_MAX = 60
_EXPANSION_MAX_N = 30


def _check_n_total(n_total) -> int:
    if isinstance(n_total, bool) or not isinstance(n_total, (int, np.integer)):
        raise InvalidLabelError(f"n_total must be an integer, got {n_total!r}")
    if n_total < 1:
        raise InvalidLabelError(f"n_total must be >= 1, got {n_total}")
    return int(n_total)


def binomial(n: int, k: int) -> float:
    """Binomial coefficient as a float; exact integers up to n = 60, log-gamma above."""
    if k < 0 or k > n:
        return 0.0
    if n <= _EXACT_BINOMIAL_MAX:
        return float(math.comb(n, k))
    return float(np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))


@lru_cache(maxsize=None)
def _binomial_row(n: int) -> np.ndarray:
    row = np.array([binomial(n, k) for k in range(n + 1)])
    row.setflags(write=False)
    return row


def unit_vector(n, name: str = "axis") -> np.ndarray:
    """Return ``n`` as a float array, raising DomainError unless it is a unit 3-vector."""
    v = np.asarray(n, dtype=float)
    if v.shape != (3,):
        raise DomainError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > AXIS_TOL:
        raise DomainError(f"{name} must be normalized within {AXIS_TOL}, |{name}| = {np.linalg.norm(v)!r}")
    return v


@dataclass(frozen=True)
class FockLabel:
    """Basis label |k, n_total - k>; the second occupation is derived, never stored."""

    k: int
    n_total: int

    def __post_init__(self):
        _check_n_total(self.n_total)
        if not 0 <= self.k <= self.n_total:
            raise InvalidLabelError(f"occupation k={self.k} outside [0, {self.n_total}]")

    @property
    def second(self) -> int:
        return self.n_total - self.k


# ---------------------------------------------------------------------------
# bipartitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModeBipartition:
    """
    Passive two-mode transformation defining a bipartition.

    ``mixing`` maps the reference annihilation operators to the new ones,
    ``(c, d)^T = mixing @ (a, b)^T``.
    """

    mixing: np.ndarray
    name: str | None = None

    def __post_init__(self):
        m = np.array(self.mixing, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidBipartitionError(f"mixing must be 2x2, got shape {m.shape}")
        if np.max(np.abs(m @ m.conj().T - np.eye(2))) > UNITARY_TOL:
            raise InvalidBipartitionError("mixing matrix is not unitary within 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "mixing", m)

    @property
    def tag(self) -> str:
        return self.name if self.name is not None else "custom"

    @property
    def is_reference(self) -> bool:
        return bool(np.max(np.abs(self.mixing - np.eye(2))) <= UNITARY_TOL)

    def same_as(self, other: "ModeBipartition") -> bool:
        return bool(np.max(np.abs(self.mixing - other.mixing)) <= UNITARY_TOL)

    @classmethod
    def from_name(cls, name: str) -> "ModeBipartition":
        try:
            return _PRESETS[name]
        except KeyError:
            raise InvalidBipartitionError(
                f"unknown bipartition preset {name!r}; expected one of {sorted(_PRESETS)}"
            ) from None

    def __repr__(self):
        if self.name is not None:
            return f"ModeBipartition({self.name!r})"
        return f"ModeBipartition(mixing={self.mixing.tolist()!r})"


SPATIAL = ModeBipartition(np.eye(2), "spatial")
ENERGY = ModeBipartition(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0), "energy")
_PRESETS = {"spatial": SPATIAL, "energy": ENERGY}


def _as_bipartition(bp) -> ModeBipartition:
    if isinstance(bp, ModeBipartition):
        return bp
    if isinstance(bp, str):
        return ModeBipartition.from_name(bp)
    return ModeBipartition(bp)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over |k, N-k>, k = 0..N."""

    n_total: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = _check_n_total(self.n_total)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (n + 1,):
            raise InvalidLabelError(f"expected {n + 1} amplitudes, got shape {amps.shape}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise InvariantError(f"amplitudes not normalized: norm = {np.linalg.norm(amps)!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, n_total: int, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(n_total, amps / norm)

    def density_matrix(self, bipartition=None) -> "FockDensityMatrix":
        bp = SPATIAL if bipartition is None else _as_bipartition(bipartition)
        return FockDensityMatrix(self.n_total, np.outer(self.amplitudes, self.amplitudes.conj()), bp)


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """
    Density matrix on the fixed-N sector.

    ``entries[k, l]`` is <k, N-k| rho |l, N-l> in the Fock basis of
    ``bipartition``. Construction validates Hermiticity (1e-12), unit trace
    (1e-12) and positivity (smallest eigenvalue >= -1e-10).
    """

    n_total: int
    entries: np.ndarray
    bipartition: ModeBipartition = field(default=SPATIAL)

    def __post_init__(self):
        n = _check_n_total(self.n_total)
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (n + 1, n + 1):
            raise InvariantError(f"entries must be {(n + 1, n + 1)}, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvariantError("entries contain non-finite values")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvariantError(f"density matrix not Hermitian (max deviation {herm:.3e})")
        trace = np.trace(rho)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvariantError(f"density matrix trace {trace!r} differs from 1")
        min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if min_eig < -PSD_TOL:
            raise InvariantError(f"density matrix not positive semidefinite (min eigenvalue {min_eig:.3e})")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "bipartition", _as_bipartition(self.bipartition))

    @property
    def bipartition_tag(self) -> str:
        return self.bipartition.tag

    @property
    def dim(self) -> int:
        return self.n_total + 1

    def with_entries(self, entries, bipartition=None) -> "FockDensityMatrix":
        """New state with the same N; ``entries`` are Hermitized before validation."""
        m = np.asarray(entries, dtype=complex)
        bp = self.bipartition if bipartition is None else bipartition
        return FockDensityMatrix(self.n_total, 0.5 * (m + m.conj().T), bp)


def fock_state(k: int, n_total: int) -> PureState:
    """Number state |k, N-k>."""
    label = FockLabel(k, n_total)
    amps = np.zeros(label.n_total + 1, dtype=complex)
    amps[label.k] = 1.0
    return PureState(label.n_total, amps)


def coherent_state(xi: float, phi: float, n_total: int) -> PureState:
    """
    Discrete coherent state with every boson in the single-particle state
    (sqrt(xi) e^{-i phi/2}, sqrt(1-xi) e^{+i phi/2}).

    Amplitudes are sqrt(C(N,k)) xi^(k/2) (1-xi)^((N-k)/2) exp(-ik phi + iN phi/2);
    the global phase is kept so amplitudes can be compared entrywise.
    """
    n = _check_n_total(n_total)
    if not (0.0 <= xi <= 1.0):
        raise DomainError(f"xi must lie in [0, 1], got {xi!r}")
    k = np.arange(n + 1)
    with np.errstate(divide="ignore"):
        log_mag = 0.5 * np.log(_binomial_row(n))
        log_mag = log_mag + np.where(k > 0, 0.5 * k * np.log(xi) if xi > 0 else -np.inf, 0.0)
        log_mag = log_mag + np.where(n - k > 0, 0.5 * (n - k) * np.log1p(-xi) if xi < 1 else -np.inf, 0.0)
    amps = np.exp(log_mag) * np.exp(-1j * k * phi + 0.5j * n * phi)
    # rounding only; the exact vector is normalized
    return PureState(n, amps / np.linalg.norm(amps))


def maximally_mixed(n_total: int, bipartition=None) -> FockDensityMatrix:
    n = _check_n_total(n_total)
    bp = SPATIAL if bipartition is None else _as_bipartition(bipartition)
    return FockDensityMatrix(n, np.eye(n + 1) / (n + 1), bp)


# ---------------------------------------------------------------------------
# collective spin
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CollectiveSpinOps:
    """Schwinger-boson spin operators on the fixed-N sector, spatial Fock basis."""

    n_total: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        """Stacked (3, N+1, N+1) array (jx, jy, jz)."""
        return np.stack([self.jx, self.jy, self.jz])

    def along(self, n) -> np.ndarray:
        """Directional component n . J for a unit 3-vector n."""
        n = unit_vector(n)
        return n[0] * self.jx + n[1] * self.jy + n[2] * self.jz


@lru_cache(maxsize=64)
def spin_ops(n_total: int) -> CollectiveSpinOps:
    """
    J_x = (a^dag b + a b^dag)/2, J_y = (a^dag b - a b^dag)/(2i), J_z = (a^dag a - b^dag b)/2.

    a^dag b raises k by one with matrix element sqrt((k+1)(N-k)).
    """
    n = _check_n_total(n_total)
    k = np.arange(n)
    raise_amp = np.sqrt((k + 1.0) * (n - k))
    a_dag_b = np.zeros((n + 1, n + 1), dtype=complex)
    a_dag_b[k + 1, k] = raise_amp
    jx = 0.5 * (a_dag_b + a_dag_b.conj().T)
    jy = (a_dag_b - a_dag_b.conj().T) / 2j
    jz = np.diag(np.arange(n + 1) - 0.5 * n).astype(complex)
    for m in (jx, jy, jz):
        m.setflags(write=False)
    return CollectiveSpinOps(n, jx, jy, jz)


# ---------------------------------------------------------------------------
# basis changes and rotations
# ---------------------------------------------------------------------------


def _reference_unitary(bp: ModeBipartition, n: int) -> np.ndarray:
    """U[m, k] = <m, N-m|_new |k, N-k>_ref for the mixing of ``bp``."""
    m00, m01 = bp.mixing[0]
    m10, m11 = bp.mixing[1]
    # a^dag = m00 c^dag + m10 d^dag,  b^dag = m01 c^dag + m11 d^dag  (inverse of a unitary mixing)
    binom_n = _binomial_row(n)
    u = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        i = np.arange(k + 1)
        poly_a = _binomial_row(k) * m00 ** i * m10 ** (k - i)
        j = np.arange(n - k + 1)
        poly_b = _binomial_row(n - k) * m01 ** j * m11 ** (n - k - j)
        coeff = np.convolve(poly_a, poly_b)
        u[:, k] = coeff * np.sqrt(binom_n[k] / binom_n)
    return u


def _lifted_unitary(bp: ModeBipartition, n: int) -> np.ndarray:
    """
    Same matrix as :func:`_reference_unitary`, as the symmetric N-th power of
    the single-particle overlap u1 = exp(iK): U = exp(i dGamma(K)).

    The monomial expansion cancels terms of size ~C(N, k) and loses all
    accuracy by N ~ 80; this route stays unitary to round-off.
    """
    u1 = _reference_unitary(bp, 1)
    t, z = scipy.linalg.schur(u1, output="complex")
    gen1 = z @ np.diag(np.angle(np.diag(t))) @ z.conj().T
    k = np.arange(n + 1)
    # sector index 0 of u1 is the b-occupied state, index 1 the a-occupied one
    a_dag_b = np.zeros((n + 1, n + 1), dtype=complex)
    a_dag_b[k[:-1] + 1, k[:-1]] = np.sqrt((k[:-1] + 1.0) * (n - k[:-1]))
    gen = (
        gen1[1, 1] * np.diag(k).astype(complex)
        + gen1[0, 0] * np.diag(n - k).astype(complex)
        + gen1[1, 0] * a_dag_b
        + gen1[0, 1] * a_dag_b.conj().T
    )
    evals, evecs = np.linalg.eigh(0.5 * (gen + gen.conj().T))
    return (evecs * np.exp(1j * evals)) @ evecs.conj().T


def bipartition_unitary(bp, n_total: int) -> np.ndarray:
    """
    Representation of a passive mode transform on the fixed-N sector.

    Returns U with U[m, k] the overlap of the m-th Fock state of the new
    modes with the k-th Fock state of the reference (spatial) modes, so
    that ``U @ amplitudes`` re-expresses a reference-basis vector in the
    new basis. For N <= 30 columns are built by exact binomial expansion of
    (a^dag)^k (b^dag)^(N-k) in the new creation operators; larger N uses the
    exponentiated one-body generator, which avoids the expansion's
    cancellation.
    """
    bp = _as_bipartition(bp)
    n = _check_n_total(n_total)
    u = _reference_unitary(bp, n) if n <= _EXPANSION_MAX_N else _lifted_unitary(bp, n)
    dev = np.max(np.abs(u @ u.conj().T - np.eye(n + 1)))
    if dev > 1e-10:
        raise InvalidBipartitionError(f"sector representation not unitary (deviation {dev:.3e})")
    return u


def change_bipartition(rho: FockDensityMatrix, bp) -> FockDensityMatrix:
    """Re-express ``rho`` in the Fock basis of bipartition ``bp``."""
    bp = _as_bipartition(bp)
    if rho.bipartition.same_as(bp):
        return FockDensityMatrix(rho.n_total, rho.entries, bp)
    n = rho.n_total
    u = bipartition_unitary(bp, n)
    if not rho.bipartition.is_reference:
        u = u @ bipartition_unitary(rho.bipartition, n).conj().T
    return rho.with_entries(u @ rho.entries @ u.conj().T, bp)


def _spin_eigensystem(n_total: int, axis: np.ndarray):
    gen = spin_ops(n_total).along(axis)
    return np.linalg.eigh(gen)


def rotation_unitary(n_total: int, axis, theta) -> np.ndarray:
    """
    exp(-i theta J_axis) via eigendecomposition of the Hermitian generator.

    ``theta`` may be an array, in which case the result is stacked along a
    leading axis.
    """
    axis = unit_vector(axis)
    evals, evecs = _spin_eigensystem(_check_n_total(n_total), axis)
    theta = np.asarray(theta, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(theta, evals))
    return np.einsum("ij,...j,kj->...ik", evecs, phases, evecs.conj())


def rotate_state(rho: FockDensityMatrix, axis, theta: float) -> FockDensityMatrix:
    """
    exp(-i theta J_n) rho exp(+i theta J_n).

    J_n is the physical collective spin of the reference modes; for a state
    stored in another bipartition it is carried into that basis first.
    """
    axis = unit_vector(axis)
    u = rotation_unitary(rho.n_total, axis, theta)
    if not rho.bipartition.is_reference:
        w = bipartition_unitary(rho.bipartition, rho.n_total)
        u = w @ u @ w.conj().T
    return rho.with_entries(u @ rho.entries @ u.conj().T)
