"""
Negativity of fixed-N two-mode states.

Two independent routes are provided. :func:`negativity_trace_norm` builds the
partial transpose explicitly on the (N+1)^2 grid of independent mode
occupations and sums its singular values. :func:`negativity_closed_form`
sums the moduli of the off-diagonal Fock-basis entries. The two agree for
every state of the sector, so negativity vanishes exactly on Fock-diagonal
(separable) states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .fock import FockDensityMatrix, _as_bipartition, _binomial_row, _check_n_total, change_bipartition

__all__ = [
    "ExtendedOperator",
    "NegativityResult",
    "partial_transpose",
    "negativity_trace_norm",
    "negativity_closed_form",
    "coherent_negativity",
    "is_separable",
    "negativity",
]

CLAMP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ExtendedOperator:
    """
    Operator on span{|m, n>: 0 <= m, n <= N} with independent occupations.

    Flat index of |m, n> is ``m * (N + 1) + n``.
    """

    n_total: int
    entries: np.ndarray

    def __post_init__(self):
        d = (self.n_total + 1) ** 2
        if self.entries.shape != (d, d):
            raise ValueError(f"extended operator must be {d}x{d}, got {self.entries.shape}")

    def index(self, m: int, n: int) -> int:
        return m * (self.n_total + 1) + n

    def element(self, row: tuple[int, int], col: tuple[int, int]) -> complex:
        return complex(self.entries[self.index(*row), self.index(*col)])

    def trace(self) -> complex:
        return complex(np.trace(self.entries))


@dataclass(frozen=True)
class NegativityResult:
    value: float
    bipartition_tag: str
    method: str
    raw: float

    def __float__(self):
        return self.value


def _clamped(raw: float) -> float:
    return 0.0 if abs(raw) <= CLAMP_TOL else raw


def partial_transpose(rho: FockDensityMatrix) -> ExtendedOperator:
    """
    Transpose with respect to the first mode.

    rho_{kl} |k, N-k><l, N-l| becomes rho_{kl} |l, N-k><k, N-l|, which leaves
    the fixed-N sector for k != l.
    """
    n = rho.n_total
    dim = n + 1
    k, l = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    rows = l * dim + (n - k)
    cols = k * dim + (n - l)
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    out[rows.ravel(), cols.ravel()] = rho.entries.ravel()
    return ExtendedOperator(n, out)


def negativity_trace_norm(rho: FockDensityMatrix) -> NegativityResult:
    """Trace norm of the partial transpose minus one."""
    pt = partial_transpose(rho)
    try:
        sv = np.linalg.svd(pt.entries, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular value decomposition failed: {exc}") from exc
    if not np.all(np.isfinite(sv)):
        raise NumericError("singular values contain non-finite entries")
    raw = float(np.sum(sv) - 1.0)
    return NegativityResult(_clamped(raw), rho.bipartition_tag, "trace_norm", raw)


def negativity_closed_form(rho: FockDensityMatrix) -> NegativityResult:
    """Sum of |rho_{kl}| over k != l."""
    a = np.abs(rho.entries)
    raw = float(a.sum() - np.trace(a))
    return NegativityResult(_clamped(raw), rho.bipartition_tag, "closed_form", raw)


def coherent_negativity(xi: float, n_total: int) -> float:
    """
    Negativity of the discrete coherent state |xi, phi>, independent of phi:

        sum_{k != l} sqrt(C(N,k) C(N,l)) xi^((k+l)/2) (1-xi)^(N-(k+l)/2)
    """
    n = _check_n_total(n_total)
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi must lie in [0, 1], got {xi!r}")
    c = _binomial_row(n)
    total = 0.0
    for k in range(n + 1):
        for l in range(n + 1):
            if k != l:
                s = 0.5 * (k + l)
                total += np.sqrt(c[k] * c[l]) * xi ** s * (1.0 - xi) ** (n - s)
    return float(total)


def is_separable(rho: FockDensityMatrix, tol: float = 1e-10) -> bool:
    """
    True iff every off-diagonal entry has modulus <= tol.

    Equivalently, sufficient for ``negativity_closed_form <= tol * N (N + 1)``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    off = rho.entries - np.diag(np.diag(rho.entries))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


def negativity(rho: FockDensityMatrix, bipartition=None, method: str = "closed_form") -> NegativityResult:
    """Negativity relative to ``bipartition`` (default: the state's own)."""
    if bipartition is not None:
        rho = change_bipartition(rho, _as_bipartition(bipartition))
    if method == "closed_form":
        return negativity_closed_form(rho)
    if method == "trace_norm":
        return negativity_trace_norm(rho)
    raise DomainError(f"unknown negativity method {method!r}")
