"""Normalized overlap (Gram) matrices and their entanglement spectra."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .coherent import AlphaSeries, ToleranceConfig
from .errors import DataError, EmptySeries, IndefiniteMatrix, NonFiniteInput

EPS = np.finfo(np.float64).eps
JACOBI_MAX_N = 32


@dataclass(frozen=True)
class OverlapMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise EmptySeries("overlap matrix must be square and non-empty")
        if not np.all(np.isfinite(m)):
            raise NonFiniteInput("overlap matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Descending eigenvalues summing to one, with numerical rank."""

    lambdas: np.ndarray
    rank: int

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=np.float64)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def from_values(cls, values, atol: float = 1e-10) -> "EntanglementSpectrum":
        """Build from an arbitrary probability vector (sorted here)."""
        lam = np.sort(np.asarray(values, dtype=np.float64).ravel())[::-1]
        if lam.size == 0:
            raise EmptySeries("spectrum is empty")
        if lam[-1] < -atol:
            raise DataError("spectrum has negative weights")
        if abs(lam.sum() - 1.0) > atol:
            raise DataError(f"spectrum sums to {lam.sum()!r}, not 1")
        lam = np.clip(lam, 0.0, None)
        rank = int(np.count_nonzero(lam > lam.size * EPS * lam[0]))
        return cls(lam, max(rank, 1))

    def __len__(self):
        return self.lambdas.shape[0]

    def __iter__(self):
        return iter(self.lambdas)


@dataclass(frozen=True)
class SchmidtClockBasis:
    weights: EntanglementSpectrum
    vectors: np.ndarray  # shape (N, rank); column k pairs with weights.lambdas[k]


def _alphas_of(alphas) -> np.ndarray:
    if isinstance(alphas, AlphaSeries):
        return alphas.alphas
    return AlphaSeries(np.asarray(alphas, dtype=np.float64), 1.0).alphas


def build_overlap_matrix(alphas) -> OverlapMatrix:
    """Entry (n, m) is exp(-(a_n - a_m)**2 / 2) / N."""
    return OverlapMatrix(kernels.overlap_matrix(_alphas_of(alphas)))


def eigh(matrix: np.ndarray, vectors: bool = True):
    """Symmetric eigendecomposition; Jacobi for small N, tridiagonal QL above."""
    if matrix.shape[0] <= JACOBI_MAX_N:
        return kernels.jacobi_eigh(matrix, vectors)
    return kernels.tridiag_ql_eigh(matrix, vectors)


# Indirection point so diagnostics can substitute a faulty solver.
_eigh = eigh


def _as_matrix(O) -> np.ndarray:
    return O.entries if isinstance(O, OverlapMatrix) else OverlapMatrix(O).entries


def _clamped(w: np.ndarray, tol: ToleranceConfig) -> tuple[np.ndarray, np.ndarray, int]:
    n = w.shape[0]
    order = np.argsort(w, kind="stable")[::-1]
    w = w[order]
    lam_max = max(w[0], 0.0)
    floor = tol.clamp_factor * n * EPS * lam_max
    if w[-1] < -floor:
        raise IndefiniteMatrix(
            f"eigenvalue {w[-1]:.3e} below clamping window -{floor:.3e}"
        )
    # values at or below the rank threshold are numerical zeros
    cut = n * EPS * lam_max
    w = np.where(w > cut, w, 0.0)
    total = w.sum()
    if not total > 0:
        raise IndefiniteMatrix("matrix has no positive eigenvalue")
    w = w / total  # the trace is 1 by construction; drop solver drift
    rank = int(np.count_nonzero(w))
    return w, order, max(rank, 1)


def spectrum(O, tol: ToleranceConfig | None = None) -> EntanglementSpectrum:
    tol = tol or ToleranceConfig()
    w, _ = _eigh(_as_matrix(O), False)
    lam, _, rank = _clamped(np.asarray(w, dtype=np.float64), tol)
    return EntanglementSpectrum(lam, rank)


def purity(O) -> float:
    """Tr O**2, the sum of squared entries of the symmetric matrix."""
    m = _as_matrix(O)
    return float(np.sum(m * m))


def purity_from_alphas(alphas) -> float:
    """Tr O**2 straight from amplitudes, without forming the matrix."""
    return float(kernels.purity(_alphas_of(alphas)))


def prefix_purities(alphas) -> np.ndarray:
    """Tr O_N**2 for every prefix N = 1..len, by the running-sum update."""
    return np.asarray(kernels.prefix_purity(_alphas_of(alphas)))


def schmidt_clock_basis(O, tol: ToleranceConfig | None = None) -> SchmidtClockBasis:
    tol = tol or ToleranceConfig()
    w, v = _eigh(_as_matrix(O), True)
    lam, order, rank = _clamped(np.asarray(w, dtype=np.float64), tol)
    vecs = np.array(v[:, order[:rank]], dtype=np.float64)
    for k in range(rank):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            vecs[:, k] = -col
    return SchmidtClockBasis(EntanglementSpectrum(lam, rank), vecs)
