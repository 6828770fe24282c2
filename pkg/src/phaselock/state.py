"""Dense complex linear algebra for small multipartite systems.

Matrices are plain ``numpy`` arrays. ``DensityMatrix`` attaches the tensor
factor dimensions needed by partial operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "STRUCT_TOL",
    "SPECTRAL_TOL",
    "DensityMatrix",
    "PureState",
    "kron",
    "check_density",
    "partial_trace_last",
    "partial_transpose_second",
    "eigvals_hermitian",
    "purity",
]

STRUCT_TOL = 1e-10
SPECTRAL_TOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    factor_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(x) for x in self.factor_dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if int(np.prod(dims)) != m.shape[0]:
            raise ValueError(f"factor_dims {dims} do not multiply to {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi: "PureState | np.ndarray", factor_dims: Sequence[int]) -> "DensityMatrix":
        amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
        return cls(np.outer(amps, amps.conj()), tuple(factor_dims))

    def validate(self, tol: float = STRUCT_TOL) -> "DensityMatrix":
        check_density(self.matrix, tol)
        return self


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex] | np.ndarray) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(a)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a / norm)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product; entry ``(i*rb + k, j*cb + l)`` is ``a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a), np.asarray(b))


def check_density(m: np.ndarray, tol: float = STRUCT_TOL) -> None:
    """Raise ``ValueError`` unless ``m`` is Hermitian, unit trace and PSD."""
    m = np.asarray(m)
    herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if herm > tol:
        raise ValueError(f"not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"trace is {tr.real:.12g}, expected 1")
    lo = eigvals_hermitian(m)[0]
    if lo < -tol:
        raise ValueError(f"negative eigenvalue {lo:.3e}")


def partial_trace_last(rho: DensityMatrix) -> DensityMatrix:
    """Trace out the final tensor factor."""
    dims = rho.factor_dims
    if len(dims) < 2:
        raise ValueError("partial trace needs at least two tensor factors")
    keep = int(np.prod(dims[:-1]))
    last = dims[-1]
    r = rho.matrix.reshape(keep, last, keep, last)
    return DensityMatrix(np.einsum("iaja->ij", r), dims[:-1])


def partial_transpose_second(rho: DensityMatrix) -> np.ndarray:
    """Transpose the second factor of a bipartite operator.

    ``<i,j| rho^T |k,l> = <i,l| rho |k,j>``.
    """
    if len(rho.factor_dims) != 2:
        raise ValueError(f"expected two tensor factors, got {rho.factor_dims}")
    da, db = rho.factor_dims
    r = rho.matrix.reshape(da, db, da, db)
    return r.transpose(0, 3, 2, 1).reshape(da * db, da * db)


def eigvals_hermitian(m: np.ndarray) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix (LAPACK ``heevd``)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.conj().T)) > SPECTRAL_TOL:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(m)


def purity(rho: DensityMatrix | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.vdot(m, m).real)
