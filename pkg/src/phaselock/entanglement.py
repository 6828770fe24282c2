"""Entanglement diagnostics for the two-qudit channel.

Phase locking drives every state into the span of ``|i> (x) |i - Gamma>``.
Whether the resulting state is entangled depends on which coherences
survive inside that span; negativity of the partial transpose is the test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classical import ModelParams, delta_map, lock_time
from .state import STRUCT_TOL, DensityMatrix, eigvals_hermitian, partial_transpose_second

__all__ = [
    "ENTANGLED_THRESHOLD",
    "SubspaceProjector",
    "CoherenceReport",
    "phase_locked_projector",
    "subspace_weight",
    "negativity",
    "is_entangled",
    "predicted_coherence",
    "asymptotic_lock_step",
    "verify_asymptotic_coherence",
]

ENTANGLED_THRESHOLD = 1e-8


@dataclass(frozen=True)
class SubspaceProjector:
    matrix: np.ndarray
    gamma: int

    @property
    def d(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))


@dataclass(frozen=True)
class CoherenceReport:
    max_deviation: float
    predicted: np.ndarray
    observed: np.ndarray


def phase_locked_projector(d: int, gamma: int) -> SubspaceProjector:
    if not 0 <= gamma < d:
        raise ValueError(f"gamma must lie in [0, d), got {gamma}")
    i = np.arange(d)
    idx = i * d + (i - gamma) % d
    m = np.zeros((d * d, d * d), dtype=complex)
    m[idx, idx] = 1.0
    return SubspaceProjector(m, gamma)


def subspace_weight(rho: DensityMatrix, proj: SubspaceProjector) -> float:
    """``Tr(P rho P)``, the population inside the locked subspace."""
    p = proj.matrix
    return float(np.real(np.einsum("ij,ji->", p, rho.matrix)))


def negativity(rho: DensityMatrix) -> float:
    """Sum of the magnitudes of the negative eigenvalues of ``rho^T_O``."""
    spectrum = eigvals_hermitian(partial_transpose_second(rho))
    return max(0.0, float(-spectrum[spectrum < 0].sum()))


def is_entangled(rho: DensityMatrix, threshold: float = ENTANGLED_THRESHOLD) -> bool:
    return negativity(rho) > threshold


def _check_amplitudes(name: str, v: Sequence[complex], d: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (d,):
        raise ValueError(f"{name} must have length {d}, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > STRUCT_TOL:
        raise ValueError(f"{name} is not normalized")
    return v


def predicted_coherence(
    alpha: Sequence[complex], beta: Sequence[complex], i: int, i_prime: int, d: int
) -> complex:
    """Asymptotic coherence between the locked images of stimulus labels ``i`` and ``i_prime``.

    Only initial terms sharing a phase difference keep their relative
    phase, so the element is ``alpha_i conj(alpha_i') * sum_k beta_{i-k} conj(beta_{i'-k})``.
    """
    a = _check_amplitudes("alpha", alpha, d)
    b = _check_amplitudes("beta", beta, d)
    k = np.arange(d)
    overlap = np.sum(b[(i - k) % d] * np.conj(b[(i_prime - k) % d]))
    return complex(a[i % d] * np.conj(a[i_prime % d]) * overlap)


def asymptotic_lock_step(params: ModelParams) -> int:
    """Smallest ``t`` at which every initial phase difference sits at ``Gamma``.

    Raises ``ValueError`` if some phase difference never reaches ``Gamma``
    (detuning outside the entrainment range, or ``Gamma = 0`` with ``K > 0``).
    """
    gamma = params.gamma
    worst = 0
    for delta0 in range(params.d):
        tau = lock_time(delta0, params)
        if tau is None:
            raise ValueError("detuning lies outside the entrainment range; no lock")
        # at a fixed point delta[tau] is the fixed value itself
        delta = delta0
        for _ in range(tau):
            delta = delta_map(delta, params)
        if delta != gamma:
            raise ValueError(f"phase difference {delta0} locks at {delta}, not at Gamma={gamma}")
        worst = max(worst, tau)
    return worst


def verify_asymptotic_coherence(
    rho_asymptotic: DensityMatrix,
    alpha: Sequence[complex],
    beta: Sequence[complex],
    params: ModelParams,
    t: int,
) -> CoherenceReport:
    """Compare locked-subspace matrix elements of ``rho_t`` with the prediction."""
    d, gamma, Omega = params.d, params.gamma, params.Omega
    tau = asymptotic_lock_step(params)
    if t < tau:
        raise ValueError(f"state at t={t} is not yet locked (all terms lock by t={tau})")
    if rho_asymptotic.factor_dims != (d, d):
        raise ValueError(f"expected factor_dims ({d}, {d}), got {rho_asymptotic.factor_dims}")

    predicted = np.empty((d, d), dtype=complex)
    for i in range(d):
        for ip in range(d):
            predicted[i, ip] = predicted_coherence(alpha, beta, i, ip, d)

    theta = (np.arange(d) + Omega * t) % d
    idx = theta * d + (theta - gamma) % d
    observed = rho_asymptotic.matrix[np.ix_(idx, idx)]
    return CoherenceReport(float(np.max(np.abs(observed - predicted))), predicted, observed)
