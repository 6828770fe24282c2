"""Dissipative two-qudit phase-locking channel.

One step couples stimulus and oscillator to a ``(d+1)``-level ancilla
prepared in the reset label ``0bar``, applies the locking isometry, runs
the free rotations and discards the ancilla. The isometry records the
phase difference in the ancilla whenever the oscillator was pulled, which
is what makes the map irreversible.

Basis ordering: system index ``theta*d + phi``; system-ancilla index
``(theta*d + phi)*(d+1) + a`` with ``a = 0`` the reset label and
``a = 1 + k`` the label ``|k>``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .classical import ModelParams, circular_membership
from .state import STRUCT_TOL, DensityMatrix, partial_trace_last, purity
from .trajectory import Trajectory

__all__ = [
    "DEFAULT_MAX_D",
    "ResourceLimitError",
    "ChannelParams",
    "PhaseOperators",
    "KrausFamily",
    "check_dimension",
    "build_phase_ops",
    "build_shift",
    "build_vk_isometry",
    "kraus_from_isometry",
    "channel_kraus",
    "apply_kraus",
    "step_channel",
    "step_dilated",
    "iterate_channel",
    "expectations",
    "phase_distributions",
    "embed_classical",
    "product_state",
    "run_channel",
]

DEFAULT_MAX_D = 32

ChannelParams = ModelParams


class ResourceLimitError(ValueError):
    """Requested dimension exceeds the dense-storage cap."""


def check_dimension(d: int, max_d: int = DEFAULT_MAX_D) -> None:
    if max_d > DEFAULT_MAX_D:
        warnings.warn(
            f"dimension cap raised to {max_d}; dense channel storage grows as d**5",
            ResourceWarning,
            stacklevel=2,
        )
    if d > max_d:
        raise ResourceLimitError(f"d={d} exceeds the two-qudit dimension cap {max_d}")


@dataclass(frozen=True)
class PhaseOperators:
    theta_op: np.ndarray
    phi_op: np.ndarray


@dataclass
class KrausFamily:
    """Kraus operators indexed by ancilla label.

    ``labels[0]`` is ``"0bar"``; ``labels[1 + k]`` is ``k``. Zero operators
    are kept so that the index always equals the ancilla label.
    """

    operators: list[np.ndarray]
    labels: list[object]
    # per operator: (rows, cols, values) if it is a partial monomial matrix
    _plan: list[Optional[tuple[np.ndarray, np.ndarray, np.ndarray]]] = field(
        init=False, repr=False, default_factory=list
    )
    _flat: list[Optional[tuple[np.ndarray, np.ndarray, np.ndarray]]] = field(
        init=False, repr=False, default_factory=list
    )

    def __post_init__(self) -> None:
        if len(self.operators) != len(self.labels):
            raise ValueError("operators and labels differ in length")
        self._plan = [_monomial_plan(k) for k in self.operators]
        n = self.dim
        # flat (target, source, coefficient) triples for K m K^dag on monomial K
        self._flat = [
            None if plan is None else (
                (plan[0][:, None] * n + plan[0][None, :]).ravel(),
                (plan[1][:, None] * n + plan[1][None, :]).ravel(),
                (plan[2][:, None] * plan[2].conj()[None, :]).ravel(),
            )
            for plan in self._plan
        ]

    @property
    def dim(self) -> int:
        return self.operators[0].shape[1]

    def completeness_defect(self) -> float:
        """``max |sum_a K_a^dag K_a - I|``."""
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for op, plan in zip(self.operators, self._plan):
            if plan is None:
                acc += op.conj().T @ op
            else:
                _, cols, vals = plan
                acc[cols, cols] += np.abs(vals) ** 2
        return float(np.max(np.abs(acc - np.eye(self.dim))))

    def nonzero_labels(self) -> list[object]:
        return [lab for lab, op in zip(self.labels, self.operators) if np.any(op)]


def _monomial_plan(op: np.ndarray):
    rows, cols = np.nonzero(op)
    if len(np.unique(cols)) != len(cols) or len(np.unique(rows)) != len(rows):
        return None
    return rows, cols, op[rows, cols]


def build_phase_ops(d: int) -> PhaseOperators:
    if d < 2:
        raise ValueError(f"d: must be >= 2, got {d}")
    levels = np.arange(d, dtype=float)
    ones = np.ones(d)
    return PhaseOperators(
        np.diag(np.kron(levels, ones)).astype(complex),
        np.diag(np.kron(ones, levels)).astype(complex),
    )


def build_shift(d: int, k: int) -> np.ndarray:
    """Cyclic shift ``|i> -> |(i + k) mod d>``."""
    if not 0 <= k < d:
        raise ValueError(f"shift must lie in [0, d), got {k}")
    m = np.zeros((d, d), dtype=complex)
    i = np.arange(d)
    m[(i + k) % d, i] = 1.0
    return m


def _free_permutation(params: ModelParams) -> np.ndarray:
    """Image of each system basis index under ``U_Omega (x) U_omega``."""
    d = params.d
    theta, phi = np.divmod(np.arange(d * d), d)
    return ((theta + params.Omega) % d) * d + (phi + params.omega) % d


def build_vk_isometry(params: ModelParams) -> np.ndarray:
    """Locking isometry restricted to the ancilla-reset input subspace.

    Columns are indexed by system basis states, rows by system-ancilla
    basis states:

    * ``delta == 0``: ``|theta, theta, 0bar>``
    * ``delta`` outside the entrainment set: ``|theta, phi, 0bar>``
    * otherwise: ``|theta, theta, delta>``
    """
    d, K = params.d, params.K
    D = d * d
    V = np.zeros((D * (d + 1), D), dtype=complex)
    for theta in range(d):
        for phi in range(d):
            delta = (theta - phi) % d
            col = theta * d + phi
            if delta == 0:
                row = (theta * d + theta) * (d + 1)
            elif not circular_membership(delta, K, d):
                row = col * (d + 1)
            else:
                row = (theta * d + theta) * (d + 1) + 1 + delta
            V[row, col] = 1.0
    return V


def kraus_from_isometry(V: np.ndarray, params: ModelParams) -> KrausFamily:
    """Split ``(U_Omega (x) U_omega (x) 1) V`` by ancilla label."""
    d = params.d
    D = d * d
    if V.shape != (D * (d + 1), D):
        raise ValueError(f"isometry shape {V.shape} does not match d={d}")
    gram = V.conj().T @ V
    defect = np.max(np.abs(gram - np.eye(D)))
    if defect > STRUCT_TOL:
        raise ValueError(f"V is not an isometry (max |V^dag V - I| = {defect:.3e})")

    perm = _free_permutation(params)
    blocks = V.reshape(D, d + 1, D)
    operators = []
    for a in range(d + 1):
        op = np.empty((D, D), dtype=complex)
        op[perm] = blocks[:, a, :]
        operators.append(op)
    return KrausFamily(operators, ["0bar", *range(d)])


def channel_kraus(params: ModelParams, max_d: int = DEFAULT_MAX_D) -> KrausFamily:
    check_dimension(params.d, max_d)
    return kraus_from_isometry(build_vk_isometry(params), params)


def apply_kraus(m: np.ndarray, kraus: KrausFamily) -> np.ndarray:
    """``sum_a K_a m K_a^dag``; leading axes of ``m`` are treated as a batch."""
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (kraus.dim, kraus.dim):
        raise ValueError(f"operand shape {m.shape} does not match channel dimension {kraus.dim}")
    n = kraus.dim
    out = np.zeros_like(m)
    flat_in = m.reshape(m.shape[:-2] + (n * n,))
    flat_out = out.reshape(flat_in.shape)
    for op, triple in zip(kraus.operators, kraus._flat):
        if triple is None:
            out += op @ m @ op.conj().T
            continue
        tgt, src, coeff = triple
        if tgt.size:
            # targets are distinct within one monomial operator
            flat_out[..., tgt] += coeff * flat_in[..., src]
    return out


def step_channel(rho: DensityMatrix, kraus: KrausFamily) -> DensityMatrix:
    if rho.dim != kraus.dim:
        raise ValueError(f"state dimension {rho.dim} does not match channel dimension {kraus.dim}")
    return DensityMatrix(apply_kraus(rho.matrix, kraus), rho.factor_dims)


def step_dilated(rho: DensityMatrix, V: np.ndarray, params: ModelParams) -> DensityMatrix:
    """Reference step through the full system-ancilla state.

    Builds ``(U (x) 1) V rho V^dag (U (x) 1)^dag`` explicitly and traces out
    the ancilla. Quadratically more expensive than ``step_channel``.
    """
    d = params.d
    full_u = np.kron(np.kron(build_shift(d, params.Omega), build_shift(d, params.omega)), np.eye(d + 1))
    w = full_u @ V
    joint = DensityMatrix(w @ rho.matrix @ w.conj().T, (d, d, d + 1))
    return partial_trace_last(joint)


def iterate_channel(rho0: DensityMatrix, kraus: KrausFamily, steps: int) -> Iterator[DensityMatrix]:
    """Yield ``rho_0, rho_1, ..., rho_steps``."""
    rho = rho0
    yield rho
    for _ in range(steps):
        rho = step_channel(rho, kraus)
        yield rho


def expectations(rho: DensityMatrix | np.ndarray, ops: PhaseOperators):
    """Linear means ``(Tr rho theta, Tr rho phi, Tr rho (theta - phi))``.

    These are plain (not circular) averages over the labels ``0..d-1``; see
    ``phase_distributions`` for the full populations. Accepts a batch of
    matrices along leading axes.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    th = np.einsum("...ij,ji->...", m, ops.theta_op)
    ph = np.einsum("...ij,ji->...", m, ops.phi_op)
    residue = max(np.max(np.abs(np.imag(th))), np.max(np.abs(np.imag(ph))))
    if residue > STRUCT_TOL:
        raise ValueError(f"expectation has imaginary residue {residue:.3e}")
    th, ph = np.real(th), np.real(ph)
    if np.ndim(th) == 0:
        return float(th), float(ph), float(th - ph)
    return th, ph, th - ph


def phase_distributions(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Marginal populations of ``theta``, ``phi`` and ``delta mod d``."""
    da, db = rho.factor_dims
    if da != db:
        raise ValueError("phase distributions need equal factor dimensions")
    d = da
    pop = np.real(np.diag(rho.matrix)).reshape(d, d)
    theta, phi = np.divmod(np.arange(d * d), d)
    delta = np.bincount((theta - phi) % d, weights=pop.reshape(-1), minlength=d)
    return pop.sum(axis=1), pop.sum(axis=0), delta


def embed_classical(theta: int, phi: int, d: int) -> DensityMatrix:
    if not (0 <= theta < d and 0 <= phi < d):
        raise ValueError(f"basis indices ({theta}, {phi}) out of range for d={d}")
    m = np.zeros((d * d, d * d), dtype=complex)
    m[theta * d + phi, theta * d + phi] = 1.0
    return DensityMatrix(m, (d, d))


def product_state(alpha: Sequence[complex] | np.ndarray, beta: Sequence[complex] | np.ndarray) -> DensityMatrix:
    """``|alpha> (x) |beta>`` as a density matrix; inputs must be normalized."""
    a = np.asarray(alpha, dtype=complex)
    b = np.asarray(beta, dtype=complex)
    for name, v in (("alpha", a), ("beta", b)):
        if abs(np.linalg.norm(v) - 1.0) > STRUCT_TOL:
            raise ValueError(f"{name} is not normalized")
    psi = np.kron(a, b)
    return DensityMatrix(np.outer(psi, psi.conj()), (len(a), len(b)))


CHANNEL_OBSERVABLES = ("theta", "phi", "delta", "purity", "negativity", "subspace_weight")


def run_channel(
    rho0: DensityMatrix,
    params: ModelParams,
    steps: int,
    observables: Sequence[str] = CHANNEL_OBSERVABLES,
    max_d: int = DEFAULT_MAX_D,
) -> tuple[Trajectory, DensityMatrix]:
    """Iterate the channel and record observables; also returns the final state."""
    from .entanglement import negativity, phase_locked_projector, subspace_weight

    if steps < 1:
        raise ValueError(f"steps: must be >= 1, got {steps}")
    unknown = [o for o in observables if o not in CHANNEL_OBSERVABLES]
    if unknown:
        raise ValueError(f"unknown observable(s): {', '.join(unknown)}")
    d = params.d
    if rho0.factor_dims != (d, d):
        raise ValueError(f"initial state has factor_dims {rho0.factor_dims}, expected ({d}, {d})")
    kraus = channel_kraus(params, max_d)
    ops = build_phase_ops(d)
    proj = phase_locked_projector(d, params.gamma) if "subspace_weight" in observables else None

    traj = Trajectory(("t", *observables))
    rho = rho0
    for t, rho in enumerate(iterate_channel(rho0, kraus, steps)):
        theta, phi, delta = expectations(rho, ops)
        row = {"t": t}
        values = {"theta": theta, "phi": phi, "delta": delta}
        for name in observables:
            if name in values:
                row[name] = values[name]
            elif name == "purity":
                row[name] = purity(rho)
            elif name == "negativity":
                row[name] = negativity(rho)
            else:
                row[name] = subspace_weight(rho, proj)
        traj.append(**row)
    return traj, rho
