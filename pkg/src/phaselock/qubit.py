"""Phase locking of a single qubit to a d-level classical stimulus.

The stimulus hand sits at ``theta_t = Omega*t mod d``. The qubit rotates
by ``R^omega`` per step, ``R`` being a ``2*pi/d`` turn about the Bloch Y
axis. When the stimulus hand is within ``K`` of the qubit's pole
(``0`` for ``|0>``, ``d/2`` for ``|1>``) the coupling overwrites that
branch with ``|chi_theta> = R^theta |0>`` and leaves a mark in an
ancilla qubit that is then discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .state import STRUCT_TOL, PureState
from .trajectory import Trajectory

__all__ = [
    "QubitParams",
    "QubitState",
    "rotation_r",
    "chi_state",
    "projector",
    "wk_window",
    "branch",
    "step_qubit",
    "run_qubit",
    "phase_locks",
    "minimal_period",
    "explicit_qubit_kraus",
    "cross_validate_qubit",
]

Window = tuple[int, int, bool]


@dataclass(frozen=True)
class QubitParams:
    """Model constants plus an optional interaction schedule.

    ``schedule`` is a sequence of ``(start, end, interaction_on)`` windows
    over the step index ``t`` (the step taking ``sigma_t`` to
    ``sigma_{t+1}``), each half-open ``[start, end)``. ``None`` means the
    interaction is always on.
    """

    d: int
    Omega: int
    omega: int
    K: int
    schedule: Optional[tuple[Window, ...]] = None

    def __post_init__(self) -> None:
        d = self.d
        if d < 2 or d % 2:
            raise ValueError(f"d: d must be even and >= 2, got {d}")
        for name in ("Omega", "omega"):
            v = getattr(self, name)
            if not 1 <= v <= d or d % v:
                raise ValueError(f"{name}: must be a divisor of d={d}, got {v}")
        if self.K < 0:
            raise ValueError(f"K: must be non-negative, got {self.K}")
        if 4 * self.K >= d:
            raise ValueError(f"K: requires K < d/4 so the two windows are disjoint, got K={self.K}, d={d}")
        if self.schedule is not None:
            windows = tuple(sorted((int(a), int(b), bool(on)) for a, b, on in self.schedule))
            for a, b, _ in windows:
                if a < 0 or b <= a:
                    raise ValueError(f"schedule: bad window [{a}, {b})")
            for (_, b0, _), (a1, _, _) in zip(windows, windows[1:]):
                if a1 < b0:
                    raise ValueError("schedule: windows overlap")
            object.__setattr__(self, "schedule", windows)

    def interaction_on(self, t: int) -> bool:
        if t < 0:
            raise ValueError(f"invalid step index {t}")
        if self.schedule is None:
            return True
        for a, b, on in self.schedule:
            if a <= t < b:
                return on
        raise ValueError(f"step {t} is not covered by the schedule")


@dataclass(frozen=True)
class QubitState:
    """``sigma = [[p, c], [conj(c), 1 - p]]``."""

    p: float
    c: complex = 0.0

    def __post_init__(self) -> None:
        p, c = float(self.p), complex(self.c)
        if not -STRUCT_TOL <= p <= 1 + STRUCT_TOL:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        if abs(c) ** 2 > p * (1 - p) + STRUCT_TOL:
            raise ValueError(f"|c|^2={abs(c) ** 2:.6g} exceeds p(1-p)={p * (1 - p):.6g}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "QubitState":
        return cls(float(np.real(m[0, 0])), complex(m[0, 1]))

    def matrix(self) -> np.ndarray:
        return np.array([[self.p, self.c], [np.conj(self.c), 1 - self.p]], dtype=complex)

    @property
    def purity(self) -> float:
        return self.p**2 + (1 - self.p) ** 2 + 2 * abs(self.c) ** 2


def rotation_r(d: int) -> np.ndarray:
    """One ``2*pi/d`` Bloch rotation about Y (half-angle ``pi/d``)."""
    if d < 2 or d % 2:
        raise ValueError(f"d must be even and >= 2, got {d}")
    c, s = math.cos(math.pi / d), math.sin(math.pi / d)
    return np.array([[c, -s], [s, c]], dtype=complex)


def chi_state(k: int, d: int) -> PureState:
    """``R^k |0> = (cos(k pi/d), sin(k pi/d))``."""
    if not 0 <= k < d:
        raise ValueError(f"k must lie in [0, d), got {k}")
    a = math.pi * k / d
    return PureState(np.array([math.cos(a), math.sin(a)], dtype=complex))


def projector(k: int, d: int) -> np.ndarray:
    """``|chi_k><chi_k|``; periodic in ``k`` with period ``d``."""
    return _projector(k % d, d).copy()


@lru_cache(maxsize=None)
def _projector(k: int, d: int) -> np.ndarray:
    v = chi_state(k, d).amplitudes
    return np.outer(v, v.conj())


@lru_cache(maxsize=None)
def _free_rotation(d: int, omega: int) -> np.ndarray:
    return np.linalg.matrix_power(rotation_r(d), omega)


def _circular_distance(a: int, b: int, d: int) -> int:
    x = (a - b) % d
    return min(x, d - x)


def wk_window(theta: int, phi_bit: int, K: int, d: int) -> bool:
    """True iff the coupling acts on qubit branch ``phi_bit`` at stimulus phase ``theta``."""
    if phi_bit not in (0, 1):
        raise ValueError(f"phi_bit must be 0 or 1, got {phi_bit}")
    return _circular_distance(theta, (d // 2) * phi_bit, d) <= K


def branch(t: int, params: QubitParams) -> int:
    """Which closed-form update applies at step ``t``: 1, 2 or 3 (free rotation)."""
    if not params.interaction_on(t):
        return 3
    theta = (params.Omega * t) % params.d
    if wk_window(theta, 0, params.K, params.d):
        return 1
    if wk_window(theta, 1, params.K, params.d):
        return 2
    return 3


def step_qubit(state: QubitState, t: int, params: QubitParams) -> QubitState:
    d, omega = params.d, params.omega
    theta = (params.Omega * t) % d
    which = branch(t, params)
    p, q = state.p, 1 - state.p
    if which == 1:
        m = p * _projector((theta + omega) % d, d) + q * _projector((d // 2 + omega) % d, d)
    elif which == 2:
        m = p * _projector(omega % d, d) + q * _projector((theta + omega) % d, d)
    else:
        r = _free_rotation(d, omega)
        m = r @ state.matrix() @ r.conj().T
    return QubitState.from_matrix(m)


def run_qubit(sigma0: QubitState, params: QubitParams, steps: int) -> Trajectory:
    if steps < 1:
        raise ValueError(f"steps: must be >= 1, got {steps}")
    traj = Trajectory(("t", "p", "coherence_abs", "purity"))
    state = sigma0
    for t in range(steps + 1):
        if t:
            state = step_qubit(state, t - 1, params)
        traj.append(t=t, p=state.p, coherence_abs=abs(state.c), purity=state.purity)
    return traj


def phase_locks(params: QubitParams) -> bool:
    """Does the stimulus orbit ever enter a window away from the two poles?

    Hits at exactly ``0`` or ``d/2`` only dephase the qubit along Z.
    """
    d = params.d
    for theta in range(0, d, params.Omega):
        if theta in (0, d // 2):
            continue
        if wk_window(theta, 0, params.K, d) or wk_window(theta, 1, params.K, d):
            return True
    return False


def minimal_period(
    series: Sequence[float], max_period: int, tol: float = 1e-8, window: Optional[int] = None
) -> Optional[int]:
    """Smallest lag ``L <= max_period`` with ``x[t] == x[t-L]`` on the tail.

    The check covers the last ``window`` samples (default ``max_period``),
    so at least ``window + max_period`` samples are needed.
    """
    x = np.asarray(series, dtype=float)
    window = max_period if window is None else window
    if len(x) < window + max_period:
        raise ValueError(f"need {window + max_period} samples, got {len(x)}")
    tail = x[-window:]
    for lag in range(1, max_period + 1):
        shifted = x[len(x) - window - lag : len(x) - lag]
        if np.max(np.abs(tail - shifted)) <= tol:
            return lag
    return None


def explicit_qubit_kraus(params: QubitParams, interaction: bool = True) -> list[np.ndarray]:
    """Kraus operators of one full step on stimulus (x) qubit.

    Built from the coupling isometry on ``|theta, phi, 0>_anc`` followed by
    ``U_Omega (x) R^omega (x) 1`` and a partial trace over the ancilla.
    With ``interaction=False`` the coupling is the identity.
    """
    d = params.d
    n = 2 * d
    w = np.zeros((2 * n, n), dtype=complex)  # rows: (theta*2 + phi)*2 + anc
    for theta in range(d):
        chi = chi_state(theta, d).amplitudes
        for bit in (0, 1):
            col = theta * 2 + bit
            if interaction and wk_window(theta, bit, params.K, d):
                for out_bit in (0, 1):
                    w[(theta * 2 + out_bit) * 2 + 1, col] = chi[out_bit]
            else:
                w[col * 2, col] = 1.0
    shift = np.zeros((d, d), dtype=complex)
    shift[(np.arange(d) + params.Omega) % d, np.arange(d)] = 1.0
    free = np.kron(np.kron(shift, np.linalg.matrix_power(rotation_r(d), params.omega)), np.eye(2))
    q = (free @ w).reshape(n, 2, n)
    return [q[:, a, :] for a in (0, 1)]


def cross_validate_qubit(
    params: QubitParams, steps: int, sigma0: Optional[QubitState] = None
) -> float:
    """Max entrywise gap between the closed-form update and the explicit dilation."""
    d = params.d
    sigma0 = QubitState(1.0) if sigma0 is None else sigma0
    kraus = {True: explicit_qubit_kraus(params, True), False: explicit_qubit_kraus(params, False)}
    stim0 = np.zeros((d, d), dtype=complex)
    stim0[0, 0] = 1.0
    rho = np.kron(stim0, sigma0.matrix())
    state = sigma0
    worst = 0.0
    for t in range(steps):
        ops = kraus[params.interaction_on(t)]
        rho = sum(k @ rho @ k.conj().T for k in ops)
        state = step_qubit(state, t, params)
        r = rho.reshape(d, 2, d, 2)
        theta = (params.Omega * (t + 1)) % d
        stim_pop = np.real(np.einsum("aiai->a", r))
        sigma = np.einsum("aiaj->ij", r)
        worst = max(
            worst,
            float(np.max(np.abs(sigma - state.matrix()))),
            abs(stim_pop[theta] - 1.0),
        )
    return worst
