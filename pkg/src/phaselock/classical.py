"""Discrete phase-locking of two d-level classical systems.

The stimulus advances its phase by ``Omega`` each step. The oscillator
advances by ``omega`` plus a response ``G_K`` to the phase difference
``delta = theta - phi``. Every quantity lives in ``Z_d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Hashable, Optional, TypeVar

from .trajectory import Trajectory

__all__ = [
    "ModelParams",
    "ClassicalPair",
    "LockReport",
    "circular_membership",
    "g_k",
    "step_classical",
    "delta_map",
    "run_classical",
    "detect_lock",
    "lock_time",
    "find_cycle",
    "circle_map_step",
]

S = TypeVar("S", bound=Hashable)


@dataclass(frozen=True, slots=True)
class ModelParams:
    d: int
    Omega: int
    omega: int
    K: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"d: must be a positive integer, got {self.d}")
        if not 0 <= self.Omega < self.d:
            raise ValueError(f"Omega: must lie in [0, d), got {self.Omega}")
        if not 0 <= self.omega < self.d:
            raise ValueError(f"omega: must lie in [0, d), got {self.omega}")
        if self.K < 0:
            raise ValueError(f"K: must be non-negative, got {self.K}")
        if 2 * self.K >= self.d:
            raise ValueError(f"K: requires 2K < d, got K={self.K}, d={self.d}")

    @property
    def gamma(self) -> int:
        """Frequency detuning ``(Omega - omega) mod d``."""
        return (self.Omega - self.omega) % self.d


@dataclass(frozen=True, slots=True)
class ClassicalPair:
    theta: int
    phi: int

    def delta(self, d: int) -> int:
        return (self.theta - self.phi) % d


@dataclass(frozen=True)
class LockReport:
    locked: bool
    tau: Optional[int] = None
    delta_star: Optional[int] = None
    drift_period: Optional[int] = None


def circular_membership(x: int, K: int, d: int) -> bool:
    """True iff ``x mod d`` lies in the entrainment set ``{-K..K} mod d``."""
    if 2 * K >= d:
        raise ValueError(f"K: requires 2K < d, got K={K}, d={d}")
    x %= d
    return x <= K or x >= d - K


def g_k(delta: int, params: ModelParams) -> int:
    """Oscillator response: follow ``delta`` inside the entrainment set, else 0."""
    return delta if circular_membership(delta, params.K, params.d) else 0


def step_classical(state: ClassicalPair, params: ModelParams) -> ClassicalPair:
    d = params.d
    delta = (state.theta - state.phi) % d
    return ClassicalPair(
        (state.theta + params.Omega) % d,
        (state.phi + params.omega + g_k(delta, params)) % d,
    )


def delta_map(delta: int, params: ModelParams) -> int:
    """Autonomous update of the phase difference alone."""
    return (delta + params.gamma - g_k(delta, params)) % params.d


def run_classical(initial: ClassicalPair, params: ModelParams, steps: int) -> Trajectory:
    if steps < 1:
        raise ValueError(f"steps: must be >= 1, got {steps}")
    d = params.d
    # same update as step_classical on plain ints; exhaustive sweeps call this ~1e5 times
    response = [g_k(x, params) for x in range(d)]
    theta, phi = initial.theta % d, initial.phi % d
    thetas, phis, deltas = [theta], [phi], [(theta - phi) % d]
    for _ in range(steps):
        theta, phi = (theta + params.Omega) % d, (phi + params.omega + response[deltas[-1]]) % d
        thetas.append(theta)
        phis.append(phi)
        deltas.append((theta - phi) % d)
    columns = {"t": list(range(steps + 1)), "theta": thetas, "phi": phis, "delta": deltas}
    return Trajectory(("t", "theta", "phi", "delta"), columns)


def find_cycle(f: Callable[[S], S], x0: S, cap: Optional[int] = None) -> tuple[int, int]:
    """Brent's cycle detection on the orbit of ``x0`` under ``f``.

    Returns ``(mu, lam)``: the index of the first state on the cycle and the
    cycle length. ``cap`` bounds the number of evaluations of ``f`` used to
    find the cycle length; exceeding it raises ``RuntimeError``.
    """
    power = lam = 1
    tortoise, hare = x0, f(x0)
    evaluations = 1
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
        evaluations += 1
        if cap is not None and evaluations > cap:
            raise RuntimeError(f"no cycle found within {cap} steps")

    tortoise = hare = x0
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = f(tortoise), f(hare)
        mu += 1
    return mu, lam


def detect_lock(trajectory: Trajectory, params: ModelParams) -> LockReport:
    """Classify a classical run as phase-locked or drifting.

    The phase difference evolves autonomously, so a single repetition
    ``delta[t+1] == delta[t]`` certifies a fixed point. ``tau`` is the first
    such index. Without a repetition the drift period is the length of the
    eventual cycle of the phase-difference map.
    """
    d = params.d
    deltas = trajectory["delta"]
    if len(deltas) < d + 1:
        raise ValueError(
            f"trajectory too short: need at least d+1={d + 1} samples, got {len(deltas)}"
        )
    for t in range(len(deltas) - 1):
        if deltas[t] == deltas[t + 1]:
            star = deltas[t]
            if any(x != star for x in deltas[t:]) or delta_map(star, params) != star:
                raise ValueError("trajectory is inconsistent with params")
            return LockReport(True, tau=t, delta_star=star)

    _, period = find_cycle(lambda x: delta_map(x, params), deltas[-1], cap=d * d)
    return LockReport(False, drift_period=period)


def lock_time(delta0: int, params: ModelParams) -> Optional[int]:
    """First ``t`` with ``delta[t+1] == delta[t]`` starting from ``delta0``, or None."""
    delta = delta0 % params.d
    for t in range(params.d + 1):
        nxt = delta_map(delta, params)
        if nxt == delta:
            return t
        delta = nxt
    return None


def circle_map_step(alpha: float, Gamma: float, K: float) -> float:
    """Standard sine circle map, reduced to ``[0, 1)``."""
    x = (alpha + Gamma - K / (2 * math.pi) * math.sin(2 * math.pi * alpha)) % 1.0
    # float modulo can round a tiny negative up to exactly 1.0
    return 0.0 if x >= 1.0 else x
