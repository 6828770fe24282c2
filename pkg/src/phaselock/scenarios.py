"""Scenario execution and the built-in experiment catalogue."""

from __future__ import annotations

import numpy as np

from .channel import ResourceLimitError, product_state, run_channel
from .classical import ClassicalPair, detect_lock, run_classical
from .config import OBSERVABLES, ScenarioConfig, parse_config, resolve_amplitudes
from .entanglement import asymptotic_lock_step
from .qubit import QubitState, phase_locks, run_qubit
from .trajectory import Trajectory

__all__ = ["ANALYSIS_MAX_D", "BUILTINS", "DEFAULT_PLOT", "builtin_config", "run_scenario"]

# negativity and subspace weight are only tracked up to this dimension
ANALYSIS_MAX_D = 16

DEFAULT_PLOT = {
    "classical": ("theta", "phi", "delta"),
    "qudit-channel": ("delta", "purity", "negativity", "subspace_weight"),
    "qubit": ("p",),
}


def _doc(name: str, model: str, steps: int, params: str, initial: str = "", extra: str = "") -> str:
    return (
        f"[scenario]\nname = {name}\nmodel = {model}\nsteps = {steps}\n"
        f"[params]\n{params}\n"
        + (f"[initial]\n{initial}\n" if initial else "")
        + extra
    )


BUILTINS: dict[str, tuple[str, str]] = {
    "classical-lock-demo": (
        "classical pair locks after 4 steps (d=8, Omega=2, omega=1, K=1, delta0=4)",
        _doc("classical-lock-demo", "classical", 16, "d = 8\nOmega = 2\nomega = 1\nK = 1", "theta = 0\nphi = 4"),
    ),
    "classical-drift-demo": (
        "detuning outside the entrainment range drifts with period 3 (d=8, Omega=3, omega=0, K=1)",
        _doc("classical-drift-demo", "classical", 24, "d = 8\nOmega = 3\nomega = 0\nK = 1", "theta = 0\nphi = 4"),
    ),
    "q2c-demo": (
        "superposed oscillator locks to a classical stimulus and becomes classical (d=8)",
        _doc("q2c-demo", "qudit-channel", 16, "d = 8\nOmega = 2\nomega = 1\nK = 1",
             "stimulus = basis:3\noscillator = uniform"),
    ),
    "entangle-demo": (
        "uniform stimulus and oscillator lock into an entangled state (d=4, Gamma=1, K=1)",
        _doc("entangle-demo", "qudit-channel", 12, "d = 4\nOmega = 2\nomega = 1\nK = 1",
             "stimulus = uniform\noscillator = uniform"),
    ),
    "fig1-left": (
        "qubit locks to the stimulus, period d/Omega = 40 (d=40, Omega=1, omega=2, K=2)",
        _doc("fig1-left", "qubit", 200, "d = 40\nOmega = 1\nomega = 2\nK = 2", "p = 1.0\nc = 0"),
    ),
    "fig1-middle": (
        "interaction on for steps 0-40, off 40-80, on 80-120 (d=40, Omega=5, omega=2, K=5)",
        _doc("fig1-middle", "qubit", 120, "d = 40\nOmega = 5\nomega = 2\nK = 5", "p = 1.0\nc = 0",
             "[schedule]\nwindows = 0-40 on, 40-80 off, 80-120 on\n"),
    ),
    "fig1-right": (
        "qubit depolarizes to the maximally mixed state (d=40, Omega=5, omega=2, K=3)",
        _doc("fig1-right", "qubit", 200, "d = 40\nOmega = 5\nomega = 2\nK = 3", "p = 1.0\nc = 0"),
    ),
}


def builtin_config(name: str) -> ScenarioConfig:
    try:
        return parse_config(BUILTINS[name][1])
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None


def run_scenario(config: ScenarioConfig) -> Trajectory:
    """Run one scenario; deterministic for a given config (including its seed)."""
    if config.model == "classical":
        traj = _run_classical(config)
    elif config.model == "qudit-channel":
        traj = _run_channel(config)
    else:
        traj = _run_qubit(config)
    if config.outputs is not None:
        traj = traj.select(config.outputs)
    return traj


def _run_classical(config: ScenarioConfig) -> Trajectory:
    params = config.params
    start = ClassicalPair(config.initial.get("theta", 0), config.initial.get("phi", 0))
    traj = run_classical(start, params, config.steps)
    traj.summary["gamma"] = params.gamma
    if len(traj) >= params.d + 1:
        report = detect_lock(traj, params)
        traj.summary.update(
            {k: v for k, v in vars(report).items() if v is not None}
        )
    return traj


def _run_channel(config: ScenarioConfig) -> Trajectory:
    params = config.params
    d = params.d
    wanted = config.outputs or OBSERVABLES["qudit-channel"]
    observables = list(wanted)
    if d > ANALYSIS_MAX_D:
        costly = [o for o in ("negativity", "subspace_weight") if o in wanted]
        if config.outputs is not None and costly:
            raise ResourceLimitError(
                f"{', '.join(costly)} tracked only for d <= {ANALYSIS_MAX_D}, got d={d}"
            )
        observables = [o for o in wanted if o not in costly]

    # one generator, drawn stimulus first, so a seed fixes both factors
    rng = np.random.Generator(np.random.PCG64(config.seed))
    alpha = resolve_amplitudes(config.initial.get("stimulus", "uniform"), d, rng)
    beta = resolve_amplitudes(config.initial.get("oscillator", "uniform"), d, rng)
    traj, _ = run_channel(product_state(alpha, beta), params, config.steps, observables, config.max_dim)
    traj.summary["gamma"] = params.gamma
    try:
        traj.summary["lock_step"] = asymptotic_lock_step(params)
    except ValueError:
        traj.summary["lock_step"] = None
    for name in ("purity", "negativity", "subspace_weight"):
        if name in traj.columns:
            traj.summary[f"final_{name}"] = traj[name][-1]
    return traj


def _run_qubit(config: ScenarioConfig) -> Trajectory:
    params = config.params
    sigma0 = QubitState(config.initial.get("p", 1.0), config.initial.get("c", 0.0))
    traj = run_qubit(sigma0, params, config.steps)
    traj.summary["phase_locks"] = phase_locks(params)
    traj.summary["final_purity"] = traj["purity"][-1]
    return traj
