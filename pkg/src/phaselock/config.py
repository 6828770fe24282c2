"""Scenario documents: INI-style ``key = value`` text with sections.

Example::

    [scenario]
    model = qudit-channel
    steps = 12
    seed = 7

    [params]
    d = 4
    Omega = 2
    omega = 1
    K = 1

    [initial]
    stimulus = uniform
    oscillator = random

Unknown sections and keys are rejected.
"""

from __future__ import annotations

import configparser
import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Union

import numpy as np

from .channel import DEFAULT_MAX_D
from .classical import ModelParams
from .qubit import QubitParams

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "MODELS",
    "OBSERVABLES",
    "parse_config",
    "parse_amplitudes",
    "resolve_amplitudes",
]

MODELS = ("classical", "qudit-channel", "qubit")

OBSERVABLES = {
    "classical": ("theta", "phi", "delta"),
    "qudit-channel": ("theta", "phi", "delta", "purity", "negativity", "subspace_weight"),
    "qubit": ("p", "coherence_abs", "purity"),
}

NORM_TOL = 1e-8

_SCENARIO_KEYS = {"name", "model", "steps", "seed", "outputs", "max_dim"}
_PARAM_KEYS = {"d", "Omega", "omega", "K"}
_INITIAL_KEYS = {
    "classical": {"theta", "phi"},
    "qudit-channel": {"stimulus", "oscillator"},
    "qubit": {"p", "c"},
}

# an amplitude spec is "uniform", "random", a basis index, or explicit amplitudes
AmplitudeSpec = Union[str, int, tuple[complex, ...]]


class ConfigError(ValueError):
    """Validation failure; ``errors`` lists one message per offending key."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    params: Union[ModelParams, QubitParams]
    steps: int
    initial: dict[str, Any] = field(default_factory=dict)
    outputs: Optional[tuple[str, ...]] = None
    seed: int = 0
    max_dim: int = DEFAULT_MAX_D
    name: str = "scenario"

    def with_overrides(self, seed: Optional[int] = None, steps: Optional[int] = None) -> "ScenarioConfig":
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if steps is not None:
            if steps < 1:
                raise ConfigError([f"scenario.steps: must be >= 1, got {steps}"])
            changes["steps"] = steps
        return replace(self, **changes)


def _int(section: str, key: str, raw: str, errors: list[str]) -> Optional[int]:
    try:
        return int(raw)
    except ValueError:
        errors.append(f"{section}.{key}: expected an integer, got {raw!r}")
        return None


def parse_amplitudes(raw: str) -> AmplitudeSpec:
    """``uniform`` | ``random`` | ``basis:<k>`` | comma-separated complex numbers."""
    text = raw.strip()
    if text in ("uniform", "random"):
        return text
    if text.startswith("basis:"):
        return int(text[len("basis:"):])
    values = tuple(complex(tok.replace(" ", "")) for tok in text.split(","))
    if not values:
        raise ValueError("empty amplitude list")
    return values


def resolve_amplitudes(spec: AmplitudeSpec, d: int, rng: np.random.Generator) -> np.ndarray:
    """Turn an amplitude spec into a normalized vector of length ``d``."""
    if spec == "uniform":
        return np.full(d, 1 / np.sqrt(d), dtype=complex)
    if spec == "random":
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        return v / np.linalg.norm(v)
    if isinstance(spec, int):
        if not 0 <= spec < d:
            raise ValueError(f"basis index {spec} out of range for d={d}")
        v = np.zeros(d, dtype=complex)
        v[spec] = 1.0
        return v
    v = np.asarray(spec, dtype=complex)
    if v.shape != (d,):
        raise ValueError(f"expected {d} amplitudes, got {len(v)}")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("amplitudes are all zero")
    if abs(norm - 1.0) > NORM_TOL:
        warnings.warn(f"amplitudes had norm {norm:.12g}; renormalized", stacklevel=2)
    return v / norm


def _parse_windows(raw: str, errors: list[str]) -> Optional[tuple[tuple[int, int, bool], ...]]:
    windows = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            span, state = chunk.split()
            start, end = (int(x) for x in span.split("-"))
        except ValueError:
            errors.append(f"schedule.windows: cannot parse {chunk!r} (expected 'START-END on|off')")
            return None
        if state not in ("on", "off"):
            errors.append(f"schedule.windows: state must be 'on' or 'off', got {state!r}")
            return None
        windows.append((start, end, state == "on"))
    return tuple(windows)


def parse_config(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # Omega and omega differ only by case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from None

    errors: list[str] = []
    known_sections = {"scenario", "params", "initial", "schedule"}
    for sec in parser.sections():
        if sec not in known_sections:
            errors.append(f"{sec}: unknown section")
    for sec in ("scenario", "params"):
        if not parser.has_section(sec):
            errors.append(f"{sec}: missing section")
    if errors:
        raise ConfigError(errors)

    sc = parser["scenario"]
    for key in sc:
        if key not in _SCENARIO_KEYS:
            errors.append(f"scenario.{key}: unknown key")
    model = sc.get("model", "").strip()
    if model not in MODELS:
        errors.append(f"scenario.model: must be one of {', '.join(MODELS)}, got {model!r}")
        raise ConfigError(errors)

    steps = _int("scenario", "steps", sc["steps"], errors) if "steps" in sc else None
    if "steps" not in sc:
        errors.append("scenario.steps: missing")
    elif steps is not None and steps < 1:
        errors.append(f"scenario.steps: must be >= 1, got {steps}")
    seed = _int("scenario", "seed", sc.get("seed", "0"), errors)
    max_dim = _int("scenario", "max_dim", sc.get("max_dim", str(DEFAULT_MAX_D)), errors)
    outputs = None
    if "outputs" in sc:
        outputs = tuple(o.strip() for o in sc["outputs"].split(",") if o.strip())
        bad = [o for o in outputs if o not in OBSERVABLES[model]]
        if bad:
            errors.append(
                f"scenario.outputs: unknown observable(s) {', '.join(bad)} for model {model}"
                f" (choose from {', '.join(OBSERVABLES[model])})"
            )

    pr = parser["params"]
    values: dict[str, int] = {}
    for key in pr:
        if key not in _PARAM_KEYS:
            errors.append(f"params.{key}: unknown key")
            continue
        v = _int("params", key, pr[key], errors)
        if v is not None:
            values[key] = v
    for key in sorted(_PARAM_KEYS - set(pr)):
        errors.append(f"params.{key}: missing")

    schedule = None
    if parser.has_section("schedule"):
        sch = parser["schedule"]
        if model != "qubit":
            errors.append("schedule: only the qubit model accepts an interaction schedule")
        for key in sch:
            if key != "windows":
                errors.append(f"schedule.{key}: unknown key")
        if "windows" in sch:
            schedule = _parse_windows(sch["windows"], errors)

    initial: dict[str, Any] = {}
    if parser.has_section("initial"):
        ini = parser["initial"]
        allowed = _INITIAL_KEYS[model]
        for key in ini:
            if key not in allowed:
                errors.append(f"initial.{key}: unknown key for model {model}")
                continue
            raw = ini[key]
            try:
                if model == "classical":
                    initial[key] = int(raw)
                elif model == "qudit-channel":
                    initial[key] = parse_amplitudes(raw)
                else:
                    initial[key] = float(raw) if key == "p" else complex(raw.replace(" ", ""))
            except ValueError as exc:
                errors.append(f"initial.{key}: {exc}")

    params = None
    if len(values) == len(_PARAM_KEYS):
        try:
            if model == "qubit":
                params = QubitParams(schedule=schedule, **values)
            else:
                params = ModelParams(**values)
        except ValueError as exc:
            errors.append(f"params.{exc}" if ":" in str(exc).split()[0] else f"params: {exc}")

    if params is not None and model == "qubit" and schedule is not None and steps is not None:
        try:
            for t in range(steps):
                params.interaction_on(t)
        except ValueError as exc:
            errors.append(f"schedule.windows: {exc}")

    if params is not None and model == "qubit":
        p = initial.get("p", 1.0)
        c = initial.get("c", 0.0)
        if not 0.0 <= p <= 1.0 or abs(c) ** 2 > p * (1 - p) + 1e-12:
            errors.append("initial: (p, c) is not a valid qubit state; need 0<=p<=1 and |c|^2 <= p(1-p)")

    if params is not None and model == "qudit-channel":
        for key in ("stimulus", "oscillator"):
            spec = initial.get(key, "uniform")
            if isinstance(spec, int) and not 0 <= spec < params.d:
                errors.append(f"initial.{key}: basis index {spec} out of range for d={params.d}")
            elif isinstance(spec, tuple) and len(spec) != params.d:
                errors.append(f"initial.{key}: expected {params.d} amplitudes, got {len(spec)}")
    if params is not None and model == "classical":
        for key in ("theta", "phi"):
            v = initial.get(key, 0)
            if not 0 <= v < params.d:
                errors.append(f"initial.{key}: must lie in [0, d), got {v}")

    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(
        model=model,
        params=params,
        steps=steps,
        initial=initial,
        outputs=outputs,
        seed=seed,
        max_dim=max_dim,
        name=sc.get("name", "scenario").strip(),
    )
