"""Discrete phase-locking of classical d-level systems, qudits and a qubit."""

from .classical import ClassicalPair, LockReport, ModelParams, detect_lock, run_classical
from .channel import channel_kraus, run_channel, step_channel
from .entanglement import negativity, phase_locked_projector, predicted_coherence
from .qubit import QubitParams, QubitState, run_qubit
from .state import DensityMatrix, PureState
from .trajectory import Trajectory

__version__ = "0.1.0"
