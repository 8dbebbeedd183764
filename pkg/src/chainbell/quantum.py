"""Two-qubit state-vector predictions for chained Bell experiments.

Ideal Bell states, the settings rotations, joint outcome probabilities, the
ideal chain minimum, a simple noise channel, and the self-testing fidelity
bound derived from a CHSH violation.

Basis convention: amplitudes are ordered (up-up, up-down, down-up, down-down)
and map onto fluorescence outcomes (BB, BD, DB, DD).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainParams, SettingPair, settings_set

_NORM_TOL = 1e-12

# Self-testing threshold beta_S = (16 + 14*sqrt(2))/17: CHSH values at or
# below it certify no more than trivial singlet fidelity 1/2.
BETA_S = (16.0 + 14.0 * math.sqrt(2.0)) / 17.0
TSIRELSON = 2.0 * math.sqrt(2.0)

# One-sided normal quantile for the 95 % confidence mode.
_Z_95 = 1.645


def phi_plus() -> np.ndarray:
    """Bell state (|up,up> + |down,down>)/sqrt(2)."""
    return np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)


def phi_minus() -> np.ndarray:
    """Bell state (|up,up> - |down,down>)/sqrt(2)."""
    return np.array([1.0, 0.0, 0.0, -1.0], dtype=complex) / math.sqrt(2.0)


def setting_rotation(phase: float) -> np.ndarray:
    """Single-qubit settings rotation with classical phase parameter.

    Maps |up> -> (|up> - e^{-i phase}|down>)/sqrt(2) and
    |down> -> (|down> + e^{+i phase}|up>)/sqrt(2); the relative plus sign on
    the second image is required for unitarity (the images must stay
    orthogonal) and fixes one of the two sign conventions compatible with a
    pi/2 pulse of this phase.
    """
    e_plus = np.exp(1j * phase)
    e_minus = np.exp(-1j * phase)
    return np.array([[1.0, e_plus], [-e_minus, 1.0]], dtype=complex) / math.sqrt(2.0)


def _check_normalized(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex).reshape(4)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state is not normalized: |psi| = {norm}")
    return state


def joint_probabilities(state: np.ndarray, pair: SettingPair) -> np.ndarray:
    """Outcome probabilities P(BB), P(BD), P(DB), P(DD) for a setting pair.

    Applies the settings rotation with phase a_k to qubit a and phase
    b_l + pi to qubit b, then reads off squared magnitudes in the fixed
    fluorescence basis.  The pi offset on party b fixes the phase convention
    (pulse phases are only defined up to such offsets) so that the Phi+
    correlations come out as sin^2((a_k + b_l)/2), matching the published
    outcome frequencies; without it the two Bell states trade places.
    """
    state = _check_normalized(state)
    u = np.kron(
        setting_rotation(pair.angle_a), setting_rotation(pair.angle_b + math.pi)
    )
    rotated = u @ state
    probs = np.abs(rotated) ** 2
    return probs / probs.sum()


def correlation(probs: np.ndarray) -> float:
    """C = P(BB) + P(DD) from a joint probability vector."""
    return float(probs[0] + probs[3])


def ideal_chain_value(N: int) -> float:
    """Lowest I_N achievable with a perfect chained Bell experiment.

    Evaluated by explicit state-vector arithmetic over the 2N optimal
    settings for the Phi+ state; equals 2N*sin^2(pi/(4N)).
    """
    params = ChainParams(N)
    state = phi_plus()
    value = 0.0
    for i, pair in enumerate(settings_set(params)):
        c = correlation(joint_probabilities(state, pair))
        value += (1.0 - c) if i == 2 * N - 1 else c
    return value


@dataclass(frozen=True)
class NoiseSpec:
    """Simple noise model: depolarizing mix plus per-party outcome flips."""

    detection_flip_a: float = 0.0
    detection_flip_b: float = 0.0
    state_fidelity_mix: float = 0.0

    def __post_init__(self) -> None:
        for name in ("detection_flip_a", "detection_flip_b", "state_fidelity_mix"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def apply_noise(probs: np.ndarray, noise: NoiseSpec) -> np.ndarray:
    """Mix in the maximally mixed distribution, then flip outcomes.

    The uniform admixture has weight ``state_fidelity_mix``; the flips are
    independent per party with the configured probabilities.
    """
    p = np.asarray(probs, dtype=float).reshape(4)
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("input is not a probability vector")
    m = noise.state_fidelity_mix
    p = (1.0 - m) * p + m * 0.25
    fa, fb = noise.detection_flip_a, noise.detection_flip_b
    # Flip channel on party a swaps (BB,BD) with (DB,DD); on b swaps within.
    ka = np.array([[1.0 - fa, fa], [fa, 1.0 - fa]])
    kb = np.array([[1.0 - fb, fb], [fb, 1.0 - fb]])
    joint = p.reshape(2, 2)
    out = ka @ joint @ kb.T
    return out.reshape(4)


def self_test_fidelity(
    b_chsh: float, stderr: float = 0.0, confidence: float = 0.50
) -> float:
    """Singlet-fidelity lower bound certified by a CHSH violation.

    F = (1 + (B - beta_S)/(2*sqrt(2) - beta_S))/2, clamped to [0, 1].  At 50 %
    confidence the point estimate of B is used; at 95 % confidence B is first
    replaced by its one-sided normal lower confidence limit B - 1.645*stderr.
    """
    if stderr < 0.0:
        raise ValueError(f"stderr must be nonnegative, got {stderr}")
    if confidence == 0.50:
        b = b_chsh
    elif confidence == 0.95:
        b = b_chsh - _Z_95 * stderr
    else:
        raise ValueError(f"confidence must be 0.50 or 0.95, got {confidence}")
    f = 0.5 * (1.0 + (b - BETA_S) / (TSIRELSON - BETA_S))
    return min(1.0, max(0.0, f))
