"""Randomized-block trial generation with heralding and collision events.

A run consists of blocks; one setting pair is drawn per block by a seeded
generator, and every trial in the block uses that pair.  Fluorescence checks
run continuously between trials; a trial is heralded when the sum of the g
preceding check counts exceeds g * H_thres, so the herald decision uses only
information gathered before the trial begins.

Three independent RNG streams (settings, outcomes, counts/collisions) are
forked from one seed, so logs are bit-for-bit reproducible and block
generation cannot cross-talk between streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .chain import (
    BRIGHT,
    DARK,
    ChainParams,
    SettingPair,
    TrialRecord,
    settings_set,
    t_statistic,
)
from .mixtures import (
    BlockPeriodicSchedule,
    ConstantSchedule,
    MixtureModel,
    OutcomeReactiveSchedule,
    RampSchedule,
)

_OUTCOMES = ((BRIGHT, BRIGHT), (BRIGHT, DARK), (DARK, BRIGHT), (DARK, DARK))


@dataclass(frozen=True)
class ProtocolSpec:
    """Randomized-block protocol: block count/size and the analyzed trial."""

    blocks: int
    block_size: int = 100
    analyzed_index: int = 50
    pair_weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.blocks < 0:
            raise ValueError(f"blocks must be >= 0, got {self.blocks}")
        if not 1 <= self.analyzed_index <= self.block_size:
            raise ValueError(
                f"analyzed_index must be in [1, block_size], got "
                f"{self.analyzed_index} with block_size {self.block_size}"
            )
        if self.pair_weights is not None:
            if abs(sum(self.pair_weights) - 1.0) > 1e-9:
                raise ValueError("pair_weights must sum to 1")


@dataclass(frozen=True)
class HeraldSpec:
    """Fluorescence-check window rule for heralding trials."""

    g: int = 8
    h_thres: int = 20
    bright_mean: float = 30.0
    dark_mean: float = 2.0

    def __post_init__(self) -> None:
        if self.g < 1:
            raise ValueError(f"window length g must be >= 1, got {self.g}")
        if self.bright_mean <= 0 or self.dark_mean <= 0:
            raise ValueError("count means must be positive")


@dataclass(frozen=True)
class DetectionSpec:
    """Fluorescence readout of the measurement outcome itself.

    The "ideal" model records the sampled outcome directly.  The "counts"
    model draws a photon count per ion (bright or dark mean) and records
    bright iff the count exceeds the threshold, so threshold misclassification
    becomes a real, configurable detection error.
    """

    model: str = "ideal"  # or "counts"
    threshold: int = 6
    bright_mean: float = 30.0
    dark_mean: float = 2.0

    def __post_init__(self) -> None:
        if self.model not in ("ideal", "counts"):
            raise ValueError(f"detection model must be ideal or counts, got {self.model!r}")
        if self.bright_mean <= 0 or self.dark_mean <= 0:
            raise ValueError("count means must be positive")


@dataclass(frozen=True)
class CollisionSpec:
    """Background-gas collision events that darken the ions."""

    event_rate: float = 0.0
    recovery: str = "permanent"  # or "transient"
    duration: int = 50

    def __post_init__(self) -> None:
        if not 0.0 <= self.event_rate <= 1.0:
            raise ValueError(f"event_rate must be in [0, 1], got {self.event_rate}")
        if self.recovery not in ("permanent", "transient"):
            raise ValueError(f"recovery must be permanent or transient, got {self.recovery!r}")


class SourceModel(Protocol):
    """Generative model for trial outcomes."""

    history_dependent: bool

    def outcome_probabilities(
        self, pair: SettingPair, history: Sequence[int]
    ) -> np.ndarray: ...


class QuantumSource:
    """History-independent source: a two-qubit state with optional noise."""

    history_dependent = False

    def __init__(self, state: np.ndarray, noise=None):
        from .quantum import NoiseSpec, apply_noise, joint_probabilities

        self.state = np.asarray(state, dtype=complex)
        self.noise = noise if noise is not None else NoiseSpec()
        self._joint = joint_probabilities
        self._apply_noise = apply_noise

    def outcome_probabilities(self, pair, history=()):
        return self._apply_noise(self._joint(self.state, pair), self.noise)


class MixtureSource:
    """Source backed by a local/nonlocal mixture with a weight schedule.

    The schedule sees the history of per-trial scores, so one MixtureSource
    must be confined to a single generation stream.
    """

    def __init__(self, model: MixtureModel):
        self.model = model

    @property
    def history_dependent(self) -> bool:
        return not isinstance(self.model.schedule, ConstantSchedule)

    def outcome_probabilities(self, pair, history=()):
        return self.model.probabilities(pair, history)


def adversary_schedules() -> dict[str, type]:
    """Named library of local-weight schedules usable as memory adversaries."""
    return {
        "constant": ConstantSchedule,
        "ramp": RampSchedule,
        "outcome_reactive": OutcomeReactiveSchedule,
        "block_periodic": BlockPeriodicSchedule,
    }


def _ion_status(total: int, collisions: CollisionSpec, rng: np.random.Generator) -> np.ndarray:
    """Boolean healthy/dark status per trial under the collision model."""
    healthy = np.ones(total, dtype=bool)
    if collisions.event_rate == 0.0 or total == 0:
        return healthy
    events = rng.random(total) < collisions.event_rate
    dead_until = -1
    dead_forever = False
    for i in range(total):
        if dead_forever or i <= dead_until:
            healthy[i] = False
        if events[i]:
            if collisions.recovery == "permanent":
                dead_forever = True
                healthy[i] = False
            else:
                dead_until = max(dead_until, i + collisions.duration)
                healthy[i] = False
    return healthy


def _detect_outcomes(
    idx: np.ndarray, detection: DetectionSpec, rng: np.random.Generator
) -> np.ndarray:
    """Map underlying outcomes through the fluorescence-count readout."""
    if detection.model == "ideal":
        return idx
    a_bright = idx < 2
    b_bright = idx % 2 == 0
    counts_a = rng.poisson(np.where(a_bright, detection.bright_mean, detection.dark_mean))
    counts_b = rng.poisson(np.where(b_bright, detection.bright_mean, detection.dark_mean))
    read_a = counts_a > detection.threshold
    read_b = counts_b > detection.threshold
    return np.where(read_a, 0, 2) + np.where(read_b, 0, 1)


def herald_flags(check_counts: np.ndarray, herald: HeraldSpec) -> np.ndarray:
    """Window rule: trial q is heralded iff the g preceding checks sum above g*H_thres.

    ``check_counts`` holds one check per trial plus ``g`` warm-up checks at the
    front, so the window for trial q is checks [q, q+g).
    """
    g = herald.g
    total = len(check_counts) - g
    csum = np.concatenate([[0], np.cumsum(check_counts)])
    window = csum[g : g + total] - csum[:total]
    return window > g * herald.h_thres


def run_protocol(
    source: SourceModel,
    params: ChainParams,
    protocol: ProtocolSpec,
    herald: HeraldSpec = HeraldSpec(),
    collisions: CollisionSpec = CollisionSpec(),
    detection: DetectionSpec = DetectionSpec(),
    seed: int = 0,
) -> list[TrialRecord]:
    """Generate a full randomized-block trial log.

    Identical (source, params, specs, seed) reproduce the log bit-for-bit.
    """
    pairs = settings_set(params)
    n_pairs = len(pairs)
    ss = np.random.SeedSequence(seed)
    settings_rng, outcome_rng, count_rng, detect_rng = (
        np.random.default_rng(s) for s in ss.spawn(4)
    )

    total = protocol.blocks * protocol.block_size
    weights = protocol.pair_weights
    block_pairs = settings_rng.choice(n_pairs, size=protocol.blocks, p=weights)
    pair_idx = np.repeat(block_pairs, protocol.block_size)

    healthy = _ion_status(total, collisions, count_rng)

    # One fluorescence check precedes each trial; g warm-up checks before the
    # first trial give every trial a full window.  Both ions contribute.
    per_check_mean = np.empty(total + herald.g)
    per_check_mean[: herald.g] = 2.0 * herald.bright_mean
    per_check_mean[herald.g :] = np.where(
        healthy, 2.0 * herald.bright_mean, 2.0 * herald.dark_mean
    )
    checks = count_rng.poisson(per_check_mean)
    flags = herald_flags(checks, herald)

    probs_by_pair = None
    if not source.history_dependent:
        probs_by_pair = np.array(
            [source.outcome_probabilities(p, ()) for p in pairs], dtype=float
        )

    records: list[TrialRecord] = []
    if probs_by_pair is not None:
        cdf = np.cumsum(probs_by_pair, axis=1)
        u = outcome_rng.random(total)
        out_idx = (u[:, None] > cdf[pair_idx]).sum(axis=1)
        out_idx = np.where(healthy, out_idx, 3)  # dark ions read DD
        out_idx = _detect_outcomes(out_idx, detection, detect_rng)
        for q in range(total):
            x, y = _OUTCOMES[out_idx[q]]
            records.append(
                TrialRecord(
                    trial_index=q,
                    block_index=q // protocol.block_size,
                    pair=pairs[pair_idx[q]],
                    outcome_a=x,
                    outcome_b=y,
                    heralded=bool(flags[q]),
                    check_counts=tuple(int(c) for c in checks[q : q + herald.g]),
                )
            )
    else:
        history: list[int] = []
        for q in range(total):
            pair = pairs[pair_idx[q]]
            if healthy[q]:
                p = np.asarray(source.outcome_probabilities(pair, history), dtype=float)
                idx = int(outcome_rng.choice(4, p=p / p.sum()))
            else:
                idx = 3
            idx = int(_detect_outcomes(np.array([idx]), detection, detect_rng)[0])
            x, y = _OUTCOMES[idx]
            rec = TrialRecord(
                trial_index=q,
                block_index=q // protocol.block_size,
                pair=pair,
                outcome_a=x,
                outcome_b=y,
                heralded=bool(flags[q]),
                check_counts=tuple(int(c) for c in checks[q : q + herald.g]),
            )
            records.append(rec)
            history.append(t_statistic(rec, params))
    return records


@dataclass
class AnalysisSelection:
    """The analyzed trial of each block, after herald filtering."""

    trials: list[TrialRecord]
    blocks: int
    discarded_unheralded: int

    @property
    def n(self) -> int:
        return len(self.trials)


def extract_analysis_trials(
    log: Sequence[TrialRecord], protocol: ProtocolSpec
) -> AnalysisSelection:
    """Select the analyzed_index-th trial of each block, keeping heralded ones."""
    by_block: dict[int, list[TrialRecord]] = {}
    for rec in log:
        by_block.setdefault(rec.block_index, []).append(rec)
    chosen: list[TrialRecord] = []
    discarded = 0
    for block in sorted(by_block):
        trials = by_block[block]
        if len(trials) < protocol.analyzed_index:
            raise ValueError(
                f"block {block} has {len(trials)} trials, fewer than "
                f"analyzed_index {protocol.analyzed_index}"
            )
        rec = trials[protocol.analyzed_index - 1]
        if rec.heralded:
            chosen.append(rec)
        else:
            discarded += 1
    return AnalysisSelection(trials=chosen, blocks=len(by_block), discarded_unheralded=discarded)
