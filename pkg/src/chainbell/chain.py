"""Settings geometry, per-trial statistics, and estimators for chained Bell tests.

Everything in this module is computable from a trial log alone: no model of
the source is required.  The Nth chained Bell test uses 2N measurement-setting
pairs arranged in a chain

    a1b1, a1b2, a2b2, a2b3, ..., aNbN, aNb1,

and the chained Bell parameter is the sum of the correlations of the first
2N-1 pairs plus one minus the correlation of the closing pair (aN, b1).
Local hidden-variable models obey I_N >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

BRIGHT = "B"
DARK = "D"

Mode = Literal["correlation", "anticorrelation"]


def angle_a(N: int, k: int) -> float:
    """Measurement phase for setting a_k: (2k-1)*pi/(2N)."""
    return (2 * k - 1) * math.pi / (2 * N)


def angle_b(N: int, l: int) -> float:
    """Measurement phase for setting b_l: -(l-1)*pi/N."""
    return -(l - 1) * math.pi / N


@dataclass(frozen=True)
class ChainParams:
    """Order N of the chained Bell test and the significance level alpha."""

    N: int
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError(f"chain order N must be >= 2, got {self.N}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    @property
    def n_pairs(self) -> int:
        return 2 * self.N


@dataclass(frozen=True)
class SettingPair:
    """One admissible setting pair (a_k, b_l) with its derived phases.

    Pairs are keyed by the integer indices (k, l); the angles are derived and
    never used as keys.
    """

    a_index: int
    b_index: int
    angle_a: float
    angle_b: float

    @property
    def key(self) -> tuple[int, int]:
        return (self.a_index, self.b_index)


def _is_admissible(N: int, k: int, l: int) -> bool:
    if not (1 <= k <= N and 1 <= l <= N):
        return False
    return l == k or l == k + 1 or (k, l) == (N, 1)


def is_closing_pair(params: ChainParams, k: int, l: int) -> bool:
    """True for the chain-closing pair (a_N, b_1)."""
    return (k, l) == (params.N, 1)


def make_pair(params: ChainParams, k: int, l: int) -> SettingPair:
    """Build the setting pair (a_k, b_l), rejecting inadmissible index pairs."""
    if not _is_admissible(params.N, k, l):
        raise ValueError(
            f"setting pair (a_{k}, b_{l}) is not admissible for N={params.N}"
        )
    return SettingPair(k, l, angle_a(params.N, k), angle_b(params.N, l))


def settings_set(params: ChainParams) -> list[SettingPair]:
    """The 2N setting pairs in chain order a1b1, a1b2, a2b2, ..., aNbN, aNb1."""
    N = params.N
    pairs = []
    for k in range(1, N + 1):
        pairs.append(make_pair(params, k, k))
        l = k + 1 if k < N else 1
        pairs.append(make_pair(params, k, l))
    return pairs


@dataclass(frozen=True)
class TrialRecord:
    """One trial of a chained Bell experiment.

    Both outcomes are always present; detection efficiency is modeled
    upstream, never as a missing outcome.  ``check_counts`` holds the photon
    counts of the fluorescence checks immediately preceding this trial (may
    be empty for logs without heralding data); ``heralded`` is the window
    rule applied to those counts.
    """

    trial_index: int
    block_index: int
    pair: SettingPair
    outcome_a: str
    outcome_b: str
    heralded: bool = True
    check_counts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.outcome_a not in (BRIGHT, DARK):
            raise ValueError(f"outcome_a must be 'B' or 'D', got {self.outcome_a!r}")
        if self.outcome_b not in (BRIGHT, DARK):
            raise ValueError(f"outcome_b must be 'B' or 'D', got {self.outcome_b!r}")


def c_statistic(x: str, y: str) -> int:
    """c(x, y) = 1 if the two outcomes are equal, else 0."""
    return 1 if x == y else 0


def t_statistic(trial: TrialRecord, params: ChainParams, mode: Mode = "correlation") -> int:
    """Per-trial binary score used by the memory-robust analysis.

    In correlation mode (state Phi+): 1 iff the outcomes differ, except on
    the closing pair (a_N, b_1) where it is 1 iff they agree.  Anticorrelation
    mode (state Phi-) flips all four cases.
    """
    k, l = trial.pair.a_index, trial.pair.b_index
    if not _is_admissible(params.N, k, l):
        raise ValueError(
            f"setting pair (a_{k}, b_{l}) is not admissible for N={params.N}"
        )
    c = c_statistic(trial.outcome_a, trial.outcome_b)
    closing = is_closing_pair(params, k, l)
    t = c if closing else 1 - c
    if mode == "anticorrelation":
        t = 1 - t
    return t


@dataclass
class PairStats:
    """Per-pair trial count and mean (anti)correlation."""

    count: int
    mean: float

    @property
    def stderr(self) -> float:
        if self.count < 2:
            raise ValueError(
                f"need at least 2 trials per pair for a standard error, got {self.count}"
            )
        return math.sqrt(self.mean * (1.0 - self.mean) / (self.count - 1))


@dataclass(frozen=True)
class ChainEstimate:
    """Estimated chained Bell parameter with per-pair detail.

    ``per_pair`` maps (k, l) to PairStats in chain order; ``value`` is the
    estimate of I_N (or of its anticorrelation counterpart) and ``stderr`` the
    i.i.d.-propagated standard error sqrt(sum_j eps_j^2).
    """

    value: float
    stderr: float
    per_pair: dict[tuple[int, int], PairStats]
    mode: Mode
    n_trials: int


def pair_stats_from_log(
    log: Iterable[TrialRecord],
    params: ChainParams,
    mode: Mode = "correlation",
    include_unheralded: bool = False,
) -> dict[tuple[int, int], PairStats]:
    """Aggregate a trial log into per-pair counts and mean (anti)correlations.

    Unheralded trials are excluded unless ``include_unheralded`` is set.
    """
    counts: dict[tuple[int, int], int] = {}
    sums: dict[tuple[int, int], int] = {}
    for trial in log:
        if not trial.heralded and not include_unheralded:
            continue
        k, l = trial.pair.a_index, trial.pair.b_index
        if not _is_admissible(params.N, k, l):
            raise ValueError(
                f"setting pair (a_{k}, b_{l}) is not admissible for N={params.N}"
            )
        c = c_statistic(trial.outcome_a, trial.outcome_b)
        if mode == "anticorrelation":
            c = 1 - c
        key = (k, l)
        counts[key] = counts.get(key, 0) + 1
        sums[key] = sums.get(key, 0) + c
    return {
        key: PairStats(count=counts[key], mean=sums[key] / counts[key])
        for key in counts
    }


def chain_estimate_from_stats(
    stats: dict[tuple[int, int], PairStats],
    params: ChainParams,
    mode: Mode = "correlation",
) -> ChainEstimate:
    """Chained Bell parameter from per-pair statistics.

    The stats must already be in the requested mode (means are correlations
    in correlation mode, anticorrelations in anticorrelation mode).
    """
    pairs = settings_set(params)
    value = 0.0
    var = 0.0
    ordered: dict[tuple[int, int], PairStats] = {}
    total = 0
    for pair in pairs:
        st = stats.get(pair.key)
        if st is None:
            k, l = pair.key
            raise ValueError(f"no trials for setting pair (a_{k}, b_{l})")
        ordered[pair.key] = st
        total += st.count
        if is_closing_pair(params, *pair.key):
            value += 1.0 - st.mean
        else:
            value += st.mean
        var += st.stderr**2
    return ChainEstimate(
        value=value,
        stderr=math.sqrt(var),
        per_pair=ordered,
        mode=mode,
        n_trials=total,
    )


def chain_estimate(
    log: Sequence[TrialRecord],
    params: ChainParams,
    mode: Mode = "correlation",
    include_unheralded: bool = False,
) -> ChainEstimate:
    """Estimate the chained Bell parameter from a trial log.

    Only heralded trials enter by default.  Every one of the 2N pairs must
    appear at least twice for the propagated standard error to exist.
    """
    stats = pair_stats_from_log(log, params, mode, include_unheralded)
    return chain_estimate_from_stats(stats, params, mode)


def chsh_parameter(estimate: ChainEstimate) -> tuple[float, float]:
    """CHSH sum-of-correlations B = 2(1 - I_2) + 2 from an N=2 estimate.

    Returns (value, stderr).  Local realism implies B <= 2.
    """
    if len(estimate.per_pair) != 4:
        raise ValueError(
            f"CHSH parameter requires an N=2 estimate (4 pairs), "
            f"got {len(estimate.per_pair)} pairs"
        )
    return 2.0 * (1.0 - estimate.value) + 2.0, 2.0 * estimate.stderr


def min_detection_efficiency(N: int) -> float:
    """Minimum detection efficiency closing the detection loophole at order N.

    eta_min(N) = 2 / ((N/(N-1)) * cos(pi/(2N)) + 1), for equal efficiencies
    and a maximally entangled state.
    """
    if N < 2:
        raise ValueError(f"chain order N must be >= 2, got {N}")
    return 2.0 / ((N / (N - 1)) * math.cos(math.pi / (2 * N)) + 1.0)
