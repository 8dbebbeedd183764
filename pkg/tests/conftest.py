import numpy as np
import pytest

from chainbell import BRIGHT, DARK, ChainParams, TrialRecord, settings_set


def balanced_log(params: ChainParams, m_per_pair: int, rng: np.random.Generator):
    """Random log with exactly m_per_pair trials for every setting pair."""
    records = []
    idx = 0
    for pair in settings_set(params):
        for _ in range(m_per_pair):
            x = BRIGHT if rng.random() < 0.5 else DARK
            y = BRIGHT if rng.random() < 0.5 else DARK
            records.append(
                TrialRecord(
                    trial_index=idx,
                    block_index=idx,
                    pair=pair,
                    outcome_a=x,
                    outcome_b=y,
                )
            )
            idx += 1
    return records


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
