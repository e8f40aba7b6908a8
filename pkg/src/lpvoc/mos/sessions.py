"""Listening-test sessions: seeded, codec-blinded presentation order."""

import numpy as np

from ..errors import NoSamples


def create_session(sample_ids, seed: int) -> list:
    """A seeded permutation of the sample ids; no codec identity included."""
    ids = list(sample_ids)
    if not ids:
        raise NoSamples("no prepared samples")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    return [ids[i] for i in order]
