import numpy as np
import pytest

from minkdecode import HmmModel, LogScoreMatrix, PosteriorMatrix


def make_random_hmm(rng, num_states, classes=None):
    """Row-stochastic HMM with identity-ish state->class map and word labels."""
    classes = num_states if classes is None else classes
    init = rng.dirichlet(np.ones(num_states))
    trans = rng.dirichlet(np.ones(num_states), size=num_states)
    labels = [f"w{i}" for i in range(num_states)]
    s2c = [i % classes for i in range(num_states)]
    return HmmModel.from_probs(init, trans, labels, s2c)


def make_uniform_hmm(num_states):
    p = np.full(num_states, 1.0 / num_states)
    trans = np.full((num_states, num_states), 1.0 / num_states)
    labels = [f"w{i}" for i in range(num_states)]
    return HmmModel.from_probs(p, trans, labels, list(range(num_states)))


def make_random_posteriors(rng, frames, classes):
    return PosteriorMatrix(rng.dirichlet(np.ones(classes), size=frames))


def make_random_scores(rng, frames, classes):
    return LogScoreMatrix(rng.normal(size=(frames, classes)))


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)
