"""Log-domain Viterbi decoding against a small HMM, with an exact oracle.

`viterbi_decode` is the standard max-product dynamic program.
`exhaustive_decode` scores every state path outright and exists to check it
on tiny instances; both apply the same tie-breaking rule (prefer the lower
state index at every decision), so their outputs are interchangeable.
Emission scores come from a LogScoreMatrix through the model's
state-to-class column map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .posteriors import LOG_FLOOR, LogScoreMatrix

__all__ = [
    "HmmModel",
    "DecodingResult",
    "viterbi_decode",
    "exhaustive_decode",
    "score_path",
    "collapse_tokens",
]

EXHAUSTIVE_PATH_LIMIT = 10_000_000
_CHUNK = 1 << 16

DIST_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class HmmModel:
    """State set with log-domain initial/transition scores and label maps.

    `state_labels[s]` is the output token of state s; `state_to_class[s]`
    is the posterior-matrix column that scores it. exp(log_initial) and
    each exp(transition row) must sum to 1 within 1e-6. Zero probabilities
    are floored at LOG_FLOOR rather than -inf.
    """

    log_initial: np.ndarray
    log_transitions: np.ndarray
    state_labels: tuple[str, ...]
    state_to_class: np.ndarray

    def __post_init__(self):
        init = np.asarray(self.log_initial, dtype=np.float64)
        trans = np.asarray(self.log_transitions, dtype=np.float64)
        s2c = np.asarray(self.state_to_class, dtype=np.int64)
        labels = tuple(str(l) for l in self.state_labels)
        if init.ndim != 1:
            raise ValidationError("log_initial must be a vector")
        n = init.shape[0]
        if n < 1:
            raise ValidationError("HMM needs at least one state")
        if trans.shape != (n, n):
            raise ValidationError(
                f"log_transitions must be {n}x{n}, got {trans.shape}"
            )
        if len(labels) != n or s2c.shape != (n,):
            raise ValidationError("state_labels and state_to_class must have one entry per state")
        if (s2c < 0).any():
            raise ValidationError("state_to_class entries must be nonnegative column indices")
        if abs(np.exp(init).sum() - 1.0) > DIST_SUM_TOLERANCE:
            raise ValidationError(
                f"exp(log_initial) sums to {np.exp(init).sum()!r}, expected 1"
            )
        row_sums = np.exp(trans).sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > DIST_SUM_TOLERANCE)
        if bad.size:
            raise ValidationError(
                f"transition row {bad[0]} sums to {row_sums[bad[0]]!r}, expected 1"
            )
        for arr in (init, trans, s2c):
            arr.setflags(write=False)
        object.__setattr__(self, "log_initial", init)
        object.__setattr__(self, "log_transitions", trans)
        object.__setattr__(self, "state_labels", labels)
        object.__setattr__(self, "state_to_class", s2c)

    @property
    def num_states(self) -> int:
        return self.log_initial.shape[0]

    @classmethod
    def from_probs(cls, initial, transitions, labels, state_to_class) -> "HmmModel":
        """Build from linear probabilities, flooring log(0) at LOG_FLOOR."""
        init = np.asarray(initial, dtype=np.float64)
        trans = np.asarray(transitions, dtype=np.float64)
        if (init < 0).any() or (trans < 0).any():
            raise ValidationError("probabilities must be nonnegative")
        with np.errstate(divide="ignore"):
            log_init = np.where(init == 0.0, LOG_FLOOR, np.log(init))
            log_trans = np.where(trans == 0.0, LOG_FLOOR, np.log(trans))
        return cls(log_init, log_trans, tuple(labels), state_to_class)


@dataclass(frozen=True)
class DecodingResult:
    """Best state path, its collapsed token sequence, and its log score."""

    state_path: tuple[int, ...]
    token_sequence: tuple[str, ...]
    log_score: float


def collapse_tokens(labels: Sequence[str]) -> tuple[str, ...]:
    """Merge consecutive identical labels into one token."""
    out: list[str] = []
    for lab in labels:
        if not out or out[-1] != lab:
            out.append(lab)
    return tuple(out)


def _emissions(scores: LogScoreMatrix, hmm: HmmModel) -> np.ndarray:
    s2c = hmm.state_to_class
    if int(s2c.max()) >= scores.classes:
        raise ValidationError(
            f"state_to_class refers to column {int(s2c.max())} but the score "
            f"matrix has {scores.classes} classes"
        )
    return scores.values[:, s2c]


def _result(path: np.ndarray, log_score: float, hmm: HmmModel) -> DecodingResult:
    path_t = tuple(int(s) for s in path)
    tokens = collapse_tokens([hmm.state_labels[s] for s in path_t])
    return DecodingResult(path_t, tokens, float(log_score))


def viterbi_decode(scores: LogScoreMatrix, hmm: HmmModel) -> DecodingResult:
    """Maximum-log-probability state path by exact dynamic programming.

    Ties prefer the lower state index at every backpointer decision and at
    the final frame, making the result deterministic.
    """
    emis = _emissions(scores, hmm)
    num_frames, num_states = emis.shape
    backptr = np.zeros((num_frames, num_states), dtype=np.int64)
    delta = hmm.log_initial + emis[0]
    for t in range(1, num_frames):
        cand = delta[:, None] + hmm.log_transitions
        best_prev = np.argmax(cand, axis=0)  # first max = lowest index
        backptr[t] = best_prev
        delta = cand[best_prev, np.arange(num_states)] + emis[t]
    last = int(np.argmax(delta))
    path = np.empty(num_frames, dtype=np.int64)
    path[-1] = last
    for t in range(num_frames - 1, 0, -1):
        path[t - 1] = backptr[t, path[t]]
    return _result(path, float(delta[last]), hmm)


def exhaustive_decode(scores: LogScoreMatrix, hmm: HmmModel) -> DecodingResult:
    """Best state path by scoring every path; oracle for `viterbi_decode`.

    Applies the same tie-breaking rule as the DP (the winning path is the
    one minimizing the state sequence read from the last frame backwards,
    among all score-maximal paths). Refuses instances with more than
    EXHAUSTIVE_PATH_LIMIT paths.
    """
    emis = _emissions(scores, hmm)
    num_frames, num_states = emis.shape
    total = num_states**num_frames
    if total > EXHAUSTIVE_PATH_LIMIT:
        raise ValidationError(
            f"{num_states}^{num_frames} = {total} paths exceeds the exhaustive "
            f"limit of {EXHAUSTIVE_PATH_LIMIT}"
        )
    shape = (num_states,) * num_frames
    best_score = -np.inf
    best_path: np.ndarray | None = None
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        # Digits of idx enumerate paths in reverse order: earlier index ==
        # smaller state sequence read from the last frame backwards, which
        # is exactly the DP's tie preference.
        rev = np.unravel_index(idx, shape)
        states = rev[::-1]
        tot = hmm.log_initial[states[0]] + emis[0, states[0]]
        for t in range(1, num_frames):
            tot = tot + hmm.log_transitions[states[t - 1], states[t]]
            tot = tot + emis[t, states[t]]
        j = int(np.argmax(tot))  # first max: smallest reversed sequence
        if tot[j] > best_score:
            best_score = float(tot[j])
            best_path = np.array([s[j] for s in states], dtype=np.int64)
    assert best_path is not None
    return _result(best_path, best_score, hmm)


def score_path(path: Sequence[int], scores: LogScoreMatrix, hmm: HmmModel) -> float:
    """Log score of an explicit state path: initial + transitions + emissions.

    Accumulates in the same order as the DP, so the score of a decoded path
    reproduces DecodingResult.log_score exactly.
    """
    emis = _emissions(scores, hmm)
    num_frames, num_states = emis.shape
    if len(path) != num_frames:
        raise ValidationError(
            f"path length {len(path)} != number of frames {num_frames}"
        )
    states = [int(s) for s in path]
    for s in states:
        if not 0 <= s < num_states:
            raise ValidationError(f"state index {s} out of range [0, {num_states})")
    total = hmm.log_initial[states[0]] + emis[0, states[0]]
    for t in range(1, num_frames):
        total = total + hmm.log_transitions[states[t - 1], states[t]]
        total = total + emis[t, states[t]]
    return float(total)
